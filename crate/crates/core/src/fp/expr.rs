use nalgebra::{DMatrix, DVector};

use crate::linalg::{CMat, CVec, C64};
use crate::subsolver::ConvexFn;

/// A complex vector that depends affinely on real variables: `d + C x`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineExpr {
    pub constant: CVec,
    pub coeffs: CMat,
}

impl AffineExpr {
    pub fn zeros(len: usize, n_vars: usize) -> Self {
        Self { constant: CVec::zeros(len), coeffs: CMat::zeros(len, n_vars) }
    }

    pub fn len(&self) -> usize {
        self.constant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constant.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn eval(&self, x: &DVector<f64>) -> CVec {
        let xc: CVec = x.map(C64::from);
        &self.constant + &self.coeffs * xc
    }

    pub fn add_assign(&mut self, other: &AffineExpr) {
        self.constant += &other.constant;
        self.coeffs += &other.coeffs;
    }

    /// Sum of the diagonal when `self` is a column-major `n×n` matrix.
    pub fn trace(&self, n: usize) -> AffineExpr {
        let mut out = AffineExpr::zeros(1, self.n_vars());
        for t in 0..n {
            let i = t + t * n;
            out.constant[0] += self.constant[i];
            for j in 0..self.n_vars() {
                out.coeffs[(0, j)] += self.coeffs[(i, j)];
            }
        }
        out
    }

    /// `‖d + Cx‖²` as `xᵀ Re(CᴴC) x + 2 Re(Cᴴd)ᵀ x + ‖d‖²`.
    pub fn norm_sqr(&self) -> ConvexFn {
        let ch = self.coeffs.adjoint();
        let q: DMatrix<f64> = (&ch * &self.coeffs).map(|z| z.re);
        let b: DVector<f64> = (&ch * &self.constant).map(|z| 2.0 * z.re);
        ConvexFn { quad: Some(q), linear: b, constant: self.constant.norm_squared(), sqrt: Vec::new() }
    }

    /// `Re(e)` for a scalar expression, as an affine function.
    pub fn real_part(&self) -> ConvexFn {
        assert_eq!(self.len(), 1, "real_part needs a scalar expression");
        let b = DVector::from_iterator(self.n_vars(), self.coeffs.row(0).iter().map(|z| z.re));
        ConvexFn::affine(b, self.constant[0].re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn sample() -> AffineExpr {
        let mut e = AffineExpr::zeros(4, 2);
        e.constant =
            CVec::from_vec(vec![C64::new(1.0, 0.5), C64::new(0.0, -1.0), C64::new(2.0, 0.0), C64::new(-0.3, 0.2)]);
        e.coeffs = CMat::from_fn(4, 2, |i, j| C64::new(0.1 * (i + j) as f64, 0.2 * i as f64 - 0.3 * j as f64));
        e
    }

    #[test]
    fn norm_sqr_matches_direct_evaluation() {
        let e = sample();
        let f = e.norm_sqr();
        for x in [dvector![0.0, 0.0], dvector![1.0, -2.0], dvector![0.3, 0.7]] {
            assert!((f.value(&x) - e.eval(&x).norm_squared()).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_of_two_by_two() {
        let e = sample();
        let x = dvector![0.4, -1.1];
        let v = e.eval(&x);
        let t = e.trace(2).eval(&x)[0];
        assert!((t - (v[0] + v[3])).norm() < 1e-12);
        assert!((e.trace(2).real_part().value(&x) - t.re).abs() < 1e-12);
    }
}
