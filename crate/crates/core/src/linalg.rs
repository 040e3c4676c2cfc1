//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const LN2: f64 = std::f64::consts::LN_2;

/// `λ(a) = a aᴴ` for a column vector.
pub fn outer(a: &CVec) -> CMat {
    a * a.adjoint()
}

/// `λ(A) = A Aᴴ`.
pub fn gram(a: &CMat) -> CMat {
    a * a.adjoint()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r0, c0), (b.nrows(), b.ncols())).copy_from(*b);
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

pub fn concat(parts: &[&CVec]) -> CVec {
    let n: usize = parts.iter().map(|p| p.len()).sum();
    let mut out = CVec::zeros(n);
    let mut o = 0;
    for p in parts {
        out.rows_mut(o, p.len()).copy_from(*p);
        o += p.len();
    }
    out
}

/// Cholesky factor of a Hermitian positive-definite matrix.
pub fn cholesky(m: &CMat) -> Result<Cholesky<C64, Dyn>> {
    Cholesky::new(m.clone())
        .ok_or_else(|| Error::Numerical(format!("matrix of side {} is not positive definite", m.nrows())))
}

/// `log2 det(M)` for Hermitian positive-definite `M`.
pub fn log2_det_hpd(m: &CMat) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let ch = cholesky(m)?;
    Ok(log2_det_from_cholesky(&ch))
}

pub fn log2_det_from_cholesky(ch: &Cholesky<C64, Dyn>) -> f64 {
    let l = ch.l_dirty();
    let mut acc = 0.0;
    for i in 0..l.nrows() {
        acc += l[(i, i)].re.ln();
    }
    2.0 * acc / LN2
}

/// `aᴴ M⁻¹ a` for Hermitian positive-definite `M`.
pub fn inv_quad(m: &CMat, a: &CVec) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let ch = cholesky(m)?;
    let x = ch.solve(a);
    Ok(a.dotc(&x).re.max(0.0))
}

/// Inverse of the lower Cholesky factor, `C⁻¹` with `M = C Cᴴ`.
pub fn inv_lower_factor(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let ch = cholesky(m)?;
    let l = ch.l();
    l.solve_lower_triangular(&CMat::identity(n, n)).ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))
}

pub fn trace_re(m: &CMat) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

pub fn is_finite_mat(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}
