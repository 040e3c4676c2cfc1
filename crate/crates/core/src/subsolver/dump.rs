//! Plain-text subproblem dumps for cross-checking against external solvers.
//!
//! ```text
//! # cran-pool subproblem v1
//! variables 2
//! var u[0][0][private]
//! var u[0][0][shared]
//! cost
//! const -1.5e0
//! lin 0 -2e0
//! quad 0 1 5e-1
//! sqrt 1 1e0
//! constraint 1e0 power power[0][0][private]
//! quad 0 0 1e0
//! end
//! ```
//!
//! Each function is `Σ quad_ij x_i x_j + Σ lin_i x_i + const − Σ sqrt_j √x_j`
//! where `quad i j` with `i < j` stands for both symmetric entries.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use super::{Constraint, ConvexFn, ConvexSubproblem};
use crate::error::{Error, Result};

const HEADER: &str = "# cran-pool subproblem v1";

fn write_fn(out: &mut impl Write, f: &ConvexFn) -> Result<()> {
    if f.constant != 0.0 {
        writeln!(out, "const {:e}", f.constant)?;
    }
    for (i, &b) in f.linear.iter().enumerate() {
        if b != 0.0 {
            writeln!(out, "lin {i} {b:e}")?;
        }
    }
    if let Some(q) = &f.quad {
        for i in 0..q.nrows() {
            for j in i..q.ncols() {
                if q[(i, j)] != 0.0 {
                    writeln!(out, "quad {i} {j} {:e}", q[(i, j)])?;
                }
            }
        }
    }
    for &(j, a) in &f.sqrt {
        writeln!(out, "sqrt {j} {a:e}")?;
    }
    Ok(())
}

pub fn write_subproblem(out: &mut impl Write, p: &ConvexSubproblem) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "variables {}", p.dim())?;
    for v in &p.variables {
        writeln!(out, "var {v}")?;
    }
    writeln!(out, "cost")?;
    write_fn(out, &p.cost)?;
    for c in &p.constraints {
        writeln!(out, "constraint {:e} {} {}", c.bound, c.tag, c.label)?;
        write_fn(out, &c.function)?;
    }
    writeln!(out, "end")?;
    Ok(())
}

fn bad(line: usize, msg: &str) -> Error {
    Error::Dump(format!("line {line}: {msg}"))
}

fn function(p: &mut ConvexSubproblem, target: Option<Option<usize>>, line: usize) -> Result<&mut ConvexFn> {
    match target {
        Some(None) => Ok(&mut p.cost),
        Some(Some(i)) => Ok(&mut p.constraints[i].function),
        None => Err(bad(line, "term outside a function block")),
    }
}

pub fn read_subproblem(input: impl BufRead) -> Result<ConvexSubproblem> {
    let mut lines = input.lines().enumerate();
    let mut next = || -> Result<Option<(usize, String)>> {
        for (i, l) in lines.by_ref() {
            let l = l?;
            if !l.trim().is_empty() {
                return Ok(Some((i + 1, l)));
            }
        }
        Ok(None)
    };
    match next()? {
        Some((_, l)) if l.trim() == HEADER => {}
        _ => return Err(bad(1, "missing header")),
    }
    let (ln, l) = next()?.ok_or_else(|| bad(2, "missing variable count"))?;
    let n: usize = l
        .strip_prefix("variables ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| bad(ln, "expected `variables <n>`"))?;
    let mut variables = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next()?.ok_or_else(|| bad(ln, "truncated variable list"))?;
        let name = l.strip_prefix("var ").ok_or_else(|| bad(ln, "expected `var <name>`"))?;
        variables.push(name.trim().to_string());
    }
    let mut p = ConvexSubproblem::new(variables);
    // None = cost, Some(i) = constraint i
    let mut target: Option<Option<usize>> = None;
    loop {
        let (ln, l) = next()?.ok_or_else(|| bad(0, "missing `end`"))?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(ln, "bad number"));
        let idx = |s: &str| match s.parse::<usize>() {
            Ok(i) if i < n => Ok(i),
            _ => Err(bad(ln, "bad variable index")),
        };
        match tok.as_slice() {
            ["end"] => break,
            ["cost"] => target = Some(None),
            ["constraint", bound, tag, label] => {
                p.constraints.push(Constraint {
                    label: label.to_string(),
                    tag: tag.to_string(),
                    function: ConvexFn::zero(n),
                    bound: num(bound)?,
                });
                target = Some(Some(p.constraints.len() - 1));
            }
            ["const", c] => function(&mut p, target, ln)?.constant += num(c)?,
            ["lin", i, b] => function(&mut p, target, ln)?.linear[idx(i)?] += num(b)?,
            ["quad", i, j, q] => {
                let (i, j, q) = (idx(i)?, idx(j)?, num(q)?);
                let m = function(&mut p, target, ln)?.quad.get_or_insert_with(|| DMatrix::zeros(n, n));
                m[(i, j)] = q;
                m[(j, i)] = q;
            }
            ["sqrt", j, a] => {
                let term = (idx(j)?, num(a)?);
                function(&mut p, target, ln)?.sqrt.push(term);
            }
            _ => return Err(bad(ln, "unrecognized line")),
        }
    }
    p.validate()?;
    Ok(p)
}
