//! Solvers for the symmetric indefinite system: sign-regularized sparse LDL^T
//! (falling back to sparse LU), and diagonally scaled MINRES.

use std::time::Instant;

use faer::dyn_stack::{MemBuffer, MemStack, StackReq};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::prelude::Solve;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, SymmetricOrdering};
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Conj, Mat, Par, Side};
use serde::{Deserialize, Serialize};

use crate::dof::GlobalSystem;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Largest relative residual accepted from any solve.
pub const RESIDUAL_CONTRACT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Direct,
    Iterative,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub method: SolverMethod,
    /// Relative residual target of the iterative method.
    pub tolerance: f64,
    /// Iteration cap; `None` means `50 sqrt(dim)`.
    pub max_iterations: Option<usize>,
    pub initial_guess: Option<Vec<f64>>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            method: SolverMethod::Direct,
            tolerance: 1e-12,
            max_iterations: None,
            initial_guess: None,
        }
    }
}

impl SolveConfig {
    pub fn iterative() -> Self {
        Self {
            method: SolverMethod::Iterative,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub solution: Vec<T>,
    /// `|Ax - b| / |b|`, or `|Ax - b|` when `b = 0`.
    pub relative_residual: f64,
    pub method: SolverMethod,
    pub iterations: Option<usize>,
    pub seconds: f64,
}

pub fn solve<T: Real>(system: &GlobalSystem<T>, config: &SolveConfig) -> Result<SolveReport<T>> {
    solve_signed(&system.matrix, &system.rhs, Some(&system.pivot_signs), config)
}

/// Solves `A x = b` for a square sparse matrix.
pub fn solve_matrix<T: Real>(a: &CsrMatrix<T>, b: &[T], config: &SolveConfig) -> Result<SolveReport<T>> {
    solve_signed(a, b, None, config)
}

/// Like [`solve_matrix`]; for a symmetric `A` whose expected pivot signs are
/// known the direct method factors `A + delta diag(signs)` as LDL^T and refines
/// against `A`.
pub fn solve_signed<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    signs: Option<&[i8]>,
    config: &SolveConfig,
) -> Result<SolveReport<T>> {
    if signs.is_some_and(|s| s.len() != a.nrows) {
        return Err(Error::DofMismatch(format!(
            "{} pivot signs for {} unknowns",
            signs.map_or(0, <[i8]>::len),
            a.nrows
        )));
    }
    if a.nrows != a.ncols || b.len() != a.nrows {
        return Err(Error::InvalidInput(format!(
            "cannot solve a {}x{} system with a right-hand side of length {}",
            a.nrows,
            a.ncols,
            b.len()
        )));
    }
    let start = Instant::now();
    let a64 = a.cast::<f64>();
    let b64: Vec<f64> = b.iter().map(|v| v.to_f64_lossy()).collect();
    let (x, iterations) = match config.method {
        SolverMethod::Direct => {
            let ldlt = signs.and_then(|s| ldlt(&a64, &b64, s));
            match ldlt {
                Some(x) => (x, None),
                None => (direct(&a64, &b64)?, None),
            }
        }
        SolverMethod::Iterative => {
            let (x, it) = minres(&a64, &b64, config)?;
            (x, Some(it))
        }
    };
    let relative_residual = relative_residual(&a64, &x, &b64);
    if !(relative_residual <= RESIDUAL_CONTRACT) {
        return Err(Error::NotConverged {
            iterations: iterations.unwrap_or(0),
            residual: relative_residual,
        });
    }
    Ok(SolveReport {
        solution: x.iter().map(|&v| T::lit(v)).collect(),
        relative_residual,
        method: config.method,
        iterations,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn relative_residual(a: &CsrMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r = norm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
    let nb = norm(b);
    if nb > 0.0 {
        r / nb
    } else {
        r
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative static regularization of the LDL^T path.
const LDLT_DELTA: f64 = 1e-9;
const LDLT_REFINEMENTS: usize = 30;

/// Regularized LDL^T with AMD ordering and iterative refinement against `a`.
/// `None` if the factorization fails or refinement stalls above 1e-13.
fn ldlt(a: &CsrMatrix<f64>, b: &[f64], signs: &[i8]) -> Option<Vec<f64>> {
    let n = a.nrows;
    if n == 0 || a.asymmetry() > 1e-12 {
        return None;
    }
    let scale = a.max_abs();
    if !(scale > 0.0) {
        return None;
    }
    let delta = LDLT_DELTA * scale;
    // lower triangle of the regularized matrix in CSC; CSR of a symmetric matrix
    // read row-wise gives its columns
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::with_capacity(a.nnz() / 2 + n);
    let mut values = Vec::with_capacity(a.nnz() / 2 + n);
    col_ptr.push(0usize);
    for j in 0..n {
        let shift = delta * f64::from(signs[j]);
        let mut diag = false;
        for (i, v) in a.row(j) {
            if i < j {
                continue;
            }
            if i == j {
                diag = true;
                row_idx.push(i);
                values.push(v + shift);
            } else {
                if !diag {
                    diag = true;
                    row_idx.push(j);
                    values.push(shift);
                }
                row_idx.push(i);
                values.push(v);
            }
        }
        if !diag {
            row_idx.push(j);
            values.push(shift);
        }
        col_ptr.push(row_idx.len());
    }
    let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
    let lower = SparseColMat::new(symbolic, values);
    let chol = factorize_symbolic_cholesky(
        lower.symbolic(),
        Side::Lower,
        SymmetricOrdering::Amd,
        Default::default(),
    )
    .ok()?;
    let par = Par::Seq;
    let mut l_values = vec![0.0f64; chol.len_val()];
    let mut mem = MemBuffer::try_new(StackReq::any_of(&[
        chol.factorize_numeric_ldlt_scratch::<f64>(par, Default::default()),
        chol.solve_in_place_scratch::<f64>(1, par),
    ]))
    .ok()?;
    let factor = chol
        .factorize_numeric_ldlt(
            &mut l_values,
            lower.as_ref(),
            Side::Lower,
            LdltRegularization {
                dynamic_regularization_signs: Some(signs),
                dynamic_regularization_delta: delta,
                dynamic_regularization_epsilon: 1e-3 * delta,
            },
            par,
            MemStack::new(&mut mem),
            Default::default(),
        )
        .ok()?;
    let mut apply_inverse = |rhs: &[f64]| -> Vec<f64> {
        let mut x = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        factor.solve_in_place_with_conj(Conj::No, x.as_mut(), par, MemStack::new(&mut mem));
        (0..n).map(|i| x[(i, 0)]).collect()
    };
    let mut x = apply_inverse(b);
    let nb = norm(b).max(f64::MIN_POSITIVE);
    let mut best = (f64::INFINITY, x.clone());
    for _ in 0..=LDLT_REFINEMENTS {
        let ax = a.mul_vec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let res = norm(&r) / nb;
        if !res.is_finite() {
            return None;
        }
        if res <= 1e-13 {
            return Some(x);
        }
        if res > 0.5 * best.0 {
            break;
        }
        best = (res, x.clone());
        for (xi, d) in x.iter_mut().zip(apply_inverse(&r)) {
            *xi += d;
        }
    }
    (best.0 <= RESIDUAL_CONTRACT).then_some(best.1)
}

fn direct(a: &CsrMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows;
    if n == 0 {
        return Ok(Vec::new());
    }
    // The CSR arrays of A are the CSC arrays of A^T, hence the transposed solves.
    let symbolic = SymbolicSparseColMat::new_checked(n, n, a.row_ptr.clone(), None, a.col_idx.clone());
    let at = SparseColMat::new(symbolic, a.values.clone());
    let lu = at.sp_lu().map_err(|e| match e {
        LuError::SymbolicSingular { index } => Error::Singular {
            index,
            context: "no structurally nonzero pivot".into(),
        },
        LuError::Generic(e) => Error::InvalidInput(format!("sparse factorization failed: {e:?}")),
    })?;
    let solve = |rhs: &[f64]| -> Result<Vec<f64>> {
        let mut x = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        lu.solve_transpose_in_place(x.as_mut());
        let x: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Singular {
                index,
                context: "zero pivot during numeric factorization".into(),
            });
        }
        Ok(x)
    };
    let mut x = solve(b)?;
    // A few steps of iterative refinement against the original matrix.
    let nb = norm(b).max(f64::MIN_POSITIVE);
    for _ in 0..3 {
        let ax = a.mul_vec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        if norm(&r) / nb <= 1e-14 {
            break;
        }
        let dx = solve(&r)?;
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
    }
    Ok(x)
}

/// MINRES on `D A D y = D b`, `x = D y`, with `D = diag(1 / sqrt(|row_i|_2))`.
fn minres(a: &CsrMatrix<f64>, b: &[f64], config: &SolveConfig) -> Result<(Vec<f64>, usize)> {
    let n = a.nrows;
    let max_it = config
        .max_iterations
        .unwrap_or_else(|| (50.0 * (n as f64).sqrt()).ceil() as usize);
    let d: Vec<f64> = (0..n)
        .map(|r| {
            let s = a.row(r).map(|(_, v)| v * v).sum::<f64>().sqrt();
            if s > 0.0 {
                1.0 / s.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let apply = |v: &[f64]| -> Vec<f64> {
        let dv: Vec<f64> = v.iter().zip(&d).map(|(x, s)| x * s).collect();
        a.mul_vec(&dv).iter().zip(&d).map(|(x, s)| x * s).collect()
    };
    let x0 = match &config.initial_guess {
        Some(g) if g.len() == n => g.clone(),
        Some(g) => {
            return Err(Error::InvalidInput(format!(
                "initial guess has length {}, system has {n} unknowns",
                g.len()
            )))
        }
        None => vec![0.0; n],
    };
    let nb = norm(b);
    let target = config.tolerance;
    let true_residual = |x: &[f64]| relative_residual(a, x, b);
    if true_residual(&x0) <= target {
        return Ok((x0, 0));
    }

    // y = D^{-1} x
    let mut y: Vec<f64> = x0.iter().zip(&d).map(|(x, s)| x / s).collect();
    let bs: Vec<f64> = b.iter().zip(&d).map(|(x, s)| x * s).collect();
    let nbs = norm(&bs).max(f64::MIN_POSITIVE);
    let ay = apply(&y);
    let mut r1: Vec<f64> = bs.iter().zip(&ay).map(|(p, q)| p - q).collect();
    let mut r2 = r1.clone();
    let mut v_next = r1.clone();
    let mut beta = norm(&r1);
    let mut oldb = 0.0;
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut goal = target * (nbs / nb.max(f64::MIN_POSITIVE)).min(1.0);
    let mut best = (f64::INFINITY, y.clone());

    for it in 1..=max_it {
        if beta == 0.0 {
            break;
        }
        let v: Vec<f64> = v_next.iter().map(|x| x / beta).collect();
        let mut z = apply(&v);
        if it >= 2 {
            let f = beta / oldb;
            for (zi, ri) in z.iter_mut().zip(&r1) {
                *zi -= f * ri;
            }
        }
        let alfa = dot(&v, &z);
        let f = alfa / beta;
        for (zi, ri) in z.iter_mut().zip(&r2) {
            *zi -= f * ri;
        }
        r1 = std::mem::replace(&mut r2, z.clone());
        v_next = z;
        oldb = beta;
        beta = norm(&v_next);
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        let w1 = std::mem::replace(&mut w2, w.clone());
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            y[i] += phi * w[i];
        }
        if phibar / nbs <= goal || it == max_it || beta == 0.0 {
            let x: Vec<f64> = y.iter().zip(&d).map(|(v, s)| v * s).collect();
            let res = true_residual(&x);
            if res < best.0 {
                best = (res, x.clone());
            }
            if res <= target {
                return Ok((x, it));
            }
            goal *= 0.1;
        }
    }
    Err(Error::NotConverged {
        iterations: max_it,
        residual: best.0,
    })
}
