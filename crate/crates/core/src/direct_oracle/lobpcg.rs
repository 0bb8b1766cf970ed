//! Block preconditioned eigensolver for the lowest eigenpairs of a large
//! real symmetric operator that is only available through its action.
//!
//! Each step runs Rayleigh–Ritz on span[X, W, P]: the current block X, the
//! preconditioned residuals W and the previous search directions P. W and P
//! are orthogonalized against X and then among themselves by an
//! eigen-decomposition of their Gram matrix, dropping numerically dependent
//! directions. All reductions are dense products in a fixed order, so the
//! result does not depend on the number of threads.

use crate::error::{Error, Result};
use crate::linalg::real_symmetric_eigen;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Real symmetric operator acting on blocks of column vectors.
pub trait BlockOperator: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64>;

    /// Symmetric positive definite approximation of the inverse.
    fn precondition(&self, r: &DMatrix<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobpcgOptions {
    pub block: usize,
    pub max_iterations: usize,
    /// Absolute residual norm below which a column counts as converged.
    pub tolerance: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct LobpcgOutcome {
    /// Ritz values, ascending.
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

const DROP_TOLERANCE: f64 = 1e-12;
const REORTHOGONALIZE_EVERY: usize = 10;

/// Orthonormal basis of the column span, dropping directions whose Gram
/// eigenvalue is below DROP_TOLERANCE relative to the largest. Two passes.
fn orthonormalize(s: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = s.clone();
    for _ in 0..2 {
        if q.ncols() == 0 {
            return q;
        }
        let gram = q.tr_mul(&q);
        let scale: Vec<f64> = (0..gram.nrows())
            .map(|i| {
                let d = gram[(i, i)];
                if d > 0.0 {
                    1.0 / d.sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        let scaled = DMatrix::from_fn(gram.nrows(), gram.ncols(), |i, j| gram[(i, j)] * scale[i] * scale[j]);
        let (lam, vecs) = real_symmetric_eigen(&scaled);
        let top = lam.last().copied().unwrap_or(0.0);
        let keep: Vec<usize> = (0..lam.len()).filter(|&i| lam[i] > DROP_TOLERANCE * top).collect();
        let c = DMatrix::from_fn(gram.nrows(), keep.len(), |i, j| {
            scale[i] * vecs[(i, keep[j])] / lam[keep[j]].sqrt()
        });
        q = &q * c;
    }
    q
}

fn project_out(x: &DMatrix<f64>, w: &mut DMatrix<f64>) {
    for _ in 0..2 {
        let coeff = x.tr_mul(w);
        *w -= x * coeff;
    }
}

fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(n, a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

fn residuals(x: &DMatrix<f64>, hx: &DMatrix<f64>, theta: &[f64]) -> (DMatrix<f64>, Vec<f64>) {
    let mut r = hx.clone();
    for (j, t) in theta.iter().enumerate() {
        let mut col = r.column_mut(j);
        col.axpy(-t, &x.column(j), 1.0);
    }
    let norms = (0..r.ncols()).map(|j| r.column(j).norm()).collect();
    (r, norms)
}

/// Rayleigh–Ritz in an orthonormal basis s with hs = A s, keeping the
/// lowest `keep` pairs. Returns (θ, coefficients).
fn rayleigh_ritz(s: &DMatrix<f64>, hs: &DMatrix<f64>, keep: usize) -> (Vec<f64>, DMatrix<f64>) {
    let small = s.tr_mul(hs);
    let sym = (&small + small.transpose()) * 0.5;
    let (lam, vecs) = real_symmetric_eigen(&sym);
    let keep = keep.min(lam.len());
    (lam[..keep].to_vec(), vecs.columns(0, keep).into_owned())
}

/// Runs until `done(θ, residual norms)` returns true. Non-convergence within
/// the iteration budget is an error carrying the last residuals.
pub fn lobpcg<F>(op: &dyn BlockOperator, options: &LobpcgOptions, mut done: F) -> Result<LobpcgOutcome>
where
    F: FnMut(&[f64], &[f64]) -> bool,
{
    let n = op.dim();
    let nb = options.block;
    if nb == 0 || 3 * nb > n {
        return Err(Error::Precondition(format!(
            "block size {nb} is not usable for an operator of dimension {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let init = DMatrix::from_fn(n, nb, |_, _| rng.random_range(-1.0..1.0));
    let mut x = orthonormalize(&init);
    if x.ncols() < nb {
        return Err(Error::Consistency("random starting block is rank deficient".into()));
    }
    let mut hx = op.apply(&x);
    let (mut theta, z) = rayleigh_ritz(&x, &hx, nb);
    x = &x * &z;
    hx = &hx * &z;
    let mut p: Option<DMatrix<f64>> = None;
    let mut last = Vec::new();

    for iteration in 0..=options.max_iterations {
        let (r, norms) = residuals(&x, &hx, &theta);
        if done(&theta, &norms) {
            return Ok(LobpcgOutcome {
                values: theta,
                vectors: x,
                residuals: norms,
                iterations: iteration,
            });
        }
        last = norms.clone();
        if iteration == options.max_iterations {
            break;
        }
        let active: Vec<usize> = (0..nb).filter(|&j| norms[j] > options.tolerance).collect();
        let r_active = DMatrix::from_fn(n, active.len(), |i, j| r[(i, active[j])]);
        let mut w = op.precondition(&r_active);
        project_out(&x, &mut w);
        let mut dirs = match p.take() {
            Some(mut prev) => {
                project_out(&x, &mut prev);
                hstack(&w, &prev)
            }
            None => w,
        };
        dirs = orthonormalize(&dirs);
        project_out(&x, &mut dirs);
        let hq = op.apply(&dirs);
        let s = hstack(&x, &dirs);
        let hs = hstack(&hx, &hq);
        let (values, coeff) = rayleigh_ritz(&s, &hs, nb);
        let q_part = coeff.rows(nb, dirs.ncols()).into_owned();
        x = &s * &coeff;
        hx = &hs * &coeff;
        p = Some(&dirs * q_part);
        theta = values;

        if (iteration + 1) % REORTHOGONALIZE_EVERY == 0 {
            let gram = x.tr_mul(&x);
            let defect = (&gram - DMatrix::<f64>::identity(nb, nb)).abs().max();
            if defect > 1e-10 {
                x = orthonormalize(&x);
                hx = op.apply(&x);
                let (values, z) = rayleigh_ritz(&x, &hx, nb);
                x = &x * &z;
                hx = &hx * &z;
                theta = values;
                p = None;
            }
        }
    }
    let worst = last.iter().fold(0.0f64, |m, r| m.max(*r));
    Err(Error::NotConverged {
        iterations: options.max_iterations,
        worst_residual: worst,
        tolerance: options.tolerance,
        residuals: last,
    })
}
