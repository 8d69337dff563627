//! Smallest eigenpairs of `Kφ = λWφ`.
//!
//! Both paths work with the symmetric similarity transform
//! `S = W^{-1/2} K W^{-1/2}` and return vectors `ψ = W^{1/2}φ`. Small
//! problems use a dense symmetric eigensolver; large ones run a block Krylov
//! iteration on `S⁻¹` (shift-invert at zero through a sparse Cholesky factor
//! of `K`) with full reorthogonalisation and Rayleigh–Ritz extraction.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrete::OperatorMesh;
use crate::error::{Error, Result};
use crate::sparse::{dot, EnvelopeCholesky};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Problems with at most this many nodes are solved densely.
    pub dense_limit: usize,
    pub block: usize,
    /// Relative residual target `‖Sψ − λψ‖ ≤ tol·λ`.
    pub tol: f64,
    pub seed: u64,
    pub max_basis: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_limit: 600,
            block: 4,
            tol: 1e-8,
            seed: 0x5eed_0f_e1,
            max_basis: None,
        }
    }
}

pub(crate) struct RawEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub method: &'static str,
}

pub(crate) fn smallest(mesh: &OperatorMesh, k: usize, opts: &EigenOptions) -> Result<RawEigen> {
    let n = mesh.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("requested {k} eigenpairs of a {n}-node mesh")));
    }
    if n <= opts.dense_limit || 3 * k >= n {
        if n > 5000 {
            return Err(Error::Unsupported(format!("dense eigensolve of {n} nodes")));
        }
        dense(mesh, k)
    } else {
        krylov(mesh, k, opts)
    }
}

fn residual(s: &crate::sparse::CsrMatrix, lambda: f64, psi: &[f64]) -> f64 {
    let sv = s.mul(psi);
    let r: f64 = sv.iter().zip(psi).map(|(a, b)| (a - lambda * b).powi(2)).sum();
    r.sqrt() / lambda.abs().max(f64::MIN_POSITIVE)
}

fn dense(mesh: &OperatorMesh, k: usize) -> Result<RawEigen> {
    let s = mesh.symmetric_operator();
    let d = s.to_dense();
    let d = (&d + d.transpose()) * 0.5;
    let eig = SymmetricEigen::new(d);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &i in order.iter().take(k) {
        let lambda = eig.eigenvalues[i];
        let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        residuals.push(residual(&s, lambda, &v));
        values.push(lambda);
        vectors.push(v);
    }
    Ok(RawEigen {
        values,
        vectors,
        residuals,
        method: "dense",
    })
}

/// Orthogonalises `v` against `basis` twice and normalises; returns the
/// norm before normalisation.
fn orthonormalise(v: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    let before = dot(v, v).sqrt();
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
    let nrm = dot(v, v).sqrt();
    if nrm > 0.0 {
        for vi in v.iter_mut() {
            *vi /= nrm;
        }
    }
    if before > 0.0 {
        nrm / before
    } else {
        0.0
    }
}

fn krylov(mesh: &OperatorMesh, k: usize, opts: &EigenOptions) -> Result<RawEigen> {
    let n = mesh.n();
    let s = mesh.symmetric_operator();
    let chol = EnvelopeCholesky::new(&mesh.stiffness)?;
    let sq: Vec<f64> = mesh.weights.iter().map(|w| w.sqrt()).collect();
    let apply_inv = |v: &[f64]| -> Vec<f64> {
        let mut x: Vec<f64> = v.iter().zip(&sq).map(|(a, b)| a * b).collect();
        chol.solve_in_place(&mut x);
        for (xi, b) in x.iter_mut().zip(&sq) {
            *xi *= b;
        }
        x
    };
    let b = opts.block.max(1);
    let max_basis = opts.max_basis.unwrap_or((12 * k).max(240)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut aq: Vec<Vec<f64>> = Vec::new();
    // T = Qᵀ S⁻¹ Q, grown column by column
    let mut t: Vec<Vec<f64>> = Vec::new();

    let mut block: Vec<Vec<f64>> = (0..b).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut last_residuals = vec![f64::INFINITY; k];
    let mut iterations = 0;
    loop {
        iterations += 1;
        for mut v in block.drain(..) {
            if q.len() >= max_basis {
                break;
            }
            let mut ratio = orthonormalise(&mut v, &q);
            let mut tries = 0;
            while ratio < 1e-10 && tries < 5 {
                // invariant subspace reached: restart with fresh randomness
                v = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                ratio = orthonormalise(&mut v, &q);
                tries += 1;
            }
            if ratio < 1e-10 {
                break;
            }
            let av = apply_inv(&v);
            let col: Vec<f64> = q.iter().map(|qi| dot(qi, &av)).chain(std::iter::once(dot(&v, &av))).collect();
            for (row, c) in t.iter_mut().zip(&col) {
                row.push(*c);
            }
            t.push(col);
            q.push(v);
            aq.push(av);
        }
        let m = q.len();
        let full = m >= max_basis;
        if m >= k + b || full {
            let mut tm = DMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    let (a, c) = if j >= i { (i, j) } else { (j, i) };
                    tm[(i, j)] = t[c][a];
                }
            }
            let tm = (&tm + tm.transpose()) * 0.5;
            let eig = SymmetricEigen::new(tm);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]));
            let mut values = Vec::with_capacity(k);
            let mut vectors = Vec::with_capacity(k);
            let mut residuals = Vec::with_capacity(k);
            for &i in order.iter().take(k) {
                let theta = eig.eigenvalues[i];
                let y = eig.eigenvectors.column(i);
                let mut psi = vec![0.0; n];
                for (j, qj) in q.iter().enumerate() {
                    let c = y[j];
                    for (p, x) in psi.iter_mut().zip(qj) {
                        *p += c * x;
                    }
                }
                let nrm = dot(&psi, &psi).sqrt();
                for p in psi.iter_mut() {
                    *p /= nrm;
                }
                let lambda = 1.0 / theta;
                residuals.push(residual(&s, lambda, &psi));
                values.push(lambda);
                vectors.push(psi);
            }
            last_residuals = residuals.clone();
            if residuals.iter().all(|r| *r <= opts.tol) {
                let mut idx: Vec<usize> = (0..k).collect();
                idx.sort_by(|&a, &c| values[a].total_cmp(&values[c]));
                return Ok(RawEigen {
                    values: idx.iter().map(|&i| values[i]).collect(),
                    vectors: idx.iter().map(|&i| vectors[i].clone()).collect(),
                    residuals: idx.iter().map(|&i| residuals[i]).collect(),
                    method: "block_krylov_shift_invert",
                });
            }
        }
        if full {
            let worst = last_residuals.iter().copied().fold(0.0, f64::max);
            return Err(Error::NoConvergence {
                iterations,
                worst_residual: worst,
                residuals: last_residuals,
            });
        }
        let start = aq.len().saturating_sub(b);
        block = aq[start..].to_vec();
    }
}
