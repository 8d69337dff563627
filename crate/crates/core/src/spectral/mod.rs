//! Low Dirichlet spectrum of an [`OperatorMesh`] and the objects built from
//! it: heat kernel expansions, survival probabilities, heat content, and
//! eigenfunction norm audits.
//!
//! Eigenfunctions are orthonormal in `⟨u, v⟩_w = Σ wᵢ uᵢ vᵢ` and carry the
//! sign convention `c_n = Σ wᵢ φ_n(i) ≥ 0`, with ties broken by making the
//! first nonzero entry positive.

mod io;
mod solver;

pub use io::{read_eigenfunctions, write_eigenfunctions, EIGENFUNCTION_MAGIC};
pub use solver::EigenOptions;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::discrete::OperatorMesh;
use crate::error::{invalid, Result};
use crate::kernels::KernelBound;

/// Relative tolerance for treating two eigenvalues as one.
pub const TOL_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    /// `eigenfunctions[n][i]` is `φ_{n+1}` at node `i`.
    #[serde(skip)]
    pub eigenfunctions: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    /// Node masses of the mesh the data came from.
    #[serde(skip)]
    pub weights: Vec<f64>,
    /// `‖Mφ_n − λ_n φ_n‖_w / λ_n`.
    pub residuals: Vec<f64>,
    pub method: String,
    pub mesh_label: String,
    pub nodes: usize,
    pub measure: f64,
}

impl SpectralData {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_complete(&self) -> bool {
        self.k() == self.nodes
    }

    /// Indices `n` (0-based) with `λ_n − λ₁ ≤ TOL_GAP·λ₁`.
    pub fn ground_cluster(&self) -> usize {
        let l1 = self.eigenvalues[0];
        self.eigenvalues.iter().take_while(|l| **l - l1 <= TOL_GAP * l1.abs()).count()
    }

    /// `Σ_{n≤k} φ_n(p)²`, which equals `1/w_p` for a complete basis.
    fn partial_square(&self, p: usize) -> f64 {
        self.eigenfunctions.iter().map(|f| f[p] * f[p]).sum()
    }

    fn tail_factor(&self, p: usize) -> f64 {
        (1.0 / self.weights[p] - self.partial_square(p)).max(0.0)
    }

    pub fn gram_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.k() {
            for b in a..self.k() {
                let g: f64 = self.eigenfunctions[a]
                    .iter()
                    .zip(&self.eigenfunctions[b])
                    .zip(&self.weights)
                    .map(|((x, y), w)| w * x * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// The `k` smallest eigenpairs of `M = W⁻¹K`.
pub fn eigensolve(mesh: &OperatorMesh, k: usize) -> Result<SpectralData> {
    eigensolve_with(mesh, k, &EigenOptions::default())
}

pub fn eigensolve_with(mesh: &OperatorMesh, k: usize, opts: &EigenOptions) -> Result<SpectralData> {
    let raw = solver::smallest(mesh, k, opts)?;
    let mut eigenfunctions = Vec::with_capacity(k);
    let mut coefficients = Vec::with_capacity(k);
    for psi in &raw.vectors {
        let mut phi: Vec<f64> = psi.iter().zip(&mesh.weights).map(|(p, w)| p / w.sqrt()).collect();
        let mut c: f64 = phi.iter().zip(&mesh.weights).map(|(f, w)| f * w).sum();
        let scale = phi.iter().map(|f| f.abs()).fold(0.0, f64::max);
        let flip = if c.abs() > 1e-12 * scale * mesh.measure() {
            c < 0.0
        } else {
            phi.iter().find(|f| f.abs() > 1e-12 * scale).is_some_and(|f| *f < 0.0)
        };
        if flip {
            phi.iter_mut().for_each(|f| *f = -*f);
            c = -c;
        }
        eigenfunctions.push(phi);
        coefficients.push(c);
    }
    Ok(SpectralData {
        eigenvalues: raw.values,
        eigenfunctions,
        coefficients,
        weights: mesh.weights.clone(),
        residuals: raw.residuals,
        method: raw.method.to_string(),
        mesh_label: mesh.label.clone(),
        nodes: mesh.n(),
        measure: mesh.measure(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundStateReport {
    pub simple: bool,
    pub gap: f64,
    pub positive_after_sign_fix: bool,
    pub min_abs_interior: f64,
}

pub fn ground_state_audit(sd: &SpectralData) -> Result<GroundStateReport> {
    if sd.k() < 2 {
        return invalid("ground state audit needs at least two eigenpairs");
    }
    let (l1, l2) = (sd.eigenvalues[0], sd.eigenvalues[1]);
    let phi = &sd.eigenfunctions[0];
    let sup = phi.iter().map(|f| f.abs()).fold(0.0, f64::max);
    Ok(GroundStateReport {
        simple: l2 - l1 > TOL_GAP * l1,
        gap: l2 - l1,
        positive_after_sign_fix: phi.iter().all(|f| *f > -1e-8 * sup),
        min_abs_interior: phi.iter().map(|f| f.abs()).fold(f64::INFINITY, f64::min),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the discarded modes `n > k`.
    pub tail_bound: f64,
    /// Set when the tail bound exceeds 10% of the partial sum.
    pub truncation_warning: bool,
}

impl SeriesValue {
    fn new(value: f64, tail_bound: f64) -> Self {
        SeriesValue {
            value,
            tail_bound,
            truncation_warning: tail_bound > 0.1 * value.abs(),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        invalid(format!("time must be positive, got {t}"))
    }
}

fn check_node(sd: &SpectralData, p: usize) -> Result<()> {
    if p < sd.nodes {
        Ok(())
    } else {
        invalid(format!("node {p} outside a {}-node mesh", sd.nodes))
    }
}

fn last_decay(sd: &SpectralData, t: f64) -> f64 {
    (-sd.eigenvalues[sd.k() - 1] * t).exp()
}

/// `p_t^U(p, q) ≈ Σ_{n≤k} e^{−λ_n t} φ_n(p) φ_n(q)`.
///
/// The tail is bounded by Cauchy–Schwarz and the discrete completeness
/// relation `Σ_n φ_n(p)² = 1/w_p`.
pub fn dirichlet_kernel_expansion(sd: &SpectralData, t: f64, p: usize, q: usize) -> Result<SeriesValue> {
    check_time(t)?;
    check_node(sd, p)?;
    check_node(sd, q)?;
    let value = sd
        .eigenvalues
        .iter()
        .zip(&sd.eigenfunctions)
        .map(|(l, f)| (-l * t).exp() * (f[p] * f[q]))
        .sum();
    let tail = last_decay(sd, t) * (sd.tail_factor(p) * sd.tail_factor(q)).sqrt();
    Ok(SeriesValue::new(value, tail))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalValue {
    pub probability: f64,
    pub raw: f64,
    pub clipped: bool,
    pub tail_bound: f64,
}

/// `P^p(τ_U > t) ≈ Σ_{n≤k} e^{−λ_n t} c_n φ_n(p)`, clipped to `[0, 1]`.
pub fn survival_series(sd: &SpectralData, t: f64, p: usize) -> Result<SurvivalValue> {
    check_time(t)?;
    check_node(sd, p)?;
    let raw: f64 = sd
        .eigenvalues
        .iter()
        .zip(&sd.eigenfunctions)
        .zip(&sd.coefficients)
        .map(|((l, f), c)| (-l * t).exp() * c * f[p])
        .sum();
    let c2: f64 = sd.coefficients.iter().map(|c| c * c).sum();
    let tail = last_decay(sd, t) * ((sd.measure - c2).max(0.0) * sd.tail_factor(p)).sqrt();
    let probability = raw.clamp(0.0, 1.0);
    Ok(SurvivalValue {
        probability,
        raw,
        clipped: probability != raw,
        tail_bound: tail,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatContent {
    /// `Q(t) = Σ_{n≤k} e^{−λ_n t} c_n²`.
    pub q: f64,
    /// `Σ_{n ≤ M₁} c_n²` over the ground-state cluster.
    pub asymptote: f64,
    pub multiplicity: usize,
    pub tail_bound: f64,
}

pub fn heat_content_series(sd: &SpectralData, t: f64) -> Result<HeatContent> {
    check_time(t)?;
    let q = sd
        .eigenvalues
        .iter()
        .zip(&sd.coefficients)
        .map(|(l, c)| (-l * t).exp() * c * c)
        .sum();
    let m1 = sd.ground_cluster();
    let c2: f64 = sd.coefficients.iter().map(|c| c * c).sum();
    Ok(HeatContent {
        q,
        asymptote: sd.coefficients[..m1].iter().map(|c| c * c).sum(),
        multiplicity: m1,
        tail_bound: last_decay(sd, t) * (sd.measure - c2).max(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpBoundRow {
    pub n: usize,
    pub lambda: f64,
    pub sup_norm: f64,
    pub l1_norm: f64,
    pub l2_norm: f64,
    /// `C(λ_n)` and the time attaining it.
    pub envelope_constant: f64,
    pub envelope_time: f64,
    /// `μ^{1/2} C(λ_n)`.
    pub sup_bound: f64,
    /// `μ^{5/2} C(λ_n)²`.
    pub l1_bound: f64,
    /// `μ C(λ_n)`.
    pub l2_bound: f64,
    pub sup_pass: bool,
    pub l1_pass: bool,
    pub l2_pass: bool,
}

impl LpBoundRow {
    pub fn pass(&self) -> bool {
        self.sup_pass && self.l1_pass && self.l2_pass
    }
}

/// Compares eigenfunction norms with the bounds generated by the on-diagonal
/// envelope of `bound`. Failures are reported, not raised.
pub fn lp_bound_audit(sd: &SpectralData, bound: &KernelBound) -> Result<Vec<LpBoundRow>> {
    let mu = sd.measure;
    let mut rows = Vec::with_capacity(sd.k());
    for (n, (lambda, phi)) in sd.eigenvalues.iter().zip(&sd.eigenfunctions).enumerate() {
        let (c, t_star) = bound.lambda_envelope_constant(*lambda)?;
        let sup_norm = phi.iter().map(|f| f.abs()).fold(0.0, f64::max);
        let l1_norm: f64 = phi.iter().zip(&sd.weights).map(|(f, w)| w * f.abs()).sum();
        let l2_norm = phi.iter().zip(&sd.weights).map(|(f, w)| w * f * f).sum::<f64>().sqrt();
        let sup_bound = mu.sqrt() * c;
        let l1_bound = mu.powf(2.5) * c * c;
        let l2_bound = mu * c;
        rows.push(LpBoundRow {
            n: n + 1,
            lambda: *lambda,
            sup_norm,
            l1_norm,
            l2_norm,
            envelope_constant: c,
            envelope_time: t_star,
            sup_bound,
            l1_bound,
            l2_bound,
            sup_pass: sup_norm <= sup_bound,
            l1_pass: l1_norm <= l1_bound,
            l2_pass: l2_norm <= l2_bound * (1.0 + 1e-12),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpLowerBoundRow {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub lp_norm: f64,
    /// `A_{p,2,λ_n}`, the matching upper bound.
    pub upper: f64,
    /// `1 / A_{q,2,λ_n}` with `1/p + 1/q = 1`.
    pub lower: f64,
    pub upper_pass: bool,
    pub lower_pass: bool,
}

/// Weighted `L^p` norm on the mesh.
pub fn weighted_lp_norm(f: &[f64], w: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return f.iter().map(|x| x.abs()).fold(0.0, f64::max);
    }
    f.iter().zip(w).map(|(x, wi)| wi * x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `c_{t,p} = (Σ_x w_x ‖p_t(x, ·)‖_p²)^{1/2}` from a complete spectral basis.
fn kernel_norm(sd: &SpectralData, t: f64, p: f64) -> f64 {
    let n = sd.nodes;
    let mut phi = DMatrix::zeros(n, n);
    for (j, f) in sd.eigenfunctions.iter().enumerate() {
        let d = (-sd.eigenvalues[j] * t).exp();
        for i in 0..n {
            phi[(i, j)] = f[i] * d.sqrt();
        }
    }
    let kernel = &phi * phi.transpose();
    let mut total = 0.0;
    for i in 0..n {
        let row: Vec<f64> = kernel.row(i).iter().copied().collect();
        total += sd.weights[i] * weighted_lp_norm(&row, &sd.weights, p).powi(2);
    }
    total.sqrt()
}

/// Audits `1/A_{q,2,λ_n} ≤ ‖φ_n‖_p ≤ A_{p,2,λ_n}` with
/// `A_{p,2,a} = inf_t e^{at} c_{t,p}` minimised over `t_grid`.
///
/// `c_{t,p}` is the exact discrete kernel norm, which needs the full
/// spectrum; the audit is meant for one-dimensional meshes.
pub fn lp_lower_bound_audit(
    sd: &SpectralData,
    modes: usize,
    exponents: &[f64],
    t_grid: &[f64],
) -> Result<Vec<LpLowerBoundRow>> {
    if !sd.is_complete() {
        return invalid("lower-bound audit needs the complete spectrum");
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
        return invalid("time grid must be non-empty and positive");
    }
    if exponents.iter().any(|p| !(*p > 1.0)) {
        return invalid("exponents must exceed 1");
    }
    let mut needed: Vec<f64> = Vec::new();
    for &p in exponents {
        let q = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
        for e in [p, q] {
            if !needed.contains(&e) {
                needed.push(e);
            }
        }
    }
    // norms[e][t]
    let norms: Vec<Vec<f64>> = needed.iter().map(|&e| t_grid.iter().map(|&t| kernel_norm(sd, t, e)).collect()).collect();
    let a_const = |e: f64, lambda: f64| -> f64 {
        let i = needed.iter().position(|x| *x == e).expect("exponent registered");
        t_grid.iter().zip(&norms[i]).map(|(t, c)| (lambda * t).exp() * c).fold(f64::INFINITY, f64::min)
    };
    let mut rows = Vec::new();
    for n in 0..modes.min(sd.k()) {
        let lambda = sd.eigenvalues[n];
        for &p in exponents {
            let q = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
            let lp_norm = weighted_lp_norm(&sd.eigenfunctions[n], &sd.weights, p);
            let upper = a_const(p, lambda);
            let lower = 1.0 / a_const(q, lambda);
            rows.push(LpLowerBoundRow {
                n: n + 1,
                p,
                q,
                lp_norm,
                upper,
                lower,
                upper_pass: lp_norm <= upper * (1.0 + 1e-10),
                lower_pass: lp_norm >= lower * (1.0 - 1e-10),
            });
        }
    }
    Ok(rows)
}

/// Dense `e^{−Mt}` through the symmetric form; meant for small meshes.
pub fn dense_semigroup(mesh: &OperatorMesh, t: f64) -> Result<DMatrix<f64>> {
    check_time(t)?;
    if mesh.n() > 2000 {
        return invalid(format!("dense semigroup of {} nodes", mesh.n()));
    }
    let s = mesh.symmetric_operator().to_dense();
    let s = (&s + s.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(s);
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (-l * t).exp()));
    let sym = v * d * v.transpose();
    let n = mesh.n();
    // e^{−Mt} = W^{-1/2} e^{−St} W^{1/2}
    Ok(DMatrix::from_fn(n, n, |i, j| sym[(i, j)] * (mesh.weights[j] / mesh.weights[i]).sqrt()))
}
