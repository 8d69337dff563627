//! The contraction of SU(2) onto the Heisenberg group.
//!
//! `Φ_ε(h(r, θ, z)) = g(√ε r, θ, εz)` on the cylindrical charts and
//! `U_ε(a, b, c) = √ε aX + √ε bY + εcZ` on the Lie algebras, with the
//! Milnor relations `[X, Y] = Z`, `[Y, Z] = X`, `[Z, X] = Y`.

use nalgebra::{Complex, Matrix2};
use serde::{Deserialize, Serialize};

use crate::discrete::{assemble_heisenberg_cylindrical, assemble_su2_rescaled, su2_coefficients};
use crate::error::{invalid, Result};
use crate::space::{koranyi, Domain, GeneratorScale, Point};
use crate::spectral::{eigensolve, TOL_GAP};
use crate::stochastic::{survival_profile, McConfig, Process, Region, Su2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionMaps {
    pub epsilon: f64,
}

impl ContractionMaps {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return invalid(format!("ε must lie in (0, 1], got {epsilon}"));
        }
        Ok(ContractionMaps { epsilon })
    }

    /// `(r, θ, z) ↦ (√ε r, θ, εz)` in Cartesian form.
    pub fn phi(&self, p: &Point) -> Point {
        let s = self.epsilon.sqrt();
        [s * p[0], s * p[1], self.epsilon * p[2]]
    }

    pub fn phi_group(&self, p: &Point) -> Su2 {
        Su2::from_chart(&self.phi(p))
    }

    /// Coefficients of `U_ε(a, b, c)` in the basis `X, Y, Z`.
    pub fn u(&self, v: &Point) -> Point {
        self.phi(v)
    }

    pub fn u_inverse(&self, v: &Point) -> Point {
        let s = self.epsilon.sqrt();
        [v[0] / s, v[1] / s, v[2] / self.epsilon]
    }

    /// Checks on a sample grid that `Φ_ε` is injective and lands in the
    /// chart's validity region `r < π`; returns the smallest separation of
    /// distinct images.
    pub fn check_injective(&self, extent: f64, per_axis: usize) -> Result<f64> {
        let mut pts = Vec::new();
        let m = per_axis.max(2);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let f = |a: usize| -extent + 2.0 * extent * a as f64 / (m - 1) as f64;
                    pts.push([f(i), f(j), f(k)]);
                }
            }
        }
        let imgs: Vec<Point> = pts.iter().map(|p| self.phi(p)).collect();
        for q in &imgs {
            if (q[0] * q[0] + q[1] * q[1]).sqrt() >= std::f64::consts::PI || q[2].abs() >= 2.0 * std::f64::consts::PI {
                return invalid(format!("Φ_ε image {q:?} leaves the chart"));
            }
        }
        let mut sep = f64::INFINITY;
        for a in 0..imgs.len() {
            for b in a + 1..imgs.len() {
                let d = (0..3).map(|k| (imgs[a][k] - imgs[b][k]).powi(2)).sum::<f64>().sqrt();
                sep = sep.min(d);
            }
        }
        if !(sep > 0.0) {
            return invalid("Φ_ε identifies two grid points");
        }
        Ok(sep)
    }
}

/// The Milnor bracket in coordinates `(X, Y, Z)`.
pub fn milnor_bracket(v: &Point, w: &Point) -> Point {
    [
        v[1] * w[2] - v[2] * w[1],
        v[2] * w[0] - v[0] * w[2],
        v[0] * w[1] - v[1] * w[0],
    ]
}

/// `‖U_ε⁻¹[U_ε v, U_ε w] − (0, 0, a₁b₂ − b₁a₂)‖`.
///
/// The first two slots are `ε(b₁c₂ − c₁b₂)` and `ε(c₁a₂ − a₁c₂)`, so the
/// defect is linear in `ε`.
pub fn bracket_defect(epsilon: f64, v: &Point, w: &Point) -> Result<f64> {
    let m = ContractionMaps::new(epsilon)?;
    let b = m.u_inverse(&milnor_bracket(&m.u(v), &m.u(w)));
    let limit = [0.0, 0.0, v[0] * w[1] - v[1] * w[0]];
    Ok((0..3).map(|k| (b[k] - limit[k]).powi(2)).sum::<f64>().sqrt())
}

/// `X = −(i/2)σ₁`, `Y = −(i/2)σ₂`, `Z = −(i/2)σ₃`.
pub fn milnor_matrices() -> [Matrix2<Complex<f64>>; 3] {
    let z = Complex::new(0.0, 0.0);
    let h = Complex::new(0.0, -0.5);
    let one = Complex::new(0.5, 0.0);
    [
        Matrix2::new(z, h, h, z),
        Matrix2::new(z, -one, one, z),
        Matrix2::new(h, z, z, -h),
    ]
}

/// Largest deviation of the Pauli realisation from the Milnor relations
/// (brackets, squares `−I/4`, products `XY = Z/2` and cyclic).
pub fn milnor_relation_error() -> f64 {
    let [x, y, z] = milnor_matrices();
    let quarter = Matrix2::identity() * Complex::new(-0.25, 0.0);
    let br = |a: &Matrix2<Complex<f64>>, b: &Matrix2<Complex<f64>>| a * b - b * a;
    let half = Complex::new(0.5, 0.0);
    let checks = [
        br(&x, &y) - z,
        br(&y, &z) - x,
        br(&z, &x) - y,
        x * x - quarter,
        y * y - quarter,
        z * z - quarter,
        x * y - z * half,
        y * z - x * half,
        z * x - y * half,
    ];
    checks.iter().flat_map(|m| m.iter()).map(|c| c.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub r: f64,
    pub rho: f64,
    /// `[1, 2r cot(2rρ), A, B, 2C]`.
    pub coefficients: [f64; 5],
    /// `[1, 1/ρ, 1/ρ², ρ², 2]`.
    pub limits: [f64; 5],
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceTable<R> {
    pub rows: Vec<R>,
    /// `(r, max deviation over the grid)`.
    pub per_r: Vec<(f64, f64)>,
    /// Least-squares slope of `log deviation` against `log r`.
    pub rate: f64,
}

fn check_grid(r_list: &[f64], rho_grid: &[f64]) -> Result<()> {
    if r_list.is_empty() || rho_grid.is_empty() {
        return invalid("empty r list or ρ grid");
    }
    for &r in r_list {
        if !(r > 0.0) {
            return invalid(format!("r must be positive, got {r}"));
        }
        for &rho in rho_grid {
            if !(rho > 0.0) {
                return invalid(format!("ρ grid must be positive, got {rho}"));
            }
            if r * rho >= std::f64::consts::FRAC_PI_2 {
                return invalid(format!("rρ = {} reaches π/2", r * rho));
            }
        }
    }
    Ok(())
}

pub fn loglog_slope(xy: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = xy.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn heisenberg_limit_coefficients(rho: f64) -> [f64; 5] {
    [1.0, 1.0 / rho, 1.0 / (rho * rho), rho * rho, 2.0]
}

pub fn coefficient_convergence(r_list: &[f64], rho_grid: &[f64]) -> Result<ConvergenceTable<CoefficientRow>> {
    check_grid(r_list, rho_grid)?;
    let mut rows = Vec::new();
    let mut per_r = Vec::new();
    for &r in r_list {
        let mut worst = 0.0f64;
        for &rho in rho_grid {
            let c = su2_coefficients(r, rho);
            let l = heisenberg_limit_coefficients(rho);
            let dev = (0..5).map(|k| (c[k] - l[k]).abs()).fold(0.0, f64::max);
            worst = worst.max(dev);
            rows.push(CoefficientRow {
                r,
                rho,
                coefficients: c,
                limits: l,
                max_deviation: dev,
            });
        }
        per_r.push((r, worst));
    }
    Ok(ConvergenceTable {
        rate: loglog_slope(&per_r),
        rows,
        per_r,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HaarRow {
    pub r: f64,
    pub rho: f64,
    /// `sin(2rρ)/(2rρ)`.
    pub ratio: f64,
    pub deviation: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub fn haar_density_ratio(r_list: &[f64], rho_grid: &[f64]) -> Result<ConvergenceTable<HaarRow>> {
    if rho_grid.iter().any(|rho| *rho < 0.0) {
        return invalid("ρ grid must be nonnegative");
    }
    let positive: Vec<f64> = rho_grid.iter().copied().filter(|r| *r > 0.0).collect();
    if !positive.is_empty() {
        check_grid(r_list, &positive)?;
    }
    let mut rows = Vec::new();
    let mut per_r = Vec::new();
    for &r in r_list {
        let mut worst = 0.0f64;
        for &rho in rho_grid {
            let ratio = sinc(2.0 * r * rho);
            worst = worst.max((ratio - 1.0).abs());
            rows.push(HaarRow {
                r,
                rho,
                ratio,
                deviation: (ratio - 1.0).abs(),
            });
        }
        per_r.push((r, worst));
    }
    Ok(ConvergenceTable {
        rate: loglog_slope(&per_r),
        rows,
        per_r,
    })
}

/// How SU(2) gauge balls are defined for the sandwich check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SandwichModel {
    /// Korányi gauge of the cylindrical chart coordinates; the pullback is
    /// the Heisenberg unit ball exactly.
    ChartGauge,
    /// Korányi gauge of exponential coordinates `log g = aX + bY + cZ`,
    /// compared through the cylindrical chart.
    ExponentialGauge,
}

/// `log g` in the basis `X, Y, Z`.
pub fn su2_log(g: &Su2) -> Point {
    let [a, b, c, d] = g.0;
    let v = (b * b + c * c + d * d).sqrt();
    if v == 0.0 {
        return [0.0; 3];
    }
    let n = v.atan2(a);
    let s = 2.0 * n / v;
    [s * b, s * c, s * d]
}

fn su2_gauge(model: SandwichModel, g: &Su2) -> f64 {
    match model {
        SandwichModel::ChartGauge => g.to_chart().map_or(f64::INFINITY, |p| koranyi(&p)),
        SandwichModel::ExponentialGauge => koranyi(&su2_log(g)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichReport {
    pub r: f64,
    pub model: SandwichModel,
    /// Heisenberg gauge range over the sampled boundary of `δ_{1/r}Φ⁻¹(B_r)`.
    pub min_gauge: f64,
    pub max_gauge: f64,
    pub inner_margin: f64,
    pub outer_margin: f64,
    pub pass: bool,
    /// Boundary point attaining the largest margin.
    pub witness: Point,
}

/// Samples the boundary of `δ_{1/r}(Φ⁻¹(B_r^{SU(2)}))` along Heisenberg
/// rays and checks `B_{1−ε} ⊂ · ⊂ B_{1+ε}`.
pub fn ball_sandwich_check(r: f64, eps_tol: f64, model: SandwichModel, samples: usize) -> Result<SandwichReport> {
    if !(r > 0.0 && r <= 1.0) {
        return invalid(format!("r must lie in (0, 1], got {r}"));
    }
    let m = samples.max(4);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut witness = [0.0; 3];
    let mut worst = -1.0;
    for i in 0..m {
        // unit Korányi sphere: ρ² = cos φ, 4z = sin φ
        let phi = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
        for j in 0..m {
            let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let rho = phi.cos().max(0.0).sqrt();
            let q = [rho * th.cos(), rho * th.sin(), 0.25 * phi.sin()];
            let gauge_at = |s: f64| {
                let p = [r * s * q[0], r * s * q[1], r * r * s * s * q[2]];
                su2_gauge(model, &Su2::from_chart(&p))
            };
            let (mut a, mut b) = (0.0, 4.0);
            if gauge_at(b) < r {
                return invalid("gauge ball pullback is unbounded along a ray");
            }
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if gauge_at(mid) < r {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let s = 0.5 * (a + b);
            lo = lo.min(s);
            hi = hi.max(s);
            let margin = (s - 1.0).abs();
            if margin > worst {
                worst = margin;
                witness = [s * q[0], s * q[1], s * s * q[2]];
            }
        }
    }
    let inner_margin = (1.0 - lo).max(0.0);
    let outer_margin = (hi - 1.0).max(0.0);
    Ok(SandwichReport {
        r,
        model,
        min_gauge: lo,
        max_gauge: hi,
        inner_margin,
        outer_margin,
        pass: inner_margin <= eps_tol && outer_margin <= eps_tol,
        witness,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenContractionRow {
    /// `None` for the Heisenberg limit row.
    pub r: Option<f64>,
    pub n: usize,
    pub eigenvalue: f64,
    pub gap_to_limit: f64,
    pub rate_estimate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenContractionTable {
    pub rows: Vec<EigenContractionRow>,
    pub limit: Vec<f64>,
    /// Sizes of eigenvalue clusters (relative tolerance `TOL_GAP`) per row set.
    pub limit_multiplicities: Vec<usize>,
    pub multiplicities: Vec<(f64, Vec<usize>)>,
    pub nodes: usize,
}

fn clusters(values: &[f64], tol: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut prev: Option<f64> = None;
    for &v in values {
        match prev {
            Some(p) if (v - p).abs() <= tol * p.abs() => *out.last_mut().unwrap() += 1,
            _ => out.push(1),
        }
        prev = Some(v);
    }
    out
}

/// Eigenvalues of `Lʳ = r² L^{SU(2)}` on `D` for each `r`, against the
/// Heisenberg limit on the same lattice.
pub fn eigenvalue_contraction_experiment(r_list: &[f64], domain: &Domain, h: f64, k: usize) -> Result<EigenContractionTable> {
    if r_list.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("r list must be strictly decreasing");
    }
    let limit_mesh = assemble_heisenberg_cylindrical(domain, h)?;
    let limit = eigensolve(&limit_mesh, k)?.eigenvalues;
    let mut per_r = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let mesh = assemble_su2_rescaled(r, domain, h)?;
        per_r.push(eigensolve(&mesh, k)?.eigenvalues);
    }
    let mut rows = Vec::new();
    for (i, (&r, ev)) in r_list.iter().zip(&per_r).enumerate() {
        for n in 0..k {
            let gap = (ev[n] - limit[n]).abs();
            let rate = (i > 0).then(|| {
                let prev = (per_r[i - 1][n] - limit[n]).abs();
                (prev / gap).ln() / (r_list[i - 1] / r).ln()
            });
            rows.push(EigenContractionRow {
                r: Some(r),
                n: n + 1,
                eigenvalue: ev[n],
                gap_to_limit: gap,
                rate_estimate: rate,
            });
        }
    }
    for (n, l) in limit.iter().enumerate() {
        rows.push(EigenContractionRow {
            r: None,
            n: n + 1,
            eigenvalue: *l,
            gap_to_limit: 0.0,
            rate_estimate: None,
        });
    }
    // looser than TOL_GAP: discretisation splits θ-harmonic pairs slightly
    let tol = 1e3 * TOL_GAP;
    Ok(EigenContractionTable {
        limit_multiplicities: clusters(&limit, tol),
        multiplicities: r_list.iter().zip(&per_r).map(|(r, ev)| (*r, clusters(ev, tol))).collect(),
        limit,
        rows,
        nodes: limit_mesh.n(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmallDeviationConfig {
    pub eps: Vec<f64>,
    /// Horizons are `T·ε²` for the two values of `T`.
    pub horizons: [f64; 2],
    pub paths: usize,
    /// Time step is `ε² / steps_per_unit`.
    pub steps_per_unit: f64,
    pub seed: u64,
    pub scale: GeneratorScale,
    /// Reference value `λ₁^H` of the Korányi unit ball.
    pub lambda_h: f64,
    pub control: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmallDeviationExpRow {
    pub process: String,
    pub eps: f64,
    pub p_short: f64,
    pub p_long: f64,
    /// `log(P̂(T₁ε²)/P̂(T₂ε²)) / (T₂ − T₁)`.
    pub lambda_hat: f64,
    pub lambda_ci95: f64,
    /// `−log P̂(T₂ε²) / T₂`, which still carries the `log c₁φ₁` prefactor.
    pub single_horizon: f64,
    pub chart_escapes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmallDeviationExpTable {
    pub lambda_h: f64,
    pub rows: Vec<SmallDeviationExpRow>,
    /// Every pair of ε rows of a process agrees within the joint CI.
    pub flat: bool,
    pub max_rel_gap: f64,
}

/// Small-ball decay rates on SU(2) (and optionally the Heisenberg group),
/// with horizons proportional to `ε²`.
pub fn su2_small_deviation_experiment(cfg: &SmallDeviationConfig) -> Result<SmallDeviationExpTable> {
    let [t1, t2] = cfg.horizons;
    if !(t1 > 0.0 && t2 > t1) {
        return invalid("need 0 < T₁ < T₂");
    }
    let mut procs = vec![Process::Su2Sde { scale: cfg.scale }];
    if cfg.control {
        procs.push(Process::HeisenbergBm { scale: cfg.scale });
    }
    let mut rows = Vec::new();
    let mut flat = true;
    let mut max_rel_gap = 0.0f64;
    for (pi, process) in procs.iter().enumerate() {
        let mut mine: Vec<SmallDeviationExpRow> = Vec::new();
        for (i, &eps) in cfg.eps.iter().enumerate() {
            let e2 = eps * eps;
            let mc = McConfig {
                paths: cfg.paths,
                h_t: e2 / cfg.steps_per_unit,
                seed: cfg.seed,
                bridge_correction: false,
                ..McConfig::default()
            };
            let offset = ((pi as u64) << 40) | ((i as u64) << 32);
            let b = survival_profile(*process, [0.0; 3], Region::GaugeBall { radius: eps }, &[t1 * e2, t2 * e2], &mc, offset)?;
            let (p1, p2) = (b[0].estimate, b[1].estimate);
            let n = cfg.paths as f64;
            let lambda_hat = (p1 / p2).ln() / (t2 - t1);
            let var = (1.0 / (n * p2) - 1.0 / (n * p1)).max(0.0) / (t2 - t1).powi(2);
            mine.push(SmallDeviationExpRow {
                process: process.name().to_string(),
                eps,
                p_short: p1,
                p_long: p2,
                lambda_hat,
                lambda_ci95: 1.96 * var.sqrt(),
                single_horizon: -p2.ln() / t2,
                chart_escapes: b[1].chart_escapes,
            });
        }
        for a in 0..mine.len() {
            max_rel_gap = max_rel_gap.max((mine[a].lambda_hat / cfg.lambda_h - 1.0).abs());
            for b in a + 1..mine.len() {
                let joint = (mine[a].lambda_ci95.powi(2) + mine[b].lambda_ci95.powi(2)).sqrt();
                if (mine[a].lambda_hat - mine[b].lambda_hat).abs() > joint || !mine[a].lambda_hat.is_finite() {
                    flat = false;
                }
            }
        }
        rows.extend(mine);
    }
    Ok(SmallDeviationExpTable {
        lambda_h: cfg.lambda_h,
        rows,
        flat,
        max_rel_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets() {
        assert!(bracket_defect(0.3, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap() < 1e-15);
        let d = bracket_defect(0.01, &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        assert!((d - 0.01).abs() < 1e-15);
        let v = [0.3, -1.2, 0.7];
        let w = [1.1, 0.4, -0.5];
        let a = bracket_defect(0.1, &v, &w).unwrap() / 0.1;
        let b = bracket_defect(0.001, &v, &w).unwrap() / 0.001;
        assert!((a - b).abs() < 1e-10 * a);
        assert!(milnor_relation_error() < 1e-14);
    }

    #[test]
    fn maps() {
        let id = ContractionMaps::new(1.0).unwrap();
        assert_eq!(id.phi(&[0.3, 0.2, -0.1]), [0.3, 0.2, -0.1]);
        assert!(ContractionMaps::new(0.25).unwrap().check_injective(2.0, 6).unwrap() > 0.0);
        assert!(ContractionMaps::new(0.0).is_err());
    }

    #[test]
    fn coefficient_and_haar_rates() {
        let grid: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
        let t = coefficient_convergence(&[0.1, 0.05, 0.025], &grid).unwrap();
        assert!((t.rate - 2.0).abs() < 0.3, "{}", t.rate);
        let h = haar_density_ratio(&[0.1, 0.05, 0.025], &grid).unwrap();
        assert!((h.rate - 2.0).abs() < 0.3);
        let one = haar_density_ratio(&[0.01], &[0.0, 1.0]).unwrap();
        assert_eq!(one.rows[0].ratio, 1.0);
        assert!((one.rows[1].ratio - 0.999_933_334).abs() < 1e-8);
        assert!(coefficient_convergence(&[1.0], &[2.0]).is_err());
    }

    #[test]
    fn sandwich() {
        let exact = ball_sandwich_check(1.0, 0.0, SandwichModel::ChartGauge, 12).unwrap();
        assert!(exact.inner_margin < 1e-12 && exact.outer_margin < 1e-12);
        let m: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|r| {
                let s = ball_sandwich_check(*r, 0.05, SandwichModel::ExponentialGauge, 16).unwrap();
                s.inner_margin.max(s.outer_margin)
            })
            .collect();
        assert!(m[0] > m[1] && m[1] > m[2], "{m:?}");
        assert!(m[1] <= 0.05);
    }

    #[test]
    fn log_inverts_exp() {
        let g = Su2::exp(0.4, -0.9, 1.3);
        let l = su2_log(&g);
        for (a, b) in l.iter().zip([0.4, -0.9, 1.3]) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
