//! Seeded Monte Carlo for killed diffusions.
//!
//! Paths are grouped into fixed-size chunks; chunk `c` draws from the
//! ChaCha8 stream `stream_offset + c` of the experiment seed. Chunks run in
//! parallel and are reduced in index order, so every result is a function of
//! the seed and the parameters alone, whatever the number of workers.

mod process;

pub use process::{Process, Su2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::gaussian_kernel_d2;
use crate::space::{koranyi, DilationKind, Domain, Point};
use process::{step, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub paths: usize,
    pub h_t: f64,
    pub seed: u64,
    /// Brownian-bridge crossing correction for Euclidean paths.
    pub bridge_correction: bool,
    /// Lévy-area substeps per Heisenberg step.
    pub substeps: usize,
    pub chunk: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            paths: 100_000,
            h_t: 1e-4,
            seed: 0,
            bridge_correction: true,
            substeps: 4,
            chunk: 4096,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return invalid("at least one path is needed");
        }
        if !(self.h_t > 0.0 && self.h_t.is_finite()) {
            return invalid(format!("time step must be positive, got {}", self.h_t));
        }
        if self.chunk == 0 {
            return invalid("chunk size must be positive");
        }
        Ok(())
    }
}

/// Where a path is killed.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    Domain(&'a Domain),
    /// Gauge ball of the given radius around the start.
    GaugeBall { radius: f64 },
}

impl Region<'_> {
    fn label(&self) -> String {
        match self {
            Region::Domain(d) => d.label.clone(),
            Region::GaugeBall { radius } => format!("gauge_ball(r={radius})"),
        }
    }
}

/// Everything needed to reproduce a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McParams {
    pub process: Process,
    pub start: Point,
    pub t: f64,
    pub h_t: f64,
    pub bridge_correction: bool,
    pub substeps: usize,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitBatch {
    pub samples: usize,
    pub survived: usize,
    pub estimate: f64,
    pub ci95: f64,
    /// SU(2) paths that left the chart's validity region (counted as exited).
    pub chart_escapes: usize,
    pub seed: u64,
    pub stream_offset: u64,
    pub streams: u64,
    pub chunk: usize,
    pub params: McParams,
}

impl ExitBatch {
    fn new(survived: usize, escapes: usize, cfg: &McConfig, offset: u64, params: McParams) -> Self {
        let n = cfg.paths;
        let p = survived as f64 / n as f64;
        ExitBatch {
            samples: n,
            survived,
            estimate: p,
            ci95: 1.96 * (p * (1.0 - p) / n as f64).sqrt(),
            chart_escapes: escapes,
            seed: cfg.seed,
            stream_offset: offset,
            streams: cfg.paths.div_ceil(cfg.chunk) as u64,
            chunk: cfg.chunk,
            params,
        }
    }

    /// `(seed, stream)` for every chunk, in reduction order.
    pub fn stream_seeds(&self) -> Vec<(u64, u64)> {
        (0..self.streams).map(|s| (self.seed, self.stream_offset + s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub process: Process,
    pub start: Point,
    pub step: f64,
    pub horizon: f64,
    /// Chart coordinates at every recorded time `k·step`.
    pub states: Vec<Point>,
    /// Group elements for SU(2) paths.
    pub group_states: Vec<Su2>,
    pub exit_time: Option<f64>,
    pub sup_gauge: f64,
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    exit_time: f64,
    exit_point: Point,
    escaped: bool,
    sup_gauge: f64,
}

struct Ctx<'a> {
    process: Process,
    start: Point,
    start_inv: Su2,
    region: Option<Region<'a>>,
    n_steps: usize,
    dt: f64,
    bridge: bool,
    substeps: usize,
}

impl<'a> Ctx<'a> {
    fn new(process: Process, start: Point, region: Option<Region<'a>>, t_max: f64, h: f64, cfg: &McConfig) -> Self {
        let n_steps = if t_max > 0.0 { (t_max / h - 1e-9).ceil().max(1.0) as usize } else { 0 };
        let dt = if n_steps > 0 { t_max / n_steps as f64 } else { h };
        Ctx {
            process,
            start,
            start_inv: Su2::from_chart(&start).inverse(),
            region,
            n_steps,
            dt,
            bridge: cfg.bridge_correction && matches!(process, Process::EuclideanBm { .. }),
            substeps: cfg.substeps,
        }
    }

    fn gauge_from_start(&self, state: &State, chart: &Point) -> f64 {
        match state {
            State::Group(g) => self.start_inv.mul(g).to_chart().map_or(f64::INFINITY, |p| koranyi(&p)),
            State::Flat(_) => self.process.gauge_distance(&self.start, chart),
        }
    }

    fn inside(&self, chart: &Point, gauge: f64) -> bool {
        match self.region {
            None => true,
            Some(Region::Domain(d)) => d.contains(chart),
            Some(Region::GaugeBall { radius }) => gauge < radius,
        }
    }

    /// Local half-space model of the boundary at `p`, if the region has one.
    fn faces(&self, p: &Point, out: &mut Vec<(f64, Point)>) -> bool {
        out.clear();
        match self.region {
            None => false,
            Some(Region::Domain(d)) => d.shape.halfspace_distances(p, out),
            Some(Region::GaugeBall { radius }) => {
                let d = [p[0] - self.start[0], p[1] - self.start[1], p[2] - self.start[2]];
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                let n = if r > 0.0 { [d[0] / r, d[1] / r, d[2] / r] } else { [1.0, 0.0, 0.0] };
                out.push((radius - r, n));
                true
            }
        }
    }

    fn run<R: Rng + ?Sized>(&self, rng: &mut R, faces: &mut Vec<(f64, Point)>, mut trace: Option<&mut Vec<State>>) -> Outcome {
        let mut state = State::start(&self.process, &self.start);
        let mut sup: f64 = 0.0;
        let sigma2 = self.process.sigma().powi(2);
        if let Some(t) = trace.as_deref_mut() {
            t.push(state);
        }
        for k in 0..self.n_steps {
            let t0 = k as f64 * self.dt;
            let before = state;
            step(&self.process, &mut state, self.dt, self.substeps, rng);
            if let Some(t) = trace.as_deref_mut() {
                t.push(state);
            }
            let Some(chart) = state.chart() else {
                return Outcome {
                    exit_time: t0 + self.dt,
                    exit_point: before.chart().unwrap_or(self.start),
                    escaped: true,
                    sup_gauge: sup,
                };
            };
            let g = self.gauge_from_start(&state, &chart);
            sup = sup.max(g);
            let (State::Flat(x0), State::Flat(x1)) = (before, state) else {
                if !self.inside(&chart, g) {
                    return Outcome {
                        exit_time: t0 + self.dt,
                        exit_point: chart,
                        escaped: false,
                        sup_gauge: sup,
                    };
                }
                continue;
            };
            if !self.inside(&chart, g) {
                // crossing point of the first face the step cut through
                let mut frac = 1.0f64;
                if self.faces(&x0, faces) {
                    for (d0, n) in faces.iter() {
                        let d1 = d0 - dot3(n, &sub3(&x1, &x0));
                        if d1 <= 0.0 && *d0 >= 0.0 {
                            frac = frac.min(d0 / (d0 - d1));
                        }
                    }
                }
                let delta = sub3(&x1, &x0);
                return Outcome {
                    exit_time: t0 + frac * self.dt,
                    exit_point: [x0[0] + frac * delta[0], x0[1] + frac * delta[1], x0[2] + frac * delta[2]],
                    escaped: false,
                    sup_gauge: sup,
                };
            }
            if self.bridge && self.faces(&x0, faces) {
                let mut stay = 1.0;
                let mut worst = (0.0, None);
                for (d0, n) in faces.iter() {
                    let d1 = d0 - dot3(n, &sub3(&x1, &x0));
                    if *d0 <= 0.0 || d1 <= 0.0 {
                        continue;
                    }
                    let e = 2.0 * d0 * d1 / (sigma2 * self.dt);
                    if e < 40.0 {
                        let p = (-e).exp();
                        stay *= 1.0 - p;
                        if p > worst.0 {
                            worst = (p, Some((*d0, *n)));
                        }
                    }
                }
                if stay < 1.0 && rng.random::<f64>() >= stay {
                    let (d0, n) = worst.1.expect("a face produced the kill probability");
                    return Outcome {
                        exit_time: t0 + 0.5 * self.dt,
                        exit_point: [x0[0] + d0 * n[0], x0[1] + d0 * n[1], x0[2] + d0 * n[2]],
                        escaped: false,
                        sup_gauge: sup,
                    };
                }
            }
        }
        Outcome {
            exit_time: f64::INFINITY,
            exit_point: state.chart().unwrap_or(self.start),
            escaped: false,
            sup_gauge: sup,
        }
    }
}

#[inline]
fn sub3(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot3(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(rng, paths_in_chunk)` over every chunk in parallel and returns
/// the results in chunk order.
fn run_chunks<T, F>(cfg: &McConfig, offset: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = cfg.paths.div_ceil(cfg.chunk);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(cfg.seed, offset + c as u64);
            let count = cfg.chunk.min(cfg.paths - c * cfg.chunk);
            f(&mut rng, count)
        })
        .collect()
}

fn check_start(process: &Process, start: &Point, region: &Region) -> Result<()> {
    let inside = match region {
        Region::Domain(d) => d.contains(start),
        Region::GaugeBall { radius } => *radius > 0.0,
    };
    if !inside {
        return Err(Error::InvalidArgument(format!("start {start:?} is not inside {}", region.label())));
    }
    if let (Process::EuclideanBm { dim, .. }, Region::Domain(d)) = (process, region) {
        if d.dim() != *dim {
            return invalid(format!("{dim}-dimensional process in a {}-dimensional domain", d.dim()));
        }
    }
    Ok(())
}

/// One path with every state recorded; `domain`, when given, stops it at
/// the first exit.
pub fn simulate(
    process: Process,
    start: Point,
    t_max: f64,
    h_t: f64,
    seed: u64,
    stream: u64,
    domain: Option<&Domain>,
) -> Result<PathSample> {
    if !(h_t > 0.0) || !(t_max >= h_t) {
        return invalid(format!("need 0 < h_t ≤ t_max, got h_t={h_t}, t_max={t_max}"));
    }
    let cfg = McConfig {
        h_t,
        bridge_correction: false,
        ..McConfig::default()
    };
    let ctx = Ctx::new(process, start, domain.map(Region::Domain), t_max, h_t, &cfg);
    let mut rng = stream_rng(seed, stream);
    let mut trace = Vec::with_capacity(ctx.n_steps + 1);
    let out = ctx.run(&mut rng, &mut Vec::new(), Some(&mut trace));
    let states = trace.iter().filter_map(State::chart).collect();
    let group_states = trace
        .iter()
        .filter_map(|s| match s {
            State::Group(g) => Some(*g),
            State::Flat(_) => None,
        })
        .collect();
    Ok(PathSample {
        process,
        start,
        step: ctx.dt,
        horizon: t_max,
        states,
        group_states,
        exit_time: out.exit_time.is_finite().then_some(out.exit_time),
        sup_gauge: out.sup_gauge,
    })
}

/// Survival fractions at several horizons from one set of paths run to the
/// largest horizon.
pub fn survival_profile(
    process: Process,
    start: Point,
    region: Region,
    horizons: &[f64],
    cfg: &McConfig,
    stream_offset: u64,
) -> Result<Vec<ExitBatch>> {
    cfg.validate()?;
    check_start(&process, &start, &region)?;
    if horizons.is_empty() || horizons.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return invalid("horizons must be finite and nonnegative");
    }
    let t_max = horizons.iter().copied().fold(0.0, f64::max);
    let ctx = Ctx::new(process, start, Some(region), t_max, cfg.h_t, cfg);
    let per_chunk = run_chunks(cfg, stream_offset, |rng, count| {
        let mut faces = Vec::new();
        let mut alive = vec![0usize; horizons.len()];
        let mut escapes = 0usize;
        for _ in 0..count {
            let o = ctx.run(rng, &mut faces, None);
            escapes += o.escaped as usize;
            for (a, t) in alive.iter_mut().zip(horizons) {
                // 1e-9 guards horizons that coincide with grid times
                if o.exit_time > *t + 1e-9 * ctx.dt {
                    *a += 1;
                }
            }
        }
        (alive, escapes)
    });
    let mut alive = vec![0usize; horizons.len()];
    let mut escapes = 0;
    for (a, e) in per_chunk {
        for (x, y) in alive.iter_mut().zip(a) {
            *x += y;
        }
        escapes += e;
    }
    Ok(horizons
        .iter()
        .zip(alive)
        .map(|(t, s)| {
            let params = McParams {
                process,
                start,
                t: *t,
                h_t: ctx.dt,
                bridge_correction: ctx.bridge,
                substeps: cfg.substeps,
                region: region.label(),
            };
            ExitBatch::new(s, escapes, cfg, stream_offset, params)
        })
        .collect())
}

/// `P^x(τ_U > t)` by the fraction of surviving paths.
pub fn survival_estimate(process: Process, start: Point, domain: &Domain, t: f64, cfg: &McConfig) -> Result<ExitBatch> {
    Ok(survival_profile(process, start, Region::Domain(domain), &[t], cfg, 0)?.remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynkinHunt {
    /// `p_t(x, y) − E^x[1_{τ<t} p_{t−τ}(X_τ, y)]`.
    pub value: f64,
    pub free_kernel: f64,
    pub correction: f64,
    pub std_error: f64,
    pub exited: usize,
    pub samples: usize,
}

/// Dirichlet heat kernel at `(start, y)` from the Dynkin–Hunt formula.
pub fn dynkin_hunt_estimate(
    process: Process,
    start: Point,
    domain: &Domain,
    t: f64,
    y: Point,
    cfg: &McConfig,
) -> Result<DynkinHunt> {
    let Process::EuclideanBm { dim, scale } = process else {
        return Err(Error::Unsupported(format!("no closed-form free kernel for {}", process.name())));
    };
    cfg.validate()?;
    check_start(&process, &start, &Region::Domain(domain))?;
    if !domain.contains(&y) {
        return invalid(format!("target {y:?} is not inside the domain"));
    }
    if !(t > 0.0) {
        return invalid("Dynkin–Hunt needs t > 0");
    }
    let ctx = Ctx::new(process, start, Some(Region::Domain(domain)), t, cfg.h_t, cfg);
    let parts = run_chunks(cfg, 0, |rng, count| {
        let mut faces = Vec::new();
        let (mut s, mut s2, mut exited) = (0.0, 0.0, 0usize);
        for _ in 0..count {
            let o = ctx.run(rng, &mut faces, None);
            if o.exit_time < t {
                let d2 = dot3(&sub3(&o.exit_point, &y), &sub3(&o.exit_point, &y));
                let g = gaussian_kernel_d2(t - o.exit_time, d2, dim, scale);
                s += g;
                s2 += g * g;
                exited += 1;
            }
        }
        (s, s2, exited)
    });
    let (mut s, mut s2, mut exited) = (0.0, 0.0, 0);
    for (a, b, c) in parts {
        s += a;
        s2 += b;
        exited += c;
    }
    let n = cfg.paths as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0);
    let free = gaussian_kernel_d2(t, dot3(&sub3(&start, &y), &sub3(&start, &y)), dim, scale);
    Ok(DynkinHunt {
        value: free - mean,
        free_kernel: free,
        correction: mean,
        std_error: (var / n).sqrt(),
        exited,
        samples: cfg.paths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallDeviationRow {
    pub eps: f64,
    pub estimate: f64,
    pub ci95: f64,
    pub survived: usize,
    /// `e^{λ₁ t/ε^β} P̂`.
    pub scaled: f64,
    pub scaled_ci95: f64,
    /// `−ε^β log P̂`.
    pub minus_log: f64,
    /// Set when no path survived.
    pub flagged: bool,
}

/// `P(sup_{s≤t} gauge(X_s) < ε)` for each `ε`, with the normalisations of
/// the small-deviation limit.
pub fn small_deviation_estimate(
    process: Process,
    start: Point,
    t: f64,
    eps_list: &[f64],
    lambda1: f64,
    beta: f64,
    cfg: &McConfig,
) -> Result<Vec<SmallDeviationRow>> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("ε list must be strictly decreasing");
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    for (i, &eps) in eps_list.iter().enumerate() {
        let b = survival_profile(process, start, Region::GaugeBall { radius: eps }, &[t], cfg, (i as u64) << 32)?.remove(0);
        let factor = (lambda1 * t / eps.powf(beta)).exp();
        rows.push(SmallDeviationRow {
            eps,
            estimate: b.estimate,
            ci95: b.ci95,
            survived: b.survived,
            scaled: factor * b.estimate,
            scaled_ci95: factor * b.ci95,
            minus_log: if b.survived > 0 { -eps.powf(beta) * b.estimate.ln() } else { f64::INFINITY },
            flagged: b.survived == 0,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatContentEstimate {
    pub q: f64,
    pub ci95: f64,
    pub per_node: Vec<f64>,
}

/// `Q_U(t) = Σ_i w_i P^{x_i}(τ_U > t)` over quadrature nodes.
pub fn heat_content_estimate(
    process: Process,
    domain: &Domain,
    nodes: &[Point],
    weights: &[f64],
    t: f64,
    cfg: &McConfig,
) -> Result<HeatContentEstimate> {
    if nodes.len() != weights.len() || nodes.is_empty() {
        return invalid("need one weight per quadrature node");
    }
    let streams_per_node = cfg.paths.div_ceil(cfg.chunk.max(1)) as u64;
    let mut q = 0.0;
    let mut var = 0.0;
    let mut per_node = Vec::with_capacity(nodes.len());
    for (i, (x, w)) in nodes.iter().zip(weights).enumerate() {
        let b = survival_profile(process, *x, Region::Domain(domain), &[t], cfg, i as u64 * streams_per_node)?.remove(0);
        q += w * b.estimate;
        var += w * w * b.estimate * (1.0 - b.estimate) / b.samples as f64;
        per_node.push(b.estimate);
    }
    Ok(HeatContentEstimate {
        q,
        ci95: 1.96 * var.sqrt(),
        per_node,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitScalingReport {
    pub r: f64,
    pub ell: f64,
    /// `P^{δ_r x}(τ_{δ_r U} > t)`.
    pub dilated: ExitBatch,
    /// `P^x(τ_U > t/ℓ)`.
    pub base: ExitBatch,
    pub difference: f64,
    pub joint_ci95: f64,
    pub agree: bool,
}

/// Both sides of `P^{x_g}(τ_{U_g} > t) = P^x(τ_U > t/ℓ_g)` with `ℓ = r²`,
/// from independent streams.
pub fn exit_scaling_check(
    process: Process,
    domain: &Domain,
    start: Point,
    r: f64,
    t: f64,
    cfg: &McConfig,
) -> Result<ExitScalingReport> {
    let dilation = match process {
        Process::EuclideanBm { .. } => DilationKind::Isotropic,
        Process::HeisenbergBm { .. } => DilationKind::Heisenberg,
        Process::Su2Sde { .. } => return Err(Error::Unsupported("SU(2) has no exact dilation".into())),
    };
    let ell = r * r;
    let big = domain.dilated(r, dilation)?;
    let start_g = dilation.apply(r, &start);
    let scaled_cfg = McConfig {
        h_t: cfg.h_t * ell,
        ..*cfg
    };
    let dilated = survival_profile(process, start_g, Region::Domain(&big), &[t], &scaled_cfg, 1 << 40)?.remove(0);
    let base = survival_profile(process, start, Region::Domain(domain), &[t / ell], cfg, 0)?.remove(0);
    let difference = dilated.estimate - base.estimate;
    let joint = (dilated.ci95.powi(2) + base.ci95.powi(2)).sqrt();
    Ok(ExitScalingReport {
        r,
        ell,
        agree: difference.abs() <= joint,
        difference,
        joint_ci95: joint,
        dilated,
        base,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanExit {
    pub mean: f64,
    pub std_error: f64,
    /// Paths still alive at the cap; they contribute the cap.
    pub censored: usize,
}

/// `E[τ ∧ t_cap]` for the given region.
pub fn mean_exit_time(process: Process, start: Point, region: Region, t_cap: f64, cfg: &McConfig) -> Result<MeanExit> {
    cfg.validate()?;
    check_start(&process, &start, &region)?;
    let ctx = Ctx::new(process, start, Some(region), t_cap, cfg.h_t, cfg);
    let parts = run_chunks(cfg, 0, |rng, count| {
        let mut faces = Vec::new();
        let (mut s, mut s2, mut c) = (0.0, 0.0, 0usize);
        for _ in 0..count {
            let o = ctx.run(rng, &mut faces, None);
            let tau = o.exit_time.min(t_cap);
            c += o.exit_time.is_infinite() as usize;
            s += tau;
            s2 += tau * tau;
        }
        (s, s2, c)
    });
    let (mut s, mut s2, mut c) = (0.0, 0.0, 0);
    for (a, b, d) in parts {
        s += a;
        s2 += b;
        c += d;
    }
    let n = cfg.paths as f64;
    let mean = s / n;
    Ok(MeanExit {
        mean,
        std_error: ((s2 / n - mean * mean).max(0.0) / n).sqrt(),
        censored: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_domain, GeneratorScale, Shape, SpaceModel};

    fn interval(a: f64, b: f64) -> Domain {
        make_domain(SpaceModel::euclidean(1, GeneratorScale::Probabilist), Shape::Interval { a, b }).unwrap()
    }

    const BM1: Process = Process::EuclideanBm {
        dim: 1,
        scale: GeneratorScale::Probabilist,
    };

    #[test]
    fn zero_horizon_survives() {
        let d = interval(-1.0, 1.0);
        let b = survival_estimate(BM1, [0.0; 3], &d, 0.0, &McConfig { paths: 1000, ..Default::default() }).unwrap();
        assert_eq!(b.survived, 1000);
        assert_eq!(b.estimate, 1.0);
    }

    #[test]
    fn start_outside_is_rejected() {
        let d = interval(-1.0, 1.0);
        assert!(survival_estimate(BM1, [2.0, 0.0, 0.0], &d, 1.0, &McConfig::default()).is_err());
    }

    #[test]
    fn chunking_is_worker_independent() {
        let d = interval(-1.0, 1.0);
        let cfg = McConfig {
            paths: 5000,
            h_t: 1e-2,
            chunk: 512,
            seed: 7,
            ..Default::default()
        };
        let a = survival_estimate(BM1, [0.0; 3], &d, 1.0, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| survival_estimate(BM1, [0.0; 3], &d, 1.0, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn su2_paths_stay_on_the_group() {
        let p = simulate(
            Process::Su2Sde {
                scale: GeneratorScale::Probabilist,
            },
            [0.0; 3],
            1.0,
            1e-4,
            3,
            0,
            None,
        )
        .unwrap();
        assert_eq!(p.group_states.len(), 10_001);
        let (det, unit) = p.group_states.last().unwrap().group_defects();
        assert!(det <= 1e-9 && unit <= 1e-9);
    }

    #[test]
    fn exit_is_a_stopping_time() {
        let d = interval(-0.3, 0.3);
        let p = simulate(BM1, [0.0; 3], 5.0, 1e-3, 11, 2, Some(&d)).unwrap();
        let tau = p.exit_time.expect("a path leaves (−0.3, 0.3) by t = 5");
        let before = (tau / p.step).floor() as usize;
        assert!(p.states[..before].iter().all(|x| d.contains(x)));
        assert!(!d.contains(p.states.last().unwrap()));
    }
}
