//! Dilation structures and the scaling identities they induce.
//!
//! A structure with homogeneous dimension `α` and walk dimension `β` has
//! `J_r = r^{−α}`, `κ = 1 − β/α` and `ℓ_r = J_r^{κ−1} = r^β`. Euclidean
//! space has `α = n`, the Heisenberg group `α = 4`, both with `β = 2`; the
//! gasket has `α = log 3/log 2`, `β = log 5/log 2` and only the integer
//! powers of `r₀ = 2` act.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discrete::{assemble_euclidean, assemble_gasket, assemble_heisenberg_spacing, OperatorMesh};
use crate::error::{invalid, Error, Result};
use crate::space::{DilationKind, Domain, Point, SpaceKind, SpaceModel};
use crate::spectral::{dense_semigroup, eigensolve};
use crate::stochastic::{survival_profile, McConfig, Process, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "snake_case")]
pub enum DilationGroup {
    PositiveReals,
    IntegerPowers { r0: f64 },
}

/// A group element: a real factor, or an exponent of `r₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Real(f64),
    Power(i32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationStructure {
    pub group: DilationGroup,
    pub action: DilationKind,
    /// Homogeneous (Hausdorff) dimension `α`.
    pub alpha: f64,
    /// Walk dimension `β`.
    pub beta: f64,
    pub space: SpaceModel,
}

pub fn euclidean_dilation(n: usize) -> Result<DilationStructure> {
    if n == 0 {
        return invalid("dimension must be at least 1");
    }
    Ok(DilationStructure {
        group: DilationGroup::PositiveReals,
        action: DilationKind::Isotropic,
        alpha: n as f64,
        beta: 2.0,
        space: SpaceModel::euclidean(n, Default::default()),
    })
}

/// Carnot dilations `(x, y, z) ↦ (rx, ry, r²z)` of the Heisenberg group,
/// homogeneous dimension `q`.
pub fn carnot_dilation(q: f64) -> Result<DilationStructure> {
    if !(q >= 3.0) {
        return invalid(format!("homogeneous dimension must be at least 3, got {q}"));
    }
    Ok(DilationStructure {
        group: DilationGroup::PositiveReals,
        action: DilationKind::Heisenberg,
        alpha: q,
        beta: 2.0,
        space: SpaceModel::heisenberg(Default::default()),
    })
}

/// Doubling maps of the gasket's planar embedding about the corner `(0, 0)`.
pub fn gasket_dilation() -> DilationStructure {
    DilationStructure {
        group: DilationGroup::IntegerPowers { r0: 2.0 },
        action: DilationKind::Isotropic,
        alpha: 3f64.ln() / 2f64.ln(),
        beta: 5f64.ln() / 2f64.ln(),
        space: SpaceModel::gasket(0),
    }
}

impl DilationStructure {
    pub fn factor(&self, g: Element) -> Result<f64> {
        match (self.group, g) {
            (DilationGroup::PositiveReals, Element::Real(r)) if r > 0.0 && r.is_finite() => Ok(r),
            (DilationGroup::IntegerPowers { r0 }, Element::Power(k)) => Ok(r0.powi(k)),
            _ => invalid(format!("{g:?} is not an element of {:?}", self.group)),
        }
    }

    pub fn compose(&self, a: Element, b: Element) -> Result<Element> {
        match (a, b) {
            (Element::Real(x), Element::Real(y)) => Ok(Element::Real(x * y)),
            (Element::Power(x), Element::Power(y)) => Ok(Element::Power(x + y)),
            _ => invalid("cannot compose elements of different groups"),
        }
    }

    pub fn identity(&self) -> Element {
        match self.group {
            DilationGroup::PositiveReals => Element::Real(1.0),
            DilationGroup::IntegerPowers { .. } => Element::Power(0),
        }
    }

    pub fn act(&self, g: Element, p: &Point) -> Result<Point> {
        Ok(self.action.apply(self.factor(g)?, p))
    }

    /// `J_g = r^{−α}`; exact powers for integer exponents.
    pub fn jacobian(&self, g: Element) -> Result<f64> {
        match (self.group, g) {
            (DilationGroup::IntegerPowers { .. }, Element::Power(k)) => Ok((1.0 / 3.0f64).powi(k)),
            _ => Ok(self.factor(g)?.powf(-self.alpha)),
        }
    }

    pub fn kappa(&self, _g: Element) -> f64 {
        1.0 - self.beta / self.alpha
    }

    /// `ℓ_g = J_g^{κ(g)−1}`.
    pub fn ell(&self, g: Element) -> Result<f64> {
        Ok(self.jacobian(g)?.powf(self.kappa(g) - 1.0))
    }

    /// Time factor `r^β` computed directly; equals [`DilationStructure::ell`].
    pub fn time_factor(&self, g: Element) -> Result<f64> {
        match (self.group, g) {
            (DilationGroup::IntegerPowers { .. }, Element::Power(k)) => Ok(5f64.powi(k)),
            _ => Ok(self.factor(g)?.powf(self.beta)),
        }
    }
}

/// Checks that `dilated` is the image of `base` under `δ_r` node by node.
fn check_topology(ds: &DilationStructure, base: &OperatorMesh, dilated: &OperatorMesh, r: f64) -> Result<()> {
    if base.n() != dilated.n() {
        return Err(Error::IncompatibleMesh(format!("{} vs {} nodes", base.n(), dilated.n())));
    }
    let scale = dilated.nodes.iter().flat_map(|p| p.iter()).fold(1.0f64, |m, x| m.max(x.abs()));
    for (i, (p, q)) in base.nodes.iter().zip(&dilated.nodes).enumerate() {
        let img = ds.action.apply(r, p);
        if (0..3).any(|k| (img[k] - q[k]).abs() > 1e-9 * scale) {
            return Err(Error::IncompatibleMesh(format!("node {i}: δ_r{p:?} = {img:?} but the dilated mesh has {q:?}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyScalingReport {
    /// `J_r^κ = r^{β−α}`.
    pub expected: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub max_rel_dev: f64,
    pub pass: bool,
}

/// Compares `E_base(f∘δ_r) / E_dilated(f)` with `J_r^κ` over random `f`.
pub fn verify_energy_scaling(
    ds: &DilationStructure,
    base: &OperatorMesh,
    dilated: &OperatorMesh,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<EnergyScalingReport> {
    check_topology(ds, base, dilated, r)?;
    let g = Element::Real(r);
    let expected = ds.jacobian(g)?.powf(ds.kappa(g));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi, mut dev) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for _ in 0..samples {
        // f on the dilated nodes; its pullback has the same node values
        let f: Vec<f64> = (0..base.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ratio = base.energy(&f) / dilated.energy(&f);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        dev = dev.max((ratio / expected - 1.0).abs());
    }
    Ok(EnergyScalingReport {
        expected,
        min_ratio: lo,
        max_ratio: hi,
        max_rel_dev: dev,
        pass: dev <= 0.02,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub ell: f64,
    pub max_rel_dev: f64,
    /// `λ_n(dilated)·ℓ / λ_n(base)` for the lowest modes.
    pub eigen_ratios: Vec<f64>,
    pub pass: bool,
}

/// `e^{−M₁t} f` against the pullback of `e^{−M_r ℓt}` applied to the
/// pushforward of `f`, over random `f`.
pub fn verify_semigroup_factorization(
    ds: &DilationStructure,
    base: &OperatorMesh,
    dilated: &OperatorMesh,
    r: f64,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<FactorizationReport> {
    check_topology(ds, base, dilated, r)?;
    let ell = ds.ell(Element::Real(r))?;
    let p1 = dense_semigroup(base, t)?;
    let pr = dense_semigroup(dilated, ell * t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = 0.0f64;
    for _ in 0..samples {
        let f = nalgebra::DVector::from_fn(base.n(), |_, _| rng.random_range(0.0..1.0));
        let a = &p1 * &f;
        let b = &pr * &f;
        let scale = a.amax().max(1e-300);
        dev = dev.max((a - b).amax() / scale);
    }
    let k = 5.min(base.n());
    let lb = eigensolve(base, k)?;
    let lr = eigensolve(dilated, k)?;
    let eigen_ratios = lb.eigenvalues.iter().zip(&lr.eigenvalues).map(|(a, b)| b * ell / a).collect();
    Ok(FactorizationReport {
        ell,
        max_rel_dev: dev,
        eigen_ratios,
        pass: dev <= 0.02,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GasketLevel {
    pub level: u32,
    /// Eigenvalues of `5^m L_m` (renormalised).
    pub renormalized: Vec<f64>,
    /// Eigenvalues of the graph Laplacian `L_m`.
    pub raw: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GasketScalingReport {
    pub levels: Vec<GasketLevel>,
    /// `λ₁^{raw}(m) / λ₁^{raw}(m+1)` for consecutive levels; tends to 5.
    pub ratios: Vec<f64>,
    /// Smallest `c` with `c⁻¹ 5^{m−1} ≤ λ₁^{raw}(1)/λ₁^{raw}(m) ≤ c 5^{m−1}`.
    pub envelope_c: f64,
}

pub fn gasket_eigen_scaling(levels: &[u32], modes: usize) -> Result<GasketScalingReport> {
    if levels.is_empty() || levels.windows(2).any(|w| w[1] != w[0] + 1) {
        return invalid("gasket levels must be consecutive and ascending");
    }
    let mut out = Vec::with_capacity(levels.len());
    for &m in levels {
        let mesh = assemble_gasket(m)?;
        let sd = eigensolve(&mesh, modes.min(mesh.n()))?;
        let f = 5f64.powi(m as i32);
        out.push(GasketLevel {
            level: m,
            raw: sd.eigenvalues.iter().map(|l| l / f).collect(),
            renormalized: sd.eigenvalues,
        });
    }
    let ratios = out.windows(2).map(|w| w[0].raw[0] / w[1].raw[0]).collect();
    let reference = assemble_gasket(1).and_then(|m| eigensolve(&m, 1))?.eigenvalues[0] / 5.0;
    let envelope_c = out
        .iter()
        .map(|l| {
            let q = reference / l.raw[0] / 5f64.powi(l.level as i32 - 1);
            q.max(1.0 / q)
        })
        .fold(1.0, f64::max);
    Ok(GasketScalingReport {
        levels: out,
        ratios,
        envelope_c,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrchestratorConfig {
    pub domain: Domain,
    pub start: Point,
    pub t: f64,
    /// Dilation factor of `g`; shrinking balls need `J_g > 1`, i.e. `r < 1`.
    pub r: f64,
    pub n_max: u32,
    pub mesh_h: f64,
    /// `z` spacing on Heisenberg meshes; defaults to `mesh_h`.
    pub mesh_hz: Option<f64>,
    pub mc: McConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrchestratorRow {
    pub n: u32,
    pub factor: f64,
    pub ell: f64,
    pub estimate: f64,
    pub ci95: f64,
    /// `e^{λ₁ t/ℓ^n} P̂`.
    pub scaled: f64,
    pub scaled_ci95: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrchestratorTable {
    pub lambda1: f64,
    /// `c₁φ₁(x)` from the mesh.
    pub target: f64,
    pub rows: Vec<OrchestratorRow>,
}

pub fn mesh_for(domain: &Domain, h: f64, hz: Option<f64>) -> Result<OperatorMesh> {
    match domain.space.kind {
        SpaceKind::Euclidean { .. } => assemble_euclidean(domain, h, domain.space.generator_scale),
        SpaceKind::Heisenberg3 => assemble_heisenberg_spacing(domain, [h, h, hz.unwrap_or(h)]),
        _ => Err(Error::Unsupported(format!("no dilation orchestration on {:?}", domain.space.kind))),
    }
}

/// Survival on `Φ_{gⁿ}(U)` from `Φ_{gⁿ}(x)` at fixed `t`, scaled by
/// `e^{λ₁ t/ℓⁿ}`, for `n = 0..=n_max`.
pub fn small_deviation_orchestrator(cfg: &OrchestratorConfig) -> Result<OrchestratorTable> {
    let ds = match cfg.domain.space.kind {
        SpaceKind::Euclidean { n } => euclidean_dilation(n)?,
        SpaceKind::Heisenberg3 => carnot_dilation(4.0)?,
        _ => return Err(Error::Unsupported("orchestration needs a continuous dilation".into())),
    };
    if !cfg.domain.contains(&cfg.start) {
        return invalid("start must lie in the base domain");
    }
    let mesh = mesh_for(&cfg.domain, cfg.mesh_h, cfg.mesh_hz)?;
    let sd = eigensolve(&mesh, 1)?;
    let node = mesh.nearest_node(&cfg.start);
    let lambda1 = sd.eigenvalues[0];
    let target = sd.coefficients[0] * sd.eigenfunctions[0][node];
    let process = Process::for_space(&cfg.domain.space)?;
    let mut rows = Vec::new();
    for n in 0..=cfg.n_max {
        let factor = cfg.r.powi(n as i32);
        let ell = ds.ell(Element::Real(factor))?;
        let dom = if n == 0 { cfg.domain.clone() } else { cfg.domain.dilated(factor, ds.action)? };
        let start = ds.action.apply(factor, &cfg.start);
        let mc = McConfig {
            h_t: cfg.mc.h_t * ell,
            ..cfg.mc
        };
        let b = survival_profile(process, start, Region::Domain(&dom), &[cfg.t], &mc, (n as u64) << 32)?.remove(0);
        let s = (lambda1 * cfg.t / ell).exp();
        rows.push(OrchestratorRow {
            n,
            factor,
            ell,
            estimate: b.estimate,
            ci95: b.ci95,
            scaled: s * b.estimate,
            scaled_ci95: s * b.ci95,
        });
    }
    Ok(OrchestratorTable { lambda1, target, rows })
}
