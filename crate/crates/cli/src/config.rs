//! Experiment configuration files.
//!
//! TOML with a required top-level `kind` and optional nested sections.
//! Every record rejects unknown fields.

use std::path::PathBuf;

use dirlab_core::contraction::SandwichModel;
use dirlab_core::kernels::KernelBound;
use dirlab_core::stochastic::McConfig;
use dirlab_core::{GeneratorScale, Point, Shape, SpaceKind, SpaceModel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Spectrum,
    Smalldev,
    Heatcontent,
    DilationCheck,
    Contraction,
    KernelBounds,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Spectrum,
        Kind::Smalldev,
        Kind::Heatcontent,
        Kind::DilationCheck,
        Kind::Contraction,
        Kind::KernelBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Spectrum => "spectrum",
            Kind::Smalldev => "smalldev",
            Kind::Heatcontent => "heatcontent",
            Kind::DilationCheck => "dilation_check",
            Kind::Contraction => "contraction",
            Kind::KernelBounds => "kernel_bounds",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Kind::Spectrum => "lowest Dirichlet eigenvalues of a domain, with ground-state audit",
            Kind::Smalldev => "small-ball survival probabilities against e^{-λ₁t/ε²} c₁φ₁",
            Kind::Heatcontent => "heat content series and Monte Carlo heat content",
            Kind::DilationCheck => "energy, semigroup and exit-time scaling under dilations",
            Kind::Contraction => "SU(2) to Heisenberg contraction tables",
            Kind::KernelBounds => "C(λ) constants and eigenfunction L^p audits",
        }
    }

    /// Whether results depend on random numbers.
    pub fn stochastic(self) -> bool {
        matches!(self, Kind::Smalldev | Kind::Heatcontent | Kind::DilationCheck | Kind::Contraction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceName {
    Euclidean,
    Heisenberg3,
    Su2Chart,
    Gasket,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub kind: SpaceName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default)]
    pub generator_scale: GeneratorScale,
}

impl SpaceSection {
    pub fn model(&self) -> Result<SpaceModel, String> {
        let kind = match self.kind {
            SpaceName::Euclidean => SpaceKind::Euclidean {
                n: self.n.ok_or("space.n is required for euclidean")?,
            },
            SpaceName::Heisenberg3 => SpaceKind::Heisenberg3,
            SpaceName::Su2Chart => SpaceKind::Su2Chart,
            SpaceName::Gasket => SpaceKind::Gasket {
                level: self.level.ok_or("space.level is required for gasket")?,
            },
        };
        SpaceModel::new(kind, self.generator_scale).map_err(|e| format!("space: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub h: f64,
    /// `z` spacing for Heisenberg lattices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hz: Option<f64>,
    #[serde(default = "default_k")]
    pub k: usize,
}

fn default_k() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub paths: usize,
    pub h_t: f64,
    pub bridge_correction: bool,
    pub substeps: usize,
    pub chunk: usize,
}

impl Default for McSection {
    fn default() -> Self {
        let d = McConfig::default();
        McSection {
            paths: d.paths,
            h_t: d.h_t,
            bridge_correction: d.bridge_correction,
            substeps: d.substeps,
            chunk: d.chunk,
        }
    }
}

impl McSection {
    pub fn config(&self, seed: u64) -> McConfig {
        McConfig {
            paths: self.paths,
            h_t: self.h_t,
            seed,
            bridge_correction: self.bridge_correction,
            substeps: self.substeps,
            chunk: self.chunk,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationSection {
    pub r: f64,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Start point of the Monte Carlo exit-time scaling check; skipped when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_start: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_t: Option<f64>,
}

fn default_t() -> f64 {
    0.05
}

fn default_samples() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmalldevSection {
    #[serde(default)]
    pub start: Point,
    pub t: f64,
    pub eps: Vec<f64>,
    /// `λ₁` of the unit gauge ball; computed from `[domain]` and `[mesh]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    /// `c₁φ₁(start)`; computed alongside `lambda1` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_beta() -> f64 {
    2.0
}

fn default_rel_tol() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatcontentSection {
    pub t_list: Vec<f64>,
    /// Times at which Monte Carlo heat content is estimated.
    #[serde(default)]
    pub mc_t: Vec<f64>,
    /// Spacing of the quadrature lattice for Monte Carlo; defaults to `mesh.h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_h: Option<f64>,
    #[serde(default = "default_heat_tol")]
    pub rel_tol: f64,
}

fn default_heat_tol() -> f64 {
    0.03
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionSection {
    #[serde(default = "default_r_list")]
    pub r_list: Vec<f64>,
    #[serde(default = "default_rho_grid")]
    pub rho_grid: Vec<f64>,
    #[serde(default = "default_bracket_eps")]
    pub bracket_eps: Vec<f64>,
    #[serde(default = "default_sandwich_r")]
    pub sandwich_r: Vec<f64>,
    #[serde(default = "default_sandwich_model")]
    pub sandwich_model: SandwichModel,
    #[serde(default = "default_sandwich_tol")]
    pub sandwich_tol: f64,
    /// Run the eigenvalue table on `[domain]` with `[mesh]`.
    #[serde(default)]
    pub eigen: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_deviation: Option<Su2SmalldevSection>,
}

fn default_r_list() -> Vec<f64> {
    vec![0.4, 0.2, 0.1, 0.05]
}

fn default_rho_grid() -> Vec<f64> {
    (1..=15).map(|i| 0.1 * i as f64).collect()
}

fn default_bracket_eps() -> Vec<f64> {
    vec![0.1, 0.01, 0.001]
}

fn default_sandwich_r() -> Vec<f64> {
    vec![0.2, 0.1, 0.05]
}

fn default_sandwich_model() -> SandwichModel {
    SandwichModel::ExponentialGauge
}

fn default_sandwich_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Su2SmalldevSection {
    pub eps: Vec<f64>,
    #[serde(default = "default_horizons")]
    pub horizons: [f64; 2],
    #[serde(default = "default_steps")]
    pub steps_per_unit: f64,
    pub lambda_h: f64,
    #[serde(default)]
    pub control: bool,
    #[serde(default = "default_su2_tol")]
    pub rel_tol: f64,
}

fn default_horizons() -> [f64; 2] {
    [0.5, 1.5]
}

fn default_steps() -> f64 {
    2000.0
}

fn default_su2_tol() -> f64 {
    0.15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelBoundsSection {
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Promote Monte Carlo comparisons to hard assertions.
    #[serde(default)]
    pub strict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilation: Option<DilationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<KernelBound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smalldev: Option<SmalldevSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heatcontent: Option<HeatcontentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<ContractionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_bounds: Option<KernelBoundsSection>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Fills defaults so the echoed config replays exactly.
    pub fn resolve(mut self) -> Self {
        if self.kind.stochastic() && self.mc.is_none() {
            self.mc = Some(McSection::default());
        }
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn require<'a, T>(&self, section: &'a Option<T>, name: &str) -> Result<&'a T, String> {
        section.as_ref().ok_or_else(|| format!("kind {} needs a [{name}] section", self.kind.name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_parsing() {
        let ok = "kind = \"spectrum\"\n[space]\nkind = \"euclidean\"\nn = 1\n[domain]\ntype = \"interval\"\na = 0.0\nb = 1.0\n[mesh]\nh = 0.015625\n";
        let c = ExperimentConfig::parse(ok).unwrap();
        assert_eq!(c.mesh.as_ref().unwrap().k, 10);
        let bad = ok.replace("n = 1", "n = 1\ncolour = 3");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert!(e.contains("colour") && e.contains("line"), "{e}");
        let echo = c.clone().resolve().to_toml();
        assert_eq!(ExperimentConfig::parse(&echo).unwrap(), c);
    }
}
