//! Spaces, charts, gauges and domains.
//!
//! Points are stored as `[f64; 3]`; unused trailing coordinates are zero.
//! Heisenberg coordinates use the group law
//! `(x, y, z)·(x', y', z') = (x + x', y + y', z + z' + (x y' − y x')/2)`,
//! whose left-invariant fields are `X = ∂x − (y/2)∂z` and `Y = ∂y + (x/2)∂z`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Point = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorScale {
    /// Generator of `E(f, f) = ∫|∇f|²`, i.e. `Δ` on `Rⁿ`.
    #[default]
    DirichletForm,
    /// `½Δ`, the generator of standard Brownian motion.
    Probabilist,
}

impl GeneratorScale {
    /// Multiplier applied to the Dirichlet-form generator.
    pub fn factor(self) -> f64 {
        match self {
            GeneratorScale::DirichletForm => 1.0,
            GeneratorScale::Probabilist => 0.5,
        }
    }

    /// Variance rate of the driving noise.
    pub fn diffusion_variance(self) -> f64 {
        2.0 * self.factor()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Euclidean { n: usize },
    Heisenberg3,
    Su2Chart,
    Gasket { level: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceModel {
    pub kind: SpaceKind,
    #[serde(default)]
    pub generator_scale: GeneratorScale,
}

impl SpaceModel {
    pub fn new(kind: SpaceKind, generator_scale: GeneratorScale) -> Result<Self> {
        match kind {
            SpaceKind::Euclidean { n } if n == 0 || n > 3 => {
                return invalid(format!("euclidean dimension must be 1..=3, got {n}"))
            }
            _ => {}
        }
        Ok(SpaceModel {
            kind,
            generator_scale,
        })
    }

    pub fn euclidean(n: usize, scale: GeneratorScale) -> Self {
        Self::new(SpaceKind::Euclidean { n }, scale).expect("dimension 1..=3")
    }

    pub fn heisenberg(scale: GeneratorScale) -> Self {
        SpaceModel {
            kind: SpaceKind::Heisenberg3,
            generator_scale: scale,
        }
    }

    pub fn su2_chart(scale: GeneratorScale) -> Self {
        SpaceModel {
            kind: SpaceKind::Su2Chart,
            generator_scale: scale,
        }
    }

    pub fn gasket(level: u32) -> Self {
        SpaceModel {
            kind: SpaceKind::Gasket { level },
            generator_scale: GeneratorScale::DirichletForm,
        }
    }

    pub fn with_scale(mut self, scale: GeneratorScale) -> Self {
        self.generator_scale = scale;
        self
    }

    /// Chart dimension.
    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::Euclidean { n } => n,
            SpaceKind::Heisenberg3 | SpaceKind::Su2Chart => 3,
            SpaceKind::Gasket { .. } => 2,
        }
    }

    pub fn measure_model(&self) -> MeasureModel {
        match self.kind {
            SpaceKind::Euclidean { .. } => MeasureModel::Lebesgue,
            SpaceKind::Heisenberg3 => MeasureModel::Haar,
            SpaceKind::Su2Chart => MeasureModel::Su2Haar,
            SpaceKind::Gasket { .. } => MeasureModel::SelfSimilar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureModel {
    Lebesgue,
    /// Lebesgue measure in exponential coordinates.
    Haar,
    /// `½ sin(2ρ) dρ dθ dz` in the cylindrical chart.
    Su2Haar,
    /// Equal mass per level-m vertex.
    SelfSimilar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeKind {
    EuclideanNorm,
    Koranyi,
    ChartRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    pub kind: GaugeKind,
    pub scale: f64,
}

impl Gauge {
    pub fn new(kind: GaugeKind, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return invalid(format!("gauge scale must be positive, got {scale}"));
        }
        Ok(Gauge { kind, scale })
    }

    pub fn unit(kind: GaugeKind) -> Self {
        Gauge { kind, scale: 1.0 }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        self.scale * gauge_raw(self.kind, p)
    }

    /// The dilation under which this gauge is homogeneous of degree one.
    pub fn dilate(&self, r: f64, p: &Point) -> Point {
        match self.kind {
            GaugeKind::EuclideanNorm => [r * p[0], r * p[1], r * p[2]],
            GaugeKind::Koranyi | GaugeKind::ChartRadius => heisenberg_dilate(r, p),
        }
    }
}

#[inline]
pub fn koranyi(p: &Point) -> f64 {
    let rho2 = p[0] * p[0] + p[1] * p[1];
    (rho2 * rho2 + 16.0 * p[2] * p[2]).sqrt().sqrt()
}

#[inline]
pub fn euclidean_norm(p: &Point) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

#[inline]
fn gauge_raw(kind: GaugeKind, p: &Point) -> f64 {
    match kind {
        GaugeKind::EuclideanNorm => euclidean_norm(p),
        GaugeKind::Koranyi | GaugeKind::ChartRadius => koranyi(p),
    }
}

#[inline]
pub fn heisenberg_mul(p: &Point, q: &Point) -> Point {
    [
        p[0] + q[0],
        p[1] + q[1],
        p[2] + q[2] + 0.5 * (p[0] * q[1] - p[1] * q[0]),
    ]
}

#[inline]
pub fn heisenberg_inv(p: &Point) -> Point {
    [-p[0], -p[1], -p[2]]
}

#[inline]
pub fn heisenberg_dilate(r: f64, p: &Point) -> Point {
    [r * p[0], r * p[1], r * r * p[2]]
}

/// Distance in the chart: exact for Euclidean space and the gasket's planar
/// embedding, the gauge of the group difference `p⁻¹·q` (a quasi-distance)
/// on the Heisenberg group and the SU(2) chart.
pub fn chart_distance(space: &SpaceModel, p: &Point, q: &Point) -> f64 {
    match space.kind {
        SpaceKind::Euclidean { .. } | SpaceKind::Gasket { .. } => {
            let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
            euclidean_norm(&d)
        }
        SpaceKind::Heisenberg3 | SpaceKind::Su2Chart => {
            koranyi(&heisenberg_mul(&heisenberg_inv(p), q))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DilationKind {
    /// `p ↦ r p`.
    Isotropic,
    /// `(x, y, z) ↦ (r x, r y, r² z)`.
    Heisenberg,
}

impl DilationKind {
    pub fn apply(self, r: f64, p: &Point) -> Point {
        match self {
            DilationKind::Isotropic => [r * p[0], r * p[1], r * p[2]],
            DilationKind::Heisenberg => heisenberg_dilate(r, p),
        }
    }
}

/// Geometric description of an open set in a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Interval {
        a: f64,
        b: f64,
    },
    #[serde(rename = "box")]
    Cuboid {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        gauge: GaugeKind,
        radius: f64,
        center: Vec<f64>,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    /// `{x² + y² < radius², z_lo < z < z_hi}`.
    Cylinder {
        radius: f64,
        z_lo: f64,
        z_hi: f64,
    },
    Union {
        parts: Vec<Shape>,
        connected: bool,
    },
    Difference {
        base: Box<Shape>,
        remove: Vec<Shape>,
        connected: bool,
    },
    /// Union of the closed gasket cells named by address words over
    /// `{0, 1, 2}`; an empty list means the whole gasket.
    GasketCells {
        words: Vec<String>,
    },
    /// Image of `inner` under a dilation by `r`.
    Dilated {
        inner: Box<Shape>,
        r: f64,
        dilation: DilationKind,
    },
}

/// Outer corners of the gasket's planar embedding.
pub const GASKET_CORNERS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.866_025_403_784_438_6]];

impl Shape {
    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Shape::Interval { a, b } => p[0] > *a && p[0] < *b,
            Shape::Cuboid { lo, hi } => (0..lo.len()).all(|i| p[i] > lo[i] && p[i] < hi[i]),
            Shape::Ball {
                gauge,
                radius,
                center,
            } => {
                let mut c = [0.0; 3];
                c[..center.len()].copy_from_slice(center);
                let d = match gauge {
                    GaugeKind::EuclideanNorm => {
                        euclidean_norm(&[p[0] - c[0], p[1] - c[1], p[2] - c[2]])
                    }
                    GaugeKind::Koranyi | GaugeKind::ChartRadius => {
                        koranyi(&heisenberg_mul(&heisenberg_inv(&c), p))
                    }
                };
                d < *radius
            }
            Shape::Polygon { vertices } => point_in_polygon(vertices, p[0], p[1]),
            Shape::Cylinder {
                radius,
                z_lo,
                z_hi,
            } => p[0] * p[0] + p[1] * p[1] < radius * radius && p[2] > *z_lo && p[2] < *z_hi,
            Shape::Union { parts, .. } => parts.iter().any(|s| s.contains(p)),
            Shape::Difference { base, remove, .. } => {
                base.contains(p) && !remove.iter().any(|s| s.closure_contains(p))
            }
            Shape::GasketCells { words } => {
                if words.is_empty() {
                    in_triangle(&GASKET_CORNERS, p, 1e-12)
                } else {
                    words
                        .iter()
                        .any(|w| in_triangle(&gasket_cell(w), p, 1e-12))
                }
            }
            Shape::Dilated {
                inner,
                r,
                dilation,
            } => inner.contains(&dilation.apply(1.0 / r, p)),
        }
    }

    /// Membership in the closure; used for removed parts of a difference so
    /// that the result stays open.
    fn closure_contains(&self, p: &Point) -> bool {
        match self {
            Shape::Interval { a, b } => p[0] >= *a && p[0] <= *b,
            Shape::Cuboid { lo, hi } => (0..lo.len()).all(|i| p[i] >= lo[i] && p[i] <= hi[i]),
            Shape::Cylinder {
                radius,
                z_lo,
                z_hi,
            } => p[0] * p[0] + p[1] * p[1] <= radius * radius && p[2] >= *z_lo && p[2] <= *z_hi,
            _ => self.contains(p),
        }
    }

    pub fn connected(&self) -> bool {
        match self {
            Shape::Union { parts, connected } => {
                if parts.len() == 1 {
                    parts[0].connected()
                } else {
                    *connected
                }
            }
            Shape::Difference { connected, .. } => *connected,
            Shape::GasketCells { .. } => true,
            Shape::Dilated { inner, .. } => inner.connected(),
            _ => true,
        }
    }

    pub fn bounding_box(&self, dim: usize) -> Vec<(f64, f64)> {
        let b3 = self.bbox3();
        b3[..dim].to_vec()
    }

    fn bbox3(&self) -> [(f64, f64); 3] {
        match self {
            Shape::Interval { a, b } => [(*a, *b), (0.0, 0.0), (0.0, 0.0)],
            Shape::Cuboid { lo, hi } => {
                let mut out = [(0.0, 0.0); 3];
                for i in 0..lo.len() {
                    out[i] = (lo[i], hi[i]);
                }
                out
            }
            Shape::Ball {
                gauge,
                radius,
                center,
            } => {
                let mut c = [0.0; 3];
                c[..center.len()].copy_from_slice(center);
                let r = *radius;
                match gauge {
                    GaugeKind::EuclideanNorm => {
                        let mut out = [(0.0, 0.0); 3];
                        for i in 0..center.len() {
                            out[i] = (c[i] - r, c[i] + r);
                        }
                        out
                    }
                    GaugeKind::Koranyi | GaugeKind::ChartRadius => {
                        let dz = r * r / 4.0 + 0.5 * r * (c[0].abs() + c[1].abs());
                        [(c[0] - r, c[0] + r), (c[1] - r, c[1] + r), (c[2] - dz, c[2] + dz)]
                    }
                }
            }
            Shape::Polygon { vertices } => {
                let mut out = [(f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY), (0.0, 0.0)];
                for v in vertices {
                    for k in 0..2 {
                        out[k].0 = out[k].0.min(v[k]);
                        out[k].1 = out[k].1.max(v[k]);
                    }
                }
                out
            }
            Shape::Cylinder {
                radius,
                z_lo,
                z_hi,
            } => [(-radius, *radius), (-radius, *radius), (*z_lo, *z_hi)],
            Shape::Union { parts, .. } => {
                let mut out = [(f64::INFINITY, f64::NEG_INFINITY); 3];
                for s in parts {
                    let b = s.bbox3();
                    for k in 0..3 {
                        out[k].0 = out[k].0.min(b[k].0);
                        out[k].1 = out[k].1.max(b[k].1);
                    }
                }
                out
            }
            Shape::Difference { base, .. } => base.bbox3(),
            Shape::GasketCells { words } => {
                let tris: Vec<[[f64; 2]; 3]> = if words.is_empty() {
                    vec![GASKET_CORNERS]
                } else {
                    words.iter().map(|w| gasket_cell(w)).collect()
                };
                let mut out = [(f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY), (0.0, 0.0)];
                for t in &tris {
                    for v in t {
                        for k in 0..2 {
                            out[k].0 = out[k].0.min(v[k]);
                            out[k].1 = out[k].1.max(v[k]);
                        }
                    }
                }
                out
            }
            Shape::Dilated {
                inner,
                r,
                dilation,
            } => {
                let b = inner.bbox3();
                let s = [*r, *r, if *dilation == DilationKind::Heisenberg { r * r } else { *r }];
                let mut out = [(0.0, 0.0); 3];
                for k in 0..3 {
                    out[k] = (s[k] * b[k].0, s[k] * b[k].1);
                }
                out
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Shape::Interval { a, b } => {
                if dim != 1 {
                    return invalid("interval requires a one-dimensional space");
                }
                if !(a < b) {
                    return invalid(format!("interval endpoints out of order: ({a}, {b})"));
                }
            }
            Shape::Cuboid { lo, hi } => {
                if lo.len() != dim || hi.len() != dim {
                    return invalid(format!("box corners must have {dim} coordinates"));
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
                    return invalid("box has an empty side");
                }
            }
            Shape::Ball {
                gauge,
                radius,
                center,
            } => {
                if center.len() != dim {
                    return invalid(format!("ball center must have {dim} coordinates"));
                }
                if !(*radius > 0.0) {
                    return invalid("ball radius must be positive");
                }
                if *gauge != GaugeKind::EuclideanNorm && dim != 3 {
                    return invalid("gauge balls live in three-dimensional charts");
                }
            }
            Shape::Polygon { vertices } => {
                if dim != 2 {
                    return invalid("polygon requires a two-dimensional space");
                }
                if vertices.len() < 3 {
                    return invalid("polygon needs at least three vertices");
                }
            }
            Shape::Cylinder {
                radius,
                z_lo,
                z_hi,
            } => {
                if dim != 3 {
                    return invalid("cylinder requires a three-dimensional chart");
                }
                if !(*radius > 0.0) || !(z_lo < z_hi) {
                    return invalid("cylinder has an empty extent");
                }
            }
            Shape::Union { parts, .. } => {
                if parts.is_empty() {
                    return invalid("union of nothing");
                }
                for p in parts {
                    p.validate(dim)?;
                }
            }
            Shape::Difference { base, remove, .. } => {
                base.validate(dim)?;
                for p in remove {
                    p.validate(dim)?;
                }
            }
            Shape::GasketCells { words } => {
                if dim != 2 {
                    return invalid("gasket cells live on the gasket");
                }
                for w in words {
                    if w.chars().any(|c| !matches!(c, '0' | '1' | '2')) {
                        return invalid(format!("gasket address {w:?} uses digits other than 0, 1, 2"));
                    }
                }
            }
            Shape::Dilated { inner, r, .. } => {
                if !(*r > 0.0) {
                    return invalid("dilation factor must be positive");
                }
                inner.validate(dim)?;
            }
        }
        Ok(())
    }

    /// Distances to the boundary pieces seen from `p`, each paired with the
    /// outward unit normal of the local half-space. Returns `false` for
    /// shapes without a half-space model, in which case callers fall back to
    /// discrete monitoring.
    pub fn halfspace_distances(&self, p: &Point, out: &mut Vec<(f64, Point)>) -> bool {
        match self {
            Shape::Interval { a, b } => {
                out.push((p[0] - a, [-1.0, 0.0, 0.0]));
                out.push((b - p[0], [1.0, 0.0, 0.0]));
                true
            }
            Shape::Cuboid { lo, hi } => {
                for i in 0..lo.len() {
                    let mut n = [0.0; 3];
                    n[i] = -1.0;
                    out.push((p[i] - lo[i], n));
                    n[i] = 1.0;
                    out.push((hi[i] - p[i], n));
                }
                true
            }
            Shape::Ball {
                gauge: GaugeKind::EuclideanNorm,
                radius,
                center,
            } => {
                let mut d = [0.0; 3];
                for i in 0..center.len() {
                    d[i] = p[i] - center[i];
                }
                let norm = euclidean_norm(&d);
                let n = if norm > 0.0 {
                    [d[0] / norm, d[1] / norm, d[2] / norm]
                } else {
                    [1.0, 0.0, 0.0]
                };
                out.push((radius - norm, n));
                true
            }
            Shape::Polygon { vertices } => {
                let m = vertices.len();
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    let (cx, cy) = closest_on_segment(a, b, p[0], p[1]);
                    let (dx, dy) = (cx - p[0], cy - p[1]);
                    let d = (dx * dx + dy * dy).sqrt();
                    let n = if d > 0.0 { [dx / d, dy / d, 0.0] } else { [1.0, 0.0, 0.0] };
                    out.push((d, n));
                }
                true
            }
            Shape::Dilated {
                inner,
                r,
                dilation: DilationKind::Isotropic,
            } => {
                let start = out.len();
                let q = [p[0] / r, p[1] / r, p[2] / r];
                if !inner.halfspace_distances(&q, out) {
                    return false;
                }
                for e in &mut out[start..] {
                    e.0 *= r;
                }
                true
            }
            _ => false,
        }
    }
}

fn closest_on_segment(a: [f64; 2], b: [f64; 2], x: f64, y: f64) -> (f64, f64) {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let len2 = ex * ex + ey * ey;
    let s = if len2 > 0.0 {
        (((x - a[0]) * ex + (y - a[1]) * ey) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a[0] + s * ex, a[1] + s * ey)
}

fn point_in_polygon(v: &[[f64; 2]], x: f64, y: f64) -> bool {
    let mut inside = false;
    let m = v.len();
    let mut j = m - 1;
    for i in 0..m {
        let (xi, yi) = (v[i][0], v[i][1]);
        let (xj, yj) = (v[j][0], v[j][1]);
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn in_triangle(t: &[[f64; 2]; 3], p: &Point, tol: f64) -> bool {
    let sign = |a: [f64; 2], b: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let area = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]);
    let s = area.signum();
    let scale = area.abs().sqrt();
    (0..3).all(|i| s * sign(t[i], t[(i + 1) % 3]) >= -tol * scale)
}

/// Corner coordinates of the gasket cell with the given address.
pub fn gasket_cell(word: &str) -> [[f64; 2]; 3] {
    let mut tri = GASKET_CORNERS;
    for c in word.chars() {
        let k = (c as u8 - b'0') as usize;
        let fix = tri[k];
        for v in tri.iter_mut() {
            v[0] = 0.5 * (v[0] + fix[0]);
            v[1] = 0.5 * (v[1] + fix[1]);
        }
    }
    tri
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub space: SpaceModel,
    pub shape: Shape,
    pub bounding_box: Vec<(f64, f64)>,
    pub connected: bool,
    pub label: String,
}

/// Subdivisions per axis of the coarsest grid a domain must be visible on.
pub const COARSEST_SUBDIVISIONS: usize = 16;

impl Domain {
    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        self.shape.contains(p)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Image under a dilation; the bounding box is recomputed.
    pub fn dilated(&self, r: f64, dilation: DilationKind) -> Result<Domain> {
        make_domain(
            self.space,
            Shape::Dilated {
                inner: Box::new(self.shape.clone()),
                r,
                dilation,
            },
        )
        .map(|d| d.with_label(format!("{}∘δ[{r}]", self.label)))
    }
}

pub fn make_domain(space: SpaceModel, shape: Shape) -> Result<Domain> {
    let dim = space.dim();
    shape.validate(dim)?;
    match (&space.kind, &shape) {
        (SpaceKind::Gasket { .. }, Shape::GasketCells { .. }) => {}
        (SpaceKind::Gasket { .. }, _) => return invalid("gasket domains are cell sets"),
        (_, Shape::GasketCells { .. }) => return invalid("cell sets only live on the gasket"),
        _ => {}
    }
    let bounding_box = shape.bounding_box(dim);
    if !has_interior_node(&shape, &bounding_box) {
        return Err(Error::EmptyDomain(format!(
            "no node of the {COARSEST_SUBDIVISIONS}-per-axis grid over {bounding_box:?} lies inside {shape:?}"
        )));
    }
    let connected = shape.connected();
    let label = default_label(&shape);
    Ok(Domain {
        space,
        shape,
        bounding_box,
        connected,
        label,
    })
}

fn has_interior_node(shape: &Shape, bbox: &[(f64, f64)]) -> bool {
    let dim = bbox.len();
    let n = COARSEST_SUBDIVISIONS;
    let counts: Vec<usize> = (0..3).map(|k| if k < dim { n - 1 } else { 1 }).collect();
    for i in 0..counts[0] {
        for j in 0..counts[1] {
            for l in 0..counts[2] {
                let idx = [i, j, l];
                let mut p = [0.0; 3];
                for k in 0..dim {
                    let (lo, hi) = bbox[k];
                    p[k] = lo + (hi - lo) * (idx[k] + 1) as f64 / n as f64;
                }
                if shape.contains(&p) {
                    return true;
                }
            }
        }
    }
    false
}

fn default_label(shape: &Shape) -> String {
    match shape {
        Shape::Interval { a, b } => format!("interval({a},{b})"),
        Shape::Cuboid { .. } => "box".into(),
        Shape::Ball { gauge, radius, .. } => format!("ball({gauge:?},{radius})"),
        Shape::Polygon { vertices } => format!("polygon[{}]", vertices.len()),
        Shape::Cylinder { .. } => "cylinder".into(),
        Shape::Union { parts, .. } => format!("union[{}]", parts.len()),
        Shape::Difference { .. } => "difference".into(),
        Shape::GasketCells { words } => format!("gasket_cells[{}]", words.len()),
        Shape::Dilated { r, .. } => format!("dilated({r})"),
    }
}
