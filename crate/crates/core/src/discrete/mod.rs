//! Finite-difference Dirichlet operators.
//!
//! Every operator is assembled from an energy. For a vector field
//! `V = Σ cₐ ∂ₐ` the one-sided differences `D⁺V f(p) = Σ cₐ (f(p+eₐ) − f(p))/hₐ`
//! and `D⁻V f(p) = Σ cₐ (f(p) − f(p−eₐ))/hₐ` are averaged in
//!
//! ```text
//! E(f) = Σ_p w(p) · ½ [ (D⁺V f(p))² + (D⁻V f(p))² ]
//! ```
//!
//! summed over every lattice point `p` and field `V`, with `f` extended by
//! zero outside the domain. The stiffness `K` of this form is symmetric
//! and positive semidefinite by construction; the operator is `M = W⁻¹K`
//! where `W` holds the node masses, so `M` is self-adjoint in the weighted
//! inner product `⟨u, v⟩_w = Σ wᵢ uᵢ vᵢ`.

mod cylindrical;
mod gasket;
mod io;

pub use cylindrical::{
    assemble_cylindrical, assemble_heisenberg_cylindrical, assemble_su2_rescaled, default_theta_count, su2_coefficients,
    CylindricalGrid, Su2Coefficients,
};
pub use gasket::{assemble_gasket, gasket_graph, GasketGraph};
pub use io::{read_triplet_file, write_triplet_file};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::space::{Domain, GeneratorScale, Point, SpaceKind};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct OperatorMesh {
    /// Node positions in the domain's chart.
    pub nodes: Vec<Point>,
    /// Coordinates the stencil was laid out in, when they differ from the
    /// chart (e.g. `(ρ, θ, z)` for cylindrical meshes).
    pub native: Option<Vec<Point>>,
    pub weights: Vec<f64>,
    /// Symmetric stiffness `K`; the operator is `W⁻¹K`.
    pub stiffness: CsrMatrix,
    pub h: f64,
    pub spacing: [f64; 3],
    pub domain: Domain,
    /// Integer lattice position of each node, for structured meshes.
    pub lattice: Option<Vec<[i64; 3]>>,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub positive_offdiagonal: usize,
    pub offdiagonal: usize,
    pub max_positive: f64,
    pub max_diagonal: f64,
    /// `max_positive / max_diagonal`.
    pub relative: f64,
}

impl OperatorMesh {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn scale(&self) -> GeneratorScale {
        self.domain.space.generator_scale
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `M x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.stiffness.mul(x);
        for (yi, w) in y.iter_mut().zip(&self.weights) {
            *yi /= w;
        }
        y
    }

    /// Entry of `M = W⁻¹K`.
    pub fn operator_entry(&self, i: usize, j: usize) -> f64 {
        self.stiffness.get(i, j) / self.weights[i]
    }

    /// Discrete Dirichlet form `⟨Mu, u⟩_w = uᵀKu`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.stiffness.quadratic_form(u)
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.weights).map(|((a, b), w)| a * b * w).sum()
    }

    /// The same mesh under another generator normalisation.
    pub fn with_scale(&self, scale: GeneratorScale) -> OperatorMesh {
        let mut out = self.clone();
        let ratio = scale.factor() / self.scale().factor();
        out.stiffness.scale(ratio);
        out.domain.space.generator_scale = scale;
        out
    }

    /// `W^{-1/2} K W^{-1/2}`, similar to `M` and symmetric.
    pub fn symmetric_operator(&self) -> CsrMatrix {
        let s: Vec<f64> = self.weights.iter().map(|w| 1.0 / w.sqrt()).collect();
        self.stiffness.scaled(&s, &s)
    }

    pub fn dense_operator(&self) -> DMatrix<f64> {
        let mut m = self.stiffness.to_dense();
        for i in 0..self.n() {
            let w = self.weights[i];
            for j in 0..self.n() {
                m[(i, j)] /= w;
            }
        }
        m
    }

    /// Positive off-diagonal entries of `K` (violations of M-matrix sign
    /// structure).
    pub fn sign_structure(&self) -> SignReport {
        let mut rep = SignReport {
            positive_offdiagonal: 0,
            offdiagonal: 0,
            max_positive: 0.0,
            max_diagonal: 0.0,
            relative: 0.0,
        };
        for (i, j, v) in self.stiffness.triplets() {
            if i == j {
                rep.max_diagonal = rep.max_diagonal.max(v);
            } else {
                rep.offdiagonal += 1;
                if v > 0.0 {
                    rep.positive_offdiagonal += 1;
                    rep.max_positive = rep.max_positive.max(v);
                }
            }
        }
        rep.relative = if rep.max_diagonal > 0.0 { rep.max_positive / rep.max_diagonal } else { 0.0 };
        rep
    }

    /// Index of the node closest to `p` in the chart's Euclidean metric.
    pub fn nearest_node(&self, p: &Point) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, q) in self.nodes.iter().enumerate() {
            let d = (0..3).map(|k| (p[k] - q[k]).powi(2)).sum::<f64>();
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// A rectangular lattice, optionally periodic along some axes.
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub counts: [usize; 3],
    pub periodic: [bool; 3],
}

impl Lattice {
    fn len(&self) -> usize {
        self.counts.iter().product()
    }

    fn linear(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.counts[1] + idx[1]) * self.counts[2] + idx[2]
    }

    fn unravel(&self, l: usize) -> [usize; 3] {
        let k = l % self.counts[2];
        let r = l / self.counts[2];
        [r / self.counts[1], r % self.counts[1], k]
    }

    fn position(&self, idx: [usize; 3]) -> Point {
        [
            self.origin[0] + idx[0] as f64 * self.spacing[0],
            self.origin[1] + idx[1] as f64 * self.spacing[1],
            self.origin[2] + idx[2] as f64 * self.spacing[2],
        ]
    }

    fn shift(&self, idx: [usize; 3], axis: usize, step: i64) -> Option<[usize; 3]> {
        let c = self.counts[axis] as i64;
        let mut v = idx[axis] as i64 + step;
        if self.periodic[axis] {
            v = v.rem_euclid(c);
        } else if v < 0 || v >= c {
            return None;
        }
        let mut out = idx;
        out[axis] = v as usize;
        Some(out)
    }
}

/// Vector fields and density defining an energy on a lattice.
pub(crate) trait FieldEnergy {
    fn field_count(&self) -> usize;
    /// Coefficients of field `k` along each lattice axis at native point `p`.
    fn field(&self, k: usize, p: &Point) -> [f64; 3];
    /// Energy and mass density at `p` (without the cell volume).
    fn density(&self, p: &Point) -> f64;
}

pub(crate) struct Assembled {
    pub native: Vec<Point>,
    pub lattice_idx: Vec<[i64; 3]>,
    pub weights: Vec<f64>,
    pub stiffness: CsrMatrix,
}

/// Assembles the averaged one-sided energy over all lattice points whose
/// stencils touch an interior node.
pub(crate) fn assemble_lattice<F: FieldEnergy>(
    lattice: &Lattice,
    inside: impl Fn(&Point) -> bool,
    fields: &F,
    factor: f64,
) -> Result<Assembled> {
    let total = lattice.len();
    let mut id = vec![usize::MAX; total];
    let mut native = Vec::new();
    let mut lattice_idx = Vec::new();
    for l in 0..total {
        let idx = lattice.unravel(l);
        let p = lattice.position(idx);
        if inside(&p) {
            id[l] = native.len();
            native.push(p);
            lattice_idx.push([idx[0] as i64, idx[1] as i64, idx[2] as i64]);
        }
    }
    if native.is_empty() {
        return Err(Error::EmptyDomain("no lattice node lies inside the domain".into()));
    }
    let cell: f64 = lattice.spacing.iter().product();
    let weights: Vec<f64> = native.iter().map(|p| fields.density(p) * cell).collect();
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return invalid("non-positive node mass inside the domain");
    }

    let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(native.len() * 24);
    let mut g: Vec<(usize, f64)> = Vec::with_capacity(4);
    for l in 0..total {
        let idx = lattice.unravel(l);
        // skip points whose closed stencil misses the interior
        let mut touches = id[l] != usize::MAX;
        if !touches {
            'axes: for a in 0..3 {
                for s in [-1, 1] {
                    if let Some(nb) = lattice.shift(idx, a, s) {
                        if id[lattice.linear(nb)] != usize::MAX {
                            touches = true;
                            break 'axes;
                        }
                    }
                }
            }
        }
        if !touches {
            continue;
        }
        let p = lattice.position(idx);
        let rho = fields.density(&p);
        if rho == 0.0 {
            continue;
        }
        let w = 0.5 * factor * rho * cell;
        for k in 0..fields.field_count() {
            let c = fields.field(k, &p);
            for dir in [1i64, -1] {
                g.clear();
                let mut centre = 0.0;
                for a in 0..3 {
                    if c[a] == 0.0 {
                        continue;
                    }
                    let coef = c[a] / lattice.spacing[a];
                    // forward: +coef at p+e, −coef at p; backward: +coef at p, −coef at p−e
                    centre -= dir as f64 * coef;
                    if let Some(nb) = lattice.shift(idx, a, dir) {
                        let j = id[lattice.linear(nb)];
                        if j != usize::MAX {
                            g.push((j, dir as f64 * coef));
                        }
                    }
                }
                if id[l] != usize::MAX {
                    g.push((id[l], centre));
                }
                for &(i, gi) in &g {
                    for &(j, gj) in &g {
                        trip.push((i, j, w * gi * gj));
                    }
                }
            }
        }
    }
    let stiffness = CsrMatrix::from_triplets(native.len(), trip);
    Ok(Assembled {
        native,
        lattice_idx,
        weights,
        stiffness,
    })
}

/// Lattice covering `bbox` with nodes on `lo + i·h` and one layer of
/// padding on each side.
pub(crate) fn padded_lattice(bbox: &[(f64, f64)], spacing: [f64; 3]) -> Lattice {
    let mut origin = [0.0; 3];
    let mut counts = [1usize; 3];
    for (a, &(lo, hi)) in bbox.iter().enumerate() {
        let h = spacing[a];
        origin[a] = lo - h;
        counts[a] = ((hi - lo) / h - 1e-9).ceil().max(0.0) as usize + 3;
    }
    Lattice {
        origin,
        spacing,
        counts,
        periodic: [false; 3],
    }
}

fn check_axis_counts(a: &Assembled, dim: usize, min: usize, what: &str) -> Result<()> {
    for axis in 0..dim {
        let mut seen: Vec<i64> = a.lattice_idx.iter().map(|q| q[axis]).collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() < min {
            return invalid(format!(
                "{what} needs at least {min} interior nodes along axis {axis}, found {}",
                seen.len()
            ));
        }
    }
    Ok(())
}

struct EuclideanFields {
    dim: usize,
}

impl FieldEnergy for EuclideanFields {
    fn field_count(&self) -> usize {
        self.dim
    }
    fn field(&self, k: usize, _p: &Point) -> [f64; 3] {
        let mut c = [0.0; 3];
        c[k] = 1.0;
        c
    }
    fn density(&self, _p: &Point) -> f64 {
        1.0
    }
}

/// Standard `2n+1`-point Dirichlet Laplacian with node masses `hⁿ`.
pub fn assemble_euclidean(domain: &Domain, h: f64, scale: GeneratorScale) -> Result<OperatorMesh> {
    let dim = match domain.space.kind {
        SpaceKind::Euclidean { n } => n,
        _ => return invalid("assemble_euclidean needs a Euclidean domain"),
    };
    if !(h > 0.0) {
        return invalid("mesh spacing must be positive");
    }
    let mut spacing = [1.0; 3];
    for s in spacing.iter_mut().take(dim) {
        *s = h;
    }
    let lattice = padded_lattice(&domain.bounding_box, spacing);
    let a = assemble_lattice(&lattice, |p| domain.contains(p), &EuclideanFields { dim }, scale.factor())?;
    check_axis_counts(&a, dim, 3, "assemble_euclidean")?;
    let mut domain = domain.clone();
    domain.space.generator_scale = scale;
    let label = format!("euclidean{dim}:{}:h={h}", domain.label);
    let mut sp = [0.0; 3];
    sp[..dim].copy_from_slice(&spacing[..dim]);
    Ok(OperatorMesh {
        nodes: a.native,
        native: None,
        weights: a.weights,
        stiffness: a.stiffness,
        h,
        spacing: sp,
        domain,
        lattice: Some(a.lattice_idx),
        label,
    })
}

struct HeisenbergFields;

impl FieldEnergy for HeisenbergFields {
    fn field_count(&self) -> usize {
        2
    }
    fn field(&self, k: usize, p: &Point) -> [f64; 3] {
        if k == 0 {
            [1.0, 0.0, -0.5 * p[1]]
        } else {
            [0.0, 1.0, 0.5 * p[0]]
        }
    }
    fn density(&self, _p: &Point) -> f64 {
        1.0
    }
}

/// `−(X² + Y²)` with `X = ∂x − (y/2)∂z`, `Y = ∂y + (x/2)∂z`, spacing `h` on
/// every axis.
pub fn assemble_heisenberg(domain: &Domain, h: f64) -> Result<OperatorMesh> {
    assemble_heisenberg_spacing(domain, [h, h, h])
}

/// As [`assemble_heisenberg`] with separate spacings per axis; useful for
/// gauge balls, which are four times thinner in `z` than in `x` and `y`.
pub fn assemble_heisenberg_spacing(domain: &Domain, spacing: [f64; 3]) -> Result<OperatorMesh> {
    if domain.space.kind != SpaceKind::Heisenberg3 {
        return invalid("assemble_heisenberg needs a heisenberg3 domain");
    }
    if spacing.iter().any(|s| !(*s > 0.0)) {
        return invalid("mesh spacing must be positive");
    }
    let lattice = padded_lattice(&domain.bounding_box, spacing);
    let factor = domain.space.generator_scale.factor();
    let a = assemble_lattice(&lattice, |p| domain.contains(p), &HeisenbergFields, factor)?;
    check_axis_counts(&a, 3, 5, "assemble_heisenberg")?;
    Ok(OperatorMesh {
        nodes: a.native,
        native: None,
        weights: a.weights,
        stiffness: a.stiffness,
        h: spacing[0],
        spacing,
        domain: domain.clone(),
        lattice: Some(a.lattice_idx),
        label: format!("heisenberg:{}:h={:?}", domain.label, spacing),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_domain, GaugeKind, Shape, SpaceModel};

    fn interval(a: f64, b: f64, scale: GeneratorScale) -> Domain {
        make_domain(SpaceModel::euclidean(1, scale), Shape::Interval { a, b }).unwrap()
    }

    #[test]
    fn interval_stencil() {
        let m = assemble_euclidean(&interval(0.0, 1.0, GeneratorScale::DirichletForm), 0.25, GeneratorScale::DirichletForm).unwrap();
        assert_eq!(m.n(), 3);
        let d = m.dense_operator();
        assert!((d[(0, 0)] - 32.0).abs() < 1e-12);
        assert!((d[(0, 1)] + 16.0).abs() < 1e-12);
        assert_eq!(d[(0, 2)], 0.0);
        assert!((m.measure() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn too_few_nodes_rejected() {
        let r = assemble_euclidean(&interval(0.0, 1.0, GeneratorScale::DirichletForm), 0.5, GeneratorScale::DirichletForm);
        assert!(r.is_err());
    }

    #[test]
    fn heisenberg_linear_functions() {
        let d = make_domain(
            SpaceModel::heisenberg(GeneratorScale::DirichletForm),
            Shape::Cuboid { lo: vec![-1.0; 3], hi: vec![1.0; 3] },
        )
        .unwrap();
        let m = assemble_heisenberg(&d, 0.125).unwrap();
        // X² + Y² kills x, y and z; check at nodes away from the boundary
        for f in [|p: &Point| p[0], |p: &Point| p[2]] {
            let v: Vec<f64> = m.nodes.iter().map(f).collect();
            let mv = m.apply(&v);
            for (p, val) in m.nodes.iter().zip(&mv) {
                if p.iter().all(|c| c.abs() < 0.7) {
                    assert!(val.abs() < 1e-9, "{p:?} {val}");
                }
            }
        }
    }

    #[test]
    fn koranyi_ball_mesh() {
        let d = make_domain(
            SpaceModel::heisenberg(GeneratorScale::DirichletForm),
            Shape::Ball { gauge: GaugeKind::Koranyi, radius: 1.0, center: vec![0.0; 3] },
        )
        .unwrap();
        let m = assemble_heisenberg_spacing(&d, [0.25, 0.25, 1.0 / 16.0]).unwrap();
        assert!(m.n() > 50);
        assert!(m.stiffness.max_asymmetry() < 1e-10);
        let rep = m.sign_structure();
        assert!(rep.positive_offdiagonal > 0);
    }
}
