//! Operators on `(ρ, θ, z)` lattices: the rescaled SU(2) sub-Laplacian
//! `Lʳ` and its Heisenberg limit.
//!
//! ```text
//! Lʳ = ∂ρ² + 2r cot(2rρ) ∂ρ + A ∂θ² + B ∂z² + 2C ∂z∂θ
//! A = 2r² + r²cot²(rρ) + r²tan²(rρ),  B = tan²(rρ)/r²,  C = 1 + tan²(rρ)
//! ```
//!
//! With `w(ρ) = sin(2rρ)/(2r)` the radial part is `w⁻¹∂ρ(w∂ρ)`, and since
//! `AB = C²` the angular part is the square of `V = a∂θ + b∂z` with
//! `a = √A = 1/w` and `b = tan(rρ)/r`. The limit `r → 0` gives `w = ρ`,
//! `a = 1/ρ`, `b = ρ`, i.e.
//! `∂ρ² + ρ⁻¹∂ρ + ρ⁻²∂θ² + ρ²∂z² + 2∂z∂θ`.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{assemble_lattice, FieldEnergy, Lattice, OperatorMesh};
use crate::error::{invalid, Result};
use crate::space::{Domain, Point, SpaceKind};

/// The five printed coefficients of `Lʳ` at radius `ρ`:
/// `[1, 2r cot(2rρ), A, B, 2C]` for `∂ρ², ∂ρ, ∂θ², ∂z², ∂z∂θ`.
pub fn su2_coefficients(r: f64, rho: f64) -> [f64; 5] {
    let t = (r * rho).tan();
    let cot = 1.0 / t;
    [
        1.0,
        2.0 * r / (2.0 * r * rho).tan(),
        2.0 * r * r + r * r * cot * cot + r * r * t * t,
        t * t / (r * r),
        2.0 * (1.0 + t * t),
    ]
}

/// Coefficient model of a cylindrical operator: `Some(r)` for `Lʳ`, `None`
/// for the Heisenberg limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Coefficients {
    pub r: Option<f64>,
}

impl Su2Coefficients {
    pub fn weight(&self, rho: f64) -> f64 {
        match self.r {
            Some(r) => (2.0 * r * rho).sin() / (2.0 * r),
            None => rho,
        }
    }

    /// `(a, b)` with `V = a∂θ + b∂z`.
    pub fn angular(&self, rho: f64) -> (f64, f64) {
        match self.r {
            Some(r) => (2.0 * r / (2.0 * r * rho).sin(), (r * rho).tan() / r),
            None => (1.0 / rho, rho),
        }
    }
}

impl FieldEnergy for Su2Coefficients {
    fn field_count(&self) -> usize {
        2
    }
    fn field(&self, k: usize, p: &Point) -> [f64; 3] {
        if k == 0 {
            [1.0, 0.0, 0.0]
        } else {
            let (a, b) = self.angular(p[0]);
            [0.0, a, b]
        }
    }
    fn density(&self, p: &Point) -> f64 {
        if p[0] <= 0.0 {
            0.0
        } else {
            self.weight(p[0])
        }
    }
}

/// Lattice spacings of a cylindrical mesh; `n_theta` must be even.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalGrid {
    pub h_rho: f64,
    pub n_theta: usize,
    pub h_z: f64,
    /// Nodes with `ρ < rho_min` are excised.
    pub rho_min: f64,
}

impl CylindricalGrid {
    pub fn uniform(domain: &Domain, h: f64) -> Self {
        CylindricalGrid {
            h_rho: h,
            n_theta: default_theta_count(domain, h),
            h_z: h,
            rho_min: 2.0 * h,
        }
    }
}

fn rho_max(domain: &Domain) -> f64 {
    let b = &domain.bounding_box;
    let x = b[0].0.abs().max(b[0].1.abs());
    let y = b[1].0.abs().max(b[1].1.abs());
    (x * x + y * y).sqrt()
}

/// Smallest even count giving arc spacing at most `h` on the outer radius.
pub fn default_theta_count(domain: &Domain, h: f64) -> usize {
    let n = (2.0 * PI * rho_max(domain) / h).ceil() as usize;
    (n.max(8) + 1) / 2 * 2
}

/// Cylindrical assembly for a given coefficient model.
pub fn assemble_cylindrical(domain: &Domain, grid: CylindricalGrid, coeffs: Su2Coefficients) -> Result<OperatorMesh> {
    match domain.space.kind {
        SpaceKind::Heisenberg3 | SpaceKind::Su2Chart => {}
        _ => return invalid("cylindrical meshes need a three-dimensional group chart"),
    }
    if grid.n_theta < 4 || grid.n_theta % 2 != 0 {
        return invalid(format!("θ node count must be even and ≥ 4, got {}", grid.n_theta));
    }
    if !(grid.h_rho > 0.0 && grid.h_z > 0.0) {
        return invalid("mesh spacing must be positive");
    }
    let rmax = rho_max(domain);
    let (zlo, zhi) = domain.bounding_box[2];
    let lattice = Lattice {
        origin: [0.0, 0.0, zlo - grid.h_z],
        spacing: [grid.h_rho, 2.0 * PI / grid.n_theta as f64, grid.h_z],
        counts: [
            (rmax / grid.h_rho).ceil() as usize + 2,
            grid.n_theta,
            ((zhi - zlo) / grid.h_z - 1e-9).ceil() as usize + 3,
        ],
        periodic: [false, true, false],
    };
    let inside = |p: &Point| p[0] >= grid.rho_min && domain.contains(&to_cartesian(p));
    if let Some(r) = coeffs.r {
        if !(r > 0.0 && r <= 1.0) {
            return invalid(format!("contraction scale must lie in (0, 1], got {r}"));
        }
        // the stencil reaches one radial step beyond the interior
        let reach = (0..lattice.counts[0])
            .map(|i| i as f64 * grid.h_rho)
            .filter(|&rho| {
                (0..lattice.counts[2]).any(|k| {
                    let z = lattice.origin[2] + k as f64 * grid.h_z;
                    (0..grid.n_theta).any(|j| inside(&[rho, j as f64 * lattice.spacing[1], z]))
                })
            })
            .fold(0.0, f64::max)
            + grid.h_rho;
        if r * reach >= FRAC_PI_2 {
            return invalid(format!("rρ reaches {:.4} ≥ π/2 on the mesh", r * reach));
        }
    }
    let factor = domain.space.generator_scale.factor();
    let a = assemble_lattice(&lattice, inside, &coeffs, factor)?;
    let nodes = a.native.iter().map(to_cartesian).collect();
    let label = match coeffs.r {
        Some(r) => format!("su2_rescaled(r={r}):{}", domain.label),
        None => format!("heisenberg_cylindrical:{}", domain.label),
    };
    Ok(OperatorMesh {
        nodes,
        native: Some(a.native),
        weights: a.weights,
        stiffness: a.stiffness,
        h: grid.h_rho,
        spacing: lattice.spacing,
        domain: domain.clone(),
        lattice: Some(a.lattice_idx),
        label,
    })
}

/// `Lʳ` on `domain` with spacing `h` in `ρ` and `z` and the default θ count.
pub fn assemble_su2_rescaled(r: f64, domain: &Domain, h: f64) -> Result<OperatorMesh> {
    assemble_cylindrical(domain, CylindricalGrid::uniform(domain, h), Su2Coefficients { r: Some(r) })
}

/// The `r → 0` limit of `Lʳ`, on the same lattice as [`assemble_su2_rescaled`].
pub fn assemble_heisenberg_cylindrical(domain: &Domain, h: f64) -> Result<OperatorMesh> {
    assemble_cylindrical(domain, CylindricalGrid::uniform(domain, h), Su2Coefficients { r: None })
}

fn to_cartesian(p: &Point) -> Point {
    [p[0] * p[1].cos(), p[0] * p[1].sin(), p[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_coefficients() {
        let c = su2_coefficients(0.01, 1.0);
        assert!((c[1] - 0.999_866_663_110_975_7).abs() < 1e-12);
        assert!((c[3] - 1.000_066_670_444_641_3).abs() < 1e-12);
        let c = su2_coefficients(0.01, 2.0);
        assert!((c[3] - 4.001_066_908_494_842).abs() < 1e-11);
        // AB = C²
        for &(r, rho) in &[(0.3, 1.1), (0.9, 0.4), (0.05, 2.0)] {
            let c = su2_coefficients(r, rho);
            assert!((c[2] * c[3] - (c[4] / 2.0).powi(2)).abs() < 1e-10 * c[4].powi(2));
            let m = Su2Coefficients { r: Some(r) };
            let (a, b) = m.angular(rho);
            assert!((a * a - c[2]).abs() < 1e-10 * c[2]);
            assert!((b * b - c[3]).abs() < 1e-10 * c[3].max(1.0));
            assert!((2.0 * a * b - c[4]).abs() < 1e-10 * c[4]);
            let w = m.weight(rho);
            let dw = ((2.0 * r * (rho + 1e-6)).sin() - (2.0 * r * (rho - 1e-6)).sin()) / (2.0 * r * 2e-6);
            assert!((dw / w - c[1]).abs() < 1e-6);
        }
    }
}
