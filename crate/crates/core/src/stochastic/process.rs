//! Diffusions and their one-step updates.

use nalgebra::{Complex, Matrix2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::space::{euclidean_norm, heisenberg_inv, heisenberg_mul, koranyi, GeneratorScale, Point, SpaceKind, SpaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum Process {
    EuclideanBm { dim: usize, scale: GeneratorScale },
    /// Driven by `X = ∂x − (y/2)∂z`, `Y = ∂y + (x/2)∂z`.
    HeisenbergBm { scale: GeneratorScale },
    /// `G⁻¹dG = X∘dW¹ + Y∘dW²` on SU(2) in a Milnor basis.
    Su2Sde { scale: GeneratorScale },
}

impl Process {
    pub fn for_space(space: &SpaceModel) -> Result<Self> {
        let scale = space.generator_scale;
        match space.kind {
            SpaceKind::Euclidean { n } if n <= 3 => Ok(Process::EuclideanBm { dim: n, scale }),
            SpaceKind::Euclidean { n } => invalid(format!("paths are simulated in at most 3 dimensions, got {n}")),
            SpaceKind::Heisenberg3 => Ok(Process::HeisenbergBm { scale }),
            SpaceKind::Su2Chart => Ok(Process::Su2Sde { scale }),
            SpaceKind::Gasket { .. } => invalid("the gasket is treated spectrally only"),
        }
    }

    pub fn scale(&self) -> GeneratorScale {
        match *self {
            Process::EuclideanBm { scale, .. } | Process::HeisenbergBm { scale } | Process::Su2Sde { scale } => scale,
        }
    }

    /// Standard deviation of a unit-time driving increment.
    pub fn sigma(&self) -> f64 {
        self.scale().diffusion_variance().sqrt()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Process::EuclideanBm { .. } => "euclidean_bm",
            Process::HeisenbergBm { .. } => "heisenberg_bm",
            Process::Su2Sde { .. } => "su2_sde",
        }
    }

    /// Gauge distance from `a` to `b` in chart coordinates: Euclidean norm,
    /// or the Korányi gauge of the group difference.
    pub fn gauge_distance(&self, a: &Point, b: &Point) -> f64 {
        match self {
            Process::EuclideanBm { .. } => euclidean_norm(&[b[0] - a[0], b[1] - a[1], b[2] - a[2]]),
            _ => koranyi(&heisenberg_mul(&heisenberg_inv(a), b)),
        }
    }
}

/// Unit quaternion `a + b·i + c·j + d·k` standing for `aI + 2bX + 2cY + 2dZ`
/// with the Milnor basis realised as `X = −(i/2)σ₁`, `Y = −(i/2)σ₂`,
/// `Z = −(i/2)σ₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2(pub [f64; 4]);

impl Su2 {
    pub const IDENTITY: Su2 = Su2([1.0, 0.0, 0.0, 0.0]);

    pub fn mul(&self, o: &Su2) -> Su2 {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Su2([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    pub fn inverse(&self) -> Su2 {
        let [a, b, c, d] = self.0;
        Su2([a, -b, -c, -d])
    }

    /// `exp(uX + vY + wZ)`.
    pub fn exp(u: f64, v: f64, w: f64) -> Su2 {
        let n = 0.5 * (u * u + v * v + w * w).sqrt();
        let s = if n > 1e-300 { n.sin() / n * 0.5 } else { 0.5 };
        Su2([n.cos(), s * u, s * v, s * w])
    }

    /// The chart point `(r cos θ, r sin θ, z)` of `g(r, θ, z) = e^{r cos θ X + r sin θ Y} e^{zZ}`.
    pub fn from_chart(p: &Point) -> Su2 {
        Su2::exp(p[0], p[1], 0.0).mul(&Su2::exp(0.0, 0.0, p[2]))
    }

    /// Inverse of [`Su2::from_chart`]; `None` where the chart degenerates
    /// (`r = π`, where `z` is undefined).
    pub fn to_chart(&self) -> Option<Point> {
        let [a, b, c, d] = self.0;
        let ad = (a * a + d * d).sqrt();
        if ad < 1e-9 {
            return None;
        }
        let r = 2.0 * (b * b + c * c).sqrt().atan2(ad);
        let z = 2.0 * d.atan2(a);
        let theta = c.atan2(b) + 0.5 * z;
        Some([r * theta.cos(), r * theta.sin(), z])
    }

    pub fn matrix(&self) -> Matrix2<Complex<f64>> {
        let [a, b, c, d] = self.0;
        Matrix2::new(Complex::new(a, -d), Complex::new(-c, -b), Complex::new(c, -b), Complex::new(a, d))
    }

    /// `(|det G − 1|, ‖G*G − I‖_F)` from the matrix form.
    pub fn group_defects(&self) -> (f64, f64) {
        let m = self.matrix();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let g = m.adjoint() * m - Matrix2::identity();
        ((det - Complex::new(1.0, 0.0)).norm(), g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }
}

/// Position of a path: a chart point, or a group element for SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum State {
    Flat(Point),
    Group(Su2),
}

impl State {
    pub fn start(process: &Process, p: &Point) -> State {
        match process {
            Process::Su2Sde { .. } => State::Group(Su2::from_chart(p)),
            _ => State::Flat(*p),
        }
    }

    pub fn chart(&self) -> Option<Point> {
        match self {
            State::Flat(p) => Some(*p),
            State::Group(g) => g.to_chart(),
        }
    }
}

/// Advances `state` by `dt`; Heisenberg paths use `substeps` pieces for
/// the Lévy area.
#[inline]
pub(crate) fn step<R: Rng + ?Sized>(process: &Process, state: &mut State, dt: f64, substeps: usize, rng: &mut R) {
    let sigma = process.sigma();
    match (process, state) {
        (Process::EuclideanBm { dim, .. }, State::Flat(p)) => {
            let s = sigma * dt.sqrt();
            for x in p.iter_mut().take(*dim) {
                *x += s * rng.sample::<f64, _>(StandardNormal);
            }
        }
        (Process::HeisenbergBm { .. }, State::Flat(p)) => {
            let m = substeps.max(1);
            let s = sigma * (dt / m as f64).sqrt();
            for _ in 0..m {
                let dw1 = s * rng.sample::<f64, _>(StandardNormal);
                let dw2 = s * rng.sample::<f64, _>(StandardNormal);
                p[2] += 0.5 * (p[0] * dw2 - p[1] * dw1);
                p[0] += dw1;
                p[1] += dw2;
            }
        }
        (Process::Su2Sde { .. }, State::Group(g)) => {
            let s = sigma * dt.sqrt();
            let u = s * rng.sample::<f64, _>(StandardNormal);
            let v = s * rng.sample::<f64, _>(StandardNormal);
            *g = g.mul(&Su2::exp(u, v, 0.0));
        }
        _ => unreachable!("state does not match process"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn milnor_relations() {
        // 2X = i, 2Y = j, 2Z = k
        let x = Su2([0.0, 0.5, 0.0, 0.0]);
        let y = Su2([0.0, 0.0, 0.5, 0.0]);
        let xy = x.mul(&y);
        // XY = Z/2
        assert_eq!(xy.0, [0.0, 0.0, 0.0, 0.25]);
        let xx = x.mul(&x);
        assert_eq!(xx.0, [-0.25, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn chart_round_trip() {
        for p in [[0.3, -0.2, 0.1], [1.0, 2.0, -1.5], [-2.5, 0.4, 2.9], [0.0, 0.0, 0.7]] {
            let g = Su2::from_chart(&p);
            let q = g.to_chart().unwrap();
            for k in 0..3 {
                assert!((p[k] - q[k]).abs() < 1e-12, "{p:?} {q:?}");
            }
        }
        // the printed product formula
        let (r, th, z) = (0.9f64, 0.4f64, -0.6f64);
        let g = Su2::from_chart(&[r * th.cos(), r * th.sin(), z]);
        let expect = [
            (r / 2.0).cos() * (z / 2.0).cos(),
            (r / 2.0).sin() * (th - z / 2.0).cos(),
            (r / 2.0).sin() * (th - z / 2.0).sin(),
            (r / 2.0).cos() * (z / 2.0).sin(),
        ];
        for k in 0..4 {
            assert!((g.0[k] - expect[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn matrix_is_special_unitary() {
        let g = Su2::from_chart(&[0.7, -1.1, 0.3]);
        let (det, unit) = g.group_defects();
        assert!(det < 1e-14 && unit < 1e-14);
    }
}
