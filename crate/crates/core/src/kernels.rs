//! Closed-form heat kernels and two-sided heat-kernel bound families.

use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

use crate::error::{invalid, Result};
use crate::space::{GeneratorScale, Point};

/// Free heat kernel on `Rⁿ` for the chosen generator normalisation.
pub fn gaussian_heat_kernel(t: f64, p: &Point, q: &Point, n: usize, scale: GeneratorScale) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("heat kernel needs t > 0, got {t}"));
    }
    let d2: f64 = (0..n).map(|i| (p[i] - q[i]).powi(2)).sum();
    Ok(gaussian_kernel_d2(t, d2, n, scale))
}

/// Kernel as a function of squared distance; no argument checks.
#[inline]
pub fn gaussian_kernel_d2(t: f64, d2: f64, n: usize, scale: GeneratorScale) -> f64 {
    // variance rate s: density (2π s t)^{-n/2} exp(-d²/(2 s t))
    let s = scale.diffusion_variance();
    (2.0 * PI * s * t).powf(-(n as f64) / 2.0) * (-d2 / (2.0 * s * t)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelBound {
    /// `C₂ t^{-α/2} e^{-d²/(K₂t)} ≤ p ≤ C₁ t^{-α/2} e^{-d²/(K₁t)}`.
    GaussianAhlfors { c1: f64, c2: f64, k1: f64, k2: f64, alpha: f64 },
    /// `c₁ t^{-α/β} e^{-c₂(d^β/t)^{1/(β-1)}} ≤ p ≤ c₃ t^{-α/β} e^{-c₄(d^β/t)^{1/(β-1)}}`, `β ≥ 2`.
    SubGaussian { c1: f64, c2: f64, c3: f64, c4: f64, alpha: f64, beta: f64 },
    /// `t^{-α/β}(1 + c₁d/t^{1/β})^{-(α+β)} ≤ p ≤ t^{-α/β}(1 + c₂d/t^{1/β})^{-(α+β)}`, `β < 2`.
    PolynomialNonlocal { c1: f64, c2: f64, alpha: f64, beta: f64 },
    /// `c₁ t^{-ν/2} e^{-c₂t - c₂d²/t} ≤ p ≤ κ t^{-ν/2} e^{κt - c₃d²/t}`.
    LieGroup { kappa: f64, c1: f64, c2: f64, c3: f64, nu: f64 },
}

fn all_positive(xs: &[f64]) -> bool {
    xs.iter().all(|x| *x > 0.0 && x.is_finite())
}

impl KernelBound {
    /// Validates the constants, including the orderings that make the upper
    /// envelope dominate the lower one everywhere.
    pub fn new(bound: KernelBound) -> Result<Self> {
        match bound {
            KernelBound::GaussianAhlfors { c1, c2, k1, k2, alpha } => {
                if !all_positive(&[c1, c2, k1, k2, alpha]) {
                    return invalid("gaussian_ahlfors constants must be positive");
                }
                if c2 > c1 || k2 > k1 {
                    return invalid("gaussian_ahlfors needs C₂ ≤ C₁ and K₂ ≤ K₁");
                }
            }
            KernelBound::SubGaussian { c1, c2, c3, c4, alpha, beta } => {
                if !all_positive(&[c1, c2, c3, c4, alpha, beta]) {
                    return invalid("sub_gaussian constants must be positive");
                }
                if beta < 2.0 {
                    return invalid(format!("sub_gaussian needs β ≥ 2, got {beta}"));
                }
                if c1 > c3 || c4 > c2 {
                    return invalid("sub_gaussian needs c₁ ≤ c₃ and c₄ ≤ c₂");
                }
            }
            KernelBound::PolynomialNonlocal { c1, c2, alpha, beta } => {
                if !all_positive(&[c1, c2, alpha, beta]) {
                    return invalid("polynomial_nonlocal constants must be positive");
                }
                if beta >= 2.0 {
                    return invalid(format!("polynomial_nonlocal needs β < 2, got {beta}"));
                }
                if c2 > c1 {
                    return invalid("polynomial_nonlocal needs c₂ ≤ c₁");
                }
            }
            KernelBound::LieGroup { kappa, c1, c2, c3, nu } => {
                if !all_positive(&[kappa, c1, c2, c3, nu]) {
                    return invalid("lie_group constants must be positive");
                }
                if c1 > kappa || c3 > c2 {
                    return invalid("lie_group needs c₁ ≤ κ and c₃ ≤ c₂");
                }
            }
        }
        Ok(bound)
    }

    pub fn exact_gaussian(n: usize, scale: GeneratorScale) -> Self {
        let s = scale.diffusion_variance();
        let c = (2.0 * PI * s).powf(-(n as f64) / 2.0);
        KernelBound::GaussianAhlfors {
            c1: c,
            c2: c,
            k1: 2.0 * s,
            k2: 2.0 * s,
            alpha: n as f64,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            KernelBound::GaussianAhlfors { .. } => "gaussian_ahlfors",
            KernelBound::SubGaussian { .. } => "sub_gaussian",
            KernelBound::PolynomialNonlocal { .. } => "polynomial_nonlocal",
            KernelBound::LieGroup { .. } => "lie_group",
        }
    }

    /// `(lower, upper)` evaluated exactly as the family is written.
    pub fn envelope(&self, t: f64, d: f64) -> Result<(f64, f64)> {
        if !(t > 0.0) || !(d >= 0.0) {
            return invalid(format!("envelope needs t > 0 and d ≥ 0, got t={t}, d={d}"));
        }
        Ok(match *self {
            KernelBound::GaussianAhlfors { c1, c2, k1, k2, alpha } => {
                let p = t.powf(-alpha / 2.0);
                (c2 * p * (-d * d / (k2 * t)).exp(), c1 * p * (-d * d / (k1 * t)).exp())
            }
            KernelBound::SubGaussian { c1, c2, c3, c4, alpha, beta } => {
                let p = t.powf(-alpha / beta);
                let x = (d.powf(beta) / t).powf(1.0 / (beta - 1.0));
                (c1 * p * (-c2 * x).exp(), c3 * p * (-c4 * x).exp())
            }
            KernelBound::PolynomialNonlocal { c1, c2, alpha, beta } => {
                let p = t.powf(-alpha / beta);
                let u = d / t.powf(1.0 / beta);
                (
                    p * (1.0 + c1 * u).powf(-(alpha + beta)),
                    p * (1.0 + c2 * u).powf(-(alpha + beta)),
                )
            }
            KernelBound::LieGroup { kappa, c1, c2, c3, nu } => {
                let p = t.powf(-nu / 2.0);
                (
                    c1 * p * (-c2 * t - c2 * d * d / t).exp(),
                    kappa * p * (kappa * t - c3 * d * d / t).exp(),
                )
            }
        })
    }

    /// `M(t)`, the on-diagonal upper envelope.
    pub fn sup_kernel(&self, t: f64) -> Result<f64> {
        Ok(self.envelope(t, 0.0)?.1)
    }

    /// `(C, γ)` with `M(t) = C t^{-γ}`, or `None` for the Lie-group family.
    pub fn power_law(&self) -> Option<(f64, f64)> {
        match *self {
            KernelBound::GaussianAhlfors { c1, alpha, .. } => Some((c1, alpha / 2.0)),
            KernelBound::SubGaussian { c3, alpha, beta, .. } => Some((c3, alpha / beta)),
            KernelBound::PolynomialNonlocal { alpha, beta, .. } => Some((1.0, alpha / beta)),
            KernelBound::LieGroup { .. } => None,
        }
    }

    /// `C(λ) = inf_{t>0} M(t) e^{λt}` together with the minimiser.
    pub fn lambda_envelope_constant(&self, lambda: f64) -> Result<(f64, f64)> {
        if !(lambda > 0.0) {
            return invalid(format!("C(λ) needs λ > 0, got {lambda}"));
        }
        match *self {
            KernelBound::LieGroup { kappa, nu, .. } => {
                let t_star = (nu / 2.0) / (kappa + lambda);
                let c = kappa * (2.0 * E * (kappa + lambda) / nu).powf(nu / 2.0);
                Ok((c, t_star))
            }
            _ => {
                let (c, gamma) = self.power_law().expect("power-law family");
                Ok((power_law_lambda_constant(c, gamma, lambda), gamma / lambda))
            }
        }
    }

    /// `C(λ)` by golden-section search on `log M(t) + λt` over `log t`,
    /// which is convex for every family; a check on the closed forms.
    pub fn lambda_envelope_constant_search(&self, lambda: f64) -> Result<(f64, f64)> {
        if !(lambda > 0.0) {
            return invalid(format!("C(λ) needs λ > 0, got {lambda}"));
        }
        let g = |s: f64| -> f64 {
            let t = s.exp();
            self.sup_kernel(t).map(|m| m.ln() + lambda * t).unwrap_or(f64::INFINITY)
        };
        let (mut a, mut b) = (-40.0f64, (1e3 / lambda).ln() + 5.0);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut gc, mut gd) = (g(c), g(d));
        for _ in 0..300 {
            if gc < gd {
                b = d;
                d = c;
                gd = gc;
                c = b - phi * (b - a);
                gc = g(c);
            } else {
                a = c;
                c = d;
                gc = gd;
                d = a + phi * (b - a);
                gd = g(d);
            }
        }
        let s = 0.5 * (a + b);
        Ok((g(s).exp(), s.exp()))
    }

    /// Searches for `t` with `M(t) < 1/volume²`.
    pub fn spectral_gap_condition(&self, volume: f64) -> Result<(bool, Option<f64>)> {
        if !(volume > 0.0) {
            return invalid("volume must be positive");
        }
        let target = 1.0 / (volume * volume);
        match *self {
            KernelBound::LieGroup { kappa, nu, .. } => {
                // t^{ν/2} e^{-κt} is largest at t = ν/(2κ)
                let t = nu / (2.0 * kappa);
                let ok = self.sup_kernel(t)? < target;
                Ok((ok, ok.then_some(t)))
            }
            _ => {
                let (c, gamma) = self.power_law().expect("power-law family");
                // smallest t with C t^{-γ} = target, then doubled for strictness
                let t = 2.0 * (c / target).powf(1.0 / gamma);
                debug_assert!(self.sup_kernel(t)? < target);
                Ok((true, Some(t)))
            }
        }
    }

    /// Time window on which the comparison function of the irreducibility
    /// argument increases, plus whether the boundary-distance condition holds.
    pub fn irreducibility_window(&self, d_xy: f64, d_boundary: f64) -> Result<IrreducibilityWindow> {
        if !(d_xy > 0.0) || !(d_boundary > 0.0) {
            return invalid("irreducibility window needs positive distances");
        }
        let w = match *self {
            KernelBound::GaussianAhlfors { k1, k2, alpha, .. } => {
                // sub-Gaussian shape with β = 2
                let (nu, mu) = (alpha / 2.0, 1.0);
                let a = d_xy * d_xy / k2;
                let b = d_boundary * d_boundary / k1;
                IrreducibilityWindow::power(ComparisonKind::Exponential, nu, mu, a, b)
            }
            KernelBound::SubGaussian { c2, c4, alpha, beta, .. } => {
                let (nu, mu) = (alpha / beta, 1.0 / (beta - 1.0));
                let e = beta / (beta - 1.0);
                let a = c2 * d_xy.powf(e);
                let b = c4 * d_boundary.powf(e);
                IrreducibilityWindow::power(ComparisonKind::Exponential, nu, mu, a, b)
            }
            KernelBound::PolynomialNonlocal { c1, c2, alpha, beta } => {
                let (nu, mu) = (1.0 / (alpha + beta), 1.0 / beta);
                let a = c1 * d_xy;
                let b = c2 * d_boundary;
                IrreducibilityWindow::power(ComparisonKind::Rational, nu, mu, a, b)
            }
            KernelBound::LieGroup { kappa, c2, c3, nu, .. } => {
                let a = c2;
                let b = c2 * d_xy * d_xy;
                let d = c3 * d_boundary * d_boundary;
                let t0 = ((nu * nu + 16.0 * a * b).sqrt() - nu) / (4.0 * a);
                IrreducibilityWindow {
                    kind: ComparisonKind::LieGroup,
                    t0,
                    r_condition: d > b,
                    nu,
                    mu: 1.0,
                    a,
                    b,
                    d,
                    kappa,
                }
            }
        };
        Ok(w)
    }
}

pub fn power_law_lambda_constant(c: f64, gamma: f64, lambda: f64) -> f64 {
    c * (E * lambda / gamma).powf(gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    Exponential,
    Rational,
    LieGroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityWindow {
    pub kind: ComparisonKind,
    pub t0: f64,
    pub r_condition: bool,
    pub nu: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    /// Boundary term of the Lie-group comparison; unused otherwise.
    pub d: f64,
    pub kappa: f64,
}

impl IrreducibilityWindow {
    fn power(kind: ComparisonKind, nu: f64, mu: f64, a: f64, b: f64) -> Self {
        let t0 = match kind {
            ComparisonKind::Exponential => (a * mu / nu).powf(1.0 / mu),
            ComparisonKind::Rational => (a * nu / (mu - nu)).powf(1.0 / mu),
            ComparisonKind::LieGroup => unreachable!(),
        };
        IrreducibilityWindow {
            kind,
            t0,
            r_condition: b > a,
            nu,
            mu,
            a,
            b,
            d: 0.0,
            kappa: 0.0,
        }
    }

    /// The comparison function `F(t)` for a fixed small time `s`.
    pub fn comparison(&self, t: f64, s: f64) -> f64 {
        let (nu, mu, a, b) = (self.nu, self.mu, self.a, self.b);
        match self.kind {
            ComparisonKind::Exponential => (s / t).powf(nu) * (-a / t.powf(mu) + b / s.powf(mu)).exp(),
            ComparisonKind::Rational => (t / s).powf(nu) * (s.powf(mu) + b) / (t.powf(mu) + a),
            ComparisonKind::LieGroup => {
                (s / t).powf(nu / 2.0) * (-a * t - b / t + self.d / s - self.kappa * s).exp()
            }
        }
    }
}

/// `(1/√κ)(ν/(2κe))^{ν/4}`: volumes below this admit a spectral gap under a
/// Lie-group bound.
pub fn good_set_threshold(kappa: f64, nu: f64) -> Result<f64> {
    if !(kappa > 0.0) || !(nu >= 1.0) {
        return invalid("good-set threshold needs κ > 0 and ν ≥ 1");
    }
    Ok(kappa.powf(-0.5) * (nu / (2.0 * kappa * E)).powf(nu / 4.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub center: f64,
    pub radius: f64,
}

/// Interval for `κ(g)` obtained from two-sided sub-Gaussian bounds.
pub fn kappa_estimate(j_g: f64, alpha: f64, beta: f64, c1: f64, c3: f64) -> Result<KappaEstimate> {
    if !(j_g > 0.0) || j_g == 1.0 {
        return invalid(format!("κ estimate needs J_g > 0 and J_g ≠ 1, got {j_g}"));
    }
    if !(c1 > 0.0) || c3 < c1 {
        return invalid("κ estimate needs c₃ ≥ c₁ > 0");
    }
    let ratio = beta / alpha;
    Ok(KappaEstimate {
        center: 1.0 - ratio,
        radius: ratio * (c3 / c1).ln() / j_g.ln().abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn gaussian_normalisation() {
        let o = [0.0; 3];
        let p = gaussian_heat_kernel(1.0, &o, &o, 1, GeneratorScale::Probabilist).unwrap();
        assert!((p - 0.398_942_280_401_432_7).abs() < 1e-15);
        let p = gaussian_heat_kernel(1.0, &o, &o, 1, GeneratorScale::DirichletForm).unwrap();
        assert!((p - 0.282_094_791_773_878_14).abs() < 1e-15);
        assert!(gaussian_heat_kernel(0.0, &o, &o, 1, GeneratorScale::Probabilist).is_err());
        // Riemann sum over a wide grid
        let h = 1e-3;
        let s: f64 = (-20_000..=20_000)
            .map(|i| gaussian_kernel_d2(0.7, (i as f64 * h).powi(2), 1, GeneratorScale::DirichletForm) * h)
            .sum();
        assert!((s - 1.0).abs() < 1e-6);
    }

    #[test]
    fn search_matches_closed_forms() {
        let fams = [
            KernelBound::exact_gaussian(1, GeneratorScale::Probabilist),
            KernelBound::SubGaussian { c1: 0.5, c2: 2.0, c3: 1.5, c4: 1.0, alpha: 1.585, beta: 2.3219 },
            KernelBound::PolynomialNonlocal { c1: 2.0, c2: 1.0, alpha: 1.0, beta: 1.5 },
            KernelBound::LieGroup { kappa: 2.0, c1: 1.0, c2: 1.0, c3: 0.5, nu: 3.0 },
        ];
        for b in fams {
            for lambda in [0.3, 2.0, 40.0] {
                let (c, t) = b.lambda_envelope_constant(lambda).unwrap();
                let (cs, ts) = b.lambda_envelope_constant_search(lambda).unwrap();
                assert!(close(cs, c, 1e-10) && close(ts, t, 1e-5), "{b:?} {lambda}");
            }
        }
    }

    #[test]
    fn envelope_examples() {
        let sg = KernelBound::new(KernelBound::SubGaussian { c1: 1.0, c2: 1.0, c3: 1.0, c4: 1.0, alpha: 2.0, beta: 2.0 }).unwrap();
        assert_eq!(sg.envelope(1.0, 0.0).unwrap(), (1.0, 1.0));
        let pn = KernelBound::new(KernelBound::PolynomialNonlocal { c1: 1.0, c2: 1.0, alpha: 1.0, beta: 0.5 }).unwrap();
        assert!(close(pn.envelope(1.0, 1.0).unwrap().1, 2f64.powf(-1.5), 1e-14));
        let lg = KernelBound::new(KernelBound::LieGroup { kappa: 1.0, c1: 1.0, c2: 1.0, c3: 1.0, nu: 3.0 }).unwrap();
        assert!(close(lg.envelope(1.0, 0.0).unwrap().1, E, 1e-15));
    }

    #[test]
    fn construction_rejects_bad_beta() {
        assert!(KernelBound::new(KernelBound::SubGaussian { c1: 1.0, c2: 1.0, c3: 1.0, c4: 1.0, alpha: 2.0, beta: 1.5 }).is_err());
        assert!(KernelBound::new(KernelBound::PolynomialNonlocal { c1: 1.0, c2: 1.0, alpha: 1.0, beta: 2.0 }).is_err());
    }

    #[test]
    fn sup_kernel_examples() {
        let g = KernelBound::new(KernelBound::GaussianAhlfors { c1: 1.0, c2: 1.0, k1: 1.0, k2: 1.0, alpha: 2.0 }).unwrap();
        assert!(close(g.sup_kernel(4.0).unwrap(), 0.25, 1e-15));
        let lg = KernelBound::new(KernelBound::LieGroup { kappa: 1.0, c1: 1.0, c2: 1.0, c3: 1.0, nu: 4.0 }).unwrap();
        assert!(close(lg.sup_kernel(1.0).unwrap(), E, 1e-15));
        let sg = KernelBound::new(KernelBound::SubGaussian { c1: 1.0, c2: 1.0, c3: 2.0, c4: 1.0, alpha: 3.0, beta: 3.0 }).unwrap();
        assert!(close(sg.sup_kernel(8.0).unwrap(), 0.25, 1e-15));
    }

    #[test]
    fn lambda_constants() {
        assert!(close(power_law_lambda_constant(1.0, 0.5, 1.0), (2.0 * E).sqrt(), 1e-14));
        assert!(close(power_law_lambda_constant(1.0, 0.5, 1.0), 2.331_643_981_597_124, 1e-12));
        let lg = KernelBound::new(KernelBound::LieGroup { kappa: 1.0, c1: 1.0, c2: 1.0, c3: 1.0, nu: 2.0 }).unwrap();
        let (c, t) = lg.lambda_envelope_constant(1.0).unwrap();
        assert!(close(c, 2.0 * E, 1e-14));
        assert!(close(t, 0.5, 1e-15));
        assert!(lg.lambda_envelope_constant(0.0).is_err());
    }

    #[test]
    fn good_set_examples() {
        assert!(close(good_set_threshold(1.0, 4.0).unwrap(), 2.0 / E, 1e-14));
        assert!(close(good_set_threshold(1.0, 2.0).unwrap(), 0.606_530_659_712_633_4, 1e-14));
        assert!(close(good_set_threshold(4.0, 4.0).unwrap(), 1.0 / (4.0 * E), 1e-14));
    }

    #[test]
    fn gap_condition_examples() {
        let g = KernelBound::new(KernelBound::GaussianAhlfors { c1: 1.0, c2: 1.0, k1: 1.0, k2: 1.0, alpha: 2.0 }).unwrap();
        let (ok, w) = g.spectral_gap_condition(10.0).unwrap();
        assert!(ok && g.sup_kernel(w.unwrap()).unwrap() < 1e-2);
        assert!(g.sup_kernel(1000.0).unwrap() < 1e-2);
        let lg = KernelBound::new(KernelBound::LieGroup { kappa: 1.0, c1: 1.0, c2: 1.0, c3: 1.0, nu: 4.0 }).unwrap();
        assert_eq!(lg.spectral_gap_condition(0.5).unwrap(), (true, Some(2.0)));
        assert_eq!(lg.spectral_gap_condition(1.0).unwrap(), (false, None));
    }

    #[test]
    fn window_examples() {
        // a = c₂ d^{β/(β-1)} = 1 with c₂ = d = 1
        let sg = KernelBound::new(KernelBound::SubGaussian { c1: 1.0, c2: 1.0, c3: 1.0, c4: 1.0, alpha: 2.0, beta: 2.0 }).unwrap();
        let w = sg.irreducibility_window(1.0, 2.0).unwrap();
        assert!(close(w.t0, 1.0, 1e-15) && w.r_condition);
        let pn = KernelBound::new(KernelBound::PolynomialNonlocal { c1: 1.0, c2: 1.0, alpha: 1.0, beta: 0.5 }).unwrap();
        let w = pn.irreducibility_window(1.0, 2.0).unwrap();
        assert!(close(w.t0, 0.5f64.sqrt(), 1e-14));
        let s = 1e-3;
        let slope = |t: f64| (w.comparison(t * (1.0 + 1e-6), s) - w.comparison(t * (1.0 - 1e-6), s)) / (2e-6 * t);
        assert!(slope(0.9 * w.t0) > 0.0 && slope(1.1 * w.t0) < 0.0);
        let lg = KernelBound::new(KernelBound::LieGroup { kappa: 1.0, c1: 1.0, c2: 1.0, c3: 1.0, nu: 3.0 }).unwrap();
        let w = lg.irreducibility_window(1.0, 0.5).unwrap();
        assert!(close(w.t0, 0.5, 1e-15));
        assert!(!w.r_condition);
        let s = 1e-2;
        let h = 1e-6;
        let dlog = (w.comparison(w.t0 + h, s).ln() - w.comparison(w.t0 - h, s).ln()) / (2.0 * h);
        assert!(dlog.abs() < 1e-6);
    }

    #[test]
    fn kappa_examples() {
        let k = kappa_estimate(8.0, 3.0, 2.0, 1.0, 1.0).unwrap();
        assert!(close(k.center, 1.0 / 3.0, 1e-15) && k.radius == 0.0);
        let k = kappa_estimate(E * E, 2.0, 2.0, 1.0, E).unwrap();
        assert!(k.center.abs() < 1e-15 && close(k.radius, 0.5, 1e-15));
        let k3 = kappa_estimate(E.powi(6), 2.0, 2.0, 1.0, E).unwrap();
        assert!(close(k3.radius, k.radius / 3.0, 1e-14));
        assert!(kappa_estimate(1.0, 2.0, 2.0, 1.0, 2.0).is_err());
    }
}
