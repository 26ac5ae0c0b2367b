//! The perturbed profile curve `γ_ε(t) = (g sin t, g(π) + g cos t)` with
//! `g = 1 + ε h`, its distance-to-origin map and that map's inverse.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::certification_grid;
use crate::perturbation::PerturbationSpec;

/// Half-width of the neighbourhood of `t = π` where the derivative quotient
/// of `|γ|` is replaced by interpolation towards its limit `-g(π)`.
pub const PI_CUTOFF: f64 = 1e-6;

/// Default absolute root-finding tolerance on `t` for [`RadiusMap`].
pub const DEFAULT_INVERT_TOLERANCE: f64 = 1e-12;

/// Strict inequalities count as satisfied only above this floor.
pub const MARGIN_FLOOR: f64 = 1e-10;

// Below this |sin t|, g'/sin t is replaced by its l'Hôpital form g''/cos t.
const RATIO_SWITCH: f64 = 1e-7;

/// `Γ_ε` for a fixed perturbation and perturbation size.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileCurve {
    h: PerturbationSpec,
    epsilon: f64,
    g_zero: f64,
    g_pi: f64,
}

impl ProfileCurve {
    /// Builds the curve after validating `h` and checking `g_ε > 0` on the
    /// default certification grid.
    pub fn new(h: PerturbationSpec, epsilon: f64) -> Result<Self> {
        h.validate()?;
        if !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be finite, got {epsilon}")));
        }
        let curve = Self::new_unchecked(h, epsilon);
        let grid = certification_grid(crate::grid::DEFAULT_GRID_SIZE);
        if let Some(&t) = grid.iter().find(|&&t| curve.g(t, 0) <= 0.0) {
            return Err(Error::EpsilonInadmissible {
                epsilon,
                failed: format!("positivity_g at t = {t}"),
            });
        }
        Ok(curve)
    }

    /// No validation; used by the admissibility checks, which must be able
    /// to describe curves that fail.
    pub(crate) fn new_unchecked(h: PerturbationSpec, epsilon: f64) -> Self {
        let g_zero = 1.0 + epsilon * h.value(0.0);
        let g_pi = 1.0 + epsilon * h.value(PI);
        ProfileCurve { h, epsilon, g_zero, g_pi }
    }

    pub fn h(&self) -> &PerturbationSpec {
        &self.h
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn g_zero(&self) -> f64 {
        self.g_zero
    }

    pub fn g_pi(&self) -> f64 {
        self.g_pi
    }

    /// `R_ε = g(0) + g(π)`, the largest distance from the origin.
    pub fn max_radius(&self) -> f64 {
        self.g_zero + self.g_pi
    }

    /// `[g, g', g'', g''', g'''']` at `t`.
    pub fn g_derivatives(&self, t: f64) -> [f64; 5] {
        let mut d = self.h.derivatives(t);
        d.iter_mut().for_each(|x| *x *= self.epsilon);
        d[0] += 1.0;
        d
    }

    /// `d^order g / dt^order` at `t`, `order <= 4`.
    pub fn g(&self, t: f64, order: usize) -> f64 {
        assert!(order <= 4, "derivative order {order} exceeds 4");
        self.g_derivatives(t)[order]
    }

    pub fn gamma(&self, t: f64) -> [f64; 2] {
        let g = self.g(t, 0);
        [g * t.sin(), self.g_pi + g * t.cos()]
    }

    /// `|γ(t)|`, evaluated as `sqrt((g - g(π))² + 4 g g(π) cos²(t/2))`.
    pub fn gamma_norm(&self, t: f64) -> f64 {
        let g = self.g(t, 0);
        let diff = self.epsilon * (self.h.value(t) - self.h.value(PI));
        // cos(t/2), written to vanish exactly at t = π
        let c = (0.5 * (PI - t)).sin();
        (diff * diff + 4.0 * g * self.g_pi * c * c).sqrt()
    }

    // Unguarded quotient form of d|γ|/dt.
    fn gamma_norm_quotient(&self, t: f64) -> f64 {
        let [g, g1, ..] = self.g_derivatives(t);
        let num = g1 * (g + self.g_pi * t.cos()) - self.g_pi * g * t.sin();
        num / self.gamma_norm(t)
    }

    /// `d|γ|/dt` on `[0, π]`; the one-sided limit `-g(π)` at `t = π`.
    ///
    /// Inside `π - PI_CUTOFF < t <= π` the quotient is 0/0 to working
    /// precision, so the value is interpolated linearly between the quotient
    /// at the cutoff and the limit.
    pub fn gamma_norm_prime(&self, t: f64) -> f64 {
        let edge = PI - PI_CUTOFF;
        if t <= edge {
            return self.gamma_norm_quotient(t);
        }
        let w = ((t.min(PI) - edge) / PI_CUTOFF).clamp(0.0, 1.0);
        (1.0 - w) * self.gamma_norm_quotient(edge) + w * (-self.g_pi)
    }

    /// Curvature of `Γ_ε` at `γ(t)`: `(2g'² - g g'' + g²) / (g'² + g²)^{3/2}`.
    pub fn plane_curvature(&self, t: f64) -> f64 {
        let [g, g1, g2, ..] = self.g_derivatives(t);
        (2.0 * g1 * g1 - g * g2 + g * g) / (g1 * g1 + g * g).powf(1.5)
    }

    /// `g'(t) / sin t` with its continuous extension at the poles
    /// (`g''(0)` at `t = 0`, `-g''(π)` at `t = π`).
    pub fn slope_over_sin(&self, t: f64) -> f64 {
        let s = t.sin();
        if s.abs() < RATIO_SWITCH {
            let d = self.g_derivatives(t);
            d[2] / t.cos()
        } else {
            self.g(t, 1) / s
        }
    }

    /// Left-hand side of the sign condition at `t = 0`:
    /// `g(0) g''(0) + g(π) g''(0) - g(0) g(π)`; must be negative.
    pub fn sign_at_zero(&self) -> f64 {
        let g2 = self.g(0.0, 2);
        self.g_zero * g2 + self.g_pi * g2 - self.g_zero * self.g_pi
    }

    /// `-(d|γ|/dt) / sin(t/2)`, positive exactly when `|γ|` is decreasing.
    ///
    /// The weight removes the simple zero of the derivative at `t = 0`
    /// while staying finite at `t = π`.
    pub fn monotone_margin(&self, t: f64) -> f64 {
        let half = 0.5 * t;
        if t >= 0.5 * PI {
            return -self.gamma_norm_prime(t) / half.sin();
        }
        if t <= 0.0 {
            return -2.0 * self.sign_at_zero() / self.max_radius();
        }
        // N / sin(t/2) = 2 cos(t/2) [ (g'/sin t)(g + g(π) cos t) - g(π) g ]
        let g = self.g(t, 0);
        let ratio = self.slope_over_sin(t);
        let num = 2.0 * half.cos() * (ratio * (g + self.g_pi * t.cos()) - self.g_pi * g);
        -num / self.gamma_norm(t)
    }

    /// `d|γ|/dt` is strictly negative on `(0, π]` of the grid and the sign
    /// condition at 0 holds.
    pub fn is_monotone_on(&self, grid: &[f64]) -> bool {
        self.sign_at_zero() < -MARGIN_FLOOR
            && grid
                .iter()
                .filter(|&&t| t > 0.0)
                .all(|&t| self.monotone_margin(t) > MARGIN_FLOOR)
    }
}

/// `|γ_ε| : [0, π] → [0, R_ε]` together with its inverse.
///
/// The monotonicity certificate is computed once, at construction.
#[derive(Clone, Debug)]
pub struct RadiusMap {
    curve: ProfileCurve,
    tolerance: f64,
    monotone: bool,
}

impl RadiusMap {
    pub fn new(curve: ProfileCurve) -> Self {
        Self::with_tolerance(curve, DEFAULT_INVERT_TOLERANCE)
    }

    pub fn with_tolerance(curve: ProfileCurve, tolerance: f64) -> Self {
        let grid = certification_grid(crate::grid::DEFAULT_GRID_SIZE);
        let monotone = curve.is_monotone_on(&grid);
        RadiusMap { curve, tolerance, monotone }
    }

    /// Like [`RadiusMap::new`] but fails immediately without a certificate.
    pub fn certified(curve: ProfileCurve) -> Result<Self> {
        let map = Self::new(curve);
        if !map.monotone {
            return Err(Error::NotMonotone { epsilon: map.curve.epsilon });
        }
        Ok(map)
    }

    pub fn curve(&self) -> &ProfileCurve {
        &self.curve
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn is_certified(&self) -> bool {
        self.monotone
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.curve.gamma_norm(t)
    }

    /// Solves `|γ(t)| = r` for `t ∈ [0, π]`.
    ///
    /// Bracketed Newton iteration with bisection fallback; the bracket
    /// `[0, π]` is valid because the map is certified strictly decreasing.
    pub fn invert(&self, r: f64) -> Result<f64> {
        if !self.monotone {
            return Err(Error::NotMonotone { epsilon: self.curve.epsilon });
        }
        let big_r = self.curve.max_radius();
        if !(0.0..=big_r).contains(&r) {
            return Err(Error::OutOfDomain { value: r, lo: 0.0, hi: big_r });
        }
        if r == 0.0 {
            return Ok(PI);
        }
        if r == big_r {
            return Ok(0.0);
        }
        let f = |t: f64| self.curve.gamma_norm(t) - r;
        // f(lo) > 0 > f(hi)
        let (mut lo, mut hi) = (0.0_f64, PI);
        let mut t = 0.5 * PI;
        let mut dx_old = PI;
        let mut dx = dx_old;
        let mut ft = f(t);
        let mut dft = self.curve.gamma_norm_prime(t);
        for _ in 0..200 {
            let newton_ok = dft < 0.0
                && ((t - hi) * dft - ft) * ((t - lo) * dft - ft) < 0.0
                && (2.0 * ft).abs() < (dx_old * dft).abs();
            dx_old = dx;
            if newton_ok {
                dx = ft / dft;
                t -= dx;
            } else {
                dx = 0.5 * (hi - lo);
                t = lo + dx;
            }
            if dx.abs() < self.tolerance {
                break;
            }
            ft = f(t);
            if ft == 0.0 {
                break;
            }
            dft = self.curve.gamma_norm_prime(t);
            if ft > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo < self.tolerance {
                t = 0.5 * (lo + hi);
                break;
            }
        }
        Ok(t.clamp(0.0, PI))
    }

    /// `k_ε(r)`: plane curvature of `Γ_ε` at the point at distance `r`.
    pub fn k_of_radius(&self, r: f64) -> Result<f64> {
        Ok(self.curve.plane_curvature(self.invert(r)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn sin6(eps: f64) -> ProfileCurve {
        ProfileCurve::new(PerturbationSpec::sin6(), eps).unwrap()
    }

    fn circle() -> ProfileCurve {
        ProfileCurve::new(PerturbationSpec::Zero, 0.0).unwrap()
    }

    #[test]
    fn eval_g_examples() {
        let zero = ProfileCurve::new(PerturbationSpec::Zero, 0.3).unwrap();
        assert_eq!(zero.g(1.234, 0), 1.0);
        let c = sin6(0.2);
        assert!((c.g(FRAC_PI_2, 0) - 1.2).abs() < 1e-15);
        assert!((c.g(FRAC_PI_2, 2) + 1.2).abs() < 1e-14);
        assert_eq!(c.g(0.0, 2), 0.0);
    }

    #[test]
    fn gamma_examples() {
        let c0 = circle();
        assert_eq!(c0.gamma(0.0), [0.0, 2.0]);
        let p = c0.gamma(PI);
        assert!(p[0].abs() < 1e-15 && p[1].abs() < 1e-15);
        let q = sin6(0.2).gamma(FRAC_PI_2);
        assert!((q[0] - 1.2).abs() < 1e-15 && (q[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_norm_examples() {
        assert!((circle().gamma_norm(FRAC_PI_2) - 2f64.sqrt()).abs() < 1e-15);
        assert!((sin6(0.2).gamma_norm(FRAC_PI_2) - 2.44f64.sqrt()).abs() < 1e-15);
        for eps in [-0.1, 0.2, 0.39] {
            assert_eq!(sin6(eps).gamma_norm(0.0), 2.0);
            assert_eq!(sin6(eps).max_radius(), 2.0);
        }
        assert_eq!(sin6(0.2).gamma_norm(PI), 0.0);
    }

    #[test]
    fn gamma_norm_prime_examples() {
        assert_eq!(circle().gamma_norm_prime(PI), -1.0);
        assert!((circle().gamma_norm_prime(FRAC_PI_2) + 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sin6(0.2).gamma_norm_prime(0.0), 0.0);
    }

    #[test]
    fn near_pi_branch_is_continuous() {
        let c = sin6(0.3);
        let a = c.gamma_norm_prime(PI - PI_CUTOFF);
        let b = c.gamma_norm_prime(PI - PI_CUTOFF * (1.0 + 1e-9));
        assert!((a - b).abs() < 1e-8);
        assert!((c.gamma_norm_prime(PI) + c.g_pi()).abs() < 1e-15);
        let mid = c.gamma_norm_prime(PI - 0.5 * PI_CUTOFF);
        assert!((mid + 1.0).abs() < 1e-6);
    }

    #[test]
    fn invert_examples() {
        let m = RadiusMap::certified(circle()).unwrap();
        assert_eq!(m.invert(2.0).unwrap(), 0.0);
        assert_eq!(m.invert(0.0).unwrap(), PI);
        assert!((m.invert(2f64.sqrt()).unwrap() - FRAC_PI_2).abs() < 1e-12);
        for i in 1..40 {
            let r = 2.0 * i as f64 / 40.0;
            let t = m.invert(r).unwrap();
            let oracle = (r * r / 2.0 - 1.0).acos();
            assert!((t - oracle).abs() < 1e-9, "r={r}: {t} vs {oracle}");
        }
    }

    #[test]
    fn invert_errors() {
        let m = RadiusMap::certified(sin6(0.2)).unwrap();
        assert!(matches!(m.invert(-0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(m.invert(2.01), Err(Error::OutOfDomain { .. })));
        // ε = 1 breaks monotonicity of |γ|
        let bad = ProfileCurve::new(PerturbationSpec::sin6(), 1.0).unwrap();
        let m = RadiusMap::new(bad.clone());
        assert!(!m.is_certified());
        assert!(matches!(m.invert(1.0), Err(Error::NotMonotone { .. })));
        assert!(RadiusMap::certified(bad).is_err());
    }

    #[test]
    fn plane_curvature_examples() {
        assert!((circle().plane_curvature(0.77) - 1.0).abs() < 1e-15);
        assert!((sin6(0.2).plane_curvature(FRAC_PI_2) - 5.0 / 3.0).abs() < 1e-14);
        assert_eq!(sin6(0.2).plane_curvature(0.0), 1.0);
    }

    #[test]
    fn k_of_radius_examples() {
        let m0 = RadiusMap::certified(circle()).unwrap();
        assert!((m0.k_of_radius(1.3).unwrap() - 1.0).abs() < 1e-15);
        let m = RadiusMap::certified(sin6(0.2)).unwrap();
        assert!((m.k_of_radius(2.44f64.sqrt()).unwrap() - 5.0 / 3.0).abs() < 1e-10);
        let bump = ProfileCurve::new(PerturbationSpec::Bump { support: [0.8, 2.3] }, 0.1).unwrap();
        let mb = RadiusMap::certified(bump).unwrap();
        for r in [0.0, 0.02, 0.05, 1.95, 1.99, 2.0] {
            assert!((mb.k_of_radius(r).unwrap() - 1.0).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn slope_ratio_is_continuous_at_poles() {
        let c = ProfileCurve::new(
            PerturbationSpec::CosineSeries { coeffs: vec![0.0, -15.0 / 32.0, 0.0, 6.0 / 32.0, 0.0, -1.0 / 32.0] },
            0.2,
        )
        .unwrap();
        for pole in [0.0, PI] {
            let a = c.slope_over_sin(pole);
            for d in [1e-6, 1e-8] {
                let t = if pole == 0.0 { d } else { PI - d };
                assert!((c.slope_over_sin(t) - a).abs() < 1e-9);
            }
        }
    }
}
