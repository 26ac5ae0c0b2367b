//! Grid certification of the smallness conditions on `ε`.
//!
//! Every condition is reduced to a margin that must stay above
//! [`MARGIN_FLOOR`] on the certification grid. Where the defining expression
//! has a forced zero at an endpoint it is divided by a positive weight that
//! carries that zero, so the margin stays informative up to the endpoint.
//! This is grid certification only, not a proof.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::{certification_grid, linspace, DEFAULT_GRID_SIZE};
use crate::perturbation::PerturbationSpec;
use crate::profile::{ProfileCurve, MARGIN_FLOOR};

pub const MIN_GRID_SIZE: usize = 256;

pub const CONDITION_NAMES: [&str; 6] = [
    "positivity_g",
    "positivity_tilde_g",
    "monotone_gamma_norm",
    "sign_at_zero",
    "plane_curvature_positive",
    "parallel_curvature_positive",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub passed: bool,
    /// Minimum of the (positively weighted) margin over the grid.
    pub worst_margin: f64,
    pub worst_t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub epsilon: f64,
    pub passed: bool,
    pub grid_size: usize,
    pub method: String,
    pub conditions: Vec<ConditionResult>,
}

impl AdmissibilityReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failed_conditions(&self) -> Vec<&str> {
        self.conditions.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

// Minimum of f over the points, with its location.
fn worst<F: Fn(f64) -> f64 + Sync>(points: &[f64], f: F) -> (f64, f64) {
    points
        .iter()
        .map(|&t| (f(t), t))
        .fold((f64::INFINITY, f64::NAN), |acc, x| if x.0 < acc.0 || x.0.is_nan() { x } else { acc })
}

/// `(g(π) + g(t) cos t) / (1 + cos t)`, extended to `g(π) - g''(π)` at `π`.
fn tilde_g_margin(curve: &ProfileCurve, h: &PerturbationSpec, t: f64) -> f64 {
    let half = (0.5 * t).cos();
    let weight = 2.0 * half * half;
    if weight < 1e-12 {
        return curve.g_pi() - curve.g(PI, 2);
    }
    let diff = curve.epsilon() * (h.value(t) - h.value(PI));
    curve.g_pi() + diff * t.cos() / weight
}

/// `1 + ε h̃(t) = g(t) - cos t · g'(t)/sin t`, continuous on `[0, π]`.
fn parallel_margin(curve: &ProfileCurve, t: f64) -> f64 {
    curve.g(t, 0) - t.cos() * curve.slope_over_sin(t)
}

/// Evaluates all six admissibility conditions for `(h, ε)` on the union of a
/// uniform and a Chebyshev grid of `grid_size` points each.
pub fn certify(h: &PerturbationSpec, epsilon: f64, grid_size: usize) -> AdmissibilityReport {
    let grid_size = grid_size.max(MIN_GRID_SIZE);
    let curve = ProfileCurve::new_unchecked(h.clone(), epsilon);
    let closed = certification_grid(grid_size);
    let open: Vec<f64> = closed.iter().copied().filter(|&t| t > 0.0 && t < PI).collect();
    let half_open: Vec<f64> = closed.iter().copied().filter(|&t| t > 0.0).collect();

    let raw = [
        worst(&closed, |t| curve.g(t, 0)),
        worst(&closed, |t| tilde_g_margin(&curve, h, t)),
        worst(&half_open, |t| curve.monotone_margin(t)),
        (-curve.sign_at_zero(), 0.0),
        worst(&closed, |t| curve.plane_curvature(t)),
        worst(&open, |t| parallel_margin(&curve, t)),
    ];
    let conditions: Vec<ConditionResult> = CONDITION_NAMES
        .iter()
        .zip(raw)
        .map(|(name, (m, t))| ConditionResult {
            name: name.to_string(),
            passed: m > MARGIN_FLOOR,
            worst_margin: m,
            worst_t: t,
        })
        .collect();
    AdmissibilityReport {
        epsilon,
        passed: conditions.iter().all(|c| c.passed),
        grid_size,
        method: "grid certification (uniform + Chebyshev), not a proof".into(),
        conditions,
    }
}

/// Search range for [`interval_estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRange {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    /// Smallest certified `ε` of the interval containing 0.
    pub eps_min: f64,
    /// Largest certified `ε` of the interval containing 0.
    pub eps_max: f64,
    /// Failing probe bracketing `eps_min` from below, if the search hit one.
    pub fail_below: Option<f64>,
    /// Failing probe bracketing `eps_max` from above, if the search hit one.
    pub fail_above: Option<f64>,
    /// Values inside `[eps_min, eps_max]` whose re-check failed.
    pub anomalies: Vec<f64>,
    pub probes: usize,
}

const ANOMALY_SCAN: usize = 64;

/// Largest bisection-certified interval around 0 inside `[lo, hi]`.
///
/// Each probe is certified on its own; the pass set is not assumed to be an
/// interval. After the two bisections the result is re-scanned on a uniform
/// grid and any failing value is reported in `anomalies`.
pub fn interval_estimate(h: &PerturbationSpec, search: SearchRange, grid_size: usize) -> IntervalEstimate {
    assert!(search.lo < 0.0 && 0.0 < search.hi && search.tol > 0.0, "need lo < 0 < hi and tol > 0");
    let mut probes = 0;
    let mut passes = |eps: f64| {
        probes += 1;
        certify(h, eps, grid_size).passed
    };
    let mut side = |end: f64| -> (f64, Option<f64>) {
        if passes(end) {
            return (end, None);
        }
        let (mut good, mut bad) = (0.0, end);
        while (bad - good).abs() > search.tol {
            let mid = 0.5 * (good + bad);
            if passes(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        (good, Some(bad))
    };
    let (eps_max, fail_above) = side(search.hi);
    let (eps_min, fail_below) = side(search.lo);

    let anomalies: Vec<f64> = linspace(eps_min, eps_max, ANOMALY_SCAN)
        .into_par_iter()
        .filter(|&e| !certify(h, e, grid_size).passed)
        .collect();
    IntervalEstimate { eps_min, eps_max, fail_below, fail_above, anomalies, probes: probes + ANOMALY_SCAN }
}

/// [`interval_estimate`] with the default grid.
pub fn interval_estimate_default(h: &PerturbationSpec, search: SearchRange) -> IntervalEstimate {
    interval_estimate(h, search, DEFAULT_GRID_SIZE)
}
