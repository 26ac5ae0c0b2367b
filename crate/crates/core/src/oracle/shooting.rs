//! Reconstructs the profile curve from the radial field alone by shooting the
//! axisymmetric prescribed-mean-curvature ODE from the top pole.
//!
//! With arclength `s` and the tangent angle `φ` measured clockwise from the
//! `ρ` axis,
//!
//! ```text
//! ρ' = cos φ,   z' = -sin φ,   φ' = n H(|(ρ, z)|) - (n - 1) sin φ / ρ
//! ```
//!
//! `φ'` is the plane curvature of the meridian and `sin φ / ρ` the parallel
//! curvature. The path starts at `(0, R)` heading in `+ρ` and closes at the
//! origin with `φ = π`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Normalization, RadialField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Longest accepted step; keeps the polyline dense.
    pub max_step: f64,
    /// Arclength of the series step away from the top pole.
    pub start: f64,
    /// Distance from the axis at which the path is extrapolated to it.
    pub axis_stop: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions { rtol: 1e-10, atol: 1e-12, max_steps: 1_000_000, max_step: 5e-4, start: 1e-4, axis_stop: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Closed,
    BlewUp,
    MaxSteps,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingSample {
    pub s: f64,
    pub rho: f64,
    pub z: f64,
    pub phi: f64,
    /// `dφ/ds`, the curvature of the meridian.
    pub curvature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    pub samples: Vec<ShootingSample>,
    /// Distance from the extrapolated axis hit to the origin.
    pub closure_gap: f64,
    pub termination: Termination,
    pub steps: usize,
    pub rejected: usize,
}

impl ShootingResult {
    pub fn polyline(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|p| [p.rho, p.z]).collect()
    }

    /// The result itself if the path closed, an error otherwise.
    pub fn closed(self) -> Result<Self> {
        match self.termination {
            Termination::Closed => Ok(self),
            Termination::BlewUp => Err(Error::NonConvergence("shooting path blew up".into())),
            Termination::MaxSteps => Err(Error::NonConvergence(format!("no closure after {} steps", self.steps))),
        }
    }
}

type State = [f64; 3];

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const BLOW_UP: f64 = 1e3;

/// Shoots the meridian of the bubble prescribed by `field` in dimension `n`.
///
/// The field must carry the `Exact` normalization (or `Paper` with
/// `g(0) = 1`, where the two coincide).
pub fn shoot_profile(field: &RadialField, n: usize, opts: ShootingOptions) -> Result<ShootingResult> {
    if n != field.n() {
        return Err(Error::InvalidArgument(format!("field was built for n = {}, asked for n = {n}", field.n())));
    }
    let g0 = field.curve().g_zero();
    if field.normalization() == Normalization::Paper && g0 != 1.0 {
        return Err(Error::NormalizationMismatch { g0 });
    }
    let nf = n as f64;
    let big_r = field.max_radius();
    let rhs = |y: &State| -> State {
        let [rho, z, phi] = *y;
        let (sp, cp) = phi.sin_cos();
        let h = field.eval(rho.hypot(z));
        [cp, -sp, nf * h - (nf - 1.0) * sp / rho]
    };

    // series step off the umbilic pole
    let h_top = field.eval(big_r);
    let s0 = opts.start;
    let mut y: State = [s0 - h_top * h_top * s0.powi(3) / 6.0, big_r - 0.5 * h_top * s0 * s0, h_top * s0];
    let mut s = s0;
    let mut k1 = rhs(&y);
    let mut samples = vec![
        ShootingSample { s: 0.0, rho: 0.0, z: big_r, phi: 0.0, curvature: h_top },
        ShootingSample { s, rho: y[0], z: y[1], phi: y[2], curvature: k1[2] },
    ];
    let mut h = opts.max_step.min(1e-3);
    let (mut steps, mut rejected) = (0usize, 0usize);

    loop {
        if steps >= opts.max_steps {
            return Ok(ShootingResult { samples, closure_gap: f64::INFINITY, termination: Termination::MaxSteps, steps, rejected });
        }
        // approaching the axis: never step past it
        let cos_phi = y[2].cos();
        let mut step = h.min(opts.max_step);
        if cos_phi < 0.0 {
            step = step.min(0.5 * y[0] / -cos_phi);
        }

        let mut k = [[0.0; 3]; 7];
        k[0] = k1;
        for i in 1..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                for c in 0..3 {
                    yi[c] += step * A[i][j] * kj[c];
                }
            }
            k[i] = rhs(&yi);
        }
        let mut y5 = y;
        let mut err = 0.0;
        for c in 0..3 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for i in 0..7 {
                d5 += B5[i] * k[i][c];
                d4 += B4[i] * k[i][c];
            }
            y5[c] += step * d5;
            let sc = opts.atol + opts.rtol * y[c].abs().max(y5[c].abs());
            err += (step * (d5 - d4) / sc).powi(2);
        }
        let err = (err / 3.0).sqrt();
        steps += 1;
        if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
            rejected += 1;
            h = 0.2 * step;
            if h < 1e-14 {
                return Ok(ShootingResult { samples, closure_gap: f64::INFINITY, termination: Termination::BlewUp, steps, rejected });
            }
            continue;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err > 1.0 {
            rejected += 1;
            h = step * factor.min(1.0);
            continue;
        }
        // accepted; k[6] is the derivative at y5 (FSAL)
        y = y5;
        s += step;
        k1 = k[6];
        h = step * factor;
        samples.push(ShootingSample { s, rho: y[0], z: y[1], phi: y[2], curvature: k1[2] });

        if y[0].abs() > BLOW_UP || y[1].abs() > BLOW_UP || y[0] <= 0.0 {
            return Ok(ShootingResult { samples, closure_gap: f64::INFINITY, termination: Termination::BlewUp, steps, rejected });
        }
        if y[0] < opts.axis_stop {
            let cos_phi = y[2].cos();
            if cos_phi > -0.95 {
                return Err(Error::PoleSingularity { s, cos_phi });
            }
            // straight-line extrapolation to ρ = 0
            let ds = y[0] / -cos_phi;
            let z_end = y[1] - y[2].sin() * ds;
            samples.push(ShootingSample { s: s + ds, rho: 0.0, z: z_end, phi: y[2], curvature: k1[2] });
            return Ok(ShootingResult { samples, closure_gap: z_end.abs(), termination: Termination::Closed, steps, rejected });
        }
    }
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let w = if len2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) };
    (p[0] - a[0] - w * d[0]).hypot(p[1] - a[1] - w * d[1])
}

fn directed(from: &[[f64; 2]], to: &[[f64; 2]]) -> f64 {
    from.par_iter()
        .map(|&p| {
            if to.len() == 1 {
                return (p[0] - to[0][0]).hypot(p[1] - to[0][1]);
            }
            to.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance between two polylines, each point measured
/// against the other polyline's segments.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::PerturbationSpec;
    use std::f64::consts::PI;

    fn gamma_samples(field: &RadialField, count: usize) -> Vec<[f64; 2]> {
        (0..count).map(|i| field.curve().gamma(PI * i as f64 / (count - 1) as f64)).collect()
    }

    #[test]
    fn round_sphere_closes() {
        let f = RadialField::new(PerturbationSpec::Zero, 0.0, 2, Normalization::Exact).unwrap();
        let res = shoot_profile(&f, 2, ShootingOptions::default()).unwrap();
        assert_eq!(res.termination, Termination::Closed);
        assert!(res.closure_gap <= 1e-7, "gap {}", res.closure_gap);
        let circle: Vec<[f64; 2]> = (0..4096).map(|i| {
            let t = PI * i as f64 / 4095.0;
            [t.sin(), 1.0 + t.cos()]
        }).collect();
        let d = hausdorff(&res.polyline(), &circle);
        assert!(d <= 1e-7, "hausdorff {d:e}");
        assert!(res.samples.iter().all(|p| p.rho >= 0.0));
    }

    #[test]
    fn perturbed_profile_closes() {
        for n in [2, 3] {
            let f = RadialField::new(PerturbationSpec::sin6(), 0.2, n, Normalization::Exact).unwrap();
            let res = shoot_profile(&f, n, ShootingOptions::default()).unwrap().closed().unwrap();
            assert!(res.closure_gap <= 1e-5, "n={n} gap {}", res.closure_gap);
            let d = hausdorff(&res.polyline(), &gamma_samples(&f, 4096));
            assert!(d <= 1e-5, "n={n} hausdorff {d:e}");
        }
    }

    #[test]
    fn dimension_and_normalization_checks() {
        let f = RadialField::new(PerturbationSpec::sin6(), 0.2, 2, Normalization::Exact).unwrap();
        assert!(matches!(shoot_profile(&f, 3, ShootingOptions::default()), Err(Error::InvalidArgument(_))));
        let shifted = PerturbationSpec::CosineSeries { coeffs: vec![0.0, -15.0 / 32.0, 0.0, 6.0 / 32.0, 0.0, -1.0 / 32.0] };
        let p = RadialField::new(shifted, 0.2, 2, Normalization::Paper).unwrap();
        assert!(matches!(shoot_profile(&p, 2, ShootingOptions::default()), Err(Error::NormalizationMismatch { .. })));
    }

    #[test]
    fn step_budget_is_reported() {
        let f = RadialField::new(PerturbationSpec::Zero, 0.0, 2, Normalization::Exact).unwrap();
        let opts = ShootingOptions { max_steps: 10, ..Default::default() };
        let res = shoot_profile(&f, 2, opts).unwrap();
        assert_eq!(res.termination, Termination::MaxSteps);
        assert!(res.closed().is_err());
    }

    #[test]
    fn hausdorff_basics() {
        let a = [[0.0, 0.0], [1.0, 0.0]];
        let b = [[0.0, 0.5], [1.0, 0.5]];
        assert!((hausdorff(&a, &b) - 0.5).abs() < 1e-15);
        assert_eq!(hausdorff(&a, &a), 0.0);
        // a point on the other polyline's segment is at distance zero
        assert_eq!(hausdorff(&[[0.5, 0.0]], &a), 0.5);
    }
}
