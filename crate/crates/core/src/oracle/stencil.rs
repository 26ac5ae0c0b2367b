//! Finite-difference curvature and endpoint difference quotients.

use crate::error::{Error, Result};

/// Curvature at `samples[index]` from 5-point first and second derivative
/// stencils in the sample index.
///
/// The sign is positive for curves turning clockwise in the `(ρ, z)` plane,
/// the orientation of `Γ_ε` as `t` increases. Curvature is invariant under
/// reparametrization, so the sample spacing only needs to be roughly uniform.
pub fn fd_plane_curvature(samples: &[[f64; 2]], index: usize) -> Result<f64> {
    if index < 2 || index + 2 >= samples.len() {
        return Err(Error::InvalidArgument(format!(
            "stencil index {index} needs two neighbours on each side of {} samples",
            samples.len()
        )));
    }
    let p = |k: usize| samples[index + k - 2];
    let mut d1 = [0.0; 2];
    let mut d2 = [0.0; 2];
    for c in 0..2 {
        let (m2, m1, z, p1, p2) = (p(0)[c], p(1)[c], p(2)[c], p(3)[c], p(4)[c]);
        d1[c] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / 12.0;
        d2[c] = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / 12.0;
    }
    let speed = d1[0].hypot(d1[1]);
    if speed < 1e-10 {
        return Err(Error::DegenerateStencil(index));
    }
    Ok((d1[1] * d2[0] - d1[0] * d2[1]) / speed.powi(3))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

/// One-sided difference quotients of `f` at an end of `[a, b]`:
/// `(f(a + s) - f(a)) / s` or `(f(b) - f(b - s)) / s` for each step `s`.
pub fn endpoint_flatness<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, end: End, steps: &[f64]) -> Result<Vec<f64>> {
    let width = b - a;
    steps
        .iter()
        .map(|&s| {
            if !(s > 0.0 && s <= width) {
                return Err(Error::OutOfDomain { value: s, lo: 0.0, hi: width });
            }
            Ok(match end {
                End::Left => (f(a + s) - f(a)) / s,
                End::Right => (f(b) - f(b - s)) / s,
            })
        })
        .collect()
}
