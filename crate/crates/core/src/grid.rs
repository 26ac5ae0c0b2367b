//! Certification grids on `[0, π]`.
//!
//! "For all t" conditions are checked on a uniform grid merged with a
//! Chebyshev–Lobatto grid of the same size. This is certification, not proof.

use std::f64::consts::PI;

pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Sorted, deduplicated union of `size` uniform points and `size`
/// Chebyshev–Lobatto points on `[0, π]`. Both endpoints and `π/2` are
/// included.
pub fn certification_grid(size: usize) -> Vec<f64> {
    let size = size.max(2);
    let last = (size - 1) as f64;
    let mut pts: Vec<f64> = (0..size)
        .map(|k| PI * k as f64 / last)
        .chain((0..size).map(|k| 0.5 * PI * (1.0 - (PI * k as f64 / last).cos())))
        .chain([0.5 * PI])
        .collect();
    pts.iter_mut().for_each(|t| *t = t.clamp(0.0, PI));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    *pts.first_mut().unwrap() = 0.0;
    *pts.last_mut().unwrap() = PI;
    pts
}

/// `n` equally spaced points on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_sorted_and_anchored() {
        let g = certification_grid(256);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), PI);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        // Chebyshev clustering puts points much closer to the ends than uniform spacing
        assert!(g[1] < PI / 255.0 / 10.0);
        assert!(g.len() > 256 && g.len() <= 513);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
