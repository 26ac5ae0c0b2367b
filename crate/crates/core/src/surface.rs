//! The reference hypersurface `S_ε ⊂ ℝ^{n+1}` obtained by revolving `Γ_ε`
//! around the last coordinate axis.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profile::{ProfileCurve, RadiusMap};

#[derive(Clone, Debug, PartialEq)]
pub struct RevolutionSurface {
    curve: ProfileCurve,
    n: usize,
}

impl RevolutionSurface {
    /// `n` is the dimension of the hypersurface; the ambient space is `ℝ^{n+1}`.
    pub fn new(curve: ProfileCurve, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("surface dimension n must be >= 1".into()));
        }
        Ok(RevolutionSurface { curve, n })
    }

    pub fn curve(&self) -> &ProfileCurve {
        &self.curve
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `x_ε(θ_1, ..., θ_n) = g(θ_n) σ(θ) + g(π) e_{n+1}` with the
    /// hyperspherical chart `σ`.
    pub fn surface_point(&self, angles: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if angles.len() != n {
            return Err(Error::InvalidArgument(format!("expected {n} angles, got {}", angles.len())));
        }
        if !(0.0..=TAU).contains(&angles[0]) {
            return Err(Error::OutOfDomain { value: angles[0], lo: 0.0, hi: TAU });
        }
        for &a in &angles[1..] {
            if !(0.0..=PI).contains(&a) {
                return Err(Error::OutOfDomain { value: a, lo: 0.0, hi: PI });
            }
        }
        let sigma = hyperspherical(angles);
        let g = self.curve.g(angles[n - 1], 0);
        let mut x: Vec<f64> = sigma.iter().map(|s| g * s).collect();
        x[n] += self.curve.g_pi();
        Ok(x)
    }

    /// The common value `K_1 = ... = K_{n-1}` of the parallel principal
    /// curvatures: `(g sin t - g' cos t) / (g sin t sqrt(g² + g'²))`.
    ///
    /// Evaluated through `g'/sin t`, so the poles return the continuous limits.
    pub fn bar_k(&self, t: f64) -> f64 {
        let [g, g1, ..] = self.curve.g_derivatives(t);
        let ratio = self.curve.slope_over_sin(t);
        (g - t.cos() * ratio) / (g * (g * g + g1 * g1).sqrt())
    }

    /// Meridian curvature `K_n`; equals the plane curvature of `Γ_ε`.
    pub fn meridian_curvature(&self, t: f64) -> f64 {
        let [g, g1, g2, ..] = self.curve.g_derivatives(t);
        (g * g + 2.0 * g1 * g1 - g * g2) / (g * g + g1 * g1).powf(1.5)
    }

    /// `(K_1, ..., K_n)` at profile parameter `t ∈ [0, π]`.
    pub fn principal_curvatures(&self, t: f64) -> Vec<f64> {
        let mut k = vec![self.bar_k(t); self.n - 1];
        k.push(self.meridian_curvature(t));
        k
    }

    /// `(1/n) Σ K_i`.
    pub fn mean_curvature_of_t(&self, t: f64) -> f64 {
        let n = self.n as f64;
        ((n - 1.0) * self.bar_k(t) + self.meridian_curvature(t)) / n
    }

    /// The point of `S_ε` at distance `r` from the origin on the meridian in
    /// the `x_1 x_{n+1}` half-plane, i.e. `x_ε(π/2, ..., π/2, |γ|⁻¹(r))`.
    pub fn y_section(&self, map: &RadiusMap, r: f64) -> Result<Vec<f64>> {
        let t = map.invert(r)?;
        Ok(self.meridian_point(t))
    }

    /// `g(t) sin t · e_1 + (g(π) + g(t) cos t) · e_{n+1}`.
    pub fn meridian_point(&self, t: f64) -> Vec<f64> {
        let [rho, z] = self.curve.gamma(t);
        let mut p = vec![0.0; self.n + 1];
        p[0] = rho;
        p[self.n] = z;
        p
    }

    /// Closed triangulation of `S_ε` (n = 2 only) with pole fans.
    ///
    /// `res_theta` vertices per ring around the axis, `res_t` intervals along
    /// the meridian. Faces are wound so their normals point outward.
    pub fn build_mesh(&self, res_theta: usize, res_t: usize) -> Result<SurfaceMesh> {
        if self.n != 2 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        if res_theta < 8 || res_t < 8 {
            return Err(Error::InvalidArgument(format!(
                "mesh resolution must be >= 8, got {res_theta} x {res_t}"
            )));
        }
        let rings: Vec<(f64, Vec<[f64; 3]>)> = (1..res_t)
            .into_par_iter()
            .map(|j| {
                let t = PI * j as f64 / res_t as f64;
                let [rho, z] = self.curve.gamma(t);
                let ring = (0..res_theta)
                    .map(|i| {
                        let th = TAU * i as f64 / res_theta as f64;
                        [rho * th.sin(), rho * th.cos(), z]
                    })
                    .collect();
                (t, ring)
            })
            .collect();

        let mut vertices = Vec::with_capacity(2 + (res_t - 1) * res_theta);
        let mut param_t = Vec::with_capacity(vertices.capacity());
        vertices.push([0.0, 0.0, self.curve.max_radius()]);
        param_t.push(0.0);
        for (t, ring) in rings {
            param_t.extend(std::iter::repeat(t).take(ring.len()));
            vertices.extend(ring);
        }
        vertices.push([0.0, 0.0, 0.0]);
        param_t.push(PI);

        let south = vertices.len() - 1;
        let idx = |i: usize, j: usize| 1 + (j - 1) * res_theta + (i % res_theta);
        let mut faces = Vec::with_capacity(2 * res_theta * res_t);
        for i in 0..res_theta {
            faces.push([0, idx(i + 1, 1), idx(i, 1)]);
        }
        for j in 1..res_t - 1 {
            for i in 0..res_theta {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        for i in 0..res_theta {
            faces.push([south, idx(i, res_t - 1), idx(i + 1, res_t - 1)]);
        }

        let mean_curvature = param_t.par_iter().map(|&t| self.mean_curvature_of_t(t)).collect();
        let mesh = SurfaceMesh { vertices, faces, mean_curvature, param_t };
        mesh.check_faces()?;
        Ok(mesh)
    }
}

/// The unit-sphere chart `σ(θ_1, ..., θ_n) ∈ ℝ^{n+1}`.
pub fn hyperspherical(angles: &[f64]) -> Vec<f64> {
    let n = angles.len();
    // tail[j] = Π_{i >= j} sin θ_i (0-based)
    let mut tail = vec![1.0; n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1] * angles[j].sin();
    }
    let mut s = vec![0.0; n + 1];
    s[0] = tail[0];
    s[1] = angles[0].cos() * tail[1];
    for j in 2..=n {
        s[j] = angles[j - 1].cos() * tail[j];
    }
    s
}

/// Triangulated `S_ε` in `ℝ³` with a per-vertex mean-curvature channel.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Analytic mean curvature at each vertex.
    pub mean_curvature: Vec<f64>,
    /// Profile parameter `t` of each vertex (0 at the top pole, π at the origin).
    pub param_t: Vec<f64>,
}

pub const MIN_FACE_AREA: f64 = 1e-14;

impl SurfaceMesh {
    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f].map(|i| self.vertices[i]);
        0.5 * norm3(cross(sub3(b, a), sub3(c, a)))
    }

    pub fn check_faces(&self) -> Result<()> {
        for f in 0..self.faces.len() {
            if !(self.face_area(f) > MIN_FACE_AREA) {
                return Err(Error::DegenerateFace(f));
            }
        }
        Ok(())
    }

    pub fn max_vertex_norm(&self) -> f64 {
        self.vertices.iter().map(|v| norm3(*v)).fold(0.0, f64::max)
    }
}

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::PerturbationSpec;
    use std::f64::consts::FRAC_PI_2;

    fn surf(eps: f64, n: usize) -> RevolutionSurface {
        let h = if eps == 0.0 { PerturbationSpec::Zero } else { PerturbationSpec::sin6() };
        RevolutionSurface::new(ProfileCurve::new(h, eps).unwrap(), n).unwrap()
    }

    fn close_vec(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn surface_point_examples() {
        let s = surf(0.0, 2);
        assert!(close_vec(&s.surface_point(&[0.0, 0.0]).unwrap(), &[0.0, 0.0, 2.0], 1e-15));
        assert!(close_vec(&s.surface_point(&[0.0, PI]).unwrap(), &[0.0, 0.0, 0.0], 1e-15));
        let s = surf(0.2, 2);
        assert!(close_vec(&s.surface_point(&[FRAC_PI_2, FRAC_PI_2]).unwrap(), &[1.2, 0.0, 1.0], 1e-15));
        assert!(matches!(s.surface_point(&[-0.1, 1.0]), Err(Error::OutOfDomain { .. })));
        assert!(matches!(s.surface_point(&[1.0, 3.5]), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn chart_is_unit_and_meridian_matches() {
        let a = [0.3, 1.1, 2.0, 0.7];
        let s = hyperspherical(&a);
        assert!((s.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);
        let sf = surf(0.2, 3);
        let t = 1.3;
        let p = sf.surface_point(&[FRAC_PI_2, FRAC_PI_2, t]).unwrap();
        assert!(close_vec(&p, &sf.meridian_point(t), 1e-15));
    }

    #[test]
    fn principal_curvature_examples() {
        assert!(close_vec(&surf(0.0, 3).principal_curvatures(1.0), &[1.0, 1.0, 1.0], 1e-15));
        let k = surf(0.2, 2).principal_curvatures(FRAC_PI_2);
        assert!(close_vec(&k, &[5.0 / 6.0, 5.0 / 3.0], 1e-14));
        for n in 1..5 {
            let k = surf(0.2, n).principal_curvatures(PI - 1e-9);
            assert!(k.iter().all(|v| (v - 1.0).abs() < 1e-12), "{k:?}");
        }
    }

    #[test]
    fn bar_k_examples() {
        assert!((surf(0.0, 2).bar_k(0.7) - 1.0).abs() < 1e-15);
        assert!((surf(0.2, 2).bar_k(FRAC_PI_2) - 5.0 / 6.0).abs() < 1e-15);
        assert!((surf(-0.1, 2).bar_k(FRAC_PI_2) - 1.0 / 0.9).abs() < 1e-15);
    }

    #[test]
    fn mean_curvature_examples() {
        assert!((surf(0.0, 5).mean_curvature_of_t(0.4) - 1.0).abs() < 1e-15);
        assert!((surf(0.2, 2).mean_curvature_of_t(FRAC_PI_2) - 1.25).abs() < 1e-14);
        assert!((surf(0.2, 3).mean_curvature_of_t(FRAC_PI_2) - 10.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn y_section_examples() {
        let s0 = surf(0.0, 2);
        let m0 = RadiusMap::certified(s0.curve().clone()).unwrap();
        assert!(close_vec(&s0.y_section(&m0, 2.0).unwrap(), &[0.0, 0.0, 2.0], 1e-15));
        assert!(close_vec(&s0.y_section(&m0, 0.0).unwrap(), &[0.0, 0.0, 0.0], 1e-15));
        let s = surf(0.2, 2);
        let m = RadiusMap::certified(s.curve().clone()).unwrap();
        let y = s.y_section(&m, 2.44f64.sqrt()).unwrap();
        assert!(close_vec(&y, &[1.2, 0.0, 1.0], 1e-11), "{y:?}");
    }

    #[test]
    fn umbilic_poles() {
        let s = surf(0.3, 2);
        for (pole, dir) in [(0.0, 1.0), (PI, -1.0)] {
            let gaps: Vec<f64> = (2..=5)
                .map(|k| {
                    let t = pole + dir * 10f64.powi(-k);
                    (s.bar_k(t) - s.meridian_curvature(t)).abs()
                })
                .collect();
            assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
            assert!(gaps[3] < 1e-12);
        }
    }

    #[test]
    fn mesh_examples() {
        let m = surf(0.0, 2).build_mesh(16, 16).unwrap();
        assert!((m.max_vertex_norm() - 2.0).abs() < 1e-12);
        assert_eq!(m.vertices.len(), 2 + 15 * 16);
        assert_eq!(m.faces.len(), 2 * 16 * 15);
        let s = surf(0.2, 2);
        let m = s.build_mesh(128, 128).unwrap();
        for (h, &t) in m.mean_curvature.iter().zip(&m.param_t) {
            assert_eq!(*h, s.mean_curvature_of_t(t));
        }
        assert!(matches!(surf(0.2, 3).build_mesh(16, 16), Err(Error::UnsupportedDimension(3))));
        assert!(s.build_mesh(4, 16).is_err());
    }

    #[test]
    fn mesh_is_closed_and_outward() {
        let m = surf(0.2, 2).build_mesh(24, 20).unwrap();
        // every edge is shared by exactly two faces with opposite orientation
        let mut edges = std::collections::HashMap::new();
        for f in &m.faces {
            for k in 0..3 {
                *edges.entry((f[k], f[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &edges {
            assert_eq!(c, 1);
            assert_eq!(edges.get(&(b, a)), Some(&1));
        }
        // signed volume positive => outward normals
        let vol: f64 = m
            .faces
            .iter()
            .map(|f| dot3(m.vertices[f[0]], cross(m.vertices[f[1]], m.vertices[f[2]])) / 6.0)
            .sum();
        assert!(vol > 0.0);
    }
}
