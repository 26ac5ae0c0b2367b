//! Radial curvature fields `H_ε`, their gluing into global fields, and
//! bubble-through-point queries.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::admissibility::certify;
use crate::error::{Error, Result};
use crate::grid::{certification_grid, DEFAULT_GRID_SIZE};
use crate::perturbation::PerturbationSpec;
use crate::profile::{ProfileCurve, RadiusMap};
use crate::surface::RevolutionSurface;

/// Scaling of the radial field inside its ball.
///
/// `Paper` multiplies the mean curvature of `S_ε` by `g_ε(0)` so that the
/// field equals 1 outside the ball; `Exact` is the unscaled mean curvature,
/// equal to `1/g_ε(0)` outside the ball. Both agree when `h(0) = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Paper,
    #[default]
    Exact,
}

impl std::str::FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Normalization::Paper),
            "exact" => Ok(Normalization::Exact),
            other => Err(Error::InvalidArgument(format!("unknown normalization {other:?}"))),
        }
    }
}

/// `H_ε` as a function of the distance from the block centre.
#[derive(Clone, Debug)]
pub struct RadialField {
    surf: RevolutionSurface,
    map: RadiusMap,
    normalization: Normalization,
}

impl RadialField {
    /// Builds the field after certifying `(h, ε)` on the default grid.
    pub fn new(h: PerturbationSpec, epsilon: f64, n: usize, normalization: Normalization) -> Result<Self> {
        let curve = ProfileCurve::new(h, epsilon)?;
        let report = certify(curve.h(), epsilon, DEFAULT_GRID_SIZE);
        if !report.passed {
            return Err(Error::EpsilonInadmissible { epsilon, failed: report.failed_conditions().join(", ") });
        }
        let map = RadiusMap::certified(curve.clone())?;
        let surf = RevolutionSurface::new(curve, n)?;
        Ok(RadialField { surf, map, normalization })
    }

    pub fn surface(&self) -> &RevolutionSurface {
        &self.surf
    }

    pub fn radius_map(&self) -> &RadiusMap {
        &self.map
    }

    pub fn curve(&self) -> &ProfileCurve {
        self.surf.curve()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn n(&self) -> usize {
        self.surf.n()
    }

    pub fn max_radius(&self) -> f64 {
        self.curve().max_radius()
    }

    fn factor(&self) -> f64 {
        match self.normalization {
            Normalization::Paper => self.curve().g_zero(),
            Normalization::Exact => 1.0,
        }
    }

    /// Value for `r > R_ε`.
    pub fn outer_value(&self) -> f64 {
        match self.normalization {
            Normalization::Paper => 1.0,
            Normalization::Exact => 1.0 / self.curve().g_zero(),
        }
    }

    /// Field value at profile parameter `t`, i.e. at the points of `S_ε`
    /// with `|p| = |γ(t)|`.
    pub fn eval_at_t(&self, t: f64) -> f64 {
        self.factor() * self.surf.mean_curvature_of_t(t)
    }

    /// `H_ε(r)` for `r >= 0`.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r > self.max_radius() {
            return self.outer_value();
        }
        let t = self.map.invert(r).expect("radius map is certified at construction");
        self.eval_at_t(t)
    }

    /// `(C₁, C₂)`: extremes of the field over the certification grid,
    /// including the constant outer branch.
    pub fn bounds(&self) -> (f64, f64) {
        let outer = self.outer_value();
        certification_grid(DEFAULT_GRID_SIZE)
            .into_iter()
            .map(|t| self.eval_at_t(t))
            .fold((outer, outer), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// Samples the field on `samples` uniform radii of `[0, R_ε]` for fast
    /// bulk evaluation.
    pub fn tabulate(&self, samples: usize) -> RadialTable {
        let samples = samples.max(4);
        let big_r = self.max_radius();
        let step = big_r / (samples - 1) as f64;
        let values: Vec<f64> = (0..samples).map(|i| self.eval(step * i as f64)).collect();
        RadialTable::new(step, values, self.outer_value())
    }
}

pub const DEFAULT_TABLE_SAMPLES: usize = 8192;

/// Piecewise-cubic Hermite table of a radial field on `[0, R]`, with
/// fourth-order slopes limited to preserve monotone stretches.
#[derive(Clone, Debug)]
pub struct RadialTable {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    outer: f64,
}

impl RadialTable {
    fn new(step: f64, values: Vec<f64>, outer: f64) -> Self {
        let n = values.len();
        let y = &values;
        let mut slopes = vec![0.0; n];
        // the field has zero slope at both ends of its ball
        for i in 1..n - 1 {
            slopes[i] = if i >= 2 && i + 2 < n {
                (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * step)
            } else {
                (y[i + 1] - y[i - 1]) / (2.0 * step)
            };
        }
        // Fritsch–Carlson limiter where the data is monotone across three
        // consecutive intervals; intervals next to an extremum keep their slopes
        let secant: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / step).collect();
        for k in 0..n - 1 {
            let delta = secant[k];
            let before = if k > 0 { secant[k - 1] } else { delta };
            let after = if k + 1 < n - 1 { secant[k + 1] } else { delta };
            if delta == 0.0 || before * delta <= 0.0 || after * delta <= 0.0 {
                continue;
            }
            let (a, b) = (slopes[k] / delta, slopes[k + 1] / delta);
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                slopes[k] = tau * a * delta;
                slopes[k + 1] = tau * b * delta;
            }
        }
        RadialTable { step, values, slopes, outer }
    }

    pub fn max_radius(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r > self.max_radius() {
            return self.outer;
        }
        let x = r / self.step;
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let s = x - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }
}

/// One translated copy of a radial field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub center: Vec<f64>,
    pub epsilon: f64,
    pub h: PerturbationSpec,
}

impl Block {
    pub fn new(center: Vec<f64>, epsilon: f64, h: PerturbationSpec) -> Self {
        Block { center, epsilon, h }
    }

    /// `R_ε = g(0) + g(π)` for this block.
    pub fn max_radius(&self) -> f64 {
        2.0 + self.epsilon * (self.h.value(0.0) + self.h.value(std::f64::consts::PI))
    }
}

/// Result of [`validate_spacing`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpacingCheck {
    pub ok: bool,
    pub offending: Option<(usize, usize)>,
}

/// Checks `|p_i - p_j| >= max(R_i, R_j) + 2` for every pair.
pub fn validate_spacing(blocks: &[Block]) -> SpacingCheck {
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let d = distance(&blocks[i].center, &blocks[j].center);
            let need = blocks[i].max_radius().max(blocks[j].max_radius()) + 2.0;
            if d < need {
                return SpacingCheck { ok: false, offending: Some((i, j)) };
            }
        }
    }
    SpacingCheck { ok: true, offending: None }
}

/// Serializable description of a [`GlobalField`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalFieldDescriptor {
    pub n: usize,
    pub normalization: Normalization,
    pub blocks: Vec<Block>,
}

/// Radial blocks glued over the constant background 1.
#[derive(Clone, Debug)]
pub struct GlobalField {
    n: usize,
    normalization: Normalization,
    blocks: Vec<Block>,
    fields: Vec<Arc<RadialField>>,
}

impl GlobalField {
    /// Certifies every block, then validates the spacing rule.
    pub fn new(n: usize, normalization: Normalization, blocks: Vec<Block>) -> Result<Self> {
        let mut cache: Vec<(PerturbationSpec, u64, Arc<RadialField>)> = Vec::new();
        let mut fields = Vec::with_capacity(blocks.len());
        for b in &blocks {
            if b.center.len() != n + 1 {
                return Err(Error::InvalidArgument(format!(
                    "block centre has {} coordinates, expected {}",
                    b.center.len(),
                    n + 1
                )));
            }
            let key = b.epsilon.to_bits();
            let field = match cache.iter().find(|(h, k, _)| *k == key && *h == b.h) {
                Some((_, _, f)) => f.clone(),
                None => {
                    let f = Arc::new(RadialField::new(b.h.clone(), b.epsilon, n, normalization)?);
                    cache.push((b.h.clone(), key, f.clone()));
                    f
                }
            };
            fields.push(field);
        }
        let check = validate_spacing(&blocks);
        if let Some((i, j)) = check.offending {
            return Err(Error::SpacingViolation(i, j));
        }
        Ok(GlobalField { n, normalization, blocks, fields })
    }

    /// Constant field 1: no blocks.
    pub fn empty(n: usize, normalization: Normalization) -> Self {
        GlobalField { n, normalization, blocks: Vec::new(), fields: Vec::new() }
    }

    pub fn from_descriptor(d: GlobalFieldDescriptor) -> Result<Self> {
        Self::new(d.n, d.normalization, d.blocks)
    }

    pub fn descriptor(&self) -> GlobalFieldDescriptor {
        GlobalFieldDescriptor { n: self.n, normalization: self.normalization, blocks: self.blocks.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_field(&self, j: usize) -> &RadialField {
        &self.fields[j]
    }

    /// Index and distance of the block whose closed ball contains `p`.
    pub fn locate(&self, p: &[f64]) -> Option<(usize, f64)> {
        self.blocks.iter().enumerate().find_map(|(j, b)| {
            let r = distance(p, &b.center);
            (r <= self.fields[j].max_radius()).then_some((j, r))
        })
    }

    /// `H(p)`: the block's radial field inside its ball, 1 elsewhere.
    pub fn eval(&self, p: &[f64]) -> f64 {
        match self.locate(p) {
            Some((j, r)) => self.fields[j].eval(r),
            None => 1.0,
        }
    }

    /// A bubble (hypersurface with mean curvature `H`) passing through `p`.
    pub fn bubble_through(&self, p: &[f64]) -> Result<BubbleDescriptor> {
        if p.len() != self.n + 1 {
            return Err(Error::InvalidArgument(format!("point has {} coordinates, expected {}", p.len(), self.n + 1)));
        }
        if let Some((j, r)) = self.locate(p) {
            let field = &self.fields[j];
            let g0 = field.curve().g_zero();
            if self.normalization == Normalization::Paper && g0 != 1.0 {
                return Err(Error::NormalizationMismatch { g0 });
            }
            let center = &self.blocks[j].center;
            let q: Vec<f64> = p.iter().zip(center).map(|(a, c)| a - c).collect();
            let t = field.radius_map().invert(r)?;
            let y = field.surface().meridian_point(t);
            let rotation = rotation_between(&y, &q);
            let mapped = apply(&rotation, &y);
            let residual = distance(&mapped, &q);
            return Ok(BubbleDescriptor::RotatedReference {
                block_index: j,
                center: center.clone(),
                rotation,
                profile_t: t,
                residual,
            });
        }
        let dim = self.n + 1;
        let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(DIRECTION_PROBES + 1);
        if let Some(nearest) = self
            .blocks
            .iter()
            .min_by(|a, b| distance(p, &a.center).total_cmp(&distance(p, &b.center)))
        {
            let mut away: Vec<f64> = p.iter().zip(&nearest.center).map(|(a, c)| a - c).collect();
            if normalize(&mut away) {
                candidates.push(away);
            }
        }
        candidates.extend(probe_directions(dim, DIRECTION_PROBES));
        for u in &candidates {
            for sign in [1.0, -1.0] {
                let c: Vec<f64> = p.iter().zip(u).map(|(a, b)| a + sign * b).collect();
                if self.sphere_is_clear(&c, 1.0) {
                    return Ok(BubbleDescriptor::RoundSphere { center: c, radius: 1.0 });
                }
            }
        }
        Err(Error::NoBubble)
    }

    // The closed ball of radius `radius` at `c` meets no block ball interior.
    fn sphere_is_clear(&self, c: &[f64], radius: f64) -> bool {
        self.blocks
            .iter()
            .zip(&self.fields)
            .all(|(b, f)| distance(c, &b.center) >= f.max_radius() + radius)
    }

    /// Mean curvature of the bubble `desc` at the point `p` on it.
    ///
    /// For a rotated copy of `S_ε`, `p` is pulled back to the reference
    /// surface and its profile parameter is read off geometrically (angle
    /// about the profile centre), independently of the radius inversion.
    pub fn bubble_mean_curvature(&self, desc: &BubbleDescriptor, p: &[f64]) -> f64 {
        match desc {
            BubbleDescriptor::RoundSphere { radius, .. } => 1.0 / radius,
            BubbleDescriptor::RotatedReference { block_index, center, rotation, .. } => {
                let field = &self.fields[*block_index];
                let q: Vec<f64> = p.iter().zip(center).map(|(a, c)| a - c).collect();
                let back = apply_transpose(rotation, &q);
                let n = self.n;
                let rho = back[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
                let t = rho.atan2(back[n] - field.curve().g_pi());
                field.surface().mean_curvature_of_t(t)
            }
        }
    }
}

/// A hypersurface through a query point whose mean curvature matches the
/// field there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BubbleDescriptor {
    /// `center + rotation · S_ε` for the block's reference surface.
    RotatedReference {
        block_index: usize,
        center: Vec<f64>,
        /// Row-major orthogonal matrix.
        rotation: Vec<Vec<f64>>,
        /// Profile parameter of the preimage of the query point.
        profile_t: f64,
        /// Distance between the mapped reference point and the query point.
        residual: f64,
    },
    RoundSphere { center: Vec<f64>, radius: f64 },
}

impl BubbleDescriptor {
    /// Distance of `p` from the described hypersurface's defining point (the
    /// image of the reference section for rotated copies, the sphere itself
    /// for round spheres).
    pub fn miss_distance(&self, gf: &GlobalField, p: &[f64]) -> f64 {
        match self {
            BubbleDescriptor::RoundSphere { center, radius } => (distance(p, center) - radius).abs(),
            BubbleDescriptor::RotatedReference { block_index, center, rotation, profile_t, .. } => {
                let y = gf.block_field(*block_index).surface().meridian_point(*profile_t);
                let mapped = apply(rotation, &y);
                let image: Vec<f64> = mapped.iter().zip(center).map(|(a, c)| a + c).collect();
                distance(&image, p)
            }
        }
    }
}

pub const DIRECTION_PROBES: usize = 64;

/// Deterministic, well-spread unit vectors in `ℝ^dim`: `e_dim` first, then
/// normalized Halton points of the cube `[-1, 1]^dim`.
pub fn probe_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    assert!(dim <= PRIMES.len(), "probe directions support up to {} dimensions", PRIMES.len());
    let mut out = Vec::with_capacity(count);
    let mut up = vec![0.0; dim];
    up[dim - 1] = 1.0;
    out.push(up);
    let mut k = 1u64;
    while out.len() < count {
        let mut v: Vec<f64> = PRIMES[..dim].iter().map(|&b| 2.0 * radical_inverse(k, b) - 1.0).collect();
        k += 1;
        if v.iter().map(|x| x * x).sum::<f64>() < 1e-4 {
            continue;
        }
        normalize(&mut v);
        out.push(v);
    }
    out
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut acc = 0.0;
    while k > 0 {
        acc += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    acc
}

/// Builds an `n+1`-dimensional lattice of identical blocks at
/// `spacing · {-extent, ..., extent}^{n+1}`.
pub fn periodic_lattice(
    h: &PerturbationSpec,
    epsilon: f64,
    spacing: f64,
    extent: usize,
    n: usize,
    normalization: Normalization,
) -> Result<GlobalField> {
    let proto = Block::new(vec![0.0; n + 1], epsilon, h.clone());
    if spacing < proto.max_radius() + 2.0 {
        return Err(Error::SpacingViolation(0, 1));
    }
    let dim = n + 1;
    let side = 2 * extent + 1;
    let total = side.pow(dim as u32);
    let blocks = (0..total)
        .map(|mut code| {
            let mut center = vec![0.0; dim];
            for c in center.iter_mut().rev() {
                *c = spacing * ((code % side) as f64 - extent as f64);
                code /= side;
            }
            Block::new(center, epsilon, h.clone())
        })
        .collect();
    GlobalField::new(n, normalization, blocks)
}

/// Heterogeneous blocks, each certified for its own `(h, ε)`.
pub fn mixed_blocks(specs: Vec<(Vec<f64>, f64, PerturbationSpec)>, n: usize, normalization: Normalization) -> Result<GlobalField> {
    let blocks = specs.into_iter().map(|(c, e, h)| Block::new(c, e, h)).collect();
    GlobalField::new(n, normalization, blocks)
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n < 1e-300 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Rotation in the plane spanned by `from` and `to` taking the direction of
/// `from` onto the direction of `to`; identity when they are parallel.
pub fn rotation_between(from: &[f64], to: &[f64]) -> Vec<Vec<f64>> {
    let d = from.len();
    let mut rot: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut u = from.to_vec();
    let mut w = to.to_vec();
    if !normalize(&mut u) || !normalize(&mut w) {
        return rot;
    }
    let c = dot(&u, &w).clamp(-1.0, 1.0);
    let mut v: Vec<f64> = w.iter().zip(&u).map(|(wi, ui)| wi - c * ui).collect();
    let s;
    if !normalize(&mut v) || v.iter().any(|x| !x.is_finite()) || (1.0 - c.abs()) < 1e-30 {
        if c > 0.0 {
            return rot;
        }
        // antiparallel: half-turn in a plane containing u
        let k = (0..d).min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap();
        v = vec![0.0; d];
        v[k] = 1.0;
        let proj = u[k];
        v.iter_mut().zip(&u).for_each(|(x, ui)| *x -= proj * ui);
        normalize(&mut v);
        s = 0.0;
    } else {
        s = (1.0 - c * c).sqrt();
    }
    for i in 0..d {
        for j in 0..d {
            rot[i][j] += (c - 1.0) * (u[i] * u[j] + v[i] * v[j]) + s * (v[i] * u[j] - u[i] * v[j]);
        }
    }
    rot
}

pub fn apply(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

pub fn apply_transpose(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (0..d).map(|j| (0..d).map(|i| m[i][j] * x[i]).sum()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
