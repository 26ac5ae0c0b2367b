//! Run configuration and text writers (CSV, OBJ).
//!
//! Numbers are written with 17 significant digits in scientific notation so
//! that files round-trip every `f64` bit-exactly. Lines end with `\n`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{periodic_lattice, Block, GlobalField, Normalization};
use crate::grid::DEFAULT_GRID_SIZE;
use crate::oracle::ShootingResult;
use crate::perturbation::PerturbationSpec;
use crate::surface::SurfaceMesh;

fn default_n() -> usize {
    2
}

fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}

fn is_default_grid(g: &usize) -> bool {
    *g == DEFAULT_GRID_SIZE
}

/// A lattice of identical blocks built from the run's `h` and `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub spacing: f64,
    pub extent: usize,
}

/// Everything a CLI run needs besides the command and its output options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub h: PerturbationSpec,
    pub epsilon: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default = "default_grid_size", skip_serializing_if = "is_default_grid")]
    pub grid_size: usize,
    /// Explicit blocks of the global field; overrides the single block at
    /// the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Block>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn new(h: PerturbationSpec, epsilon: f64) -> Self {
        RunConfig {
            h,
            epsilon,
            n: 2,
            normalization: Normalization::Exact,
            grid_size: DEFAULT_GRID_SIZE,
            blocks: None,
            lattice: None,
            out: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The global field described by this run: explicit blocks, else a
    /// lattice, else one block at the origin.
    pub fn global_field(&self) -> Result<GlobalField> {
        if let Some(blocks) = &self.blocks {
            return GlobalField::new(self.n, self.normalization, blocks.clone());
        }
        if let Some(l) = self.lattice {
            return periodic_lattice(&self.h, self.epsilon, l.spacing, l.extent, self.n, self.normalization);
        }
        GlobalField::new(self.n, self.normalization, vec![Block::new(vec![0.0; self.n + 1], self.epsilon, self.h.clone())])
    }
}

/// `x` with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&fmt_num(v));
    }
    out.push('\n');
}

/// Field samples: header `x1,...,x{n+1},H`, one row per point.
pub fn field_csv(dim: usize, points: &[Vec<f64>], values: &[f64]) -> String {
    let mut out = String::new();
    for i in 1..=dim {
        let _ = write!(out, "x{i},");
    }
    out.push_str("H\n");
    for (p, v) in points.iter().zip(values) {
        push_row(&mut out, p.iter().copied().chain([*v]));
    }
    out
}

/// Radial profile: header `r,H`.
pub fn radial_csv(radii: &[f64], values: &[f64]) -> String {
    let mut out = String::from("r,H\n");
    for (r, v) in radii.iter().zip(values) {
        push_row(&mut out, [*r, *v]);
    }
    out
}

/// ASCII OBJ with `v` and `f` records only (1-based indices).
pub fn mesh_obj(mesh: &SurfaceMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", fmt_num(v[0]), fmt_num(v[1]), fmt_num(v[2]));
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

/// Per-vertex curvature: header `vertex_index,t,H`.
pub fn curvature_csv(mesh: &SurfaceMesh) -> String {
    let mut out = String::from("vertex_index,t,H\n");
    for (i, (t, h)) in mesh.param_t.iter().zip(&mesh.mean_curvature).enumerate() {
        let _ = writeln!(out, "{i},{},{}", fmt_num(*t), fmt_num(*h));
    }
    out
}

/// Shooting polyline: header `s,rho,z,phi`.
pub fn polyline_csv(res: &ShootingResult) -> String {
    let mut out = String::from("s,rho,z,phi\n");
    for p in &res.samples {
        push_row(&mut out, [p.s, p.rho, p.z, p.phi]);
    }
    out
}

/// Parses a comma-separated list of reals.
pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("not a number: {x:?}"))))
        .collect()
}
