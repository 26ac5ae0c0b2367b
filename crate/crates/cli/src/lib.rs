//! `bubblefield` commands: check, field, mesh, verify, fill.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use bubblefield_core::admissibility::{interval_estimate, SearchRange};
use bubblefield_core::field::{GlobalField, RadialField};
use bubblefield_core::io::{self, parse_reals, LatticeSpec, RunConfig};
use bubblefield_core::oracle::{
    discrete_mean_curvature, endpoint_flatness, fd_plane_curvature, hausdorff, shoot_profile, End, ShootingOptions,
};
use bubblefield_core::{certify, Error, Normalization, PerturbationSpec};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "bubblefield", version, about = "Prescribed mean curvature fields with the filling property")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify the admissibility conditions for (h, ε).
    Check(Common),
    /// Sample the global field on a grid (or along a ray with --radial).
    Field(Common),
    /// Triangulate S_ε (n = 2) and write OBJ plus per-vertex curvature CSV.
    Mesh(Common),
    /// Run the shooting, curvature and endpoint oracles.
    Verify(Common),
    /// Describe a bubble through --point.
    Fill(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Perturbation: sin_power:M, cosine_series:A1,A2,..., bump:A,B or zero.
    #[arg(long = "h", default_value = "sin_power:3")]
    pub h: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// paper | exact
    #[arg(long, default_value = "exact")]
    pub norm: String,
    /// Certification grid size (check, verify) or samples per axis (field).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the sampled box (field).
    #[arg(long = "box", default_value_t = 3.0)]
    pub box_half_width: f64,
    /// Mesh resolution per direction.
    #[arg(long, default_value_t = 64)]
    pub res: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run configuration; its keys override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// LO,HI,TOL: also estimate the admissible interval (check).
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// Sample along the first axis instead of a full grid (field).
    #[arg(long)]
    pub radial: bool,
    /// Explicit radii for --radial.
    #[arg(long)]
    pub radii: Option<String>,
    /// Query point X1,...,X{n+1} (fill).
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// SPACING,EXTENT: periodic lattice of identical blocks.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Use the constant field 1 (no blocks).
    #[arg(long)]
    pub no_blocks: bool,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::ConstraintViolation(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Resolves flags and the optional JSON config into one run configuration.
pub fn resolve_config(c: &Common) -> std::result::Result<RunConfig, Failure> {
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let cfg = RunConfig::from_json(&text)?;
        cfg.h.validate()?;
        return Ok(cfg);
    }
    let h: PerturbationSpec = c.h.parse()?;
    let normalization: Normalization = c.norm.parse()?;
    let mut cfg = RunConfig::new(h, c.eps);
    cfg.n = c.n;
    cfg.normalization = normalization;
    if let Some(l) = &c.lattice {
        let v = parse_reals(l)?;
        if v.len() != 2 || v[1] < 0.0 || v[1].fract() != 0.0 {
            return Err(Failure::Usage("--lattice expects SPACING,EXTENT".into()));
        }
        cfg.lattice = Some(LatticeSpec { spacing: v[0], extent: v[1] as usize });
    }
    if c.no_blocks {
        cfg.blocks = Some(Vec::new());
    }
    cfg.out = c.out.as_ref().map(|p| p.display().to_string());
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> std::result::Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    emit(out, &s)
}

fn out_path(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.out.as_ref().map(PathBuf::from)
}

pub fn cmd_check(c: &Common) -> CmdResult {
    let mut cfg = resolve_config(c)?;
    if let Some(g) = c.grid {
        cfg.grid_size = g;
    }
    let report = certify(&cfg.h, cfg.epsilon, cfg.grid_size);
    let interval = match &c.interval {
        Some(s) => {
            let v = parse_reals(s)?;
            if v.len() != 3 || !(v[0] < 0.0 && 0.0 < v[1] && v[2] > 0.0) {
                return Err(Failure::Usage("--interval expects LO,HI,TOL with LO < 0 < HI, TOL > 0".into()));
            }
            Some(interval_estimate(&cfg.h, SearchRange { lo: v[0], hi: v[1], tol: v[2] }, cfg.grid_size))
        }
        None => None,
    };
    emit_json(out_path(&cfg).as_deref(), &json!({ "h": cfg.h, "report": report, "interval": interval }))?;
    Ok(if report.passed { EXIT_OK } else { EXIT_DOMAIN })
}

pub fn cmd_field(c: &Common) -> CmdResult {
    let cfg = resolve_config(c)?;
    let gf = cfg.global_field()?;
    let dim = cfg.n + 1;
    let a = c.box_half_width;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Failure::Usage("--box must be positive".into()));
    }
    let samples = c.grid.unwrap_or(33);
    if samples < 2 {
        return Err(Failure::Usage("--grid must be >= 2 for field sampling".into()));
    }
    let text = if c.radial || c.radii.is_some() {
        let radii = match &c.radii {
            Some(s) => parse_reals(s)?,
            None => (0..samples).map(|i| a * i as f64 / (samples - 1) as f64).collect(),
        };
        let values: Vec<f64> = radii
            .iter()
            .map(|&r| {
                let mut p = vec![0.0; dim];
                p[0] = r;
                gf.eval(&p)
            })
            .collect();
        io::radial_csv(&radii, &values)
    } else {
        if cfg.n > 2 {
            return Err(Failure::Usage(format!("full grids need n <= 2 (got n = {}); use --radial", cfg.n)));
        }
        let axis: Vec<f64> = (0..samples).map(|i| -a + 2.0 * a * i as f64 / (samples - 1) as f64).collect();
        let total = samples.pow(dim as u32);
        let points: Vec<Vec<f64>> = (0..total)
            .map(|mut code| {
                let mut p = vec![0.0; dim];
                for x in p.iter_mut().rev() {
                    *x = axis[code % samples];
                    code /= samples;
                }
                p
            })
            .collect();
        let values: Vec<f64> = points.iter().map(|p| gf.eval(p)).collect();
        io::field_csv(dim, &points, &values)
    };
    emit(out_path(&cfg).as_deref(), &text)?;
    Ok(EXIT_OK)
}

/// `mesh.obj` → `mesh_curvature.csv` next to it.
pub fn curvature_path(obj: &Path) -> PathBuf {
    let stem = obj.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "mesh".into());
    obj.with_file_name(format!("{stem}_curvature.csv"))
}

pub fn cmd_mesh(c: &Common) -> CmdResult {
    let cfg = resolve_config(c)?;
    let Some(obj) = out_path(&cfg) else {
        return Err(Failure::Usage("mesh needs --out PATH.obj".into()));
    };
    if c.res < 8 {
        return Err(Failure::Usage(format!("--res must be >= 8, got {}", c.res)));
    }
    let field = RadialField::new(cfg.h.clone(), cfg.epsilon, cfg.n, cfg.normalization)?;
    let mesh = field.surface().build_mesh(c.res, c.res)?;
    let discrete = discrete_mean_curvature(&mesh)?;
    let (c1, c2) = field.bounds();
    let curvature_max = mesh.mean_curvature.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let curvature_min = mesh.mean_curvature.iter().copied().fold(f64::INFINITY, f64::min);
    let interior_error = (0..mesh.vertices.len())
        .filter(|&v| mesh.param_t[v] > 0.1 * PI && mesh.param_t[v] < 0.9 * PI)
        .map(|v| (discrete[v] - mesh.mean_curvature[v]).abs())
        .fold(0.0, f64::max);
    emit(Some(&obj), &io::mesh_obj(&mesh))?;
    let csv = curvature_path(&obj);
    emit(Some(&csv), &io::curvature_csv(&mesh))?;
    emit_json(
        None,
        &json!({
            "obj": obj.display().to_string(),
            "curvature_csv": csv.display().to_string(),
            "vertices": mesh.vertices.len(),
            "faces": mesh.faces.len(),
            "max_vertex_norm": mesh.max_vertex_norm(),
            "curvature_min": curvature_min,
            "curvature_max": curvature_max,
            "field_bounds": [c1, c2],
            "discrete_curvature_error_away_from_poles": interior_error,
        }),
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Check {
    value: f64,
    tolerance: f64,
    passed: bool,
}

fn check_le(value: f64, tolerance: f64) -> Check {
    Check { value, tolerance, passed: value <= tolerance }
}

pub const FLATNESS_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const TRIANGLE_POINTS: usize = 200;

/// Closed-form, stencil and shooting curvatures at `TRIANGLE_POINTS` shooting
/// samples away from the poles; returns the largest pairwise disagreement.
pub fn oracle_triangle(field: &RadialField, res: &bubblefield_core::oracle::ShootingResult) -> f64 {
    let curve = field.curve();
    let interior: Vec<(f64, f64)> = res
        .samples
        .iter()
        .map(|p| (p.rho.atan2(p.z - curve.g_pi()), p.curvature))
        .filter(|(t, _)| *t > 0.1 * PI && *t < 0.9 * PI)
        .collect();
    let stride = (interior.len() / TRIANGLE_POINTS).max(1);
    interior
        .iter()
        .step_by(stride)
        .take(TRIANGLE_POINTS)
        .map(|&(t, shot)| {
            let closed = curve.plane_curvature(t);
            let pts: Vec<[f64; 2]> = (-2..=2).map(|k| curve.gamma(t + 1e-3 * k as f64)).collect();
            let stencil = fd_plane_curvature(&pts, 2).expect("interior stencil");
            (closed - stencil).abs().max((closed - shot).abs()).max((stencil - shot).abs())
        })
        .fold(0.0, f64::max)
}

pub fn cmd_verify(c: &Common) -> CmdResult {
    let cfg = resolve_config(c)?;
    let field = RadialField::new(cfg.h.clone(), cfg.epsilon, cfg.n, cfg.normalization)?;
    let big_r = field.max_radius();
    let shot = shoot_profile(&field, cfg.n, ShootingOptions::default())?.closed()?;
    let gamma: Vec<[f64; 2]> = (0..4096).map(|i| field.curve().gamma(PI * i as f64 / 4095.0)).collect();
    let closure = check_le(shot.closure_gap, 1e-5 * big_r);
    let haus = check_le(hausdorff(&shot.polyline(), &gamma), 1e-5);
    let triangle = check_le(oracle_triangle(&field, &shot), 1e-4);

    let f = |r: f64| field.eval(r);
    let left = endpoint_flatness(f, 0.0, big_r, End::Left, &FLATNESS_STEPS)?;
    let right = endpoint_flatness(f, 0.0, big_r, End::Right, &FLATNESS_STEPS)?;
    let decreasing = |q: &[f64]| q.windows(2).all(|w| w[1].abs() <= w[0].abs());
    let flat_passed = decreasing(&left) && decreasing(&right);
    let passed = closure.passed && haus.passed && triangle.passed && flat_passed;
    let summary = json!({
        "h": cfg.h,
        "epsilon": cfg.epsilon,
        "n": cfg.n,
        "max_radius": big_r,
        "shooting": {
            "termination": shot.termination,
            "steps": shot.steps,
            "closure_gap": closure,
            "hausdorff": haus,
        },
        "oracle_triangle": triangle,
        "endpoint_flatness": {
            "steps": FLATNESS_STEPS,
            "left": left,
            "right": right,
            "decreasing": flat_passed,
        },
        "passed": passed,
    });
    emit_json(out_path(&cfg).as_deref(), &summary)?;
    Ok(if passed { EXIT_OK } else { EXIT_DOMAIN })
}

pub fn cmd_fill(c: &Common) -> CmdResult {
    let cfg = resolve_config(c)?;
    let Some(point) = &c.point else {
        return Err(Failure::Usage("fill needs --point X1,...".into()));
    };
    let p = parse_reals(point)?;
    let gf: GlobalField = cfg.global_field()?;
    let bubble = gf.bubble_through(&p)?;
    let summary = json!({
        "point": p,
        "field_value": gf.eval(&p),
        "bubble_mean_curvature": gf.bubble_mean_curvature(&bubble, &p),
        "bubble": bubble,
    });
    emit_json(out_path(&cfg).as_deref(), &summary)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Check(c) => cmd_check(c),
        Command::Field(c) => cmd_field(c),
        Command::Mesh(c) => cmd_mesh(c),
        Command::Verify(c) => cmd_verify(c),
        Command::Fill(c) => cmd_fill(c),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("usage error: {m}"),
                Failure::Domain(m) => eprintln!("error: {m}"),
            }
            f.code()
        }
    }
}
