//! Even, 2π-periodic perturbation functions `h` with exact derivatives.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Tolerance on the derivative constraints `h''(0) = h''''(0) = h''(π) = 0`,
/// relative to the size of the coefficients involved.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-9;

/// A perturbation `h` of the unit circle's polar radius.
///
/// Every family is even and 2π-periodic by construction. The canonical JSON
/// encoding is tagged by `kind`:
///
/// ```text
/// {"kind":"sin_power","m":3}
/// {"kind":"cosine_series","coeffs":[a1, a2, ...]}
/// {"kind":"bump","support":[a, b]}
/// {"kind":"zero"}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationSpec {
    /// `h(t) = sin(t)^(2m)`, `m >= 3`.
    SinPower { m: u32 },
    /// `h(t) = Σ_{k>=1} a_k cos(k t)`, with `coeffs[0] = a_1`.
    CosineSeries { coeffs: Vec<f64> },
    /// Smooth bump `exp(-1/(t - a) - 1/(b - t))` on `(a, b) ⊂ (0, π)`, zero
    /// elsewhere; peak value `exp(-4/(b - a))` at the midpoint.
    Bump { support: [f64; 2] },
    /// `h ≡ 0`.
    Zero,
}

impl PerturbationSpec {
    /// `sin⁶`, the standard example.
    pub fn sin6() -> Self {
        PerturbationSpec::SinPower { m: 3 }
    }

    /// Checks the parameter ranges and the derivative constraints at 0 and π.
    pub fn validate(&self) -> Result<()> {
        match self {
            PerturbationSpec::SinPower { m } => {
                if *m < 3 {
                    return Err(Error::ConstraintViolation(format!(
                        "sin_power exponent half m = {m} must be >= 3"
                    )));
                }
            }
            PerturbationSpec::Bump { support: [a, b] } => {
                if !(a.is_finite() && b.is_finite() && 0.0 < *a && a < b && *b < PI) {
                    return Err(Error::ConstraintViolation(format!(
                        "bump support ({a}, {b}) must satisfy 0 < a < b < π"
                    )));
                }
            }
            PerturbationSpec::CosineSeries { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::ConstraintViolation(
                        "cosine_series coefficients must be finite".into(),
                    ));
                }
            }
            PerturbationSpec::Zero => {}
        }
        let d0 = self.derivatives(0.0);
        let dpi = self.derivatives(PI);
        let scale = self.derivative_scale();
        let checks = [("h''(0)", d0[2]), ("h''''(0)", d0[4]), ("h''(pi)", dpi[2])];
        for (name, v) in checks {
            if v.abs() > CONSTRAINT_TOLERANCE * scale {
                return Err(Error::ConstraintViolation(format!("{name} = {v:e} is not zero")));
            }
        }
        Ok(())
    }

    // Magnitude bound for fourth derivatives, used to scale constraint checks.
    fn derivative_scale(&self) -> f64 {
        match self {
            PerturbationSpec::CosineSeries { coeffs } => {
                1.0 + coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a.abs() * ((i + 1) as f64).powi(4))
                    .sum::<f64>()
            }
            _ => 1.0,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivatives(t)[0]
    }

    /// `[h, h', h'', h''', h'''']` at `t`.
    pub fn derivatives(&self, t: f64) -> [f64; 5] {
        match self {
            PerturbationSpec::Zero => [0.0; 5],
            PerturbationSpec::SinPower { m } => {
                let (s, _) = Jet::variable(t).sin_cos();
                s.powi(2 * m).derivatives()
            }
            PerturbationSpec::CosineSeries { coeffs } => {
                let mut d = [0.0; 5];
                for (i, a) in coeffs.iter().enumerate() {
                    let k = (i + 1) as f64;
                    let (s, c) = ((k * t).sin(), (k * t).cos());
                    // d^j/dt^j cos(kt) cycles through cos, -sin, -cos, sin
                    let cycle = [c, -s, -c, s, c];
                    for (j, dj) in d.iter_mut().enumerate() {
                        *dj += a * k.powi(j as i32) * cycle[j];
                    }
                }
                d
            }
            PerturbationSpec::Bump { support: [a, b] } => {
                // reduce to [0, π] using evenness and periodicity
                let mut tau = t.rem_euclid(TAU);
                let mut flip = false;
                if tau > PI {
                    tau = TAU - tau;
                    flip = true;
                }
                if tau <= *a || tau >= *b {
                    return [0.0; 5];
                }
                let x = Jet::variable(tau);
                let w = -((x + (-a)).recip() + (-x + *b).recip());
                if w.value() < -700.0 {
                    return [0.0; 5];
                }
                let mut d = w.exp().derivatives();
                if flip {
                    d[1] = -d[1];
                    d[3] = -d[3];
                }
                d
            }
        }
    }
}

impl fmt::Display for PerturbationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerturbationSpec::SinPower { m } => write!(f, "sin_power:{m}"),
            PerturbationSpec::CosineSeries { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "cosine_series:{}", parts.join(","))
            }
            PerturbationSpec::Bump { support: [a, b] } => write!(f, "bump:{a},{b}"),
            PerturbationSpec::Zero => write!(f, "zero"),
        }
    }
}

/// Parses the command-line shorthand `KIND[:ARGS]`, e.g. `sin_power:3`,
/// `bump:0.8,2.3`, `cosine_series:0,-0.46875,0,0.1875,0,-0.03125`, `zero`.
impl FromStr for PerturbationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let floats = |a: Option<&str>| -> Result<Vec<f64>> {
            a.unwrap_or("")
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad number {x:?}: {e}")))
                })
                .collect()
        };
        let spec = match kind {
            "zero" => PerturbationSpec::Zero,
            "sin_power" => {
                let m = args
                    .ok_or_else(|| Error::InvalidArgument("sin_power needs :M".into()))?
                    .parse::<u32>()
                    .map_err(|e| Error::InvalidArgument(format!("bad sin_power exponent: {e}")))?;
                PerturbationSpec::SinPower { m }
            }
            "cosine_series" => PerturbationSpec::CosineSeries { coeffs: floats(args)? },
            "bump" => {
                let v = floats(args)?;
                if v.len() != 2 {
                    return Err(Error::InvalidArgument("bump needs :A,B".into()));
                }
                PerturbationSpec::Bump { support: [v[0], v[1]] }
            }
            other => return Err(Error::InvalidArgument(format!("unknown perturbation kind {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}
