//! Built-in solution families.
//!
//! Each constructor checks its parameter constraints and returns a
//! [`FamilySpec`]: the metric, the density, the classification the family is
//! expected to reproduce and a box of chart points where it is defined.

mod egorov;
mod params;
mod plane;
mod three_step;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{Branch, Nilpotency, OdeError};
use crate::expr::{field_from_text, FieldError, Params, ScalarField};
use crate::geometry::{prwave_metric, MetricField};
use crate::weighted::{CausalTag, DensityField};
use crate::EvalError;

pub use egorov::egorov;
pub use params::{FamilyParams, ParamValue};
pub use plane::{cahen_wallach, corollary_plane_wave, isotropic_pp};
pub use three_step::{three_step, Poly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("{family}: {message}")]
    Constraint { family: String, message: String },
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("family {family} has no parameter '{name}'")]
    UnknownParam { family: String, name: String },
    #[error("missing parameter '{0}'")]
    MissingParam(String),
    #[error("parameter '{name}' must be {expected}")]
    BadParam { name: String, expected: &'static str },
    #[error("parameter '{name}': {source}")]
    Field {
        name: String,
        #[source]
        source: FieldError,
    },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("found {found} of {requested} admissible sample points after {attempts} attempts")]
    Sampling {
        requested: usize,
        found: usize,
        attempts: usize,
    },
}

fn constraint(family: &str, message: impl Into<String>) -> FamilyError {
    FamilyError::Constraint {
        family: family.into(),
        message: message.into(),
    }
}

fn field(name: &str, text: &str, params: &Params) -> Result<ScalarField<f64>, FamilyError> {
    field_from_text(text, params).map_err(|source| FamilyError::Field {
        name: name.into(),
        source,
    })
}

/// Classification a family is expected to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expected {
    pub branch: Branch,
    pub causal: CausalTag,
    pub nilpotency: Nilpotency,
    pub harmonic: bool,
    pub pp_wave: bool,
    /// `h > 0` on the whole chart.
    pub global: bool,
    /// `∇R = σ ⊗ R` for some one-form `σ`.
    pub recurrent: bool,
}

impl Expected {
    fn isotropic(recurrent: bool) -> Self {
        Self {
            branch: Branch::IsotropicPp,
            causal: CausalTag::Lightlike,
            nilpotency: Nilpotency::Step(2),
            harmonic: true,
            pp_wave: true,
            global: true,
            recurrent,
        }
    }

    fn spacelike_pp(recurrent: bool) -> Self {
        Self {
            branch: Branch::Spacelike2StepPp,
            causal: CausalTag::Spacelike,
            nilpotency: Nilpotency::Step(2),
            harmonic: true,
            pp_wave: true,
            global: false,
            recurrent,
        }
    }

    fn three_step() -> Self {
        Self {
            branch: Branch::Spacelike3StepPr,
            causal: CausalTag::Spacelike,
            nilpotency: Nilpotency::Step(3),
            harmonic: false,
            pp_wave: false,
            global: false,
            recurrent: false,
        }
    }
}

/// Chart box used for sampling, intersected with `h > margin`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
    pub margin: f64,
}

impl Domain {
    pub fn new(lo: [f64; 4], hi: [f64; 4]) -> Self {
        Self { lo, hi, margin: 0.1 }
    }

    fn admissible(&self, h: &DensityField<f64>, p: &[f64; 4]) -> bool {
        matches!(h.h.value(p), Ok(x) if x > self.margin)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> [f64; 4] {
        std::array::from_fn(|i| {
            if self.lo[i] < self.hi[i] {
                rng.gen_range(self.lo[i]..=self.hi[i])
            } else {
                self.lo[i]
            }
        })
    }

    /// `n` uniform points of the box, without looking at any density.
    pub fn uniform(&self, n: usize, seed: u64) -> Vec<[f64; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }

    /// `n` uniform points of the box where `h > margin`, by rejection.
    pub fn sample(&self, h: &DensityField<f64>, n: usize, seed: u64) -> Result<Vec<[f64; 4]>, FamilyError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let limit = 1000 * n.max(1);
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n {
            if attempts == limit {
                return Err(FamilyError::Sampling {
                    requested: n,
                    found: out.len(),
                    attempts,
                });
            }
            attempts += 1;
            let p = self.draw(&mut rng);
            if self.admissible(h, &p) {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Regular grid with `counts[i]` points along axis `i`.
    pub fn grid_points(&self, counts: [usize; 4]) -> Vec<[f64; 4]> {
        let axis = |i: usize, k: usize| {
            if counts[i] < 2 {
                0.5 * (self.lo[i] + self.hi[i])
            } else {
                self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (counts[i] - 1) as f64
            }
        };
        let mut out = Vec::new();
        for a in 0..counts[0] {
            for b in 0..counts[1] {
                for c in 0..counts[2] {
                    for d in 0..counts[3] {
                        out.push([axis(0, a), axis(1, b), axis(2, c), axis(3, d)]);
                    }
                }
            }
        }
        out
    }

    /// Regular grid with `n` points per axis, keeping points where `h > margin`.
    pub fn grid(&self, h: &DensityField<f64>, n: usize) -> Vec<[f64; 4]> {
        self.grid_points([n; 4])
            .into_iter()
            .filter(|p| self.admissible(h, p))
            .collect()
    }
}

/// A constructed family instance.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub name: String,
    /// Parameters after defaults were applied.
    pub params: FamilyParams,
    pub f: ScalarField<f64>,
    pub metric: MetricField<f64>,
    pub density: DensityField<f64>,
    pub expected: Expected,
    pub domain: Domain,
    pub description: String,
}

impl FamilySpec {
    fn new(
        name: &str,
        params: FamilyParams,
        f: ScalarField<f64>,
        density: DensityField<f64>,
        expected: Expected,
        domain: Domain,
        description: String,
    ) -> Self {
        Self {
            name: name.into(),
            params,
            metric: prwave_metric(f.clone()),
            f,
            density,
            expected,
            domain,
            description,
        }
    }
}

/// Names accepted by [`build`].
pub const FAMILY_NAMES: [&str; 10] = [
    "isotropic-pp",
    "corollary",
    "three-step",
    "cahen-wallach-isotropic",
    "cahen-wallach-nonisotropic",
    "egorov-1a",
    "egorov-1b",
    "egorov-2a",
    "egorov-2b",
    "corollary-critical",
];

/// Builds a family by name, filling unspecified parameters with defaults.
///
/// Underscores in `name` are read as hyphens. `cahen-wallach` takes its mode
/// from a `mode` parameter (`isotropic` by default) and `egorov` its case
/// from `case`.
pub fn build(name: &str, params: &FamilyParams) -> Result<FamilySpec, FamilyError> {
    let (name, params) = canonical(name, params);
    let params = &params;
    match name.as_str() {
        "isotropic-pp" => isotropic_pp(params),
        "corollary" => corollary_plane_wave(params),
        "corollary-critical" => {
            let mut p = defaults(&name)?;
            p.extend(params.clone());
            corollary_plane_wave(&p)
        }
        "three-step" => three_step(params),
        "cahen-wallach-isotropic" => cahen_wallach(params, false),
        "cahen-wallach-nonisotropic" => cahen_wallach(params, true),
        "egorov-1a" => egorov("1a", params),
        "egorov-1b" => egorov("1b", params),
        "egorov-2a" => egorov("2a", params),
        "egorov-2b" => egorov("2b", params),
        _ => Err(FamilyError::UnknownFamily(name)),
    }
}

/// Resolves aliases to a name from [`FAMILY_NAMES`].
pub fn canonical(name: &str, params: &FamilyParams) -> (String, FamilyParams) {
    let name = name.trim().replace('_', "-");
    let mut params = params.clone();
    let selector = match name.as_str() {
        "cahen-wallach" => Some(("mode", "isotropic")),
        "egorov" => Some(("case", "1a")),
        _ => None,
    };
    let Some((key, default)) = selector else {
        return (name, params);
    };
    let choice = match params.remove(key) {
        Some(v) => v.to_string(),
        None => default.to_string(),
    };
    (format!("{name}-{choice}"), params)
}

/// Default parameter table of a family.
pub fn defaults(name: &str) -> Result<FamilyParams, FamilyError> {
    let (name, _) = canonical(name, &FamilyParams::new());
    Ok(match name.as_str() {
        "isotropic-pp" => plane::isotropic_defaults(),
        "corollary" => plane::corollary_defaults(),
        "corollary-critical" => {
            let mut p = plane::corollary_defaults();
            p.insert("A".into(), ParamValue::Number(std::f64::consts::FRAC_1_SQRT_2));
            p.insert("Fx".into(), ParamValue::Text("0".into()));
            p.insert("Fy".into(), ParamValue::Text("-1".into()));
            p
        }
        "three-step" => three_step::defaults(),
        "cahen-wallach-isotropic" => plane::cw_defaults(false),
        "cahen-wallach-nonisotropic" => plane::cw_defaults(true),
        "egorov-1a" => egorov::defaults("1a"),
        "egorov-1b" => egorov::defaults("1b"),
        "egorov-2a" => egorov::defaults("2a"),
        "egorov-2b" => egorov::defaults("2b"),
        _ => return Err(FamilyError::UnknownFamily(name)),
    })
}

/// Every family at its default parameters.
pub fn catalogue() -> Result<Vec<FamilySpec>, FamilyError> {
    FAMILY_NAMES.iter().map(|n| build(n, &FamilyParams::new())).collect()
}

#[cfg(test)]
mod tests;
