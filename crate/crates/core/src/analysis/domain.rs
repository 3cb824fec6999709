//! Positivity boundary of a density along a ray.

use serde::Serialize;
use thiserror::Error;

use crate::error::EvalError;
use crate::weighted::DensityField;

/// Bisection stops once the bracket is narrower than this.
pub const BOUNDARY_TOL: f64 = 1e-12;
const SCAN_STEPS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PositivityOutcome {
    /// First parameter along the ray where `h` stops being positive.
    Boundary {
        t: f64,
        point: [f64; 4],
    },
    PositiveOnBracket,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("density is not positive at the base point (h = {value})")]
    NonPositiveBase { value: f64, point: [f64; 4] },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Ray `base + t · direction` for `t` running from `bracket.0` to `bracket.1`
/// (either order).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub base: [f64; 4],
    pub direction: [f64; 4],
}

impl Ray {
    pub fn at(&self, t: f64) -> [f64; 4] {
        std::array::from_fn(|i| self.base[i] + t * self.direction[i])
    }
}

/// Locates the first zero of `h` along the ray, scanning from `bracket.0`.
///
/// Points where `h` cannot be evaluated count as nonpositive, so the
/// boundary of a logarithm's domain is found the same way.
pub fn positivity_domain(
    h: &DensityField<f64>,
    ray: &Ray,
    bracket: (f64, f64),
) -> Result<PositivityOutcome, DomainError> {
    let positive = |t: f64| -> bool { matches!(h.value(&ray.at(t)), Ok(v) if v > 0.0) };
    let (start, end) = bracket;
    let base = ray.at(start);
    let h0 = h.value(&base)?;
    if !(h0 > 0.0) {
        return Err(DomainError::NonPositiveBase { value: h0, point: base });
    }
    let dt = (end - start) / SCAN_STEPS as f64;
    let mut inside = start;
    for k in 1..=SCAN_STEPS {
        let t = if k == SCAN_STEPS { end } else { start + k as f64 * dt };
        if positive(t) {
            inside = t;
            continue;
        }
        let mut outside = t;
        while (outside - inside).abs() > BOUNDARY_TOL {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if positive(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        let t = 0.5 * (inside + outside);
        return Ok(PositivityOutcome::Boundary { t, point: ray.at(t) });
    }
    Ok(PositivityOutcome::PositiveOnBracket)
}
