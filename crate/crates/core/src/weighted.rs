//! Density calculus and the weighted Einstein tensor `G^h = hρ − Hess h + Δh g`.

use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::expr::ScalarField;
use crate::geometry::{values, CurvatureBundle, LocalGeometry, MetricField};
use crate::jets::Jet3;
use crate::linalg::{Mat4, Vec4};
use crate::scalar::{point_to_f64, Point, Real};

/// Default tolerance for the lightlike test.
pub const LIGHTLIKE_TOL: f64 = 1e-10;

/// Region where a density is expected to be positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PositivityHint {
    /// Whole chart.
    Global,
    /// Axis-aligned box `lo ≤ p ≤ hi`.
    Box { lo: [f64; 4], hi: [f64; 4] },
    /// `normal · p > offset`.
    HalfSpace { normal: [f64; 4], offset: f64 },
}

impl PositivityHint {
    pub fn contains(&self, p: &[f64; 4]) -> bool {
        match self {
            PositivityHint::Global => true,
            PositivityHint::Box { lo, hi } => (0..4).all(|i| lo[i] <= p[i] && p[i] <= hi[i]),
            PositivityHint::HalfSpace { normal, offset } => (0..4).map(|i| normal[i] * p[i]).sum::<f64>() > *offset,
        }
    }
}

/// Positive density `h` of a weighted spacetime.
#[derive(Debug, Clone)]
pub struct DensityField<T> {
    pub h: ScalarField<T>,
    pub hint: Option<PositivityHint>,
}

impl<T: Real> DensityField<T> {
    pub fn new(h: ScalarField<T>) -> Self {
        Self { h, hint: None }
    }

    pub fn with_hint(h: ScalarField<T>, hint: PositivityHint) -> Self {
        Self { h, hint: Some(hint) }
    }

    /// Jet of `h` at `p`, rejecting nonpositive values.
    pub fn eval(&self, p: &Point<T>) -> Result<Jet3<T>, EvalError> {
        let j = self.h.eval(p)?;
        if !(j.value() > T::zero()) {
            return Err(EvalError::NonPositiveDensity {
                value: j.value().to_f64_lossy(),
                point: point_to_f64(p),
            });
        }
        Ok(j)
    }

    /// Value of `h` at `p` without the positivity check.
    pub fn value(&self, p: &Point<T>) -> Result<T, EvalError> {
        self.h.value(p)
    }

    /// True if the gradient of `h` is nonzero at some of the given points.
    pub fn is_nonconstant(&self, points: &[Point<T>], tol: T) -> Result<bool, EvalError> {
        for p in points {
            let j = self.h.eval(p)?;
            if j.gradient().iter().any(|d| d.abs() > tol) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Weighted tensors at a point, all fully lowered except `grad_h`.
#[derive(Debug, Clone)]
pub struct WeightedTensors<T> {
    pub point: Point<T>,
    pub h: T,
    /// `∂_i h`.
    pub dh: Vec4<T>,
    /// `∇h` with index raised.
    pub grad_h: Vec4<T>,
    pub hess_h: Mat4<T>,
    pub lap_h: T,
    /// `g(∇h, ∇h)`.
    pub grad_norm_sq: T,
    pub gh: Mat4<T>,
    /// `g^{ij} (∇_i G^h)_jk`.
    pub div_gh: Vec4<T>,
    /// Largest component of `h ρ`.
    pub h_rho_max: T,
}

/// Curvature and weighted tensors at `p`.
pub fn weighted_with_curvature<T: Real>(
    g: &MetricField<T>,
    h: &DensityField<T>,
    p: &Point<T>,
) -> Result<(CurvatureBundle<T>, WeightedTensors<T>), EvalError> {
    let hj = h.eval(p)?;
    let local = LocalGeometry::at(g, p)?;
    let gamma = &local.christoffel;
    let dh: [Jet3<T>; 4] = std::array::from_fn(|i| hj.partial(i));

    let mut hess = [[Jet3::zero(); 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let mut s = dh[j].partial(i);
            for k in 0..4 {
                s -= gamma[k][i][j] * dh[k];
            }
            hess[i][j] = s;
            hess[j][i] = s;
        }
    }
    let mut lap = Jet3::zero();
    for i in 0..4 {
        for j in 0..4 {
            if local.ginv[i][j].max_abs() != T::zero() {
                lap += local.ginv[i][j] * hess[i][j];
            }
        }
    }
    let mut gh = [[Jet3::zero(); 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let s = hj * local.ricci[i][j] - hess[i][j] + lap * local.g[i][j];
            gh[i][j] = s;
            gh[j][i] = s;
        }
    }

    let bundle = local.bundle();
    let gam = &bundle.christoffel;
    let ghv = values(&gh);
    let inv = &bundle.inverse;
    let div_gh: Vec4<T> = std::array::from_fn(|k| {
        let mut s = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                if inv[i][j] == T::zero() {
                    continue;
                }
                let mut nab = gh[j][k].d1(i);
                for m in 0..4 {
                    nab -= gam[m][i][j] * ghv[m][k] + gam[m][i][k] * ghv[j][m];
                }
                s += inv[i][j] * nab;
            }
        }
        s
    });

    let hv = hj.value();
    let dhv: Vec4<T> = std::array::from_fn(|i| dh[i].value());
    let grad_h: Vec4<T> = std::array::from_fn(|i| (0..4).map(|j| inv[i][j] * dhv[j]).sum());
    let grad_norm_sq = (0..4).map(|i| grad_h[i] * dhv[i]).sum();
    let h_rho_max = bundle
        .ricci
        .iter()
        .flatten()
        .fold(T::zero(), |m, &r| m.max((hv * r).abs()));

    let wt = WeightedTensors {
        point: *p,
        h: hv,
        dh: dhv,
        grad_h,
        hess_h: values(&hess),
        lap_h: lap.value(),
        grad_norm_sq,
        gh: ghv,
        div_gh,
        h_rho_max,
    };
    Ok((bundle, wt))
}

/// Weighted tensors of `(g, h)` at `p`.
pub fn weighted_at<T: Real>(
    g: &MetricField<T>,
    h: &DensityField<T>,
    p: &Point<T>,
) -> Result<WeightedTensors<T>, EvalError> {
    Ok(weighted_with_curvature(g, h, p)?.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalTag {
    Zero,
    Lightlike,
    Spacelike,
    Timelike,
}

impl CausalTag {
    pub fn name(self) -> &'static str {
        match self {
            CausalTag::Zero => "zero",
            CausalTag::Lightlike => "lightlike",
            CausalTag::Spacelike => "spacelike",
            CausalTag::Timelike => "timelike",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Causal {
    pub tag: CausalTag,
    /// `|∇h|²` lies within a factor 10 of the lightlike threshold.
    pub near_threshold: bool,
}

/// Causal character of `∇h`.
pub fn causal_character<T: Real>(wt: &WeightedTensors<T>, tol: T) -> Causal {
    if wt.grad_h.iter().all(|c| c.abs() < tol) {
        return Causal {
            tag: CausalTag::Zero,
            near_threshold: false,
        };
    }
    let euclid: T = wt.grad_h.iter().map(|&c| c * c).sum();
    let threshold = tol * (T::one() + euclid);
    let n = wt.grad_norm_sq.abs();
    let ten = T::lit(10.0);
    let near_threshold = n >= threshold / ten && n <= threshold * ten;
    let tag = if n < threshold {
        CausalTag::Lightlike
    } else if wt.grad_norm_sq > T::zero() {
        CausalTag::Spacelike
    } else {
        CausalTag::Timelike
    };
    Causal { tag, near_threshold }
}

/// `max |G^h_ij| / max(1, max |h ρ_ij|)`.
pub fn residual_norm<T: Real>(wt: &WeightedTensors<T>) -> T {
    let g = wt.gh.iter().flatten().fold(T::zero(), |m, &x| m.max(x.abs()));
    g / wt.h_rho_max.max(T::one())
}

impl<T: Real> WeightedTensors<T> {
    /// Largest `|div G^h|` component.
    pub fn div_norm(&self) -> T {
        self.div_gh.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Index pair of the largest `|G^h|` component.
    pub fn worst_component(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for i in 0..4 {
            for j in i..4 {
                if self.gh[i][j].abs() > self.gh[best.0][best.1].abs() {
                    best = (i, j);
                }
            }
        }
        best
    }
}
