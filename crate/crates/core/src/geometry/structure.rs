use crate::error::EvalError;
use crate::linalg::{self, Vec4};
use crate::scalar::{point_to_f64, Point, Real, U, X, Y};

use super::curvature::{curvature_at, CurvatureBundle, LocalGeometry};
use super::metric::MetricField;

/// Relative singular-value cutoff for numerical rank.
pub const RANK_TOL: f64 = 1e-9;
/// Absolute tolerance for inner products, ω components and residuals that
/// vanish identically on exact inputs.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Below this Frobenius norm the curvature counts as zero.
pub const ZERO_CURVATURE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RicciImage<T> {
    /// Singular values of the Ricci operator, descending.
    pub singular_values: [T; 4],
    pub rank: usize,
    /// Euclidean-orthonormal basis of the image.
    pub basis: Vec<Vec4<T>>,
    /// Largest `|g(b_i, b_j)|` over basis pairs.
    pub max_inner: T,
    pub isotropic: bool,
}

/// Numerical column space of the Ricci operator and whether it is totally
/// isotropic.
pub fn ricci_operator_image<T: Real>(bundle: &CurvatureBundle<T>) -> RicciImage<T> {
    let (singular_values, basis) = linalg::column_space(&bundle.ricci_op, T::lit(RANK_TOL));
    let mut max_inner = T::zero();
    for a in &basis {
        for b in &basis {
            max_inner = max_inner.max(linalg::bilinear(&bundle.metric, a, b).abs());
        }
    }
    RicciImage {
        singular_values,
        rank: basis.len(),
        isotropic: max_inner < T::lit(STRUCTURE_TOL),
        basis,
        max_inner,
    }
}

/// `(∇_i ρ)_jk − (∇_j ρ)_ik`.
pub fn codazzi_component<T: Real>(bundle: &CurvatureBundle<T>, i: usize, j: usize, k: usize) -> T {
    bundle.nabla_ricci[i][j][k] - bundle.nabla_ricci[j][i][k]
}

/// Largest Codazzi component over all coordinate triples.
pub fn codazzi_defect_of<T: Real>(bundle: &CurvatureBundle<T>) -> T {
    let mut m = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                m = m.max(codazzi_component(bundle, i, j, k).abs());
            }
        }
    }
    m
}

pub fn codazzi_defect<T: Real>(g: &MetricField<T>, p: &Point<T>) -> Result<T, EvalError> {
    Ok(codazzi_defect_of(&curvature_at(g, p)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrStructure<T> {
    /// `g(V, V)` for `V = ∂_u`.
    pub v_norm: T,
    /// `ω(∂_i)` from `∇_{∂_i} V = ω(∂_i) V`.
    pub omega: [T; 4],
    /// Largest component of `∇_{∂_i} V` transverse to `V`.
    pub proportionality_residual: T,
    pub recurrent: bool,
    pub parallel: bool,
    /// Largest `|R(a, b, ·, ·)|` for `a, b ∈ V^⊥ = span{∂_u, ∂_x, ∂_y}`.
    pub perp_curvature_residual: T,
}

/// Checks `V = ∂_u` is lightlike and recurrent and that `R(V^⊥, V^⊥, ·, ·) = 0`.
pub fn check_pr_structure<T: Real>(g: &MetricField<T>, p: &Point<T>) -> Result<PrStructure<T>, EvalError> {
    let local = LocalGeometry::at(g, p)?;
    let b = local.bundle();
    Ok(pr_structure_of(&b))
}

pub fn pr_structure_of<T: Real>(b: &CurvatureBundle<T>) -> PrStructure<T> {
    let gamma = &b.christoffel;
    // ∇_{∂_i} ∂_u = Γ^k_{iu} ∂_k
    let omega: [T; 4] = std::array::from_fn(|i| gamma[U][i][U]);
    let mut transverse = T::zero();
    for row in gamma.iter().skip(1) {
        for i in 0..4 {
            transverse = transverse.max(row[i][U].abs());
        }
    }
    let perp = [U, X, Y];
    let mut perp_res = T::zero();
    for &a in &perp {
        for &c in &perp {
            for k in 0..4 {
                for l in 0..4 {
                    perp_res = perp_res.max(b.riemann[a][c][k][l].abs());
                }
            }
        }
    }
    let tol = T::lit(STRUCTURE_TOL);
    let v_norm = b.metric[U][U];
    PrStructure {
        v_norm,
        omega,
        proportionality_residual: transverse,
        recurrent: v_norm.abs() < tol && transverse < tol,
        parallel: omega.iter().all(|w| w.abs() < tol),
        perp_curvature_residual: perp_res,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrentFit<T> {
    /// Fitted `σ(∂_e)`.
    pub sigma: [T; 4],
    /// `|∇R − σ ⊗ R| / |∇R|`, zero when `∇R` itself vanishes.
    pub defect: T,
    pub riemann_norm: T,
    pub nabla_norm: T,
}

/// Least-squares fit of `∇_e R = σ(e) R` per coordinate direction.
pub fn recurrent_curvature_defect<T: Real>(g: &MetricField<T>, p: &Point<T>) -> Result<RecurrentFit<T>, EvalError> {
    recurrent_fit_of(&curvature_at(g, p)?)
}

pub fn recurrent_fit_of<T: Real>(b: &CurvatureBundle<T>) -> Result<RecurrentFit<T>, EvalError> {
    let r = b.riemann.iter().flatten().flatten().flatten();
    let rr: T = r.clone().map(|&x| x * x).sum();
    let riemann_norm = rr.sqrt();
    if !(riemann_norm >= T::lit(ZERO_CURVATURE)) {
        return Err(EvalError::ZeroCurvature {
            norm: riemann_norm.to_f64_lossy(),
            point: point_to_f64(&b.point),
        });
    }
    let mut sigma = [T::zero(); 4];
    let mut resid = T::zero();
    let mut total = T::zero();
    for (e, s) in sigma.iter_mut().enumerate() {
        let ne = b.nabla_riemann[e].iter().flatten().flatten().flatten();
        let dot: T = ne.clone().zip(r.clone()).map(|(&a, &x)| a * x).sum();
        *s = dot / rr;
        for (&a, &x) in ne.zip(r.clone()) {
            let d = a - *s * x;
            resid += d * d;
            total += a * a;
        }
    }
    let nabla_norm = total.sqrt();
    let defect = if nabla_norm > T::zero() {
        resid.sqrt() / nabla_norm
    } else {
        T::zero()
    };
    Ok(RecurrentFit {
        sigma,
        defect,
        riemann_norm,
        nabla_norm,
    })
}
