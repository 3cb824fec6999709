//! Verification engine for the vacuum weighted Einstein field equations
//! `h ρ − Hess h + Δh g = 0` on four-dimensional pr-wave spacetimes
//! `g = 2 du dv + F dv² + dx² + dy²`.
//!
//! Derivatives are carried by order-3 Taylor jets ([`jets`]); profile
//! functions come from a small expression language ([`expr`]) or from the
//! built-in solution families ([`families`]). The tensor layers ([`geometry`],
//! [`weighted`]) are generic over the scalar type; [`analysis`] classifies
//! metric/density pairs and hosts the ODE, geodesic and positivity tools.

// Index loops mirror the tensor notation; `!(x > 0)` style tests reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod expr;
pub mod families;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod weighted;

pub use error::EvalError;
pub use scalar::{Point, Real};

/// Double-precision jet.
pub type Jet = jets::Jet3<f64>;
/// Double-precision scalar field.
pub type Field = expr::ScalarField<f64>;
/// Double-precision metric.
pub type Metric = geometry::MetricField<f64>;
/// Double-precision density.
pub type Density = weighted::DensityField<f64>;
/// Double-precision curvature data at a point.
pub type Curvature = geometry::CurvatureBundle<f64>;
/// Double-precision weighted tensors at a point.
pub type Weighted = weighted::WeightedTensors<f64>;
