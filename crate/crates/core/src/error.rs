use thiserror::Error;

/// Failure while evaluating a field or tensor at a chart point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{function} undefined at argument {value} (point {point:?})")]
    Domain {
        function: &'static str,
        value: f64,
        point: [f64; 4],
    },
    #[error("division by zero at point {point:?}")]
    DivisionByZero { point: [f64; 4] },
    #[error("density {value} is not positive at point {point:?}")]
    NonPositiveDensity { value: f64, point: [f64; 4] },
    #[error("metric is singular at point {point:?} (det {det})")]
    SingularMetric { det: f64, point: [f64; 4] },
    #[error("{what} is undefined at point {point:?}")]
    OutOfRange { what: String, point: [f64; 4] },
    #[error("curvature vanishes at point {point:?} (|R| = {norm})")]
    ZeroCurvature { norm: f64, point: [f64; 4] },
}

impl EvalError {
    /// Chart point the failure refers to.
    pub fn point(&self) -> [f64; 4] {
        match self {
            EvalError::Domain { point, .. }
            | EvalError::DivisionByZero { point }
            | EvalError::NonPositiveDensity { point, .. }
            | EvalError::SingularMetric { point, .. }
            | EvalError::OutOfRange { point, .. }
            | EvalError::ZeroCurvature { point, .. } => *point,
        }
    }
}
