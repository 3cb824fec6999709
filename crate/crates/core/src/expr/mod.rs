//! Expression language for profile functions.
//!
//! Text such as `a*x^2+b*y^2` or `exp(-v)*cosh(0.5*exp(2*v))` is parsed into an
//! [`Expr`], then [`bind`] substitutes parameter values and yields a
//! [`ScalarField`] that evaluates to jets.

mod ast;
mod field;
mod parse;

pub use ast::{BinOp, Expr, Func};
pub use field::{bind, BindError, Params, ScalarField};
pub use parse::{parse, ParseError};

pub(crate) use field::jet_err;

pub use crate::error::EvalError;

/// Parse and bind in one step.
pub fn field_from_text<T: crate::Real>(text: &str, params: &Params) -> Result<ScalarField<T>, FieldError> {
    let ast = parse(text)?;
    Ok(bind(&ast, params)?)
}

/// Failure to turn expression text into a field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Bind(#[from] BindError),
}
