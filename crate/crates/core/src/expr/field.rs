use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::ast::{BinOp, Expr, Func};
use crate::error::EvalError;
use crate::jets::{Jet3, JetError};
use crate::scalar::{point_to_f64, Point, Real};

/// Parameter table used to bind expressions.
pub type Params = BTreeMap<String, f64>;

/// Unresolved parameter references at bind time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("missing parameter(s): {}", missing.join(", "))]
pub struct BindError {
    pub missing: Vec<String>,
}

type JetFn<T> = dyn Fn(&Point<T>) -> Result<Jet3<T>, EvalError> + Send + Sync;
type ValueFn<T> = dyn Fn(&Point<T>) -> Result<T, EvalError> + Send + Sync;

/// A real function of the chart coordinates, evaluated to order-3 jets.
#[derive(Clone)]
pub struct ScalarField<T> {
    jet: Arc<JetFn<T>>,
    value: Option<Arc<ValueFn<T>>>,
    provenance: String,
    deps: [bool; 4],
}

impl<T> fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("provenance", &self.provenance)
            .field("deps", &self.deps)
            .finish()
    }
}

pub(crate) fn jet_err<T: Real>(e: JetError, p: &Point<T>) -> EvalError {
    let point = point_to_f64(p);
    match e {
        JetError::DivisionByZero => EvalError::DivisionByZero { point },
        JetError::Domain { function, value } => EvalError::Domain { function, value, point },
    }
}

impl<T: Real> ScalarField<T> {
    /// Field backed by a jet-valued closure. `deps[i]` declares whether the
    /// field may depend on chart variable `i`.
    pub fn from_fn<F>(provenance: impl Into<String>, deps: [bool; 4], f: F) -> Self
    where
        F: Fn(&Point<T>) -> Result<Jet3<T>, EvalError> + Send + Sync + 'static,
    {
        Self {
            jet: Arc::new(f),
            value: None,
            provenance: provenance.into(),
            deps,
        }
    }

    pub fn constant(c: T) -> Self {
        Self::from_fn(format!("{c}"), [false; 4], move |_| Ok(Jet3::constant(c)))
    }

    /// Field `f(p)` seeded with coordinate jets at `p`.
    pub fn eval(&self, p: &Point<T>) -> Result<Jet3<T>, EvalError> {
        (self.jet)(p)
    }

    /// Point value only. Expression fields evaluate this without jets.
    pub fn value(&self, p: &Point<T>) -> Result<T, EvalError> {
        match &self.value {
            Some(f) => f(p),
            None => Ok((self.jet)(p)?.value()),
        }
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.deps[var]
    }

    pub fn dependencies(&self) -> [bool; 4] {
        self.deps
    }
}

/// Expression tree with parameters replaced by constants.
#[derive(Debug, Clone)]
enum Bound<T> {
    Const(T),
    Var(usize),
    Neg(Box<Bound<T>>),
    Binary(BinOp, Box<Bound<T>>, Box<Bound<T>>),
    Pow(Box<Bound<T>>, f64),
    Call(Func, Box<Bound<T>>),
}

impl<T: Real> Bound<T> {
    fn from_expr(e: &Expr, params: &Params) -> Self {
        match e {
            Expr::Num(x) => Bound::Const(T::lit(*x)),
            Expr::Var(i) => Bound::Var(*i),
            Expr::Param(p) => Bound::Const(T::lit(params[p])),
            Expr::Neg(a) => Bound::Neg(Box::new(Self::from_expr(a, params))),
            Expr::Binary(op, a, b) => Bound::Binary(
                *op,
                Box::new(Self::from_expr(a, params)),
                Box::new(Self::from_expr(b, params)),
            ),
            Expr::Pow(a, k) => Bound::Pow(Box::new(Self::from_expr(a, params)), *k),
            Expr::Call(f, a) => Bound::Call(*f, Box::new(Self::from_expr(a, params))),
        }
    }

    fn jet(&self, p: &Point<T>) -> Result<Jet3<T>, EvalError> {
        Ok(match self {
            Bound::Const(c) => Jet3::constant(*c),
            Bound::Var(i) => Jet3::variable(*i, p[*i]),
            Bound::Neg(a) => -a.jet(p)?,
            Bound::Binary(op, a, b) => {
                let (a, b) = (a.jet(p)?, b.jet(p)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a.try_div(&b).map_err(|e| jet_err(e, p))?,
                }
            }
            Bound::Pow(a, k) => a.jet(p)?.powf(*k).map_err(|e| jet_err(e, p))?,
            Bound::Call(f, a) => a.jet(p)?.apply(f.unary()).map_err(|e| jet_err(e, p))?,
        })
    }

    fn value(&self, p: &Point<T>) -> Result<T, EvalError> {
        let domain = |function: &'static str, value: T| EvalError::Domain {
            function,
            value: value.to_f64_lossy(),
            point: point_to_f64(p),
        };
        Ok(match self {
            Bound::Const(c) => *c,
            Bound::Var(i) => p[*i],
            Bound::Neg(a) => -a.value(p)?,
            Bound::Binary(op, a, b) => {
                let (a, b) = (a.value(p)?, b.value(p)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == T::zero() {
                            return Err(EvalError::DivisionByZero { point: point_to_f64(p) });
                        }
                        a / b
                    }
                }
            }
            Bound::Pow(a, k) => {
                let a = a.value(p)?;
                let int = k.fract() == 0.0;
                if (!int && !(a > T::zero())) || (int && *k < 0.0 && a == T::zero()) {
                    return Err(domain("pow", a));
                }
                if int && k.abs() < 1e9 {
                    a.powi(*k as i32)
                } else {
                    a.powf(T::lit(*k))
                }
            }
            Bound::Call(f, a) => {
                let a = a.value(p)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Log if a > T::zero() => a.ln(),
                    Func::Log => return Err(domain("log", a)),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Sqrt if a > T::zero() => a.sqrt(),
                    Func::Sqrt => return Err(domain("sqrt", a)),
                }
            }
        })
    }
}

/// Substitute parameter values into `ast` and produce an evaluatable field.
pub fn bind<T: Real>(ast: &Expr, params: &Params) -> Result<ScalarField<T>, BindError> {
    let missing: Vec<String> = ast.params().into_iter().filter(|p| !params.contains_key(p)).collect();
    if !missing.is_empty() {
        return Err(BindError { missing });
    }
    let bound = Arc::new(Bound::<T>::from_expr(ast, params));
    let vars = ast.variables();
    let deps = std::array::from_fn(|i| vars.contains(&i));
    let b2 = Arc::clone(&bound);
    Ok(ScalarField {
        jet: Arc::new(move |p| bound.jet(p)),
        value: Some(Arc::new(move |p| b2.value(p))),
        provenance: ast.to_string(),
        deps,
    })
}
