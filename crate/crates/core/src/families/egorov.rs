use crate::weighted::{DensityField, PositivityHint};

use super::params::{num, table, Reader};
use super::{constraint, field, Domain, Expected, FamilyError, FamilyParams, FamilySpec};

pub(super) fn defaults(case: &str) -> FamilyParams {
    match case {
        "1a" => table(&[("a", num(-1.0)), ("b", num(-1.0)), ("c1", num(0.0)), ("c2", num(1.0))]),
        "1b" => table(&[("a", num(2.0)), ("b", num(2.0)), ("c1", num(1.0)), ("c2", num(0.0))]),
        "2a" => table(&[("a", num(2.0)), ("c1", num(0.0)), ("c2", num(1.0)), ("hx", num(1.0))]),
        _ => table(&[("a", num(4.0)), ("c1", num(1.0)), ("c2", num(0.0)), ("hx", num(1.0))]),
    }
}

/// Egorov-type plane waves `F = f(v)(a x² + b y²)`: cases `1a`, `1b`
/// (isotropic, global) and `2a`, `2b` (`b = −2a`, affine density in `x`).
pub fn egorov(case: &str, params: &FamilyParams) -> Result<FamilySpec, FamilyError> {
    if !matches!(case, "1a" | "1b" | "2a" | "2b") {
        return Err(FamilyError::UnknownFamily(format!("egorov-{case}")));
    }
    let name = format!("egorov-{case}");
    let r = Reader::new(params, defaults(case));
    r.check_known(&name, false)?;
    let np = r.numbers();
    let a = r.number("a")?;
    let (c1, c2) = (r.number("c1")?, r.number("c2")?);
    let bad = |m: String| Err(constraint(&name, m));
    let (f, h, expected, domain, description) = match case {
        "1a" => {
            let s = a + r.number("b")?;
            if !(s < 0.0) {
                return bad(format!("a + b = {s} must be negative"));
            }
            if !(c2 > -c1 * c1 / (2.0 * s)) {
                return bad(format!("c2 = {c2} must exceed -c1^2/(2(a+b))"));
            }
            (
                "(a*x^2+b*y^2)/(-(a+b)/2*v^2+c1*v+c2)",
                "-(a+b)/2*v^2+c1*v+c2",
                Expected::isotropic(true),
                Domain::new([-1.0, -2.0, -2.0, -2.0], [1.0, 2.0, 2.0, 2.0]),
                "rational profile over a quadratic density",
            )
        }
        "1b" => {
            let s = a + r.number("b")?;
            if !(s > 0.0) {
                return bad(format!("a + b = {s} must be positive"));
            }
            if !(c1 > c2.abs()) {
                return bad("need c1 > |c2|".into());
            }
            (
                "-(1+(a+b)*exp(4*v))/(a+b)*(a*x^2+b*y^2)",
                "exp(-v)*(c1*cosh(0.5*exp(2*v)*sqrt(a+b))+c2*sinh(0.5*exp(2*v)*sqrt(a+b)))",
                Expected::isotropic(true),
                Domain::new([-1.0, -1.5, -2.0, -2.0], [1.0, 1.0, 2.0, 2.0]),
                "exponential profile with hyperbolic density",
            )
        }
        "2a" => {
            let hx = r.number("hx")?;
            if a == 0.0 || hx == 0.0 {
                return bad("need a != 0 and hx != 0".into());
            }
            let (lo, hi) = (-1.0, 1.0);
            let steps = 200;
            for i in 0..=steps {
                let v = lo + (hi - lo) * i as f64 / steps as f64;
                if !(a / 2.0 * v * v + c1 * v + c2 > 0.0) {
                    return bad(format!("quadratic a/2 v^2 + c1 v + c2 is not positive at v = {v}"));
                }
            }
            (
                "a*(x^2-2*y^2)/(a/2*v^2+c1*v+c2)",
                "a/2*v^2+c1*v+c2+hx*x",
                Expected::spacelike_pp(true),
                Domain::new([-1.0, lo, -0.5, -1.0], [1.0, hi, 2.0, 1.0]),
                "rational non-isotropic profile with affine density",
            )
        }
        _ => {
            let hx = r.number("hx")?;
            if !(a > 0.0) {
                return bad(format!("a = {a} must be positive"));
            }
            if !(c1 > c2.abs()) {
                return bad("need c1 > |c2|".into());
            }
            if hx == 0.0 {
                return bad("hx must be nonzero".into());
            }
            (
                "(1+a*exp(4*v))*(x^2-2*y^2)",
                "exp(-v)*(c1*cosh(0.5*sqrt(a)*exp(2*v))+c2*sinh(0.5*sqrt(a)*exp(2*v)))+hx*x",
                Expected::spacelike_pp(true),
                Domain::new([-1.0, -1.0, 0.0, -1.0], [1.0, 0.5, 2.0, 1.0]),
                "exponential non-isotropic profile with affine density",
            )
        }
    };
    let f = field("F", f, &np)?;
    let h = field("h", h, &np)?;
    let density = if expected.global {
        DensityField::with_hint(h, PositivityHint::Global)
    } else {
        DensityField::new(h)
    };
    Ok(FamilySpec::new(
        &name,
        r.resolved(),
        f,
        density,
        expected,
        domain,
        description.to_string(),
    ))
}
