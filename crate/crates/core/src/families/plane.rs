use crate::analysis::solve_density_ode;
use crate::expr::{Params, ScalarField};
use crate::jets::Jet3;
use crate::scalar::{U, V, X, Y};
use crate::weighted::{DensityField, PositivityHint};

use super::params::{num, table, text, Reader};
use super::{constraint, field, Domain, Expected, FamilyError, FamilyParams, FamilySpec};

const PROBES: [[f64; 4]; 5] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.3, -0.7, 1.1, -0.4],
    [-1.2, 0.5, -0.8, 1.3],
    [0.9, 1.4, 0.2, -1.7],
    [-0.4, -1.1, -1.5, 0.6],
];

fn local_box() -> Domain {
    Domain::new([-1.0, -1.0, -0.5, -1.0], [1.0, 1.0, 2.0, 1.0])
}

fn global_box() -> Domain {
    Domain::new([-1.0, -2.0, -2.0, -2.0], [1.0, 2.0, 2.0, 2.0])
}

pub(super) fn isotropic_defaults() -> FamilyParams {
    table(&[
        ("gamma0", num(-2.0)),
        ("F", text("-(x^2+y^2)/2")),
        ("A", num(1.0)),
        ("B", num(0.0)),
    ])
}

/// pp-wave with `ΔF = γ0 < 0` and `h = A e^{kv} + B e^{−kv}`, `k = √(−γ0/2)`.
pub fn isotropic_pp(params: &FamilyParams) -> Result<FamilySpec, FamilyError> {
    const NAME: &str = "isotropic-pp";
    let r = Reader::new(params, isotropic_defaults());
    r.check_known(NAME, true)?;
    let gamma0 = r.number("gamma0")?;
    let (a, b) = (r.number("A")?, r.number("B")?);
    if !(gamma0 < 0.0) {
        return Err(constraint(NAME, format!("gamma0 = {gamma0} must be negative")));
    }
    if !(a >= 0.0 && b >= 0.0 && a + b > 0.0) {
        return Err(constraint(NAME, "need A, B >= 0 and A + B > 0"));
    }
    let f = field("F", &r.text("F")?, &r.numbers())?;
    let tol = 1e-9 * gamma0.abs().max(1.0);
    for p in &PROBES {
        let j = f.eval(p)?;
        let lap = j.d2(X, X) + j.d2(Y, Y);
        if (lap - gamma0).abs() > tol {
            return Err(constraint(
                NAME,
                format!("Laplacian of F is {lap} at {p:?}, expected {gamma0}"),
            ));
        }
        if j.d1(U).abs() > tol {
            return Err(constraint(NAME, "F must not depend on u"));
        }
    }
    let k = (-gamma0 / 2.0).sqrt();
    let hp = Params::from([("A".into(), a), ("B".into(), b), ("k".into(), k)]);
    let h = field("h", "A*exp(k*v)+B*exp(-k*v)", &hp)?;
    Ok(FamilySpec::new(
        NAME,
        r.resolved(),
        f,
        DensityField::with_hint(h, PositivityHint::Global),
        Expected::isotropic(false),
        global_box(),
        format!("pp-wave with constant transverse Laplacian {gamma0}"),
    ))
}

pub(super) fn corollary_defaults() -> FamilyParams {
    table(&[
        ("A", num(0.0)),
        ("Fx", text("1")),
        ("Fy", text("1")),
        ("c1", num(1.0)),
        ("c2", num(0.0)),
        ("hx", num(1.0)),
        ("v0", num(0.0)),
    ])
}

fn v_profile(name: &str, text: &str, params: &Params) -> Result<ScalarField<f64>, FamilyError> {
    let f = field(name, text, params)?;
    if [U, X, Y].iter().any(|&i| f.depends_on(i)) {
        return Err(FamilyError::BadParam {
            name: name.into(),
            expected: "a function of v only",
        });
    }
    Ok(f)
}

fn is_zero_profile(f: &ScalarField<f64>) -> Result<bool, FamilyError> {
    for p in &PROBES {
        if f.value(p)? != 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Plane wave `F = Fx x² + Fy y² + Fxy xy` with `(2 − A²)Fx + (1 − 2A²)Fy = 0`,
/// `Fxy = −2A(Fx + 2Fy)`, and `h = h0(v) + (x + Ay) hx` where
/// `h0'' + (Fx + Fy) h0 = 0`, `h0(v0) = c1`, `h0'(v0) = c2`.
pub fn corollary_plane_wave(params: &FamilyParams) -> Result<FamilySpec, FamilyError> {
    const NAME: &str = "corollary";
    let r = Reader::new(params, corollary_defaults());
    r.check_known(NAME, true)?;
    let a = r.number("A")?;
    let hx = r.number("hx")?;
    let (c1, c2, v0) = (r.number("c1")?, r.number("c2")?, r.number("v0")?);
    if hx == 0.0 || !hx.is_finite() {
        return Err(constraint(NAME, "hx must be nonzero"));
    }
    let numbers = r.numbers();
    let fx_text = r.text("Fx")?;
    let fx = v_profile("Fx", &fx_text, &numbers)?;
    let critical = (a * a - 0.5).abs() < 1e-12;
    let (f_text, q_text) = if critical {
        if !is_zero_profile(&fx)? {
            return Err(constraint(NAME, "A^2 = 1/2 forces Fx = 0"));
        }
        let fy = r.text("Fy")?;
        v_profile("Fy", &fy, &numbers)?;
        (format!("({fy})*(y^2-({:?})*x*y)", 4.0 * a), format!("-({fy})"))
    } else {
        let k = -(2.0 - a * a) / (1.0 - 2.0 * a * a);
        let m = -2.0 * a * (1.0 + 2.0 * k);
        let q = (1.0 + a * a) / (1.0 - 2.0 * a * a);
        (
            format!("({fx_text})*(x^2+({k:?})*y^2+({m:?})*x*y)"),
            format!("({q:?})*({fx_text})"),
        )
    };
    let f = field("F", &f_text, &numbers)?;
    let q = field("q", &q_text, &numbers)?;
    let domain = local_box();
    let interval = (domain.lo[V].min(v0) - 0.5, domain.hi[V].max(v0) + 0.5);
    let profile = solve_density_ode(&q, v0, c1, c2, interval)?;
    let provenance = format!("h0(v) + (x + {a:?}*y)*{hx:?}, h0'' = ({q_text})*h0");
    let h = ScalarField::from_fn(provenance, [false, true, true, a != 0.0], move |p| {
        let s = Jet3::variable(X, p[X]) + Jet3::variable(Y, p[Y]) * a;
        Ok(profile.jet(p[V])? + s * hx)
    });
    Ok(FamilySpec::new(
        if critical { "corollary-critical" } else { NAME },
        r.resolved(),
        f,
        DensityField::new(h),
        Expected::spacelike_pp(false),
        domain,
        format!("plane wave with affine density along x + {a}y"),
    ))
}

pub(super) fn cw_defaults(nonisotropic: bool) -> FamilyParams {
    if nonisotropic {
        table(&[("a", num(1.0)), ("c1", num(1.0)), ("c2", num(0.0)), ("hx", num(1.0))])
    } else {
        table(&[("a", num(-1.0)), ("b", num(-1.0)), ("c1", num(1.0)), ("c2", num(1.0))])
    }
}

/// Cahen-Wallach spaces `F = a x² + b y²`. Isotropic: `a + b < 0`,
/// `h = c1 e^{kv} + c2 e^{−kv}` with `k = √(−a−b)`. Non-isotropic: `b = −2a`,
/// `h = h0(v) + hx x` with `h0'' = a h0`, `h0(0) = c1`, `h0'(0) = k c2`.
pub fn cahen_wallach(params: &FamilyParams, nonisotropic: bool) -> Result<FamilySpec, FamilyError> {
    if nonisotropic {
        const NAME: &str = "cahen-wallach-nonisotropic";
        let mut given = params.clone();
        let b = given.remove("b");
        let r = Reader::new(&given, cw_defaults(true));
        r.check_known(NAME, false)?;
        let a = r.number("a")?;
        let hx = r.number("hx")?;
        if let Some(b) = b {
            let b = Reader::new(&FamilyParams::from([("b".into(), b)]), FamilyParams::new()).number("b")?;
            if b != -2.0 * a {
                return Err(constraint(NAME, format!("b = {b} must equal -2a")));
            }
        }
        if a == 0.0 || hx == 0.0 {
            return Err(constraint(NAME, "need a != 0 and hx != 0"));
        }
        let k = a.abs().sqrt();
        let (ch, sh) = if a > 0.0 { ("cosh", "sinh") } else { ("cos", "sin") };
        let mut np = r.numbers();
        np.insert("k".into(), k);
        let h = field("h", &format!("c1*{ch}(k*v)+c2*{sh}(k*v)+hx*x"), &np)?;
        let f = field("F", "a*(x^2-2*y^2)", &np)?;
        let mut resolved = r.resolved();
        resolved.insert("b".into(), num(-2.0 * a));
        Ok(FamilySpec::new(
            NAME,
            resolved,
            f,
            DensityField::new(h),
            Expected::spacelike_pp(true),
            local_box(),
            format!("non-isotropic Cahen-Wallach space with a = {a}"),
        ))
    } else {
        const NAME: &str = "cahen-wallach-isotropic";
        let r = Reader::new(params, cw_defaults(false));
        r.check_known(NAME, false)?;
        let (a, b) = (r.number("a")?, r.number("b")?);
        let (c1, c2) = (r.number("c1")?, r.number("c2")?);
        if !(a + b < 0.0) {
            return Err(constraint(NAME, format!("a + b = {} must be negative", a + b)));
        }
        if !(c1 >= 0.0 && c2 >= 0.0 && c1 + c2 > 0.0) {
            return Err(constraint(NAME, "need c1, c2 >= 0 and c1 + c2 > 0"));
        }
        let mut np = r.numbers();
        np.insert("k".into(), (-a - b).sqrt());
        let f = field("F", "a*x^2+b*y^2", &np)?;
        let h = field("h", "c1*exp(k*v)+c2*exp(-k*v)", &np)?;
        Ok(FamilySpec::new(
            NAME,
            r.resolved(),
            f,
            DensityField::with_hint(h, PositivityHint::Global),
            Expected::isotropic(true),
            global_box(),
            format!("isotropic Cahen-Wallach space with a + b = {}", a + b),
        ))
    }
}
