use std::fmt;

use crate::expr::{jet_err, ScalarField};
use crate::jets::Jet3;
use crate::quadrature;
use crate::scalar::{U, V, X, Y};
use crate::weighted::DensityField;

use super::params::{list, num, table, Reader};
use super::{constraint, Domain, Expected, FamilyError, FamilyParams, FamilySpec};

/// Polynomial in `v` with coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, v: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * v + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn jet(&self, v: &Jet3<f64>) -> Jet3<f64> {
        self.0
            .iter()
            .rev()
            .fold(Jet3::zero(), |acc, &c| (acc * *v).add_scalar(c))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*v"),
                _ => format!("{c}*v^{k}"),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join("+"))
        }
    }
}

pub(super) fn defaults() -> FamilyParams {
    table(&[
        ("A", num(0.0)),
        ("h0", list(&[2.0])),
        ("hx", list(&[1.0, 0.1])),
        ("alpha", list(&[0.0])),
    ])
}

/// Gauss-Legendre nodes for the `F0` integral.
const QUAD_ORDER: usize = 8;
const QUAD_PANELS: usize = 4;

/// Three-step pr-wave with density `h = h0(v) + s hx(v)`, `s = x + Ay`, and
/// `F = F0(v, s) + u (α + 2 hx'/hx log h)`, where
/// `F0 = −s/((1+A²) hx) ∫₀¹ S(v, ts) (log h(v, s) − log h(v, ts)) dt` and
/// `S = 2 (hx'/hx) ∂v h log h + α ∂v h + 2 ∂v² h`.
pub fn three_step(params: &FamilyParams) -> Result<FamilySpec, FamilyError> {
    const NAME: &str = "three-step";
    let r = Reader::new(params, defaults());
    r.check_known(NAME, false)?;
    let a = r.number("A")?;
    let h0 = Poly(r.list("h0")?);
    let hx = Poly(r.list("hx")?);
    let alpha = Poly(r.list("alpha")?);
    let domain = Domain::new([-1.0, -1.0, -1.0, -1.0], [1.0, 1.0, 2.0, 1.0]);
    let hxp = hx.derivative();
    let steps = 400;
    for i in 0..=steps {
        let v = domain.lo[V] + (domain.hi[V] - domain.lo[V]) * i as f64 / steps as f64;
        if hx.eval(v).abs() < 1e-12 {
            return Err(constraint(NAME, format!("hx vanishes at v = {v}")));
        }
        if hxp.eval(v).abs() < 1e-12 {
            return Err(constraint(NAME, format!("hx' vanishes at v = {v}")));
        }
        if !(h0.eval(v) > 0.0) {
            return Err(constraint(NAME, format!("h0 is not positive at v = {v}")));
        }
    }

    let profiles = Profiles::new(h0.clone(), hx.clone(), alpha.clone());
    let deps = [true, true, true, a != 0.0];
    let nodes = quadrature::composite(QUAD_ORDER, QUAD_PANELS);
    let pf = profiles.clone();
    let f = ScalarField::from_fn(
        format!("F0(v, x + {a:?}*y) + u*({alpha} + 2*hx'/hx*log(h)) with hx = {hx}"),
        deps,
        move |p| pf.f_jet(p, a, &nodes).map_err(|e| jet_err(e, p)),
    );
    let h = ScalarField::from_fn(
        format!("{h0} + (x + {a:?}*y)*({hx})"),
        [false, true, true, a != 0.0],
        move |p| {
            let (v, s) = vs(p, a);
            let (h, _, _) = profiles.h_at(&v, &s);
            Ok(h)
        },
    );
    let mut resolved = r.resolved();
    resolved.insert("A".into(), num(a));
    Ok(FamilySpec::new(
        NAME,
        resolved,
        f,
        DensityField::new(h),
        Expected::three_step(),
        domain,
        format!("three-step pr-wave with hx = {hx}"),
    ))
}

fn vs(p: &[f64; 4], a: f64) -> (Jet3<f64>, Jet3<f64>) {
    (
        Jet3::variable(V, p[V]),
        Jet3::variable(X, p[X]) + Jet3::variable(Y, p[Y]) * a,
    )
}

#[derive(Debug, Clone)]
struct Profiles {
    h0: [Poly; 3],
    hx: [Poly; 3],
    alpha: Poly,
}

type JetResult = Result<Jet3<f64>, crate::jets::JetError>;

impl Profiles {
    fn new(h0: Poly, hx: Poly, alpha: Poly) -> Self {
        let d = |p: &Poly| {
            let d1 = p.derivative();
            let d2 = d1.derivative();
            [p.clone(), d1, d2]
        };
        Self {
            h0: d(&h0),
            hx: d(&hx),
            alpha,
        }
    }

    /// `(h, ∂v h, ∂v² h)` at transverse coordinate `s`.
    fn h_at(&self, v: &Jet3<f64>, s: &Jet3<f64>) -> (Jet3<f64>, Jet3<f64>, Jet3<f64>) {
        let at = |k: usize| self.h0[k].jet(v) + self.hx[k].jet(v) * *s;
        (at(0), at(1), at(2))
    }

    fn f_jet(&self, p: &[f64; 4], a: f64, nodes: &[(f64, f64)]) -> JetResult {
        let (v, s) = vs(p, a);
        let hx = self.hx[0].jet(&v);
        let ratio = self.hx[1].jet(&v) * hx.recip()?;
        let alpha = self.alpha.jet(&v);
        let log_h = self.h_at(&v, &s).0.ln()?;
        let mut integral = Jet3::zero();
        for &(t, w) in nodes {
            let (h, hv, hvv) = self.h_at(&v, &(s * t));
            let log_ht = h.ln()?;
            let source = (ratio * hv * log_ht).scale(2.0) + alpha * hv + hvv.scale(2.0);
            integral += (source * (log_h - log_ht)).scale(w);
        }
        let f0 = -(s * integral * hx.recip()?).scale(1.0 / (1.0 + a * a));
        let f1 = alpha + (ratio * log_h).scale(2.0);
        Ok(f0 + Jet3::variable(U, p[U]) * f1)
    }
}
