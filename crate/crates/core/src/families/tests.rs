use super::*;
use crate::analysis::{classify, Tolerances};
use crate::geometry::codazzi_defect;
use crate::weighted::{residual_norm, weighted_at};

fn p(items: &[(&str, ParamValue)]) -> FamilyParams {
    params::table(items)
}

#[test]
fn catalogue_instances_solve_and_classify() {
    for spec in catalogue().unwrap() {
        let pts = spec.domain.sample(&spec.density, 24, 7).unwrap();
        for q in &pts {
            let wt = weighted_at(&spec.metric, &spec.density, q).unwrap();
            let r = residual_norm(&wt);
            assert!(r < 1e-8, "{}: residual {r:e} at {q:?}", spec.name);
        }
        let rep = classify(&spec.metric, &spec.density, &pts, &Tolerances::default()).unwrap();
        assert_eq!(rep.branch, spec.expected.branch, "{}: {:?}", spec.name, rep.explanation);
        assert_eq!(rep.nilpotency_index, spec.expected.nilpotency, "{}", spec.name);
        assert_eq!(rep.causal_tag, Some(spec.expected.causal), "{}", spec.name);
        assert_eq!(rep.harmonic_curvature, spec.expected.harmonic, "{}", spec.name);
        assert_eq!(rep.pp_wave, spec.expected.pp_wave, "{}", spec.name);
        assert!(rep.tau_value.abs() < 1e-10 && rep.tau_spread < 1e-10, "{}", spec.name);
    }
}

#[test]
fn isotropic_rejects_bad_shapes() {
    let err = build("isotropic-pp", &p(&[("F", params::text("-(x^2+y^2)/2+x^3"))])).unwrap_err();
    assert!(matches!(err, FamilyError::Constraint { .. }), "{err}");
    assert!(build("isotropic-pp", &p(&[("gamma0", params::num(1.0))])).is_err());
    let zero = p(&[("A", params::num(0.0)), ("B", params::num(0.0))]);
    assert!(build("isotropic-pp", &zero).is_err());
    let both = build("isotropic-pp", &p(&[("B", params::num(1.0))])).unwrap();
    for v in [-3.0, 0.0, 2.5] {
        assert!(both.density.value(&[0.0, v, 0.0, 0.0]).unwrap() >= 2.0 - 1e-12);
    }
}

#[test]
fn cahen_wallach_constraints() {
    let flat_sum = p(&[("a", params::num(1.0)), ("b", params::num(-1.0))]);
    assert!(build("cahen-wallach-isotropic", &flat_sum).is_err());
    let wrong_b = p(&[("b", params::num(1.0))]);
    assert!(build("cahen-wallach-nonisotropic", &wrong_b).is_err());
    let ok_b = p(&[("b", params::num(-2.0))]);
    let spec = build("cahen-wallach-nonisotropic", &ok_b).unwrap();
    assert_eq!(spec.density.value(&[0.0, 0.0, -1.0, 0.0]).unwrap(), 0.0);
    let neg = build("cahen-wallach-nonisotropic", &p(&[("a", params::num(-1.0))])).unwrap();
    let wt = weighted_at(&neg.metric, &neg.density, &[0.0, 0.3, 0.5, 0.2]).unwrap();
    assert!(residual_norm(&wt) < 1e-9);
}

#[test]
fn corollary_profiles() {
    let spec = build("corollary", &FamilyParams::new()).unwrap();
    for v in [-1.0f64, 0.0, 0.7] {
        let h = spec.density.value(&[0.0, v, 0.0, 0.0]).unwrap();
        assert!((h - v.cosh()).abs() < 1e-10, "{h} vs {}", v.cosh());
    }
    let fq = spec.f.eval(&[0.0, 0.2, 1.0, 1.0]).unwrap();
    assert!((fq.d2(X, X) - 2.0).abs() < 1e-14 && (fq.d2(Y, Y) + 4.0).abs() < 1e-14);

    let tilted = p(&[("A", params::num(0.6)), ("Fx", params::text("1+0.5*sin(v)"))]);
    let spec = build("corollary", &tilted).unwrap();
    for q in spec.domain.sample(&spec.density, 10, 3).unwrap() {
        let wt = weighted_at(&spec.metric, &spec.density, &q).unwrap();
        assert!(residual_norm(&wt) < 1e-8);
    }

    let half = p(&[("A", params::num(std::f64::consts::FRAC_1_SQRT_2))]);
    assert!(build("corollary", &half).is_err());
    assert!(build("corollary", &p(&[("hx", params::num(0.0))])).is_err());
    assert!(build("corollary", &p(&[("Fx", params::text("x"))])).is_err());
}

use crate::scalar::{X, Y};

#[test]
fn three_step_codazzi_matches_closed_form() {
    let spec = build("three-step", &FamilyParams::new()).unwrap();
    let (hx, hxp) = (Poly(vec![1.0, 0.1]), Poly(vec![0.1]));
    for q in spec.domain.sample(&spec.density, 8, 11).unwrap() {
        let h = spec.density.value(&q).unwrap();
        let expect = hx.eval(q[1]) * hxp.eval(q[1]) / (h * h);
        let got = codazzi_defect(&spec.metric, &q).unwrap();
        assert!((got - expect).abs() < 1e-8, "{got} vs {expect}");
    }
}

#[test]
fn three_step_with_tilt_and_profiles() {
    let params = p(&[
        ("A", params::num(0.5)),
        ("h0", params::list(&[3.0, 0.2, 0.1])),
        ("hx", params::list(&[1.0, 0.3, -0.1])),
        ("alpha", params::list(&[0.5, 1.0])),
    ]);
    let spec = build("three-step", &params).unwrap();
    for q in spec.domain.sample(&spec.density, 10, 5).unwrap() {
        let wt = weighted_at(&spec.metric, &spec.density, &q).unwrap();
        assert!(residual_norm(&wt) < 1e-8, "{:e}", residual_norm(&wt));
    }
    let flat_hx = p(&[("hx", params::list(&[1.0]))]);
    assert!(matches!(
        build("three-step", &flat_hx),
        Err(FamilyError::Constraint { .. })
    ));
}

#[test]
fn registry_errors_and_sampling() {
    assert!(matches!(
        build("nope", &FamilyParams::new()),
        Err(FamilyError::UnknownFamily(_))
    ));
    let extra = p(&[("zeta", params::num(1.0))]);
    assert!(matches!(
        build("egorov-1a", &extra),
        Err(FamilyError::UnknownParam { .. })
    ));
    assert!(build("egorov-1b", &p(&[("c2", params::num(2.0))])).is_err());
    assert!(build("egorov-2b", &p(&[("a", params::num(-1.0))])).is_err());
    assert!(build("egorov-2a", &p(&[("c2", params::num(-1.0))])).is_err());
    let spec = build("egorov-2b", &FamilyParams::new()).unwrap();
    let a = spec.domain.sample(&spec.density, 5, 42).unwrap();
    assert_eq!(a, spec.domain.sample(&spec.density, 5, 42).unwrap());
    assert_ne!(a, spec.domain.sample(&spec.density, 5, 43).unwrap());
    assert!(!spec.domain.grid(&spec.density, 3).is_empty());
}

#[test]
fn aliases_resolve() {
    let mode = p(&[("mode", params::text("nonisotropic"))]);
    assert_eq!(
        build("cahen_wallach", &mode).unwrap().name,
        "cahen-wallach-nonisotropic"
    );
    assert_eq!(
        build("cahen-wallach", &FamilyParams::new()).unwrap().name,
        "cahen-wallach-isotropic"
    );
    let case = p(&[("case", params::text("1b"))]);
    assert_eq!(build("egorov", &case).unwrap().name, "egorov-1b");
    assert_eq!(build("three_step", &FamilyParams::new()).unwrap().name, "three-step");
    assert!(build("egorov", &p(&[("case", params::text("3c"))])).is_err());
}
