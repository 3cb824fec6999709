use prwave::analysis::{classify, Tolerances};
use prwave::families::{build, catalogue, FamilyParams, ParamValue};
use prwave::weighted::{residual_norm, weighted_with_curvature};

#[test]
fn every_family_holds_at_one_hundred_points() {
    for spec in catalogue().unwrap() {
        let pts = spec.domain.sample(&spec.density, 100, 0xC0FFEE).unwrap();
        for p in &pts {
            let (b, wt) = weighted_with_curvature(&spec.metric, &spec.density, p).unwrap();
            assert!(residual_norm(&wt) < 1e-8, "{} at {p:?}", spec.name);
            assert!(wt.div_norm() < 1e-7, "{}: div {:e}", spec.name, wt.div_norm());
            assert!(b.tau.abs() < 1e-9, "{}: tau {:e}", spec.name, b.tau);
        }
        let rep = classify(&spec.metric, &spec.density, &pts, &Tolerances::default()).unwrap();
        assert!(rep.is_solution && rep.tau_spread < 1e-9);
        assert_eq!(rep.branch, spec.expected.branch, "{}", spec.name);
        assert_eq!(rep.causal_tag, Some(spec.expected.causal), "{}", spec.name);
        assert_eq!(rep.nilpotency_index, spec.expected.nilpotency, "{}", spec.name);
        assert!(rep.causal_consistent && rep.nilpotency_consistent, "{}", spec.name);
    }
}

#[test]
fn recurrent_families_get_a_note() {
    for name in ["egorov-1a", "egorov-1b"] {
        let spec = build(name, &FamilyParams::new()).unwrap();
        assert!(spec.expected.recurrent);
        let pts = spec.domain.sample(&spec.density, 20, 1).unwrap();
        let rep = classify(&spec.metric, &spec.density, &pts, &Tolerances::default()).unwrap();
        assert!(
            rep.notes.iter().any(|n| n.contains("recurrent")),
            "{name}: {:?}",
            rep.notes
        );
    }
}

#[test]
fn global_densities_stay_positive_far_out() {
    for spec in catalogue().unwrap().into_iter().filter(|s| s.expected.global) {
        for v in [-6.0, -2.5, 0.0, 1.3] {
            let h = spec.density.value(&[3.0, v, 40.0, -40.0]).unwrap();
            assert!(h > 0.0, "{} at v = {v}", spec.name);
        }
    }
}

#[test]
fn corollary_at_several_tilts() {
    for a in [-1.3, -0.4, 0.3, 2.0] {
        let params = FamilyParams::from([
            ("A".to_string(), ParamValue::Number(a)),
            ("Fx".to_string(), ParamValue::Text("0.5+0.3*cos(2*v)".into())),
            ("c2".to_string(), ParamValue::Number(0.2)),
        ]);
        let spec = build("corollary", &params).unwrap();
        for p in spec.domain.sample(&spec.density, 40, 9).unwrap() {
            let (_, wt) = weighted_with_curvature(&spec.metric, &spec.density, &p).unwrap();
            assert!(residual_norm(&wt) < 1e-8, "A = {a}: {:e}", residual_norm(&wt));
        }
    }
}
