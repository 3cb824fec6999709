//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::Poly;
use prwave::analysis::{
    classify, geodesic_integrate, positivity_domain, solve_density_ode, GeodesicState, GeodesicTermination, OdeOptions,
    PositivityOutcome, Ray, Tolerances,
};
use prwave::expr::{field_from_text, Params};
use prwave::families::{build, catalogue, FamilyParams, FamilySpec, ParamValue};
use prwave::geometry::{codazzi_component, codazzi_defect_of, curvature_at, prwave_metric};
use prwave::jets::{fd, multi_indices};
use prwave::scalar::{U, V, X, Y};
use prwave::weighted::{residual_norm, weighted_at, weighted_with_curvature};
use prwave::{Density, Field};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0xC0FFEE;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn field(text: &str) -> Field {
    field_from_text(text, &Params::new()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn samples(spec: &FamilySpec, n: usize) -> Result<Vec<[f64; 4]>, String> {
    spec.domain
        .sample(&spec.density, n, SEED)
        .map_err(|e| format!("{}: {e}", spec.name))
}

fn families() -> Result<Vec<FamilySpec>, String> {
    catalogue().map_err(|e| e.to_string())
}

fn family_residuals() -> Outcome {
    let start = Instant::now();
    let specs = families()?;
    let names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    for required in [
        "corollary",
        "corollary-critical",
        "cahen-wallach-isotropic",
        "cahen-wallach-nonisotropic",
    ] {
        ensure(names.contains(&required), || format!("catalogue lacks {required}"))?;
    }
    let mut worst = 0.0f64;
    for spec in &specs {
        for p in samples(spec, 200)? {
            let wt = weighted_at(&spec.metric, &spec.density, &p).map_err(|e| format!("{}: {e}", spec.name))?;
            let r = residual_norm(&wt);
            worst = worst.max(r);
            ensure(r < 1e-8, || format!("{}: residual {r:e} at {p:?}", spec.name))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} families x 200 points, max residual {worst:.1e}, {:.2} s",
        specs.len(),
        elapsed.as_secs_f64()
    ))
}

fn identity_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst3, mut worst5, mut worst_mixed) = (0.0f64, 0.0f64, 0.0f64);

    for _ in 0..20 {
        let h0 = Poly::random(&mut rng, (3.0, 4.0), 0.3, 2);
        let mut hx = Poly::random(&mut rng, (0.8, 1.2), 0.3, 2);
        hx.0[1] = rng.gen_range(0.1..0.3);
        let alpha = Poly::random(&mut rng, (-1.0, 1.0), 1.0, 2);
        let a: f64 = rng.gen_range(-1.0..1.0);
        let f0_text = common::random_expr(&mut rng, &["v", "x", "y"], 3);
        let h_text = format!("{}+(x+({a:?})*y)*{}", h0.text(), hx.text());
        let hxp = Poly(hx.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect());
        let f_text = format!(
            "({f0_text})+u*({}+2*{}/{}*log({h_text}))",
            alpha.text(),
            hxp.text(),
            hx.text()
        );
        let f0 = field(&f0_text);
        let metric = prwave_metric(field(&f_text));
        let density = Density::new(field(&h_text));
        for _ in 0..5 {
            let p = common::random_point(&mut rng, [-1.0; 4], [1.0; 4]);
            let wt = weighted_at(&metric, &density, &p).map_err(|e| e.to_string())?;
            let lhs = -2.0 * hx.d(0, p[V]) * wt.gh[V][V];
            let rhs = common::three_step_rhs(&f0.eval(&p).unwrap(), &h0, &hx, &alpha, a, &p);
            let rel = (lhs - rhs).abs() / rhs.abs().max(1.0);
            worst5 = worst5.max(rel);
            ensure(rel <= 1e-8, || format!("three-step vv: {lhs} vs {rhs} at {p:?}"))?;
            for (i, j) in [(V, X), (V, Y), (U, V), (X, X), (Y, Y), (X, Y)] {
                worst_mixed = worst_mixed.max(wt.gh[i][j].abs());
            }
        }
    }
    ensure(worst_mixed < 1e-9, || format!("mixed component {worst_mixed:e}"))?;

    for _ in 0..20 {
        let h0 = Poly::random(&mut rng, (3.0, 4.0), 0.5, 3);
        let hx: f64 = rng.gen_range(0.5..1.5);
        let a: f64 = rng.gen_range(-1.0..1.0);
        let f = field(&common::random_expr(&mut rng, &["v", "x", "y"], 3));
        let metric = prwave_metric(f.clone());
        let density = Density::new(field(&format!("{}+(x+({a:?})*y)*({hx:?})", h0.text())));
        for _ in 0..5 {
            let p = common::random_point(&mut rng, [-1.0; 4], [1.0; 4]);
            let wt = weighted_at(&metric, &density, &p).map_err(|e| e.to_string())?;
            let lhs = -2.0 * wt.gh[V][V];
            let rhs = common::pp_rhs(&f.eval(&p).unwrap(), &h0, hx, a, &p);
            let rel = (lhs - rhs).abs() / rhs.abs().max(1.0);
            worst3 = worst3.max(rel);
            ensure(rel <= 1e-8, || format!("pp vv: {lhs} vs {rhs} at {p:?}"))?;
        }
    }
    Ok(format!(
        "three-step rel {worst5:.1e}, pp rel {worst3:.1e}, max |G_vx|-type {worst_mixed:.1e}"
    ))
}

fn tau_and_divergence() -> Outcome {
    let (mut tau_worst, mut spread_worst, mut div_worst) = (0.0f64, 0.0f64, 0.0f64);
    for spec in families()? {
        let mut taus = Vec::new();
        for p in samples(&spec, 200)? {
            let (b, wt) =
                weighted_with_curvature(&spec.metric, &spec.density, &p).map_err(|e| format!("{}: {e}", spec.name))?;
            taus.push(b.tau);
            let div = wt.div_norm();
            div_worst = div_worst.max(div);
            ensure(div < 1e-7, || format!("{}: |div G^h| {div:e} at {p:?}", spec.name))?;
        }
        let lo = taus.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let abs = lo.abs().max(hi.abs());
        tau_worst = tau_worst.max(abs);
        spread_worst = spread_worst.max(hi - lo);
        ensure(hi - lo < 1e-9 && abs < 1e-9, || {
            format!("{}: tau in [{lo:e}, {hi:e}]", spec.name)
        })?;
    }
    Ok(format!(
        "max |tau| {tau_worst:.1e}, tau spread {spread_worst:.1e}, max |div G^h| {div_worst:.1e}"
    ))
}

fn classification_suite() -> Outcome {
    let specs = families()?;
    for spec in &specs {
        let pts = samples(spec, 100)?;
        let r = classify(&spec.metric, &spec.density, &pts, &Tolerances::default())
            .map_err(|e| format!("{}: {e}", spec.name))?;
        let e = &spec.expected;
        ensure(r.branch == e.branch, || {
            format!("{}: branch {}", spec.name, r.branch.name())
        })?;
        ensure(r.causal_tag == Some(e.causal), || {
            format!("{}: causal {:?}", spec.name, r.causal_tag)
        })?;
        ensure(r.nilpotency_index == e.nilpotency, || {
            format!("{}: nilpotency {}", spec.name, r.nilpotency_index)
        })?;
        ensure(r.harmonic_curvature == e.harmonic, || {
            format!("{}: harmonic {}", spec.name, r.harmonic_curvature)
        })?;
        ensure(r.pp_wave == e.pp_wave, || format!("{}: pp {}", spec.name, r.pp_wave))?;
    }

    let mut worst = 0.0f64;
    for a in [0.0, 0.5, -1.2] {
        let (hx, hxp) = (Poly(vec![1.0, 0.3, -0.1]), Poly(vec![0.3, -0.2]));
        let params = FamilyParams::from([
            ("A".to_string(), ParamValue::Number(a)),
            ("h0".to_string(), ParamValue::List(vec![3.0, 0.2, 0.1])),
            ("hx".to_string(), ParamValue::List(hx.0.clone())),
        ]);
        let spec = build("three-step", &params).map_err(|e| e.to_string())?;
        for p in samples(&spec, 20)? {
            let h = spec.density.value(&p).unwrap();
            let expect = (a * a + 1.0) * hx.d(0, p[V]) * hxp.d(0, p[V]) / (h * h);
            // (∇_u ρ)(∂_v, ∂_v) − (∇_v ρ)(∂_u, ∂_v)
            let b = curvature_at(&spec.metric, &p).map_err(|e| e.to_string())?;
            let got = codazzi_component(&b, U, V, V);
            worst = worst.max((got - expect).abs());
            ensure((got - expect).abs() < 1e-8, || {
                format!("A = {a}: codazzi {got} vs {expect}")
            })?;
            ensure(codazzi_defect_of(&b) >= got.abs(), || {
                "defect below its own component".into()
            })?;
        }
    }
    Ok(format!("{} families match, codazzi deviation {worst:.1e}", specs.len()))
}

fn jets_vs_finite_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for n in 0..50 {
        let text = common::random_expr(&mut rng, &["u", "v", "x", "y"], 3);
        let f = field(&text);
        for _ in 0..10 {
            let p = common::random_point(&mut rng, [-1.0; 4], [1.0; 4]);
            let jet = f.eval(&p).map_err(|e| e.to_string())?;
            for &alpha in multi_indices() {
                let exact = jet.derivative(alpha);
                let approx =
                    fd::finite_difference_oracle(&f, &p, alpha, fd::default_step(alpha)).map_err(|e| e.to_string())?;
                let err = (exact - approx).abs() / exact.abs().max(1.0);
                worst = worst.max(err);
                ensure(err < 1e-5, || {
                    format!("expr {n} `{text}` {alpha:?}: {exact} vs {approx}")
                })?;
            }
        }
    }
    Ok(format!(
        "50 fields x 10 points x 35 coefficients, worst rel {worst:.1e}"
    ))
}

fn ode_suite() -> Outcome {
    type Exact = Box<dyn Fn(f64) -> f64>;
    type Case = (&'static str, &'static str, f64, f64, (f64, f64), Exact);
    let k = 2.5f64.sqrt();
    let s = 4.0f64;
    let egorov = move |v: f64| (-v).exp() * (0.5 * (2.0 * v).exp() * s.sqrt()).cosh();
    let degorov = move |v: f64| {
        let w = 0.5 * (2.0 * v).exp() * s.sqrt();
        -egorov(v) + (-v).exp() * w.sinh() * (2.0 * v).exp() * s.sqrt()
    };
    let cases: Vec<Case> = vec![
        ("cos", "-1", 1.0, 0.0, (-3.0, 3.0), Box::new(f64::cos)),
        (
            "cosh/sinh",
            "2.5",
            1.2,
            -0.4 * k,
            (-2.0, 2.0),
            Box::new(move |v: f64| 1.2 * (k * v).cosh() - 0.4 * (k * v).sinh()),
        ),
        (
            "egorov-1b",
            "1+4*exp(4*v)",
            egorov(0.0),
            degorov(0.0),
            (-2.0, 2.0),
            Box::new(egorov),
        ),
    ];
    let mut parts = Vec::new();
    for (name, q, h0, h0p, interval, exact) in cases {
        let start = Instant::now();
        let prof = solve_density_ode(&field(q), 0.0, h0, h0p, interval).map_err(|e| format!("{name}: {e}"))?;
        let mut worst = 0.0f64;
        for i in 0..=400 {
            let v = interval.0 + (interval.1 - interval.0) * i as f64 / 400.0;
            let e = exact(v);
            let rel = (prof.value(v).unwrap() - e).abs() / e.abs().max(1e-300);
            worst = worst.max(rel);
        }
        let t = start.elapsed();
        ensure(worst < 1e-6, || format!("{name}: rel {worst:e}"))?;
        ensure(t < Duration::from_secs(1), || format!("{name}: took {t:?}"))?;
        parts.push(format!("{name} {worst:.1e} in {:.0} ms", t.as_secs_f64() * 1e3));
    }
    Ok(parts.join(", "))
}

fn geodesic_suite() -> Outcome {
    let g = prwave_metric(field("-x^2-2.5*y^2"));
    let init = GeodesicState {
        position: [0.1, -0.3, 0.5, -0.2],
        velocity: [0.2, 0.8, 0.3, 0.4],
        s: 0.0,
    };
    let run = geodesic_integrate(&g, &init, 10.0, &OdeOptions::default()).map_err(|e| e.to_string())?;
    ensure(run.termination == GeodesicTermination::ReachedSMax, || {
        "oracle run stopped early".into()
    })?;
    let mut sup = 0.0f64;
    for st in &run.samples {
        let o = common::cw_oracle(-1.0, -2.5, &init, st.s);
        for (x, y) in st.position.iter().zip(o) {
            sup = sup.max((x - y).abs());
        }
    }
    ensure(sup < 1e-6, || format!("oracle sup deviation {sup:e}"))?;

    let spec = build("cahen-wallach-isotropic", &FamilyParams::new()).map_err(|e| e.to_string())?;
    let probe = GeodesicState {
        position: [0.0, 0.0, 1.0, 0.5],
        velocity: [0.3, 1.0, -0.2, 0.6],
        s: 0.0,
    };
    let run = geodesic_integrate(&spec.metric, &probe, 100.0, &OdeOptions::default()).map_err(|e| e.to_string())?;
    ensure(
        run.termination == GeodesicTermination::ReachedSMax && (run.last().s - 100.0).abs() < 1e-12,
        || format!("probe ended {} at s = {}", run.termination.name(), run.last().s),
    )?;
    ensure(run.max_drift < 1e-5, || format!("energy drift {:e}", run.max_drift))?;

    let mut boundary = 0.0f64;
    for (a, hx) in [(1.0f64, 1.0f64), (2.0, 0.5), (0.5, -2.0)] {
        let params = FamilyParams::from([
            ("a".to_string(), ParamValue::Number(a)),
            ("hx".to_string(), ParamValue::Number(hx)),
        ]);
        let spec = build("cahen-wallach-nonisotropic", &params).map_err(|e| e.to_string())?;
        for v in [-0.8, 0.0, 0.4] {
            let x_star = -(a.sqrt() * v).cosh() / hx;
            let ray = Ray {
                base: [0.0, v, 0.0, 0.0],
                direction: [0.0, 0.0, 1.0, 0.0],
            };
            let bracket = if hx > 0.0 { (0.0, -10.0) } else { (0.0, 10.0) };
            match positivity_domain(&spec.density, &ray, bracket).map_err(|e| e.to_string())? {
                PositivityOutcome::Boundary { t, .. } => {
                    boundary = boundary.max((t - x_star).abs());
                    ensure((t - x_star).abs() < 1e-9, || format!("boundary {t} vs {x_star}"))?;
                }
                other => return Err(format!("no boundary found: {other:?}")),
            }
        }
    }
    Ok(format!(
        "oracle sup {sup:.1e}, s = 100 drift {:.1e}, boundary {boundary:.1e}",
        run.max_drift
    ))
}

fn run_in(dir: &Path, command: &str, manifest: &Path, csv: bool) -> Result<(Vec<u8>, Option<Vec<u8>>), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_prwave"));
    cmd.current_dir(dir)
        .args([command, "--manifest", manifest.to_str().unwrap()]);
    if csv {
        cmd.args(["--out", "report.json"]);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !matches!(out.status.code(), Some(0 | 1)) {
        return Err(format!(
            "{} exited {:?}: {}",
            manifest.display(),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    if csv {
        let json = std::fs::read(dir.join("report.json")).map_err(|e| e.to_string())?;
        Ok((json, std::fs::read(dir.join("report.csv")).ok()))
    } else {
        Ok((out.stdout, None))
    }
}

fn determinism() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../manifests");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&root)
        .map_err(|e| format!("{}: {e}", root.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    ensure(!paths.is_empty(), || "no CI manifests".into())?;
    let mut runs = 0;
    for path in &paths {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let command = value["command"].as_str().ok_or("manifest without command")?.to_string();
        let path = path.canonicalize().map_err(|e| e.to_string())?;
        for csv in [false, true] {
            let a = tempfile::tempdir().map_err(|e| e.to_string())?;
            let b = tempfile::tempdir().map_err(|e| e.to_string())?;
            let first = run_in(a.path(), &command, &path, csv)?;
            let second = run_in(b.path(), &command, &path, csv)?;
            ensure(first == second, || format!("{} differs between runs", path.display()))?;
            runs += 1;
        }
    }
    Ok(format!("{} manifests, {runs} paired runs byte-identical", paths.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("family residuals", family_residuals),
        ("identity consistency", identity_consistency),
        ("tau and divergence", tau_and_divergence),
        ("classification", classification_suite),
        ("jets vs finite differences", jets_vs_finite_differences),
        ("density ODE closed forms", ode_suite),
        ("geodesics and positivity", geodesic_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS {}. {name}: {detail}", k + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", k + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {}. {name}: panicked", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
