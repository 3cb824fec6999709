use prwave::analysis::{
    classify, geodesic_integrate, positivity_domain, solve_density_ode, ClassifyError, DomainError, GeodesicState,
    OdeError, OdeOptions, PositivityOutcome, Ray,
};
use prwave::expr::{field_from_text, FieldError, Params};
use prwave::families::{self, Domain, Expected, FamilyError, FamilyParams, FamilySpec, ParamValue};
use prwave::geometry::prwave_metric;
use prwave::scalar::COORD_NAMES;
use prwave::weighted::{residual_norm, weighted_with_curvature};
use prwave::{Density, EvalError, Field, Metric};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::manifest::{Bounds, RunManifest, Strategy, SCHEMA_VERSION};
use crate::output::{Outcome, Table};
use crate::CliError;

/// Samples written to the `domain` sidecar.
const RAY_SAMPLES: usize = 101;

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<OdeError> for CliError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::Invalid(_) => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Ode(o) => o.into(),
            FamilyError::Eval(_) | FamilyError::Sampling { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::EmptySamples => CliError::Input("no admissible sample points".into()),
            ClassifyError::Eval(e) => e.into(),
        }
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Runs the command named in the manifest.
pub fn execute(m: &RunManifest) -> Result<Outcome, CliError> {
    match m.command.as_str() {
        "verify" => verify(m),
        "classify" => classify_cmd(m),
        "family" => family(m),
        "ode" => ode(m),
        "geodesic" => geodesic(m),
        "domain" => domain(m),
        other => Err(CliError::Input(format!("unknown command '{other}'"))),
    }
}

/// Metric and density of a run, from a family or from expression text.
struct Source {
    family: Option<FamilySpec>,
    metric: Metric,
    density: Option<Density>,
}

fn numeric_params(params: &FamilyParams) -> Result<Params, CliError> {
    params
        .iter()
        .map(|(k, v)| match v {
            ParamValue::Number(x) => Ok((k.clone(), *x)),
            _ => Err(CliError::Input(format!("parameter '{k}' must be a number, got '{v}'"))),
        })
        .collect()
}

fn source(m: &RunManifest) -> Result<Source, CliError> {
    if let Some(name) = &m.family {
        if m.f.is_some() {
            return Err(CliError::Input("F cannot be combined with a family".into()));
        }
        let spec = families::build(name, &m.params)?;
        let density = match &m.h {
            Some(text) => {
                let numbers: Params = spec
                    .params
                    .iter()
                    .filter_map(|(k, v)| match v {
                        ParamValue::Number(x) => Some((k.clone(), *x)),
                        _ => None,
                    })
                    .collect();
                Density::new(field_from_text(text, &numbers)?)
            }
            None => spec.density.clone(),
        };
        return Ok(Source {
            metric: spec.metric.clone(),
            density: Some(density),
            family: Some(spec),
        });
    }
    let params = numeric_params(&m.params)?;
    let f_text =
        m.f.as_deref()
            .ok_or_else(|| CliError::Input("either a family or an F expression is required".into()))?;
    let f: Field = field_from_text(f_text, &params)?;
    let density = match &m.h {
        Some(text) => Some(Density::new(field_from_text(text, &params)?)),
        None => None,
    };
    Ok(Source {
        family: None,
        metric: prwave_metric(f),
        density,
    })
}

impl Source {
    fn density(&self) -> Result<&Density, CliError> {
        self.density
            .as_ref()
            .ok_or_else(|| CliError::Input("a density expression h is required".into()))
    }

    /// Sample points: family draws skip points where `h` is within the
    /// family margin of zero; expression draws are taken as they come.
    fn points(&self, m: &RunManifest) -> Result<Vec<[f64; 4]>, CliError> {
        let s = &m.sampling;
        let mut dom = match &self.family {
            Some(spec) => spec.domain.clone(),
            None => Domain::new([-1.0; 4], [1.0; 4]),
        };
        if let Some(Bounds { lo, hi }) = &s.bounds {
            dom.lo = *lo;
            dom.hi = *hi;
        }
        let h = self.density()?;
        let pts = match (s.strategy, &self.family) {
            (Strategy::Grid, fam) => {
                let counts = s
                    .grid
                    .ok_or_else(|| CliError::Input("grid sampling needs per-axis counts".into()))?;
                let all = dom.grid_points(counts);
                match fam {
                    Some(_) => all
                        .into_iter()
                        .filter(|p| matches!(h.value(p), Ok(v) if v > dom.margin))
                        .collect(),
                    None => all,
                }
            }
            (Strategy::Random, Some(_)) => dom.sample(h, s.count, s.seed)?,
            (Strategy::Random, None) => dom.uniform(s.count, s.seed),
        };
        if pts.is_empty() {
            return Err(CliError::Input("no admissible sample points".into()));
        }
        Ok(pts)
    }
}

fn header(m: &RunManifest) -> serde_json::Map<String, Value> {
    let mut r = serde_json::Map::new();
    r.insert("schema_version".into(), json!(SCHEMA_VERSION));
    r.insert("command".into(), json!(m.command));
    r.insert("manifest".into(), serde_json::to_value(m).expect("manifest serialises"));
    r
}

fn component_name(i: usize, j: usize) -> String {
    format!("{}{}", COORD_NAMES[i], COORD_NAMES[j])
}

/// Per-point verify data.
struct Row {
    json: Value,
    residual: f64,
    div: f64,
    tau: f64,
    worst: (usize, usize),
    point: [f64; 4],
}

fn verify(m: &RunManifest) -> Result<Outcome, CliError> {
    let src = source(m)?;
    let h = src.density()?;
    let pts = src.points(m)?;
    let rows: Vec<Row> = pts
        .par_iter()
        .map(|p| -> Result<_, EvalError> {
            let (b, wt) = weighted_with_curvature(&src.metric, h, p)?;
            let residual = residual_norm(&wt);
            let div = wt.div_norm();
            let row = json!({
                "point": p,
                "gh": wt.gh,
                "residual": residual,
                "div_gh": div,
                "tau": b.tau,
            });
            Ok(Row {
                json: row,
                residual,
                div,
                tau: b.tau,
                worst: wt.worst_component(),
                point: *p,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut worst = 0;
    for (k, r) in rows.iter().enumerate() {
        if r.residual > rows[worst].residual {
            worst = k;
        }
    }
    let max_div = rows.iter().map(|r| r.div).fold(0.0f64, f64::max);
    let tau_min = rows.iter().map(|r| r.tau).fold(f64::INFINITY, f64::min);
    let tau_max = rows.iter().map(|r| r.tau).fold(f64::NEG_INFINITY, f64::max);
    let max_residual = rows[worst].residual;
    let solution = max_residual < m.tolerances.solution;
    let (wi, wj) = rows[worst].worst;

    let mut r = header(m);
    r.insert(
        "verdict".into(),
        json!(if solution { "solution" } else { "non-solution" }),
    );
    r.insert(
        "summary".into(),
        json!({
            "points": rows.len(),
            "max_residual": max_residual,
            "max_div_gh": max_div,
            "tau_min": tau_min,
            "tau_max": tau_max,
            "worst_point": rows[worst].point,
            "worst_component": component_name(wi, wj),
            "tolerance": m.tolerances.solution,
        }),
    );
    r.insert(
        "points".into(),
        Value::Array(rows.into_iter().map(|r| r.json).collect()),
    );
    Ok(Outcome {
        code: if solution { 0 } else { 1 },
        report: Value::Object(r),
        csv: None,
        message: Some(format!(
            "{}: max residual {max_residual:.3e}",
            if solution { "solution" } else { "non-solution" }
        )),
    })
}

fn matches_expected(e: &Expected, r: &prwave::analysis::ClassificationReport) -> bool {
    r.branch == e.branch
        && r.causal_tag == Some(e.causal)
        && r.nilpotency_index == e.nilpotency
        && r.harmonic_curvature == e.harmonic
        && r.pp_wave == e.pp_wave
}

fn classify_cmd(m: &RunManifest) -> Result<Outcome, CliError> {
    let src = source(m)?;
    let pts = src.points(m)?;
    let report = classify(&src.metric, src.density()?, &pts, &m.tolerances)?;
    let mut r = header(m);
    let branch = report.branch.name();
    if let Some(spec) = &src.family {
        r.insert(
            "expected".into(),
            serde_json::to_value(spec.expected).expect("serialises"),
        );
        r.insert(
            "matches_expected".into(),
            json!(matches_expected(&spec.expected, &report)),
        );
    }
    r.insert(
        "report".into(),
        serde_json::to_value(&report).expect("report serialises"),
    );
    Ok(Outcome {
        code: 0,
        report: Value::Object(r),
        csv: None,
        message: Some(format!("branch {branch}")),
    })
}

fn family(m: &RunManifest) -> Result<Outcome, CliError> {
    let name = m
        .family
        .as_deref()
        .ok_or_else(|| CliError::Input("family needs a family name".into()))?;
    let spec = families::build(name, &m.params)?;
    let mut run = RunManifest::new("classify");
    run.family = Some(spec.name.clone());
    run.params = spec.params.clone();
    run.sampling = m.sampling.clone();
    run.sampling.bounds.get_or_insert(Bounds {
        lo: spec.domain.lo,
        hi: spec.domain.hi,
    });
    run.tolerances = m.tolerances;

    let mut r = header(m);
    r.insert(
        "family".into(),
        json!({
            "name": spec.name,
            "params": spec.params,
            "description": spec.description,
            "F": spec.f.provenance(),
            "h": spec.density.h.provenance(),
            "expected": spec.expected,
            "domain": spec.domain,
            "positivity": spec.density.hint,
        }),
    );
    // the re-runnable manifest replaces the echoed one
    r.insert(
        "manifest".into(),
        serde_json::to_value(&run).expect("manifest serialises"),
    );
    r.insert("request".into(), serde_json::to_value(m).expect("manifest serialises"));
    Ok(Outcome {
        code: 0,
        report: Value::Object(r),
        csv: None,
        message: None,
    })
}

fn ode(m: &RunManifest) -> Result<Outcome, CliError> {
    let spec = &m.ode;
    let q_text = spec
        .q
        .as_deref()
        .ok_or_else(|| CliError::Input("ode needs a coefficient q".into()))?;
    let q: Field = field_from_text(q_text, &numeric_params(&m.params)?)?;
    let [a, b] = spec.interval;
    if spec.points < 2 {
        return Err(CliError::Input("ode needs at least two output points".into()));
    }
    let profile = solve_density_ode(&q, spec.v0, spec.h0, spec.h0p, (a, b))?;
    let mut table = Table::new(&["v", "h", "dh"]);
    let (mut h_min, mut h_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..spec.points {
        let v = if k + 1 == spec.points {
            b
        } else {
            a + (b - a) * k as f64 / (spec.points - 1) as f64
        };
        let [h, dh] = profile
            .state(v)
            .ok_or_else(|| CliError::Domain(format!("no solution at v = {v}")))?;
        h_min = h_min.min(h);
        h_max = h_max.max(h);
        table.push([v, h, dh]);
    }
    let mut r = header(m);
    r.insert(
        "ode".into(),
        json!({
            "q": q_text,
            "interval": [a, b],
            "steps": profile.steps(),
            "points": spec.points,
            "h_min": h_min,
            "h_max": h_max,
            "positive": h_min > 0.0,
        }),
    );
    Ok(Outcome {
        code: 0,
        report: Value::Object(r),
        csv: Some(table),
        message: None,
    })
}

fn geodesic(m: &RunManifest) -> Result<Outcome, CliError> {
    let src = source(m)?;
    let g = &m.geodesic;
    let init = GeodesicState {
        position: g.position,
        velocity: g.velocity,
        s: 0.0,
    };
    let run = geodesic_integrate(&src.metric, &init, g.s_max, &OdeOptions::default())?;
    let mut table = Table::new(&["s", "u", "v", "x", "y", "du", "dv", "dx", "dy", "norm"]);
    for (st, n) in run.samples.iter().zip(&run.norms) {
        let mut row = vec![st.s];
        row.extend(st.position);
        row.extend(st.velocity);
        row.push(*n);
        table.push(row);
    }
    let last = run.last();
    let mut r = header(m);
    r.insert(
        "geodesic".into(),
        json!({
            "termination": run.termination.name(),
            "s_final": last.s,
            "final_position": last.position,
            "final_velocity": last.velocity,
            "initial_norm": run.norms[0],
            "max_drift": run.max_drift,
            "samples": run.samples.len(),
        }),
    );
    Ok(Outcome {
        code: 0,
        report: Value::Object(r),
        csv: Some(table),
        message: Some(format!("geodesic {}", run.termination.name())),
    })
}

fn domain(m: &RunManifest) -> Result<Outcome, CliError> {
    let src = source(m)?;
    let h = src.density()?;
    let ray = Ray {
        base: m.domain.base,
        direction: m.domain.direction,
    };
    let [t0, t1] = m.domain.bracket;
    let outcome = positivity_domain(h, &ray, (t0, t1))?;
    let mut table = Table::new(&["t", "u", "v", "x", "y", "h"]);
    for k in 0..RAY_SAMPLES {
        let t = t0 + (t1 - t0) * k as f64 / (RAY_SAMPLES - 1) as f64;
        let p = ray.at(t);
        let value = h.value(&p).unwrap_or(f64::NAN);
        let mut row = vec![t];
        row.extend(p);
        row.push(value);
        table.push(row);
    }
    let mut r = header(m);
    r.insert(
        "outcome".into(),
        serde_json::to_value(outcome).expect("outcome serialises"),
    );
    let message = match outcome {
        PositivityOutcome::Boundary { t, .. } => format!("boundary at t = {t}"),
        PositivityOutcome::PositiveOnBracket => "positive on the whole bracket".into(),
    };
    Ok(Outcome {
        code: 0,
        report: Value::Object(r),
        csv: Some(table),
        message: Some(message),
    })
}
