//! Branch classification of `(metric, density)` pairs over sample points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::nilpotency::{nilpotency_index, Nilpotency};
use crate::error::EvalError;
use crate::geometry::{
    codazzi_defect_of, pr_structure_of, recurrent_fit_of, ricci_operator_image, MetricField, RANK_TOL,
};
use crate::scalar::COORD_NAMES;
use crate::weighted::{
    causal_character, residual_norm, weighted_with_curvature, CausalTag, DensityField, LIGHTLIKE_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Largest scale-normalised residual accepted as a solution.
    pub solution: f64,
    pub lightlike: f64,
    pub nilpotency: f64,
    /// Codazzi defect, relative to `max(1, max |∇ρ|)`.
    pub harmonic: f64,
    /// Frobenius norm of `R` below which a point counts as flat.
    pub flat: f64,
    /// Relative defect accepted as recurrent curvature.
    pub recurrent: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solution: 1e-8,
            lightlike: LIGHTLIKE_TOL,
            nilpotency: RANK_TOL,
            harmonic: 1e-8,
            flat: 1e-10,
            recurrent: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    FlatExcluded,
    IsotropicPp,
    #[serde(rename = "spacelike-2step-pp")]
    Spacelike2StepPp,
    #[serde(rename = "spacelike-3step-pr")]
    Spacelike3StepPr,
    OutsideAnsatz,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::FlatExcluded => "flat-excluded",
            Branch::IsotropicPp => "isotropic-pp",
            Branch::Spacelike2StepPp => "spacelike-2step-pp",
            Branch::Spacelike3StepPr => "spacelike-3step-pr",
            Branch::OutsideAnsatz => "outside-ansatz",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Branch::FlatExcluded,
            Branch::IsotropicPp,
            Branch::Spacelike2StepPp,
            Branch::Spacelike3StepPr,
            Branch::OutsideAnsatz,
        ]
        .into_iter()
        .find(|b| b.name() == name)
    }
}

/// Per-point data behind a classification.
#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub point: [f64; 4],
    pub residual: f64,
    /// Largest `G^h` component as `"vv"` etc.
    pub worst_component: String,
    pub tau: f64,
    pub div_gh: f64,
    pub causal: CausalTag,
    pub near_threshold: bool,
    pub grad_norm_sq: f64,
    pub nilpotency: Nilpotency,
    pub ricci_rank: usize,
    pub image_isotropic: bool,
    pub parallel: bool,
    pub pp_wave: bool,
    pub codazzi: f64,
    pub harmonic: bool,
    pub riemann_norm: f64,
    /// Relative recurrence defect, absent where `R = 0`.
    pub recurrence_defect: Option<f64>,
    pub nabla_riemann_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub branch: Branch,
    pub is_solution: bool,
    pub max_residual: f64,
    pub tau_value: f64,
    pub tau_spread: f64,
    pub max_div_gh: f64,
    /// Causal character shared by all samples, if they agree.
    pub causal_tag: Option<CausalTag>,
    pub causal_consistent: bool,
    pub near_threshold_points: usize,
    /// Largest nilpotency index over the samples.
    pub nilpotency_index: Nilpotency,
    pub nilpotency_consistent: bool,
    pub harmonic_curvature: bool,
    pub pp_wave: bool,
    pub prwave_kind: bool,
    pub density_nonconstant: bool,
    /// Decision path, one step per line.
    pub explanation: Vec<String>,
    pub notes: Vec<String>,
    pub tolerances: Tolerances,
    pub points: Vec<PointReport>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("no sample points")]
    EmptySamples,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn component_name(i: usize, j: usize) -> String {
    format!("{}{}", COORD_NAMES[i], COORD_NAMES[j])
}

/// Pointwise analysis at `p`.
pub fn analyse_point(
    g: &MetricField<f64>,
    h: &DensityField<f64>,
    p: &[f64; 4],
    tol: &Tolerances,
) -> Result<PointReport, EvalError> {
    let (b, wt) = weighted_with_curvature(g, h, p)?;
    let causal = causal_character(&wt, tol.lightlike);
    let image = ricci_operator_image(&b);
    let pr = pr_structure_of(&b);
    let codazzi = codazzi_defect_of(&b);
    let nabla_scale = b
        .nabla_ricci
        .iter()
        .flatten()
        .flatten()
        .fold(1.0f64, |m, &x| m.max(x.abs()));
    let fit = recurrent_fit_of(&b).ok();
    let riemann_norm = b
        .riemann
        .iter()
        .flatten()
        .flatten()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let (wi, wj) = wt.worst_component();
    Ok(PointReport {
        point: *p,
        residual: residual_norm(&wt),
        worst_component: component_name(wi, wj),
        tau: b.tau,
        div_gh: wt.div_norm(),
        causal: causal.tag,
        near_threshold: causal.near_threshold,
        grad_norm_sq: wt.grad_norm_sq,
        nilpotency: nilpotency_index(&b.ricci_op, tol.nilpotency),
        ricci_rank: image.rank,
        image_isotropic: image.isotropic,
        parallel: pr.parallel,
        pp_wave: image.isotropic && pr.parallel,
        codazzi,
        harmonic: codazzi < tol.harmonic * nabla_scale,
        riemann_norm,
        recurrence_defect: fit.as_ref().map(|f| f.defect),
        nabla_riemann_norm: fit.as_ref().map_or(0.0, |f| f.nabla_norm),
    })
}

/// Classifies `(g, h)` over `samples`. Per-point work runs in parallel; the
/// result does not depend on thread scheduling.
pub fn classify(
    g: &MetricField<f64>,
    h: &DensityField<f64>,
    samples: &[[f64; 4]],
    tol: &Tolerances,
) -> Result<ClassificationReport, ClassifyError> {
    if samples.is_empty() {
        return Err(ClassifyError::EmptySamples);
    }
    let points: Vec<PointReport> = samples
        .par_iter()
        .map(|p| analyse_point(g, h, p, tol))
        .collect::<Result<_, _>>()?;
    let density_nonconstant = h.is_nonconstant(samples, 1e-12)?;
    Ok(summarise(points, g.is_prwave(), density_nonconstant, tol))
}

fn summarise(
    points: Vec<PointReport>,
    prwave_kind: bool,
    density_nonconstant: bool,
    tol: &Tolerances,
) -> ClassificationReport {
    let n = points.len();
    let fmax = |f: &dyn Fn(&PointReport) -> f64| points.iter().map(f).fold(0.0f64, f64::max);
    let max_residual = fmax(&|p| p.residual);
    let max_div_gh = fmax(&|p| p.div_gh);
    let tau_min = points.iter().map(|p| p.tau).fold(f64::INFINITY, f64::min);
    let tau_max = points.iter().map(|p| p.tau).fold(f64::NEG_INFINITY, f64::max);
    let tau_value = points.iter().map(|p| p.tau).sum::<f64>() / n as f64;
    let is_solution = max_residual < tol.solution;

    let causal_consistent = points.iter().all(|p| p.causal == points[0].causal);
    let causal_tag = causal_consistent.then_some(points[0].causal);
    let near_threshold_points = points.iter().filter(|p| p.near_threshold).count();
    let nilpotency_index = points.iter().map(|p| p.nilpotency).max().unwrap_or(Nilpotency::Zero);
    let nilpotency_consistent = points.iter().all(|p| p.nilpotency == points[0].nilpotency);
    let harmonic_curvature = points.iter().all(|p| p.harmonic) && tau_max - tau_min < tol.harmonic;
    let pp_wave = points.iter().all(|p| p.pp_wave);
    let flat = points.iter().all(|p| p.riemann_norm < tol.flat);

    let mut explanation = Vec::new();
    let mut notes = Vec::new();
    let branch = decide(
        &points,
        Summary {
            flat,
            prwave_kind,
            is_solution,
            max_residual,
            causal_tag,
            nilpotency_index,
            nilpotency_consistent,
            harmonic_curvature,
            pp_wave,
        },
        tol,
        &mut explanation,
        &mut notes,
    );

    if !flat {
        let curved: Vec<&PointReport> = points.iter().filter(|p| p.recurrence_defect.is_some()).collect();
        if curved.iter().all(|p| p.nabla_riemann_norm < tol.flat) {
            notes.push("locally symmetric: ∇R = 0 at every sample".into());
        } else if curved
            .iter()
            .all(|p| p.recurrence_defect.is_some_and(|d| d < tol.recurrent))
        {
            notes.push("recurrent curvature: ∇R = σ ⊗ R at every sample, not locally symmetric".into());
        }
    }
    if !density_nonconstant {
        notes.push("density has vanishing gradient at every sample".into());
    }
    if near_threshold_points > 0 {
        notes.push(format!(
            "|∇h|² within a factor 10 of the lightlike threshold at {near_threshold_points} sample(s)"
        ));
    }
    if is_solution && (tau_max - tau_min >= 1e-9 || tau_value.abs() >= 1e-9) {
        notes.push(format!(
            "solution with non-constant or nonzero scalar curvature (τ in [{tau_min:e}, {tau_max:e}])"
        ));
    }

    ClassificationReport {
        branch,
        is_solution,
        max_residual,
        tau_value,
        tau_spread: tau_max - tau_min,
        max_div_gh,
        causal_tag,
        causal_consistent,
        near_threshold_points,
        nilpotency_index,
        nilpotency_consistent,
        harmonic_curvature,
        pp_wave,
        prwave_kind,
        density_nonconstant,
        explanation,
        notes,
        tolerances: *tol,
        points,
    }
}

struct Summary {
    flat: bool,
    prwave_kind: bool,
    is_solution: bool,
    max_residual: f64,
    causal_tag: Option<CausalTag>,
    nilpotency_index: Nilpotency,
    nilpotency_consistent: bool,
    harmonic_curvature: bool,
    pp_wave: bool,
}

fn decide(
    points: &[PointReport],
    s: Summary,
    tol: &Tolerances,
    why: &mut Vec<String>,
    notes: &mut Vec<String>,
) -> Branch {
    let n = points.len();
    if s.flat {
        why.push(format!("|R| < {:e} at all {n} samples: flat, excluded", tol.flat));
        return Branch::FlatExcluded;
    }
    if !s.prwave_kind {
        why.push("metric is not in pr-wave form".into());
        return Branch::OutsideAnsatz;
    }
    if !s.is_solution {
        let worst = points
            .iter()
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
            .expect("nonempty");
        why.push(format!(
            "not a solution: max residual {:e} ≥ {:e}",
            s.max_residual, tol.solution
        ));
        notes.push(format!(
            "largest residual in G^h_{} at {:?}",
            worst.worst_component, worst.point
        ));
        describe_structure(points, &s, notes);
        return Branch::OutsideAnsatz;
    }
    why.push(format!(
        "solution: max residual {:e} < {:e}",
        s.max_residual, tol.solution
    ));

    let Some(causal) = s.causal_tag else {
        why.push("causal character of ∇h differs between samples".into());
        return Branch::OutsideAnsatz;
    };
    why.push(format!("∇h {} at all {n} samples", causal.name()));
    why.push(format!(
        "Ricci operator nilpotency index {}{}",
        s.nilpotency_index,
        if s.nilpotency_consistent {
            ""
        } else {
            " (largest over samples)"
        }
    ));
    why.push(if s.pp_wave {
        "Ricci image totally isotropic and ∂_u parallel: pp-wave".to_string()
    } else {
        "∂_u recurrent but not parallel, or Ricci image not isotropic: pr-wave".to_string()
    });
    why.push(format!(
        "curvature {}harmonic",
        if s.harmonic_curvature { "" } else { "not " }
    ));

    let branch = match causal {
        CausalTag::Lightlike if s.nilpotency_index <= Nilpotency::Step(2) && s.pp_wave && s.harmonic_curvature => {
            Branch::IsotropicPp
        }
        CausalTag::Spacelike if s.nilpotency_consistent && s.nilpotency_index == Nilpotency::Step(2) && s.pp_wave => {
            Branch::Spacelike2StepPp
        }
        CausalTag::Spacelike
            if s.nilpotency_consistent
                && s.nilpotency_index == Nilpotency::Step(3)
                && !s.pp_wave
                && !s.harmonic_curvature =>
        {
            Branch::Spacelike3StepPr
        }
        _ => Branch::OutsideAnsatz,
    };
    if branch == Branch::OutsideAnsatz {
        why.push("no branch matches this combination".into());
    } else {
        why.push(format!("branch {}", branch.name()));
    }
    branch
}

fn describe_structure(points: &[PointReport], s: &Summary, notes: &mut Vec<String>) {
    if let Some(c) = s.causal_tag {
        notes.push(format!("∇h {} at every sample", c.name()));
    }
    notes.push(format!("Ricci nilpotency index up to {}", s.nilpotency_index));
    if s.pp_wave {
        notes.push("pp-wave structure at every sample".into());
    } else if points.iter().any(|p| !p.parallel) {
        notes.push("∂_u is not parallel at some samples".into());
    }
}
