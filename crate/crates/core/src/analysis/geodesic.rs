//! Geodesic integration `x''^k + Γ^k_ij x'^i x'^j = 0`.

use serde::Serialize;

use super::ode::{dopri5, OdeError, OdeOptions, Termination};
use crate::error::EvalError;
use crate::geometry::{christoffel_at, MetricField};
use crate::linalg::bilinear;

/// Components beyond this magnitude terminate the run as a blowup.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicState {
    pub position: [f64; 4],
    pub velocity: [f64; 4],
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeodesicTermination {
    ReachedSMax,
    Blowup,
    StepUnderflow,
}

impl GeodesicTermination {
    pub fn name(self) -> &'static str {
        match self {
            GeodesicTermination::ReachedSMax => "reached-s_max",
            GeodesicTermination::Blowup => "blowup",
            GeodesicTermination::StepUnderflow => "step-underflow",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicRun {
    /// Accepted steps, starting with the initial state.
    pub samples: Vec<GeodesicState>,
    /// `g(x', x')` at each sample.
    pub norms: Vec<f64>,
    pub termination: GeodesicTermination,
    /// `max |g(x', x') − g(x'_0, x'_0)|` over samples.
    pub max_drift: f64,
}

impl GeodesicRun {
    pub fn last(&self) -> &GeodesicState {
        self.samples.last().expect("run has the initial state")
    }
}

fn split(y: &[f64; 8]) -> ([f64; 4], [f64; 4]) {
    ([y[0], y[1], y[2], y[3]], [y[4], y[5], y[6], y[7]])
}

fn join(p: &[f64; 4], w: &[f64; 4]) -> [f64; 8] {
    [p[0], p[1], p[2], p[3], w[0], w[1], w[2], w[3]]
}

/// Integrates the geodesic through `init` up to affine parameter `s_max`.
pub fn geodesic_integrate(
    g: &MetricField<f64>,
    init: &GeodesicState,
    s_max: f64,
    opts: &OdeOptions,
) -> Result<GeodesicRun, EvalError> {
    let rhs = |_: f64, y: &[f64; 8]| -> Result<[f64; 8], OdeError> {
        let (p, w) = split(y);
        let gam = christoffel_at(g, &p)?;
        let acc: [f64; 4] = std::array::from_fn(|k| {
            let mut a = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    a -= gam[k][i][j] * w[i] * w[j];
                }
            }
            a
        });
        Ok(join(&w, &acc))
    };
    let mut blew_up = false;
    let traj = dopri5(
        rhs,
        init.s,
        join(&init.position, &init.velocity),
        s_max,
        opts,
        |_, y| {
            blew_up = y.iter().any(|c| !(c.abs() <= BLOWUP));
            !blew_up
        },
    );
    let traj = match traj {
        Ok(t) => t,
        Err(OdeError::Eval(e)) => return Err(e),
        Err(OdeError::NonFinite { .. }) => {
            return Ok(GeodesicRun {
                samples: vec![*init],
                norms: vec![norm(g, &init.position, &init.velocity)?],
                termination: GeodesicTermination::Blowup,
                max_drift: 0.0,
            })
        }
        Err(e) => {
            return Err(EvalError::OutOfRange {
                what: e.to_string(),
                point: init.position,
            })
        }
    };
    let termination = match traj.termination {
        Termination::Reached => GeodesicTermination::ReachedSMax,
        Termination::Stopped if blew_up => GeodesicTermination::Blowup,
        Termination::Stopped | Termination::StepUnderflow { .. } => GeodesicTermination::StepUnderflow,
    };
    let mut samples = Vec::new();
    let mut norms = Vec::new();
    for (s, y) in traj.knots() {
        let (position, velocity) = split(&y);
        samples.push(GeodesicState { position, velocity, s });
        norms.push(norm(g, &position, &velocity)?);
    }
    let e0 = norms[0];
    let max_drift = norms.iter().fold(0.0f64, |m, &e| m.max((e - e0).abs()));
    Ok(GeodesicRun {
        samples,
        norms,
        termination,
        max_drift,
    })
}

fn norm(g: &MetricField<f64>, p: &[f64; 4], w: &[f64; 4]) -> Result<f64, EvalError> {
    Ok(bilinear(&g.matrix_at(p)?, w, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{field_from_text, Params};
    use crate::geometry::prwave_metric;

    #[test]
    fn flat_geodesics_are_lines() {
        let g = prwave_metric(field_from_text("0", &Params::new()).unwrap());
        let init = GeodesicState {
            position: [0.0, 1.0, 2.0, 3.0],
            velocity: [0.5, -1.0, 0.25, 2.0],
            s: 0.0,
        };
        let run = geodesic_integrate(&g, &init, 5.0, &OdeOptions::default()).unwrap();
        assert_eq!(run.termination, GeodesicTermination::ReachedSMax);
        let last = run.last();
        assert_eq!(last.s, 5.0);
        for k in 0..4 {
            assert!((last.velocity[k] - init.velocity[k]).abs() < 1e-14);
            assert!((last.position[k] - init.position[k] - 5.0 * init.velocity[k]).abs() < 1e-12);
        }
        assert!(run.max_drift < 1e-13);
    }

    #[test]
    fn repulsive_wave_blows_up() {
        let g = prwave_metric(field_from_text("x^2", &Params::new()).unwrap());
        let init = GeodesicState {
            position: [0.0, 0.0, 1.0, 0.0],
            velocity: [0.0, 1.0, 0.0, 0.0],
            s: 0.0,
        };
        let run = geodesic_integrate(&g, &init, 100.0, &OdeOptions::default()).unwrap();
        assert_eq!(run.termination, GeodesicTermination::Blowup);
        assert!(run.last().s < 100.0);
    }
}
