//! Dormand-Prince 5(4) with Hairer's continuous extension, and the density
//! profile ODE `h'' = q(v) h`.

use thiserror::Error;

use crate::error::EvalError;
use crate::expr::ScalarField;
use crate::jets::Jet3;
use crate::scalar::V;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Largest step magnitude.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step limit reached at t = {t}")]
    TooManySteps { t: f64 },
    #[error("right-hand side is not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Invalid(String),
}

/// How an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Reached,
    /// The observer asked to stop after the last accepted step.
    Stopped,
    StepUnderflow {
        t: f64,
    },
}

#[derive(Debug, Clone)]
struct Segment<const N: usize> {
    t: f64,
    h: f64,
    rcont: [[f64; N]; 5],
}

/// Accepted steps of one integration run with dense output between them.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    t0: f64,
    y0: [f64; N],
    segments: Vec<Segment<N>>,
    pub termination: Termination,
}

impl<const N: usize> Trajectory<N> {
    pub fn start(&self) -> f64 {
        self.t0
    }

    /// Last time reached.
    pub fn end(&self) -> f64 {
        self.segments.last().map_or(self.t0, |s| s.t + s.h)
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    /// Accepted step endpoints, starting with the initial condition.
    pub fn knots(&self) -> Vec<(f64, [f64; N])> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        out.push((self.t0, self.y0));
        for s in &self.segments {
            out.push((s.t + s.h, std::array::from_fn(|i| s.rcont[0][i] + s.rcont[1][i])));
        }
        out
    }

    /// Dense-output value at `t`, or `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        let forward = self.end() >= self.t0;
        let (lo, hi) = if forward {
            (self.t0, self.end())
        } else {
            (self.end(), self.t0)
        };
        if !(t >= lo && t <= hi) {
            return None;
        }
        if t == self.t0 || self.segments.is_empty() {
            return Some(self.y0);
        }
        // first segment whose far end reaches past t
        let k = self
            .segments
            .partition_point(|s| if forward { s.t + s.h < t } else { s.t + s.h > t })
            .min(self.segments.len() - 1);
        let s = &self.segments[k];
        let theta = (t - s.t) / s.h;
        let th1 = 1.0 - theta;
        let r = &s.rcont;
        Some(std::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i])))
        }))
    }
}

fn err_norm<const N: usize>(e: &[f64; N], y0: &[f64; N], y1: &[f64; N], opts: &OdeOptions) -> f64 {
    let s: f64 = (0..N)
        .map(|i| {
            let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
            (e[i] / sc).powi(2)
        })
        .sum();
    (s / N as f64).sqrt()
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction).
///
/// `observe` sees every accepted step and may return `false` to stop early.
pub fn dopri5<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<Trajectory<N>, OdeError>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], OdeError>,
    O: FnMut(f64, &[f64; N]) -> bool,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut traj = Trajectory {
        t0,
        y0,
        segments: Vec::new(),
        termination: Termination::Reached,
    };
    if span == 0.0 {
        return Ok(traj);
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut h = opts.h_init.unwrap_or_else(|| {
        let d0 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let d1 = k1.iter().map(|v| v * v).sum::<f64>().sqrt();
        let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        guess.min(span).max(1e-10 * span)
    });
    h = h.min(opts.h_max);
    let mut fac_old: f64 = 1e-4;
    let mut rejected = false;

    for _ in 0..opts.max_steps {
        let remaining = (t_end - t).abs();
        if remaining <= 1e-14 * span.max(t.abs()) {
            return Ok(traj);
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let ysti = axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let k6 = f(t + hs, &ysti)?;
        let y1 = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + hs, &y1)?;
        if y1.iter().chain(k7.iter()).any(|v| !v.is_finite()) {
            return Err(OdeError::NonFinite { t: t + hs });
        }
        let e: [f64; N] =
            std::array::from_fn(|i| hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
        let err = err_norm(&e, &y, &y1, opts);

        // PI step control as in Hairer's DOPRI5
        let fac11 = err.powf(0.2 - 0.04 * 0.75);
        let mut fac = fac11 / fac_old.powf(0.04);
        fac = (fac / 0.9).clamp(1.0 / 10.0, 1.0 / 0.2);
        let h_new = h / fac;

        if err <= 1.0 {
            fac_old = err.max(1e-4);
            let rc2: [f64; N] = std::array::from_fn(|i| y1[i] - y[i]);
            let rc3: [f64; N] = std::array::from_fn(|i| hs * k1[i] - rc2[i]);
            let rc4: [f64; N] = std::array::from_fn(|i| rc2[i] - hs * k7[i] - rc3[i]);
            let rc5: [f64; N] = std::array::from_fn(|i| {
                hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            });
            traj.segments.push(Segment {
                t,
                h: hs,
                rcont: [y, rc2, rc3, rc4, rc5],
            });
            t = if last { t_end } else { t + hs };
            y = y1;
            k1 = k7;
            if !observe(t, &y) {
                traj.termination = Termination::Stopped;
                return Ok(traj);
            }
            if last {
                return Ok(traj);
            }
            h = if rejected { h_new.min(h) } else { h_new };
            h = h.min(opts.h_max);
            rejected = false;
        } else {
            h /= (fac11 / 0.9).min(1.0 / 0.2);
            rejected = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            traj.termination = Termination::StepUnderflow { t };
            return Ok(traj);
        }
    }
    Err(OdeError::TooManySteps { t })
}

/// Numerical solution of `h'' = q(v) h` on an interval, with the
/// derivatives needed to build order-3 jets.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    q: ScalarField<f64>,
    v0: f64,
    interval: (f64, f64),
    forward: Trajectory<2>,
    backward: Trajectory<2>,
}

impl DensityProfile {
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// `(h, h')` at `v`.
    pub fn state(&self, v: f64) -> Option<[f64; 2]> {
        if v >= self.v0 {
            self.forward.eval(v)
        } else {
            self.backward.eval(v)
        }
    }

    pub fn value(&self, v: f64) -> Option<f64> {
        self.state(v).map(|s| s[0])
    }

    /// `[h, h', h'', h''']` at `v`, using the ODE for the higher derivatives.
    pub fn derivatives(&self, v: f64) -> Result<[f64; 4], EvalError> {
        let point = [0.0, v, 0.0, 0.0];
        let [h, hp] = self.state(v).ok_or_else(|| EvalError::OutOfRange {
            what: format!("density profile outside [{}, {}]", self.interval.0, self.interval.1),
            point,
        })?;
        let q = self.q.eval(&point)?;
        let (qv, dq) = (q.value(), q.d1(V));
        Ok([h, hp, qv * h, dq * h + qv * hp])
    }

    /// Jet of `h(v)` at a chart point.
    pub fn jet(&self, v: f64) -> Result<Jet3<f64>, EvalError> {
        Ok(Jet3::variable(V, v).compose(self.derivatives(v)?))
    }

    /// Number of accepted steps in both directions.
    pub fn steps(&self) -> usize {
        self.forward.steps() + self.backward.steps()
    }

    pub fn knots(&self) -> Vec<(f64, [f64; 2])> {
        let mut k = self.backward.knots();
        k.reverse();
        k.pop();
        k.extend(self.forward.knots());
        k
    }
}

/// Solves `h'' = q(v) h` with `h(v0) = h0`, `h'(v0) = h0p` over `interval`.
pub fn solve_density_ode(
    q: &ScalarField<f64>,
    v0: f64,
    h0: f64,
    h0p: f64,
    interval: (f64, f64),
) -> Result<DensityProfile, OdeError> {
    solve_density_ode_with(q, v0, h0, h0p, interval, &OdeOptions::default())
}

pub fn solve_density_ode_with(
    q: &ScalarField<f64>,
    v0: f64,
    h0: f64,
    h0p: f64,
    interval: (f64, f64),
    opts: &OdeOptions,
) -> Result<DensityProfile, OdeError> {
    let (a, b) = interval;
    if !(a <= v0 && v0 <= b) {
        return Err(OdeError::Invalid(format!(
            "initial point {v0} outside interval [{a}, {b}]"
        )));
    }
    if [0, 2, 3].iter().any(|&i| q.depends_on(i)) {
        return Err(OdeError::Invalid("q must depend on v only".into()));
    }
    let rhs = |v: f64, y: &[f64; 2]| -> Result<[f64; 2], OdeError> {
        let qv = q.value(&[0.0, v, 0.0, 0.0])?;
        Ok([y[1], qv * y[0]])
    };
    let run = |end: f64| -> Result<Trajectory<2>, OdeError> {
        let t = dopri5(rhs, v0, [h0, h0p], end, opts, |_, _| true)?;
        match t.termination {
            Termination::StepUnderflow { t } => Err(OdeError::StepUnderflow { t }),
            _ => Ok(t),
        }
    };
    Ok(DensityProfile {
        q: q.clone(),
        v0,
        interval,
        forward: run(b)?,
        backward: run(a)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{field_from_text, Params};

    fn q(text: &str) -> ScalarField<f64> {
        field_from_text(text, &Params::new()).unwrap()
    }

    #[test]
    fn oscillator_matches_cosine() {
        let p = solve_density_ode(&q("-1"), 0.0, 1.0, 0.0, (-3.0, 3.0)).unwrap();
        for i in 0..=600 {
            let v = -3.0 + i as f64 * 0.01;
            assert!((p.value(v).unwrap() - v.cos()).abs() < 1e-8, "{v}");
        }
        let d = p.derivatives(0.7).unwrap();
        assert!((d[2] + 0.7f64.cos()).abs() < 1e-8);
        assert!((d[3] - 0.7f64.sin()).abs() < 1e-8);
        assert!(p.value(3.5).is_none());
    }

    #[test]
    fn exponential_growth() {
        let p = solve_density_ode(&q("4"), 0.5, 1.0, 0.0, (0.0, 2.0)).unwrap();
        for v in [0.0f64, 0.25, 1.0, 1.9, 2.0] {
            let exact = f64::cosh(2.0 * (v - 0.5));
            assert!((p.value(v).unwrap() / exact - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            solve_density_ode(&q("x"), 0.0, 1.0, 0.0, (-1.0, 1.0)),
            Err(OdeError::Invalid(_))
        ));
        assert!(matches!(
            solve_density_ode(&q("1"), 2.0, 1.0, 0.0, (-1.0, 1.0)),
            Err(OdeError::Invalid(_))
        ));
    }

    #[test]
    fn observer_can_stop() {
        let t = dopri5(
            |_, y: &[f64; 1]| Ok([y[0]]),
            0.0,
            [1.0],
            10.0,
            &OdeOptions::default(),
            |_, y| y[0] < 100.0,
        )
        .unwrap();
        assert_eq!(t.termination, Termination::Stopped);
        assert!(t.end() < 10.0);
        let k = t.knots();
        assert!((k.last().unwrap().1[0] - k.last().unwrap().0.exp()).abs() < 1e-8);
    }
}
