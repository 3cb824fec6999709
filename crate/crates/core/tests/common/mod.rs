#![allow(dead_code)]

use prwave::analysis::GeodesicState;
use prwave::jets::Jet3;
use prwave::quadrature;
use prwave::scalar::{V, X, Y};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random smooth expression text in the given variables, bounded on `[-2, 2]^4`.
pub fn random_expr(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, vars);
    }
    let a = random_expr(rng, vars, depth - 1);
    let b = random_expr(rng, vars, depth - 1);
    match rng.gen_range(0..9) {
        0 => format!("({a})+({b})"),
        1 => format!("({a})-({b})"),
        2 | 3 => format!("({a})*({b})"),
        4 => format!("({a})/(2+({b})^2)"),
        5 => format!("sin({a})"),
        6 => format!("cos({a})"),
        7 => format!("exp(0.3*sin({a}))"),
        _ => format!("log(1.5+cos({a}))"),
    }
}

fn leaf(rng: &mut ChaCha8Rng, vars: &[&str]) -> String {
    let c: f64 = rng.gen_range(-1.5..1.5);
    let v = vars[rng.gen_range(0..vars.len())];
    match rng.gen_range(0..4) {
        0 => format!("{c:.3}"),
        1 => v.to_string(),
        2 => format!("{c:.3}*{v}"),
        _ => format!("{v}^{}", rng.gen_range(2..4)),
    }
}

pub fn random_point(rng: &mut ChaCha8Rng, lo: [f64; 4], hi: [f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| rng.gen_range(lo[i]..=hi[i]))
}

/// Polynomial in `v`, ascending coefficients.
#[derive(Debug, Clone)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn random(rng: &mut ChaCha8Rng, c0: (f64, f64), spread: f64, degree: usize) -> Self {
        let mut c = vec![rng.gen_range(c0.0..c0.1)];
        for _ in 0..degree {
            c.push(rng.gen_range(-spread..spread));
        }
        Poly(c)
    }

    pub fn text(&self) -> String {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .map(|(k, c)| format!("({c:?})*v^{k}"))
            .collect();
        format!("({})", terms.join("+"))
    }

    /// k-th derivative at `v`.
    pub fn d(&self, k: usize, v: f64) -> f64 {
        let mut out = 0.0;
        for (n, &c) in self.0.iter().enumerate().skip(k) {
            let fall: f64 = (0..k).map(|j| (n - j) as f64).product();
            out += c * fall * v.powi((n - k) as i32);
        }
        out
    }
}

/// Right-hand side of `−2 hx G_vv` for the three-step ansatz with
/// `F = F0 + u (α + 2 hx'/hx log h)` and `h = h0 + s hx`, `s = x + Ay`.
pub fn three_step_rhs(f0: &Jet3<f64>, h0: &Poly, hx: &Poly, alpha: &Poly, a: f64, p: &[f64; 4]) -> f64 {
    let v = p[V];
    let s = p[X] + a * p[Y];
    let (hxv, hxp, hxpp) = (hx.d(0, v), hx.d(1, v), hx.d(2, v));
    let (h0v, h0p, h0pp) = (h0.d(0, v), h0.d(1, v), h0.d(2, v));
    let h = h0v + s * hxv;
    let lap = f0.d2(X, X) + f0.d2(Y, Y);
    2.0 * hxp * (h0p + s * hxp) * h.ln()
        + hxv * hxv * (f0.d1(X) + a * f0.d1(Y) + s * lap)
        + hxv * (alpha.d(0, v) * (h0p + s * hxp) + 2.0 * h0pp + 2.0 * s * hxpp)
        + hxv * h0v * lap
}

/// Right-hand side of `−2 G_vv` for a pp-wave with `h = h0(v) + (x + Ay) hx`.
pub fn pp_rhs(f: &Jet3<f64>, h0: &Poly, hx: f64, a: f64, p: &[f64; 4]) -> f64 {
    let v = p[V];
    let h = h0.d(0, v) + (p[X] + a * p[Y]) * hx;
    2.0 * h0.d(2, v) + hx * (f.d1(X) + a * f.d1(Y)) + h * (f.d2(X, X) + f.d2(Y, Y))
}

/// Closed-form geodesic of `2 du dv + (a x² + b y²) dv² + dx² + dy²` with
/// `a, b < 0`: `v` is affine and `x, y` oscillate with frequency `√(−a) v'`.
pub fn cw_oracle(a: f64, b: f64, init: &GeodesicState, s: f64) -> [f64; 4] {
    let sigma = init.velocity[1];
    let osc = |c: f64, x0: f64, w0: f64, t: f64| {
        let om = (-c).sqrt() * sigma;
        (
            x0 * (om * t).cos() + w0 / om * (om * t).sin(),
            -x0 * om * (om * t).sin() + w0 * (om * t).cos(),
        )
    };
    let energy = {
        let [_, _, x, y] = init.position;
        let w = init.velocity;
        2.0 * w[0] * w[1] + (a * x * x + b * y * y) * sigma * sigma + w[2] * w[2] + w[3] * w[3]
    };
    // u' follows from conservation of g(x', x')
    let du = |t: f64| {
        let (x, wx) = osc(a, init.position[2], init.velocity[2], t);
        let (y, wy) = osc(b, init.position[3], init.velocity[3], t);
        (energy - (a * x * x + b * y * y) * sigma * sigma - wx * wx - wy * wy) / (2.0 * sigma)
    };
    let u = init.position[0]
        + quadrature::composite(10, 40)
            .iter()
            .map(|&(t, w)| w * s * du(t * s))
            .sum::<f64>();
    [
        u,
        init.position[1] + sigma * s,
        osc(a, init.position[2], init.velocity[2], s).0,
        osc(b, init.position[3], init.velocity[3], s).0,
    ]
}
