//! Central finite differences with Richardson extrapolation.
//!
//! Independent of jet arithmetic: only point values of a field are sampled.
//! Used as an oracle for jet coefficients in tests.

use crate::expr::{EvalError, ScalarField};
use crate::jets::MultiIndex;

/// Step used when none is given: `1e-3` for derivatives up to order two,
/// `1e-2` for order three (the cubic stencil divides by `h³`).
pub fn default_step(alpha: MultiIndex) -> f64 {
    if alpha.iter().map(|&a| a as usize).sum::<usize>() >= 3 {
        1e-2
    } else {
        1e-3
    }
}

// (offset in steps, weight) for the 1-D central stencil of derivative order n
fn stencil(n: u8) -> &'static [(i32, f64)] {
    match n {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => panic!("finite difference order {n} unsupported"),
    }
}

fn tensor_stencil<F, E>(f: &F, point: &[f64; 4], alpha: MultiIndex, h: &[f64; 4]) -> Result<f64, E>
where
    F: Fn(&[f64; 4]) -> Result<f64, E>,
{
    let st: [&[(i32, f64)]; 4] = std::array::from_fn(|i| stencil(alpha[i]));
    let mut acc = 0.0;
    for &(ou, wu) in st[0] {
        for &(ov, wv) in st[1] {
            for &(ox, wx) in st[2] {
                for &(oy, wy) in st[3] {
                    let q = [
                        point[0] + f64::from(ou) * h[0],
                        point[1] + f64::from(ov) * h[1],
                        point[2] + f64::from(ox) * h[2],
                        point[3] + f64::from(oy) * h[3],
                    ];
                    acc += wu * wv * wx * wy * f(&q)?;
                }
            }
        }
    }
    let scale: f64 = (0..4).map(|i| h[i].powi(i32::from(alpha[i]))).product();
    Ok(acc / scale)
}

/// Estimate `∂^α f` at `point` from point values of `f`.
///
/// Each chart variable uses step `step * max(1, |p_i|)`. The second-order
/// central stencils are refined by Richardson extrapolation: one level for
/// `|α| ≤ 2` (fourth order overall), two levels for `|α| = 3` (sixth order).
pub fn finite_difference<F, E>(f: F, point: &[f64; 4], alpha: MultiIndex, step: f64) -> Result<f64, E>
where
    F: Fn(&[f64; 4]) -> Result<f64, E>,
{
    assert!(step > 0.0, "finite difference step must be positive");
    let order: usize = alpha.iter().map(|&a| a as usize).sum();
    if order == 0 {
        return f(point);
    }
    let levels = if order >= 3 { 3 } else { 2 };
    let mut table = Vec::with_capacity(levels);
    for l in 0..levels {
        let s = step / f64::from(1u32 << l);
        let h: [f64; 4] = std::array::from_fn(|i| s * point[i].abs().max(1.0));
        table.push(tensor_stencil(&f, point, alpha, &h)?);
    }
    // Richardson on an even error expansion in h
    let mut pow4 = 4.0;
    for _ in 1..levels {
        for i in 0..table.len() - 1 {
            table[i] = (pow4 * table[i + 1] - table[i]) / (pow4 - 1.0);
        }
        table.pop();
        pow4 *= 4.0;
    }
    Ok(table[0])
}

/// Finite-difference estimate of `∂^α field` at `point`.
pub fn finite_difference_oracle(
    field: &ScalarField<f64>,
    point: &[f64; 4],
    alpha: MultiIndex,
    step: f64,
) -> Result<f64, EvalError> {
    finite_difference(|q| field.value(q), point, alpha, step)
}
