//! Adaptive Dormand–Prince 5(4) integration of two-component linear systems,
//! with the state rescaled by powers of two to keep it in range.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub rtol: f64,
    /// Rescale the state every this many accepted steps.
    pub renormalize_every: usize,
    /// Smallest permitted |h| relative to the integration length scale.
    pub min_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            renormalize_every: 16,
            min_step: 1e-14,
        }
    }
}

/// Integration endpoint: state `y·2^{exp2}` at `x`.
#[derive(Clone, Copy, Debug)]
pub struct Endpoint {
    pub x: f64,
    pub y: [f64; 2],
    pub exp2: i64,
    pub steps: usize,
}

fn norm(y: &[f64; 2]) -> f64 {
    y[0].abs().max(y[1].abs())
}

fn rescale(y: &mut [f64; 2], exp2: &mut i64) {
    let n = norm(y);
    if n == 0.0 || !n.is_finite() {
        return;
    }
    let e = n.log2().floor() as i32;
    let f = 2f64.powi(-e);
    y[0] *= f;
    y[1] *= f;
    *exp2 += e as i64;
}

/// Integrates y' = f(x, y) from x0 to x1 (either direction). The error test is
/// relative to the state norm, so the step sequence does not depend on the
/// overall scale of y.
pub fn integrate<F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: [f64; 2],
    h0: f64,
    ctl: StepControl,
    length: f64,
) -> Result<Endpoint>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    let dir = (x1 - x0).signum();
    let mut x = x0;
    let mut y = y0;
    let mut exp2 = 0i64;
    rescale(&mut y, &mut exp2);
    let mut h = h0.abs().min((x1 - x0).abs()) * dir;
    let mut k = [[0.0f64; 2]; 7];
    k[0] = f(x, &y);
    let mut accepted = 0usize;
    let h_min = ctl.min_step * length;
    while (x1 - x) * dir > 0.0 {
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    ys[0] += h * a * kj[0];
                    ys[1] += h * a * kj[1];
                }
            }
            k[s] = f(x + C[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err = [0.0f64; 2];
        for (s, ks) in k.iter().enumerate() {
            let b = if s < 6 { A[6][s] } else { 0.0 };
            y_new[0] += h * b * ks[0];
            y_new[1] += h * b * ks[1];
            err[0] += h * E[s] * ks[0];
            err[1] += h * E[s] * ks[1];
        }
        let scale = ctl.rtol * norm(&y).max(norm(&y_new));
        let ratio = norm(&err) / scale;
        if ratio.is_nan() {
            return Err(Error::StiffnessFailure { r: x });
        }
        if ratio <= 1.0 {
            x += h;
            y = y_new;
            k[0] = k[6];
            accepted += 1;
            if accepted.is_multiple_of(ctl.renormalize_every.max(1)) {
                let before = exp2;
                rescale(&mut y, &mut exp2);
                if exp2 != before {
                    k[0] = f(x, &y);
                }
            }
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() < h_min && (x1 - x).abs() > h_min {
            return Err(Error::StiffnessFailure { r: x });
        }
    }
    rescale(&mut y, &mut exp2);
    Ok(Endpoint {
        x,
        y,
        exp2,
        steps: accepted,
    })
}
