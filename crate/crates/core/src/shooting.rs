//! Bessel-free reference solver: shoot the radial first-order system from r ≈ 0
//! and from far outside, then match the two traces through the boundary
//! conditions at r = R.
//!
//! With v = −i·w the radial system is real:
//!   u' = (k/r) u + (m + z) w,
//!   w' = −((k + 1)/r) w + (m − z) u.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{self, StepControl};
use crate::params::CircleConfig;
use crate::roots;
use crate::spectrum::{scan_grid, sign_changes, EigenvalueRecord, Method};

/// Value `e^{log_scale}·(u, −i·v_imag)` at radius r.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShootingState {
    pub r: f64,
    pub u: f64,
    pub v_imag: f64,
    pub log_scale: f64,
}

impl ShootingState {
    fn norm(&self) -> f64 {
        self.u.hypot(self.v_imag)
    }

    /// Unit vector along (u, v_imag).
    pub fn direction(&self) -> (f64, f64) {
        let n = self.norm();
        (self.u / n, self.v_imag / n)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ShootingOptions {
    /// Interior start radius as a fraction of R.
    pub start_fraction: f64,
    /// Exterior start at R + span / √(m² − z²).
    pub exterior_span: f64,
    pub control: StepControl,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            start_fraction: 1e-6,
            exterior_span: 40.0,
            control: StepControl::default(),
        }
    }
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}

#[allow(clippy::too_many_arguments)]
fn run(
    config: &CircleConfig,
    k: i64,
    z: f64,
    from: f64,
    to: f64,
    init: [f64; 2],
    init_log: f64,
    h0: f64,
    control: StepControl,
) -> Result<ShootingState> {
    let (mpz, mmz) = (config.mass + z, config.mass - z);
    let kf = k as f64;
    let rhs = move |r: f64, y: &[f64; 2]| {
        [
            kf / r * y[0] + mpz * y[1],
            -(kf + 1.0) / r * y[1] + mmz * y[0],
        ]
    };
    let end = ode::integrate(rhs, from, to, init, h0, control, config.radius)?;
    Ok(ShootingState {
        r: to,
        u: end.y[0],
        v_imag: end.y[1],
        log_scale: init_log + end.exp2 as f64 * LN_2,
    })
}

/// Integrates the regular solution from r = δR out to R⁻.
pub fn shoot_interior(
    config: &CircleConfig,
    k: i64,
    z: f64,
    opts: &ShootingOptions,
) -> Result<ShootingState> {
    config.check_in_gap(z)?;
    let r0 = opts.start_fraction * config.radius;
    let t0 = config.decay_rate(z) * r0;
    let (ku, kw) = (k.unsigned_abs(), (k + 1).unsigned_abs());
    let log_u = ku as f64 * (0.5 * t0).ln() - ln_factorial(ku);
    let log_w = config.spinor_ratio(z).ln() + kw as f64 * (0.5 * t0).ln() - ln_factorial(kw);
    let top = log_u.max(log_w);
    let init = [(log_u - top).exp(), (log_w - top).exp()];
    run(
        config,
        k,
        z,
        r0,
        config.radius,
        init,
        top,
        0.01 * r0,
        opts.control,
    )
}

/// Integrates the decaying solution from R + span/√(m²−z²) in to R⁺.
pub fn shoot_exterior(
    config: &CircleConfig,
    k: i64,
    z: f64,
    opts: &ShootingOptions,
) -> Result<ShootingState> {
    config.check_in_gap(z)?;
    let kappa = config.decay_rate(z);
    let r_max = config.radius + opts.exterior_span / kappa;
    let init = [1.0, -config.spinor_ratio(z)];
    let init_log = -kappa * r_max - 0.5 * r_max.ln();
    run(
        config,
        k,
        z,
        r_max,
        config.radius,
        init,
        init_log,
        0.01 / kappa,
        opts.control,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatchResult {
    pub k: i64,
    pub z: f64,
    /// Determinant of the two boundary conditions, divided by the product of the trace norms.
    pub determinant: f64,
    pub interior_trace: (f64, f64),
    pub exterior_trace: (f64, f64),
}

/// Boundary-condition determinant for the shooting traces, in the real form
/// (u, v_imag) with v = −i·v_imag.
pub fn matching_determinant_with(
    config: &CircleConfig,
    k: i64,
    z: f64,
    opts: &ShootingOptions,
) -> Result<MatchResult> {
    let inner = shoot_interior(config, k, z, opts)?;
    let outer = shoot_exterior(config, k, z, opts)?;
    let (ui, wi) = inner.direction();
    let (ue, we) = outer.direction();
    let (eta, tau) = (config.coupling.eta, config.coupling.tau);
    let (hp, hm) = (0.5 * (eta + tau), 0.5 * (eta - tau));
    // rows: the two transmission conditions, columns: interior / exterior amplitude
    let a11 = -wi - hp * ui;
    let a12 = we - hp * ue;
    let a21 = ui - hm * wi;
    let a22 = -ue - hm * we;
    Ok(MatchResult {
        k,
        z,
        determinant: a11 * a22 - a12 * a21,
        interior_trace: (ui, wi),
        exterior_trace: (ue, we),
    })
}

pub fn matching_determinant(config: &CircleConfig, k: i64, z: f64) -> Result<MatchResult> {
    matching_determinant_with(config, k, z, &ShootingOptions::default())
}

const ORACLE_GRID: usize = 64;

/// Eigenvalue of channel k from a sign scan and bisection of the matching determinant.
pub fn oracle_eigenvalue(config: &CircleConfig, k: i64, tol: f64) -> Result<EigenvalueRecord> {
    if !(tol >= 1e-14) {
        return Err(Error::Domain(format!("tolerance {tol} below 1e-14")));
    }
    let det = |z: f64| matching_determinant(config, k, z).map(|m| m.determinant);
    let brackets = sign_changes(&scan_grid(config, k, ORACLE_GRID), det)?;
    if brackets.is_empty() {
        return Err(Error::NoRoot { k });
    }
    let count = brackets.len();
    let mut records = Vec::with_capacity(count);
    for (lo, hi) in brackets {
        let root = roots::bisect(
            |z| det(z).unwrap_or(f64::NAN),
            lo,
            hi,
            tol * config.mass,
            200,
        );
        if !root.converged {
            return Err(Error::NonConvergence {
                k,
                iterations: root.iterations,
            });
        }
        records.push(EigenvalueRecord {
            k,
            z: root.x,
            residual: det(root.x)?,
            bracket: (lo, hi),
            method: Method::Oracle,
            gap: (root.x - config.z_star()).abs(),
            roots_in_channel: count,
        });
    }
    if count > 1 && k != 0 {
        let seed = crate::spectrum::asymptotic_eigenvalue(config, k, 1)?;
        records.sort_by(|a, b| (a.z - seed).abs().partial_cmp(&(b.z - seed).abs()).unwrap());
    }
    Ok(records.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::BesselTable;
    use crate::params::CouplingPair;

    fn unit(tau: f64) -> CircleConfig {
        CircleConfig::new(1.0, 1.0, CouplingPair::from_tau(tau, 1.0).unwrap()).unwrap()
    }

    fn angle(a: (f64, f64), b: (f64, f64)) -> f64 {
        let nb = b.0.hypot(b.1);
        let cross = a.0 * b.1 / nb - a.1 * b.0 / nb;
        cross.abs()
    }

    #[test]
    fn traces_follow_bessel_directions() {
        let c = unit(0.0);
        let opts = ShootingOptions::default();
        let i = shoot_interior(&c, 0, 0.0, &opts).unwrap();
        let e = shoot_exterior(&c, 0, 0.0, &opts).unwrap();
        let tab = BesselTable::new(0, 1, 1.0).unwrap();
        let bi = (tab.i(0).to_f64(), tab.i(1).to_f64());
        let bk = (tab.k(0).to_f64(), -tab.k(1).to_f64());
        assert!(angle(i.direction(), bi) < 1e-10);
        assert!(angle(e.direction(), bk) < 1e-10);
        // magnitudes carried by log_scale
        let mag = i.log_scale + i.norm().ln();
        assert!((mag - bi.0.hypot(bi.1).ln()).abs() < 1e-9);
    }

    #[test]
    fn mirror_channel_swaps_components() {
        let c = unit(0.0);
        let opts = ShootingOptions::default();
        let a = shoot_interior(&c, 3, 0.3, &opts).unwrap().direction();
        let b = shoot_interior(&c, -4, -0.3, &opts).unwrap().direction();
        assert!(angle(a, (b.1, b.0)) < 1e-10);
    }

    #[test]
    fn renormalisation_frequency_is_invisible() {
        let c = unit(5.0);
        let every = |n| ShootingOptions {
            control: StepControl {
                renormalize_every: n,
                ..StepControl::default()
            },
            ..ShootingOptions::default()
        };
        let a = shoot_interior(&c, 12, -0.5, &every(1)).unwrap();
        let b = shoot_interior(&c, 12, -0.5, &every(100)).unwrap();
        assert!(angle(a.direction(), b.direction()) < 1e-12);
        assert!(((a.log_scale + a.norm().ln()) - (b.log_scale + b.norm().ln())).abs() < 1e-12);
    }

    #[test]
    fn exterior_start_is_irrelevant() {
        let c = unit(-5.0);
        let near = shoot_exterior(&c, 4, 0.95, &ShootingOptions::default()).unwrap();
        let far = shoot_exterior(
            &c,
            4,
            0.95,
            &ShootingOptions {
                exterior_span: 80.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(angle(near.direction(), far.direction()) < 1e-10);
    }

    #[test]
    fn oracle_matches_reference_root() {
        let r = oracle_eigenvalue(&unit(0.0), 10, 1e-12).unwrap();
        assert!((r.z - -0.047_183_365_466).abs() < 1e-9);
        assert_eq!(r.method, Method::Oracle);
    }
}
