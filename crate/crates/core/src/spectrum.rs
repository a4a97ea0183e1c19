//! In-gap eigenvalues of the circle model, one per angular momentum channel k.

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::BesselTable;
use crate::error::{Error, Result};
use crate::params::CircleConfig;
use crate::roots;

/// Distance kept from the thresholds ±m, relative to m.
pub const GAP_GUARD: f64 = 1e-9;
/// Half-width of the excluded interval around z*.
pub const STAR_GUARD: f64 = 1e-12;
/// Largest accepted |residual| at a reported root.
pub const RESIDUAL_TOL: f64 = 1e-11;
pub const DEFAULT_GRID: usize = 512;
pub const DEFAULT_TOL: f64 = 1e-14;
const MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bisection,
    Brent,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenvalueRecord {
    pub k: i64,
    pub z: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub method: Method,
    /// |z − z*|.
    pub gap: f64,
    /// Number of roots found in this channel; anything other than 1 is an anomaly.
    pub roots_in_channel: usize,
}

impl EigenvalueRecord {
    pub fn is_anomalous(&self) -> bool {
        self.roots_in_channel != 1
    }
}

/// (η−τ)(m−z) P_{k+1}(t) / ((η+τ)(m+z) P_k(t)) − 1 with t = √(m²−z²) R and P_j = I_j K_j.
///
/// For non-critical couplings the full boundary determinant is used instead, which
/// adds −s(1 − (η²−τ²)/4)/t to the numerator (s = √((m−z)/(m+z))).
pub fn eigenvalue_residual(config: &CircleConfig, k: i64, z: f64) -> Result<f64> {
    config.check_in_gap(z)?;
    let m = config.mass;
    let (eta, tau) = (config.coupling.eta, config.coupling.tau);
    let t = config.decay_rate(z) * config.radius;
    let table = BesselTable::for_signed_orders(k..=k + 1, t)?;
    let ratio = ((table.i_scaled(k + 1) * table.k_scaled(k + 1))
        / (table.i_scaled(k) * table.k_scaled(k)))
    .to_f64();
    let lead = (eta - tau) * (m - z) / ((eta + tau) * (m + z)) * ratio;
    if config.coupling.critical {
        return Ok(lead - 1.0);
    }
    let s = config.spinor_ratio(z);
    let offset = s * (1.0 - 0.25 * (eta * eta - tau * tau)) / t / ((eta + tau) * table.product(k));
    Ok(lead - offset - 1.0)
}

/// Scan abscissae: Chebyshev nodes on the guarded gap, plus a dense window
/// around the large-order prediction for |k| ≥ 8. Nodes within the z* guard
/// are dropped.
pub fn scan_grid(config: &CircleConfig, k: i64, grid_size: usize) -> Vec<f64> {
    let m = config.mass;
    let edge = m * (1.0 - GAP_GUARD);
    let mut nodes: Vec<f64> = (0..grid_size)
        .map(|j| -edge * ((j as f64 + 0.5) * std::f64::consts::PI / grid_size as f64).cos())
        .collect();
    nodes.push(-edge);
    nodes.push(edge);
    if k.unsigned_abs() >= 8 {
        let eta = config.coupling.eta;
        let half = 10.0 / (eta * eta * k.unsigned_abs() as f64) * m;
        let lo = (config.z_star() - half).max(-edge);
        let hi = (config.z_star() + half).min(edge);
        let extra = grid_size;
        nodes.extend((0..=extra).map(|j| lo + (hi - lo) * j as f64 / extra as f64));
    }
    let zs = config.z_star();
    nodes.retain(|z| (z - zs).abs() > STAR_GUARD);
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup();
    nodes
}

/// Sign-change intervals of `f` on the given ordered abscissae.
pub fn sign_changes<F: Fn(f64) -> Result<f64>>(nodes: &[f64], f: F) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &z in nodes {
        let v = f(z)?;
        if let Some((zp, vp)) = prev {
            if v == 0.0 || (vp != 0.0 && (vp > 0.0) != (v > 0.0)) {
                out.push((zp, z));
            }
        }
        prev = Some((z, v));
    }
    Ok(out)
}

/// All sign-change brackets of the residual in channel k.
pub fn bracket_roots(config: &CircleConfig, k: i64, grid_size: usize) -> Result<Vec<(f64, f64)>> {
    if grid_size < 64 {
        return Err(Error::Domain(format!("grid_size {grid_size} < 64")));
    }
    sign_changes(&scan_grid(config, k, grid_size), |z| {
        eigenvalue_residual(config, k, z)
    })
}

/// Every root in channel k, refined by Brent's method.
pub fn solve_channel(config: &CircleConfig, k: i64, tol: f64) -> Result<Vec<EigenvalueRecord>> {
    if !(tol >= 1e-14) {
        return Err(Error::Domain(format!("tolerance {tol} below 1e-14")));
    }
    let brackets = bracket_roots(config, k, DEFAULT_GRID)?;
    if brackets.is_empty() {
        return Err(Error::NoRoot { k });
    }
    let count = brackets.len();
    let zs = config.z_star();
    brackets
        .into_iter()
        .map(|(lo, hi)| {
            let root = roots::brent(
                |z| eigenvalue_residual(config, k, z).unwrap_or(f64::NAN),
                lo,
                hi,
                tol * config.mass,
                MAX_ITER,
            );
            let residual = eigenvalue_residual(config, k, root.x)?;
            if !root.converged || !(residual.abs() <= RESIDUAL_TOL) {
                return Err(Error::NonConvergence {
                    k,
                    iterations: root.iterations,
                });
            }
            Ok(EigenvalueRecord {
                k,
                z: root.x,
                residual,
                bracket: (lo, hi),
                method: Method::Brent,
                gap: (root.x - zs).abs(),
                roots_in_channel: count,
            })
        })
        .collect()
}

/// The eigenvalue of channel k. If the scan finds more than one root the one
/// closest to the large-order prediction is returned, flagged through
/// `roots_in_channel`; use [`solve_channel`] to see all of them.
pub fn solve_eigenvalue(config: &CircleConfig, k: i64, tol: f64) -> Result<EigenvalueRecord> {
    let mut all = solve_channel(config, k, tol)?;
    if all.len() > 1 && k != 0 {
        let seed = asymptotic_eigenvalue(config, k, 1)?;
        all.sort_by(|a, b| (a.z - seed).abs().partial_cmp(&(b.z - seed).abs()).unwrap());
    }
    Ok(all.swap_remove(0))
}

/// Result of a sweep over k: solved channels plus the channels that failed.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub z_star: f64,
    pub records: Vec<EigenvalueRecord>,
    #[serde(skip)]
    pub failures: Vec<(i64, Error)>,
}

/// Solves every channel in `k_min..=k_max` in parallel; output is ordered by k.
pub fn spectrum(config: &CircleConfig, k_min: i64, k_max: i64, tol: f64) -> Spectrum {
    let outcomes: Vec<(i64, Result<Vec<EigenvalueRecord>>)> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| (k, solve_channel(config, k, tol)))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (k, out) in outcomes {
        match out {
            Ok(r) => records.extend(r),
            Err(e) => failures.push((k, e)),
        }
    }
    Spectrum {
        z_star: config.z_star(),
        records,
        failures,
    }
}

/// Coefficients of z/m in powers of 1/k.
pub fn asymptotic_coefficients(config: &CircleConfig) -> [f64; 4] {
    let (eta, tau) = (config.coupling.eta, config.coupling.tau);
    let mr = config.mass * config.radius;
    let e2 = eta * eta;
    [
        -tau / eta,
        -2.0 / e2,
        (eta + tau) / (e2 * eta),
        ((4.0 * mr).powi(2) - (eta + tau).powi(2)) / (2.0 * e2 * e2),
    ]
}

/// Large-|k| expansion of z_k truncated after the k^{-order} term.
pub fn asymptotic_eigenvalue(config: &CircleConfig, k: i64, order: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain(
            "asymptotic eigenvalue undefined at k = 0".into(),
        ));
    }
    if order > 3 {
        return Err(Error::Domain(format!("expansion order {order} > 3")));
    }
    let x = 1.0 / k as f64;
    let c = asymptotic_coefficients(config);
    Ok(config.mass
        * c.iter()
            .take(order as usize + 1)
            .rev()
            .fold(0.0, |acc, ci| acc * x + ci))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CouplingPair;

    fn fig_ev(tau: f64) -> CircleConfig {
        CircleConfig::new(1.0, 1.0, CouplingPair::from_tau(tau, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn residual_at_origin_is_ratio_minus_one() {
        let r = eigenvalue_residual(&fig_ev(0.0), 0, 0.0).unwrap();
        let f0 = crate::bessel::ratio_f(0, 1.0).unwrap();
        assert!((r - (f0 - 1.0)).abs() < 1e-15);
        assert!(r < 0.0);
        assert!(eigenvalue_residual(&fig_ev(0.0), 0, 1.0).is_err());
    }

    #[test]
    fn residual_mirror_symmetry() {
        let c = fig_ev(0.0);
        for &(k, z) in &[(3, 0.2), (-7, -0.5), (10, 0.01)] {
            let a = eigenvalue_residual(&c, k, z).unwrap();
            let b = eigenvalue_residual(&c, -k - 1, -z).unwrap();
            // the mirror residual is the reciprocal of the original, so both vanish together
            assert!(((a + 1.0) * (b + 1.0) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn reference_roots() {
        let c = fig_ev(0.0);
        let z10 = solve_eigenvalue(&c, 10, DEFAULT_TOL).unwrap();
        assert!((z10.z - -0.047_183_365_466).abs() < 1e-11);
        assert_eq!(z10.roots_in_channel, 1);
        let z0 = solve_eigenvalue(&c, 0, DEFAULT_TOL).unwrap();
        assert!((z0.z - -0.227_516_380_140_934_4).abs() < 1e-13);
        let zm = solve_eigenvalue(&fig_ev(-5.0), -1, DEFAULT_TOL).unwrap();
        assert!((zm.z - 0.980_172_837_713_318_6).abs() < 1e-13);
    }

    #[test]
    fn one_bracket_and_mirror() {
        let c = fig_ev(0.0);
        let b = bracket_roots(&c, 10, 512).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].0 < -0.047_183 && b[0].1 > -0.047_183);
        let m = bracket_roots(&c, -11, 512).unwrap();
        assert!(m[0].0 < 0.047_183 && m[0].1 > 0.047_183);
        assert!(bracket_roots(&c, 3, 16).is_err());
    }

    #[test]
    fn asymptotic_plug_in() {
        let c = fig_ev(0.0);
        assert!((asymptotic_eigenvalue(&c, 10, 3).unwrap() - -0.047_125).abs() < 1e-15);
        assert_eq!(asymptotic_eigenvalue(&c, 10, 0).unwrap(), c.z_star());
        let c2 = CircleConfig::new(1.0, 2.0, c.coupling).unwrap();
        assert_eq!(
            asymptotic_eigenvalue(&c, 10, 2).unwrap(),
            asymptotic_eigenvalue(&c2, 10, 2).unwrap()
        );
        assert_ne!(
            asymptotic_eigenvalue(&c, 10, 3).unwrap(),
            asymptotic_eigenvalue(&c2, 10, 3).unwrap()
        );
        assert!(asymptotic_eigenvalue(&c, 0, 1).is_err());
    }

    #[test]
    fn empty_sweep() {
        let s = spectrum(&fig_ev(0.0), 5, 4, DEFAULT_TOL);
        assert!(s.records.is_empty() && s.failures.is_empty());
    }
}
