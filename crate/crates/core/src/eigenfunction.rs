//! Normalised bound states of the circle model and their observables.
//!
//! In channel k the state is (u(r) e^{ikθ}, v(r) e^{i(k+1)θ}) / √(2π) with
//! u = a·I_k(κr), v = −i a s I_{k+1}(κr) inside and
//! u = a c K_k(κr), v = i a s c K_{k+1}(κr) outside, κ = √(m²−z²), s = √((m−z)/(m+z)).

use num_complex::Complex64;
use serde::Serialize;

use crate::bessel::BesselTable;
use crate::error::{Error, Result};
use crate::params::CircleConfig;
use crate::quadrature::{panels_toward_end, panels_toward_start, GaussLegendre};
use crate::wide::Wide;

#[derive(Clone, Debug, Serialize)]
pub struct RadialEigenfunction {
    pub config: CircleConfig,
    pub k: i64,
    pub z: f64,
    /// Exterior/interior matching constant c_k.
    #[serde(skip)]
    pub matching: Wide,
    /// Normalisation a_k > 0.
    #[serde(skip)]
    pub norm: Wide,
}

/// c_k = [(η−τ)√(m−z) I_{k+1} − 2√(m+z) I_k] / [(η−τ)√(m−z) K_{k+1} − 2√(m+z) K_k] at t = κR.
pub fn matching_constant(config: &CircleConfig, k: i64, z: f64) -> Result<Wide> {
    config.check_in_gap(z)?;
    let t = config.decay_rate(z) * config.radius;
    let tab = BesselTable::for_signed_orders(k..=k + 1, t)?;
    let (eta, tau) = (config.coupling.eta, config.coupling.tau);
    let p = (eta - tau) * (config.mass - z).sqrt();
    let q = 2.0 * (config.mass + z).sqrt();
    let num = tab.i(k + 1).scale(p) - tab.i(k).scale(q);
    let den = tab.k(k + 1).scale(p) - tab.k(k).scale(q);
    let size = tab.k(k + 1).scale(p.abs()) + tab.k(k).scale(q);
    if den.is_zero() || (den / size).to_f64().abs() < 1e-14 {
        return Err(Error::NearSingularDenominator(format!(
            "matching denominator {:e} (relative to {:e}) for k={k}, z={z}",
            den.to_f64(),
            size.to_f64()
        )));
    }
    Ok(num / den)
}

/// Closed-form a_k making ‖ψ_k‖ = 1 (positive branch).
pub fn normalization(config: &CircleConfig, k: i64, z: f64, c: Wide) -> Result<Wide> {
    config.check_in_gap(z)?;
    let t = config.decay_rate(z) * config.radius;
    let tab = BesselTable::for_signed_orders(k - 1..=k + 2, t)?;
    let (i, kk) = (|j| tab.i(j), |j| tab.k(j));
    let s2 = (config.mass - z) / (config.mass + z);
    let c2 = c * c;
    let inner_k = i(k) * i(k) - i(k - 1) * i(k + 1);
    let outer_k = kk(k - 1) * kk(k + 1) - kk(k) * kk(k);
    let inner_k1 = i(k + 1) * i(k + 1) - i(k) * i(k + 2);
    let outer_k1 = kk(k) * kk(k + 2) - kk(k + 1) * kk(k + 1);
    let bracket = inner_k + c2 * outer_k + (inner_k1 + c2 * outer_k1).scale(s2);
    if !(bracket.signum() > 0.0) {
        return Err(Error::NonPositiveNormArgument { k });
    }
    Ok(bracket.sqrt().recip().scale(2f64.sqrt() / config.radius))
}

/// Boundary-condition residuals, each relative to the larger one-sided trace norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryResidual {
    /// |−i[v]_R − (η+τ)⟨u⟩_R|
    pub res_v: f64,
    /// |−i[u]_R − (η−τ)⟨v⟩_R|
    pub res_u: f64,
}

/// Radial observables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Observables {
    pub sigma3: f64,
    pub v_theta: f64,
    /// Always 0 for real (u, −i·w); `v_r_quadrature` holds the computed value.
    pub v_r: f64,
    pub v_r_quadrature: f64,
    pub norm: f64,
}

/// Composite Gauss–Legendre nodes on (0, R) and (R, r_max), refined toward R.
#[derive(Clone, Debug)]
pub struct RadialGrid {
    pub interior: Vec<(f64, f64)>,
    pub exterior: Vec<(f64, f64)>,
    pub r_max: f64,
}

impl RadialGrid {
    pub fn new(config: &CircleConfig, z: f64, nodes_per_panel: usize, levels: usize) -> Self {
        let big_r = config.radius;
        let r_max = big_r + 40.0 / config.decay_rate(z);
        let gl = GaussLegendre::new(nodes_per_panel);
        let collect = |pts: Vec<f64>| {
            pts.windows(2)
                .flat_map(|w| gl.mapped(w[0], w[1]).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        RadialGrid {
            interior: collect(panels_toward_end(0.0, big_r, levels)),
            exterior: collect(panels_toward_start(big_r, r_max, levels)),
            r_max,
        }
    }

    pub fn for_state(eig: &RadialEigenfunction) -> Self {
        Self::new(&eig.config, eig.z, 64, 12)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &(f64, f64)> {
        self.interior.iter().chain(self.exterior.iter())
    }
}

impl RadialEigenfunction {
    pub fn new(config: &CircleConfig, k: i64, z: f64) -> Result<Self> {
        let matching = matching_constant(config, k, z)?;
        let norm = normalization(config, k, z, matching)?;
        Ok(RadialEigenfunction {
            config: *config,
            k,
            z,
            matching,
            norm,
        })
    }

    /// Total angular momentum k + 1/2.
    pub fn j3(&self) -> f64 {
        self.k as f64 + 0.5
    }

    fn one_sided(&self, r: f64, inside: bool) -> Result<(f64, f64)> {
        let t = self.config.decay_rate(self.z) * r;
        let tab = BesselTable::for_signed_orders(self.k..=self.k + 1, t)?;
        let s = self.config.spinor_ratio(self.z);
        Ok(if inside {
            (
                (self.norm * tab.i(self.k)).to_f64(),
                (self.norm * tab.i(self.k + 1)).to_f64() * s,
            )
        } else {
            let amp = self.norm * self.matching;
            (
                (amp * tab.k(self.k)).to_f64(),
                -(amp * tab.k(self.k + 1)).to_f64() * s,
            )
        })
    }

    /// Real radial profiles (u, w) with v = −i·w.
    pub fn real_components(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0 && r.is_finite()) || r == self.config.radius {
            return Err(Error::Domain(format!(
                "radius r={r} must be positive and different from R"
            )));
        }
        self.one_sided(r, r < self.config.radius)
    }

    /// (u_k(r), v_k(r)).
    pub fn radial_components(&self, r: f64) -> Result<(Complex64, Complex64)> {
        let (u, w) = self.real_components(r)?;
        Ok((Complex64::new(u, 0.0), Complex64::new(0.0, -w)))
    }

    /// One-sided traces (u, w) at R⁻ and R⁺.
    pub fn traces(&self) -> Result<((f64, f64), (f64, f64))> {
        Ok((
            self.one_sided(self.config.radius, true)?,
            self.one_sided(self.config.radius, false)?,
        ))
    }

    pub fn boundary_residual(&self) -> Result<BoundaryResidual> {
        let ((ui, wi), (ue, we)) = self.traces()?;
        let (eta, tau) = (self.config.coupling.eta, self.config.coupling.tau);
        let scale = ui.hypot(wi).max(ue.hypot(we));
        // with v = −i w: −i[v] = w⁻ − w⁺ (exterior minus interior), ⟨v⟩ = −i⟨w⟩
        let res_v = (we - wi) - (eta + tau) * 0.5 * (ui + ue);
        let res_u = (ui - ue) - (eta - tau) * 0.5 * (wi + we);
        Ok(BoundaryResidual {
            res_v: res_v.abs() / scale,
            res_u: res_u.abs() / scale,
        })
    }

    /// ⟨σ₃⟩, ⟨v_θ⟩ = ⟨σ_θ/r⟩, ⟨σ_r⟩ and ‖ψ‖² by quadrature.
    pub fn observables(&self, grid: &RadialGrid) -> Result<Observables> {
        let (mut sigma3, mut v_theta, mut v_r, mut norm) = (0.0, 0.0, 0.0, 0.0);
        for &(r, w) in grid.nodes() {
            let (u, v) = self.radial_components(r)?;
            norm += w * r * (u.norm_sqr() + v.norm_sqr());
            sigma3 += w * r * (u.norm_sqr() - v.norm_sqr());
            // σ_θ pairs u with −i v and v with i u
            let i = Complex64::i();
            v_theta += w * (u.conj() * (-i * v) + v.conj() * (i * u)).re;
            v_r += w * r * (u.conj() * v + v.conj() * u).re;
        }
        Ok(Observables {
            sigma3,
            v_theta,
            v_r: 0.0,
            v_r_quadrature: v_r,
            norm,
        })
    }

    /// |ψ_k(r, θ)|² on a polar grid (rows: radii, columns: angles).
    pub fn density_grid(&self, radii: &[f64], angles: &[f64]) -> Result<Vec<Vec<f64>>> {
        radii
            .iter()
            .map(|&r| {
                let (u, v) = self.radial_components(r)?;
                Ok(angles
                    .iter()
                    .map(|&th| {
                        let pu = u * Complex64::from_polar(1.0, self.k as f64 * th);
                        let pv = v * Complex64::from_polar(1.0, (self.k + 1) as f64 * th);
                        (pu.norm_sqr() + pv.norm_sqr()) / (2.0 * std::f64::consts::PI)
                    })
                    .collect())
            })
            .collect()
    }

    /// |ψ_k|² at radius r (independent of θ).
    pub fn density(&self, r: f64) -> Result<f64> {
        let (u, w) = self.real_components(r)?;
        Ok((u * u + w * w) / (2.0 * std::f64::consts::PI))
    }

    /// z·(u, w) minus the radial Dirac operator applied to (u, w) by a
    /// centred finite difference of order 8, relative to |z|·‖(u, w)‖.
    pub fn equation_residual(&self, r: f64, h: f64) -> Result<f64> {
        const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
        let mut du = 0.0;
        let mut dw = 0.0;
        for (j, c) in W.iter().enumerate() {
            let off = (j + 1) as f64 * h;
            let (up, wp) = self.real_components(r + off)?;
            let (um, wm) = self.real_components(r - off)?;
            du += c * (up - um) / h;
            dw += c * (wp - wm) / h;
        }
        let (u, w) = self.real_components(r)?;
        let (m, kf, z) = (self.config.mass, self.k as f64, self.z);
        // H (u, −i w) = z (u, −i w) in real form
        let first = m * u - (dw + (kf + 1.0) / r * w);
        let second = -(du - kf / r * u) + m * w;
        let size = z.abs().max(1e-300) * u.hypot(w);
        Ok(((first - z * u).abs().max((second + z * w).abs())) / size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CouplingPair;
    use crate::spectrum::{solve_eigenvalue, DEFAULT_TOL};

    fn state(tau: f64, k: i64) -> RadialEigenfunction {
        let c = CircleConfig::new(1.0, 1.0, CouplingPair::from_tau(tau, 1.0).unwrap()).unwrap();
        let z = solve_eigenvalue(&c, k, DEFAULT_TOL).unwrap().z;
        RadialEigenfunction::new(&c, k, z).unwrap()
    }

    #[test]
    fn boundary_conditions_and_norm() {
        for &(tau, k) in &[(0.0, 10), (0.0, -11), (5.0, 3), (-5.0, -7), (0.0, 0)] {
            let e = state(tau, k);
            let b = e.boundary_residual().unwrap();
            assert!(b.res_u < 1e-10 && b.res_v < 1e-10, "{tau} {k} {b:?}");
            let o = e.observables(&RadialGrid::for_state(&e)).unwrap();
            assert!((o.norm - 1.0).abs() < 1e-8, "{tau} {k} {}", o.norm);
            assert!(o.v_r_quadrature.abs() < 1e-10);
            assert!(e.norm.signum() > 0.0);
        }
    }

    #[test]
    fn perturbed_eigenvalue_breaks_boundary_conditions() {
        // the shift is relative, so stay away from eigenvalues sitting next to z = 0
        for &(tau, k) in &[
            (0.0, 0),
            (0.0, 3),
            (5.0, 0),
            (5.0, 10),
            (5.0, -11),
            (5.0, 30),
        ] {
            let e = state(tau, k);
            let bad = RadialEigenfunction::new(&e.config, k, e.z * (1.0 + 1e-4)).unwrap();
            let b = bad.boundary_residual().unwrap();
            assert!(b.res_u.max(b.res_v) > 1e-6, "{tau} {k} {b:?}");
        }
    }

    #[test]
    fn satisfies_the_radial_equation() {
        let e = state(5.0, 2);
        for r in [0.3, 0.8, 1.3, 2.5] {
            assert!(e.equation_residual(r, 1e-3).unwrap() < 1e-6);
        }
    }

    #[test]
    fn density_is_rotation_invariant() {
        let e = state(0.0, 5);
        let g = e.density_grid(&[0.5, 1.5], &[0.0, 1.0, 4.0]).unwrap();
        for row in &g {
            assert!(row.iter().all(|d| (d - row[0]).abs() <= 1e-15 * row[0]));
        }
        assert!(e.radial_components(1.0).is_err());
    }

    #[test]
    fn velocity_matches_eigenvalue_slope() {
        // ⟨v_θ⟩ equals dz/dk, here checked against a centred difference in k
        let c = CircleConfig::new(1.0, 5.0, CouplingPair::new(2.0, 0.0).unwrap()).unwrap();
        let z = |k| solve_eigenvalue(&c, k, DEFAULT_TOL).unwrap().z;
        let e = RadialEigenfunction::new(&c, 0, z(0)).unwrap();
        let o = e.observables(&RadialGrid::for_state(&e)).unwrap();
        let fd = 0.5 * (z(1) - z(-1));
        assert!((o.v_theta - fd).abs() < 0.05 * fd.abs());
    }

    /// ln|c_k| and ln a_k minus their leading large-|k| laws.
    fn log_offsets(tau: f64, k: i64) -> (f64, f64) {
        let e = state(tau, k);
        let (eta, m, big_r) = (e.config.coupling.eta, e.config.mass, e.config.radius);
        let ka = k.unsigned_abs() as f64;
        let sg = if k > 0 { 1.0 } else { -1.0 };
        let base = (std::f64::consts::E * m * big_r / (eta.abs() * ka)).ln();
        let c_law = -std::f64::consts::PI.ln() - sg + (2.0 * ka + sg) * base;
        let p = tau / eta;
        let mut l =
            2f64.sqrt() / big_r * ((-p).exp() + (eta + tau) / (eta - tau) * p.exp()).powf(-0.5);
        if k < 0 {
            l *= m * big_r / (eta.abs() * ka);
        }
        let a_law = (2.0 * std::f64::consts::PI).sqrt().ln() + l.ln() + ka.ln() - ka * base;
        (e.matching.ln_abs() - c_law, e.norm.ln_abs() - a_law)
    }

    #[test]
    fn matching_and_normalisation_follow_large_order_slopes() {
        for &tau in &[0.0, 5.0, -5.0] {
            for &sg in &[1i64, -1] {
                let offs: Vec<(f64, f64)> = [20i64, 30, 40, 60]
                    .iter()
                    .map(|&k| log_offsets(tau, sg * k))
                    .collect();
                // both laws carry ~2|k| ln|k| growth; only a k-independent offset may remain
                let spread = |f: fn(&(f64, f64)) -> f64| {
                    let v: Vec<f64> = offs.iter().map(f).collect();
                    v.iter().cloned().fold(f64::MIN, f64::max)
                        - v.iter().cloned().fold(f64::MAX, f64::min)
                };
                assert!(spread(|o| o.0) < 0.03, "c: {tau} {sg} {offs:?}");
                assert!(spread(|o| o.1) < 0.03, "a: {tau} {sg} {offs:?}");
                if tau == 0.0 {
                    let last = offs[3];
                    assert!(last.0.abs() < 0.01 && last.1.abs() < 0.01, "{sg} {last:?}");
                }
            }
        }
    }

    #[test]
    fn small_and_large_radius_laws() {
        let e = state(0.0, 3);
        let kappa = e.config.decay_rate(e.z);
        let small = |r: f64| {
            e.real_components(r).unwrap().0 / (e.norm.to_f64() * (0.5 * kappa * r).powi(3) / 6.0)
        };
        assert!((small(1e-4) - 1.0).abs() < 1e-7);
        assert!((small(1e-2) - 1.0).abs() < 1e-4);
        let tail = |r: f64| {
            let (u, w) = e.real_components(r).unwrap();
            // first Hankel correction (4ν² − 1)/(8t) for orders 3 and 4
            let t = kappa * r;
            let f = r.sqrt() * t.exp();
            (
                u * f / (1.0 + 35.0 / (8.0 * t)),
                w * f / (1.0 + 63.0 / (8.0 * t)),
            )
        };
        let (a, b) = (tail(200.0), tail(400.0));
        assert!((a.0 / b.0 - 1.0).abs() < 1e-3 && (a.1 / b.1 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn states_vanish_pointwise_at_large_order() {
        for &r in &[0.5, 2.0] {
            for &sg in &[1i64, -1] {
                let d: Vec<f64> = (20..=40)
                    .step_by(4)
                    .map(|k| state(0.0, sg * k).density(r).unwrap())
                    .collect();
                assert!(d.windows(2).all(|w| w[1] < w[0]), "{r} {sg} {d:?}");
                assert!(d[d.len() - 1] < 1e-6 * d[0]);
            }
        }
    }
}
