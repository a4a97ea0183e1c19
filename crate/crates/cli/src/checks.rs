//! Numerical checks shared by `verify` and the acceptance run. Each returns
//! measured values together with the bound they are held to.

use dirac_shell::bessel::BesselTable;
use dirac_shell::eigenfunction::{RadialEigenfunction, RadialGrid};
use dirac_shell::line::{
    self, FormFactor, LambdaMatrix, LineConfig, LineField, PlaneQuadrature, PsiQuadrature, Side,
};
use dirac_shell::spectrum::{
    self, asymptotic_coefficients, eigenvalue_residual, solve_channel, solve_eigenvalue,
};
use dirac_shell::{reference, shooting, CircleConfig, CouplingPair};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// One measured quantity against its bound.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    /// Passes when value ≤ bound.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            pass: value <= bound,
            value,
            bound,
        }
    }

    /// Passes when value ≥ bound.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            pass: value >= bound,
            value,
            bound,
        }
    }

    /// Passes when value < bound.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            pass: value < bound,
            value,
            bound,
        }
    }
}

/// Largest value, with NaN winning so that failures cannot hide.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a: f64, v| {
        if v.is_nan() || a.is_nan() {
            f64::NAN
        } else {
            a.max(v)
        }
    })
}

/// Value of a fallible measurement, NaN on error.
fn or_nan<E>(r: Result<f64, E>) -> f64 {
    r.unwrap_or(f64::NAN)
}

pub const EV_TAUS: [f64; 3] = [-5.0, 0.0, 5.0];

/// m = R = 1 with η = +√(4 + τ²).
pub fn unit_circle(tau: f64) -> CircleConfig {
    circle(1.0, tau, 1.0)
}

fn circle(radius: f64, tau: f64, sign: f64) -> CircleConfig {
    CircleConfig::new(
        1.0,
        radius,
        CouplingPair::from_tau(tau, sign).expect("finite tau"),
    )
    .expect("positive radius")
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| (lo.ln() + (hi / lo).ln() * j as f64 / (n - 1) as f64).exp())
        .collect()
}

// ---------------------------------------------------------------- Bessel

/// max |t(I_k K_{k+1} + I_{k+1} K_k) − 1| over k ≤ k_max and a log grid in t.
pub fn wronskian(k_max: usize, t_points: usize, tol: f64) -> Check {
    let err = worst(
        log_grid(1e-4, 600.0, t_points)
            .par_iter()
            .map(|&t| {
                let Ok(tab) = BesselTable::new(0, k_max + 1, t) else {
                    return f64::NAN;
                };
                worst((0..=k_max as i64).map(|k| {
                    let w = tab.i_scaled(k) * tab.k_scaled(k + 1)
                        + tab.i_scaled(k + 1) * tab.k_scaled(k);
                    (w.scale(t).to_f64() - 1.0).abs()
                }))
            })
            .collect::<Vec<_>>(),
    );
    Check::at_most("bessel_wronskian", err, tol)
}

/// Relative error of the scaled I and K against the double-double references at
/// random (k, t), k ≤ k_max and t log-uniform in [1e-4, 600].
pub fn reference_agreement(samples: usize, k_max: u32, seed: u64, tol: f64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(u32, f64)> = (0..samples)
        .map(|_| {
            (
                rng.gen_range(0..=k_max),
                (rng.gen_range(1e-4f64.ln()..600f64.ln())).exp(),
            )
        })
        .collect();
    let errors: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&(k, t)| {
            let Ok(tab) = BesselTable::new(0, k as usize, t) else {
                return (f64::NAN, f64::NAN);
            };
            let rel = |a: dirac_shell::Wide, b: dirac_shell::Wide| ((a - b) / b).to_f64().abs();
            (
                rel(tab.i_scaled(k as i64), reference::i_scaled(k, t)),
                rel(tab.k_scaled(k as i64), reference::k_scaled(k, t)),
            )
        })
        .collect();
    vec![
        Check::at_most(
            "bessel_i_vs_reference",
            worst(errors.iter().map(|e| e.0)),
            tol,
        ),
        Check::at_most(
            "bessel_k_vs_reference",
            worst(errors.iter().map(|e| e.1)),
            tol,
        ),
    ]
}

// ---------------------------------------------------------------- circle

/// Bessel-based and shooting eigenvalues agree for |k| ≤ k_abs_max, and every
/// root found has a small residual.
pub fn oracle_agreement(tau: f64, k_abs_max: i64, tol: f64, residual_tol: f64) -> Vec<Check> {
    let c = unit_circle(tau);
    let out: Vec<(f64, f64)> = (-k_abs_max..=k_abs_max)
        .into_par_iter()
        .map(|k| {
            let roots = solve_channel(&c, k, spectrum::DEFAULT_TOL);
            let residual = roots
                .as_ref()
                .map_or(f64::NAN, |rs| worst(rs.iter().map(|r| r.residual.abs())));
            let diff = match (
                solve_eigenvalue(&c, k, spectrum::DEFAULT_TOL),
                shooting::oracle_eigenvalue(&c, k, 1e-14),
            ) {
                (Ok(a), Ok(b)) => (a.z - b.z).abs(),
                _ => f64::NAN,
            };
            (diff, residual)
        })
        .collect();
    vec![
        Check::at_most(
            format!("oracle_agreement_tau{tau}"),
            worst(out.iter().map(|o| o.0)),
            tol,
        ),
        Check::at_most(
            format!("root_residual_tau{tau}"),
            worst(out.iter().map(|o| o.1)),
            residual_tol,
        ),
    ]
}

/// The matching determinant and the residual stay away from zero at z* and
/// next to the thresholds.
pub fn exclusions(tau: f64, k_abs_max: i64, bound: f64) -> Vec<Check> {
    let c = unit_circle(tau);
    let points = [c.z_star(), c.mass * (1.0 - 1e-6), -c.mass * (1.0 - 1e-6)];
    let out: Vec<(f64, f64)> = (-k_abs_max..=k_abs_max)
        .into_par_iter()
        .flat_map_iter(|k| {
            points.iter().map(move |&z| {
                let det =
                    or_nan(shooting::matching_determinant(&c, k, z).map(|m| m.determinant.abs()));
                (det, or_nan(eigenvalue_residual(&c, k, z).map(f64::abs)))
            })
        })
        .collect();
    let least = |f: fn(&(f64, f64)) -> f64| {
        out.iter()
            .map(f)
            .fold(f64::INFINITY, |a, v| if v.is_nan() { v } else { a.min(v) })
    };
    vec![
        Check::at_least(
            format!("excluded_points_determinant_tau{tau}"),
            least(|o| o.0),
            bound,
        ),
        Check::at_least(
            format!("excluded_points_residual_tau{tau}"),
            least(|o| o.1),
            bound,
        ),
    ]
}

/// Boundary conditions, normalisation and the radial equation for every
/// eigenpair with |k| ≤ k_abs_max.
pub fn eigenfunction_integrity(
    tau: f64,
    k_abs_max: i64,
    bc_tol: f64,
    norm_tol: f64,
    equation_tol: f64,
) -> Vec<Check> {
    let c = unit_circle(tau);
    let out: Vec<[f64; 3]> = (-k_abs_max..=k_abs_max)
        .into_par_iter()
        .map(|k| {
            let Ok(e) = solve_eigenvalue(&c, k, spectrum::DEFAULT_TOL)
                .and_then(|r| RadialEigenfunction::new(&c, k, r.z))
            else {
                return [f64::NAN; 3];
            };
            let bc = or_nan(e.boundary_residual().map(|b| b.res_u.max(b.res_v)));
            let norm = or_nan(
                e.observables(&RadialGrid::for_state(&e))
                    .map(|o| (o.norm - 1.0).abs()),
            );
            let eq = worst(
                [0.5, 0.8, 1.3, 2.0]
                    .iter()
                    .map(|&r| or_nan(e.equation_residual(r * c.radius, 1e-3))),
            );
            [bc, norm, eq]
        })
        .collect();
    vec![
        Check::at_most(
            format!("boundary_residual_tau{tau}"),
            worst(out.iter().map(|o| o[0])),
            bc_tol,
        ),
        Check::at_most(
            format!("norm_defect_tau{tau}"),
            worst(out.iter().map(|o| o[1])),
            norm_tol,
        ),
        Check::at_most(
            format!("radial_equation_tau{tau}"),
            worst(out.iter().map(|o| o[2])),
            equation_tol,
        ),
    ]
}

/// Peak position, spread around R and pointwise decay of |ψ_k|² for τ = 0, m = R = 1.
pub fn concentration() -> Vec<Check> {
    let c = unit_circle(0.0);
    let states: Vec<RadialEigenfunction> = (10..=40)
        .into_par_iter()
        .map(|k| {
            RadialEigenfunction::new(
                &c,
                k,
                solve_eigenvalue(&c, k, spectrum::DEFAULT_TOL).unwrap().z,
            )
            .unwrap()
        })
        .collect();
    // midpoint grid on (0, 3R) never hits R
    let radii: Vec<f64> = (0..3000).map(|j| (j as f64 + 0.5) * 1e-3).collect();
    let peaks: Vec<f64> = states
        .par_iter()
        .map(|e| {
            let d: Vec<f64> = radii
                .iter()
                .map(|&r| e.density(r).unwrap_or(f64::NAN))
                .collect();
            let j = (0..d.len()).max_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
            radii[j]
        })
        .collect();
    let spreads: Vec<f64> = states
        .par_iter()
        .map(|e| {
            let (mut num, mut den) = (0.0, 0.0);
            for &(r, w) in RadialGrid::for_state(e).nodes() {
                let rho = e.density(r).unwrap_or(f64::NAN) * r * w;
                num += rho * (r - c.radius).powi(2);
                den += rho;
            }
            (num / den).sqrt()
        })
        .collect();
    let offset = worst(peaks.iter().map(|p| (p - c.radius).abs() / c.radius));
    let dist: Vec<f64> = peaks.iter().map(|p| (p - c.radius).abs()).collect();
    let rises = |v: &[f64], strict: bool| {
        v.windows(2)
            .filter(|w| {
                if strict {
                    !(w[1] < w[0])
                } else {
                    !(w[1] <= w[0])
                }
            })
            .count() as f64
    };
    let pointwise: f64 = [0.5, 2.0]
        .iter()
        .map(|&r| {
            let d: Vec<f64> = states[10..]
                .iter()
                .map(|e| e.density(r).unwrap_or(f64::NAN))
                .collect();
            rises(&d, true)
        })
        .sum();
    vec![
        Check::at_most("peak_within_tenth_of_radius", offset, 0.1),
        Check::at_most("peak_distance_increases", rises(&dist, false), 0.0),
        Check::at_most("radial_spread_increases", rises(&spreads, true), 0.0),
        Check::at_most("pointwise_density_increases", pointwise, 0.0),
    ]
}

// ---------------------------------------------------------------- symmetry

/// max |z_k + z_{−k−1}|/m at τ = 0 for |k| ≤ k_abs_max.
pub fn mirror_symmetry(eta_sign: f64, k_abs_max: i64, tol: f64) -> Check {
    let c = circle(1.0, 0.0, eta_sign);
    let err = worst(
        (-k_abs_max..=k_abs_max)
            .into_par_iter()
            .map(|k| {
                let z = |k| solve_eigenvalue(&c, k, spectrum::DEFAULT_TOL).map(|r| r.z);
                match (z(k), z(-k - 1)) {
                    (Ok(a), Ok(b)) => (a + b).abs() / c.mass,
                    _ => f64::NAN,
                }
            })
            .collect::<Vec<_>>(),
    );
    let sign = if eta_sign > 0.0 { "plus" } else { "minus" };
    Check::at_most(format!("mirror_symmetry_eta_{sign}"), err, tol)
}

// ---------------------------------------------------------------- asymptotics

/// k⁴|z_k − P₃(1/k)| for k in `ks`; `third` replaces the k⁻³ coefficient when given.
pub fn scaled_remainders(config: &CircleConfig, ks: &[i64], third: Option<f64>) -> Vec<f64> {
    let mut coef = asymptotic_coefficients(config);
    if let Some(c3) = third {
        coef[3] = c3;
    }
    ks.par_iter()
        .map(|&k| {
            let x = 1.0 / k as f64;
            let p = config.mass * coef.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
            solve_eigenvalue(config, k, spectrum::DEFAULT_TOL)
                .map_or(f64::NAN, |r| (r.z - p).abs() * (k as f64).powi(4))
        })
        .collect()
}

/// Largest factor by which a sequence departs from its median.
pub fn spread_about_median(v: &[f64]) -> f64 {
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let med = if s.len() % 2 == 1 {
        s[s.len() / 2]
    } else {
        0.5 * (s[s.len() / 2 - 1] + s[s.len() / 2])
    };
    worst(v.iter().map(|x| (x / med).max(med / x)))
}

/// The remainder after the cubic truncation is O(1/k⁴) for τ = 0, η = 2, m = R = 1.
pub fn remainder_order(bound: f64) -> Check {
    let c = circle(1.0, 0.0, 1.0);
    let ks: Vec<i64> = (8..=60).collect();
    Check::at_most(
        "cubic_remainder_spread",
        spread_about_median(&scaled_remainders(&c, &ks, None)),
        bound,
    )
}

/// Coefficients of a least-squares fit of z_k/m in powers of 1/k, 20 ≤ |k| ≤ 60.
pub fn fitted_coefficients(config: &CircleConfig, degree: usize) -> Vec<f64> {
    const K0: f64 = 20.0;
    let ks: Vec<i64> = (-60..=-20).chain(20..=60).collect();
    let z: Vec<f64> = ks
        .par_iter()
        .map(|&k| {
            solve_eigenvalue(config, k, spectrum::DEFAULT_TOL)
                .map_or(f64::NAN, |r| r.z / config.mass)
        })
        .collect();
    // columns in (K0/k)^j are O(1), which keeps the system well scaled
    let a = DMatrix::from_fn(ks.len(), degree + 1, |i, j| {
        (K0 / ks[i] as f64).powi(j as i32)
    });
    let b = DVector::from_vec(z);
    match a.svd(true, true).solve(&b, 1e-15) {
        Ok(x) => x
            .iter()
            .enumerate()
            .map(|(j, v)| v * K0.powi(j as i32))
            .collect(),
        Err(_) => vec![f64::NAN; degree + 1],
    }
}

/// Orders 0–2 of the expansion do not move between R = 1 and R = 2; order 3
/// matches its closed form at both radii.
pub fn radius_independence(tol: f64, third_tol: f64) -> Vec<Check> {
    let (c1, c2) = (circle(1.0, 0.0, 1.0), circle(2.0, 0.0, 1.0));
    let (f1, f2) = (fitted_coefficients(&c1, 8), fitted_coefficients(&c2, 8));
    let shift = worst((0..3).map(|j| (f1[j] - f2[j]).abs()));
    let third = worst(
        [(&c1, &f1), (&c2, &f2)]
            .iter()
            .map(|(c, f)| (f[3] - asymptotic_coefficients(c)[3]).abs()),
    );
    vec![
        Check::at_most("low_order_coefficients_radius_shift", shift, tol),
        Check::at_most("third_order_coefficient_error", third, third_tol),
    ]
}

pub const LARGE_RADII: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

/// ⟨σ₃⟩, ⟨v_θ⟩ and the quadrature ⟨v_r⟩ of the k = 0 state at each radius.
pub fn large_radius_observables(tau: f64) -> Vec<(f64, [f64; 3])> {
    LARGE_RADII
        .par_iter()
        .map(|&r| {
            let c = circle(r, tau, 1.0);
            let obs = solve_eigenvalue(&c, 0, spectrum::DEFAULT_TOL)
                .and_then(|s| RadialEigenfunction::new(&c, 0, s.z))
                .and_then(|e| e.observables(&RadialGrid::for_state(&e)));
            (
                r,
                obs.map_or([f64::NAN; 3], |o| [o.sigma3, o.v_theta, o.v_r_quadrature]),
            )
        })
        .collect()
}

/// Least-squares slope of y against x.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

/// ⟨σ₃⟩ + τ/η decays like R⁻², ⟨v_r⟩ vanishes and ⟨v_θ⟩ is negative.
pub fn spin_and_velocity(tau: f64, slope_tol: f64, vr_tol: f64) -> Vec<Check> {
    let p = tau / circle(1.0, tau, 1.0).coupling.eta;
    let obs = large_radius_observables(tau);
    let pts: Vec<(f64, f64)> = obs
        .iter()
        .map(|(r, o)| (r.ln(), (o[0] + p).abs().ln()))
        .collect();
    vec![
        Check::at_most(
            format!("spin_inverse_square_law_tau{tau}"),
            (slope(&pts) / -2.0 - 1.0).abs(),
            slope_tol,
        ),
        Check::at_most(
            format!("radial_velocity_tau{tau}"),
            worst(obs.iter().map(|(_, o)| o[2].abs())),
            vr_tol,
        ),
        Check::below(
            format!("angular_velocity_sign_tau{tau}"),
            obs.iter().map(|(_, o)| o[1]).fold(f64::MIN, f64::max),
            0.0,
        ),
    ]
}

/// Slope of ln|⟨v_θ⟩| against R relative to the exponential rate 4m/|η|.
pub fn angular_velocity_rate(tau: f64, tol: f64) -> Check {
    let eta = circle(1.0, tau, 1.0).coupling.eta;
    let pts: Vec<(f64, f64)> = large_radius_observables(tau)
        .iter()
        .map(|(r, o)| (*r, o[1].abs().ln()))
        .collect();
    let rate = -4.0 / eta.abs();
    Check::at_most(
        format!("angular_velocity_exponential_rate_tau{tau}"),
        (slope(&pts) / rate - 1.0).abs(),
        tol,
    )
}

// ---------------------------------------------------------------- line

pub fn line_config(eta: f64, tau: f64) -> LineConfig {
    LineConfig::new(1.0, CouplingPair::new(eta, tau).expect("critical pair"))
        .expect("positive mass")
}

/// The two figure settings: (η = 2, τ = 0, b₀) and (η = √13, τ = −3, (2b₀ + b₁)/√5).
pub fn line_cases() -> Vec<(LineConfig, FormFactor)> {
    vec![
        (line_config(2.0, 0.0), FormFactor::hermite(0).unwrap()),
        (line_config(13f64.sqrt(), -3.0), line::tilted_gaussian()),
    ]
}

/// max |Λ² + I| over random critical pairs with |τ| ≤ 5 and both signs of η.
/// Λ² + I equals −(η² − τ² − 4)/4 exactly, so the check measures how well the
/// rounded η keeps the pair critical; that defect grows like ε·τ².
pub fn transfer_square(samples: usize, seed: u64, tol: f64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let err = worst((0..samples).map(|j| {
        let tau = rng.gen_range(-5.0..5.0);
        let pair = CouplingPair::from_tau(tau, if j % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        let sq = LambdaMatrix::critical(&pair).unwrap().square();
        worst(
            (0..2)
                .flat_map(|r| (0..2).map(move |c| (r, c)))
                .map(|(r, c)| {
                    let id = if r == c { -1.0 } else { 0.0 };
                    (sq.entries[r][c] - C::new(id, 0.0)).norm()
                }),
        )
    }));
    Check::at_most("transfer_matrix_square", err, tol)
}

/// ψ just right of the line equals Λ ψ(0⁻), and the jump satisfies the
/// interface condition, relative to |ψ(0⁻)|.
pub fn transmission(tol: f64) -> Vec<Check> {
    let mut jump = 0.0f64;
    let mut condition = 0.0f64;
    for (c, xi) in line_cases() {
        let f = LineField::new(&c, &xi, 6.0, &PsiQuadrature::default()).unwrap();
        let (eta, tau) = (c.coupling.eta, c.coupling.tau);
        for j in 0..=48 {
            let y = -6.0 + 0.25 * j as f64;
            let minus = f.evaluate(0.0, y, Side::Left).psi;
            let plus = f.evaluate(1e-12, y, Side::Left).psi;
            let scale = minus[0].norm() + minus[1].norm();
            let mapped = f.lambda.apply(minus);
            jump = jump.max(((plus[0] - mapped[0]).norm() + (plus[1] - mapped[1]).norm()) / scale);
            let (d, s) = (
                [plus[0] - minus[0], plus[1] - minus[1]],
                [plus[0] + minus[0], plus[1] + minus[1]],
            );
            let lhs = [C::i() * d[1], C::i() * d[0]];
            let rhs = [s[0] * (0.5 * (eta + tau)), s[1] * (0.5 * (eta - tau))];
            condition =
                condition.max(((lhs[0] - rhs[0]).norm() + (lhs[1] - rhs[1]).norm()) / scale);
        }
    }
    vec![
        Check::at_most("line_transmission", jump, tol),
        Check::at_most("line_interface_condition", condition, tol),
    ]
}

/// ‖ψ_Ξ‖ over the plane against ‖Ξ‖ for random Hermite form factors.
pub fn norm_identity(samples: usize, seed: u64, tol: f64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(LineConfig, FormFactor)> = (0..samples)
        .map(|_| {
            let n = rng.gen_range(1..=4);
            let coef: Vec<C> = (0..n)
                .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let tau = rng.gen_range(-3.0..3.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let pair = CouplingPair::from_tau(tau, sign).unwrap();
            (
                LineConfig::new(1.0, pair).unwrap(),
                FormFactor::from_hermite_coefficients(coef).unwrap(),
            )
        })
        .collect();
    let err = worst(cases.iter().map(|(c, xi)| {
        or_nan(
            line::norm_identity(c, xi, &PlaneQuadrature::default()).map(|(a, b)| (a - b).abs() / b),
        )
    }));
    Check::at_most("line_norm_identity", err, tol)
}

/// Closed-form statistics against plane quadrature, for both figure settings.
pub fn closed_forms(tol: f64) -> Check {
    let err = worst(line_cases().iter().map(|(c, xi)| {
        let (Ok(closed), Ok(plane)) = (
            line::line_observables(c, xi),
            line::plane_moments(c, xi, &PlaneQuadrature::default()),
        ) else {
            return f64::NAN;
        };
        statistics_pairs(&closed, &plane.statistics)
            .iter()
            .map(|(_, _, a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }));
    Check::at_most("line_closed_forms", err, tol)
}

/// (observable, statistic, closed form, quadrature) rows.
pub fn statistics_pairs(
    closed: &line::LineStatistics,
    plane: &line::LineStatistics,
) -> Vec<(&'static str, &'static str, f64, f64)> {
    let mut rows = Vec::new();
    let y = |s: &line::LineStatistics| {
        s.y.unwrap_or(line::MeanVariance {
            mean: f64::NAN,
            variance: f64::NAN,
        })
    };
    for (name, a, b) in [
        ("sigma3", closed.sigma3, plane.sigma3),
        ("x", closed.x, plane.x),
        ("y", y(closed), y(plane)),
        ("vx", closed.vx, plane.vx),
        ("vy", closed.vy, plane.vy),
    ] {
        rows.push((name, "mean", a.mean, b.mean));
        rows.push((name, "variance", a.variance, b.variance));
    }
    rows
}

/// Decay rate of |ψ| in x on both sides against 2m/|η|.
pub fn tail_rate(tol: f64) -> Check {
    let err = worst(line_cases().iter().flat_map(|(c, xi)| {
        [Side::Left, Side::Right].map(|side| {
            or_nan(
                line::tail_decay_rate(c, xi, side, 5.0, 20.0, 31)
                    .map(|s| (s / c.gap_rate() - 1.0).abs()),
            )
        })
    }));
    Check::at_most("line_tail_rate", err, tol)
}
