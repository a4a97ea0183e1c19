//! Bound states of the straight-line model at the isolated eigenvalue z* = −(τ/η) m.
//!
//! ψ_Ξ(x, y) = 1/(2√π) · [θ(x) Λ + θ(−x)] ∫ p(k) Ξ(k) e^{iky − κ(k)|x|} dk with
//! κ(k) = √(k² + 4m²/η²) and p(k) = (√((1−τ/η)(κ+k)), −i√((1+τ/η)(κ−k))).

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::CouplingPair;
use crate::quadrature::{panels_toward_start, GaussLegendre};

/// Largest Hermite index accepted for a form factor.
pub const MAX_HERMITE: usize = 200;

/// Mass and critical coupling of the line model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineConfig {
    pub mass: f64,
    pub coupling: CouplingPair,
}

impl LineConfig {
    pub fn new(mass: f64, coupling: CouplingPair) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        if !coupling.critical {
            return Err(Error::NotCritical {
                eta: coupling.eta,
                tau: coupling.tau,
                defect: coupling.defect(),
            });
        }
        Ok(LineConfig { mass, coupling })
    }

    pub fn z_star(&self) -> f64 {
        -self.coupling.tau / self.coupling.eta * self.mass
    }

    /// 2m/|η|, the transverse decay rate at k = 0.
    pub fn gap_rate(&self) -> f64 {
        2.0 * self.mass / self.coupling.eta.abs()
    }

    /// κ(k) = √(k² + 4m²/η²).
    pub fn kappa(&self, k: f64) -> f64 {
        k.hypot(self.gap_rate())
    }

    fn ratio(&self) -> f64 {
        self.coupling.tau / self.coupling.eta
    }
}

/// The transfer matrix Λ with ψ(0⁺) = Λ ψ(0⁻).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaMatrix {
    pub entries: [[C; 2]; 2],
}

impl LambdaMatrix {
    /// [[0, −i(η−τ)/2], [−i(η+τ)/2, 0]], valid for critical pairs.
    pub fn critical(coupling: &CouplingPair) -> Result<Self> {
        if !coupling.critical {
            return Err(Error::NotCritical {
                eta: coupling.eta,
                tau: coupling.tau,
                defect: coupling.defect(),
            });
        }
        let (eta, tau) = (coupling.eta, coupling.tau);
        let z = C::new(0.0, 0.0);
        Ok(LambdaMatrix {
            entries: [
                [z, C::new(0.0, -0.5 * (eta - tau))],
                [C::new(0.0, -0.5 * (eta + tau)), z],
            ],
        })
    }

    /// [iσ₁ − (η + τσ₃)/2]⁻¹ [iσ₁ + (η + τσ₃)/2] for any pair with η² − τ² ≠ −4.
    pub fn general(eta: f64, tau: f64) -> Result<Self> {
        let (p, q) = (0.5 * (eta + tau), 0.5 * (eta - tau));
        let det = p * q + 1.0;
        if det.abs() < 1e-14 * (1.0 + p.abs() * q.abs()) {
            return Err(Error::Domain(format!(
                "transfer matrix undefined for eta^2 - tau^2 = -4 (eta={eta}, tau={tau})"
            )));
        }
        let i = C::i();
        let inv = [[C::from(-q) / det, -i / det], [-i / det, C::from(-p) / det]];
        let rhs = [[C::from(p), i], [i, C::from(q)]];
        Ok(LambdaMatrix {
            entries: mul(&inv, &rhs),
        })
    }

    pub fn apply(&self, v: [C; 2]) -> [C; 2] {
        let e = &self.entries;
        [
            e[0][0] * v[0] + e[0][1] * v[1],
            e[1][0] * v[0] + e[1][1] * v[1],
        ]
    }

    pub fn square(&self) -> LambdaMatrix {
        LambdaMatrix {
            entries: mul(&self.entries, &self.entries),
        }
    }
}

fn mul(a: &[[C; 2]; 2], b: &[[C; 2]; 2]) -> [[C; 2]; 2] {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn lambda_matrix(coupling: &CouplingPair) -> Result<LambdaMatrix> {
    LambdaMatrix::critical(coupling)
}

/// The spinor p(k) multiplying Ξ(k) in the k-integral.
pub fn momentum_profile(config: &LineConfig, k: f64) -> [C; 2] {
    let kappa = config.kappa(k);
    let r = config.ratio();
    // κ − k loses digits for k ≫ κ − |k|; use (κ−k)(κ+k) = 4m²/η² instead
    let c2 = config.gap_rate() * config.gap_rate();
    let (plus, minus) = if k >= 0.0 {
        (kappa + k, c2 / (kappa + k))
    } else {
        (c2 / (kappa - k), kappa - k)
    };
    [
        C::new(((1.0 - r) * plus).sqrt(), 0.0),
        C::new(0.0, -((1.0 + r) * minus).sqrt()),
    ]
}

/// Orthonormal Hermite functions b_0(k), …, b_n(k),
/// b_n(k) = (2/π)^{1/4} (2ⁿ n!)^{-1/2} H_n(√2 k) e^{−k²}.
pub fn hermite_functions(n: usize, k: f64) -> Vec<f64> {
    // the recurrence runs on e^{k²}·b_j with a separate log scale
    let mut out = Vec::with_capacity(n + 1);
    let mut log = -k * k;
    let (mut prev, mut cur) = (0.0, (2.0 / PI).powf(0.25));
    let emit = |v: f64, log: f64| {
        if v == 0.0 {
            0.0
        } else {
            v.signum() * (v.abs().ln() + log).exp()
        }
    };
    out.push(emit(cur, log));
    for j in 0..n {
        let jf = j as f64;
        let next = 2.0 * k / (jf + 1.0).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            prev *= 1e-150;
            cur *= 1e-150;
            log += 150.0 * std::f64::consts::LN_10;
        }
        out.push(emit(cur, log));
    }
    out
}

/// Natural cubic spline through (x_j, y_j).
#[derive(Clone, Debug)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut second = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            diag[i] = 2.0 * (h0 + h1);
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        // Thomas sweep on the interior rows
        for i in 2..n - 1 {
            let h = x[i] - x[i - 1];
            let w = h / diag[i - 1];
            diag[i] -= w * h;
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            let h1 = x[i + 1] - x[i];
            second[i] = (rhs[i] - h1 * second[i + 1]) / diag[i];
        }
        CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            second,
        }
    }

    /// Value and first derivative; zero outside the grid.
    fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.x.len();
        if !(t >= self.x[0] && t <= self.x[n - 1]) {
            return (0.0, 0.0);
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = 1.0 - a;
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let v = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (self.y[i + 1] - self.y[i]) / h
            + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        (v, d)
    }
}

#[derive(Clone, Debug)]
pub enum Representation {
    /// Coefficients on the orthonormal Hermite functions b_n.
    Hermite(Vec<C>),
    /// Complex samples on an increasing k-grid, interpolated by natural cubic splines.
    Sampled { grid: Vec<f64>, values: Vec<C> },
}

/// Profile Ξ(k) of a line bound state, optionally translated along the line
/// by the phase e^{i k y₀}.
#[derive(Clone, Debug)]
pub struct FormFactor {
    pub representation: Representation,
    pub shift_y0: f64,
    splines: Option<(CubicSpline, CubicSpline)>,
}

impl FormFactor {
    pub fn hermite(n: usize) -> Result<Self> {
        if n > MAX_HERMITE {
            return Err(Error::FormFactor(format!(
                "Hermite index {n} exceeds {MAX_HERMITE}"
            )));
        }
        let mut c = vec![C::new(0.0, 0.0); n + 1];
        c[n] = C::new(1.0, 0.0);
        Self::from_hermite_coefficients(c)
    }

    pub fn from_hermite_coefficients(coefficients: Vec<C>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.len() > MAX_HERMITE + 1 {
            return Err(Error::FormFactor(format!(
                "need between 1 and {} Hermite coefficients, got {}",
                MAX_HERMITE + 1,
                coefficients.len()
            )));
        }
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::FormFactor("non-finite Hermite coefficient".into()));
        }
        Ok(FormFactor {
            representation: Representation::Hermite(coefficients),
            shift_y0: 0.0,
            splines: None,
        })
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<C>) -> Result<Self> {
        if grid.len() < 4 || grid.len() != values.len() {
            return Err(Error::FormFactor(format!(
                "need at least 4 samples with matching lengths, got {} and {}",
                grid.len(),
                values.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::FormFactor(
                "k-grid must be finite and strictly increasing".into(),
            ));
        }
        if values
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::FormFactor("non-finite sample".into()));
        }
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = values.iter().map(|v| v.im).collect();
        let splines = Some((CubicSpline::new(&grid, &re), CubicSpline::new(&grid, &im)));
        Ok(FormFactor {
            representation: Representation::Sampled { grid, values },
            shift_y0: 0.0,
            splines,
        })
    }

    /// Translates the state by the phase e^{i k y₀}.
    pub fn with_shift(mut self, y0: f64) -> Self {
        self.shift_y0 = y0;
        self
    }

    /// Same profile with unit L² norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if !(n > 0.0) {
            return Err(Error::FormFactor(
                "zero form factor cannot be normalised".into(),
            ));
        }
        let mut out = self.clone();
        match &mut out.representation {
            Representation::Hermite(c) => c.iter_mut().for_each(|v| *v /= n),
            Representation::Sampled { grid, values } => {
                values.iter_mut().for_each(|v| *v /= n);
                out = FormFactor::sampled(grid.clone(), values.clone())?.with_shift(self.shift_y0);
            }
        }
        Ok(out)
    }

    /// Ξ(k) and Ξ'(k), including the translation phase.
    pub fn value_and_derivative(&self, k: f64) -> (C, C) {
        let (v, d) = match (&self.representation, &self.splines) {
            (Representation::Hermite(c), _) => {
                let b = hermite_functions(c.len(), k);
                let mut v = C::new(0.0, 0.0);
                let mut d = C::new(0.0, 0.0);
                for (n, cn) in c.iter().enumerate() {
                    v += cn * b[n];
                    // b_n' = √n b_{n−1} − √(n+1) b_{n+1}
                    let lower = if n > 0 {
                        (n as f64).sqrt() * b[n - 1]
                    } else {
                        0.0
                    };
                    d += cn * (lower - ((n + 1) as f64).sqrt() * b[n + 1]);
                }
                (v, d)
            }
            (_, Some((re, im))) => {
                let (a, da) = re.eval(k);
                let (b, db) = im.eval(k);
                (C::new(a, b), C::new(da, db))
            }
            _ => unreachable!("sampled form factor without splines"),
        };
        if self.shift_y0 == 0.0 {
            return (v, d);
        }
        let phase = C::from_polar(1.0, k * self.shift_y0);
        (phase * v, phase * (d + C::i() * self.shift_y0 * v))
    }

    pub fn value(&self, k: f64) -> C {
        self.value_and_derivative(k).0
    }

    /// ‖Ξ‖²: coefficient sum for Hermite profiles, quadrature for samples.
    pub fn norm_sq(&self) -> f64 {
        match &self.representation {
            Representation::Hermite(c) => c.iter().map(|v| v.norm_sqr()).sum(),
            Representation::Sampled { .. } => self.norm_sq_quadrature(),
        }
    }

    /// ‖Ξ‖² by composite Gauss–Legendre quadrature in k.
    pub fn norm_sq_quadrature(&self) -> f64 {
        self.k_integral(|_| 1.0)
    }

    /// ∫ w(k) |Ξ(k)|² dk.
    pub fn k_integral<F: Fn(f64) -> f64>(&self, w: F) -> f64 {
        self.k_nodes()
            .iter()
            .map(|&(k, wt)| wt * w(k) * self.value(k).norm_sqr())
            .sum()
    }

    /// Integration window [lo, hi] in k.
    pub fn k_window(&self) -> (f64, f64) {
        match &self.representation {
            Representation::Hermite(c) => {
                let n2 = c
                    .iter()
                    .map(|v| v.norm_sqr())
                    .sum::<f64>()
                    .max(f64::MIN_POSITIVE);
                let kc = k_operator(c);
                let mean = inner(c, &kc).re / n2;
                let spread = (kc.iter().map(|v| v.norm_sqr()).sum::<f64>() / n2 - mean * mean)
                    .max(0.0)
                    .sqrt();
                let half = 10f64.max(mean.abs() + 8.0 * spread);
                (-half, half)
            }
            Representation::Sampled { grid, .. } => (grid[0], grid[grid.len() - 1]),
        }
    }

    /// Highest oscillation rate of Ξ in k, used to size quadrature panels.
    fn oscillation_rate(&self) -> f64 {
        let intrinsic = match &self.representation {
            Representation::Hermite(c) => (2.0 * (2.0 * c.len() as f64 + 1.0)).sqrt(),
            Representation::Sampled { grid, .. } => {
                let h = grid
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(f64::INFINITY, f64::min);
                PI / h
            }
        };
        intrinsic + self.shift_y0.abs()
    }

    fn k_nodes(&self) -> Vec<(f64, f64)> {
        let gl = GaussLegendre::new(32);
        match &self.representation {
            Representation::Hermite(_) => {
                let (lo, hi) = self.k_window();
                // |Ξ|² oscillates at twice the amplitude rate
                let panels =
                    16usize.max(((hi - lo) * 2.0 * self.oscillation_rate() / 15.0).ceil() as usize);
                uniform_nodes(&gl, lo, hi, panels)
            }
            Representation::Sampled { grid, .. } => {
                let gl = GaussLegendre::new(8);
                grid.windows(2)
                    .flat_map(|w| gl.mapped(w[0], w[1]).collect::<Vec<_>>())
                    .collect()
            }
        }
    }

    /// Whether Ξ' is square integrable: Hermite profiles always are, sampled
    /// profiles must vanish at both grid ends.
    pub fn derivative_is_square_integrable(&self) -> bool {
        match &self.representation {
            Representation::Hermite(_) => true,
            Representation::Sampled { values, .. } => {
                let top = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let edge = values[0].norm().max(values[values.len() - 1].norm());
                edge <= 1e-8 * top
            }
        }
    }

    /// ⟨b_n, Ξ⟩ for n = 0..=n_max by quadrature.
    pub fn hermite_projection(&self, n_max: usize) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); n_max + 1];
        let gl = GaussLegendre::new(32);
        let (lo, hi) = self.k_window();
        let half = lo
            .abs()
            .max(hi.abs())
            .max(((2 * n_max + 1) as f64).sqrt() + 8.0);
        let rate = self.oscillation_rate() + (2.0 * (2.0 * n_max as f64 + 1.0)).sqrt();
        let panels = 16usize.max((2.0 * half * rate / 15.0).ceil() as usize);
        for (k, w) in uniform_nodes(&gl, -half, half, panels) {
            let b = hermite_functions(n_max, k);
            let v = self.value(k);
            for (o, bn) in out.iter_mut().zip(&b) {
                *o += w * bn * v;
            }
        }
        out
    }
}

fn uniform_nodes(gl: &GaussLegendre, lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            gl.mapped(lo + p as f64 * h, lo + (p + 1) as f64 * h)
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Coefficients of k·Ξ: 2k b_n = √(n+1) b_{n+1} + √n b_{n−1}.
fn k_operator(c: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); c.len() + 1];
    for (n, cn) in c.iter().enumerate() {
        out[n + 1] += cn * (0.5 * ((n + 1) as f64).sqrt());
        if n > 0 {
            out[n - 1] += cn * (0.5 * (n as f64).sqrt());
        }
    }
    out
}

/// Coefficients of ∂_k Ξ: b_n' = √n b_{n−1} − √(n+1) b_{n+1}.
fn derivative_operator(c: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); c.len() + 1];
    for (n, cn) in c.iter().enumerate() {
        out[n + 1] -= cn * ((n + 1) as f64).sqrt();
        if n > 0 {
            out[n - 1] += cn * (n as f64).sqrt();
        }
    }
    out
}

/// ⟨a, b⟩, conjugate-linear in a.
fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// The modplots2 profile (2/√5)(2/π)^{1/4}(k+1)e^{−k²} = (2 b₀ + b₁)/√5.
pub fn tilted_gaussian() -> FormFactor {
    let s = 5f64.sqrt();
    FormFactor::from_hermite_coefficients(vec![C::new(2.0 / s, 0.0), C::new(1.0 / s, 0.0)]).unwrap()
}

/// Side of the line used when x = 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Side {
    /// x → 0⁻
    #[default]
    Left,
    /// x → 0⁺
    Right,
}

/// Options for the k-integral.
#[derive(Clone, Copy, Debug)]
pub struct PsiQuadrature {
    /// Minimum node count; more panels are added for oscillatory integrands.
    pub nodes: usize,
    /// Absolute tolerance on the error estimate.
    pub tolerance: f64,
}

impl Default for PsiQuadrature {
    fn default() -> Self {
        PsiQuadrature {
            nodes: 400,
            tolerance: 1e-10,
        }
    }
}

const PANEL_NODES: usize = 50;

#[derive(Clone, Copy, Debug)]
struct KNode {
    k: f64,
    kappa: f64,
    amp: [C; 2],
}

/// ψ(x, y) together with its quadrature error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiValue {
    pub psi: [C; 2],
    pub error: f64,
}

impl PsiValue {
    pub fn density(&self) -> f64 {
        self.psi[0].norm_sqr() + self.psi[1].norm_sqr()
    }
}

/// A form factor discretised in k, ready for evaluation at any (x, y) with |y| ≤ y_max.
#[derive(Clone, Debug)]
pub struct LineField {
    pub config: LineConfig,
    pub lambda: LambdaMatrix,
    fine: Vec<KNode>,
    coarse: Vec<KNode>,
    tail: f64,
}

impl LineField {
    pub fn new(
        config: &LineConfig,
        xi: &FormFactor,
        y_max: f64,
        quad: &PsiQuadrature,
    ) -> Result<Self> {
        if !(y_max.is_finite() && quad.nodes >= PANEL_NODES && quad.tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "invalid quadrature request y_max={y_max}, nodes={}",
                quad.nodes
            )));
        }
        let (lo, hi) = xi.k_window();
        let rate = xi.oscillation_rate() + y_max.abs();
        let panels = (quad.nodes / PANEL_NODES).max((((hi - lo) * rate) / 60.0).ceil() as usize);
        let build = |n: usize| -> Vec<KNode> {
            uniform_nodes(&GaussLegendre::new(n), lo, hi, panels)
                .into_iter()
                .map(|(k, w)| {
                    let p = momentum_profile(config, k);
                    let f = xi.value(k) * (w / (2.0 * PI.sqrt()));
                    KNode {
                        k,
                        kappa: config.kappa(k),
                        amp: [p[0] * f, p[1] * f],
                    }
                })
                .collect()
        };
        let edge = |k: f64| {
            let p = momentum_profile(config, k);
            (p[0].norm() + p[1].norm()) * xi.value(k).norm()
        };
        Ok(LineField {
            config: *config,
            lambda: LambdaMatrix::critical(&config.coupling)?,
            fine: build(PANEL_NODES),
            coarse: build(PANEL_NODES / 2),
            tail: (edge(lo) + edge(hi)) / (2.0 * PI.sqrt()),
        })
    }

    fn sum(nodes: &[KNode], x: f64, y: f64) -> [C; 2] {
        let ax = x.abs();
        let mut acc = [C::new(0.0, 0.0); 2];
        for n in nodes {
            let e = C::from_polar((-n.kappa * ax).exp(), n.k * y);
            acc[0] += n.amp[0] * e;
            acc[1] += n.amp[1] * e;
        }
        acc
    }

    fn orient(&self, v: [C; 2], x: f64, side: Side) -> [C; 2] {
        if x > 0.0 || (x == 0.0 && side == Side::Right) {
            self.lambda.apply(v)
        } else {
            v
        }
    }

    /// ψ(x, y); `side` only matters on the line itself.
    pub fn evaluate(&self, x: f64, y: f64, side: Side) -> PsiValue {
        let fine = self.orient(Self::sum(&self.fine, x, y), x, side);
        let coarse = self.orient(Self::sum(&self.coarse, x, y), x, side);
        let error = (fine[0] - coarse[0])
            .norm()
            .max((fine[1] - coarse[1]).norm())
            + self.tail;
        PsiValue { psi: fine, error }
    }

    /// ψ on the tensor grid xs × ys (rows follow xs); x = 0 uses `side`.
    pub fn grid(&self, xs: &[f64], ys: &[f64], side: Side) -> Vec<Vec<[C; 2]>> {
        let phases: Vec<Vec<C>> = ys
            .iter()
            .map(|&y| {
                self.fine
                    .iter()
                    .map(|n| C::from_polar(1.0, n.k * y))
                    .collect()
            })
            .collect();
        xs.par_iter()
            .map(|&x| {
                let weighted: Vec<[C; 2]> = self
                    .fine
                    .iter()
                    .map(|n| {
                        let d = (-n.kappa * x.abs()).exp();
                        [n.amp[0] * d, n.amp[1] * d]
                    })
                    .collect();
                phases
                    .iter()
                    .map(|ph| {
                        let mut acc = [C::new(0.0, 0.0); 2];
                        for (a, e) in weighted.iter().zip(ph) {
                            acc[0] += a[0] * e;
                            acc[1] += a[1] * e;
                        }
                        self.orient(acc, x, side)
                    })
                    .collect()
            })
            .collect()
    }

    /// |ψ|² on xs × ys.
    pub fn density_grid(&self, xs: &[f64], ys: &[f64]) -> Vec<Vec<f64>> {
        self.grid(xs, ys, Side::Left)
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|p| p[0].norm_sqr() + p[1].norm_sqr())
                    .collect()
            })
            .collect()
    }

    /// |(H₀ − z*)ψ| / (m|ψ|) at (x, y) off the line, with eighth-order centred
    /// differences of step h. H₀ = σ₁(−i∂_x) + σ₂(−i∂_y) + mσ₃.
    pub fn equation_residual(&self, x: f64, y: f64, h: f64) -> Result<f64> {
        if x.abs() <= 4.0 * h {
            return Err(Error::Domain(format!(
                "stencil at x={x} with h={h} crosses the line"
            )));
        }
        const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
        let at = |x: f64, y: f64| self.evaluate(x, y, Side::Left).psi;
        let mut dx = [C::new(0.0, 0.0); 2];
        let mut dy = [C::new(0.0, 0.0); 2];
        for (j, c) in W.iter().enumerate() {
            let off = (j + 1) as f64 * h;
            let (xp, xm, yp, ym) = (
                at(x + off, y),
                at(x - off, y),
                at(x, y + off),
                at(x, y - off),
            );
            for s in 0..2 {
                dx[s] += (xp[s] - xm[s]) * (c / h);
                dy[s] += (yp[s] - ym[s]) * (c / h);
            }
        }
        let psi = at(x, y);
        let (m, z, i) = (self.config.mass, self.config.z_star(), C::i());
        let h0 = [
            -i * dx[1] - dy[1] + psi[0] * m,
            -i * dx[0] + dy[0] - psi[1] * m,
        ];
        let diff = ((h0[0] - psi[0] * z).norm_sqr() + (h0[1] - psi[1] * z).norm_sqr()).sqrt();
        let size = m * (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        Ok(diff / size)
    }
}

/// ψ_Ξ(x, y) by Gauss–Legendre quadrature in k; fails when the error
/// estimate exceeds `quad.tolerance`.
pub fn evaluate_psi(
    config: &LineConfig,
    xi: &FormFactor,
    x: f64,
    y: f64,
    side: Side,
    quad: &PsiQuadrature,
) -> Result<PsiValue> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("non-finite point ({x}, {y})")));
    }
    let v = LineField::new(config, xi, y.abs(), quad)?.evaluate(x, y, side);
    if !(v.error <= quad.tolerance) {
        return Err(Error::Quadrature {
            estimate: v.error,
            tolerance: quad.tolerance,
        });
    }
    Ok(v)
}

/// Leading large-|x| behaviour of ψ_Ξ at fixed y:
/// [θ(x)Λ + θ(−x)]·(√(1−τ/η), −i√(1+τ/η))·(√2 m/|η|)·Ξ(0)·e^{−2m|x|/|η|}/√|x|.
pub fn laplace_tail(config: &LineConfig, xi: &FormFactor, x: f64) -> Result<[C; 2]> {
    if !(x.is_finite() && x != 0.0) {
        return Err(Error::Domain(format!("tail law needs x != 0, got {x}")));
    }
    let r = config.ratio();
    let amp = xi.value(0.0)
        * (2f64.sqrt() * config.mass / config.coupling.eta.abs())
        * ((-config.gap_rate() * x.abs()).exp() / x.abs().sqrt());
    let v = [
        C::new((1.0 - r).sqrt(), 0.0) * amp,
        C::new(0.0, -(1.0 + r).sqrt()) * amp,
    ];
    Ok(if x > 0.0 {
        LambdaMatrix::critical(&config.coupling)?.apply(v)
    } else {
        v
    })
}

/// Decay rate of |ψ_Ξ(x, 0)| on one side of the line, from a least-squares fit of
/// ln(|ψ|·√|x|) against |x| over `samples` points in `[from, to]`.
pub fn tail_decay_rate(
    config: &LineConfig,
    xi: &FormFactor,
    side: Side,
    from: f64,
    to: f64,
    samples: usize,
) -> Result<f64> {
    if !(0.0 < from && from < to && samples >= 2) {
        return Err(Error::Domain(format!(
            "invalid tail window [{from}, {to}] with {samples} samples"
        )));
    }
    let sign = if side == Side::Right { 1.0 } else { -1.0 };
    let field = LineField::new(config, xi, 0.0, &PsiQuadrature::default())?;
    let pts: Vec<(f64, f64)> = (0..samples)
        .map(|j| {
            let x = from + (to - from) * j as f64 / (samples - 1) as f64;
            (
                x,
                (field.evaluate(sign * x, 0.0, side).density().sqrt() * x.sqrt()).ln(),
            )
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(-num / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanVariance {
    pub mean: f64,
    pub variance: f64,
}

/// Expectation values and variances in the state ψ_Ξ/‖ψ_Ξ‖.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineStatistics {
    pub sigma3: MeanVariance,
    pub x: MeanVariance,
    /// None when ∂_kΞ is not square integrable.
    pub y: Option<MeanVariance>,
    pub vx: MeanVariance,
    pub vy: MeanVariance,
}

/// ⟨y⟩ = ⟨Ξ, i∂_kΞ⟩ and Var(y) = ‖∂_kΞ‖² + ¼‖Ξ/κ‖² − ⟨y⟩², for unit Ξ.
pub fn y_statistics(config: &LineConfig, xi: &FormFactor) -> Result<MeanVariance> {
    if !xi.derivative_is_square_integrable() {
        return Err(Error::Domain(
            "form factor does not vanish at the grid ends; y is unbounded".into(),
        ));
    }
    let n2 = xi.norm_sq();
    let (mean, grad) = match &xi.representation {
        Representation::Hermite(c) => {
            // shifted profile: i∂(e^{iky₀}Ξ) = e^{iky₀}(i∂Ξ − y₀Ξ)
            let d = derivative_operator(c);
            let y0 = xi.shift_y0;
            let shifted: Vec<C> = d
                .iter()
                .enumerate()
                .map(|(j, v)| v + C::i() * y0 * c.get(j).copied().unwrap_or_default())
                .collect();
            let mean = (C::i() * inner(c, &d)).re - y0 * n2;
            (mean, shifted.iter().map(|v| v.norm_sqr()).sum::<f64>())
        }
        Representation::Sampled { .. } => {
            let nodes = xi.k_nodes();
            let (mut mean, mut grad) = (0.0, 0.0);
            for (k, w) in nodes {
                let (v, d) = xi.value_and_derivative(k);
                mean += w * (v.conj() * C::i() * d).re;
                grad += w * d.norm_sqr();
            }
            (mean, grad)
        }
    };
    let c2 = config.gap_rate().powi(2);
    let inv = xi.k_integral(|k| 1.0 / (k * k + c2));
    let mean = mean / n2;
    Ok(MeanVariance {
        mean,
        variance: grad / n2 + 0.25 * inv / n2 - mean * mean,
    })
}

/// Closed-form statistics of σ₃, x, y and the velocity components.
pub fn line_observables(config: &LineConfig, xi: &FormFactor) -> Result<LineStatistics> {
    let n2 = xi.norm_sq();
    if !(n2 > 0.0) {
        return Err(Error::FormFactor("zero form factor".into()));
    }
    let (eta, tau) = (config.coupling.eta, config.coupling.tau);
    let c2 = config.gap_rate().powi(2);
    let tilt = xi.k_integral(|k| k / (k * k + c2)) / n2;
    let inv = xi.k_integral(|k| 1.0 / (k * k + c2)) / n2;
    let x_mean = tau / (2.0 * eta) * tilt;
    Ok(LineStatistics {
        sigma3: MeanVariance {
            mean: -tau / eta,
            variance: 4.0 / (eta * eta),
        },
        x: MeanVariance {
            mean: x_mean,
            variance: 0.5 * inv - x_mean * x_mean,
        },
        y: y_statistics(config, xi).ok(),
        vx: MeanVariance {
            mean: 0.0,
            variance: 1.0,
        },
        vy: MeanVariance {
            mean: 0.0,
            variance: 1.0,
        },
    })
}

/// Tensor Gauss–Legendre rule in (x, y) for plane integrals of |ψ|².
#[derive(Clone, Copy, Debug)]
pub struct PlaneQuadrature {
    /// Half-width in x, in units of |η|/(2m).
    pub x_extent: f64,
    /// Half-width in y around the closed-form ⟨y⟩, in the same units.
    pub y_extent: f64,
    pub x_levels: usize,
    pub nodes_per_panel: usize,
    /// Panel width in y in the same units.
    pub y_panel: f64,
}

impl Default for PlaneQuadrature {
    fn default() -> Self {
        PlaneQuadrature {
            x_extent: 16.0,
            y_extent: 16.0,
            x_levels: 10,
            nodes_per_panel: 20,
            y_panel: 1.0,
        }
    }
}

/// Plane integrals of |ψ|²-weighted observables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneMoments {
    pub norm_sq: f64,
    pub statistics: LineStatistics,
}

/// ‖ψ_Ξ‖² and the observable statistics by direct quadrature over the plane.
pub fn plane_moments(
    config: &LineConfig,
    xi: &FormFactor,
    quad: &PlaneQuadrature,
) -> Result<PlaneMoments> {
    let unit = 1.0 / config.gap_rate();
    let centre = y_statistics(config, xi)
        .map(|s| s.mean)
        .unwrap_or(-xi.shift_y0);
    let spread = y_statistics(config, xi)
        .map(|s| s.variance.sqrt())
        .unwrap_or(0.0);
    let x_max = quad.x_extent * unit;
    let y_half = (quad.y_extent * unit).max(12.0 * spread);
    let gl = GaussLegendre::new(quad.nodes_per_panel);
    let mut xs = Vec::new();
    for w in panels_toward_start(0.0, x_max, quad.x_levels).windows(2) {
        for (x, wt) in gl.mapped(w[0], w[1]) {
            xs.push((x, wt));
            xs.push((-x, wt));
        }
    }
    let y_panels = (2.0 * y_half / (quad.y_panel * unit.min(1.0))).ceil() as usize;
    let ys = uniform_nodes(&gl, centre - y_half, centre + y_half, y_panels);
    let field = LineField::new(config, xi, centre.abs() + y_half, &PsiQuadrature::default())?;
    let x_pts: Vec<f64> = xs.iter().map(|p| p.0).collect();
    let y_pts: Vec<f64> = ys.iter().map(|p| p.0).collect();
    let values = field.grid(&x_pts, &y_pts, Side::Left);
    // [1, x, x², y, y², σ₃, σ₁, σ₂]
    let mut acc = [0.0f64; 8];
    for (row, &(x, wx)) in values.iter().zip(&xs) {
        for (psi, &(y, wy)) in row.iter().zip(&ys) {
            let w = wx * wy;
            let rho = psi[0].norm_sqr() + psi[1].norm_sqr();
            let cross = psi[0].conj() * psi[1];
            let terms = [
                rho,
                x * rho,
                x * x * rho,
                y * rho,
                y * y * rho,
                psi[0].norm_sqr() - psi[1].norm_sqr(),
                2.0 * cross.re,
                2.0 * cross.im,
            ];
            for (a, t) in acc.iter_mut().zip(terms) {
                *a += w * t;
            }
        }
    }
    let n = acc[0];
    let mv = |m1: f64, m2: f64| MeanVariance {
        mean: m1 / n,
        variance: m2 / n - (m1 / n).powi(2),
    };
    Ok(PlaneMoments {
        norm_sq: n,
        statistics: LineStatistics {
            sigma3: mv(acc[5], n),
            x: mv(acc[1], acc[2]),
            y: Some(mv(acc[3], acc[4])),
            vx: mv(acc[6], n),
            vy: mv(acc[7], n),
        },
    })
}

/// (‖ψ_Ξ‖ over the plane, ‖Ξ‖ over k), both by quadrature.
pub fn norm_identity(
    config: &LineConfig,
    xi: &FormFactor,
    quad: &PlaneQuadrature,
) -> Result<(f64, f64)> {
    let plane = plane_moments(config, xi, quad)?;
    Ok((plane.norm_sq.sqrt(), xi.norm_sq_quadrature().sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(tau: f64, sign: f64) -> LineConfig {
        LineConfig::new(1.0, CouplingPair::from_tau(tau, sign).unwrap()).unwrap()
    }

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn transfer_matrix_forms() {
        let l = lambda_matrix(&CouplingPair::new(2.0, 0.0).unwrap()).unwrap();
        assert_eq!(l.entries[0][1], C::new(0.0, -1.0));
        assert_eq!(l.entries[1][0], C::new(0.0, -1.0));
        let p = CouplingPair::new(13f64.sqrt(), -3.0).unwrap();
        let l = lambda_matrix(&p).unwrap();
        assert!((l.entries[0][1].im + 0.5 * (13f64.sqrt() + 3.0)).abs() < 1e-15);
        assert!((l.entries[1][0].im + 0.5 * (13f64.sqrt() - 3.0)).abs() < 1e-15);
        let g = LambdaMatrix::general(p.eta, p.tau).unwrap();
        let sq = l.square();
        for r in 0..2 {
            for c in 0..2 {
                assert!(close(g.entries[r][c], l.entries[r][c], 1e-14));
                let id = if r == c { -1.0 } else { 0.0 };
                assert!(close(sq.entries[r][c], C::new(id, 0.0), 1e-14));
            }
        }
        assert!(LambdaMatrix::general(0.0, 2.0).is_err());
        assert!(LineConfig::new(1.0, CouplingPair::noncritical(3.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn profile_identities() {
        let c = config(0.0, 1.0);
        let p = momentum_profile(&c, 0.0);
        assert!(close(p[0], C::new(1.0, 0.0), 1e-15) && close(p[1], C::new(0.0, -1.0), 1e-15));
        let c = config(-3.0, 1.0);
        let r = c.coupling.tau / c.coupling.eta;
        for &k in &[-40.0, -2.0, 0.3, 7.0, 1e4] {
            let p = momentum_profile(&c, k);
            let kappa = c.kappa(k);
            let product = p[0].norm_sqr() * p[1].norm_sqr() / ((1.0 - r) * (1.0 + r));
            assert!((product / (4.0 / 13.0) - 1.0).abs() < 1e-12, "{k}");
            let n2 = p[0].norm_sqr() + p[1].norm_sqr();
            assert!(
                (n2 / (2.0 * kappa * (1.0 - r * k / kappa)) - 1.0).abs() < 1e-12,
                "{k}"
            );
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn hermite_family() {
        let a = (2.0 / PI).powf(0.25);
        for &k in &[-1.3, 0.0, 0.4, 2.0] {
            let b = hermite_functions(1, k);
            assert!((b[0] - a * (-k * k).exp()).abs() < 1e-15);
            assert!((b[1] - 2.0 * a * k * (-k * k).exp()).abs() < 1e-15);
        }
        let gl = GaussLegendre::new(32);
        let nodes = uniform_nodes(&gl, -12.0, 12.0, 24);
        let mut gram = vec![vec![0.0; 21]; 21];
        for &(k, w) in &nodes {
            let b = hermite_functions(20, k);
            for m in 0..=20 {
                for n in 0..=20 {
                    gram[m][n] += w * b[m] * b[n];
                }
            }
        }
        for m in 0..=20 {
            for n in 0..=20 {
                let id = if m == n { 1.0 } else { 0.0 };
                assert!((gram[m][n] - id).abs() < 1e-12, "{m} {n}");
            }
        }
        // deep tails stay finite and tiny for the largest index
        let far = hermite_functions(MAX_HERMITE, 30.0);
        assert!(far.iter().all(|v| v.is_finite()) && far[MAX_HERMITE].abs() < 1e-100);
        assert!(FormFactor::hermite(MAX_HERMITE + 1).is_err());
    }

    #[test]
    fn derivative_and_projection() {
        let xi = tilted_gaussian().with_shift(0.7);
        for &k in &[-0.8, 0.1, 1.5] {
            let h = 1e-5;
            let fd = (xi.value(k + h) - xi.value(k - h)) / (2.0 * h);
            assert!(close(fd, xi.value_and_derivative(k).1, 1e-9));
            let direct = (2.0 / 5f64.sqrt()) * (2.0 / PI).powf(0.25) * (k + 1.0) * (-k * k).exp();
            assert!(close(
                tilted_gaussian().value(k),
                C::new(direct, 0.0),
                1e-15
            ));
        }
        let c = tilted_gaussian().hermite_projection(4);
        assert!(
            (c[0].re - 2.0 / 5f64.sqrt()).abs() < 1e-13
                && (c[1].re - 1.0 / 5f64.sqrt()).abs() < 1e-13
        );
        assert!(c[2..].iter().all(|v| v.norm() < 1e-13));
        assert!((tilted_gaussian().norm_sq_quadrature() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn sampled_profiles() {
        let grid: Vec<f64> = (0..=400).map(|j| -8.0 + 0.04 * j as f64).collect();
        let b0 = FormFactor::hermite(0).unwrap();
        let xi =
            FormFactor::sampled(grid.clone(), grid.iter().map(|&k| b0.value(k)).collect()).unwrap();
        // natural cubic interpolation: norm defect falls as h⁴
        let fine: Vec<f64> = (0..=800).map(|j| -8.0 + 0.02 * j as f64).collect();
        let xf =
            FormFactor::sampled(fine.clone(), fine.iter().map(|&k| b0.value(k)).collect()).unwrap();
        let order = ((1.0 - xi.norm_sq()) / (1.0 - xf.norm_sq())).log2();
        assert!((order - 4.0).abs() < 0.2, "{order}");
        assert!((xf.norm_sq() - 1.0).abs() < 5e-9);
        assert!(close(xf.value(0.33), b0.value(0.33), 1e-8));
        let c = config(-3.0, 1.0);
        let a = line_observables(&c, &xf).unwrap();
        let b = line_observables(&c, &b0).unwrap();
        assert!((a.x.variance - b.x.variance).abs() < 1e-8);
        assert!((a.y.unwrap().variance - b.y.unwrap().variance).abs() < 1e-5);
        let cut =
            FormFactor::sampled(vec![-1.0, 0.0, 1.0, 2.0], vec![C::new(1.0, 0.0); 4]).unwrap();
        assert!(matches!(y_statistics(&c, &cut), Err(Error::Domain(_))));
        assert!(line_observables(&c, &cut).unwrap().y.is_none());
        assert!(FormFactor::sampled(vec![0.0, 1.0, 1.0, 2.0], vec![C::new(1.0, 0.0); 4]).is_err());
    }

    #[test]
    fn reflection_and_transmission() {
        let c = config(0.0, 1.0);
        let b0 = FormFactor::hermite(0).unwrap();
        let q = PsiQuadrature::default();
        let a = evaluate_psi(&c, &b0, 0.5, 1.2, Side::Left, &q).unwrap();
        let b = evaluate_psi(&c, &b0, 0.5, -1.2, Side::Left, &q).unwrap();
        assert!((a.density() - b.density()).abs() < 1e-14);

        let c = config(-3.0, 1.0);
        let xi = tilted_gaussian();
        let (eta, tau) = (c.coupling.eta, c.coupling.tau);
        let l = lambda_matrix(&c.coupling).unwrap();
        for j in 0..50 {
            let y = -6.0 + 0.25 * j as f64;
            let minus = evaluate_psi(&c, &xi, 0.0, y, Side::Left, &q).unwrap().psi;
            let plus = evaluate_psi(&c, &xi, 0.0, y, Side::Right, &q).unwrap().psi;
            let scale = minus[0].norm() + minus[1].norm();
            let mapped = l.apply(minus);
            assert!(
                close(plus[0], mapped[0], 1e-8 * scale) && close(plus[1], mapped[1], 1e-8 * scale)
            );
            // iσ₁(ψ₊ − ψ₋) = ½(η + τσ₃)(ψ₊ + ψ₋)
            let (d, s) = (
                [plus[0] - minus[0], plus[1] - minus[1]],
                [plus[0] + minus[0], plus[1] + minus[1]],
            );
            let lhs = [C::i() * d[1], C::i() * d[0]];
            let rhs = [s[0] * (0.5 * (eta + tau)), s[1] * (0.5 * (eta - tau))];
            assert!(
                close(lhs[0], rhs[0], 1e-8 * scale) && close(lhs[1], rhs[1], 1e-8 * scale),
                "{y}"
            );
        }
    }

    #[test]
    fn solves_the_free_equation_off_the_line() {
        for (c, xi) in [
            (config(0.0, 1.0), FormFactor::hermite(0).unwrap()),
            (config(-3.0, 1.0), tilted_gaussian()),
        ] {
            let f = LineField::new(&c, &xi, 10.0, &PsiQuadrature::default()).unwrap();
            for &(x, y) in &[(0.4, 0.0), (-0.7, 1.1), (1.5, -2.0), (-3.0, 4.0)] {
                assert!(f.equation_residual(x, y, 1e-2).unwrap() < 1e-5, "{x} {y}");
            }
            assert!(f.equation_residual(0.01, 0.0, 1e-2).is_err());
        }
    }

    #[test]
    fn laplace_tail_in_x() {
        for (c, xi) in [
            (config(0.0, 1.0), FormFactor::hermite(0).unwrap()),
            (config(-3.0, 1.0), tilted_gaussian()),
        ] {
            for side in [Side::Left, Side::Right] {
                let s = tail_decay_rate(&c, &xi, side, 5.0, 20.0, 31).unwrap();
                assert!((s / c.gap_rate() - 1.0).abs() < 0.02, "{s}");
            }
            let f = LineField::new(&c, &xi, 0.0, &PsiQuadrature::default()).unwrap();
            let ratio = |x: f64| {
                let v = f.evaluate(x, 0.0, Side::Left).psi;
                let a = laplace_tail(&c, &xi, x).unwrap();
                ((v[0].norm_sqr() + v[1].norm_sqr()) / (a[0].norm_sqr() + a[1].norm_sqr())).sqrt()
            };
            assert!((ratio(40.0) - 1.0).abs() < (ratio(10.0) - 1.0).abs());
            assert!((ratio(-40.0) - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn decays_fast_along_the_line() {
        let c = config(0.0, 1.0);
        let f = LineField::new(
            &c,
            &FormFactor::hermite(0).unwrap(),
            40.0,
            &PsiQuadrature::default(),
        )
        .unwrap();
        let w: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&y| f.evaluate(1.0, y, Side::Left).density().sqrt() * y.powi(4))
            .collect();
        assert!(w.windows(2).all(|p| p[1] < p[0]), "{w:?}");
        assert!(w[3] < 1e-6);
    }

    #[test]
    fn closed_form_statistics() {
        let c = config(0.0, 1.0);
        let s = line_observables(&c, &FormFactor::hermite(3).unwrap()).unwrap();
        assert_eq!((s.sigma3.mean, s.sigma3.variance), (0.0, 1.0));
        assert!(s.x.mean.abs() < 1e-15);
        let c = config(-3.0, 1.0);
        let s = line_observables(&c, &tilted_gaussian()).unwrap();
        assert!(
            (s.x.mean - -0.207_945_568_152).abs() < 1e-11,
            "{}",
            s.x.mean
        );
        assert_eq!(
            (s.vx.mean, s.vx.variance, s.vy.mean, s.vy.variance),
            (0.0, 1.0, 0.0, 1.0)
        );
        let shifted = line_observables(&c, &tilted_gaussian().with_shift(2.5)).unwrap();
        assert!((shifted.y.unwrap().mean - (s.y.unwrap().mean - 2.5)).abs() < 1e-14);
        assert!((shifted.y.unwrap().variance - s.y.unwrap().variance).abs() < 1e-12);
    }

    #[test]
    fn norm_identity_examples() {
        let c = config(0.0, 1.0);
        let q = PlaneQuadrature::default();
        let (l, r) = norm_identity(&c, &FormFactor::hermite(0).unwrap(), &q).unwrap();
        assert!((l - 1.0).abs() < 1e-6 && (r - 1.0).abs() < 1e-12);
        let two = FormFactor::from_hermite_coefficients(vec![C::new(2.0, 0.0)]).unwrap();
        let (l, r) = norm_identity(&c, &two, &q).unwrap();
        assert!((l - 2.0).abs() < 2e-6 && (r - 2.0).abs() < 1e-12);
        let h = 0.5f64.sqrt();
        let mix =
            FormFactor::from_hermite_coefficients(vec![C::new(h, 0.0), C::new(h, 0.0)]).unwrap();
        let (l, r) = norm_identity(&c, &mix, &q).unwrap();
        assert!((l - 1.0).abs() < 1e-6 && (r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_quadrature_matches_closed_forms() {
        let c = config(-3.0, 1.0);
        let xi = tilted_gaussian();
        let closed = line_observables(&c, &xi).unwrap();
        let plane = plane_moments(&c, &xi, &PlaneQuadrature::default())
            .unwrap()
            .statistics;
        let pairs = |s: &LineStatistics| {
            let y = s.y.unwrap();
            [s.sigma3, s.x, y, s.vx, s.vy]
                .iter()
                .flat_map(|m| [m.mean, m.variance])
                .collect::<Vec<f64>>()
        };
        for (a, b) in pairs(&closed).iter().zip(pairs(&plane)) {
            assert!((a - b).abs() < 1e-5, "{a} {b}");
        }
    }
}
