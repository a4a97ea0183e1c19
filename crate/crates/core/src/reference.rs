//! Double-double reference evaluations of I_k and K_k.
//!
//! These follow different algorithms from [`crate::bessel`] (ascending series and
//! the integral representation) and are used only to cross-check it.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::wide::Wide;

/// Unevaluated sum `hi + lo` with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn powi2(self, n: i32) -> Self {
        let f = 2f64.powi(n);
        DoubleDouble {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn exp(self) -> Self {
        if self.hi == 0.0 {
            return DoubleDouble::ONE;
        }
        let n = (self.hi / LN2.hi).round();
        let r = (self - LN2 * DoubleDouble::new(n)).powi2(-10);
        let mut sum = DoubleDouble::ONE;
        let mut term = DoubleDouble::ONE;
        for i in 1..30 {
            term = term * r / DoubleDouble::new(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        // split the power of two so neither factor overflows on its own
        let n = n as i32;
        sum.powi2(n / 2).powi2(n - n / 2)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * DoubleDouble::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DoubleDouble::new(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::new(q3)
    }
}

/// e^{x} as a double-double times 2^{exp2}, for any finite x.
fn exp_split(x: DoubleDouble) -> (DoubleDouble, i64) {
    let n = (x.hi / LN2.hi).round();
    ((x - LN2 * DoubleDouble::new(n)).exp(), n as i64)
}

/// Moves a power of two from `v` into `exp2` when |v| leaves [2^-400, 2^400].
fn renormalize(v: &mut DoubleDouble, exp2: &mut i64) {
    if v.hi != 0.0 && !(2f64.powi(-400)..=2f64.powi(400)).contains(&v.hi.abs()) {
        let e = v.hi.abs().log2().round() as i32;
        *v = v.powi2(-e);
        *exp2 += e as i64;
    }
}

/// e^{-t} I_k(t) from the ascending series Σ_j (t/2)^{k+2j} / (j!(k+j)!).
pub fn i_scaled(k: u32, t: f64) -> Wide {
    let dd = DoubleDouble::new;
    let half = dd(0.5 * t);
    let (mut term, mut exp2) = exp_split(-dd(t));
    for i in 1..=k {
        term = term * half / dd(i as f64);
        renormalize(&mut term, &mut exp2);
    }
    let q = half * half;
    let mut sum = term;
    let mut j = 0u32;
    loop {
        j += 1;
        term = term * q / dd(j as f64 * (k + j) as f64);
        sum = sum + term;
        if term.hi < 1e-34 * sum.hi && (j as f64) > 0.5 * t {
            break;
        }
    }
    Wide::scaled(sum.hi, exp2)
}

/// e^{t} K_k(t) from ∫_0^∞ e^{-t(cosh s - 1)} cosh(ks) ds by the trapezoid rule,
/// halving the step until successive sums agree to double-double accuracy.
pub fn k_scaled(k: u32, t: f64) -> Wide {
    let kf = k as f64;
    let phase = |s: f64| -t * (s.cosh() - 1.0) + kf * s;
    let peak_s = (kf / t).asinh();
    // the integrand is entire, so the trapezoid error falls like e^{-π²/h}
    let mut h = 0.25;
    let mut upper = (peak_s / h).ceil() * h + h;
    let peak = phase(peak_s);
    while phase(upper) > peak - 85.0 {
        upper += h;
    }
    let dd = DoubleDouble::new;
    let (shift, exp2) = exp_split(dd(peak));
    let integrand = |s: f64| {
        let s2 = dd(0.5 * s).exp();
        let sinh_half = (s2 - DoubleDouble::ONE / s2) * dd(0.5);
        let cosh_minus_one = dd(2.0) * sinh_half * sinh_half;
        let exponent = dd(kf * s) - dd(t) * cosh_minus_one - dd(peak);
        let mut v = exponent.exp();
        if 2.0 * kf * s < 90.0 {
            let damp = dd(-2.0 * kf * s).exp();
            v = v + v * damp;
        }
        v * dd(0.5)
    };
    let mut n = (upper / h).round() as usize;
    let mut sum = integrand(0.0) * dd(0.5);
    for j in 1..n {
        sum = sum + integrand(j as f64 * h);
    }
    sum = sum + integrand(upper) * dd(0.5);
    let mut estimate = sum * dd(h);
    for _ in 0..20 {
        let mut odd = DoubleDouble::ZERO;
        for j in 0..n {
            odd = odd + integrand((2 * j + 1) as f64 * 0.5 * h);
        }
        sum = sum + odd;
        n *= 2;
        h *= 0.5;
        let refined = sum * dd(h);
        let change = (refined - estimate).to_f64().abs();
        estimate = refined;
        if change < 1e-24 * estimate.hi.abs() {
            break;
        }
    }
    Wide::scaled((estimate * shift).hi, exp2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_exp() {
        let e = DoubleDouble::ONE.exp();
        assert_eq!(e.hi, std::f64::consts::E);
        assert!((e.lo - 1.445_646_891_729_250_1e-16).abs() < 1e-27);
        let big = DoubleDouble::new(700.0).exp();
        assert!(((big.hi - 700f64.exp()) / big.hi).abs() < 1e-15);
    }

    #[test]
    fn references_against_known_values() {
        let i = i_scaled(3, 2.0).to_f64() * 2f64.exp();
        assert!((i / 0.212_739_959_239_852_66 - 1.0).abs() < 1e-15);
        let kv = k_scaled(1, 1.0).to_f64() / 1f64.exp();
        assert!((kv / 0.601_907_230_197_234_6 - 1.0).abs() < 1e-15);
        let k0 = k_scaled(0, 300.0).to_f64();
        // e^t K_0(t) ≈ sqrt(π/2t)(1 − 1/8t + 9/128t²)
        let asym =
            (std::f64::consts::PI / 600.0).sqrt() * (1.0 - 1.0 / 2400.0 + 9.0 / (128.0 * 90000.0));
        assert!((k0 / asym - 1.0).abs() < 1e-8);
    }
}
