//! Integer-order modified Bessel functions I_k, K_k in exponentially scaled form.
//!
//! Values are returned as [`Wide`] so that orders and arguments whose raw values
//! leave the f64 range can still be multiplied together safely.

use crate::error::{Error, Result};
use crate::wide::Wide;

/// Upper end of the supported argument range.
pub const T_MAX: f64 = 700.0;
/// Lower end of the supported argument range.
pub const T_MIN: f64 = 1e-100;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_AT: f64 = 1e150;

fn check_argument(t: f64) -> Result<()> {
    if !(T_MIN..=T_MAX).contains(&t) {
        return Err(Error::Domain(format!(
            "Bessel argument t={t} outside [{T_MIN:e}, {T_MAX}]"
        )));
    }
    Ok(())
}

/// Scaled values e^{-t}I_j(t), e^{t}K_j(t) for the consecutive orders `lo..=hi`.
#[derive(Clone, Debug)]
pub struct BesselTable {
    pub argument: f64,
    lo: usize,
    i_scaled: Vec<Wide>,
    k_scaled: Vec<Wide>,
}

impl BesselTable {
    pub fn new(lo: usize, hi: usize, t: f64) -> Result<Self> {
        check_argument(t)?;
        if hi < lo {
            return Err(Error::Domain(format!("empty order range {lo}..={hi}")));
        }
        Ok(BesselTable {
            argument: t,
            lo,
            i_scaled: miller_i(lo, hi, t),
            k_scaled: upward_k(lo, hi, t),
        })
    }

    /// Table covering every signed order in `orders`, folded through I_{-j}=I_j, K_{-j}=K_j.
    pub fn for_signed_orders(orders: std::ops::RangeInclusive<i64>, t: f64) -> Result<Self> {
        let (a, b) = (*orders.start(), *orders.end());
        let lo = if a <= 0 && b >= 0 {
            0
        } else {
            a.unsigned_abs().min(b.unsigned_abs())
        };
        let hi = a.unsigned_abs().max(b.unsigned_abs());
        Self::new(lo as usize, hi as usize, t)
    }

    fn slot(&self, order: i64) -> usize {
        let j = order.unsigned_abs() as usize;
        assert!(
            j >= self.lo && j - self.lo < self.i_scaled.len(),
            "order {order} outside table"
        );
        j - self.lo
    }

    /// e^{-t} I_j(t).
    pub fn i_scaled(&self, order: i64) -> Wide {
        self.i_scaled[self.slot(order)]
    }

    /// e^{t} K_j(t).
    pub fn k_scaled(&self, order: i64) -> Wide {
        self.k_scaled[self.slot(order)]
    }

    /// Raw I_j(t).
    pub fn i(&self, order: i64) -> Wide {
        self.i_scaled(order) * Wide::exp(self.argument)
    }

    /// Raw K_j(t).
    pub fn k(&self, order: i64) -> Wide {
        self.k_scaled(order) * Wide::exp(-self.argument)
    }

    /// I_j(t) K_j(t).
    pub fn product(&self, order: i64) -> f64 {
        (self.i_scaled(order) * self.k_scaled(order)).to_f64()
    }
}

/// Miller's downward recurrence for e^{-t}I_j, j in lo..=hi, normalised through
/// e^{-t}(I_0 + 2 Σ I_j) = 1.
fn miller_i(lo: usize, hi: usize, t: f64) -> Vec<Wide> {
    let hf = hi as f64;
    let start = hi
        + 20
        + (2.0 * (hf * t.max(1.0)).sqrt()).ceil() as usize
        + (7.0 * t.sqrt()).ceil() as usize;
    let mut stored = vec![(0.0f64, 0i64); hi - lo + 1];
    let mut above = 0.0f64;
    let mut current = 1e-200f64;
    let mut sum = 0.0f64;
    let mut shift = 0i64;
    let two_over_t = 2.0 / t;
    for j in (1..=start).rev() {
        if j >= lo && j <= hi {
            stored[j - lo] = (current, shift);
        }
        sum += 2.0 * current;
        let below = above + (j as f64) * two_over_t * current;
        above = current;
        current = below;
        if current.abs() > RESCALE_AT {
            let e = (current.abs().log2().floor()) as i64;
            let f = 2f64.powi(-(e as i32));
            current *= f;
            above *= f;
            sum *= f;
            shift += e;
        }
    }
    if lo == 0 {
        stored[0] = (current, shift);
    }
    sum += current;
    let norm = Wide::new(sum);
    stored
        .into_iter()
        .map(|(y, e)| (Wide::new(y) / norm).ldexp(e - shift))
        .collect()
}

/// e^{t}K_0(t) and e^{t}K_1(t).
fn k01_scaled(t: f64) -> (f64, f64) {
    if t <= 2.0 {
        k01_series(t)
    } else {
        k01_continued_fraction(t)
    }
}

fn k01_series(t: f64) -> (f64, f64) {
    let q = 0.25 * t * t;
    let log_half = (0.5 * t).ln();
    // I_0, I_1 and the harmonic-weighted sums from the ascending series
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut term0 = 1.0; // q^j / (j!)^2
    let mut term1 = 1.0; // q^j / (j!(j+1)!)
    let mut harmonic = 0.0; // H_j
    for j in 0..60 {
        let jf = j as f64;
        if j > 0 {
            harmonic += 1.0 / jf;
            term0 *= q / (jf * jf);
            term1 *= q / (jf * (jf + 1.0));
        }
        i0 += term0;
        i1 += term1;
        s0 += term0 * harmonic;
        // psi(j+1) + psi(j+2) = -2γ + 2H_j + 1/(j+1)
        s1 += term1 * (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (jf + 1.0));
        if term0 < 1e-18 * i0 && j > 2 {
            break;
        }
    }
    i1 *= 0.5 * t;
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / t + log_half * i1 - 0.25 * t * s1;
    let e = t.exp();
    (k0 * e, k1 * e)
}

/// Steed's evaluation of Temme's second continued fraction, valid for t ≳ 2.
fn k01_continued_fraction(t: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + t);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * t)).sqrt() / s;
    let k1 = k0 * (t + 0.5 - h) / t;
    (k0, k1)
}

/// Upward recurrence K_{j+1} = K_{j-1} + (2j/t) K_j, scaled by e^{t}.
fn upward_k(lo: usize, hi: usize, t: f64) -> Vec<Wide> {
    let (k0, k1) = k01_scaled(t);
    let mut out = Vec::with_capacity(hi - lo + 1);
    if lo == 0 {
        out.push(Wide::new(k0));
    }
    if hi == 0 {
        return out;
    }
    if lo <= 1 {
        out.push(Wide::new(k1));
    }
    let mut prev = k0;
    let mut cur = k1;
    let mut shift = 0i64;
    for j in 1..hi {
        let next = prev + (2.0 * j as f64 / t) * cur;
        prev = cur;
        cur = next;
        if cur > RESCALE_AT {
            let e = cur.log2().floor() as i64;
            let f = 2f64.powi(-(e as i32));
            cur *= f;
            prev *= f;
            shift += e;
        }
        if j + 1 >= lo {
            out.push(Wide::scaled(cur, shift));
        }
    }
    out
}

/// Scaled pair (e^{-t}I_k, e^{t}K_k) for one order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledBesselPair {
    pub order: u32,
    pub argument: f64,
    pub i_scaled: Wide,
    pub k_scaled: Wide,
}

impl ScaledBesselPair {
    pub fn new(order: u32, t: f64) -> Result<Self> {
        let table = BesselTable::new(order as usize, order as usize, t)?;
        Ok(ScaledBesselPair {
            order,
            argument: t,
            i_scaled: table.i_scaled(order as i64),
            k_scaled: table.k_scaled(order as i64),
        })
    }
}

/// e^{-t} I_k(t). Underflows to zero where the true value is below the f64 range;
/// use [`BesselTable`] for the extended-range value.
pub fn bessel_i_scaled(k: u32, t: f64) -> Result<f64> {
    Ok(ScaledBesselPair::new(k, t)?.i_scaled.to_f64())
}

/// e^{t} K_k(t). Overflows to infinity where the true value exceeds the f64 range.
pub fn bessel_k_scaled(k: u32, t: f64) -> Result<f64> {
    Ok(ScaledBesselPair::new(k, t)?.k_scaled.to_f64())
}

/// I_k(t) K_k(t) for any integer order.
pub fn product_ik(k: i64, t: f64) -> Result<f64> {
    let table = BesselTable::for_signed_orders(k..=k, t)?;
    Ok(table.product(k))
}

/// f_k(t) = I_{k+1}K_{k+1} / (I_k K_k), with f_{-k-1} = 1/f_k.
pub fn ratio_f(k: i64, t: f64) -> Result<f64> {
    if k < 0 {
        return Ok(1.0 / ratio_f(-k - 1, t)?);
    }
    let table = BesselTable::new(k as usize, k as usize + 1, t)?;
    Ok(
        ((table.i_scaled(k + 1) * table.k_scaled(k + 1)) / (table.i_scaled(k) * table.k_scaled(k)))
            .to_f64(),
    )
}

/// Product and ratio bundled for one order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselProductRatio {
    pub order: i64,
    pub argument: f64,
    pub product: f64,
    pub ratio: f64,
}

impl BesselProductRatio {
    pub fn new(k: i64, t: f64) -> Result<Self> {
        Ok(BesselProductRatio {
            order: k,
            argument: t,
            product: product_ik(k, t)?,
            ratio: ratio_f(k, t)?,
        })
    }
}

/// Large-order expansion of f_k(t) for fixed t, truncated after the k^{-order} term:
/// 1 − 1/k + 1/k² − (1 − t²)/k³.
pub fn large_order_ratio_expansion(k: i64, t: f64, order: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("large-order expansion needs |k| >= 1".into()));
    }
    if order > 3 {
        return Err(Error::Domain(format!("expansion order {order} > 3")));
    }
    let x = 1.0 / k as f64;
    let coeffs = [1.0, -1.0, 1.0, -(1.0 - t * t)];
    Ok(coeffs
        .iter()
        .take(order as usize + 1)
        .rev()
        .fold(0.0, |acc, c| acc * x + c))
}

fn debye_bracket(k: f64, t: f64, sign: f64) -> f64 {
    let t2 = t * t;
    let c1 = (1.0 - 3.0 * t2) / 12.0;
    let c2 = (1.0 - 78.0 * t2 + 9.0 * t2 * t2) / 288.0;
    let c3 = (139.0 + 14085.0 * t2 - 4995.0 * t2 * t2 + 135.0 * t2 * t2 * t2) / 51840.0;
    1.0 - sign * c1 / k + c2 / (k * k) + sign * c3 / (k * k * k)
}

/// Fixed-t large-order expansion of I_k(t), k ≥ 1, through k^{-3}.
pub fn large_order_i(k: u32, t: f64) -> Wide {
    let kf = k as f64;
    let log_lead = kf * (std::f64::consts::E * t / (2.0 * kf)).ln()
        - 0.5 * (2.0 * std::f64::consts::PI * kf).ln();
    Wide::exp(log_lead).scale(debye_bracket(kf, t, 1.0))
}

/// Fixed-t large-order expansion of K_k(t), k ≥ 1, through k^{-3}.
pub fn large_order_k(k: u32, t: f64) -> Wide {
    let kf = k as f64;
    let log_lead = -kf * (std::f64::consts::E * t / (2.0 * kf)).ln()
        + 0.5 * (std::f64::consts::PI / (2.0 * kf)).ln();
    Wide::exp(log_lead).scale(debye_bracket(kf, t, -1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_values() {
        // I_3(2), K_1(1), I_0(1), K_0(1) from high-precision references
        assert!(
            rel(
                bessel_i_scaled(3, 2.0).unwrap(),
                (-2.0f64).exp() * 0.212_739_959_239_852_66
            ) < 2e-15
        );
        assert!(
            rel(
                bessel_k_scaled(1, 1.0).unwrap(),
                1f64.exp() * 0.601_907_230_197_234_6
            ) < 2e-15
        );
        assert!(
            rel(
                product_ik(0, 1.0).unwrap(),
                1.266_065_877_752_008_4 * 0.421_024_438_240_708_33
            ) < 2e-15
        );
        assert!(
            rel(
                bessel_k_scaled(0, 3.0).unwrap(),
                3f64.exp() * 0.034_739_504_386_279_25
            ) < 2e-15
        );
        assert!(
            rel(
                bessel_k_scaled(1, 3.0).unwrap(),
                3f64.exp() * 0.040_156_431_128_194_184
            ) < 2e-15
        );
    }

    #[test]
    fn large_argument_law() {
        let t = 50.0;
        assert!(
            rel(
                bessel_i_scaled(0, t).unwrap(),
                1.0 / (2.0 * std::f64::consts::PI * t).sqrt()
            ) < 3e-3
        );
        assert!(
            rel(
                bessel_k_scaled(0, t).unwrap(),
                (std::f64::consts::PI / (2.0 * t)).sqrt()
            ) < 3e-3
        );
        assert!(rel(product_ik(0, 100.0).unwrap(), 1.0 / 200.0) < 2e-3);
    }

    #[test]
    fn small_argument_law() {
        assert!((bessel_i_scaled(0, 1e-12).unwrap() - 1.0).abs() < 1e-11);
        let t = 1e-6;
        let k2 = bessel_k_scaled(2, t).unwrap() * (-t).exp();
        assert!(k2.is_finite());
        assert!(rel(k2, 0.5 * (0.5 * t).powi(-2)) < 1e-6);
    }

    #[test]
    fn reflection_and_limits() {
        assert_eq!(product_ik(-3, 2.0).unwrap(), product_ik(3, 2.0).unwrap());
        assert_eq!(ratio_f(-6, 3.0).unwrap(), 1.0 / ratio_f(5, 3.0).unwrap());
        assert!((ratio_f(5, 1e-8).unwrap() - 5.0 / 6.0).abs() < 1e-6);
        assert!((ratio_f(5, 500.0).unwrap() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn extended_range_products() {
        // I_60(1e-4) K_60(1e-4) = 1/120 (1 + O(t²)) even though I_60 ≈ 1e-340
        let table = BesselTable::new(60, 61, 1e-4).unwrap();
        assert_eq!(table.i(60).to_f64(), 0.0);
        assert!(rel(table.product(60), 1.0 / 120.0) < 1e-8);
        let wr = table.i_scaled(60) * table.k_scaled(61) + table.i_scaled(61) * table.k_scaled(60);
        assert!((wr.to_f64() * 1e-4 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn ratio_expansion_plug_in() {
        let v = large_order_ratio_expansion(100, 1.0, 3).unwrap();
        assert!((v - 0.9901).abs() < 1e-15);
        assert!((ratio_f(100, 1.0).unwrap() - v).abs() < 1e-7);
        assert!(large_order_ratio_expansion(0, 1.0, 2).is_err());
    }

    #[test]
    fn debye_forms_track_recurrences() {
        for &(k, t) in &[(40u32, 0.5), (60, 1.0), (80, 2.0)] {
            let table = BesselTable::new(k as usize, k as usize, t).unwrap();
            let kf = k as f64;
            assert!(
                ((large_order_i(k, t) / table.i(k as i64)).to_f64() - 1.0).abs()
                    < 60.0 / kf.powi(4)
            );
            assert!(
                ((large_order_k(k, t) / table.k(k as i64)).to_f64() - 1.0).abs()
                    < 60.0 / kf.powi(4)
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_i_scaled(0, 0.0).is_err());
        assert!(bessel_k_scaled(0, -1.0).is_err());
        assert!(bessel_k_scaled(0, 701.0).is_err());
        assert!(product_ik(3, f64::NAN).is_err());
    }
}
