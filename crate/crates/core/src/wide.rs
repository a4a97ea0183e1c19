//! Reals with an explicit binary exponent, for Bessel values far outside the f64 range.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `mantissa · 2^exp`, with |mantissa| in [0.5, 1) unless the value is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wide {
    pub mantissa: f64,
    pub exp: i64,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // subnormal: lift into the normal range first
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, raw - 1022)
}

/// `x · 2^e` without intermediate overflow.
pub fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Wide {
    pub const ZERO: Wide = Wide {
        mantissa: 0.0,
        exp: 0,
    };
    pub const ONE: Wide = Wide {
        mantissa: 0.5,
        exp: 1,
    };

    pub fn new(x: f64) -> Self {
        let (mantissa, exp) = frexp(x);
        Wide { mantissa, exp }
    }

    /// Value `x · 2^e`.
    pub fn scaled(x: f64, e: i64) -> Self {
        let w = Wide::new(x);
        Wide {
            mantissa: w.mantissa,
            exp: if w.mantissa == 0.0 { 0 } else { w.exp + e },
        }
    }

    /// Value `e^y` for any finite y.
    pub fn exp(y: f64) -> Self {
        const LN2_HI: f64 = 0.693_147_180_369_123_8;
        const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
        let n = (y / std::f64::consts::LN_2).floor();
        let r = (y - n * LN2_HI) - n * LN2_LO;
        Wide::scaled(r.exp(), n as i64)
    }

    pub fn to_f64(self) -> f64 {
        ldexp(self.mantissa, self.exp)
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    pub fn signum(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn abs(self) -> Self {
        Wide {
            mantissa: self.mantissa.abs(),
            exp: self.exp,
        }
    }

    /// Natural logarithm of |self|.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    pub fn sqrt(self) -> Self {
        if self.exp % 2 == 0 {
            Wide::scaled(self.mantissa.sqrt(), self.exp / 2)
        } else {
            Wide::scaled((2.0 * self.mantissa).sqrt(), (self.exp - 1) / 2)
        }
    }

    pub fn recip(self) -> Self {
        Wide::ONE / self
    }

    fn plus(self, other: Wide) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = small.exp - big.exp;
        if shift < -1100 {
            return big;
        }
        Wide::scaled(big.mantissa + ldexp(small.mantissa, shift), big.exp)
    }

    pub fn scale(self, x: f64) -> Self {
        Wide::scaled(self.mantissa * x, self.exp)
    }

    /// Multiplies by 2^e exactly.
    pub fn ldexp(self, e: i64) -> Self {
        if self.is_zero() {
            self
        } else {
            Wide {
                mantissa: self.mantissa,
                exp: self.exp + e,
            }
        }
    }

    pub fn cmp_abs(self, other: Wide) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.exp.cmp(&other.exp).then(
                self.mantissa
                    .abs()
                    .partial_cmp(&other.mantissa.abs())
                    .unwrap_or(Ordering::Equal),
            ),
        }
    }
}

impl From<f64> for Wide {
    fn from(x: f64) -> Self {
        Wide::new(x)
    }
}

impl Add for Wide {
    type Output = Wide;
    fn add(self, rhs: Wide) -> Wide {
        self.plus(rhs)
    }
}

impl Sub for Wide {
    type Output = Wide;
    fn sub(self, rhs: Wide) -> Wide {
        self.plus(-rhs)
    }
}

impl Mul for Wide {
    type Output = Wide;
    fn mul(self, rhs: Wide) -> Wide {
        let m = self.mantissa * rhs.mantissa;
        if m == 0.0 {
            return Wide::ZERO;
        }
        Wide::scaled(m, self.exp + rhs.exp)
    }
}

impl Div for Wide {
    type Output = Wide;
    fn div(self, rhs: Wide) -> Wide {
        let m = self.mantissa / rhs.mantissa;
        if m == 0.0 || !m.is_finite() {
            return Wide {
                mantissa: m,
                exp: 0,
            };
        }
        Wide::scaled(m, self.exp - rhs.exp)
    }
}

impl Neg for Wide {
    type Output = Wide;
    fn neg(self) -> Wide {
        Wide {
            mantissa: -self.mantissa,
            exp: self.exp,
        }
    }
}
