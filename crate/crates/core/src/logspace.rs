//! Signed log-space scalars.
//!
//! A [`LogValue`] stores `sign * exp(log_mag)`. Quantities such as `exp(-n^4)`
//! leave the `f64` range for modest `n`, so every cutoff-sequence term is built
//! and combined here instead of in plain floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    sign: i8,
    log_mag: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: LogValue = LogValue {
        sign: 1,
        log_mag: 0.0,
    };

    /// Positive value `exp(ln)`. `ln = -inf` gives zero.
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "log magnitude is NaN");
        assert!(ln != f64::INFINITY, "log magnitude is +inf");
        if ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue {
                sign: 1,
                log_mag: ln,
            }
        }
    }

    pub fn from_parts(sign: i8, log_mag: f64) -> Self {
        match sign {
            0 => Self::ZERO,
            1 | -1 => {
                let v = Self::from_ln(log_mag);
                if v.sign == 0 {
                    Self::ZERO
                } else {
                    LogValue { sign, log_mag }
                }
            }
            _ => panic!("sign must be -1, 0 or 1"),
        }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "LogValue::from_f64 needs a finite input");
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                sign: if x > 0.0 { 1 } else { -1 },
                log_mag: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn ln_abs(&self) -> f64 {
        self.log_mag
    }

    pub fn log10_abs(&self) -> f64 {
        self.log_mag / std::f64::consts::LN_10
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Back to `f64`; saturates to `0` or `±inf` outside the double range.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_mag.exp(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign == 0 {
            *self
        } else {
            LogValue {
                sign: 1,
                log_mag: self.log_mag,
            }
        }
    }

    /// Real power of a nonnegative value. `0^p` is `0` for `p > 0` and `1` for `p = 0`.
    pub fn powf(&self, p: f64) -> Self {
        assert!(self.sign >= 0, "real power of a negative LogValue");
        if p == 0.0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            assert!(p > 0.0, "negative power of zero");
            return Self::ZERO;
        }
        Self::from_ln(self.log_mag * p)
    }

    pub fn recip(&self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        LogValue {
            sign: self.sign,
            log_mag: -self.log_mag,
        }
    }
}

/// `ln(exp(a) + exp(b))` for `a >= b`.
fn ln_add(a: f64, b: f64) -> f64 {
    a + (b - a).exp().ln_1p()
}

/// `ln(exp(a) - exp(b))` for `a >= b`.
fn ln_sub(a: f64, b: f64) -> f64 {
    a + (-(b - a).exp_m1()).ln()
}

impl Add for LogValue {
    type Output = LogValue;

    fn add(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        if big.sign == small.sign {
            LogValue::from_parts(big.sign, ln_add(big.log_mag, small.log_mag))
        } else if big.log_mag == small.log_mag {
            LogValue::ZERO
        } else {
            LogValue::from_parts(big.sign, ln_sub(big.log_mag, small.log_mag))
        }
    }
}

impl Neg for LogValue {
    type Output = LogValue;

    fn neg(self) -> LogValue {
        LogValue {
            sign: -self.sign,
            log_mag: self.log_mag,
        }
    }
}

impl Sub for LogValue {
    type Output = LogValue;

    fn sub(self, rhs: LogValue) -> LogValue {
        self + (-rhs)
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 || rhs.sign == 0 {
            return LogValue::ZERO;
        }
        LogValue::from_parts(self.sign * rhs.sign, self.log_mag + rhs.log_mag)
    }
}

impl Div for LogValue {
    type Output = LogValue;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogValue) -> LogValue {
        self * rhs.recip()
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &LogValue) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_mag.partial_cmp(&other.log_mag),
                _ => other.log_mag.partial_cmp(&self.log_mag),
            },
            ord => Some(ord),
        }
    }
}

impl From<f64> for LogValue {
    fn from(x: f64) -> Self {
        LogValue::from_f64(x)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let l10 = self.log10_abs();
                let exp = l10.floor();
                let mant = 10f64.powf(l10 - exp);
                let sign = if s < 0 { "-" } else { "" };
                write!(f, "{sign}{mant:.6}e{exp}")
            }
        }
    }
}
