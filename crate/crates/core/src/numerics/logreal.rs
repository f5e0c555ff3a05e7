//! Signed reals stored as `(sign, log|x|)`.
//!
//! The magnitudes that show up in kernel coefficients (`e^{i^{2/3}}` at
//! `i ~ 10^5`) overflow `f64` long before they lose relative precision, so
//! every series in the crate carries its coefficients in this form.
//!
//! A single `f64` logarithm near 700 is only good to about `1e-13`
//! relative in the value it encodes, so the log is kept as an unevaluated
//! sum `hi + lo` with `|lo| <= ulp(hi) / 2`. [`LogReal::logmag`] reports
//! `hi`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Relative gap below which the difference of two equal-signed
/// magnitudes is treated as an exact zero.
pub const CANCELLATION_EPS: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    sign: i8,
    logmag: f64,
    lo: f64,
}

// Knuth's two-sum: s + e == a + b exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        logmag: f64::NEG_INFINITY,
        lo: 0.0,
    };
    pub const ONE: LogReal = LogReal {
        sign: 1,
        logmag: 0.0,
        lo: 0.0,
    };

    /// Builds a value from its parts. A zero sign or a `-inf` magnitude
    /// both normalize to [`LogReal::ZERO`].
    pub fn new(sign: i8, logmag: f64) -> Self {
        Self::with_lo(sign, logmag, 0.0)
    }

    fn with_lo(sign: i8, hi: f64, lo: f64) -> Self {
        if sign == 0 || hi == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if !hi.is_finite() || !lo.is_finite() {
            return LogReal {
                sign: sign.signum(),
                logmag: hi + lo,
                lo: 0.0,
            };
        }
        let (h, l) = two_sum(hi, lo);
        LogReal {
            sign: sign.signum(),
            logmag: h,
            lo: l,
        }
    }

    /// Positive value `e^logmag`.
    pub fn from_log(logmag: f64) -> Self {
        Self::new(1, logmag)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Self::ZERO;
        }
        let sign = if x > 0.0 { 1 } else { -1 };
        let a = x.abs();
        let hi = a.ln();
        // one Newton step on e^y = a recovers the bits lost to rounding hi
        let lo = if hi.is_finite() {
            let e = hi.exp();
            if e.is_finite() && e > 0.0 {
                (a - e) / e
            } else {
                0.0
            }
        } else {
            0.0
        };
        Self::with_lo(sign, hi, lo)
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.logmag.exp() * (1.0 + self.lo),
        }
    }

    #[inline]
    pub fn sign(self) -> i8 {
        self.sign
    }

    #[inline]
    pub fn logmag(self) -> f64 {
        self.logmag
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        LogReal {
            sign: self.sign.abs(),
            ..self
        }
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero LogReal");
        LogReal {
            sign: self.sign,
            logmag: -self.logmag,
            lo: -self.lo,
        }
    }

    /// Multiplies by `e^shift`.
    pub fn scale_log(self, shift: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        let (h, e) = two_sum(self.logmag, shift);
        Self::with_lo(self.sign, h, e + self.lo)
    }

    pub fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && k % 2 != 0 { -1 } else { 1 };
        let kf = f64::from(k);
        let h = self.logmag * kf;
        let e = self.logmag.mul_add(kf, -h);
        Self::with_lo(sign, h, e + self.lo * kf)
    }

    fn cmp_mag(self, other: Self) -> Ordering {
        self.logmag
            .total_cmp(&other.logmag)
            .then(self.lo.total_cmp(&other.lo))
    }

    /// Ordering by value (not by magnitude).
    pub fn cmp_value(self, other: Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.cmp_mag(other),
                _ => other.cmp_mag(self),
            },
            o => o,
        }
    }

    /// Relative distance `|x - y| / max(|x|, |y|)`, computed without leaving
    /// the log domain.
    pub fn rel_diff(self, other: Self) -> f64 {
        let diff = self - other;
        if diff.is_zero() {
            return 0.0;
        }
        let scale = if self.cmp_mag(other) == Ordering::Less { other } else { self };
        ((diff.logmag - scale.logmag) + (diff.lo - scale.lo)).exp()
    }

    /// Sum of many terms with a single max-shift: `O(n)` exponentials and
    /// one logarithm. Terms are accumulated in iteration order.
    pub fn sum<I: IntoIterator<Item = LogReal>>(terms: I) -> LogReal {
        let mut buf: Vec<LogReal> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        Self::sum_slice(&mut buf)
    }

    pub(crate) fn sum_slice(terms: &mut [LogReal]) -> LogReal {
        let Some(top) = terms
            .iter()
            .filter(|t| !t.is_zero())
            .copied()
            .max_by(|a, b| a.cmp_mag(*b))
        else {
            return Self::ZERO;
        };
        if top.logmag == f64::INFINITY {
            let s: i8 = terms
                .iter()
                .filter(|t| t.logmag == f64::INFINITY)
                .map(|t| t.sign)
                .sum();
            return Self::new(s.signum(), f64::INFINITY);
        }
        let mut pos = 0.0;
        let mut neg = 0.0;
        for t in terms.iter() {
            let v = ((t.logmag - top.logmag) + (t.lo - top.lo)).exp();
            match t.sign {
                1 => pos += v,
                -1 => neg += v,
                _ => {}
            }
        }
        let s = pos - neg;
        if s == 0.0 || s.abs() <= CANCELLATION_EPS * pos.max(neg) {
            return Self::ZERO;
        }
        let (h, e) = two_sum(top.logmag, s.abs().ln());
        Self::with_lo(if s > 0.0 { 1 } else { -1 }, h, e + top.lo)
    }
}

impl Default for LogReal {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            1 => '+',
            -1 => '-',
            _ => '0',
        };
        write!(f, "({s}, {:.17e})", self.logmag)
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal {
            sign: -self.sign,
            ..self
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.cmp_mag(rhs) != Ordering::Less {
            (self, rhs)
        } else {
            (rhs, self)
        };
        if hi.logmag == f64::INFINITY {
            return hi;
        }
        let t = ((lo.logmag - hi.logmag) + (lo.lo - hi.lo)).exp();
        let shift = if hi.sign == lo.sign {
            t.ln_1p()
        } else {
            if 1.0 - t <= CANCELLATION_EPS {
                return LogReal::ZERO;
            }
            (-t).ln_1p()
        };
        let (h, e) = two_sum(hi.logmag, shift);
        LogReal::with_lo(hi.sign, h, e + hi.lo)
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            return LogReal::ZERO;
        }
        let (h, e) = two_sum(self.logmag, rhs.logmag);
        LogReal::with_lo(self.sign * rhs.sign, h, e + self.lo + rhs.lo)
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        self * rhs.recip()
    }
}

impl From<f64> for LogReal {
    fn from(x: f64) -> Self {
        LogReal::from_f64(x)
    }
}
