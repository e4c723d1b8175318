//! Signed log-space scalars.
//!
//! Every quantity in this library that can leave the range of `f64` — moment
//! integrals with indices in the thousands, gamma values, kernel diagonals
//! near the singular point — is carried as a [`LogReal`]: a sign together
//! with the natural log of the absolute value. Multiplication and division
//! are exact log-space additions; signed addition goes through
//! [`log_sum_exp`], which shifts by the largest magnitude before
//! exponentiating so no intermediate ever overflows.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg};

/// A real number stored as `sign * exp(logmag)`.
///
/// Invariant: `sign == 0` if and only if `logmag == f64::NEG_INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    sign: i8,
    logmag: f64,
}

impl LogReal {
    pub fn zero() -> Self {
        LogReal {
            sign: 0,
            logmag: f64::NEG_INFINITY,
        }
    }

    pub fn one() -> Self {
        LogReal {
            sign: 1,
            logmag: 0.0,
        }
    }

    /// Positive value `exp(logmag)`.
    pub fn from_ln(logmag: f64) -> Self {
        if logmag == f64::NEG_INFINITY {
            return Self::zero();
        }
        LogReal { sign: 1, logmag }
    }

    pub fn from_parts(sign: i8, logmag: f64) -> Self {
        assert!(
            sign == -1 || sign == 0 || sign == 1,
            "sign must be -1, 0, or +1"
        );
        if sign == 0 || logmag == f64::NEG_INFINITY {
            return Self::zero();
        }
        LogReal { sign, logmag }
    }

    pub fn from_real(x: f64) -> Self {
        assert!(!x.is_nan(), "LogReal::from_real on NaN");
        if x == 0.0 {
            Self::zero()
        } else {
            LogReal {
                sign: if x > 0.0 { 1 } else { -1 },
                logmag: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the absolute value; `-inf` encodes zero.
    pub fn logmag(&self) -> f64 {
        self.logmag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Converts back to `f64`; overflows to `+-inf` and underflows to 0.
    pub fn to_real(&self) -> f64 {
        self.sign as f64 * self.logmag.exp()
    }

    pub fn abs(&self) -> Self {
        LogReal {
            sign: self.sign.abs(),
            logmag: self.logmag,
        }
    }

    pub fn recip(&self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero LogReal");
        LogReal {
            sign: self.sign,
            logmag: -self.logmag,
        }
    }

    /// Integer power; `0^0 = 1`.
    pub fn powi(&self, e: i64) -> Self {
        if e == 0 {
            return Self::one();
        }
        if self.sign == 0 {
            assert!(e > 0, "zero LogReal to a negative power");
            return Self::zero();
        }
        let sign = if self.sign < 0 && e % 2 != 0 { -1 } else { 1 };
        LogReal {
            sign,
            logmag: self.logmag * e as f64,
        }
    }

    /// Real power of a non-negative value.
    pub fn powf(&self, e: f64) -> Self {
        if self.sign == 0 {
            assert!(e > 0.0, "zero LogReal to a non-positive real power");
            return Self::zero();
        }
        assert!(self.sign > 0, "real power of a negative LogReal");
        LogReal {
            sign: 1,
            logmag: self.logmag * e,
        }
    }

    /// `ln` of a positive value.
    pub fn ln(&self) -> f64 {
        assert!(self.sign > 0, "ln of a non-positive LogReal");
        self.logmag
    }

    /// Compares by signed value.
    pub fn value_cmp(&self, other: &Self) -> Ordering {
        match (self.sign, other.sign) {
            (a, b) if a < b => Ordering::Less,
            (a, b) if a > b => Ordering::Greater,
            (0, 0) => Ordering::Equal,
            (1, 1) => self.logmag.partial_cmp(&other.logmag).unwrap(),
            _ => other.logmag.partial_cmp(&self.logmag).unwrap(),
        }
    }

    /// Relative deviation `|self/other - 1|`, for tolerance checks between
    /// values that may be far outside `f64` range. Both must be nonzero and
    /// of the same sign.
    pub fn rel_deviation(&self, other: &Self) -> f64 {
        assert!(self.sign != 0 && self.sign == other.sign);
        (self.logmag - other.logmag).exp_m1().abs()
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::zero();
        }
        LogReal {
            sign: self.sign * rhs.sign,
            logmag: self.logmag + rhs.logmag,
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division by zero LogReal");
        if self.sign == 0 {
            return Self::zero();
        }
        LogReal {
            sign: self.sign * rhs.sign,
            logmag: self.logmag - rhs.logmag,
        }
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> Self {
        LogReal {
            sign: -self.sign,
            logmag: self.logmag,
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: Self) -> Self {
        log_sum_exp(&[self, rhs])
    }
}

/// Exact signed sum of log-space terms.
///
/// Positive and negative magnitudes are accumulated separately (compensated)
/// after shifting by the largest magnitude, then combined. The empty sequence
/// sums to zero; exact cancellation yields the zero element.
pub fn log_sum_exp(terms: &[LogReal]) -> LogReal {
    let mut max_mag = f64::NEG_INFINITY;
    for t in terms {
        if t.sign != 0 && t.logmag > max_mag {
            max_mag = t.logmag;
        }
    }
    if max_mag == f64::NEG_INFINITY {
        return LogReal::zero();
    }

    // Kahan-compensated accumulation of sign * exp(logmag - max_mag).
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        if t.sign == 0 {
            continue;
        }
        let v = t.sign as f64 * (t.logmag - max_mag).exp();
        let y = v - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }

    if sum == 0.0 {
        return LogReal::zero();
    }
    LogReal {
        sign: if sum > 0.0 { 1 } else { -1 },
        logmag: max_mag + sum.abs().ln(),
    }
}

// Serialized as separate sign / logmag fields, with the magnitude as a
// decimal string so quantities beyond f64 range survive a round-trip
// through formats that only speak ordinary floats.
impl Serialize for LogReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("LogReal", 2)?;
        s.serialize_field("sign", &self.sign)?;
        let mag = if self.logmag == f64::NEG_INFINITY {
            "-inf".to_string()
        } else {
            format!("{:e}", self.logmag)
        };
        s.serialize_field("logmag", &mag)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for LogReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            sign: i8,
            logmag: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let logmag = if raw.logmag == "-inf" {
            f64::NEG_INFINITY
        } else {
            raw.logmag
                .parse::<f64>()
                .map_err(|e| D::Error::custom(format!("bad logmag: {e}")))?
        };
        if raw.sign == 0 || logmag == f64::NEG_INFINITY {
            Ok(LogReal::zero())
        } else {
            Ok(LogReal::from_parts(raw.sign, logmag))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trip_from_real() {
        for &x in &[1.0, -2.5, 1e-200, -1e200, 0.125, 3.0] {
            let lr = LogReal::from_real(x);
            let back = lr.to_real();
            assert!(
                (back - x).abs() <= 1e-12 * x.abs(),
                "round trip {x} -> {back}"
            );
        }
        assert!(LogReal::from_real(0.0).is_zero());
        assert_eq!(LogReal::from_real(0.0).logmag(), f64::NEG_INFINITY);
    }

    #[test]
    fn sum_of_two_and_three() {
        let a = LogReal::from_real(2.0);
        let b = LogReal::from_real(3.0);
        let s = log_sum_exp(&[a, b]);
        assert_eq!(s.sign(), 1);
        assert!((s.logmag() - 5.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn exact_cancellation_is_zero() {
        let a = LogReal::from_real(5.0);
        let s = log_sum_exp(&[a, -a]);
        assert!(s.is_zero());
    }

    #[test]
    fn empty_sum_is_zero() {
        assert!(log_sum_exp(&[]).is_zero());
    }

    #[test]
    fn geometric_series_matches_closed_form() {
        // sum_{i=0}^{N-1} q^i against (1 - q^N) / (1 - q), 10^4 terms
        let q: f64 = 0.999_3;
        let n = 10_000usize;
        let terms: Vec<LogReal> = (0..n)
            .map(|i| LogReal::from_ln(q.ln() * i as f64))
            .collect();
        let s = log_sum_exp(&terms);
        let closed = (1.0 - q.powi(n as i32)) / (1.0 - q);
        assert!(
            (s.to_real() - closed).abs() < 1e-10 * closed,
            "{} vs {}",
            s.to_real(),
            closed
        );
    }

    #[test]
    fn huge_magnitudes_survive() {
        // 10^5000-scale values: representable only in log space
        let a = LogReal::from_ln(5000.0 * std::f64::consts::LN_10);
        let b = a * a;
        assert!((b.logmag() - 10_000.0 * std::f64::consts::LN_10).abs() < 1e-9);
        let r = b / a;
        assert!((r.logmag() - a.logmag()).abs() < 1e-9);
    }

    #[test]
    fn serde_round_trip() {
        for lr in [
            LogReal::zero(),
            LogReal::from_real(-3.25),
            LogReal::from_ln(12345.678910111213),
        ] {
            let json = serde_json::to_string(&lr).unwrap();
            let back: LogReal = serde_json::from_str(&json).unwrap();
            assert_eq!(lr, back, "json was {json}");
        }
    }

    proptest! {
        #[test]
        fn permutation_invariant(xs in proptest::collection::vec(-50.0f64..50.0, 1..20), seed in 0u64..1000) {
            let terms: Vec<LogReal> = xs.iter().map(|&x| LogReal::from_real(x)).collect();
            let mut shuffled = terms.clone();
            // cheap deterministic shuffle
            let n = shuffled.len();
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            let a = log_sum_exp(&terms);
            let b = log_sum_exp(&shuffled);
            if a.is_zero() {
                prop_assert!(b.is_zero() || b.logmag() < -25.0);
            } else {
                prop_assert_eq!(a.sign(), b.sign());
                prop_assert!((a.logmag() - b.logmag()).abs() <= 1e-13 * a.logmag().abs().max(1.0));
            }
        }

        #[test]
        fn associative_up_to_tolerance(x in -30.0f64..30.0, y in -30.0f64..30.0, z in -30.0f64..30.0) {
            let (a, b, c) = (LogReal::from_real(x), LogReal::from_real(y), LogReal::from_real(z));
            let left = (a + b) + c;
            let right = a + (b + c);
            let direct = x + y + z;
            if direct.abs() > 1e-6 {
                prop_assert!((left.to_real() - direct).abs() <= 1e-12 * direct.abs().max(1.0));
                prop_assert!((right.to_real() - direct).abs() <= 1e-12 * direct.abs().max(1.0));
            }
        }
    }
}
