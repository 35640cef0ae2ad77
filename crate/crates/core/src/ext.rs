//! Nonnegative extended reals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

/// A nonnegative real number or `INF`.
///
/// Backed by an `f64` that is never NaN and never negative; `INF` is the
/// IEEE positive infinity, so sums and quotients involving it stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);
    pub const INF: ExtReal = ExtReal(f64::INFINITY);

    /// Returns `None` for NaN or negative input.
    pub fn new(value: f64) -> Option<Self> {
        if value.is_nan() || value < 0.0 {
            None
        } else {
            // adding zero folds -0.0 into 0.0, keeping `Ord` consistent with `==`
            Some(ExtReal(value + 0.0))
        }
    }

    pub(crate) fn from_f64_unchecked(value: f64) -> Self {
        debug_assert!(!value.is_nan() && value >= 0.0, "bad ExtReal {value}");
        ExtReal(value + 0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    /// `self / other`, with `x / 0 = INF` for `x > 0` and `INF / y = INF`
    /// for finite `y`. The indeterminate forms `0 / 0` and `INF / INF`
    /// yield `None`.
    pub fn ratio(self, other: ExtReal) -> Option<ExtReal> {
        match (self.is_zero() && other.is_zero(), self.is_inf() && other.is_inf()) {
            (true, _) | (_, true) => None,
            _ if other.is_zero() => Some(ExtReal::INF),
            _ => Some(ExtReal(self.0 / other.0)),
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }
}

impl From<ExtReal> for f64 {
    fn from(x: ExtReal) -> f64 {
        x.0
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for ExtReal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(ExtReal::INF);
        }
        let v: f64 = t.parse().map_err(|_| format!("not a number: {t:?}"))?;
        ExtReal::new(v).ok_or_else(|| format!("not a nonnegative value: {t:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inf_absorbs_addition() {
        assert_eq!(ExtReal::new(3.0).unwrap() + ExtReal::INF, ExtReal::INF);
    }

    #[test]
    fn ratio_conventions() {
        let two = ExtReal::new(2.0).unwrap();
        assert_eq!(two.ratio(ExtReal::ZERO), Some(ExtReal::INF));
        assert_eq!(ExtReal::INF.ratio(two), Some(ExtReal::INF));
        assert_eq!(two.ratio(ExtReal::INF), Some(ExtReal::ZERO));
        assert_eq!(ExtReal::ZERO.ratio(ExtReal::ZERO), None);
        assert_eq!(ExtReal::INF.ratio(ExtReal::INF), None);
        assert_eq!(two.ratio(two), Some(ExtReal::ONE));
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(ExtReal::new(-1.0).is_none());
        assert!(ExtReal::new(f64::NAN).is_none());
        assert!(ExtReal::new(f64::NEG_INFINITY).is_none());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("inf".parse::<ExtReal>().unwrap(), ExtReal::INF);
        assert_eq!(ExtReal::INF.to_string(), "inf");
        assert_eq!("2.5".parse::<ExtReal>().unwrap().value(), 2.5);
        assert!("-1".parse::<ExtReal>().is_err());
    }

    #[test]
    fn ordering_is_total() {
        let mut v = vec![ExtReal::INF, ExtReal::ONE, ExtReal::ZERO];
        v.sort();
        assert_eq!(v, vec![ExtReal::ZERO, ExtReal::ONE, ExtReal::INF]);
    }
}
