//! Exact scalar backends for clock values.
//!
//! Every construction in this crate compares fractional parts and their sums
//! for exact equality, so only exact number types qualify. [`Scalar`] is
//! implemented for [`Ratio<I>`] over any signed machine or big integer.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use thiserror::Error;

/// An exact, totally ordered number type used for clock values and delays.
pub trait Scalar: Clone + Ord + Hash + Debug + Display + Num + Signed + Send + Sync + 'static {
    fn from_int(n: i64) -> Self;

    /// `num / den`; `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Largest integer not greater than `self`.
    fn floor_value(&self) -> Self;

    fn is_integral(&self) -> bool;

    /// Integral part as a machine integer. Panics if it does not fit.
    fn floor_i64(&self) -> i64;

    /// Parses `p/q`, an integer, or a decimal with a finite expansion.
    fn parse_exact(text: &str) -> Result<Self, ScalarParseError>;

    /// `fr(t)`: the fractional part, `t - floor(t)`, always in `[0, 1)`.
    fn fract_value(&self) -> Self {
        self.clone() - self.floor_value()
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarParseError {
    #[error("empty number")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl<I> Scalar for Ratio<I>
where
    I: Integer + Signed + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive,
    I: Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(I::from_i64(n).expect("integer out of range for scalar backend"))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        let n = I::from_i64(num).expect("integer out of range for scalar backend");
        let d = I::from_i64(den).expect("integer out of range for scalar backend");
        Ratio::new(n, d)
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("clock value does not fit in i64")
    }

    fn parse_exact(text: &str) -> Result<Self, ScalarParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(ScalarParseError::Empty);
        }
        let malformed = || ScalarParseError::Malformed(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        let int = |s: &str| I::from_str_radix(s, 10).map_err(|_| malformed());

        let value = if let Some((num, den)) = body.split_once('/') {
            if !digits(num) || !digits(den) {
                return Err(malformed());
            }
            let den = int(den)?;
            if den.is_zero() {
                return Err(ScalarParseError::ZeroDenominator(text.to_string()));
            }
            Ratio::new(int(num)?, den)
        } else if let Some((whole, frac)) = body.split_once('.') {
            let whole_ok = whole.is_empty() || digits(whole);
            let frac_ok = frac.bytes().all(|b| b.is_ascii_digit());
            if !whole_ok || !frac_ok || (whole.is_empty() && frac.is_empty()) {
                return Err(malformed());
            }
            let mut scale = I::one();
            let ten = I::from_u8(10).ok_or_else(malformed)?;
            for _ in 0..frac.len() {
                scale = scale * ten.clone();
            }
            let joined = format!("{whole}{frac}");
            Ratio::new(int(if joined.is_empty() { "0" } else { &joined })?, scale)
        } else {
            if !digits(body) {
                return Err(malformed());
            }
            Ratio::from_integer(int(body)?)
        };
        Ok(if negative { -value } else { value })
    }
}

/// Largest integer `k` with `k * step <= value`, times `step`.
pub(crate) fn floor_to_step<T: Scalar>(value: &T, step: &T) -> T {
    (value.clone() / step.clone()).floor_value() * step.clone()
}

/// Smaller of two values by reference.
pub(crate) fn min_of<T: Scalar>(a: &T, b: &T) -> T {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}
