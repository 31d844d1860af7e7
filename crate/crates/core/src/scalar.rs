//! Scalar abstraction for preference weights and utilities.
//!
//! Every solver in this crate is generic over [`Scalar`]. The exact
//! instantiation used by the file formats and the CLI is
//! [`BigRational`]; fixed-width ratios and floats
//! also satisfy the bound and are handy for quick experiments, but only the
//! big-rational path gives exact answers for arbitrary inputs.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssignRef, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Numeric type usable for preferences, thresholds and utilities.
pub trait Scalar:
    NumAssignRef + Signed + FromPrimitive + ToPrimitive + PartialOrd + Clone + Debug + Send + Sync
{
    /// `self + other` without consuming either operand.
    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out += other;
        out
    }

    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: NumAssignRef + Signed + FromPrimitive + ToPrimitive + PartialOrd + Clone + Debug + Send + Sync
{
}

/// Parses an exact rational written as `a/b` or as a signed integer.
///
/// Decimal and exponent notation are rejected so that no binary floating
/// point value ever enters the pipeline.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidRational(text.to_string());
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (trimmed, None),
    };
    let num = parse_signed_integer(num).ok_or_else(bad)?;
    let den = match den {
        Some(d) => {
            if !d.bytes().all(|b| b.is_ascii_digit()) || d.is_empty() {
                return Err(bad());
            }
            BigInt::from_str(d).map_err(|_| bad())?
        }
        None => BigInt::from(1),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

fn parse_signed_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(text.strip_prefix('+').unwrap_or(text)).ok()
}

/// Canonical text form: `a/b` in lowest terms, or `a` when the denominator is 1.
pub fn format_rational(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Convenience constructor used throughout tests and gadgets.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
