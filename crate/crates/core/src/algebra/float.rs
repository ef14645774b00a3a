//! Arbitrary-precision binary floating point with a decimal working precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_base::{Abs, Sign, UnsignedAbs};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use dashu_ratio::RBig;

use super::AlgebraError;

type Inner = FBig<HalfEven, 2>;

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_DIGITS: u32 = 16;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;
const GUARD_BITS: usize = 8;

/// Number of significand bits carried for a given decimal precision.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * BITS_PER_DIGIT).ceil() as usize + GUARD_BITS
}

/// A floating point value together with the decimal precision it was computed at.
///
/// Binary operations produce a value at the smaller of the two operand precisions.
#[derive(Clone, Debug)]
pub struct BigFloat {
    value: Inner,
    digits: u32,
}

impl BigFloat {
    fn wrap(value: Inner, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        let value = value.with_precision(bits_for_digits(digits)).value();
        BigFloat { value, digits }
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_int(0, digits)
    }

    pub fn one(digits: u32) -> Self {
        Self::from_int(1, digits)
    }

    pub fn from_int(n: i64, digits: u32) -> Self {
        Self::wrap(Inner::from(IBig::from(n)), digits)
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_rational(r: &RBig, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        let value: Inner = r.to_float(bits_for_digits(digits)).value();
        BigFloat { value, digits }
    }

    pub fn from_f64(x: f64, digits: u32) -> Self {
        let v = Inner::try_from(x).expect("finite f64");
        Self::wrap(v, digits)
    }

    /// Parses a decimal literal such as `-1.588071022611375313` or `1e-3`.
    pub fn parse(s: &str, digits: u32) -> Result<Self, AlgebraError> {
        let r = RBig::from_str_decimal(s.trim())
            .map_err(|_| AlgebraError::Parse(s.to_string()))?;
        Ok(Self::from_rational(&r, digits))
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Re-rounds to a different decimal precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        Self::wrap(self.value.clone().with_precision(0).value(), digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().value()
    }

    /// The exact rational value of the stored binary float.
    pub fn to_rational(&self) -> RBig {
        let (sig, exp) = self.value.repr().clone().into_parts();
        if exp >= 0 {
            RBig::from(sig << exp as usize)
        } else {
            let den = dashu_int::UBig::ONE << (-exp) as usize;
            RBig::from_parts(sig, den)
        }
    }

    pub fn is_zero(&self) -> bool {
        *self.value.repr().significand() == IBig::ZERO
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.value.sign() == Sign::Negative {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            value: self.value.clone().abs(),
            digits: self.digits,
        }
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(), self.digits)
    }

    /// Base-10 logarithm; `None` for non-positive input.
    pub fn log10(&self) -> Option<Self> {
        if self.signum() <= 0 {
            return None;
        }
        Some(Self::wrap(self.value.log10(), self.digits))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.digits);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `10^(-k)` at this value's precision.
    pub fn ten_pow_neg(k: u32, digits: u32) -> Self {
        let r = RBig::from_parts(IBig::ONE, dashu_int::UBig::from(10u8).pow(k as usize));
        Self::from_rational(&r, digits)
    }

    /// Decimal rendering with `sig` significant digits.
    ///
    /// Positional notation is used for decimal exponents in `[-7, 21)`, scientific
    /// notation (`1.25e-30`) otherwise. Trailing zeros are kept so that the printed
    /// width reflects `sig`.
    pub fn to_sig_string(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.is_zero() {
            return if sig == 1 {
                "0".to_string()
            } else {
                format!("0.{}", "0".repeat(sig - 1))
            };
        }
        let dec = self
            .value
            .clone()
            .with_base_and_precision::<10>(sig)
            .value();
        let (signif, exp) = dec.repr().clone().into_parts();
        let negative = signif < IBig::ZERO;
        let mut digits = signif.unsigned_abs().to_string();
        let mut exp = exp;
        // normalize to exactly `sig` digits
        while digits.len() < sig {
            digits.push('0');
            exp -= 1;
        }
        while digits.len() > sig && digits.ends_with('0') {
            digits.pop();
            exp += 1;
        }
        // decimal exponent of the leading digit
        let lead = exp + digits.len() as isize - 1;
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if (-7..21).contains(&lead) {
            if lead < 0 {
                out.push_str("0.");
                out.push_str(&"0".repeat((-lead - 1) as usize));
                out.push_str(&digits);
            } else {
                let int_len = lead as usize + 1;
                if digits.len() <= int_len {
                    out.push_str(&digits);
                    out.push_str(&"0".repeat(int_len - digits.len()));
                } else {
                    out.push_str(&digits[..int_len]);
                    out.push('.');
                    out.push_str(&digits[int_len..]);
                }
            }
        } else {
            out.push_str(&digits[..1]);
            if digits.len() > 1 {
                out.push('.');
                out.push_str(&digits[1..]);
            }
            out.push_str(&format!("e{lead}"));
        }
        out
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(self.digits as usize);
        f.write_str(&self.to_sig_string(sig))
    }
}

impl FromStr for BigFloat {
    type Err = AlgebraError;

    /// Parses at the precision implied by the literal, but never below [`MIN_DIGITS`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let sig = s.chars().filter(|c| c.is_ascii_digit()).count() as u32;
        Self::parse(s, sig.max(MIN_DIGITS))
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                BigFloat::wrap(&self.value $op &rhs.value, self.digits.min(rhs.digits))
            }
        }
        impl $tr<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            value: -self.value,
            digits: self.digits,
        }
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_significant_digits() {
        let x = BigFloat::parse("-1.588071022611375313", 30).unwrap();
        assert_eq!(x.to_sig_string(19), "-1.588071022611375313");
        assert_eq!(x.to_sig_string(5), "-1.5881");
        let y = BigFloat::parse("0.00010045652", 30).unwrap();
        assert_eq!(y.to_sig_string(4), "0.0001005");
        let z = BigFloat::parse("1.25e-30", 30).unwrap();
        assert_eq!(z.to_sig_string(3), "1.25e-30");
        assert_eq!(BigFloat::from_int(120, 20).to_sig_string(2), "120");
        assert_eq!(BigFloat::zero(20).to_sig_string(3), "0.00");
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert_eq!(BigFloat::one(3).digits(), MIN_DIGITS);
    }

    #[test]
    fn mixed_precision_takes_the_smaller() {
        let a = BigFloat::one(50);
        let b = BigFloat::one(20);
        assert_eq!((&a + &b).digits(), 20);
    }

    #[test]
    fn sqrt_and_log10() {
        let two = BigFloat::from_int(2, 40);
        let r = two.sqrt();
        let back = &r * &r;
        let err = (&back - &two).abs();
        assert!(err < BigFloat::ten_pow_neg(38, 40));
        let l = BigFloat::from_int(1000, 40).log10().unwrap();
        assert!((l.to_f64() - 3.0).abs() < 1e-15);
        assert!(BigFloat::zero(20).log10().is_none());
    }

    #[test]
    fn rational_round_trip_is_exact_for_dyadics() {
        let r = RBig::from_parts(IBig::from(-5), dashu_int::UBig::from(8u8));
        assert_eq!(BigFloat::from_rational(&r, 20).to_rational(), r);
    }
}
