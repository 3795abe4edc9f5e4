use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Smallest working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 15;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Binary precision (bits) backing a decimal working precision. Rounded down,
/// so a `d`-digit value never carries more than `d` decimal digits: at 30
/// digits `1e30 + 1` rounds to `1e30`, at 31 it does not.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * BITS_PER_DIGIT).floor() as u32
}

/// An arbitrary-precision real tagged with its decimal working precision.
///
/// Binary operations run at the larger of the two operands' precisions, so
/// mixing a 50-digit and a 200-digit value yields a 200-digit result.
#[derive(Clone)]
pub struct BigReal {
    value: Float,
    digits: u32,
}

impl BigReal {
    fn wrap(value: Float, digits: u32) -> Self {
        BigReal { value, digits }
    }

    fn clamp(digits: u32) -> u32 {
        digits.max(MIN_DIGITS)
    }

    pub fn from_i64(v: i64, digits: u32) -> Self {
        let digits = Self::clamp(digits);
        Self::wrap(Float::with_val(bits_for_digits(digits), v), digits)
    }

    /// Exact conversion of the binary value `v`.
    pub fn from_f64(v: f64, digits: u32) -> Self {
        let digits = Self::clamp(digits);
        Self::wrap(Float::with_val(bits_for_digits(digits), v), digits)
    }

    /// Parses a decimal string (`"4.6033"`, `"1e-300"`) rounded once to `digits`.
    pub fn parse(s: &str, digits: u32) -> Result<Self> {
        let digits = Self::clamp(digits);
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::InvalidArgument(format!("cannot parse {s:?} as a real: {e}")))?;
        Ok(Self::wrap(Float::with_val(bits_for_digits(digits), parsed), digits))
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_i64(0, digits)
    }

    pub fn one(digits: u32) -> Self {
        Self::from_i64(1, digits)
    }

    pub fn pi(digits: u32) -> Self {
        let digits = Self::clamp(digits);
        Self::wrap(Float::with_val(bits_for_digits(digits), Constant::Pi), digits)
    }

    /// `10^exp` at the given precision.
    pub fn pow10(exp: i32, digits: u32) -> Self {
        let digits = Self::clamp(digits);
        let ten = Float::with_val(bits_for_digits(digits), 10);
        Self::wrap(ten.pow(exp), digits)
    }

    pub fn nan(digits: u32) -> Self {
        let digits = Self::clamp(digits);
        Self::wrap(Float::with_val(bits_for_digits(digits), rug::float::Special::Nan), digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn as_float(&self) -> &Float {
        &self.value
    }

    /// Re-rounds to a new working precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        let digits = Self::clamp(digits);
        Self::wrap(Float::with_val(bits_for_digits(digits), &self.value), digits)
    }

    /// An integer constant at this value's precision.
    pub fn constant(&self, v: i64) -> Self {
        Self::from_i64(v, self.digits)
    }

    fn unary(&self, f: impl FnOnce(Float) -> Float) -> Self {
        Self::wrap(f(self.value.clone()), self.digits)
    }

    pub fn sin(&self) -> Self {
        self.unary(Float::sin)
    }

    pub fn cos(&self) -> Self {
        self.unary(Float::cos)
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self
            .value
            .clone()
            .sin_cos(Float::new(bits_for_digits(self.digits)));
        (Self::wrap(s, self.digits), Self::wrap(c, self.digits))
    }

    pub fn atan(&self) -> Self {
        self.unary(Float::atan)
    }

    pub fn acos(&self) -> Self {
        self.unary(Float::acos)
    }

    pub fn sqrt(&self) -> Self {
        self.unary(Float::sqrt)
    }

    pub fn abs(&self) -> Self {
        self.unary(Float::abs)
    }

    pub fn recip(&self) -> Self {
        self.unary(Float::recip)
    }

    pub fn square(&self) -> Self {
        self.unary(Float::square)
    }

    pub fn powi(&self, n: i32) -> Self {
        self.unary(|v| v.pow(n))
    }

    pub fn floor(&self) -> Self {
        self.unary(Float::floor)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.unary(|v| v * k)
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self.unary(|v| v / k)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_nan(&self) -> bool {
        self.value.is_nan()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_sign_positive() && !self.value.is_zero() && !self.value.is_nan()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_sign_negative() && !self.value.is_zero() && !self.value.is_nan()
    }

    /// -1, 0 or 1; NaN maps to 0.
    pub fn signum(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn to_u64_floor(&self) -> Option<u64> {
        self.value.to_integer().and_then(|i| i.to_u64())
    }

    /// log10 |x| as an f64, usable even where the value itself overflows f64.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let l = Float::with_val(64, self.value.abs_ref()).log10();
        l.to_f64()
    }

    pub fn max_ref<'a>(&'a self, other: &'a Self) -> &'a Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Decimal scientific notation with `sig` significant digits,
    /// e.g. `4.603338848751700e0`.
    pub fn to_sci_string(&self, sig: u32) -> String {
        let sig = sig.max(1) as usize;
        if self.value.is_nan() {
            return "nan".into();
        }
        if self.value.is_infinite() {
            return if self.value.is_sign_negative() { "-inf".into() } else { "inf".into() };
        }
        let (neg, mantissa, exp) = self.value.to_sign_string_exp(10, Some(sig));
        let sign = if neg { "-" } else { "" };
        match exp {
            None if sig == 1 => "0e0".into(),
            None => format!("0.{}e0", "0".repeat(sig - 1)),
            Some(e) => {
                let (head, tail) = mantissa.split_at(1);
                if tail.is_empty() {
                    format!("{sign}{head}e{}", e - 1)
                } else {
                    format!("{sign}{head}.{tail}e{}", e - 1)
                }
            }
        }
    }

    /// Lossless text form: scientific notation with two digits beyond the
    /// working precision plus the digit annotation, `4.6033…e0@50`.
    pub fn serialize(&self) -> String {
        format!("{}@{}", self.to_sci_string(self.digits + 2), self.digits)
    }

    pub fn deserialize(s: &str) -> Result<Self> {
        let (num, digits) = s
            .rsplit_once('@')
            .ok_or_else(|| Error::InvalidArgument(format!("missing digit annotation in {s:?}")))?;
        let digits: u32 = digits
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad digit annotation in {s:?}")))?;
        if digits < MIN_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "digit annotation {digits} below minimum {MIN_DIGITS}"
            )));
        }
        if num == "nan" {
            return Ok(Self::nan(digits));
        }
        Self::parse(num, digits)
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({})", self.serialize())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().map(|p| p as u32).unwrap_or(self.digits);
        f.write_str(&self.to_sci_string(sig))
    }
}

impl FromStr for BigReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::deserialize(s)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let digits = self.digits.max(rhs.digits);
                let v = Float::with_val(bits_for_digits(digits), (&self.value).$method(&rhs.value));
                BigReal::wrap(v, digits)
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(-self.value, self.digits)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(-self.value.clone(), self.digits)
    }
}
