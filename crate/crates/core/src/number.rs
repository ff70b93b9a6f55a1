//! Number modes: `f64` and exact big rationals behind one trait.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumberMode {
    #[default]
    Float64,
    ExactRational,
}

/// Field operations needed by the solver.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed {
    const MODE: NumberMode;

    /// Converts an input value (cost or voltage). Exact mode goes through the
    /// shortest decimal representation of `x`, so `0.1` becomes `1/10`.
    fn from_input(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Whether a pivot of magnitude `self` is zero relative to `scale`.
    fn negligible(&self, scale: &Self) -> bool;

    fn to_quantity(&self) -> Quantity;
}

impl Scalar for f64 {
    const MODE: NumberMode = NumberMode::Float64;

    fn from_input(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn negligible(&self, scale: &Self) -> bool {
        self.abs() <= 1e-14 * scale.abs()
    }

    fn to_quantity(&self) -> Quantity {
        Quantity::float(*self)
    }
}

impl Scalar for BigRational {
    const MODE: NumberMode = NumberMode::ExactRational;

    fn from_input(x: f64) -> Self {
        decimal_to_rational(&x.to_string()).expect("finite f64 displays as a plain decimal")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }

    fn to_quantity(&self) -> Quantity {
        Quantity::exact(self.clone())
    }
}

/// Parses `[-]digits[.digits]` into an exact rational.
pub fn decimal_to_rational(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer = BigInt::parse_bytes(if digits.is_empty() { b"0" } else { digits.as_bytes() }, 10)?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = BigRational::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// A solved value: always an `f64` approximation, plus the exact rational in
/// exact mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub exact: Option<BigRational>,
}

impl Quantity {
    pub fn float(value: f64) -> Self {
        Self { value, exact: None }
    }

    pub fn exact(r: BigRational) -> Self {
        Self { value: Scalar::to_f64(&r), exact: Some(r) }
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(r) => r.is_zero(),
            None => self.value == 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        Self { value: self.value.abs(), exact: self.exact.as_ref().map(|r| r.abs()) }
    }

    /// `p/q` rendering of the exact value, if any.
    pub fn ratio_string(&self) -> Option<String> {
        self.exact.as_ref().map(|r| {
            if r.denom() == &BigInt::from(1) {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        })
    }
}

/// Float quantities serialize as bare numbers; exact ones as
/// `{"exact": "p/q", "value": approx}`.
impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.ratio_string() {
            None => serializer.serialize_f64(self.value),
            Some(ratio) => {
                let mut s = serializer.serialize_struct("Quantity", 2)?;
                s.serialize_field("exact", &ratio)?;
                s.serialize_field("value", &self.value)?;
                s.end()
            }
        }
    }
}
