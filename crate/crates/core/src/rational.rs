//! Exact arithmetic helpers for probabilities and risk values.
//!
//! All risk computations run on `Rational` (a ratio of `i128`) so that
//! objective comparisons in the solver are exact. Probabilities enter the
//! system as decimal strings with a bounded number of fraction digits and
//! stay exact from parse to report.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = num_rational::Ratio<i128>;

/// Maximum number of digits accepted after the decimal point.
///
/// Products of two probabilities then have denominator at most 10^12, which
/// leaves ample headroom for exact i128 sums over every mapped channel and
/// disaster zone of a desk-scale instance.
pub const MAX_FRACTION_DIGITS: usize = 6;

/// A probability parsed from a decimal literal, kept both as the original
/// string (for lossless document round-trips) and as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    text: String,
    value: Rational,
}

impl Decimal {
    pub fn parse(text: &str) -> Result<Self, DecimalError> {
        let trimmed = text.trim();
        let (int_part, frac_part) = match trimmed.split_once('.') {
            Some((i, f)) => (i, f),
            None => (trimmed, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(DecimalError::Malformed(text.to_string()));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(DecimalError::Malformed(text.to_string()));
        }
        if frac_part.len() > MAX_FRACTION_DIGITS {
            return Err(DecimalError::TooPrecise(text.to_string()));
        }
        let int_val: i128 = if int_part.is_empty() {
            0
        } else {
            int_part
                .parse()
                .map_err(|_| DecimalError::Malformed(text.to_string()))?
        };
        let frac_val: i128 = if frac_part.is_empty() {
            0
        } else {
            frac_part
                .parse()
                .map_err(|_| DecimalError::Malformed(text.to_string()))?
        };
        let den = 10i128.pow(frac_part.len() as u32);
        let value = Rational::new(int_val * den + frac_val, den);
        Ok(Decimal {
            text: trimmed.to_string(),
            value,
        })
    }

    /// Parse a probability in [0, 1].
    pub fn parse_probability(text: &str) -> Result<Self, DecimalError> {
        let d = Self::parse(text)?;
        if d.value < Rational::new(0, 1) || d.value > Rational::new(1, 1) {
            return Err(DecimalError::OutOfRange(text.to_string()));
        }
        Ok(d)
    }

    pub fn value(&self) -> Rational {
        self.value
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for Decimal {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Decimal::parse(s)
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Float(f64),
            Int(i64),
        }
        let raw = Raw::deserialize(deserializer)?;
        let text = match raw {
            Raw::Text(s) => s,
            // A bare TOML float is accepted through its shortest decimal
            // representation, which recovers the literal the author wrote
            // for any value within the supported precision.
            Raw::Float(v) => format!("{v}"),
            Raw::Int(v) => format!("{v}"),
        };
        Decimal::parse(&text).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum DecimalError {
    #[error("malformed decimal literal {0:?}")]
    Malformed(String),
    #[error("decimal literal {0:?} exceeds {MAX_FRACTION_DIGITS} fraction digits")]
    TooPrecise(String),
    #[error("probability {0:?} is not within [0, 1]")]
    OutOfRange(String),
}

/// Format a rational whose reduced denominator divides a power of ten as an
/// exact decimal string. Falls back to `num/den` otherwise.
pub fn format_exact(r: &Rational) -> String {
    let num = *r.numer();
    let den = *r.denom();
    if den == 1 {
        return format!("{num}");
    }
    // Reduced denominators arising from decimal inputs are of the form
    // 2^a * 5^b; scale up to the enclosing power of ten.
    let (mut twos, mut fives, mut rest) = (0u32, 0u32, den);
    while rest % 2 == 0 {
        twos += 1;
        rest /= 2;
    }
    while rest % 5 == 0 {
        fives += 1;
        rest /= 5;
    }
    if rest != 1 {
        return format!("{num}/{den}");
    }
    let digits = twos.max(fives);
    let scale = 10i128.pow(digits) / den;
    let scaled = num * scale;
    let ten = 10i128.pow(digits);
    let (sign, abs) = if scaled < 0 { ("-", -scaled) } else { ("", scaled) };
    let int_part = abs / ten;
    let frac_part = abs % ten;
    format!(
        "{sign}{int_part}.{frac:0width$}",
        frac = frac_part,
        width = digits as usize
    )
}
