//! Attribute values and the column kinds they are detected as.

use std::cmp::Ordering;
use std::fmt;

/// The literal written for missing values.
pub const MISSING_TOKEN: &str = "NA";

/// Whether a raw field denotes a missing value (`NA` in any case, or empty).
pub fn is_missing_token(raw: &str) -> bool {
    let t = raw.trim();
    t.is_empty() || t.eq_ignore_ascii_case(MISSING_TOKEN)
}

/// A single attribute value of an individual.
///
/// `Text` holds values of columns that are not numeric at all, such as an
/// entry timestamp or a source address used for blocking.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Missing,
    Binary(bool),
    Numeric(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    Binary,
    Numeric,
    Text,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    /// Numeric view of binary and numeric values.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Binary(b) => Some(f64::from(u8::from(*b))),
            Value::Numeric(x) => Some(*x),
            _ => None,
        }
    }

    /// Interprets a raw field according to the kind of its column.
    pub fn parse(raw: &str, kind: ColumnKind) -> Value {
        if is_missing_token(raw) {
            return Value::Missing;
        }
        let t = raw.trim();
        match kind {
            ColumnKind::Binary => match t.parse::<f64>() {
                Ok(x) => Value::Binary(x != 0.0),
                Err(_) => Value::Text(t.to_string()),
            },
            ColumnKind::Numeric => match t.parse::<f64>() {
                Ok(x) => Value::Numeric(x),
                Err(_) => Value::Text(t.to_string()),
            },
            ColumnKind::Text => Value::Text(t.to_string()),
        }
    }

    /// Total order used for sorting and for priority selection. Missing values
    /// sort after every present value; numbers before text.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        fn rank(v: &Value) -> u8 {
            match v {
                Value::Binary(_) | Value::Numeric(_) => 0,
                Value::Text(_) => 1,
                Value::Missing => 2,
            }
        }
        match (self, other) {
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (Value::Missing, Value::Missing) => Ordering::Equal,
            _ => match (self.as_f64(), other.as_f64()) {
                (Some(a), Some(b)) => a.total_cmp(&b),
                _ => rank(self).cmp(&rank(other)),
            },
        }
    }

    /// Key usable for hashing exact equality (blocking).
    pub(crate) fn equality_key(&self) -> ValueKey {
        match self {
            Value::Missing => ValueKey::Missing,
            Value::Binary(b) => ValueKey::Number(f64::from(u8::from(*b)).to_bits()),
            Value::Numeric(x) => ValueKey::Number(if *x == 0.0 { 0 } else { x.to_bits() }),
            Value::Text(s) => ValueKey::Text(s.clone()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Missing => f.write_str(MISSING_TOKEN),
            Value::Binary(b) => write!(f, "{}", u8::from(*b)),
            Value::Numeric(x) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum ValueKey {
    Number(u64),
    Text(String),
    Missing,
}

/// Detects the kind of a column from its raw fields: binary iff every present
/// value is 0 or 1, numeric iff every present value parses as a number.
pub fn detect_kind<'a>(fields: impl IntoIterator<Item = &'a str>) -> ColumnKind {
    let mut binary = true;
    for raw in fields {
        if is_missing_token(raw) {
            continue;
        }
        match raw.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => {
                if x != 0.0 && x != 1.0 {
                    binary = false;
                }
            }
            _ => return ColumnKind::Text,
        }
    }
    if binary {
        ColumnKind::Binary
    } else {
        ColumnKind::Numeric
    }
}

/// Sample standard deviation of the present numeric values; zero when fewer
/// than two values are present or the values are not numeric.
pub fn sample_sd<'a>(values: impl IntoIterator<Item = &'a Value>) -> f64 {
    let xs: Vec<f64> = values.into_iter().filter_map(Value::as_f64).collect();
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (ss / (n - 1.0)).sqrt()
}
