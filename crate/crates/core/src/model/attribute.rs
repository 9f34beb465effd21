use std::fmt;

use serde::{Deserialize, Serialize};

use super::meta::AdministrativeMetadata;
use super::value::Value;
use crate::pid::Pid;

/// Lower and optional upper bound on the number of values an attribute
/// carries. An absent upper bound means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCardinality")]
pub struct CardinalityRange {
    lower: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCardinality {
    lower: u64,
    #[serde(default)]
    upper: Option<u64>,
}

impl TryFrom<RawCardinality> for CardinalityRange {
    type Error = String;

    fn try_from(raw: RawCardinality) -> Result<Self, Self::Error> {
        CardinalityRange::new(raw.lower, raw.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardinalityClass {
    OptionalSingle,
    MandatorySingle,
    LimitedList,
    UnlimitedList,
}

impl CardinalityRange {
    pub fn new(lower: u64, upper: Option<u64>) -> Result<Self, String> {
        if let Some(u) = upper {
            if u < lower {
                return Err(format!("cardinality upper < lower ({u} < {lower})"));
            }
            if u == 0 {
                return Err("cardinality upper bound must be at least 1".into());
            }
        }
        Ok(Self { lower, upper })
    }

    pub const fn optional() -> Self {
        Self {
            lower: 0,
            upper: Some(1),
        }
    }

    pub const fn mandatory() -> Self {
        Self {
            lower: 1,
            upper: Some(1),
        }
    }

    pub const fn unbounded(lower: u64) -> Self {
        Self { lower, upper: None }
    }

    pub fn lower(&self) -> u64 {
        self.lower
    }

    pub fn upper(&self) -> Option<u64> {
        self.upper
    }

    pub fn class(&self) -> CardinalityClass {
        match self.upper {
            None => CardinalityClass::UnlimitedList,
            Some(u) if u >= 2 => CardinalityClass::LimitedList,
            Some(_) if self.lower == 0 => CardinalityClass::OptionalSingle,
            Some(_) => CardinalityClass::MandatorySingle,
        }
    }

    pub fn permits_many(&self) -> bool {
        self.upper.is_none_or(|u| u >= 2)
    }

    pub fn contains(&self, count: u64) -> bool {
        count >= self.lower && self.upper.is_none_or(|u| count <= u)
    }

    /// True when every count admitted by `self` is admitted by `other`.
    pub fn is_subrange_of(&self, other: &CardinalityRange) -> bool {
        let upper_ok = match (self.upper, other.upper) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        };
        self.lower >= other.lower && upper_ok
    }

    /// Interval intersection; `None` when the ranges are disjoint or the
    /// result would admit no positive count.
    pub fn intersect(&self, other: &CardinalityRange) -> Option<CardinalityRange> {
        let lower = self.lower.max(other.lower);
        let upper = match (self.upper, other.upper) {
            (None, u) | (u, None) => u,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        CardinalityRange::new(lower, upper).ok()
    }
}

impl fmt::Display for CardinalityRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) => write!(f, "{}..{}", self.lower, u),
            None => write!(f, "{}..*", self.lower),
        }
    }
}

/// PID-addressed binding of semantics to a data type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Attribute {
    pub pid: Pid,
    pub meta: AdministrativeMetadata,
    pub data_type: Pid,
    pub cardinality: CardinalityRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_value: Option<Value>,
}

impl Attribute {
    pub fn new(pid: Pid, name: &str, data_type: Pid, cardinality: CardinalityRange) -> Self {
        Self {
            pid,
            meta: AdministrativeMetadata::named(name),
            data_type,
            cardinality,
            default_value: None,
        }
    }

    pub fn with_default(mut self, value: Value) -> Self {
        self.default_value = Some(value);
        self
    }

    pub(crate) fn violations(&self, out: &mut Vec<String>) {
        self.meta.violations(out);
        if let Some(value) = &self.default_value {
            if !value.is_homogeneous() {
                out.push("defaultValue contains a heterogeneous list".into());
            }
        }
    }
}
