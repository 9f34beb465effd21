use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use bigdecimal::BigDecimal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::pid::Pid;

/// Exact decimal number. Equality and ordering never go through binary
/// floating point, so validation verdicts are platform independent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decimal(BigDecimal);

impl Decimal {
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn as_big(&self) -> &BigDecimal {
        &self.0
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl From<i64> for Decimal {
    fn from(v: i64) -> Self {
        Decimal(BigDecimal::from(v).normalized())
    }
}

impl From<BigDecimal> for Decimal {
    fn from(v: BigDecimal) -> Self {
        Decimal(v.normalized())
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // Reject anything JSON would not accept as a number literal.
        serde_json::Number::from_str(s).map_err(|_| format!("`{s}` is not a number"))?;
        BigDecimal::from_str(s)
            .map(Decimal::from)
            .map_err(|e| format!("`{s}` is not a number: {e}"))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let number = serde_json::Number::from_str(&self.0.to_string())
            .map_err(serde::ser::Error::custom)?;
        number.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let number = serde_json::Number::deserialize(deserializer)?;
        Decimal::from_str(&number.to_string()).map_err(serde::de::Error::custom)
    }
}

/// A value stored in an information record or carried through a mapping.
///
/// Lists are homogeneous; nested records are keyed by attribute or data
/// type identifiers. There is no null.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Number(Decimal),
    String(String),
    List(Vec<Value>),
    Record(BTreeMap<Pid, Value>),
}

impl Value {
    pub fn string(s: impl Into<String>) -> Self {
        Value::String(s.into())
    }

    pub fn int(v: i64) -> Self {
        Value::Number(Decimal::from(v))
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(items) => Some(items),
            _ => None,
        }
    }

    /// Elements of a list, or the value itself as a one-element slice.
    pub fn elements(&self) -> Vec<&Value> {
        match self {
            Value::List(items) => items.iter().collect(),
            other => vec![other],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "boolean",
            Value::Number(n) if n.is_integer() => "integer",
            Value::Number(_) => "number",
            Value::String(_) => "string",
            Value::List(_) => "list",
            Value::Record(_) => "record",
        }
    }

    /// Text used when the value is inserted into a string template: strings
    /// verbatim, everything else in its JSON form.
    pub fn text(&self) -> String {
        match self {
            Value::String(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => n.to_string(),
            other => serde_json::to_string(other).unwrap_or_default(),
        }
    }

    /// True when every list in the value holds elements of one shape.
    pub fn is_homogeneous(&self) -> bool {
        fn shape(v: &Value) -> u8 {
            match v {
                Value::Bool(_) => 0,
                Value::Number(_) => 1,
                Value::String(_) => 2,
                Value::List(_) => 3,
                Value::Record(_) => 4,
            }
        }
        match self {
            Value::List(items) => {
                items.windows(2).all(|w| shape(&w[0]) == shape(&w[1]))
                    && items.iter().all(Value::is_homogeneous)
            }
            Value::Record(map) => map.values().all(Value::is_homogeneous),
            _ => true,
        }
    }

    /// Parses a JSON literal, falling back to a plain string for text that is
    /// not valid JSON (convenient for command-line input).
    pub fn parse_lenient(text: &str) -> Value {
        serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::String(s.to_string())
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Bool(b) => serializer.serialize_bool(*b),
            Value::Number(n) => n.serialize(serializer),
            Value::String(s) => serializer.serialize_str(s),
            Value::List(items) => items.serialize(serializer),
            Value::Record(map) => map.serialize(serializer),
        }
    }
}

impl TryFrom<serde_json::Value> for Value {
    type Error = String;

    fn try_from(json: serde_json::Value) -> Result<Self, Self::Error> {
        Ok(match json {
            serde_json::Value::Null => return Err("null is not a supported value".into()),
            serde_json::Value::Bool(b) => Value::Bool(b),
            serde_json::Value::Number(n) => Value::Number(Decimal::from_str(&n.to_string())?),
            serde_json::Value::String(s) => Value::String(s),
            serde_json::Value::Array(items) => Value::List(
                items
                    .into_iter()
                    .map(Value::try_from)
                    .collect::<Result<_, _>>()?,
            ),
            serde_json::Value::Object(map) => {
                let mut record = BTreeMap::new();
                for (key, value) in map {
                    let pid = Pid::parse(&key).map_err(|e| format!("record key: {e}"))?;
                    record.insert(pid, Value::try_from(value)?);
                }
                Value::Record(record)
            }
        })
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = serde_json::Value::deserialize(deserializer)?;
        Value::try_from(json).map_err(serde::de::Error::custom)
    }
}

/// Key-value content of a FAIR-DO. Keys are attribute or data type
/// identifiers; list-valued entries are stored as [`Value::List`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InformationRecord(pub BTreeMap<Pid, Value>);

impl InformationRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: Pid, value: Value) -> Self {
        self.0.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: Pid, value: Value) -> Option<Value> {
        self.0.insert(key, value)
    }

    pub fn get(&self, key: &Pid) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &Pid> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Pid, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<InformationRecord> for Value {
    fn from(r: InformationRecord) -> Self {
        Value::Record(r.0)
    }
}
