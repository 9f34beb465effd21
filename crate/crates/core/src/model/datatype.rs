use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::meta::AdministrativeMetadata;
use super::value::{Decimal, Value};
use crate::pid::Pid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PrimitiveKind {
    Boolean,
    Integer,
    Number,
    String,
}

impl PrimitiveKind {
    pub fn admits(self, value: &Value) -> bool {
        match (self, value) {
            (PrimitiveKind::Boolean, Value::Bool(_)) => true,
            (PrimitiveKind::Integer, Value::Number(n)) => n.is_integer(),
            (PrimitiveKind::Number, Value::Number(_)) => true,
            (PrimitiveKind::String, Value::String(_)) => true,
            _ => false,
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, PrimitiveKind::Integer | PrimitiveKind::Number)
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Value-space restrictions of an atomic data type.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Restrictions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permitted_values: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden_values: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_length: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_length: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_value: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_value: Option<Decimal>,
}

impl Restrictions {
    pub fn is_unrestricted(&self) -> bool {
        *self == Restrictions::default()
    }

    pub fn regex(pattern: impl Into<String>) -> Self {
        Restrictions {
            regex: Some(pattern.into()),
            ..Self::default()
        }
    }

    pub(crate) fn violations(&self, kind: PrimitiveKind, out: &mut Vec<String>) {
        if let (Some(min), Some(max)) = (self.min_length, self.max_length) {
            if min > max {
                out.push(format!(
                    "restrictions.minLength ({min}) exceeds maxLength ({max})"
                ));
            }
        }
        if let (Some(min), Some(max)) = (&self.min_value, &self.max_value) {
            if min > max {
                out.push(format!("restrictions.minValue ({min}) exceeds maxValue ({max})"));
            }
        }
        if kind != PrimitiveKind::String {
            for (field, present) in [
                ("regex", self.regex.is_some()),
                ("minLength", self.min_length.is_some()),
                ("maxLength", self.max_length.is_some()),
            ] {
                if present {
                    out.push(format!(
                        "restrictions.{field} is only allowed for String types, not {kind}"
                    ));
                }
            }
        }
        if !kind.is_numeric() {
            for (field, present) in [
                ("minValue", self.min_value.is_some()),
                ("maxValue", self.max_value.is_some()),
            ] {
                if present {
                    out.push(format!(
                        "restrictions.{field} is only allowed for Integer or Number types, not {kind}"
                    ));
                }
            }
        }
        if let (Some(permitted), Some(forbidden)) = (&self.permitted_values, &self.forbidden_values)
        {
            for value in permitted.iter().filter(|v| forbidden.contains(v)) {
                out.push(format!(
                    "restrictions: value {} is both permitted and forbidden",
                    value.text()
                ));
            }
        }
    }
}

/// Value syntax over a primitive kind with an optional single parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AtomicDataType {
    pub pid: Pid,
    pub meta: AdministrativeMetadata,
    pub kind: PrimitiveKind,
    #[serde(default, skip_serializing_if = "Restrictions::is_unrestricted")]
    pub restrictions: Restrictions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<Pid>,
}

impl AtomicDataType {
    pub fn new(pid: Pid, name: &str, kind: PrimitiveKind) -> Self {
        Self {
            pid,
            meta: AdministrativeMetadata::named(name),
            kind,
            restrictions: Restrictions::default(),
            parent: None,
        }
    }

    pub fn with_parent(mut self, parent: Pid) -> Self {
        self.parent = Some(parent);
        self
    }

    pub fn with_restrictions(mut self, restrictions: Restrictions) -> Self {
        self.restrictions = restrictions;
        self
    }

    pub(crate) fn violations(&self, out: &mut Vec<String>) {
        self.meta.violations(out);
        self.restrictions.violations(self.kind, out);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Combinator {
    None,
    ExactlyOne,
    AnyAtLeastOne,
    All,
}

impl Combinator {
    pub const ALL: [Combinator; 4] = [
        Combinator::None,
        Combinator::ExactlyOne,
        Combinator::AnyAtLeastOne,
        Combinator::All,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ValidationPolicy {
    pub combinator: Combinator,
    pub allow_additional: bool,
}

impl ValidationPolicy {
    pub fn new(combinator: Combinator, allow_additional: bool) -> Self {
        Self {
            combinator,
            allow_additional,
        }
    }
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        Self::new(Combinator::All, false)
    }
}

/// Structured data type: a set of attributes, a validation policy and any
/// number of parent profiles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TypeProfile {
    pub pid: Pid,
    pub meta: AdministrativeMetadata,
    pub attributes: Vec<Pid>,
    pub policy: ValidationPolicy,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parents: Vec<Pid>,
}

impl TypeProfile {
    pub fn new(pid: Pid, name: &str, attributes: Vec<Pid>, policy: ValidationPolicy) -> Self {
        Self {
            pid,
            meta: AdministrativeMetadata::named(name),
            attributes,
            policy,
            parents: Vec::new(),
        }
    }

    pub fn with_parents(mut self, parents: Vec<Pid>) -> Self {
        self.parents = parents;
        self
    }

    pub(crate) fn violations(&self, out: &mut Vec<String>) {
        self.meta.violations(out);
        duplicates("attributes", &self.attributes, out);
        duplicates("parents", &self.parents, out);
    }
}

pub(crate) fn duplicates(field: &str, pids: &[Pid], out: &mut Vec<String>) {
    let mut seen = BTreeSet::new();
    for pid in pids {
        if !seen.insert(pid) {
            out.push(format!("{field} lists {pid} more than once"));
        }
    }
}
