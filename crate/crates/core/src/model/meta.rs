use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// ISO 8601 UTC instant with second precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(DateTime<Utc>);

impl Timestamp {
    pub fn now() -> Self {
        Self::from_unix(Utc::now().timestamp())
    }

    pub fn from_unix(secs: i64) -> Self {
        Timestamp(DateTime::from_timestamp(secs, 0).unwrap_or_default())
    }

    pub fn unix(&self) -> i64 {
        self.0.timestamp()
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_rfc3339_opts(SecondsFormat::Secs, true))
    }
}

impl FromStr for Timestamp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parsed = DateTime::parse_from_rfc3339(s)
            .map_err(|e| format!("`{s}` is not an ISO 8601 timestamp: {e}"))?;
        Ok(Self::from_unix(parsed.timestamp()))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Human-facing bookkeeping carried inline by every PID-addressed entity.
///
/// `created`, `modified` and `version` are stamped by the store: a fresh
/// entity gets version 1, every accepted update bumps the version by one.
/// Documents may omit them when submitting a new entity.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AdministrativeMetadata {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<Timestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified: Option<Timestamp>,
    #[serde(default)]
    pub version: u64,
}

impl AdministrativeMetadata {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn described(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    /// Same human-facing content, ignoring the store-managed stamps.
    pub fn same_content(&self, other: &Self) -> bool {
        self.name == other.name && self.description == other.description
    }

    pub(crate) fn violations(&self, out: &mut Vec<String>) {
        if self.name.trim().is_empty() {
            out.push("meta.name must not be empty".into());
        }
        if let (Some(created), Some(modified)) = (self.created, self.modified) {
            if modified < created {
                out.push(format!(
                    "meta.modified ({modified}) is earlier than meta.created ({created})"
                ));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamp_is_utc_seconds() {
        let ts: Timestamp = "2024-05-01T12:30:00.789+02:00".parse().unwrap();
        assert_eq!(ts.to_string(), "2024-05-01T10:30:00Z");
        assert!("yesterday".parse::<Timestamp>().is_err());
    }

    #[test]
    fn modified_before_created() {
        let meta = AdministrativeMetadata {
            created: Some(Timestamp::from_unix(100)),
            modified: Some(Timestamp::from_unix(50)),
            ..AdministrativeMetadata::named("x")
        };
        let mut out = vec![];
        meta.violations(&mut out);
        assert_eq!(out.len(), 1);
    }
}
