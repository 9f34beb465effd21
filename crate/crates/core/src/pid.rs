//! Persistent identifiers.
//!
//! Every reusable entity of the typing model is addressed by a [`Pid`] of the
//! form `prefix/suffix`. Identifiers are minted locally by a [`PidMinter`];
//! registration with an external handle service is not part of this crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PidError {
    #[error("empty prefix")]
    EmptyPrefix,
    #[error("invalid prefix `{0}`: only ASCII alphanumerics, '.', '-' and '_' are allowed")]
    InvalidPrefix(String),
    #[error("identifier `{0}` has no `/` separating prefix and suffix")]
    MissingSeparator(String),
    #[error("identifier `{0}` has an empty suffix")]
    EmptySuffix(String),
    #[error("identifier `{0}` contains whitespace")]
    Whitespace(String),
}

/// A globally unique identifier. Comparison is exact string equality on the
/// canonical `prefix/suffix` text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pid(String);

fn check_prefix(prefix: &str) -> Result<(), PidError> {
    if prefix.is_empty() {
        return Err(PidError::EmptyPrefix);
    }
    if !prefix
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_'))
    {
        return Err(PidError::InvalidPrefix(prefix.to_string()));
    }
    Ok(())
}

impl Pid {
    pub fn new(prefix: &str, suffix: &str) -> Result<Self, PidError> {
        Self::parse(&format!("{prefix}/{suffix}"))
    }

    pub fn parse(text: &str) -> Result<Self, PidError> {
        let (prefix, suffix) = text
            .split_once('/')
            .ok_or_else(|| PidError::MissingSeparator(text.to_string()))?;
        check_prefix(prefix)?;
        if suffix.is_empty() {
            return Err(PidError::EmptySuffix(text.to_string()));
        }
        if text.chars().any(char::is_whitespace) {
            return Err(PidError::Whitespace(text.to_string()));
        }
        Ok(Pid(text.to_string()))
    }

    pub fn prefix(&self) -> &str {
        self.0.split_once('/').map(|(p, _)| p).unwrap_or_default()
    }

    pub fn suffix(&self) -> &str {
        self.0.split_once('/').map(|(_, s)| s).unwrap_or_default()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Pid {
    type Err = PidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pid::parse(s)
    }
}

impl AsRef<str> for Pid {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Pid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Pid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Pid::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Counter-based identifier minting.
///
/// Suffixes are zero-padded decimal counters per prefix. An identifier is
/// never handed out twice by the same minter, and identifiers registered
/// through [`PidMinter::reserve`] (e.g. entities loaded from a snapshot) are
/// skipped.
#[derive(Debug, Default, Clone)]
pub struct PidMinter {
    counters: BTreeMap<String, u64>,
    taken: BTreeSet<Pid>,
}

impl PidMinter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mint(&mut self, prefix: &str) -> Result<Pid, PidError> {
        check_prefix(prefix)?;
        let counter = self.counters.entry(prefix.to_string()).or_insert(0);
        loop {
            *counter += 1;
            let pid = Pid(format!("{prefix}/{:04}", *counter));
            if self.taken.insert(pid.clone()) {
                return Ok(pid);
            }
        }
    }

    /// Marks an externally supplied identifier as used.
    pub fn reserve(&mut self, pid: &Pid) {
        self.taken.insert(pid.clone());
    }
}
