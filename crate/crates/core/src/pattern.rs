//! Regular expression dialect for restrictions and the built-in regex adapter.
//!
//! Patterns use the syntax of the `regex` crate: no backreferences or
//! look-around, matching in time linear in the input. Matching is anchored,
//! a pattern must match the whole value.

use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use regex::Regex;

const CACHE_LIMIT: usize = 512;

static CACHE: LazyLock<Mutex<HashMap<String, Regex>>> = LazyLock::new(Default::default);

/// Compiles `pattern` so that it only matches complete strings.
pub fn compile_anchored(pattern: &str) -> Result<Regex, String> {
    if let Some(re) = CACHE.lock().ok().and_then(|c| c.get(pattern).cloned()) {
        return Ok(re);
    }
    let re = Regex::new(&format!("^(?:{pattern})$")).map_err(|e| e.to_string())?;
    if let Ok(mut cache) = CACHE.lock() {
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(pattern.to_string(), re.clone());
    }
    Ok(re)
}

pub fn full_match(pattern: &str, text: &str) -> Result<bool, String> {
    Ok(compile_anchored(pattern)?.is_match(text))
}

/// Full match plus capture groups, element 0 being the whole input.
/// Groups that did not participate are returned as empty strings.
pub fn capture_groups(pattern: &str, text: &str) -> Result<Option<Vec<String>>, String> {
    let re = compile_anchored(pattern)?;
    Ok(re.captures(text).map(|caps| {
        caps.iter()
            .map(|m| m.map(|m| m.as_str().to_string()).unwrap_or_default())
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchored() {
        assert!(full_match("[a-z]+", "abc").unwrap());
        assert!(!full_match("[a-z]+", "abc1").unwrap());
        assert!(!full_match("a|b", "ab").unwrap());
    }

    #[test]
    fn groups() {
        assert_eq!(
            capture_groups(r"([a-z]+)(\d+)", "abc123").unwrap(),
            Some(vec!["abc123".into(), "abc".into(), "123".into()])
        );
        assert_eq!(capture_groups(r"(\d+)", "x").unwrap(), None);
    }

    #[test]
    fn backreferences_unsupported() {
        assert!(compile_anchored(r"(a)\1").is_err());
    }
}
