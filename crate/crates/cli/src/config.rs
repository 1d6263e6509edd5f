//! Flat `key = value` configuration files.
//!
//! One entry per line; `#` starts a comment; blank lines are ignored. Every
//! key must be consumed by the command reading the file, so typos surface
//! as errors instead of silently falling back to defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("missing required key(s): {0}")]
    Missing(String),
    #[error("unknown key(s): {0}")]
    Unknown(String),
    #[error("key `{key}`: cannot parse `{value}`: {reason}")]
    Value { key: String, value: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed configuration that tracks which keys were read.
#[derive(Debug)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
    consumed: std::cell::RefCell<std::collections::BTreeSet<String>>,
    missing: std::cell::RefCell<Vec<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: raw.trim().to_string() });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() || k.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax { line, text: raw.trim().to_string() });
            }
            if entries.insert(k.to_string(), Entry { value: v.to_string(), line }).is_some() {
                return Err(ConfigError::Duplicate { line, key: k.to_string() });
            }
        }
        Ok(Self { entries, consumed: Default::default(), missing: Default::default() })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.consumed.borrow_mut().insert(key.to_string());
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn convert<T>(key: &str, value: &str) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        value.parse().map_err(|e: T::Err| ConfigError::Value {
            key: key.to_string(),
            value: value.to_string(),
            reason: e.to_string(),
        })
    }

    pub fn optional<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key).map(|v| Self::convert(key, v)).transpose()
    }

    pub fn or<T>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.optional(key)?.unwrap_or(default))
    }

    /// Records a missing key and returns `None`; [`Config::finish`] reports
    /// all missing keys together.
    pub fn required<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let v = self.optional(key)?;
        if v.is_none() {
            self.missing.borrow_mut().push(key.to_string());
        }
        Ok(v)
    }

    /// Fails on missing required keys, then on keys nobody read.
    pub fn finish(self) -> Result<(), ConfigError> {
        let missing = self.missing.into_inner();
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing.join(", ")));
        }
        let consumed = self.consumed.into_inner();
        let unknown: Vec<String> = self
            .entries
            .iter()
            .filter(|(k, _)| !consumed.contains(*k))
            .map(|(k, e)| format!("{k} (line {})", e.line))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Unknown(unknown.join(", ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let c = Config::parse("# header\nseed = 4 # trailing\n\nname=simple\n").unwrap();
        assert_eq!(c.or("seed", 0u64).unwrap(), 4);
        assert_eq!(c.required::<String>("name").unwrap().as_deref(), Some("simple"));
        assert_eq!(c.or("absent", 1.5f64).unwrap(), 1.5);
        c.finish().unwrap();
    }

    #[test]
    fn unknown_and_missing_keys() {
        let c = Config::parse("seed = 1\ntypo = 2\n").unwrap();
        c.or("seed", 0u64).unwrap();
        assert!(matches!(c.finish(), Err(ConfigError::Unknown(k)) if k.contains("typo")));
        let c = Config::parse("seed = 1\n").unwrap();
        c.required::<String>("preset").unwrap();
        c.required::<String>("policy").unwrap();
        c.or("seed", 0u64).unwrap();
        assert_eq!(c.finish(), Err(ConfigError::Missing("preset, policy".into())));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(Config::parse("seed 1"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(Config::parse("a = 1\na = 2"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(Config::parse("a ="), Err(ConfigError::Syntax { .. })));
        let c = Config::parse("seed = x").unwrap();
        assert!(matches!(c.or("seed", 0u64), Err(ConfigError::Value { .. })));
    }
}
