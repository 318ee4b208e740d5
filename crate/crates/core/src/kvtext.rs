//! Flat `key = value` text documents.
//!
//! Profiles, Middleton parameter sets and estimation reports are persisted
//! as one `key = value` pair per line. Blank lines and lines starting with
//! `#` are ignored. Vector values are comma separated. Numbers are written
//! in plain decimal notation using the shortest representation that parses
//! back to the same `f64`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::{Error, Result};

/// An ordered list of key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDocument {
    comments: Vec<String>,
    entries: Vec<(String, String)>,
}

impl KvDocument {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a `# ...` header line emitted before the entries.
    pub fn comment(&mut self, text: impl Into<String>) -> &mut Self {
        self.comments.push(text.into());
        self
    }

    /// Sets `key`, replacing an earlier value with the same key.
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn set_f64(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.set(key, format_f64(value))
    }

    pub fn set_vec(&mut self, key: impl Into<String>, values: &[f64]) -> &mut Self {
        let joined = values
            .iter()
            .map(|v| format_f64(*v))
            .collect::<Vec<_>>()
            .join(", ");
        self.set(key, joined)
    }

    /// Appends every entry of `other` under `prefix.`.
    pub fn extend_prefixed(&mut self, prefix: &str, other: &KvDocument) -> &mut Self {
        for (k, v) in &other.entries {
            self.set(format!("{prefix}.{k}"), v);
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.require(key)?;
        raw.parse()
            .map_err(|_| Error::Config(format!("key `{key}`: cannot parse `{raw}`")))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        self.parse_value(key)
    }

    pub fn get_vec(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.require(key)?;
        if raw.trim().is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    Error::Config(format!("key `{key}`: cannot parse element `{}`", tok.trim()))
                })
            })
            .collect()
    }

    /// Parses a document. Duplicate keys keep the last value.
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = KvDocument::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                doc.comments.push(c.trim().to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(idx + 1, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::parse(idx + 1, "empty key"));
            }
            doc.set(key, value.trim());
        }
        Ok(doc)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Shortest round-trip decimal form (never exponent notation).
pub fn format_f64(value: f64) -> String {
    format!("{value}")
}
