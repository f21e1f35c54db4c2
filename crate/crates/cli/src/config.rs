//! Resolved `key=value` settings: config file first, flags on top.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use teig_core::{Error, Result};

#[derive(Debug, Default)]
pub struct Settings {
    given: BTreeMap<String, String>,
    /// Every value read, with defaults filled in, in first-read order.
    resolved: RefCell<Vec<(String, String)>>,
}

impl Settings {
    pub fn parse_file(path: &Path) -> Result<BTreeMap<String, String>> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        parse_text(&text)
    }

    pub fn new(given: BTreeMap<String, String>) -> Self {
        Settings {
            given,
            resolved: RefCell::new(Vec::new()),
        }
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.given.insert(key.to_string(), value);
    }

    pub fn given_keys(&self) -> impl Iterator<Item = &String> {
        self.given.keys()
    }

    pub fn has(&self, key: &str) -> bool {
        self.given.contains_key(key)
    }

    fn record(&self, key: &str, value: &str) {
        let mut r = self.resolved.borrow_mut();
        if !r.iter().any(|(k, _)| k == key) {
            r.push((key.to_string(), value.to_string()));
        }
    }

    pub fn opt_str(&self, key: &str) -> Option<String> {
        let v = self.given.get(key).cloned();
        if let Some(v) = &v {
            self.record(key, v);
        }
        v
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        let v = self.given.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.record(key, &v);
        v
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.opt_str(key) {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("cannot parse {key}={v}"))),
        }
    }

    pub fn get<T: FromStr + ToString>(&self, key: &str, default: T) -> Result<T> {
        match self.opt(key)? {
            Some(v) => Ok(v),
            None => {
                self.record(key, &default.to_string());
                Ok(default)
            }
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.opt(key)?
            .ok_or_else(|| Error::Config(format!("missing required setting `{key}`")))
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.opt_str(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_number(s.trim()).ok_or_else(|| Error::Config(format!("cannot parse {key} entry `{s}`"))))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// `a:b` with `a < b`.
    pub fn range(&self, key: &str) -> Result<Option<(f64, f64)>> {
        match self.opt_str(key) {
            None => Ok(None),
            Some(v) => {
                let (a, b) = v
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("{key} must be `lo:hi`, got `{v}`")))?;
                let a = parse_number(a.trim()).ok_or_else(|| Error::Config(format!("cannot parse {key}={v}")))?;
                let b = parse_number(b.trim()).ok_or_else(|| Error::Config(format!("cannot parse {key}={v}")))?;
                if !(a.is_finite() && b.is_finite()) || a >= b {
                    return Err(Error::Config(format!("{key} needs lo < hi, got `{v}`")));
                }
                Ok(Some((a, b)))
            }
        }
    }

    /// A real number, also accepting fractions such as `1/1024`.
    pub fn number(&self, key: &str, default: f64) -> Result<f64> {
        match self.opt_str(key) {
            Some(v) => parse_number(v.trim()).ok_or_else(|| Error::Config(format!("cannot parse {key}={v}"))),
            None => {
                self.record(key, &default.to_string());
                Ok(default)
            }
        }
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = self.resolved.borrow().clone();
        for (k, v) in &self.given {
            if !out.iter().any(|(key, _)| key == k) {
                out.push((k.clone(), v.clone()));
            }
        }
        out
    }
}

pub fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            (b != 0.0).then_some(a / b)
        }
        None => s.parse().ok(),
    }
}

pub fn parse_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key=value, got `{line}`", no + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Config(format!("config line {}: empty key", no + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}
