//! Name-addressed registries of interchangeable strategies.
//!
//! Preset ids have the form `name` or `name:key=value,key=value`, for example
//! `porous-medium:m=2` or `compact-support:epsilon=1e-3`.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Numeric parameters parsed from a preset id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PresetParams {
    values: BTreeMap<String, f64>,
}

impl PresetParams {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn get_or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }

    pub fn insert(&mut self, key: impl Into<String>, value: f64) {
        self.values.insert(key.into(), value);
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

/// Splits `name:k=v,...` into its name and parameters.
pub fn parse_preset_id(id: &str) -> Result<(String, PresetParams)> {
    let id = id.trim();
    let (name, rest) = match id.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (id, None),
    };
    if name.is_empty() {
        return Err(Error::InvalidParameter(format!("empty preset id `{id}`")));
    }
    let mut params = PresetParams::default();
    if let Some(rest) = rest {
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value in `{part}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("`{v}` is not a number in `{id}`")))?;
            params.insert(k.trim(), v);
        }
    }
    Ok((name.to_string(), params))
}

type Constructor<T> = Box<dyn Fn(&PresetParams) -> Result<Arc<T>> + Send + Sync>;

/// Maps preset names to constructors producing shared trait objects.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<String, Constructor<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    pub fn register<F>(&mut self, name: &str, ctor: F) -> &mut Self
    where
        F: Fn(&PresetParams) -> Result<Arc<T>> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_string(), Box::new(ctor));
        self
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn build(&self, id: &str) -> Result<Arc<T>> {
        let (name, params) = parse_preset_id(id)?;
        let ctor = self.entries.get(&name).ok_or_else(|| Error::UnknownPreset {
            id: format!("{} `{}`", self.kind, id),
            known: self.names().join(", "),
        })?;
        ctor(&params)
    }
}

impl<T: ?Sized> std::fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry").field("kind", &self.kind).field("entries", &self.names()).finish()
    }
}
