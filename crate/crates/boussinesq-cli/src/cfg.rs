//! Flag/config merging: every flag is also settable through the key=value
//! config file, and an explicit flag wins over the file.

use boussinesq_ist::io::read_key_value;
use boussinesq_ist::{Error, Result};
use std::path::{Path, PathBuf};

pub struct Overlay {
    pairs: Vec<(String, String)>,
}

impl Overlay {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let pairs = match path {
            Some(p) => read_key_value(p)?,
            None => Vec::new(),
        };
        Ok(Self { pairs })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        // Last occurrence wins, like repeated flags would.
        self.pairs
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64> {
        match (flag, self.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(s)) => s.parse().map_err(|_| bad(key, s)),
            (None, None) => Ok(default),
        }
    }

    pub fn f64_opt(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>> {
        match (flag, self.get(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => s.parse().map(Some).map_err(|_| bad(key, s)),
            (None, None) => Ok(None),
        }
    }

    pub fn f64_req(&self, flag: Option<f64>, key: &str) -> Result<f64> {
        self.f64_opt(flag, key)?.ok_or_else(|| missing(key))
    }

    pub fn usize(&self, flag: Option<usize>, key: &str, default: usize) -> Result<usize> {
        match (flag, self.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(s)) => s.parse().map_err(|_| bad(key, s)),
            (None, None) => Ok(default),
        }
    }

    pub fn usize_opt(&self, flag: Option<usize>, key: &str) -> Result<Option<usize>> {
        match (flag, self.get(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => s.parse().map(Some).map_err(|_| bad(key, s)),
            (None, None) => Ok(None),
        }
    }

    pub fn path_req(&self, flag: Option<PathBuf>, key: &str) -> Result<PathBuf> {
        match (flag, self.get(key)) {
            (Some(p), _) => Ok(p),
            (None, Some(s)) => Ok(PathBuf::from(s)),
            (None, None) => Err(missing(key)),
        }
    }

    pub fn str_req(&self, flag: Option<String>, key: &str) -> Result<String> {
        match (flag, self.get(key)) {
            (Some(s), _) => Ok(s),
            (None, Some(s)) => Ok(s.to_string()),
            (None, None) => Err(missing(key)),
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Inconsistent(format!("cannot parse config value {key} = {value:?}"))
}

fn missing(key: &str) -> Error {
    Error::Inconsistent(format!(
        "missing required option --{key} (also settable as `{key} = ...` in the config file)"
    ))
}

/// Comma-separated float list ("200,500,750").
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Inconsistent(format!("cannot parse float {t:?} in list")))
        })
        .collect()
}

/// Sibling path sharing the stem: derived("r.csv", "_ray.csv") = "r_ray.csv".
pub fn derived(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}"))
}
