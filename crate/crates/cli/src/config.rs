//! Flat `key = value` configuration files. Command-line flags take
//! precedence over file values, which take precedence over defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Keys accepted in a configuration file.
pub const KEYS: &[&str] = &[
    "alpha", "B", "delta_x", "dim", "engine", "grid", "jitter", "k_den", "k_dtm", "kind", "m_dtm",
    "mode", "padding", "preset", "prime", "seed", "threads",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("config line {}: expected key = value", n + 1))
            })?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!(
                    "config line {}: unknown key `{k}`; known keys: {}",
                    n + 1,
                    KEYS.join(", ")
                )));
            }
            if values.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!(
                    "config line {}: duplicate key `{k}`",
                    n + 1
                )));
            }
        }
        Ok(Self { values })
    }

    /// The flag value if given, else the parsed file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        debug_assert!(KEYS.contains(&key));
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| CliError::Config(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

/// `a,b,c,d` as four numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bbox(pub [f64; 4]);

impl FromStr for Bbox {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        let arr: [f64; 4] = parts
            .try_into()
            .map_err(|_| "expected xmin,ymin,xmax,ymax".to_string())?;
        if arr.iter().any(|v| !v.is_finite()) || arr[0] > arr[2] || arr[1] > arr[3] {
            return Err(format!("invalid box {s}"));
        }
        Ok(Bbox(arr))
    }
}
