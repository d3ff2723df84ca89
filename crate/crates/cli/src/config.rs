//! Layered settings: built-in defaults, then an optional flat `key=value`
//! file, then command-line flags. Every value that a command reads is
//! recorded so it can be written back into the command's report.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use evanon::{Error, Result};

/// Keys accepted in a configuration file. One file can serve every
/// subcommand; each command reads the keys it needs and ignores the rest.
pub const KNOWN_KEYS: &[&str] = &[
    "seed",
    "width",
    "height",
    "frame_period_us",
    "half_life_us",
    "contrast_gain",
    "mid_gray",
    "threshold",
    "log_eps",
    "refractory_us",
    "max_events_per_pair",
    "sigma",
    "feather_seed",
    "window_us",
    "overlap",
    "per_polarity",
    "slices",
    "emd_seed",
    "render_gain",
];

pub struct Resolver {
    file: BTreeMap<String, (String, String)>,
    resolved: Vec<(String, String)>,
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                parse(&text, &path.display().to_string())?
            }
            None => BTreeMap::new(),
        };
        Ok(Resolver { file, resolved: Vec::new() })
    }

    /// Flag if given, else the file value, else `default`.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => self.file_value(key)?.unwrap_or(default),
        };
        self.record(key, &value);
        Ok(value)
    }

    /// Like [`Resolver::get`] for settings that may stay unset.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => self.file_value(key)?,
        };
        match &value {
            Some(v) => self.record(key, v),
            None => self.record(key, "none"),
        }
        Ok(value)
    }

    /// Adds an entry that is not a tunable setting, such as a file path.
    pub fn record(&mut self, key: &str, value: impl Display) {
        self.resolved.push((key.to_string(), value.to_string()));
    }

    pub fn into_config(self) -> Vec<(String, String)> {
        self.resolved
    }

    fn file_value<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        debug_assert!(KNOWN_KEYS.contains(&key), "unregistered key {key}");
        let Some((raw, location)) = self.file.get(key) else {
            return Ok(None);
        };
        raw.parse()
            .map(Some)
            .map_err(|e| Error::parse(location.clone(), format!("{key}: {e}")))
    }
}

fn parse(text: &str, name: &str) -> Result<BTreeMap<String, (String, String)>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let location = format!("{name}: line {}", i + 1);
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(location, "expected key=value"));
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::parse(location, format!("unknown key `{key}`")));
        }
        if out.insert(key.to_string(), (value.trim().to_string(), location.clone())).is_some() {
            return Err(Error::parse(location, format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}
