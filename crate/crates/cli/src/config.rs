//! Flat key=value config files. Precedence: flags > config file >
//! defaults; the resolved map is hashed into every artifact.

use std::collections::BTreeMap;

#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&std::path::Path>) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(format!("line {}: expected key=value", lineno + 1));
                };
                values.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Config { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_u64(&self, key: &str) -> Option<u64> {
        self.get(key).and_then(|v| v.parse().ok())
    }

    pub fn get_i64(&self, key: &str) -> Option<i64> {
        self.get(key).and_then(|v| v.parse().ok())
    }

    pub fn get_usize(&self, key: &str) -> Option<usize> {
        self.get(key).and_then(|v| v.parse().ok())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(|v| v.parse().ok())
    }

    pub fn get_path(&self, key: &str) -> Option<std::path::PathBuf> {
        self.get(key).map(std::path::PathBuf::from)
    }

    /// FNV hash of the canonical key=value listing.
    pub fn hash(&self) -> u64 {
        let canonical: String =
            self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        famlab_core::util::fnv1a(canonical.as_bytes())
    }
}
