//! CSV/JSON artifact emission. The JSON summary repeats the resolved
//! parameters and the config hash so every artifact is reproducible; the
//! timestamp field is the only part not covered by the determinism
//! guarantee.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::config::Config;

#[derive(Serialize)]
pub struct RunSummary {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub config_hash: String,
    pub generated_unix: u64,
    pub payload: BTreeMap<String, serde_json::Value>,
}

impl RunSummary {
    pub fn new(command: &str, cfg: &Config, params: &[(&str, String)]) -> Self {
        let mut map = BTreeMap::new();
        for (k, v) in params {
            map.insert((*k).to_string(), v.clone());
        }
        let mut hash_input: String = map.iter().map(|(k, v)| format!("{k}={v};")).collect();
        hash_input.push_str(&format!("cfg={:016x}", cfg.hash()));
        RunSummary {
            command: command.to_string(),
            params: map,
            config_hash: format!("{:016x}", famlab_core::util::fnv1a(hash_input.as_bytes())),
            generated_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            payload: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: &str, value: serde_json::Value) {
        self.payload.insert(key.to_string(), value);
    }
}

pub struct OutputSink {
    prefix: String,
}

impl OutputSink {
    pub fn new(prefix: &str) -> Self {
        OutputSink { prefix: prefix.to_string() }
    }

    pub fn csv_path(&self) -> std::path::PathBuf {
        format!("{}.csv", self.prefix).into()
    }

    pub fn json_path(&self) -> std::path::PathBuf {
        format!("{}.json", self.prefix).into()
    }

    pub fn write_csv(
        &self,
        summary: &RunSummary,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> std::io::Result<()> {
        use std::io::Write;
        let mut f = std::fs::File::create(self.csv_path())?;
        writeln!(f, "# command={}", summary.command)?;
        for (k, v) in &summary.params {
            writeln!(f, "# {k}={v}")?;
        }
        writeln!(f, "# config_hash={}", summary.config_hash)?;
        writeln!(f, "{}", header.join(","))?;
        for row in rows {
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_json(&self, summary: &RunSummary) -> std::io::Result<()> {
        std::fs::write(self.json_path(), serde_json::to_string_pretty(summary).unwrap())
    }
}
