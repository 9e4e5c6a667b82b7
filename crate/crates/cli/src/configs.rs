//! Named OLSR configurations and configuration files.
//!
//! A configuration file is TOML:
//!
//! ```toml
//! format = "olsr-tune-config/1"
//! label = "tuned"
//! waiver = false
//!
//! [config]
//! hello_interval = 8.5
//! refresh_interval = 1.1
//! tc_interval = 7.2
//! willingness = 0
//! neighb_hold_time = 16.9
//! top_hold_time = 99.0
//! mid_hold_time = 6.7
//! dup_hold_time = 71.9
//! ```
//!
//! `waiver = true` admits values outside the tuning ranges as long as every
//! time is positive. A `.run` record is also accepted, yielding its best
//! configuration.

use std::path::Path;

use anyhow::{bail, Context, Result};
use olsr_tune::olsr::OlsrConfig;
use olsr_tune::optimizers::RunRecord;
use serde::{Deserialize, Serialize};

pub const CONFIG_FORMAT_TAG: &str = "olsr-tune-config/1";

#[derive(Debug, Clone, PartialEq)]
pub struct NamedConfig {
    pub label: String,
    pub config: OlsrConfig,
    /// Range checks relaxed to positivity.
    pub waiver: bool,
}

impl NamedConfig {
    pub fn validate(&self) -> Result<()> {
        let r = if self.waiver { self.config.validate_waived() } else { self.config.validate() };
        r.with_context(|| format!("configuration {:?}", self.label))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ConfigFile {
    format: String,
    label: Option<String>,
    #[serde(default)]
    waiver: bool,
    config: OlsrConfig,
}

#[allow(clippy::too_many_arguments)]
fn cfg(hello: f64, refresh: f64, tc: f64, will: u8, neighb: f64, top: f64, mid: f64, dup: f64) -> OlsrConfig {
    OlsrConfig {
        hello_interval: hello,
        refresh_interval: refresh,
        tc_interval: tc,
        willingness: will,
        neighb_hold_time: neighb,
        top_hold_time: top,
        mid_hold_time: mid,
        dup_hold_time: dup,
    }
}

/// `rfc3626` plus three expert configurations from the literature. Entries
/// outside the tuning ranges carry the waiver.
pub fn bundled() -> Vec<NamedConfig> {
    [
        ("rfc3626", OlsrConfig::rfc3626()),
        ("gomez-1", cfg(0.5, 0.5, 1.25, 3, 1.5, 3.75, 3.75, 30.0)),
        ("gomez-2", cfg(1.0, 1.0, 2.5, 3, 3.0, 7.5, 7.5, 30.0)),
        ("gomez-3", cfg(4.0, 4.0, 10.0, 3, 12.0, 20.0, 20.0, 30.0)),
    ]
    .into_iter()
    .map(|(label, config)| NamedConfig { label: label.into(), config, waiver: config.validate().is_err() })
    .collect()
}

pub fn bundled_labels() -> Vec<String> {
    bundled().into_iter().map(|c| c.label).collect()
}

/// A bundled label, a configuration file, or a run record.
pub fn resolve(arg: &str) -> Result<NamedConfig> {
    if let Some(c) = bundled().into_iter().find(|c| c.label == arg) {
        return Ok(c);
    }
    let path = Path::new(arg);
    if !path.exists() {
        bail!("unknown configuration {arg:?}; known labels: {}, or a path to a config file", bundled_labels().join(", "));
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg).to_string();
    let named = if text.starts_with("#!") {
        let record = RunRecord::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        NamedConfig { label: stem, config: record.best.config, waiver: false }
    } else {
        parse_config(&text, &stem).with_context(|| format!("parsing {}", path.display()))?
    };
    named.validate()?;
    Ok(named)
}

pub fn parse_config(text: &str, default_label: &str) -> Result<NamedConfig> {
    let file: ConfigFile = toml::from_str(text)?;
    if file.format != CONFIG_FORMAT_TAG {
        bail!("expected format {CONFIG_FORMAT_TAG:?}, found {:?}", file.format);
    }
    Ok(NamedConfig { label: file.label.unwrap_or_else(|| default_label.to_string()), config: file.config, waiver: file.waiver })
}

pub fn to_toml(named: &NamedConfig) -> String {
    let file = ConfigFile {
        format: CONFIG_FORMAT_TAG.into(),
        label: Some(named.label.clone()),
        waiver: named.waiver,
        config: named.config,
    };
    toml::to_string(&file).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_out_of_range_entries_are_waived() {
        let waived: Vec<(String, bool)> = bundled().into_iter().map(|c| (c.label, c.waiver)).collect();
        assert_eq!(
            waived,
            vec![("rfc3626".into(), false), ("gomez-1".into(), true), ("gomez-2".into(), false), ("gomez-3".into(), false)]
        );
        assert!(bundled().iter().all(|c| c.validate().is_ok()));
    }

    #[test]
    fn unknown_label_lists_known_ones() {
        let e = resolve("rfc9999").unwrap_err().to_string();
        assert!(e.contains("rfc3626") && e.contains("gomez-3"));
    }

    #[test]
    fn config_file_round_trips() {
        let c = bundled().remove(1);
        assert_eq!(parse_config(&to_toml(&c), "x").unwrap(), c);
        assert!(parse_config(&to_toml(&c).replace("config/1", "config/2"), "x").is_err());
    }
}
