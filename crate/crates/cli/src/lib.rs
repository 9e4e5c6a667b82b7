//! Command implementations behind the `olsr-tune` binary.

pub mod campaign;
pub mod compare;
pub mod configs;
pub mod report;
pub mod simulate;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use olsr_tune::scenario::{catalog_names, scenario_by_name, ScenarioSpec};

/// Default output directory unless `OLSR_TUNE_OUT` is set.
pub const DEFAULT_OUT: &str = "olsr-tune-out";
pub const OUT_ENV: &str = "OLSR_TUNE_OUT";

/// A bundled scenario name or a path to a scenario file.
pub fn resolve_scenario(arg: &str) -> Result<ScenarioSpec> {
    if let Some(s) = scenario_by_name(arg) {
        return Ok(s);
    }
    let path = Path::new(arg);
    if !path.exists() {
        bail!("unknown scenario {arg:?}; bundled: {}, or a path to a scenario file", catalog_names().join(", "));
    }
    ScenarioSpec::load(path).with_context(|| format!("loading scenario {}", path.display()))
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = PathBuf::from(path);
    tmp.as_mut_os_string().push(format!(".tmp{}", std::process::id()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))
}

/// Parses a comma-separated list such as `1,2,3`.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow::anyhow!("{s:?}: {e}")))
        .collect()
}
