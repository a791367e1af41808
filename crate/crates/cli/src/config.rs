//! Tool configuration and per-run provenance records.
//!
//! Configuration is resolved in three steps: an explicit `--config` path wins,
//! otherwise `$VULNJS_CONFIG_DIR/vulnjs.toml` is used when that file exists,
//! otherwise built-in defaults apply. Every command that produces output also
//! writes the fully resolved configuration next to its artifacts so a run can
//! be reproduced from the output directory alone.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vulnjs_core::metrics::MetricsConfig;

use crate::errors::{Failure, Result};

/// Environment variable naming the directory searched for `vulnjs.toml`.
pub const CONFIG_DIR_ENV: &str = "VULNJS_CONFIG_DIR";

/// Name of the config file inside [`CONFIG_DIR_ENV`].
pub const CONFIG_FILE_NAME: &str = "vulnjs.toml";

/// Name of the resolved-config record written into every output directory.
pub const RUN_RECORD_NAME: &str = "run-config.toml";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistoryConfig {
    /// Trigram similarity two function bodies must reach before a renamed
    /// definition is treated as the same function.
    pub similarity_threshold: f64,
}

impl Default for HistoryConfig {
    fn default() -> Self {
        HistoryConfig { similarity_threshold: 0.8 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub metrics: MetricsConfig,
    pub history: HistoryConfig,
}

impl AppConfig {
    fn validate(&self) -> Result<()> {
        self.metrics
            .validate()
            .map_err(|e| Failure::config(e.to_string()))?;
        let t = self.history.similarity_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Failure::config(format!(
                "history.similarity_threshold must be in (0, 1], got {t}"
            )));
        }
        Ok(())
    }
}

/// Loads and validates the effective configuration. Records where it came
/// from so the run record can say which file was read, if any.
pub fn load(explicit: Option<&Path>) -> Result<(AppConfig, Option<PathBuf>)> {
    let path = match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => match std::env::var_os(CONFIG_DIR_ENV) {
            Some(dir) => {
                let p = PathBuf::from(dir).join(CONFIG_FILE_NAME);
                p.exists().then_some(p)
            }
            None => None,
        },
    };
    let config = match &path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::io_ctx(format!("reading {}", p.display()), e))?;
            toml::from_str(&text)
                .map_err(|e| Failure::config(format!("{}: {e}", p.display())))?
        }
        None => AppConfig::default(),
    };
    config.validate()?;
    Ok((config, path))
}

#[derive(Debug, Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    config_file: Option<String>,
    args: &'a BTreeMap<&'static str, String>,
    config: &'a AppConfig,
}

/// Writes the resolved-config record for one run into `out_dir`.
pub fn write_run_record(
    out_dir: &Path,
    command: &str,
    config: &AppConfig,
    config_file: Option<&Path>,
    args: &BTreeMap<&'static str, String>,
) -> Result<()> {
    let record = RunRecord {
        command,
        config_file: config_file.map(|p| p.display().to_string()),
        args,
        config,
    };
    let text = toml::to_string_pretty(&record)
        .expect("run record serializes");
    let path = out_dir.join(RUN_RECORD_NAME);
    std::fs::write(&path, text)
        .map_err(|e| Failure::io_ctx(format!("writing {}", path.display()), e))
}

/// Creates the output directory (and parents) if missing.
pub fn ensure_out_dir(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::io_ctx(format!("creating {}", out_dir.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_defaults_validate() {
        let cfg = AppConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.history.similarity_threshold, 0.8);
        assert_eq!(cfg.metrics.clone_window, 50);
    }

    #[test]
    fn test_threshold_bounds_rejected() {
        for t in [0.0, -0.1, 1.5] {
            let cfg = AppConfig {
                history: HistoryConfig { similarity_threshold: t },
                ..AppConfig::default()
            };
            assert!(cfg.validate().is_err(), "threshold {t} should fail");
        }
    }

    #[test]
    fn test_partial_file_fills_defaults() {
        let cfg: AppConfig =
            toml::from_str("[history]\nsimilarity_threshold = 0.6\n").unwrap();
        assert_eq!(cfg.history.similarity_threshold, 0.6);
        assert_eq!(cfg.metrics.clone_window, 50);
        let bad: std::result::Result<AppConfig, _> = toml::from_str("nope = 1\n");
        assert!(bad.is_err());
    }
}
