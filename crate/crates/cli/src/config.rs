//! Optional defaults file.
//!
//! A flat list of `key = value` lines (TOML syntax, `#` starts a comment).
//! Command-line flags override anything set here.
//!
//! ```text
//! k = 64
//! stride = 1
//! chunk_groups = 16
//! prefilter = true
//! line_width = 60
//! threads = 8
//! shd_e = 5
//! shd_amend_run = 0
//! trials = 10
//! ```

use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub k: Option<usize>,
    pub stride: Option<usize>,
    pub chunk_groups: Option<u32>,
    pub prefilter: Option<bool>,
    pub line_width: Option<usize>,
    pub threads: Option<usize>,
    pub shd_e: Option<usize>,
    pub shd_amend_run: Option<usize>,
    pub shd_threshold: Option<usize>,
    pub trials: Option<usize>,
    pub strict: Option<bool>,
}

pub const CONFIG_ENV: &str = "STRIDER_CONFIG";

impl Config {
    pub fn parse(text: &str, path: &Path) -> Result<Config> {
        let err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            message,
        };
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| err(e.message().to_string()))?;
        let mut cfg = Config::default();
        for (key, value) in &table {
            let int = || -> Result<usize> {
                value
                    .as_integer()
                    .filter(|v| *v >= 0)
                    .map(|v| v as usize)
                    .ok_or_else(|| err(format!("'{key}' must be a non-negative integer")))
            };
            let boolean = || -> Result<bool> {
                value
                    .as_bool()
                    .ok_or_else(|| err(format!("'{key}' must be true or false")))
            };
            match key.as_str() {
                "k" => cfg.k = Some(int()?),
                "stride" => cfg.stride = Some(int()?),
                "chunk_groups" => {
                    let g = u32::try_from(int()?).map_err(|_| err("chunk_groups too large".into()))?;
                    cfg.chunk_groups = Some(g);
                }
                "prefilter" => cfg.prefilter = Some(boolean()?),
                "line_width" => cfg.line_width = Some(int()?),
                "threads" => cfg.threads = Some(int()?),
                "shd_e" => cfg.shd_e = Some(int()?),
                "shd_amend_run" => cfg.shd_amend_run = Some(int()?),
                "shd_threshold" => cfg.shd_threshold = Some(int()?),
                "trials" => cfg.trials = Some(int()?),
                "strict" => cfg.strict = Some(boolean()?),
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        Ok(cfg)
    }

    /// Loads `explicit`, else the file named by `STRIDER_CONFIG`, else nothing.
    pub fn load(explicit: Option<&Path>) -> Result<Config> {
        let path: Option<PathBuf> = explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        match path {
            None => Ok(Config::default()),
            Some(p) => {
                let text = std::fs::read_to_string(&p).map_err(CliError::io(&p))?;
                Config::parse(&text, &p)
            }
        }
    }
}
