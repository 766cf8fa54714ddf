//! Run configuration read from a `key = value` file.
//!
//! ```text
//! # comment
//! rel_tol = 1e-10
//! abs_tol = 1e-14
//! max_segments = 4096
//! endpoint_cutoff = 1e-10
//! format = csv
//! output = results.csv
//! seed = 42
//! ```
//!
//! Blank lines and text after `#` are ignored. The file named by `--config`
//! wins over the one named by the environment variable [`CONFIG_ENV`];
//! command-line flags override both.

use std::path::{Path, PathBuf};

use fracmom::quad::QuadratureConfig;

use crate::table::Format;
use crate::CliError;

pub const CONFIG_ENV: &str = "FRACMOM_CONFIG";

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub quadrature: QuadratureConfig,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            output_path: None,
            format: Format::Csv,
            seed: DEFAULT_SEED,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: bad value '{value}' for {key}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {line}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            let q = &mut cfg.quadrature;
            match key {
                "rel_tol" => q.rel_tol = parse_value(key, value, line)?,
                "abs_tol" => q.abs_tol = parse_value(key, value, line)?,
                "max_segments" => q.max_segments = parse_value(key, value, line)?,
                "endpoint_cutoff" => q.endpoint_cutoff = parse_value(key, value, line)?,
                "format" => cfg.format = value.parse().map_err(CliError::Usage)?,
                "output" => cfg.output_path = Some(PathBuf::from(value)),
                "seed" => cfg.seed = parse_value(key, value, line)?,
                other => {
                    return Err(CliError::Usage(format!("config line {line}: unknown key '{other}'")))
                }
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), CliError> {
        let q = &self.quadrature;
        if !(q.rel_tol > 0.0 && q.abs_tol > 0.0 && q.max_segments >= 8) {
            return Err(CliError::Usage(
                "need rel_tol > 0, abs_tol > 0 and max_segments >= 8".into(),
            ));
        }
        Ok(())
    }

    /// The explicit file, else the file named by [`CONFIG_ENV`], else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let from_env = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        match explicit.map(Path::to_path_buf).or(from_env) {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                Self::parse(&text)
            }
            None => Ok(Self::default()),
        }
    }
}
