//! Run configuration shared by every subcommand.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rncurves_core::crit::{CritOptions, Family};
use rncurves_core::periods::QuadOptions;
use rncurves_core::series::MAX_ORDER;
use rncurves_core::Error;
use serde::Deserialize;

use crate::Failure;

/// Environment variable naming a configuration file, used when `--config`
/// is absent.
pub const CONFIG_ENV: &str = "RNCURVES_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Tolerances and defaults; a JSON configuration file mirrors these fields.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Quadrature tolerance.
    pub tol: f64,
    /// Series order.
    pub order: usize,
    /// Finite-difference step factor.
    pub fd_step: f64,
    /// `g₃` brackets keyed by family tag or numeral.
    pub brackets: BTreeMap<String, [f64; 2]>,
    /// Output format of `sweep`.
    pub format: Format,
    /// Seed for randomized checks.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { tol: 1e-12, order: 20, fd_step: 1e-5, brackets: BTreeMap::new(), format: Format::Json, seed: 20 }
    }
}

impl RunConfig {
    /// Reads `path`, else the file named by [`CONFIG_ENV`], else defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let from_env = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        let Some(path) = path.map(Path::to_path_buf).or(from_env) else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::Input(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Failure::Input(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Failure::Input(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Failure::Input(format!("finite-difference step must be positive, got {}", self.fd_step)));
        }
        if self.order > MAX_ORDER {
            return Err(Error::OrderTooLarge { requested: self.order, max: MAX_ORDER }.into());
        }
        for (key, [lo, hi]) in &self.brackets {
            if Family::from_tag(key).is_none() {
                return Err(Failure::Input(format!("unknown family {key:?} in brackets")));
            }
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Failure::Input(format!("bracket for {key} must satisfy lo < hi")));
            }
        }
        Ok(())
    }

    /// Configured bracket for `family`, else its default at `g2`.
    pub fn bracket(&self, family: Family, g2: f64) -> (f64, f64) {
        self.brackets
            .iter()
            .find(|(k, _)| Family::from_tag(k) == Some(family))
            .map_or_else(|| family.default_bracket(g2), |(_, b)| (b[0], b[1]))
    }

    pub fn quad(&self) -> QuadOptions<f64> {
        QuadOptions::with_tol(self.tol)
    }

    pub fn crit(&self) -> CritOptions<f64> {
        CritOptions { quad: self.quad(), fd_step: self.fd_step, ..CritOptions::default() }
    }
}
