//! The single JSON document that determines a run, and the derived
//! scheme constants.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::VerifyConfig;
use crate::ensemble::EnsembleConfig;
use crate::error::{Error, Result};
use crate::mesh::Grid;
use crate::noise::{c_strat, s_min, s_opt, NoiseSpec};
use crate::physics::{cutoff_sigma, ModelParams};
use crate::scheme::{e_max, SchemeConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Verify,
    MassStudy,
    Constants,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "L_h")]
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default)]
    pub mode: Option<Mode>,
    pub model: ModelParams,
    pub grid: GridConfig,
    pub scheme: SchemeConfig,
    pub noise: NoiseSpec,
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    /// Accept a regularization `S` below the lower bound `s_min`.
    #[serde(default)]
    pub allow_small_s: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            Error::config(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config { field, message } => Error::Config {
                field: format!("{}: {field}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.length, self.grid.nodes)
            .map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::config(
                "schema",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema),
            ));
        }
        self.model.validate()?;
        let grid = self.grid()?;
        self.scheme.validate()?;
        self.noise.validate()?;
        self.ensemble.validate()?;
        let c = Constants::derive(&self.model, &self.noise, grid)?;
        if !self.allow_small_s && self.model.s_reg < c.s_min {
            return Err(Error::config(
                "model.s",
                format!(
                    "S = {} is below s_min = {}; set allow_small_s to override",
                    self.model.s_reg, c.s_min
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub h: f64,
    pub c_strat: f64,
    pub c_osc: f64,
    pub sigma: f64,
    pub e_max_h: f64,
    pub s_min: f64,
    pub s_opt: f64,
}

impl Constants {
    pub fn derive(model: &ModelParams, noise: &NoiseSpec, grid: Grid) -> Result<Self> {
        let h = grid.h();
        let cs = c_strat(noise, model.n, grid.length())?;
        Ok(Self {
            h,
            c_strat: cs,
            c_osc: model.c_osc(),
            sigma: cutoff_sigma(h, model.p),
            e_max_h: e_max(h, model.c_f, model.p),
            s_min: s_min(cs, model.n, model.c_f)?,
            s_opt: s_opt(cs, model.n)?,
        })
    }

    /// Derived constants with the configured energy threshold, if any.
    pub fn for_run(cfg: &RunConfig) -> Result<Self> {
        let mut c = Self::derive(&cfg.model, &cfg.noise, cfg.grid()?)?;
        if let Some(e) = cfg.scheme.e_max_h {
            c.e_max_h = e;
        }
        Ok(c)
    }
}
