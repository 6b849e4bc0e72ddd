//! Run configuration: solver tolerances, limits and the seed.
//!
//! Values come from built-in defaults, then an optional JSON config file, then
//! the environment (`OPBALL_SEED`), then command-line flags.

use std::path::Path;

use opball::fixedpoint::{ChebyshevParams, FixedPointParams, SolverMode};
use opball::Tolerances;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    MidpointDescent,
    ChebyshevIterate,
}

impl From<ModeArg> for SolverMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::MidpointDescent => SolverMode::MidpointDescent,
            ModeArg::ChebyshevIterate => SolverMode::ChebyshevIterate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub boundary_tol: f64,
    pub fp_tol: f64,
    pub cheb_tol: f64,
    pub elliptic_margin: f64,
    pub unit_tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub max_elements: usize,
    pub solver_mode: ModeArg,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Tolerances::DEFAULT;
        RunConfig {
            boundary_tol: t.boundary_tol,
            fp_tol: t.fp_tol,
            cheb_tol: t.cheb_tol,
            elliptic_margin: t.elliptic_margin,
            unit_tol: t.unit_tol,
            seed: 0,
            max_iter: 5000,
            max_elements: 120,
            solver_mode: ModeArg::MidpointDescent,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>, env_seed: Option<&str>) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(s) = env_seed {
            cfg.seed = s
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("OPBALL_SEED={s:?} is not an unsigned integer")))?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let tols = [
            ("boundary_tol", self.boundary_tol),
            ("fp_tol", self.fp_tol),
            ("cheb_tol", self.cheb_tol),
            ("elliptic_margin", self.elliptic_margin),
            ("unit_tol", self.unit_tol),
        ];
        if let Some((name, v)) = tols.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(CliError::Config(format!("{name} must be a positive number, got {v}")));
        }
        if self.max_iter == 0 || self.max_elements == 0 {
            return Err(CliError::Config("max_iter and max_elements must be positive".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            boundary_tol: self.boundary_tol,
            fp_tol: self.fp_tol,
            cheb_tol: self.cheb_tol,
            elliptic_margin: self.elliptic_margin,
            unit_tol: self.unit_tol,
            ..Tolerances::DEFAULT
        }
    }

    pub fn fixed_point_params(&self) -> FixedPointParams {
        FixedPointParams {
            mode: self.solver_mode.into(),
            fp_tol: self.fp_tol,
            max_iter: self.max_iter,
            elliptic_margin: self.elliptic_margin,
            chebyshev: ChebyshevParams { tol: self.cheb_tol, ..ChebyshevParams::default() },
        }
    }
}
