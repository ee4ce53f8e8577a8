use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag::FlagConfig;
use crate::num::Num;
use crate::oracle;
use crate::scalar::{Mode, Scalar};
use crate::tensor::EvalOptions;

/// Largest accepted covariant-derivative order for the flag.
pub const MAX_DERIVATIVE_ORDER: usize = 16;
/// Largest accepted jet-oracle order.
pub const MAX_JET_ORDER: usize = 14;
pub const MAX_PROBES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub mode: Mode,
    /// Relative rank tolerance.
    pub tol: f64,
    /// Cap on the derivative order of the flag; `None` means `n(n+1)/2 + 2`.
    pub max_order: Option<usize>,
    /// Jet-oracle order; `None` means `n(n+1)/2 + 3`.
    pub jet_order: Option<usize>,
    pub probes: usize,
    pub probe_radius: Scalar,
    pub probe_seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let flag = FlagConfig::default();
        AnalysisConfig {
            mode: Mode::Exact,
            tol: flag.eval.tol,
            max_order: None,
            jet_order: None,
            probes: flag.probes,
            probe_radius: flag.probe_radius,
            probe_seed: flag.probe_seed,
        }
    }
}

/// The configuration as recorded in a report, with defaults resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub mode: &'static str,
    pub tol: f64,
    pub max_order: usize,
    pub jet_order: usize,
    pub probes: usize,
    pub probe_radius: Num,
    pub probe_seed: u64,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.probe_radius.to_f64() > 0.0) {
            return Err(Error::InvalidConfig("probe radius must be positive".into()));
        }
        if let Some(k) = self.max_order {
            if k == 0 || k > MAX_DERIVATIVE_ORDER {
                return Err(Error::InvalidConfig(format!(
                    "max order {k} outside 1..={MAX_DERIVATIVE_ORDER}"
                )));
            }
        }
        if let Some(j) = self.jet_order {
            if j < 2 {
                return Err(Error::OrderTooLow(j));
            }
            if j > MAX_JET_ORDER {
                return Err(Error::InvalidConfig(format!("jet order {j} exceeds the cap {MAX_JET_ORDER}")));
            }
        }
        if self.probes > MAX_PROBES {
            return Err(Error::InvalidConfig(format!("at most {MAX_PROBES} probes")));
        }
        Ok(())
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            mode: self.mode,
            tol: self.tol,
            order_cap: self.max_order,
        }
    }

    pub fn flag_config(&self) -> FlagConfig {
        FlagConfig {
            eval: self.eval_options(),
            probes: self.probes,
            probe_radius: self.probe_radius.clone(),
            probe_seed: self.probe_seed,
        }
    }

    pub fn jet_order_for(&self, n: usize) -> usize {
        self.jet_order.unwrap_or_else(|| oracle::default_order(n))
    }

    pub fn echo(&self, n: usize) -> ConfigEcho {
        ConfigEcho {
            mode: match self.mode {
                Mode::Exact => "exact",
                Mode::Float => "float",
            },
            tol: self.tol,
            max_order: self.eval_options().order_cap(n),
            jet_order: self.jet_order_for(n),
            probes: self.probes,
            probe_radius: Num::from(&self.probe_radius),
            probe_seed: self.probe_seed,
        }
    }
}
