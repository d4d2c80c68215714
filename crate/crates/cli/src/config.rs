//! JSON run configuration.
//!
//! A flat document whose keys are `SystemConfig` and `SweepSpec` field names.
//! Every key is optional and overrides the preset (or the reference scenario);
//! unknown keys are rejected.

use std::path::Path;

use crsnoma_core::{Combiner, Method, Scheme, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::sweep::{A2Mode, Metric, SweepSpec};
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub omega_sr: Option<f64>,
    pub omega_sd: Option<f64>,
    pub omega_rd: Option<f64>,
    pub omega_sp: Option<f64>,
    pub omega_rp: Option<f64>,
    pub q_peak: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub n_r: Option<u32>,
    pub n_d: Option<u32>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub combiner: Option<Combiner>,

    pub q_db_min: Option<f64>,
    pub q_db_max: Option<f64>,
    pub q_db_step: Option<f64>,
    pub schemes: Option<Vec<Scheme>>,
    pub combiners: Option<Vec<Combiner>>,
    pub antenna_sets: Option<Vec<(u32, u32)>>,
    pub methods: Option<Vec<Method>>,
    pub metrics: Option<Vec<Metric>>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
    pub a2_mode: Option<A2Mode>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Overrides the scenario fields present in the file. Setting only `a2`
    /// also sets `a1 = 1 - a2`.
    pub fn apply_system(&self, cfg: &mut SystemConfig) {
        macro_rules! set {
            ($($f:ident),*) => {$( if let Some(v) = self.$f { cfg.$f = v; } )*};
        }
        set!(omega_sr, omega_sd, omega_rd, omega_sp, omega_rp, q_peak, n_r, n_d, r1, r2, combiner);
        match (self.a1, self.a2) {
            (Some(a1), Some(a2)) => {
                cfg.a1 = a1;
                cfg.a2 = a2;
            }
            (None, Some(a2)) => *cfg = cfg.with_a2(a2),
            (Some(a1), None) => *cfg = cfg.with_a2(1.0 - a1),
            (None, None) => {}
        }
    }

    pub fn apply_sweep(&self, spec: &mut SweepSpec) {
        macro_rules! set {
            ($($f:ident),*) => {$( if let Some(v) = &self.$f { spec.$f = v.clone(); } )*};
        }
        set!(
            q_db_min,
            q_db_max,
            q_db_step,
            schemes,
            combiners,
            antenna_sets,
            methods,
            metrics,
            n_trials,
            seed,
            a2_mode
        );
    }
}
