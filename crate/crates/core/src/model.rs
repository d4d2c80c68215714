//! Scenario parameters, derived decoding thresholds and the large-Q outage model.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Receive combining used at the relay and at the secondary receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Combiner {
    /// One antenna at each receiver.
    Single,
    /// Selection combining: strongest branch.
    Sc,
    /// Maximal-ratio combining: sum of branch gains.
    Mrc,
}

impl Combiner {
    pub const ALL: [Combiner; 3] = [Combiner::Single, Combiner::Sc, Combiner::Mrc];

    pub fn as_str(self) -> &'static str {
        match self {
            Combiner::Single => "SINGLE",
            Combiner::Sc => "SC",
            Combiner::Mrc => "MRC",
        }
    }

    /// Combines per-antenna squared gains into the effective gain.
    pub fn combine(self, gains: &[f64]) -> f64 {
        match self {
            Combiner::Single => gains[0],
            Combiner::Sc => gains.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Combiner::Mrc => gains.iter().sum(),
        }
    }
}

impl std::fmt::Display for Combiner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Combiner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SINGLE" => Ok(Combiner::Single),
            "SC" => Ok(Combiner::Sc),
            "MRC" => Ok(Combiner::Mrc),
            other => Err(Error::InvalidConfig(format!("unknown combiner `{other}`"))),
        }
    }
}

/// Multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scheme {
    Noma,
    Oma,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Noma => "NOMA",
            Scheme::Oma => "OMA",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a reported number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "CLOSED_FORM",
            Method::Quadrature => "QUADRATURE",
            Method::MonteCarlo => "MONTE_CARLO",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// All scenario parameters. Mean-square gains and `q_peak` are linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub omega_sr: f64,
    pub omega_sd: f64,
    pub omega_rd: f64,
    pub omega_sp: f64,
    pub omega_rp: f64,
    pub q_peak: f64,
    pub a1: f64,
    pub a2: f64,
    pub n_r: u32,
    pub n_d: u32,
    pub r1: f64,
    pub r2: f64,
    pub combiner: Combiner,
}

const SUM_TOL: f64 = 1e-12;

impl Default for SystemConfig {
    fn default() -> Self {
        Self::reference()
    }
}

impl SystemConfig {
    /// Reference scenario: Ω_sd = 1, Ω_sr = Ω_rd = 10, Ω_sp = Ω_rp = 5.5,
    /// R1 = R2 = 1, a2 = 0.2, Q = 10, single antenna.
    pub fn reference() -> Self {
        Self {
            omega_sr: 10.0,
            omega_sd: 1.0,
            omega_rd: 10.0,
            omega_sp: 5.5,
            omega_rp: 5.5,
            q_peak: 10.0,
            a1: 0.8,
            a2: 0.2,
            n_r: 1,
            n_d: 1,
            r1: 1.0,
            r2: 1.0,
            combiner: Combiner::Single,
        }
    }

    /// Copy with the power split set to `(1 - a2, a2)`.
    pub fn with_a2(mut self, a2: f64) -> Self {
        self.a2 = a2;
        self.a1 = 1.0 - a2;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q_peak = q;
        self
    }

    pub fn with_q_db(self, q_db: f64) -> Self {
        self.with_q(db_to_linear(q_db))
    }

    pub fn with_antennas(mut self, n_r: u32, n_d: u32, combiner: Combiner) -> Self {
        self.n_r = n_r;
        self.n_d = n_d;
        self.combiner = combiner;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_sr", self.omega_sr),
            ("omega_sd", self.omega_sd),
            ("omega_rd", self.omega_rd),
            ("omega_sp", self.omega_sp),
            ("omega_rp", self.omega_rp),
            ("q_peak", self.q_peak),
            ("r1", self.r1),
            ("r2", self.r2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        for (name, v) in [("a1", self.a1), ("a2", self.a2)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        if (self.a1 + self.a2 - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidConfig(format!(
                "a1 + a2 must equal 1, got {}",
                self.a1 + self.a2
            )));
        }
        if self.a1 <= self.a2 {
            return Err(Error::InvalidConfig(format!(
                "a1 ({}) must exceed a2 ({})",
                self.a1, self.a2
            )));
        }
        if self.omega_sd >= self.omega_sr {
            return Err(Error::InvalidConfig(format!(
                "omega_sd ({}) must be below omega_sr ({})",
                self.omega_sd, self.omega_sr
            )));
        }
        if self.n_r == 0 || self.n_d == 0 {
            return Err(Error::InvalidConfig("antenna counts must be >= 1".into()));
        }
        if self.combiner == Combiner::Single && (self.n_r != 1 || self.n_d != 1) {
            return Err(Error::InvalidConfig(format!(
                "SINGLE combiner requires n_r = n_d = 1, got ({}, {})",
                self.n_r, self.n_d
            )));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Decoding thresholds and composite scales derived from a [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedThresholds {
    pub eps1: f64,
    pub eps2: f64,
    /// `+inf` when the power split cannot support s1.
    pub theta1: f64,
    pub theta2: f64,
    pub theta: f64,
    pub phi: f64,
    pub noma_feasible: bool,
    omega_sr: f64,
    omega_sd: f64,
}

impl DerivedThresholds {
    /// `k/Ω_sr + j/Ω_sd`.
    pub fn xi(&self, k: u32, j: u32) -> f64 {
        k as f64 / self.omega_sr + j as f64 / self.omega_sd
    }
}

/// Rate threshold `2^(2R) - 1` for a two-slot protocol.
pub fn sinr_threshold(rate: f64) -> f64 {
    (2.0 * rate * std::f64::consts::LN_2).exp_m1()
}

pub fn derive_thresholds(cfg: &SystemConfig) -> Result<DerivedThresholds> {
    cfg.validate()?;
    Ok(thresholds_unchecked(cfg))
}

pub(crate) fn thresholds_unchecked(cfg: &SystemConfig) -> DerivedThresholds {
    let eps1 = sinr_threshold(cfg.r1);
    let eps2 = sinr_threshold(cfg.r2);
    let margin = cfg.a1 - eps1 * cfg.a2;
    let noma_feasible = margin > 0.0;
    let theta1 = if noma_feasible {
        eps1 / (cfg.q_peak * margin)
    } else {
        f64::INFINITY
    };
    let theta2 = eps2 / (cfg.a2 * cfg.q_peak);
    DerivedThresholds {
        eps1,
        eps2,
        theta1,
        theta2,
        theta: theta1.max(theta2),
        phi: 1.0 / cfg.omega_sr + 1.0 / cfg.omega_sd,
        noma_feasible,
        omega_sr: cfg.omega_sr,
        omega_sd: cfg.omega_sd,
    }
}

/// Large-Q behaviour of the outage probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticModel {
    pub beta: f64,
    pub beta_dagger: f64,
    pub decay_exponent_s1: i32,
    pub decay_exponent_s2: i32,
}

impl AsymptoticModel {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        let th = derive_thresholds(cfg)?;
        let margin = cfg.a1 - th.eps1 * cfg.a2;
        if !th.noma_feasible {
            return Err(Error::Infeasible {
                a1: cfg.a1,
                bound: th.eps1 * cfg.a2,
            });
        }
        let exponent = -(cfg.n_r.min(cfg.n_d) as i32);
        Ok(Self {
            beta: margin / (th.phi * cfg.omega_sp * th.eps1),
            beta_dagger: (th.eps1 / margin).max(th.eps2 / cfg.a2),
            decay_exponent_s1: exponent,
            decay_exponent_s2: exponent,
        })
    }
}

/// Leading-order large-Q approximation of both outage probabilities,
/// `(p_out_s1, p_out_s2)`.
pub fn leading_outage(cfg: &SystemConfig) -> Result<(f64, f64)> {
    AsymptoticModel::new(cfg)?;
    let th = thresholds_unchecked(cfg);
    let weight = |n: u32| match cfg.combiner {
        Combiner::Sc => factorial(n),
        Combiner::Single | Combiner::Mrc => 1.0,
    };
    let term = |scale: f64, n: u32| weight(n) * scale.powi(n as i32);
    let s1 = term(cfg.omega_sp * th.theta1 / cfg.omega_sr, cfg.n_r)
        + term(cfg.omega_sp * th.theta1 / cfg.omega_sd, cfg.n_d);
    let s2 = term(cfg.omega_sp * th.theta / cfg.omega_sr, cfg.n_r)
        + term(
            th.eps2 * cfg.omega_rp / (cfg.q_peak * cfg.omega_rd),
            cfg.n_d,
        );
    Ok((s1, s2))
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}
