//! Grid search for the power split `a2` that maximizes the NOMA sum rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::model::SystemConfig;
use crate::simulator::mc_evaluate;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchMetric {
    SumRateClosed,
    SumRateMc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSearchSpec {
    pub m_points: u32,
    pub metric: SearchMetric,
    /// Trials per candidate for `SumRateMc`.
    pub mc_trials: u64,
    pub seed: u64,
}

impl Default for PowerSearchSpec {
    fn default() -> Self {
        Self {
            m_points: 24,
            metric: SearchMetric::SumRateClosed,
            mc_trials: 100_000,
            seed: 1,
        }
    }
}

impl PowerSearchSpec {
    /// Grid spacing `2^(-2 R1) / (M + 1)`.
    pub fn step(&self, r1: f64) -> f64 {
        2f64.powf(-2.0 * r1) / (self.m_points as f64 + 1.0)
    }

    /// Candidates `k · step` for `k = 1..=M`.
    pub fn candidates(&self, r1: f64) -> Vec<f64> {
        let step = self.step(r1);
        (1..=self.m_points).map(|k| k as f64 * step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSearchResult {
    pub a2_best: f64,
    pub metric_value: f64,
    pub curve: Vec<(f64, f64)>,
}

fn evaluate(cfg: &SystemConfig, spec: &PowerSearchSpec) -> Result<f64> {
    match spec.metric {
        SearchMetric::SumRateClosed => Ok(analytic::rates(cfg)?.c_sum),
        SearchMetric::SumRateMc => Ok(mc_evaluate(cfg, spec.mc_trials, spec.seed)?.rate_sum.mean),
    }
}

/// Evaluates the metric at every candidate `a2` (with `a1 = 1 - a2`) and
/// returns the best one, preferring the smaller `a2` on ties.
pub fn optimize_a2(cfg: &SystemConfig, spec: &PowerSearchSpec) -> Result<PowerSearchResult> {
    if spec.m_points == 0 {
        return Err(Error::InvalidConfig("m_points must be >= 1".into()));
    }
    let candidates = spec.candidates(cfg.r1);
    let values: Vec<Result<f64>> = candidates
        .par_iter()
        .map(|&a2| evaluate(&cfg.with_a2(a2), spec))
        .collect();

    let mut curve = Vec::with_capacity(candidates.len());
    for (&a2, v) in candidates.iter().zip(values) {
        match v {
            Ok(v) => curve.push((a2, v)),
            Err(e) if e.is_config_error() && curve.is_empty() => return Err(e),
            Err(e) => {
                return Err(Error::CandidateFailed {
                    a2,
                    partial: curve,
                    source: Box::new(e),
                })
            }
        }
    }
    let (a2_best, metric_value) =
        curve
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, (a2, v)| {
                if v > best.1 {
                    (a2, v)
                } else {
                    best
                }
            });
    Ok(PowerSearchResult {
        a2_best,
        metric_value,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_grid() {
        let spec = PowerSearchSpec::default();
        assert!((spec.step(1.0) - 0.01).abs() < 1e-15);
        let c = spec.candidates(1.0);
        assert_eq!(c.len(), 24);
        assert!((c[0] - 0.01).abs() < 1e-15 && (c[23] - 0.24).abs() < 1e-12);
    }

    #[test]
    fn single_candidate() {
        let spec = PowerSearchSpec {
            m_points: 1,
            ..Default::default()
        };
        let r = optimize_a2(&SystemConfig::reference(), &spec).unwrap();
        assert_eq!(r.a2_best, 0.125);
        assert_eq!(r.curve.len(), 1);
    }

    #[test]
    fn best_is_curve_maximum_and_feasible() {
        let cfg = SystemConfig::reference().with_q(100.0);
        let r = optimize_a2(&cfg, &PowerSearchSpec::default()).unwrap();
        let max = r
            .curve
            .iter()
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.metric_value, max);
        assert!(r.curve.iter().any(|p| p.0 == r.a2_best));
        for &(a2, _) in &r.curve {
            assert!(
                crate::model::derive_thresholds(&cfg.with_a2(a2))
                    .unwrap()
                    .noma_feasible
            );
        }
    }

    #[test]
    fn zero_points_rejected() {
        let spec = PowerSearchSpec {
            m_points: 0,
            ..Default::default()
        };
        assert!(optimize_a2(&SystemConfig::reference(), &spec).is_err());
    }

    #[test]
    fn candidate_failure_carries_partial_curve() {
        // With R1 small the upper candidates violate a1 > a2.
        let mut cfg = SystemConfig::reference();
        cfg.r1 = 0.1;
        match optimize_a2(&cfg, &PowerSearchSpec::default()) {
            Err(Error::CandidateFailed { a2, partial, .. }) => {
                assert!(a2 >= 0.5);
                assert!(!partial.is_empty());
                assert!(partial.iter().all(|p| p.0 < a2));
            }
            other => panic!("expected candidate failure, got {other:?}"),
        }
    }
}
