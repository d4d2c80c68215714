//! Large-Q outage slopes from sweep rows.

use std::collections::BTreeMap;

use crsnoma_core::{Combiner, Method, Scheme};
use serde::Serialize;

use crate::sweep::{Metric, Row};
use crate::CliError;

pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeWindow {
    pub q_db_min: f64,
    pub q_db_max: f64,
}

impl Default for SlopeWindow {
    fn default() -> Self {
        Self {
            q_db_min: 40.0,
            q_db_max: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub variant: String,
    pub combiner: Combiner,
    pub n_r: u32,
    pub n_d: u32,
    pub method: Method,
    pub metric: Metric,
    pub n_points: usize,
    pub slope: f64,
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeReport {
    pub fits: Vec<SlopeFit>,
    /// Groups with fewer than `MIN_POINTS` positive values in the window.
    pub insufficient: Vec<String>,
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

type GroupKey = (String, Combiner, u32, u32, Method, Metric);

/// Fits `log10(P_out)` against `log10(Q)` for every NOMA outage group
/// (variant, combiner, antennas, method, symbol) inside `window`. Errors when
/// no group has enough positive points.
pub fn fit_outage_slope(rows: &[Row], window: SlopeWindow) -> Result<SlopeReport, CliError> {
    let mut groups: BTreeMap<GroupKey, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        if r.scheme != Scheme::Noma || !r.metric.is_outage() || !r.error.is_empty() {
            continue;
        }
        if r.q_db < window.q_db_min || r.q_db > window.q_db_max {
            continue;
        }
        let key = (
            r.variant.clone(),
            r.combiner,
            r.n_r,
            r.n_d,
            r.method,
            r.metric,
        );
        let entry = groups.entry(key).or_default();
        if let Some(v) = r.value.filter(|v| *v > 0.0 && v.is_finite()) {
            entry.push((r.q_db / 10.0, v.log10()));
        }
    }
    let mut report = SlopeReport {
        fits: Vec::new(),
        insufficient: Vec::new(),
    };
    for ((variant, combiner, n_r, n_d, method, metric), pts) in groups {
        if pts.len() < MIN_POINTS {
            report.insufficient.push(format!(
                "{variant} {combiner} ({n_r},{n_d}) {method} {metric:?}: {} usable points",
                pts.len()
            ));
            continue;
        }
        let slope = least_squares_slope(&pts);
        let expected = -(n_r.min(n_d) as f64);
        report.fits.push(SlopeFit {
            variant,
            combiner,
            n_r,
            n_d,
            method,
            metric,
            n_points: pts.len(),
            slope,
            expected,
            deviation: slope - expected,
        });
    }
    if report.fits.is_empty() {
        return Err(CliError::InsufficientData(format!(
            "no outage group has {MIN_POINTS} positive points at Q >= {} dB",
            window.q_db_min
        )));
    }
    Ok(report)
}
