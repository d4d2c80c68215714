//! Grid sweeps over the peak interference power.

use crsnoma_core::analytic::{self, RateReport};
use crsnoma_core::model::leading_outage;
use crsnoma_core::optimizer::{optimize_a2, PowerSearchSpec};
use crsnoma_core::quad_oracle::{quad_rate_s1_estimate, quad_rate_s2_estimate, QuadratureSettings};
use crsnoma_core::simulator::{mc_evaluate, McEstimate, McSummary, MIN_TRIALS};
use crsnoma_core::{Combiner, Method, Scheme, SystemConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Metric {
    RateS1,
    RateS2,
    RateSum,
    OutageS1,
    OutageS2,
}

impl Metric {
    pub fn is_outage(self) -> bool {
        matches!(self, Metric::OutageS1 | Metric::OutageS2)
    }
}

/// Whether NOMA rows use the configured `a2` or the best grid value per point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum A2Mode {
    Fixed,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub q_db_min: f64,
    pub q_db_max: f64,
    pub q_db_step: f64,
    pub schemes: Vec<Scheme>,
    pub combiners: Vec<Combiner>,
    /// `(N_r, N_d)` pairs for SC and MRC; SINGLE always uses `(1, 1)`.
    pub antenna_sets: Vec<(u32, u32)>,
    pub methods: Vec<Method>,
    pub metrics: Vec<Metric>,
    pub n_trials: u64,
    pub seed: u64,
    pub a2_mode: A2Mode,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            q_db_min: -10.0,
            q_db_max: 50.0,
            q_db_step: 2.0,
            schemes: vec![Scheme::Noma, Scheme::Oma],
            combiners: vec![Combiner::Single],
            antenna_sets: vec![(1, 1)],
            methods: vec![Method::ClosedForm, Method::MonteCarlo],
            metrics: vec![Metric::RateS1, Metric::RateS2, Metric::RateSum],
            n_trials: 1_000_000,
            seed: 1,
            a2_mode: A2Mode::Optimized,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let finite = [self.q_db_min, self.q_db_max, self.q_db_step]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.q_db_min > self.q_db_max || self.q_db_step <= 0.0 {
            return Err(CliError::Config(format!(
                "invalid Q grid: min {} dB, max {} dB, step {} dB",
                self.q_db_min, self.q_db_max, self.q_db_step
            )));
        }
        if self.methods.contains(&Method::MonteCarlo) && self.n_trials < MIN_TRIALS {
            return Err(CliError::Config(format!(
                "n_trials must be at least {MIN_TRIALS}, got {}",
                self.n_trials
            )));
        }
        if self.antenna_sets.iter().any(|&(r, d)| r == 0 || d == 0) {
            return Err(CliError::Config("antenna counts must be >= 1".into()));
        }
        Ok(())
    }

    /// Grid points `q_db_min + k·step` up to `q_db_max` (inclusive, with a
    /// small allowance for rounding).
    pub fn q_grid_db(&self) -> Vec<f64> {
        let span = (self.q_db_max - self.q_db_min) / self.q_db_step;
        let n = (span + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|k| self.q_db_min + k as f64 * self.q_db_step)
            .collect()
    }

    fn layouts(&self) -> Vec<(Combiner, u32, u32)> {
        let mut out = Vec::new();
        for &c in &self.combiners {
            match c {
                Combiner::Single => out.push((c, 1, 1)),
                _ => out.extend(self.antenna_sets.iter().map(|&(r, d)| (c, r, d))),
            }
        }
        out
    }
}

/// One output line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub variant: String,
    pub q_db: f64,
    pub scheme: Scheme,
    pub combiner: Combiner,
    pub n_r: u32,
    pub n_d: u32,
    pub method: Method,
    pub metric: Metric,
    pub value: Option<f64>,
    pub uncertainty: Option<f64>,
    pub a2: Option<f64>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
    pub asymptote: Option<f64>,
    pub error: String,
}

struct Point<'a> {
    variant: &'a str,
    q_db: f64,
    combiner: Combiner,
    n_r: u32,
    n_d: u32,
}

impl Point<'_> {
    fn row(&self, scheme: Scheme, method: Method, metric: Metric) -> Row {
        Row {
            variant: self.variant.to_string(),
            q_db: self.q_db,
            scheme,
            combiner: self.combiner,
            n_r: self.n_r,
            n_d: self.n_d,
            method,
            metric,
            value: None,
            uncertainty: None,
            a2: None,
            n_trials: None,
            seed: None,
            asymptote: None,
            error: String::new(),
        }
    }
}

fn rate_value(r: &RateReport, metric: Metric) -> f64 {
    match metric {
        Metric::RateS1 => r.c_s1,
        Metric::RateS2 => r.c_s2,
        _ => r.c_sum,
    }
}

fn noma_closed_form(cfg: &SystemConfig, metric: Metric, row: &mut Row) -> crsnoma_core::Result<()> {
    if metric.is_outage() {
        let v = match metric {
            Metric::OutageS1 => analytic::outage_s1(cfg)?,
            _ => analytic::outage_s2(cfg)?,
        };
        row.value = Some(v);
        row.uncertainty = Some(0.0);
        row.asymptote =
            leading_outage(cfg)
                .ok()
                .map(|(p1, p2)| if metric == Metric::OutageS1 { p1 } else { p2 });
    } else {
        let r = analytic::rates(cfg)?;
        if metric != Metric::RateS1 {
            row.method = r.method;
        }
        row.value = Some(rate_value(&r, metric));
        row.uncertainty = Some(0.0);
    }
    Ok(())
}

fn noma_quadrature(cfg: &SystemConfig, metric: Metric, row: &mut Row) -> crsnoma_core::Result<()> {
    let s = QuadratureSettings::default();
    let (value, error) = match metric {
        Metric::RateS1 => {
            let r = quad_rate_s1_estimate(cfg, &s)?;
            (r.value, r.error)
        }
        Metric::RateS2 => {
            let r = quad_rate_s2_estimate(cfg, &s)?;
            (r.value, r.error)
        }
        _ => {
            let a = quad_rate_s1_estimate(cfg, &s)?;
            let b = quad_rate_s2_estimate(cfg, &s)?;
            (a.value + b.value, a.error + b.error)
        }
    };
    row.value = Some(value);
    row.uncertainty = Some(error);
    Ok(())
}

fn mc_estimate(summary: &McSummary, scheme: Scheme, metric: Metric) -> McEstimate {
    match (scheme, metric) {
        (Scheme::Noma, Metric::RateS1) => summary.rate_s1,
        (Scheme::Noma, Metric::RateS2) => summary.rate_s2,
        (Scheme::Noma, Metric::RateSum) => summary.rate_sum,
        (Scheme::Noma, Metric::OutageS1) => summary.outage_s1,
        (Scheme::Noma, Metric::OutageS2) => summary.outage_s2,
        (Scheme::Oma, m) if m.is_outage() => summary.outage_oma,
        (Scheme::Oma, _) => summary.rate_oma,
    }
}

/// OMA carries one symbol: its rate is reported as the sum rate and its
/// outage under both outage metrics. Only Monte Carlo covers OMA.
fn supported(scheme: Scheme, method: Method, metric: Metric) -> bool {
    match scheme {
        Scheme::Noma => !(method == Method::Quadrature && metric.is_outage()),
        Scheme::Oma => {
            method == Method::MonteCarlo
                && matches!(
                    metric,
                    Metric::RateSum | Metric::OutageS1 | Metric::OutageS2
                )
        }
    }
}

fn evaluate_point(point: &Point, base: &SystemConfig, spec: &SweepSpec) -> Vec<Row> {
    let cfg = base
        .with_q_db(point.q_db)
        .with_antennas(point.n_r, point.n_d, point.combiner);
    let noma_a2 = match spec.a2_mode {
        A2Mode::Fixed => Ok(cfg.a2),
        A2Mode::Optimized => optimize_a2(&cfg, &PowerSearchSpec::default()).map(|r| r.a2_best),
    };
    let noma_cfg = noma_a2.clone().map(|a2| cfg.with_a2(a2));
    let mc = if spec.methods.contains(&Method::MonteCarlo) {
        Some(match &noma_cfg {
            Ok(c) => mc_evaluate(c, spec.n_trials, spec.seed),
            // OMA does not depend on the power split.
            Err(_) => mc_evaluate(&cfg, spec.n_trials, spec.seed),
        })
    } else {
        None
    };

    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        for &method in &spec.methods {
            for &metric in &spec.metrics {
                if !supported(scheme, method, metric) {
                    continue;
                }
                let mut row = point.row(scheme, method, metric);
                let result = match (scheme, method) {
                    (Scheme::Noma, m) => match &noma_cfg {
                        Err(e) => Err(e.clone()),
                        Ok(c) => {
                            row.a2 = Some(c.a2);
                            match m {
                                Method::ClosedForm => noma_closed_form(c, metric, &mut row),
                                Method::Quadrature => noma_quadrature(c, metric, &mut row),
                                Method::MonteCarlo => Ok(()),
                            }
                        }
                    },
                    _ => Ok(()),
                };
                let result = result.and_then(|()| {
                    if method == Method::MonteCarlo {
                        let summary = mc
                            .as_ref()
                            .expect("simulated when requested")
                            .as_ref()
                            .map_err(Clone::clone)?;
                        let e = mc_estimate(summary, scheme, metric);
                        row.value = Some(e.mean);
                        row.uncertainty = Some(e.std_err);
                        row.n_trials = Some(e.n_trials);
                        row.seed = Some(e.seed);
                    }
                    Ok(())
                });
                if let Err(e) = result {
                    row.value = None;
                    row.uncertainty = None;
                    row.error = e.to_string();
                }
                rows.push(row);
            }
        }
    }
    rows
}

/// Evaluates every grid point of `spec` on `base`. Points run in parallel;
/// rows come back in grid order (Q, then combiner and antennas, then scheme,
/// method and metric as listed in the spec). Numerical failures are recorded
/// per row and do not stop the sweep.
pub fn run_sweep(
    spec: &SweepSpec,
    base: &SystemConfig,
    variant: &str,
) -> Result<Vec<Row>, CliError> {
    spec.validate()?;
    base.validate()?;
    let layouts = spec.layouts();
    let points: Vec<Point> = spec
        .q_grid_db()
        .into_iter()
        .flat_map(|q_db| {
            layouts.iter().map(move |&(combiner, n_r, n_d)| Point {
                variant,
                q_db,
                combiner,
                n_r,
                n_d,
            })
        })
        .collect();
    for p in &points {
        base.with_antennas(p.n_r, p.n_d, p.combiner).validate()?;
    }
    let rows: Vec<Vec<Row>> = points
        .par_iter()
        .map(|p| evaluate_point(p, base, spec))
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Runs the same sweep for several labelled base configurations.
pub fn run_variants(
    spec: &SweepSpec,
    variants: &[(String, SystemConfig)],
) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for (label, cfg) in variants {
        rows.extend(run_sweep(spec, cfg, label)?);
    }
    Ok(rows)
}
