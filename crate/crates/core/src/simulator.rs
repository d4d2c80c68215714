//! Seeded Monte Carlo of the two-slot relaying protocol.
//!
//! Trials are split into fixed-size blocks. Each block draws from its own
//! substreams, blocks run in parallel, and their running statistics are merged
//! in block order, so estimates do not depend on the number of workers.

use std::f64::consts::LOG2_E;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{OutageReport, RateReport, RateStdErr};
use crate::channels::FadingRealization;
use crate::model::{thresholds_unchecked, Combiner, Method, Scheme, SystemConfig};
use crate::rng::LinkStreams;
use crate::{Error, Result};

pub const BLOCK_TRIALS: u64 = 8192;
pub const MIN_TRIALS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_trials: u64,
    pub seed: u64,
}

/// Derives an independent seed for item `index` of a family of runs sharing
/// `base` (one splitmix64 step).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean from the sample variance.
    pub fn std_err(&self) -> f64 {
        (self.sample_variance() / self.n.max(1) as f64).sqrt()
    }

    /// Binomial standard error `sqrt(p(1-p)/n)` for 0/1 samples.
    pub fn binomial_std_err(&self) -> f64 {
        let p = self.mean;
        (p * (1.0 - p) / self.n.max(1) as f64).max(0.0).sqrt()
    }
}

/// SINRs of one realization: s1 and s2 at the relay, s1 at the destination in
/// the first slot, relay-to-destination in the second slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sinrs {
    pub gamma_sr1: f64,
    pub gamma_sr2: f64,
    pub gamma_sd: f64,
    pub gamma_rd: f64,
}

/// Combined gains of one realization for a given combiner.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CombinedGains {
    sr: f64,
    sd: f64,
    rd: f64,
}

fn combine(real: &FadingRealization, combiner: Combiner) -> CombinedGains {
    CombinedGains {
        sr: combiner.combine(&real.gains_sr),
        sd: combiner.combine(&real.gains_sd),
        rd: combiner.combine(&real.gains_rd),
    }
}

fn sinrs_from(g: CombinedGains, real: &FadingRealization, cfg: &SystemConfig) -> Sinrs {
    let ps = cfg.q_peak / real.lambda_sp;
    let pr = cfg.q_peak / real.lambda_rp;
    let sr = g.sr * ps;
    let sd = g.sd * ps;
    Sinrs {
        gamma_sr1: cfg.a1 * sr / (cfg.a2 * sr + 1.0),
        gamma_sr2: cfg.a2 * sr,
        gamma_sd: cfg.a1 * sd / (cfg.a2 * sd + 1.0),
        gamma_rd: g.rd * pr,
    }
}

/// SINRs with transmit powers `Q/λ_sp` and `Q/λ_rp` and the configured
/// combiner applied to the per-antenna gains.
pub fn instantaneous_sinrs(real: &FadingRealization, cfg: &SystemConfig) -> Sinrs {
    sinrs_from(combine(real, cfg.combiner), real, cfg)
}

/// Slot-combined OMA quantity `Z = min(g_sr/λ_sp, g_sd/λ_sp + g_rd/λ_rp)`.
fn oma_z(g: CombinedGains, real: &FadingRealization) -> f64 {
    (g.sr / real.lambda_sp).min(g.sd / real.lambda_sp + g.rd / real.lambda_rp)
}

/// Per-trial accumulators for one combiner.
#[derive(Debug, Clone, Copy, Default)]
struct TrialStats {
    rate_s1: RunningStats,
    rate_s2: RunningStats,
    rate_sum: RunningStats,
    rate_oma: RunningStats,
    out_s1: RunningStats,
    out_s2: RunningStats,
    out_oma: RunningStats,
}

impl TrialStats {
    fn merge(&mut self, o: &Self) {
        self.rate_s1.merge(&o.rate_s1);
        self.rate_s2.merge(&o.rate_s2);
        self.rate_sum.merge(&o.rate_sum);
        self.rate_oma.merge(&o.rate_oma);
        self.out_s1.merge(&o.out_s1);
        self.out_s2.merge(&o.out_s2);
        self.out_oma.merge(&o.out_oma);
    }
}

#[derive(Debug, Clone, Copy)]
struct TrialRates {
    s1: f64,
    s2: f64,
    oma: f64,
}

fn record(
    stats: &mut TrialStats,
    g: CombinedGains,
    real: &FadingRealization,
    cfg: &SystemConfig,
    eps1: f64,
    eps2: f64,
) -> TrialRates {
    let s = sinrs_from(g, real, cfg);
    let q = cfg.q_peak;
    let r1 = 0.5 * s.gamma_sr1.min(s.gamma_sd).ln_1p() * LOG2_E;
    let r2 =
        0.5 * (q * (cfg.a2 * g.sr / real.lambda_sp).min(g.rd / real.lambda_rp)).ln_1p() * LOG2_E;
    let z = oma_z(g, real);
    let r_oma = 0.5 * (q * z).ln_1p() * LOG2_E;
    stats.rate_s1.push(r1);
    stats.rate_s2.push(r2);
    stats.rate_sum.push(r1 + r2);
    stats.rate_oma.push(r_oma);
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    stats
        .out_s1
        .push(indicator(s.gamma_sr1.min(s.gamma_sd) < eps1));
    let relay_misses_s1 = s.gamma_sr1 < eps1;
    let relay_misses_s2 = !relay_misses_s1 && s.gamma_sr2 < eps2;
    let destination_misses_s2 = !relay_misses_s1 && !relay_misses_s2 && s.gamma_rd < eps2;
    stats.out_s2.push(indicator(
        relay_misses_s1 || relay_misses_s2 || destination_misses_s2,
    ));
    stats.out_oma.push(indicator(q * z < eps1));
    TrialRates {
        s1: r1,
        s2: r2,
        oma: r_oma,
    }
}

#[derive(Debug, Clone, Default)]
struct BlockResult {
    per_combiner: Vec<TrialStats>,
    ordering_violations: u64,
}

fn run_blocks(cfg: &SystemConfig, combiners: &[Combiner], n_trials: u64, seed: u64) -> BlockResult {
    let th = thresholds_unchecked(cfg);
    let (eps1, eps2) = (th.eps1, th.eps2);
    let n_blocks = n_trials.div_ceil(BLOCK_TRIALS);
    let blocks: Vec<BlockResult> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_TRIALS.min(n_trials - b * BLOCK_TRIALS);
            let mut streams = LinkStreams::new(seed, b);
            let mut real = FadingRealization::with_antennas(cfg.n_r, cfg.n_d);
            let mut out = BlockResult {
                per_combiner: vec![TrialStats::default(); combiners.len()],
                ordering_violations: 0,
            };
            let mut previous: Vec<TrialRates> = Vec::with_capacity(combiners.len());
            for _ in 0..len {
                real.resample(cfg, &mut streams);
                previous.clear();
                for (stats, &c) in out.per_combiner.iter_mut().zip(combiners) {
                    previous.push(record(stats, combine(&real, c), &real, cfg, eps1, eps2));
                }
                let violated = previous
                    .windows(2)
                    .any(|w| w[1].s1 < w[0].s1 || w[1].s2 < w[0].s2 || w[1].oma < w[0].oma);
                out.ordering_violations += violated as u64;
            }
            out
        })
        .collect();
    let mut total = BlockResult {
        per_combiner: vec![TrialStats::default(); combiners.len()],
        ordering_violations: 0,
    };
    for b in &blocks {
        for (t, s) in total.per_combiner.iter_mut().zip(&b.per_combiner) {
            t.merge(s);
        }
        total.ordering_violations += b.ordering_violations;
    }
    total
}

/// Every Monte Carlo estimate for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSummary {
    pub rate_s1: McEstimate,
    pub rate_s2: McEstimate,
    pub rate_sum: McEstimate,
    pub rate_oma: McEstimate,
    pub outage_s1: McEstimate,
    pub outage_s2: McEstimate,
    pub outage_oma: McEstimate,
}

impl McSummary {
    fn from_stats(s: &TrialStats, seed: u64) -> Self {
        let rate = |r: &RunningStats| McEstimate {
            mean: r.mean(),
            std_err: r.std_err(),
            n_trials: r.count(),
            seed,
        };
        let prob = |r: &RunningStats| McEstimate {
            mean: r.mean(),
            std_err: r.binomial_std_err(),
            n_trials: r.count(),
            seed,
        };
        Self {
            rate_s1: rate(&s.rate_s1),
            rate_s2: rate(&s.rate_s2),
            rate_sum: rate(&s.rate_sum),
            rate_oma: rate(&s.rate_oma),
            outage_s1: prob(&s.out_s1),
            outage_s2: prob(&s.out_s2),
            outage_oma: prob(&s.out_oma),
        }
    }

    pub fn rate_report(&self, scheme: Scheme) -> RateReport {
        match scheme {
            Scheme::Noma => RateReport {
                c_s1: self.rate_s1.mean,
                c_s2: self.rate_s2.mean,
                c_sum: self.rate_sum.mean,
                method: Method::MonteCarlo,
                mc_std_err: Some(RateStdErr {
                    s1: self.rate_s1.std_err,
                    s2: self.rate_s2.std_err,
                    sum: self.rate_sum.std_err,
                }),
            },
            Scheme::Oma => RateReport {
                c_s1: self.rate_oma.mean,
                c_s2: 0.0,
                c_sum: self.rate_oma.mean,
                method: Method::MonteCarlo,
                mc_std_err: Some(RateStdErr {
                    s1: self.rate_oma.std_err,
                    s2: 0.0,
                    sum: self.rate_oma.std_err,
                }),
            },
        }
    }

    pub fn outage_report(&self, scheme: Scheme) -> OutageReport {
        let (a, b) = match scheme {
            Scheme::Noma => (self.outage_s1, self.outage_s2),
            Scheme::Oma => (self.outage_oma, self.outage_oma),
        };
        OutageReport {
            p_out_s1: a.mean,
            p_out_s2: b.mean,
            method: Method::MonteCarlo,
            std_err: Some((a.std_err, b.std_err)),
        }
    }
}

fn check_trials(n_trials: u64) -> Result<()> {
    if n_trials < MIN_TRIALS {
        return Err(Error::InvalidConfig(format!(
            "n_trials must be at least {MIN_TRIALS}, got {n_trials}"
        )));
    }
    Ok(())
}

/// Simulates rates and outages of both schemes for the configured combiner.
pub fn mc_evaluate(cfg: &SystemConfig, n_trials: u64, seed: u64) -> Result<McSummary> {
    cfg.validate()?;
    check_trials(n_trials)?;
    let r = run_blocks(cfg, &[cfg.combiner], n_trials, seed);
    Ok(McSummary::from_stats(&r.per_combiner[0], seed))
}

pub fn mc_rate(cfg: &SystemConfig, scheme: Scheme, n_trials: u64, seed: u64) -> Result<RateReport> {
    Ok(mc_evaluate(cfg, n_trials, seed)?.rate_report(scheme))
}

pub fn mc_outage(
    cfg: &SystemConfig,
    scheme: Scheme,
    n_trials: u64,
    seed: u64,
) -> Result<OutageReport> {
    Ok(mc_evaluate(cfg, n_trials, seed)?.outage_report(scheme))
}

/// Estimates for several combiners on shared realizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommonRandomNumbers {
    pub combiners: Vec<Combiner>,
    pub summaries: Vec<McSummary>,
    /// Trials in which some per-trial rate decreased along `combiners`.
    pub ordering_violations: u64,
}

/// Simulates the given combiners on the same antenna realizations, counting
/// trials where a later combiner's rate falls below an earlier one's.
pub fn mc_common_random_numbers(
    cfg: &SystemConfig,
    combiners: &[Combiner],
    n_trials: u64,
    seed: u64,
) -> Result<CommonRandomNumbers> {
    // SINGLE reads the first branch of each receiver, so only the shared
    // antenna layout needs to be valid.
    SystemConfig {
        combiner: Combiner::Mrc,
        ..*cfg
    }
    .validate()?;
    check_trials(n_trials)?;
    let r = run_blocks(cfg, combiners, n_trials, seed);
    Ok(CommonRandomNumbers {
        combiners: combiners.to_vec(),
        summaries: r
            .per_combiner
            .iter()
            .map(|s| McSummary::from_stats(s, seed))
            .collect(),
        ordering_violations: r.ordering_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use proptest::prelude::*;

    fn unit_realization(n_r: u32, n_d: u32) -> FadingRealization {
        FadingRealization {
            lambda_sp: 1.0,
            lambda_rp: 1.0,
            gains_sr: vec![1.0; n_r as usize],
            gains_sd: vec![1.0; n_d as usize],
            gains_rd: vec![1.0; n_d as usize],
        }
    }

    #[test]
    fn sinr_examples() {
        let cfg = SystemConfig::reference().with_q(1.0);
        let s = instantaneous_sinrs(&unit_realization(1, 1), &cfg);
        assert!((s.gamma_sr1 - 2.0 / 3.0).abs() < 1e-15);

        let mut cfg = SystemConfig::reference().with_q(7.0);
        cfg.a2 = 0.0;
        cfg.a1 = 0.8;
        let mut real = unit_realization(1, 1);
        real.gains_sr[0] = 2.5;
        real.lambda_sp = 0.5;
        let s = instantaneous_sinrs(&real, &cfg);
        assert_eq!(s.gamma_sr1, 2.5 * 7.0 * 0.8 / 0.5);
    }

    #[test]
    fn running_stats_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut all = RunningStats::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = RunningStats::default();
        let mut b = RunningStats::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count(), all.count());
        assert!((a.mean() - all.mean()).abs() < 1e-12);
        assert!((a.sample_variance() - all.sample_variance()).abs() < 1e-9);
    }

    #[test]
    fn deterministic_for_seed_and_independent_of_workers() {
        let cfg = SystemConfig::reference().with_q(10.0);
        let a = mc_evaluate(&cfg, 50_000, 7).unwrap();
        let b = mc_evaluate(&cfg, 50_000, 7).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool.install(|| mc_evaluate(&cfg, 50_000, 7).unwrap());
        assert_eq!(a, c);
        let d = mc_evaluate(&cfg, 50_000, 8).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> =
            (0..1000).map(|i| derive_seed(2024, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }

    #[test]
    fn too_few_trials_rejected() {
        let cfg = SystemConfig::reference();
        assert!(matches!(
            mc_evaluate(&cfg, 999, 1),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn single_antenna_matches_closed_forms() {
        let cfg = SystemConfig::reference().with_q(100.0);
        let mc = mc_evaluate(&cfg, 400_000, 11).unwrap();
        let p1 = analytic::outage_s1(&cfg).unwrap();
        let p2 = analytic::outage_s2(&cfg).unwrap();
        assert!((mc.outage_s1.mean - p1).abs() < 4.0 * mc.outage_s1.std_err);
        assert!((mc.outage_s2.mean - p2).abs() < 4.0 * mc.outage_s2.std_err);
        let r = analytic::rates(&cfg).unwrap();
        assert!((mc.rate_sum.mean - r.c_sum).abs() < 4.0 * mc.rate_sum.std_err);
    }

    #[test]
    fn infeasible_split_always_fails() {
        let cfg = SystemConfig::reference().with_a2(0.3).with_q(1e4);
        let mc = mc_evaluate(&cfg, 5000, 3).unwrap();
        assert_eq!(mc.outage_s1.mean, 1.0);
        assert_eq!(mc.outage_s2.mean, 1.0);
    }

    #[test]
    fn zero_target_rate_never_fails_s1() {
        let mut cfg = SystemConfig::reference().with_q(1.0);
        cfg.r1 = 1e-9;
        let mc = mc_evaluate(&cfg, 5000, 3).unwrap();
        assert!(mc.outage_s1.mean < 1e-3);
    }

    #[test]
    fn oma_wins_at_low_power() {
        let cfg = SystemConfig::reference().with_q(0.1);
        let mc = mc_evaluate(&cfg, 200_000, 5).unwrap();
        assert!(mc.rate_oma.mean > mc.rate_sum.mean);
    }

    #[test]
    fn combiners_ordered_on_shared_realizations() {
        let cfg = SystemConfig::reference()
            .with_antennas(2, 3, Combiner::Mrc)
            .with_q(10.0);
        let r = mc_common_random_numbers(&cfg, &Combiner::ALL, 20_000, 9).unwrap();
        assert_eq!(r.ordering_violations, 0);
        assert!(r.summaries[2].rate_sum.mean >= r.summaries[1].rate_sum.mean);
    }

    #[test]
    fn std_err_halves_when_trials_quadruple() {
        let cfg = SystemConfig::reference().with_q(10.0);
        let a = mc_evaluate(&cfg, 25_000, 21).unwrap();
        let b = mc_evaluate(&cfg, 100_000, 21).unwrap();
        let ratio = a.rate_sum.std_err / b.rate_sum.std_err;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sum_dominates_max_dominates_first(
            gains in proptest::collection::vec(0.0f64..20.0, 9),
            lsp in 0.01f64..10.0, lrp in 0.01f64..10.0, q_db in -10.0f64..40.0
        ) {
            let real = FadingRealization {
                lambda_sp: lsp,
                lambda_rp: lrp,
                gains_sr: gains[..3].to_vec(),
                gains_sd: gains[3..6].to_vec(),
                gains_rd: gains[6..].to_vec(),
            };
            let base = SystemConfig::reference().with_q_db(q_db).with_antennas(3, 3, Combiner::Single);
            let s: Vec<Sinrs> = Combiner::ALL
                .iter()
                .map(|&c| instantaneous_sinrs(&real, &SystemConfig { combiner: c, ..base }))
                .collect();
            for w in s.windows(2) {
                prop_assert!(w[1].gamma_sd >= w[0].gamma_sd);
                prop_assert!(w[1].gamma_sr1 >= w[0].gamma_sr1);
                prop_assert!(w[1].gamma_rd >= w[0].gamma_rd);
            }
        }
    }
}
