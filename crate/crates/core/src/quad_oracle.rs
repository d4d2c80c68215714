//! Direct numerical integration of the rate integrals over the exact
//! distributions of the decision ratios. Serves as the reference for the
//! closed forms.

use std::f64::consts::LOG2_E;

pub use crate::quadrature::{QuadResult, QuadratureSettings};

use crate::channels::{min_pair_survival, ratio_pdf, RatioDistribution};
use crate::model::SystemConfig;
use crate::quadrature::integrate_semi_infinite;
use crate::Result;

/// `0.5 ∫ log2((1+Qx)/(1+a2 Q x)) f_X(x) dx` with `X = min(g_sr, g_sd)/λ_sp`.
pub fn quad_rate_s1(cfg: &SystemConfig, settings: &QuadratureSettings) -> Result<f64> {
    Ok(quad_rate_s1_estimate(cfg, settings)?.value)
}

/// `quad_rate_s1` with the quadrature error estimate, both in bits/s/Hz.
pub fn quad_rate_s1_estimate(
    cfg: &SystemConfig,
    settings: &QuadratureSettings,
) -> Result<QuadResult> {
    let dist = RatioDistribution::first_symbol(cfg);
    let (q, a2) = (cfg.q_peak, cfg.a2);
    let mut failure = None;
    let r = integrate_semi_infinite(
        |x| {
            if x == 0.0 {
                return 0.0;
            }
            let gain = (q * x).ln_1p() - (a2 * q * x).ln_1p();
            match ratio_pdf(&dist, x) {
                Ok(p) => gain * p,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        settings,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    Ok(QuadResult {
        value: 0.5 * LOG2_E * r.value,
        error: 0.5 * LOG2_E * r.error,
        evaluations: r.evaluations,
    })
}

/// `(Q / (2 ln 2)) ∫ Pr(min(a2 g_sr/λ_sp, g_rd/λ_rp) > x) / (1+Qx) dx`.
pub fn quad_rate_s2(cfg: &SystemConfig, settings: &QuadratureSettings) -> Result<f64> {
    Ok(quad_rate_s2_estimate(cfg, settings)?.value)
}

/// `quad_rate_s2` with the quadrature error estimate, both in bits/s/Hz.
pub fn quad_rate_s2_estimate(
    cfg: &SystemConfig,
    settings: &QuadratureSettings,
) -> Result<QuadResult> {
    let first = RatioDistribution::relay_hop(cfg);
    let second = RatioDistribution::destination_hop(cfg);
    let q = cfg.q_peak;
    let mut failure = None;
    let r = integrate_semi_infinite(
        |x| match min_pair_survival(&first, &second, x) {
            Ok(s) => q * s / (1.0 + q * x),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        settings,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    Ok(QuadResult {
        value: 0.5 * LOG2_E * r.value,
        error: 0.5 * LOG2_E * r.error,
        evaluations: r.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Combiner;

    #[test]
    fn equal_split_gives_no_s1_rate() {
        let mut cfg = SystemConfig::reference();
        cfg.a2 = 1.0;
        cfg.a1 = 0.0;
        assert_eq!(
            quad_rate_s1(&cfg, &QuadratureSettings::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn s2_matches_elementary_single_antenna_integral() {
        // With exponential gains the survivals are rational:
        // S(x) = a2 Ω_sr / (a2 Ω_sr + Ω_sp x) · Ω_rd / (Ω_rd + Ω_rp x).
        let cfg = SystemConfig::reference().with_q(10.0);
        let s = QuadratureSettings::default();
        let direct = crate::quadrature::integrate_semi_infinite(
            |x| 10.0 / (1.0 + 10.0 * x) * 2.0 / (2.0 + 5.5 * x) * 10.0 / (10.0 + 5.5 * x),
            &s,
        )
        .unwrap()
        .value
            * 0.5
            * LOG2_E;
        assert!((quad_rate_s2(&cfg, &s).unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn rates_grow_with_power() {
        let s = QuadratureSettings::default();
        for c in [Combiner::Single, Combiner::Sc, Combiner::Mrc] {
            let n = if c == Combiner::Single { 1 } else { 2 };
            let lo = SystemConfig::reference().with_antennas(n, n, c).with_q(1.0);
            let hi = lo.with_q(100.0);
            assert!(quad_rate_s1(&hi, &s).unwrap() > quad_rate_s1(&lo, &s).unwrap());
            assert!(quad_rate_s2(&hi, &s).unwrap() > quad_rate_s2(&lo, &s).unwrap());
        }
    }
}
