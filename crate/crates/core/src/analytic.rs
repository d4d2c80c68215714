//! Closed-form average rates and outage probabilities.
//!
//! Single-antenna and selection-combining rates reduce to logarithms; the
//! maximal-ratio rates need Meijer-G functions. Expressions with removable
//! singularities (coinciding poles of a partial-fraction expansion) switch to
//! limit or divided-difference evaluation close to the singular set.

use std::f64::consts::LOG2_E;

use serde::Serialize;

use crate::model::{
    binomial, factorial, thresholds_unchecked, AsymptoticModel, Combiner, Method, SystemConfig,
};
use crate::quad_oracle::{quad_rate_s2, QuadratureSettings};
use crate::specfun::{egbmgf, gauss_2f1, meijer_g, pochhammer, EgbmgfSpec, MeijerGSpec};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateStdErr {
    pub s1: f64,
    pub s2: f64,
    pub sum: f64,
}

/// Per-symbol and sum rates in bits/s/Hz. For OMA the single symbol's rate is
/// carried in `c_s1` and `c_s2` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub c_s1: f64,
    pub c_s2: f64,
    pub c_sum: f64,
    pub method: Method,
    pub mc_std_err: Option<RateStdErr>,
}

impl RateReport {
    pub fn new(c_s1: f64, c_s2: f64, method: Method) -> Self {
        Self {
            c_s1,
            c_s2,
            c_sum: c_s1 + c_s2,
            method,
            mc_std_err: None,
        }
    }
}

/// Per-symbol outage probabilities. For OMA the single outage is carried in
/// `p_out_s1` and `p_out_s2` repeats it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageReport {
    pub p_out_s1: f64,
    pub p_out_s2: f64,
    pub method: Method,
    /// Standard errors of the two estimates (Monte Carlo only).
    pub std_err: Option<(f64, f64)>,
}

impl OutageReport {
    /// Confidence half-widths `z · std_err`.
    pub fn half_width(&self, z: f64) -> Option<(f64, f64)> {
        self.std_err.map(|(a, b)| (z * a, z * b))
    }
}

const LIMIT_BAND: f64 = 1e-9;
const SERIES_BAND: f64 = 1e-6;
/// Relative pole separation below which partial-fraction forms are replaced by
/// divided differences.
const PARTIAL_FRACTION_BAND: f64 = 1e-3;

/// `q log2(q/b) / (q - b)`, continuous through `q = b`.
fn log_ratio_term(q: f64, b: f64) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    let e = (q - b) / b;
    if e.abs() < LIMIT_BAND {
        LOG2_E
    } else if e.abs() < SERIES_BAND {
        LOG2_E * (1.0 + 0.5 * e)
    } else {
        q * (q / b).log2() / (q - b)
    }
}

/// `ln(1+e)/e`, analytic at 0.
fn log1p_over(e: f64) -> f64 {
    if e.abs() < 1e-5 {
        1.0 - e / 2.0 + e * e / 3.0 - e * e * e / 4.0
    } else {
        e.ln_1p() / e
    }
}

/// Divided difference of `log1p_over` at two points.
fn log1p_over_dd(ea: f64, eb: f64) -> f64 {
    if ea.abs().max(eb.abs()) < 1e-3 {
        // Coefficients of e^n in ln(1+e)/e are (-1)^n/(n+1); divided
        // differences of e^n are complete homogeneous sums.
        let mut total = 0.0;
        for n in 1..7 {
            let h: f64 = (0..n).map(|i| ea.powi(i) * eb.powi(n - 1 - i)).sum();
            let coef = if n % 2 == 1 { -1.0 } else { 1.0 } / (n as f64 + 1.0);
            total += coef * h;
        }
        total
    } else {
        (log1p_over(ea) - log1p_over(eb)) / (ea - eb)
    }
}

/// First divided difference of `ln` at `a, b > 0`.
fn ln_dd1(a: f64, b: f64) -> f64 {
    log1p_over(b / a - 1.0) / a
}

/// Second divided difference of `ln` at three positive points.
fn ln_dd2(p: [f64; 3]) -> f64 {
    let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    let &(i, j, k) = pairs
        .iter()
        .min_by(|x, y| (p[x.0] - p[x.1]).abs().total_cmp(&(p[y.0] - p[y.1]).abs()))
        .expect("three pairs");
    let r = p[i];
    log1p_over_dd(p[j] / r - 1.0, p[k] / r - 1.0) / (r * r)
}

/// `∫₀^∞ dx / ((x+p1)(x+p2)(x+p3))`.
fn cubic_reciprocal_integral(p: [f64; 3]) -> f64 {
    -ln_dd2(p)
}

fn min_relative_separation(p: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let s = (p[i] - p[j]).abs() / p[i].abs().max(p[j].abs());
            best = best.min(s);
        }
    }
    best
}

fn sign(n: u32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn rate_s1_single(cfg: &SystemConfig) -> f64 {
    let th = thresholds_unchecked(cfg);
    let b = th.phi * cfg.omega_sp;
    let q = cfg.q_peak;
    0.5 * (log_ratio_term(q, b) - log_ratio_term(cfg.a2 * q, b))
}

pub fn rate_s1_sc(cfg: &SystemConfig) -> f64 {
    let th = thresholds_unchecked(cfg);
    let q = cfg.q_peak;
    let mut total = 0.0;
    for k in 1..=cfg.n_r {
        for j in 1..=cfg.n_d {
            let b = th.xi(k, j) * cfg.omega_sp;
            let w = sign(k + j) * binomial(cfg.n_r, k) * binomial(cfg.n_d, j);
            total += w * (log_ratio_term(q, b) - log_ratio_term(cfg.a2 * q, b));
        }
    }
    0.5 * total
}

pub fn rate_s2_single(cfg: &SystemConfig) -> f64 {
    let (q, a2) = (cfg.q_peak, cfg.a2);
    if a2 == 0.0 {
        return 0.0;
    }
    let (sr, rd, sp, rp) = (cfg.omega_sr, cfg.omega_rd, cfg.omega_sp, cfg.omega_rp);
    let p = [a2 * sr / sp, rd / rp, 1.0 / q];
    if min_relative_separation(&p) >= PARTIAL_FRACTION_BAND {
        let bracket = rp * sp * (a2 * rp * sr / (rd * sp)).log2()
            + a2 * rp * sr * q * (rd * q / rp).log2()
            - rd * sp * q * (a2 * sr * q / sp).log2();
        let den = (rd * sp - a2 * rp * sr) * (rd * q - rp) * (sp - a2 * sr * q);
        0.5 * a2 * rd * sr * q * bracket / den
    } else {
        0.5 * LOG2_E * p[0] * p[1] * cubic_reciprocal_integral(p)
    }
}

pub fn rate_s2_sc(cfg: &SystemConfig) -> f64 {
    let (q, a2) = (cfg.q_peak, cfg.a2);
    if a2 == 0.0 {
        return 0.0;
    }
    let (sr, rd, sp, rp) = (cfg.omega_sr, cfg.omega_rd, cfg.omega_sp, cfg.omega_rp);
    let (nr, nd) = (cfg.n_r, cfg.n_d);

    // Single sums, in natural-log units and already multiplied by Q.
    let single = |p: f64| q * p * log1p_over(q * p - 1.0);
    let mut total = 0.0;
    for k in 1..=nr {
        total += sign(k - 1) * binomial(nr, k) * single(a2 * sr / (k as f64 * sp));
    }
    for j in 1..=nd {
        total += sign(j - 1) * binomial(nd, j) * single(rd / (j as f64 * rp));
    }

    for k in 1..=nr {
        for j in 1..=nd {
            let (kf, jf) = (k as f64, j as f64);
            let p = [a2 * sr / (kf * sp), rd / (jf * rp), 1.0 / q];
            let pair = if min_relative_separation(&p) >= PARTIAL_FRACTION_BAND {
                let common = kf * rd * sp - jf * a2 * rp * sr;
                let t1 =
                    kf * rd * rd * sp * (jf * rp / (q * rd)).ln() / (common * (q * rd - jf * rp));
                let t2 = jf * a2 * a2 * rp * sr * sr * (a2 * q * sr / (kf * sp)).ln()
                    / (common * (a2 * q * sr - kf * sp));
                q * (t1 + t2)
            } else {
                let d0 = cubic_reciprocal_integral(p);
                -((p[0] + p[1]) * (ln_dd1(p[0], p[1]) - p[2] * d0) + p[0] * p[1] * d0)
            };
            total += sign(k + j) * binomial(nr, k) * binomial(nd, j) * pair;
        }
    }
    0.5 * LOG2_E * total
}

fn log_moment(sigma: u32, z: f64) -> Result<f64> {
    meijer_g(&MeijerGSpec::log_moment(sigma as f64, z)?)
}

pub fn rate_s1_mrc(cfg: &SystemConfig) -> Result<f64> {
    let th = thresholds_unchecked(cfg);
    let phi = th.phi;
    let z_hi = cfg.q_peak / (phi * cfg.omega_sp);
    let z_lo = cfg.a2 * z_hi;
    let mut total = 0.0;
    for (own_n, own_omega, other_n, other_omega) in [
        (cfg.n_r, cfg.omega_sr, cfg.n_d, cfg.omega_sd),
        (cfg.n_d, cfg.omega_sd, cfg.n_r, cfg.omega_sr),
    ] {
        let prefactor = 1.0 / (factorial(own_n - 1) * own_omega.powi(own_n as i32));
        let mut inner = 0.0;
        for nu in 0..other_n {
            let sigma = own_n + nu;
            let diff = log_moment(sigma, z_hi)? - log_moment(sigma, z_lo)?;
            inner += diff / (factorial(nu) * other_omega.powi(nu as i32) * phi.powi(sigma as i32));
        }
        total += prefactor * inner;
    }
    Ok(0.5 * LOG2_E * total)
}

/// Closed form of the maximal-ratio s2 rate; errors if a bivariate Meijer-G
/// evaluation fails.
pub fn rate_s2_mrc_closed(cfg: &SystemConfig) -> Result<f64> {
    let (q, a2) = (cfg.q_peak, cfg.a2);
    let (sr, rd, sp, rp) = (cfg.omega_sr, cfg.omega_rd, cfg.omega_sp, cfg.omega_rp);
    let (nr, nd) = (cfg.n_r, cfg.n_d);
    let gammas = factorial(nr - 1) * factorial(nd - 1);

    let i7 = nr as f64 / factorial(nr) * log_moment(nr, a2 * sr * q / sp)?;
    let i8 = nd as f64 / factorial(nd) * log_moment(nd, rd * q / rp)?;

    let y9 = a2 * sr * rp / (sp * rd);
    let g9 = egbmgf(&EgbmgfSpec::min_cross_term(nr, nd, q * a2 * sr / sp, y9)?)?;
    let i9 = y9.powi(nd as i32) / gammas * g9;

    let y10 = rd * sp / (a2 * sr * rp);
    let g10 = egbmgf(&EgbmgfSpec::min_cross_term(nd, nr, q * rd / rp, y10)?)?;
    let i10 = y10.powi(nr as i32) / gammas * g10;

    Ok(0.5 * LOG2_E * (i7 + i8 - i9 - i10))
}

/// Maximal-ratio s2 rate: closed form, or quadrature when the bivariate
/// Meijer-G evaluation does not converge.
pub fn rate_s2_mrc(cfg: &SystemConfig) -> Result<(f64, Method)> {
    match rate_s2_mrc_closed(cfg) {
        Ok(v) => Ok((v, Method::ClosedForm)),
        Err(_) => Ok((
            quad_rate_s2(cfg, &QuadratureSettings::default())?,
            Method::Quadrature,
        )),
    }
}

/// s1 rate for the configured combiner.
pub fn rate_s1(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    match cfg.combiner {
        Combiner::Single => Ok(rate_s1_single(cfg)),
        Combiner::Sc => Ok(rate_s1_sc(cfg)),
        Combiner::Mrc => rate_s1_mrc(cfg),
    }
}

/// s2 rate for the configured combiner and how it was obtained.
pub fn rate_s2(cfg: &SystemConfig) -> Result<(f64, Method)> {
    cfg.validate()?;
    match cfg.combiner {
        Combiner::Single => Ok((rate_s2_single(cfg), Method::ClosedForm)),
        Combiner::Sc => Ok((rate_s2_sc(cfg), Method::ClosedForm)),
        Combiner::Mrc => rate_s2_mrc(cfg),
    }
}

pub fn rates(cfg: &SystemConfig) -> Result<RateReport> {
    let s1 = rate_s1(cfg)?;
    let (s2, method) = rate_s2(cfg)?;
    Ok(RateReport::new(s1, s2, method))
}

fn outage_s1_single(cfg: &SystemConfig, theta1: f64, phi: f64) -> f64 {
    let v = phi * cfg.omega_sp * theta1;
    v / (1.0 + v)
}

fn outage_s1_sc(cfg: &SystemConfig, theta1: f64) -> f64 {
    let th = thresholds_unchecked(cfg);
    let mut total = 0.0;
    for k in 1..=cfg.n_r {
        for j in 1..=cfg.n_d {
            let v = th.xi(k, j) * cfg.omega_sp * theta1;
            total += sign(k + j) * binomial(cfg.n_d, j) * binomial(cfg.n_r, k) * v / (1.0 + v);
        }
    }
    total
}

fn outage_s1_mrc(cfg: &SystemConfig, theta1: f64, phi: f64) -> Result<f64> {
    let base = cfg.omega_sp * theta1;
    let z = -cfg.omega_sp * phi * theta1;
    let mut total = 0.0;
    for (own_n, own_omega, other_n, other_omega) in [
        (cfg.n_r, cfg.omega_sr, cfg.n_d, cfg.omega_sd),
        (cfg.n_d, cfg.omega_sd, cfg.n_r, cfg.omega_sr),
    ] {
        let mut inner = 0.0;
        for nu in 0..other_n {
            let m = (own_n + nu) as f64;
            inner += pochhammer(nu as f64 + 1.0, own_n) * base.powi((own_n + nu) as i32)
                / (other_omega.powi(nu as i32) * m)
                * gauss_2f1(m + 1.0, m, m + 1.0, z)?;
        }
        total += inner / (factorial(own_n - 1) * own_omega.powi(own_n as i32));
    }
    Ok(total)
}

fn outage_s2_single(cfg: &SystemConfig, theta: f64, eps2: f64) -> f64 {
    let (sr, rd, sp, rp, q) = (
        cfg.omega_sr,
        cfg.omega_rd,
        cfg.omega_sp,
        cfg.omega_rp,
        cfg.q_peak,
    );
    sp * theta / (sr + sp * theta) + eps2 * rp / (q * rd + eps2 * rp)
        - sp * rp * eps2 * theta / ((sr + sp * theta) * (rd * q + rp * eps2))
}

fn outage_s2_sc(cfg: &SystemConfig, theta: f64, eps2: f64) -> f64 {
    let (sr, rd, sp, rp, q) = (
        cfg.omega_sr,
        cfg.omega_rd,
        cfg.omega_sp,
        cfg.omega_rp,
        cfg.q_peak,
    );
    let (nr, nd) = (cfg.n_r, cfg.n_d);
    let mut total = 0.0;
    for k in 1..=nr {
        let kf = k as f64;
        total += binomial(nr, k) * sign(k - 1) * kf * sp * theta / (sr + kf * sp * theta);
    }
    for j in 1..=nd {
        let jf = j as f64;
        total += binomial(nd, j) * sign(j - 1) * jf * eps2 * rp / (q * rd + jf * eps2 * rp);
    }
    for k in 1..=nr {
        for j in 1..=nd {
            let (kf, jf) = (k as f64, j as f64);
            total -=
                binomial(nr, k) * binomial(nd, j) * sign(k + j) * kf * jf * sp * rp * eps2 * theta
                    / ((sr + kf * sp * theta) * (rd * q + jf * rp * eps2));
        }
    }
    total
}

fn outage_s2_mrc(cfg: &SystemConfig, theta: f64, eps2: f64) -> Result<f64> {
    let (nr, nd) = (cfg.n_r as f64, cfg.n_d as f64);
    let u = theta * cfg.omega_sp / cfg.omega_sr;
    let v = eps2 * cfg.omega_rp / (cfg.q_peak * cfg.omega_rd);
    let fr = u.powi(cfg.n_r as i32) * gauss_2f1(nr + 1.0, nr, nr + 1.0, -u)?;
    let fd = v.powi(cfg.n_d as i32) * gauss_2f1(nd + 1.0, nd, nd + 1.0, -v)?;
    Ok(fr + fd - fr * fd)
}

/// s1 outage for the configured combiner; exactly 1 when the power split
/// cannot support s1.
pub fn outage_s1(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let th = thresholds_unchecked(cfg);
    if !th.noma_feasible {
        return Ok(1.0);
    }
    let v = match cfg.combiner {
        Combiner::Single => outage_s1_single(cfg, th.theta1, th.phi),
        Combiner::Sc => outage_s1_sc(cfg, th.theta1),
        Combiner::Mrc => outage_s1_mrc(cfg, th.theta1, th.phi)?,
    };
    Ok(v.clamp(0.0, 1.0))
}

/// s2 outage for the configured combiner; exactly 1 when the power split
/// cannot support s1 (the relay never reaches s2).
pub fn outage_s2(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let th = thresholds_unchecked(cfg);
    if !th.noma_feasible {
        return Ok(1.0);
    }
    let v = match cfg.combiner {
        Combiner::Single => outage_s2_single(cfg, th.theta, th.eps2),
        Combiner::Sc => outage_s2_sc(cfg, th.theta, th.eps2),
        Combiner::Mrc => outage_s2_mrc(cfg, th.theta, th.eps2)?,
    };
    Ok(v.clamp(0.0, 1.0))
}

pub fn outages(cfg: &SystemConfig) -> Result<OutageReport> {
    Ok(OutageReport {
        p_out_s1: outage_s1(cfg)?,
        p_out_s2: outage_s2(cfg)?,
        method: Method::ClosedForm,
        std_err: None,
    })
}

pub fn asymptotic_model(cfg: &SystemConfig) -> Result<AsymptoticModel> {
    AsymptoticModel::new(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive_thresholds;
    use crate::Error;
    use proptest::prelude::*;

    fn reference() -> SystemConfig {
        SystemConfig::reference()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn log_ratio_term_is_continuous_at_its_pole() {
        let b = 6.05;
        let at = log_ratio_term(b, b);
        assert!((at - LOG2_E).abs() < 1e-15);
        for d in [1e-12, 1e-8, 1e-7, 1e-5, 1e-3] {
            for s in [-1.0, 1.0] {
                let q = b * (1.0 + s * d);
                let exact = LOG2_E * (q / b) * (q / b).ln() / (q / b - 1.0);
                assert!((log_ratio_term(q, b) - exact).abs() < 1e-11, "d={d}");
            }
        }
        assert_eq!(log_ratio_term(0.0, 1.0), 0.0);
    }

    #[test]
    fn divided_differences_of_log() {
        // Distinct points: direct formula.
        let p: [f64; 3] = [0.3, 1.7, 4.0];
        let direct = p[0].ln() / ((p[0] - p[1]) * (p[0] - p[2]))
            + p[1].ln() / ((p[1] - p[0]) * (p[1] - p[2]))
            + p[2].ln() / ((p[2] - p[0]) * (p[2] - p[1]));
        assert!(rel(ln_dd2(p), direct) < 1e-13);
        // Confluent limits: f''/2 = -1/(2x^2) and f'[a,b] at a = b.
        assert!(rel(ln_dd2([2.0, 2.0, 2.0]), -0.125) < 1e-14);
        assert!(rel(ln_dd1(3.0, 3.0), 1.0 / 3.0) < 1e-15);
        // Two coincident points: (f'(a) - f[a,c]) / (a - c).
        let (a, c) = (1.5f64, 5.0f64);
        let want = (1.0 / a - (a.ln() - c.ln()) / (a - c)) / (a - c);
        assert!(rel(ln_dd2([a, a * (1.0 + 1e-12), c]), want) < 1e-9);
    }

    #[test]
    fn cubic_integral_matches_quadrature() {
        use crate::quadrature::integrate_semi_infinite;
        let s = QuadratureSettings::default();
        for p in [
            [0.3, 1.7, 4.0],
            [1.0, 1.0 + 1e-7, 0.5],
            [2.0, 2.0, 2.0],
            [1e-4, 0.36, 1.8],
        ] {
            let q = integrate_semi_infinite(|x| 1.0 / ((x + p[0]) * (x + p[1]) * (x + p[2])), &s)
                .unwrap()
                .value;
            assert!(rel(cubic_reciprocal_integral(p), q) < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn s1_rate_vanishes_without_power() {
        let cfg = reference().with_q(1e-4);
        assert!(rate_s1_single(&cfg) < 1e-3);
    }

    #[test]
    fn s1_rate_is_continuous_across_its_pole() {
        let q0 = 1.1 * 5.5;
        let at = rate_s1_single(&reference().with_q(q0));
        assert!(at.is_finite());
        for dq in [-1e-6, 1e-6] {
            let near = rate_s1_single(&reference().with_q(q0 + dq));
            assert!((near - at).abs() < 1e-6);
        }
    }

    #[test]
    fn s2_rate_vanishes_without_power() {
        // Frozen from an independent adaptive quadrature of the survival form.
        let cfg = reference().with_a2(1e-5).with_q(10.0);
        assert!(rel(rate_s2_single(&cfg), 1.107_641_758_807e-3) < 1e-9);
        let smaller = reference().with_a2(1e-6).with_q(10.0);
        assert!(rate_s2_single(&smaller) < 1e-3);
        assert!(rate_s2_single(&reference().with_a2(1e-9).with_q(10.0)) < 1e-6);
    }

    #[test]
    fn s2_rate_printed_and_stable_forms_agree() {
        // Away from degeneracy both evaluations are valid.
        let cfg = reference();
        let p = [0.2 * 10.0 / 5.5, 10.0 / 5.5, 0.1];
        let stable = 0.5 * LOG2_E * p[0] * p[1] * cubic_reciprocal_integral(p);
        assert!(rel(rate_s2_single(&cfg), stable) < 1e-12);
    }

    #[test]
    fn s2_rate_is_continuous_at_degenerate_points() {
        // Ω_sp = a2 Ω_sr Q at Q = 2.75; Ω_rd Q = Ω_rp at Q = 0.55.
        for q0 in [2.75, 0.55] {
            let at = rate_s2_single(&reference().with_q(q0));
            for d in [1e-10, 1e-7, 1e-4, 2e-3] {
                let near = rate_s2_single(&reference().with_q(q0 * (1.0 + d)));
                assert!((near - at).abs() < 3.0 * d * at + 1e-12, "q0={q0} d={d}");
            }
        }
        // All three poles coincide: a2 Ω_sr / Ω_sp = Ω_rd / Ω_rp = 1/Q.
        let mut cfg = reference().with_q(1.0);
        cfg.omega_rp = 10.0;
        cfg.omega_sp = 2.0;
        assert!(rate_s2_single(&cfg).is_finite());
        assert!(rel(rate_s2_single(&cfg), 0.5 * LOG2_E * 0.5) < 1e-12);
    }

    #[test]
    fn sc_reduces_to_single_antenna() {
        for a2 in [0.01, 0.05, 0.1, 0.2, 0.24] {
            for q in [0.1, 1.0, 10.0, 100.0, 1e4] {
                let single = reference().with_a2(a2).with_q(q);
                let sc = single.with_antennas(1, 1, Combiner::Sc);
                assert!((rate_s1_sc(&sc) - rate_s1_single(&single)).abs() < 1e-9);
                assert!((rate_s2_sc(&sc) - rate_s2_single(&single)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sc_s2_stable_pair_matches_printed_pair() {
        // Force the divided-difference branch by comparing near a degenerate
        // Q with a slightly displaced evaluation in the printed branch.
        let cfg = reference().with_antennas(2, 2, Combiner::Sc);
        let q0 = 5.5 / (0.2 * 10.0); // a2 Ω_sr Q = Ω_sp for k = 1
        let inside = rate_s2_sc(&cfg.with_q(q0 * (1.0 + 1e-4)));
        let outside = rate_s2_sc(&cfg.with_q(q0 * (1.0 + 2e-3)));
        let at = rate_s2_sc(&cfg.with_q(q0));
        assert!((inside - at).abs() < 1e-4 * at);
        assert!((outside - at).abs() < 2e-3 * at);
    }

    #[test]
    fn mrc_reduces_to_single_antenna() {
        for a2 in [0.05, 0.2] {
            for q in [1.0, 10.0, 1e3] {
                let single = reference().with_a2(a2).with_q(q);
                let mrc = single.with_antennas(1, 1, Combiner::Mrc);
                assert!(rel(rate_s1_mrc(&mrc).unwrap(), rate_s1_single(&single)) < 1e-6);
                assert!(rel(rate_s2_mrc_closed(&mrc).unwrap(), rate_s2_single(&single)) < 1e-6);
            }
        }
    }

    #[test]
    fn rate_report_sums() {
        for c in [
            reference(),
            reference().with_antennas(2, 2, Combiner::Sc),
            reference().with_antennas(2, 3, Combiner::Mrc),
        ] {
            let r = rates(&c).unwrap();
            assert!((r.c_sum - (r.c_s1 + r.c_s2)).abs() < 1e-12);
            assert!(r.c_s1 >= 0.0 && r.c_s2 >= 0.0);
        }
    }

    #[test]
    fn outage_examples() {
        assert_eq!(outage_s1(&reference().with_a2(0.3)).unwrap(), 1.0);
        assert_eq!(outage_s2(&reference().with_a2(0.3)).unwrap(), 1.0);

        let cfg = reference().with_q(100.0);
        let p1 = outage_s1(&cfg).unwrap();
        assert!((p1 - 6.05 * 0.15 / (1.0 + 6.05 * 0.15)).abs() < 1e-14);
        assert!((p1 - 0.4758).abs() < 1e-4);

        let p2 = outage_s2(&cfg).unwrap();
        let want = 5.5 * 0.15 / (10.0 + 5.5 * 0.15) + 3.0 * 5.5 / (1000.0 + 16.5)
            - 5.5 * 5.5 * 3.0 * 0.15 / ((10.0 + 0.825) * (1000.0 + 16.5));
        assert!((p2 - want).abs() < 1e-14);
        assert!((p2 - 0.0913).abs() < 1e-3);

        assert!(outage_s2(&reference().with_q(1e6)).unwrap() < 1e-3);
    }

    #[test]
    fn outage_reductions() {
        for a2 in [0.05, 0.2] {
            for q in [0.5, 10.0, 1e4] {
                let single = reference().with_a2(a2).with_q(q);
                for c in [Combiner::Sc, Combiner::Mrc] {
                    let other = single.with_antennas(1, 1, c);
                    assert!(
                        (outage_s1(&other).unwrap() - outage_s1(&single).unwrap()).abs() < 1e-9
                    );
                    assert!(
                        (outage_s2(&other).unwrap() - outage_s2(&single).unwrap()).abs() < 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn mrc_outage_matches_collapsed_powers() {
        // 2F1(n+1, n; n+1; -z) = (1+z)^-n.
        let cfg = reference().with_antennas(3, 2, Combiner::Mrc).with_q(30.0);
        let th = derive_thresholds(&cfg).unwrap();
        let u = th.theta * 5.5 / 10.0;
        let v: f64 = 3.0 * 5.5 / (30.0 * 10.0);
        let fr = (u / (1.0 + u)).powi(3);
        let fd = (v / (1.0 + v)).powi(2);
        assert!((outage_s2(&cfg).unwrap() - (fr + fd - fr * fd)).abs() < 1e-12);
    }

    #[test]
    fn s1_outage_equals_ratio_cdf() {
        use crate::channels::{ratio_cdf, RatioDistribution};
        for (nr, nd, c) in [
            (1, 1, Combiner::Single),
            (2, 3, Combiner::Sc),
            (3, 2, Combiner::Mrc),
            (2, 2, Combiner::Mrc),
        ] {
            for q in [1.0, 10.0, 1e3] {
                let cfg = reference().with_antennas(nr, nd, c).with_q(q);
                let th = derive_thresholds(&cfg).unwrap();
                let want = ratio_cdf(&RatioDistribution::first_symbol(&cfg), th.theta1).unwrap();
                assert!(
                    (outage_s1(&cfg).unwrap() - want).abs() < 1e-12,
                    "{c} ({nr},{nd}) q={q}"
                );
            }
        }
    }

    #[test]
    fn asymptotic_model_examples() {
        let m = asymptotic_model(&reference()).unwrap();
        assert_eq!((m.decay_exponent_s1, m.decay_exponent_s2), (-1, -1));
        let m = asymptotic_model(&reference().with_antennas(3, 2, Combiner::Sc)).unwrap();
        assert_eq!((m.decay_exponent_s1, m.decay_exponent_s2), (-2, -2));
        assert!(matches!(
            asymptotic_model(&reference().with_a2(0.3)),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn more_antennas_help() {
        for q in [0.1, 1.0, 10.0, 100.0, 1e4] {
            let one = reference().with_antennas(1, 1, Combiner::Sc).with_q(q);
            let two = reference().with_antennas(2, 2, Combiner::Sc).with_q(q);
            assert!(rate_s1_sc(&two) >= rate_s1_sc(&one));
            assert!(rate_s2_sc(&two) >= rate_s2_sc(&one));
        }
    }

    #[test]
    fn mrc_dominates_sc() {
        for q in [0.1, 1.0, 10.0, 100.0, 1e4] {
            let sc = reference().with_antennas(2, 2, Combiner::Sc).with_q(q);
            let mrc = sc.with_antennas(2, 2, Combiner::Mrc);
            assert!(rate_s1_mrc(&mrc).unwrap() >= rate_s1_sc(&sc));
            assert!(rate_s2_mrc(&mrc).unwrap().0 >= rate_s2_sc(&sc));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn outage_in_unit_interval_and_nonincreasing_in_q(
            q_db in -10.0f64..60.0, step in 0.1f64..5.0, a2 in 0.01f64..0.24, idx in 0usize..5
        ) {
            let layouts = [(1, 1, Combiner::Single), (2, 2, Combiner::Sc), (2, 3, Combiner::Sc), (2, 2, Combiner::Mrc), (3, 2, Combiner::Mrc)];
            let (nr, nd, c) = layouts[idx];
            let lo = reference().with_antennas(nr, nd, c).with_a2(a2).with_q_db(q_db);
            let hi = lo.with_q_db(q_db + step);
            for f in [outage_s1, outage_s2] {
                let (a, b) = (f(&lo).unwrap(), f(&hi).unwrap());
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert!(b <= a + 1e-12);
            }
        }

        #[test]
        fn rates_nonnegative(q_db in -20.0f64..60.0, a2 in 0.01f64..0.24) {
            let cfg = reference().with_a2(a2).with_q_db(q_db);
            prop_assert!(rate_s1_single(&cfg) >= 0.0);
            prop_assert!(rate_s2_single(&cfg) >= 0.0);
            let sc = cfg.with_antennas(2, 3, Combiner::Sc);
            prop_assert!(rate_s1_sc(&sc) >= 0.0);
            prop_assert!(rate_s2_sc(&sc) >= -1e-12);
        }

        #[test]
        fn sc_reduction_holds_everywhere(q_db in -20.0f64..60.0, a2 in 0.01f64..0.24) {
            let single = reference().with_a2(a2).with_q_db(q_db);
            let sc = single.with_antennas(1, 1, Combiner::Sc);
            prop_assert!((rate_s1_sc(&sc) - rate_s1_single(&single)).abs() < 1e-9);
            prop_assert!((rate_s2_sc(&sc) - rate_s2_single(&single)).abs() < 1e-9);
        }
    }
}
