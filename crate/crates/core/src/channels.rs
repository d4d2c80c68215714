//! Distributions of link gains and of gain-to-interference ratios, and the
//! per-trial fading sampler.
//!
//! Every squared gain is exponential. A receiver with `n` antennas sees either
//! the largest of `n` exponentials (selection combining) or their sum, which is
//! Gamma distributed (maximal-ratio combining). Transmit powers scale as
//! `Q / λ` with `λ` an exponential interference-link gain, so the quantities
//! that matter are ratios `w · gain / λ`.

use serde::Serialize;

use crate::model::{binomial, factorial, Combiner, SystemConfig};
use crate::rng::{LinkClass, LinkStreams};
use crate::specfun::gauss_2f1;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GainFamily {
    Exp,
    MaxOfExp,
    Gamma,
}

/// Distribution of a combined squared gain built from `order` i.i.d.
/// exponentials of mean `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkGainDistribution {
    pub family: GainFamily,
    pub scale: f64,
    pub order: u32,
}

impl LinkGainDistribution {
    pub fn exp(scale: f64) -> Self {
        Self {
            family: GainFamily::Exp,
            scale,
            order: 1,
        }
    }

    pub fn max_of_exp(order: u32, scale: f64) -> Self {
        Self {
            family: GainFamily::MaxOfExp,
            scale,
            order,
        }
    }

    pub fn gamma(order: u32, scale: f64) -> Self {
        Self {
            family: GainFamily::Gamma,
            scale,
            order,
        }
    }

    /// Effective gain of `order` antennas under the given combiner.
    pub fn combined(combiner: Combiner, order: u32, scale: f64) -> Self {
        match combiner {
            Combiner::Single => Self::exp(scale),
            Combiner::Sc => Self::max_of_exp(order, scale),
            Combiner::Mrc => Self::gamma(order, scale),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Domain(format!(
                "gain scale must be > 0, got {}",
                self.scale
            )));
        }
        if self.order == 0 || (self.family == GainFamily::Exp && self.order != 1) {
            return Err(Error::Domain(format!(
                "invalid order {} for {:?}",
                self.order, self.family
            )));
        }
        Ok(())
    }

    /// Family with `Exp` expressed as order-1 of the combining family.
    fn effective_family(&self) -> GainFamily {
        match self.family {
            GainFamily::Exp => GainFamily::MaxOfExp,
            f => f,
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(n, y)` for integer `n >= 1`.
fn gamma_p(n: u32, y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    if y < n as f64 + 1.0 {
        // e^{-y} y^n / n! Σ_k y^k / ((n+1)...(n+k))
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..10_000 {
            term *= y / (n as f64 + k as f64);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        (n as f64 * y.ln() - y - ln_factorial(n)).exp() * sum
    } else {
        1.0 - gamma_q_finite(n, y)
    }
}

/// `Q(n, y) = e^{-y} Σ_{μ<n} y^μ / μ!`.
fn gamma_q_finite(n: u32, y: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for mu in 1..n {
        term *= y / mu as f64;
        sum += term;
    }
    (-y).exp() * sum
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

pub fn gain_pdf(d: &LinkGainDistribution, x: f64) -> Result<f64> {
    d.validate()?;
    check_x(x)?;
    let y = x / d.scale;
    let n = d.order;
    Ok(match d.family {
        GainFamily::Exp => (-y).exp() / d.scale,
        GainFamily::MaxOfExp => {
            let one_minus = -(-y).exp_m1();
            n as f64 * one_minus.powi(n as i32 - 1) * (-y).exp() / d.scale
        }
        GainFamily::Gamma => {
            if n == 1 {
                (-y).exp() / d.scale
            } else if y == 0.0 {
                0.0
            } else {
                ((n - 1) as f64 * y.ln() - y - ln_factorial(n - 1)).exp() / d.scale
            }
        }
    })
}

pub fn gain_cdf(d: &LinkGainDistribution, x: f64) -> Result<f64> {
    d.validate()?;
    check_x(x)?;
    let y = x / d.scale;
    Ok(match d.family {
        GainFamily::Exp => -(-y).exp_m1(),
        GainFamily::MaxOfExp => (-(-y).exp_m1()).powi(d.order as i32),
        GainFamily::Gamma => gamma_p(d.order, y),
    })
}

/// Numerator of a ratio: a single combined gain or the minimum of two
/// independent combined gains sharing the same interference denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Numerator {
    Single(LinkGainDistribution),
    MinPair(LinkGainDistribution, LinkGainDistribution),
}

/// Distribution of `weight · numerator / λ` with `λ` exponential of mean
/// `denominator_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioDistribution {
    pub numerator: Numerator,
    pub weight: f64,
    pub denominator_scale: f64,
}

impl RatioDistribution {
    pub fn single(numerator: LinkGainDistribution, weight: f64, denominator_scale: f64) -> Self {
        Self {
            numerator: Numerator::Single(numerator),
            weight,
            denominator_scale,
        }
    }

    pub fn min_pair(
        first: LinkGainDistribution,
        second: LinkGainDistribution,
        denominator_scale: f64,
    ) -> Self {
        Self {
            numerator: Numerator::MinPair(first, second),
            weight: 1.0,
            denominator_scale,
        }
    }

    /// `min(g_sr, g_sd) / λ_sp`: the quantity that decides s1 decoding.
    pub fn first_symbol(cfg: &SystemConfig) -> Self {
        Self::min_pair(
            LinkGainDistribution::combined(cfg.combiner, cfg.n_r, cfg.omega_sr),
            LinkGainDistribution::combined(cfg.combiner, cfg.n_d, cfg.omega_sd),
            cfg.omega_sp,
        )
    }

    /// `a2 g_sr / λ_sp`: first hop of s2.
    pub fn relay_hop(cfg: &SystemConfig) -> Self {
        Self::single(
            LinkGainDistribution::combined(cfg.combiner, cfg.n_r, cfg.omega_sr),
            cfg.a2,
            cfg.omega_sp,
        )
    }

    /// `g_rd / λ_rp`: second hop of s2.
    pub fn destination_hop(cfg: &SystemConfig) -> Self {
        Self::single(
            LinkGainDistribution::combined(cfg.combiner, cfg.n_d, cfg.omega_rd),
            1.0,
            cfg.omega_rp,
        )
    }

    fn validate(&self) -> Result<()> {
        if !(self.weight > 0.0 && self.weight.is_finite()) {
            return Err(Error::Domain(format!(
                "ratio weight must be > 0, got {}",
                self.weight
            )));
        }
        if !(self.denominator_scale > 0.0 && self.denominator_scale.is_finite()) {
            return Err(Error::Domain(format!(
                "denominator scale must be > 0, got {}",
                self.denominator_scale
            )));
        }
        match self.numerator {
            Numerator::Single(d) => d.validate(),
            Numerator::MinPair(a, b) => {
                a.validate()?;
                b.validate()?;
                let (fa, fb) = (a.effective_family(), b.effective_family());
                let compatible =
                    fa == fb || a.family == GainFamily::Exp || b.family == GainFamily::Exp;
                if !compatible {
                    return Err(Error::Domain(
                        "min of mixed combining families is not supported".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Numerator family for a pair, `Exp` adopting the partner's family.
    fn pair_family(a: &LinkGainDistribution, b: &LinkGainDistribution) -> GainFamily {
        match (a.family, b.family) {
            (GainFamily::Exp, GainFamily::Exp) => GainFamily::Exp,
            (GainFamily::Exp, f) | (f, GainFamily::Exp) => f,
            (f, _) => f,
        }
    }
}

/// Selection combining: `F(x) = n! (cx)^n / Π_{k=1..n} (1 + k c x)`.
fn max_ratio_cdf(n: u32, c: f64, x: f64) -> f64 {
    let cx = c * x;
    let mut f = 1.0;
    for k in 1..=n {
        f *= k as f64 * cx / (1.0 + k as f64 * cx);
    }
    f
}

fn max_ratio_survival(n: u32, c: f64, x: f64) -> f64 {
    let cx = c * x;
    if cx <= 1.0 {
        return 1.0 - max_ratio_cdf(n, c, x);
    }
    (1..=n)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial(n, k) / (1.0 + k as f64 * cx)
        })
        .sum()
}

fn max_ratio_pdf(n: u32, c: f64, x: f64) -> f64 {
    let cx = c * x;
    let mut prod = 1.0;
    let mut sum = 0.0;
    for k in 1..=n {
        let d = 1.0 + k as f64 * cx;
        prod *= k as f64 / d;
        sum += 1.0 / d;
    }
    let power = if n == 1 { 1.0 } else { cx.powi(n as i32 - 1) };
    prod * power * c * sum
}

/// Maximal-ratio combining: `F(x) = (cx)^n 2F1(n+1, n; n+1; -cx)`.
fn gamma_ratio_cdf(n: u32, c: f64, x: f64) -> Result<f64> {
    let cx = c * x;
    if cx == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(cx.powi(n as i32) * gauss_2f1(nf + 1.0, nf, nf + 1.0, -cx)?)
}

fn gamma_ratio_survival(n: u32, c: f64, x: f64) -> f64 {
    let cx = c * x;
    -(n as f64 * (-1.0 / (1.0 + cx)).ln_1p()).exp_m1()
}

fn gamma_ratio_pdf(n: u32, c: f64, x: f64) -> f64 {
    let cx = c * x;
    let power = if n == 1 { 1.0 } else { cx.powi(n as i32 - 1) };
    n as f64 * c * power / (1.0 + cx).powi(n as i32 + 1)
}

/// Inverse scale `c` of the ratio `w·g/λ`, i.e. `Ω_den / (w Ω_num)`.
fn ratio_rate(r: &RatioDistribution, d: &LinkGainDistribution) -> f64 {
    r.denominator_scale / (r.weight * d.scale)
}

pub fn ratio_pdf(r: &RatioDistribution, x: f64) -> Result<f64> {
    r.validate()?;
    check_x(x)?;
    match r.numerator {
        Numerator::Single(d) => {
            let c = ratio_rate(r, &d);
            Ok(match d.effective_family() {
                GainFamily::Gamma => gamma_ratio_pdf(d.order, c, x),
                _ => max_ratio_pdf(d.order, c, x),
            })
        }
        Numerator::MinPair(a, b) => {
            let scale = r.denominator_scale / r.weight;
            Ok(match RatioDistribution::pair_family(&a, &b) {
                GainFamily::Gamma => min_gamma_pdf(&a, &b, scale, x),
                _ => min_max_pdf(&a, &b, scale, x),
            })
        }
    }
}

pub fn ratio_cdf(r: &RatioDistribution, x: f64) -> Result<f64> {
    r.validate()?;
    check_x(x)?;
    let v = match r.numerator {
        Numerator::Single(d) => {
            let c = ratio_rate(r, &d);
            match d.effective_family() {
                GainFamily::Gamma => gamma_ratio_cdf(d.order, c, x)?,
                _ => max_ratio_cdf(d.order, c, x),
            }
        }
        Numerator::MinPair(a, b) => {
            let scale = r.denominator_scale / r.weight;
            match RatioDistribution::pair_family(&a, &b) {
                GainFamily::Gamma => min_gamma_cdf(&a, &b, scale, x),
                _ => min_max_cdf(&a, &b, scale, x),
            }
        }
    };
    Ok(v.clamp(0.0, 1.0))
}

/// `1 - F(x)`, evaluated without cancellation in the upper tail.
pub fn ratio_survival(r: &RatioDistribution, x: f64) -> Result<f64> {
    r.validate()?;
    check_x(x)?;
    let v = match r.numerator {
        Numerator::Single(d) => {
            let c = ratio_rate(r, &d);
            match d.effective_family() {
                GainFamily::Gamma => gamma_ratio_survival(d.order, c, x),
                _ => max_ratio_survival(d.order, c, x),
            }
        }
        Numerator::MinPair(..) => 1.0 - ratio_cdf(r, x)?,
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Double alternating sum over `ξ_{k,j} = k/Ω_a + j/Ω_b` for the minimum of
/// two selection-combined gains.
fn min_max_terms(a: &LinkGainDistribution, b: &LinkGainDistribution) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for k in 1..=a.order {
        for j in 1..=b.order {
            let sign = if (k + j) % 2 == 0 { 1.0 } else { -1.0 };
            let xi = k as f64 / a.scale + j as f64 / b.scale;
            out.push((sign * binomial(a.order, k) * binomial(b.order, j), xi));
        }
    }
    out
}

fn min_max_cdf(a: &LinkGainDistribution, b: &LinkGainDistribution, scale: f64, x: f64) -> f64 {
    min_max_terms(a, b)
        .into_iter()
        .map(|(w, xi)| w * xi * scale * x / (1.0 + xi * scale * x))
        .sum()
}

fn min_max_pdf(a: &LinkGainDistribution, b: &LinkGainDistribution, scale: f64, x: f64) -> f64 {
    min_max_terms(a, b)
        .into_iter()
        .map(|(w, xi)| w * xi * scale / (1.0 + xi * scale * x).powi(2))
        .sum()
}

/// Terms of the minimum of two Gamma gains over an exponential: each term is
/// `coef · x^(m-1) (1 + φ s x)^-(m+1)` with `m = n_own + ν`.
fn min_gamma_terms(
    a: &LinkGainDistribution,
    b: &LinkGainDistribution,
    scale: f64,
) -> Vec<(f64, i32)> {
    let mut out = Vec::new();
    for (own, other) in [(a, b), (b, a)] {
        for nu in 0..other.order {
            let m = own.order + nu;
            let coef = factorial(m) / (factorial(own.order - 1) * factorial(nu))
                * scale.powi(m as i32)
                / (own.scale.powi(own.order as i32) * other.scale.powi(nu as i32));
            out.push((coef, m as i32));
        }
    }
    out
}

fn min_gamma_pdf(a: &LinkGainDistribution, b: &LinkGainDistribution, scale: f64, x: f64) -> f64 {
    let phi_s = (1.0 / a.scale + 1.0 / b.scale) * scale;
    min_gamma_terms(a, b, scale)
        .into_iter()
        .map(|(coef, m)| {
            let power = if m == 1 { 1.0 } else { x.powi(m - 1) };
            coef * power / (1.0 + phi_s * x).powi(m + 1)
        })
        .sum()
}

fn min_gamma_cdf(a: &LinkGainDistribution, b: &LinkGainDistribution, scale: f64, x: f64) -> f64 {
    let phi_s = (1.0 / a.scale + 1.0 / b.scale) * scale;
    let t = x / (1.0 + phi_s * x);
    min_gamma_terms(a, b, scale)
        .into_iter()
        .map(|(coef, m)| coef * t.powi(m) / m as f64)
        .sum()
}

/// Survival of the minimum of two independent ratios at `x`.
pub fn min_pair_survival(r1: &RatioDistribution, r2: &RatioDistribution, x: f64) -> Result<f64> {
    Ok(ratio_survival(r1, x)? * ratio_survival(r2, x)?)
}

/// One draw of every squared link gain in the network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FadingRealization {
    pub lambda_sp: f64,
    pub lambda_rp: f64,
    pub gains_sr: Vec<f64>,
    pub gains_sd: Vec<f64>,
    pub gains_rd: Vec<f64>,
}

impl FadingRealization {
    pub fn with_antennas(n_r: u32, n_d: u32) -> Self {
        Self {
            lambda_sp: 0.0,
            lambda_rp: 0.0,
            gains_sr: vec![0.0; n_r as usize],
            gains_sd: vec![0.0; n_d as usize],
            gains_rd: vec![0.0; n_d as usize],
        }
    }

    /// Overwrites every gain with a fresh draw.
    pub fn resample(&mut self, cfg: &SystemConfig, streams: &mut LinkStreams) {
        self.lambda_sp = streams.positive_exponential(LinkClass::SourcePrimary, cfg.omega_sp);
        self.lambda_rp = streams.positive_exponential(LinkClass::RelayPrimary, cfg.omega_rp);
        self.gains_sr.resize(cfg.n_r as usize, 0.0);
        self.gains_sd.resize(cfg.n_d as usize, 0.0);
        self.gains_rd.resize(cfg.n_d as usize, 0.0);
        for g in &mut self.gains_sr {
            *g = streams.exponential(LinkClass::SourceRelay, cfg.omega_sr);
        }
        for g in &mut self.gains_sd {
            *g = streams.exponential(LinkClass::SourceDestination, cfg.omega_sd);
        }
        for g in &mut self.gains_rd {
            *g = streams.exponential(LinkClass::RelayDestination, cfg.omega_rd);
        }
    }
}

pub fn sample_realization(cfg: &SystemConfig, streams: &mut LinkStreams) -> FadingRealization {
    let mut r = FadingRealization::with_antennas(cfg.n_r, cfg.n_d);
    r.resample(cfg, streams);
    r
}
