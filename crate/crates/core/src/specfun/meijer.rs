use num_complex::Complex64;

use super::gamma::ln_gamma;
use crate::{Error, Result};

/// One gamma-ratio block `G^{m,n}_{p,q}` of a Mellin–Barnes kernel:
/// `Π_{j<m} Γ(b_j - s) Π_{j<n} Γ(1 - a_j + s) / (Π_{j>=m} Γ(1 - b_j + s) Π_{j>=n} Γ(a_j - s))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaBlock {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl GammaBlock {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if m > b.len() || n > a.len() {
            return Err(Error::Domain(format!(
                "need m <= q and n <= p, got m={m}, n={n}, p={}, q={}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite Meijer-G parameter".into()));
        }
        Ok(Self { m, n, a, b })
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    fn ln_kernel(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &b) in self.b.iter().enumerate() {
            if j < self.m {
                acc += ln_gamma(b - s);
            } else {
                acc -= ln_gamma(1.0 - b + s);
            }
        }
        for (j, &a) in self.a.iter().enumerate() {
            if j < self.n {
                acc += ln_gamma(1.0 - a + s);
            } else {
                acc -= ln_gamma(a - s);
            }
        }
        acc
    }

    /// Open interval of real contour abscissae separating the two pole families.
    fn strip(&self) -> (f64, f64) {
        let left = self.a[..self.n]
            .iter()
            .map(|a| a - 1.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let right = self.b[..self.m]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        (left, right)
    }

    /// Exponential decay rate (in units of π) of the kernel along the contour.
    fn decay(&self) -> f64 {
        (self.m + self.n) as f64 - 0.5 * (self.p() + self.q()) as f64
    }
}

/// Parameters of a univariate Meijer G-function `G^{m,n}_{p,q}(z | a; b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub block: GammaBlock,
    pub z: f64,
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>, z: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::Domain(format!(
                "Meijer-G argument must be > 0, got {z}"
            )));
        }
        Ok(Self {
            block: GammaBlock::new(m, n, a, b)?,
            z,
        })
    }

    /// `G^{2,3}_{3,3}(z | 1-σ, 1, 1; 1, 1, 0)`, which equals
    /// `Γ(σ+1) ∫₀^∞ ln(1+zu) u^(σ-1) (1+u)^(-σ-1) du`.
    pub fn log_moment(sigma: f64, z: f64) -> Result<Self> {
        Self::new(2, 3, vec![1.0 - sigma, 1.0, 1.0], vec![1.0, 1.0, 0.0], z)
    }

    /// `G^{1,2}_{2,2}(z | 1, 1; 1, 0) = ln(1+z)`.
    pub fn log1p(z: f64) -> Result<Self> {
        Self::new(1, 2, vec![1.0, 1.0], vec![1.0, 0.0], z)
    }
}

const PEAK_CUTOFF: f64 = 1e-18;
const MAX_HALVINGS: usize = 14;
const MAX_LINE_POINTS: usize = 2_000_000;

fn contour_abscissa(block: &GammaBlock) -> Result<f64> {
    let (left, right) = block.strip();
    if left >= right {
        return Err(Error::Contour(format!(
            "poles not separable: left family reaches {left}, right family starts at {right}"
        )));
    }
    Ok(match (left.is_finite(), right.is_finite()) {
        (true, true) => 0.5 * (left + right),
        (true, false) => left + 0.5,
        (false, true) => right - 0.5,
        (false, false) => 0.0,
    })
}

/// Samples `f(k h)` for k = 0, 1, ... until the magnitude has dropped below
/// `PEAK_CUTOFF` times the running peak for a few consecutive points.
fn sample_half_line<F: FnMut(f64) -> Complex64>(
    mut f: F,
    h: f64,
    min_extent: f64,
) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    let mut peak = 0.0f64;
    let mut quiet = 0;
    loop {
        let y = out.len() as f64 * h;
        let v = f(y);
        let mag = if v.is_finite() { v.norm() } else { 0.0 };
        let v = if v.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        };
        peak = peak.max(mag);
        out.push(v);
        if y >= min_extent && mag <= PEAK_CUTOFF * peak {
            quiet += 1;
            if quiet >= 3 {
                return Ok(out);
            }
        } else {
            quiet = 0;
        }
        if out.len() > MAX_LINE_POINTS {
            return Err(Error::NonConvergence { terms: out.len() });
        }
    }
}

fn converged(prev: f64, next: f64, abs_scale: f64) -> bool {
    let diff = (next - prev).abs();
    diff <= 1e-13 * next.abs() || diff <= 1e-15 * abs_scale
}

/// Meijer G-function of a positive real argument by Mellin–Barnes quadrature.
pub fn meijer_g(spec: &MeijerGSpec) -> Result<f64> {
    let block = &spec.block;
    if block.decay() <= 0.0 {
        return Err(Error::Contour(format!(
            "kernel does not decay along the contour (m+n-(p+q)/2 = {})",
            block.decay()
        )));
    }
    let c = contour_abscissa(block)?;
    let ln_z = spec.z.ln();
    let kernel = |y: f64| {
        let s = Complex64::new(c, y);
        (block.ln_kernel(s) + s * ln_z).exp()
    };
    let min_extent = 1.0;
    let mut h = 0.5;
    let mut prev: Option<f64> = None;
    for _ in 0..MAX_HALVINGS {
        let samples = sample_half_line(kernel, h, min_extent)?;
        let mut sum = samples[0].re;
        let mut abs_sum = samples[0].norm();
        for v in &samples[1..] {
            sum += 2.0 * v.re;
            abs_sum += 2.0 * v.norm();
        }
        let value = h * sum / (2.0 * std::f64::consts::PI);
        let scale = h * abs_sum / (2.0 * std::f64::consts::PI);
        if let Some(p) = prev {
            if converged(p, value, scale) {
                return Ok(value);
            }
        }
        prev = Some(value);
        h *= 0.5;
    }
    Err(Error::NonConvergence {
        terms: (1usize << MAX_HALVINGS) * 16,
    })
}

/// Parameters of the extended generalized bivariate Meijer G-function
/// `G^{m1,n1:m2,n2:m3,n3}_{p1,q1:p2,q2:p3,q3}(joint | first | second | x, y)`,
/// i.e. `(2πi)^-2 ∫∫ K_joint(s+t) K_first(s) K_second(t) x^s y^t ds dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct EgbmgfSpec {
    pub joint: GammaBlock,
    pub first: GammaBlock,
    pub second: GammaBlock,
    pub x: f64,
    pub y: f64,
}

impl EgbmgfSpec {
    pub fn new(
        joint: GammaBlock,
        first: GammaBlock,
        second: GammaBlock,
        x: f64,
        y: f64,
    ) -> Result<Self> {
        for (name, v) in [("x", x), ("y", y)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "EGBMGF argument {name} must be > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            joint,
            first,
            second,
            x,
            y,
        })
    }

    /// The cross term of the maximal-ratio s2 rate, with `own` antennas on the
    /// branch carrying the logarithm's density and `other` antennas on the
    /// branch entering through its CDF:
    /// `G^{1,1:1,2:1,2}_{1,1:2,2:2,2}(1-own-other; 1-other | 1,1; 1,0 | -other, 1-other; 0, -other | x, y)`.
    ///
    /// It equals `Γ(own+1) Γ(other) ∫₀^∞ ln(1+xu) u^(own+other-1) (1+u)^(-own-1) (1+yu)^(-other) du`.
    pub fn min_cross_term(own: u32, other: u32, x: f64, y: f64) -> Result<Self> {
        let (no, nd) = (own as f64, other as f64);
        Self::new(
            GammaBlock::new(1, 1, vec![1.0 - no - nd], vec![1.0 - nd])?,
            GammaBlock::new(1, 2, vec![1.0, 1.0], vec![1.0, 0.0])?,
            GammaBlock::new(1, 2, vec![-nd, 1.0 - nd], vec![0.0, -nd])?,
            x,
            y,
        )
    }

    /// Contour abscissae `(c_s, c_t)` maximizing the smallest distance to any
    /// pole family of the three blocks, and that distance.
    fn contours(&self) -> Result<(f64, f64, f64)> {
        let (l1, r1) = self.joint.strip();
        let (l2, r2) = self.first.strip();
        let (l3, r3) = self.second.strip();
        let lo = if l2.is_finite() { l2 } else { r2 - 4.0 };
        let hi = if r2.is_finite() { r2 } else { l2 + 4.0 };
        if !(lo < hi) {
            return Err(Error::Contour("first block has no pole-free strip".into()));
        }
        let mut best: Option<(f64, f64, f64)> = None;
        const GRID: usize = 2000;
        for i in 1..GRID {
            let cs = lo + (hi - lo) * i as f64 / GRID as f64;
            let t_lo = l3.max(l1 - cs);
            let t_hi = r3.min(r1 - cs);
            if !(t_lo < t_hi) {
                continue;
            }
            let (ct, half) = match (t_lo.is_finite(), t_hi.is_finite()) {
                (true, true) => (0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo)),
                (true, false) => (t_lo + 0.5, 0.5),
                (false, true) => (t_hi - 0.5, 0.5),
                (false, false) => (0.0, 0.5),
            };
            let margin = half.min(cs - l2).min(r2 - cs);
            if best.is_none_or(|b| margin > b.2) {
                best = Some((cs, ct, margin));
            }
        }
        match best {
            Some(b) if b.2 > 0.0 => Ok(b),
            _ => Err(Error::Contour(
                "no pair of contours separates all pole families".into(),
            )),
        }
    }
}

/// Extended generalized bivariate Meijer G-function by a double
/// Mellin–Barnes trapezoid rule on a uniform grid.
pub fn egbmgf(spec: &EgbmgfSpec) -> Result<f64> {
    for (name, block) in [
        ("joint", &spec.joint),
        ("first", &spec.first),
        ("second", &spec.second),
    ] {
        if block.decay() <= 0.0 {
            return Err(Error::Contour(format!(
                "{name} block does not decay along the contour"
            )));
        }
    }
    let (cs, ct, _) = spec.contours()?;
    let (ln_x, ln_y) = (spec.x.ln(), spec.y.ln());
    let first = |u: f64| {
        let s = Complex64::new(cs, u);
        (spec.first.ln_kernel(s) + s * ln_x).exp()
    };
    let second = |v: f64| {
        let t = Complex64::new(ct, v);
        (spec.second.ln_kernel(t) + t * ln_y).exp()
    };
    let joint = |w: f64| spec.joint.ln_kernel(Complex64::new(cs + ct, w)).exp();

    let mut h = 0.5;
    let mut prev: Option<f64> = None;
    for _ in 0..MAX_HALVINGS {
        // First factor on u = i h for i in -nu..=nu, second on v = j h for j in 0..=nv.
        let up = sample_half_line(first, h, 1.0)?;
        let down = sample_half_line(|u| first(-u), h, 1.0)?;
        let b = sample_half_line(second, h, 1.0)?;
        let nu = up.len().max(down.len()) - 1;
        let nv = b.len() - 1;
        if (2 * nu + 1) * (nv + 1) > 200_000_000 {
            return Err(Error::NonConvergence {
                terms: (2 * nu + 1) * (nv + 1),
            });
        }
        let a: Vec<Complex64> = (0..=2 * nu)
            .map(|idx| {
                let i = idx as i64 - nu as i64;
                if i >= 0 {
                    up.get(i as usize).copied().unwrap_or_default()
                } else {
                    down.get((-i) as usize).copied().unwrap_or_default()
                }
            })
            .collect();
        // Joint factor indexed by i + j + nu in 0..=2nu+nv.
        let c: Vec<Complex64> = (0..=2 * nu + nv)
            .map(|k| joint((k as f64 - nu as f64) * h))
            .collect();
        let mut total = 0.0;
        let mut abs_total = 0.0;
        for (j, bj) in b.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            let mut row_abs = 0.0;
            for (idx, ai) in a.iter().enumerate() {
                let term = ai * c[idx + j];
                row += term;
                row_abs += term.norm();
            }
            let weight = if j == 0 { 1.0 } else { 2.0 };
            total += weight * (bj * row).re;
            abs_total += weight * bj.norm() * row_abs;
        }
        let norm = h * h / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
        let value = total * norm;
        let scale = abs_total * norm;
        if let Some(p) = prev {
            if converged(p, value, scale) {
                return Ok(value);
            }
        }
        prev = Some(value);
        h *= 0.5;
    }
    Err(Error::NonConvergence {
        terms: 1usize << MAX_HALVINGS,
    })
}
