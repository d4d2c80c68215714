use crate::{Error, Result};

const MAX_TERMS: usize = 1_000_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= 1e-17 * sum.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { terms: MAX_TERMS })
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real `z <= 0`.
///
/// Arguments below `-1/2` are mapped into `[0, 1)` by a Pfaff transformation,
/// choosing the variant whose series terminates when one exists.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1 undefined for c = {c}")));
    }
    if !(z <= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "2F1 implemented for finite z <= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z >= -0.5 || is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return series(a, b, c, z);
    }
    let w = z / (z - 1.0);
    let one_minus_z = 1.0 - z;
    if is_nonpositive_integer(c - a) {
        Ok(one_minus_z.powf(-b) * series(c - a, b, c, w)?)
    } else {
        Ok(one_minus_z.powf(-a) * series(a, c - b, c, w)?)
    }
}
