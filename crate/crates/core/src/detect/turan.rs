//! Power-sum lower bounds: for z_1..z_N with |z_1| maximal, some k in
//! [M+1, M+N] has |sum z_i^k| >= 1.007 |z_1|^k (4e(1 + M/N))^{-N}.

use std::f64::consts::E;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const POWER_SUM_CONSTANT: f64 = 1.007;

/// ln of the floor factor 1.007 (4e(1 + M/N))^{-N}.
pub fn log_floor_factor(m: u64, n: usize) -> f64 {
    POWER_SUM_CONSTANT.ln() - n as f64 * (4.0 * E * (1.0 + m as f64 / n as f64)).ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct TuranOutcome {
    pub k_star: u64,
    pub achieved: f64,
    pub bound: f64,
    /// ln(achieved) - ln(bound); nonnegative when the inequality holds.
    pub log_slack: f64,
}

/// Scans k in [M+1, M+N] for the largest power sum and compares it with the
/// floor at that k. Sums are formed after dividing by the largest modulus so
/// that long ranges do not overflow.
pub fn turan_existence(z: &[Complex64], m: u64) -> Result<TuranOutcome> {
    if z.is_empty() {
        return Err(Error::usage("power sums need at least one number"));
    }
    let r = z.iter().map(|w| w.norm()).fold(0.0, f64::max);
    if r == 0.0 {
        return Ok(TuranOutcome {
            k_star: m + 1,
            achieved: 0.0,
            bound: 0.0,
            log_slack: 0.0,
        });
    }
    let scaled: Vec<Complex64> = z.iter().map(|w| w / r).collect();
    let n = z.len();
    let mut best = (m + 1, -1.0);
    for k in m + 1..=m + n as u64 {
        let e = i32::try_from(k).map_err(|_| Error::usage(format!("exponent {k} is too large")))?;
        let s: Complex64 = scaled.iter().map(|w| w.powi(e)).sum();
        if s.norm() > best.1 {
            best = (k, s.norm());
        }
    }
    let (k_star, scaled_sum) = best;
    let log_scale = k_star as f64 * r.ln();
    let log_bound = log_floor_factor(m, n) + log_scale;
    let log_achieved = scaled_sum.ln() + log_scale;
    let out = TuranOutcome {
        k_star,
        achieved: log_achieved.exp(),
        bound: log_bound.exp(),
        log_slack: log_achieved - log_bound,
    };
    if out.log_slack < -1e-12 {
        return Err(Error::Invariant(format!(
            "power-sum floor violated at k = {k_star}: {} < {}",
            out.achieved, out.bound
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit() {
        let t = turan_existence(&[Complex64::new(1.0, 0.0)], 0).unwrap();
        assert_eq!(t.k_star, 1);
        assert!((t.bound - 1.007 / (4.0 * E)).abs() < 1e-15);
    }

    #[test]
    fn plus_minus_one() {
        let t = turan_existence(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], 0).unwrap();
        assert_eq!(t.k_star, 2);
        assert!((t.achieved - 2.0).abs() < 1e-14);
        assert!((t.bound - 1.007 / (4.0 * E).powi(2)).abs() < 1e-15);
    }
}
