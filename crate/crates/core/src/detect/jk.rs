//! The weights j_k(u) = e^{-u} u^k / k! and their tail bounds.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::config::DetectionConfig;
use crate::error::{Error, Result};

/// ln j_k(u), or -inf where j_k vanishes.
pub fn ln_jk(u: f64, k: u64) -> f64 {
    if u == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -u;
    }
    k as f64 * u.ln() - u - ln_gamma(k as f64 + 1.0)
}

pub fn jk(u: f64, k: u64) -> f64 {
    ln_jk(u, k).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct TailCheck {
    /// Smallest ln(bound) - ln(j_k) over the near samples (m <= N_eta).
    pub near_slack: f64,
    /// Smallest slack over the far samples (m >= N_eta*).
    pub far_slack: f64,
    pub samples: usize,
    pub worst_near: (u64, f64),
    pub worst_far: (u64, f64),
}

/// Checks j_k(eta log m) <= m^{-eta} V^{-k} for m <= N_eta and
/// j_k(eta log m) <= m^{-eta/2} V^{-k} for m >= N_eta*, on `samples` points
/// of each range per k. Work is in u = eta log m; worst points are reported
/// as (k, log m).
pub fn jk_tail_bounds_check(config: &DetectionConfig, samples: usize) -> Result<TailCheck> {
    let samples = samples.max(2);
    let ln_v = config.constants.v.ln();
    let eta = config.eta;
    let u_near = eta * config.log_n_eta();
    let u_far = eta * config.log_n_eta_star();
    let mut out = TailCheck {
        near_slack: f64::INFINITY,
        far_slack: f64::INFINITY,
        samples: 0,
        worst_near: (0, 0.0),
        worst_far: (0, 0.0),
    };
    for k in config.k_values() {
        let kf = k as f64;
        for i in 0..samples {
            let frac = i as f64 / (samples - 1) as f64;
            let u = u_near * frac;
            // Bound minus value in logs: (-u - k ln V) - ln j_k(u).
            let slack = -u - kf * ln_v - ln_jk(u, k);
            if slack < out.near_slack {
                out.near_slack = slack;
                out.worst_near = (k, u / eta);
            }
            if slack < -1e-9 {
                return Err(Error::Invariant(format!("j_k tail bound fails near: k = {k}, log m = {}", u / eta)));
            }
            let u = u_far * (1.0 + 9.0 * frac);
            let slack = -u / 2.0 - kf * ln_v - ln_jk(u, k);
            if slack < out.far_slack {
                out.far_slack = slack;
                out.worst_far = (k, u / eta);
            }
            if slack < -1e-9 {
                return Err(Error::Invariant(format!("j_k tail bound fails far: k = {k}, log m = {}", u / eta)));
            }
            out.samples += 2;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((jk(1.0, 1) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(jk(0.0, 0), 1.0);
        assert_eq!(jk(0.0, 3), 0.0);
        assert!(jk(5.0, 5) > jk(4.9, 5) && jk(5.0, 5) > jk(5.1, 5));
    }
}
