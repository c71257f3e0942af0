use num_complex::Complex64;
use serde::Serialize;

use super::constants::{solve_constants, Constants};
use crate::error::{Error, Result};

/// Inputs from which a `DetectionConfig` is derived.
#[derive(Debug, Clone, Serialize)]
pub struct DetectionInputs {
    pub n: usize,
    pub n0: usize,
    pub field_degree: u32,
    /// max(Q, analytic conductor of pi0).
    pub q_tilde: f64,
    pub t: f64,
    pub eta: f64,
    pub tau: f64,
    /// Replaces the log-conductor scale L when set.
    pub scale_override: Option<f64>,
    /// Additive constant in N_eta; unspecified in the source, default 0.
    pub linnik_constant: f64,
    /// Whether L(s, pi x pi0) has a pole at s = 1.
    pub delta: bool,
}

impl DetectionInputs {
    pub fn new(n: usize, n0: usize, field_degree: u32, q_tilde: f64, t: f64, eta: f64) -> Self {
        Self {
            n,
            n0,
            field_degree,
            q_tilde,
            t,
            eta,
            tau: 0.0,
            scale_override: None,
            linnik_constant: 0.0,
            delta: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionConfig {
    pub inputs: DetectionInputs,
    pub constants: Constants,
    pub eta: f64,
    pub tau: f64,
    pub t: f64,
    /// L = 8 n~^3 log Q~ + 4 [F:Q] n~^3 log T, or the override.
    pub scale: f64,
    pub scale_overridden: bool,
    /// N_eta (calligraphic) = 8 A eta L + c.
    pub zero_count_cap: f64,
    pub m_eta: f64,
    pub s0: (f64, f64),
    pub delta: bool,
    pub k_range: (u64, u64),
    /// "constant-free" when the additive constant is 0.
    pub constant_label: &'static str,
    /// Set when M_eta < 146, which the source guarantees only with its
    /// unspecified constant in force.
    pub m_eta_below_146: bool,
}

impl DetectionConfig {
    pub fn new(inputs: DetectionInputs) -> Result<Self> {
        let c = solve_constants()?;
        if inputs.n == 0 || inputs.n0 == 0 {
            return Err(Error::usage("degrees must be positive"));
        }
        if !(inputs.t >= 2.0) {
            return Err(Error::usage(format!("T must be at least 2, got {}", inputs.t)));
        }
        if inputs.tau.abs() > inputs.t {
            return Err(Error::usage(format!("|tau| = {} exceeds T = {}", inputs.tau.abs(), inputs.t)));
        }
        if !(inputs.q_tilde >= 1.0) {
            return Err(Error::usage("the conductor scale must be at least 1"));
        }
        let nt = inputs.n.max(inputs.n0) as f64;
        let natural = 8.0 * nt.powi(3) * inputs.q_tilde.ln() + 4.0 * f64::from(inputs.field_degree) * nt.powi(3) * inputs.t.ln();
        let scale = inputs.scale_override.unwrap_or(natural);
        if !(scale > 0.0) {
            return Err(Error::usage("the log-conductor scale must be positive"));
        }
        let lo = 1.0 / (c.r * scale);
        let hi = 1.0 / ((inputs.n0 * inputs.n) as f64 * c.r);
        if !(inputs.eta >= lo && inputs.eta <= hi) {
            return Err(Error::usage(format!("eta = {} outside [{lo}, {hi}]", inputs.eta)));
        }
        let cap = 8.0 * c.a * inputs.eta * scale + inputs.linnik_constant;
        let m_eta = (c.alpha - 1.0) * cap;
        let k_lo = m_eta.ceil().max(1.0) as u64;
        let k_hi = (c.alpha * m_eta / (c.alpha - 1.0)).floor() as u64;
        Ok(Self {
            eta: inputs.eta,
            tau: inputs.tau,
            t: inputs.t,
            scale,
            scale_overridden: inputs.scale_override.is_some(),
            zero_count_cap: cap,
            m_eta,
            s0: (1.0 + inputs.eta, inputs.tau),
            delta: inputs.delta,
            k_range: (k_lo, k_hi.max(k_lo)),
            constant_label: if inputs.linnik_constant == 0.0 { "constant-free" } else { "user-constant" },
            m_eta_below_146: m_eta < 146.0,
            constants: c,
            inputs,
        })
    }

    pub fn s0(&self) -> Complex64 {
        Complex64::new(self.s0.0, self.s0.1)
    }

    /// log N_eta = A0 M_eta / eta.
    pub fn log_n_eta(&self) -> f64 {
        self.constants.a0 * self.m_eta / self.eta
    }

    /// log N_eta* = A1 M_eta / eta.
    pub fn log_n_eta_star(&self) -> f64 {
        self.constants.a1 * self.m_eta / self.eta
    }

    pub fn n_eta(&self) -> f64 {
        self.log_n_eta().exp()
    }

    pub fn n_eta_star(&self) -> f64 {
        self.log_n_eta_star().exp()
    }

    /// Up to 16 evenly spread integers of the k range, endpoints included.
    pub fn k_values(&self) -> Vec<u64> {
        let (lo, hi) = self.k_range;
        let span = hi - lo;
        let steps = span.min(15);
        let mut out: Vec<u64> = (0..=steps).map(|i| lo + (span * i).checked_div(steps).unwrap_or(0)).collect();
        out.dedup();
        out
    }
}
