//! The constant system for zero detection: (alpha, A) from the constrained
//! minimization, then V, A0 and A1.

use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Error, Result};

/// Right-hand side of the constraint 4 e alpha (2 / R)^(alpha - 1) = 1 - 1e-8.
pub const CONSTRAINT_TARGET: f64 = 1.0 - 1e-8;
pub const ALPHA_BRACKET: (f64, f64) = (1.01, 100.0);
pub const SOLVER_TOLERANCE: f64 = 1e-10;
pub const XI: f64 = 1.0 + 1e-7;
pub const V_OFFSET: f64 = 0.38;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub alpha: f64,
    pub a: f64,
    pub r: f64,
    pub v: f64,
    pub a0: f64,
    pub a1: f64,
    pub xi: f64,
}

impl Constants {
    /// |4 e alpha (2/R)^(alpha-1) - (1 - 1e-8)|.
    pub fn constraint_residual(&self) -> f64 {
        (4.0 * E * self.alpha * (2.0 / self.r).powf(self.alpha - 1.0) - CONSTRAINT_TARGET).abs()
    }

    /// |A1 e^{1 - A1 (alpha-1)/(2 alpha)} - 1/V|.
    pub fn a1_residual(&self) -> f64 {
        (a1_equation(self.a1, self.alpha) - 1.0 / self.v).abs()
    }

    /// Derivative in alpha of the log objective along the constraint.
    pub fn stationarity_residual(&self) -> f64 {
        log_objective_derivative(self.alpha)
    }

    /// (4 e alpha 2^(alpha-1))^A, the minimized objective.
    pub fn objective(&self) -> f64 {
        objective(self.alpha)
    }
}

/// ln R(alpha) with A eliminated through the constraint.
fn log_r(alpha: f64) -> f64 {
    std::f64::consts::LN_2 + ((4.0 * E / CONSTRAINT_TARGET).ln() + alpha.ln()) / (alpha - 1.0)
}

fn a_of(alpha: f64) -> f64 {
    let r = log_r(alpha).exp();
    (r * r - 1.0).sqrt()
}

fn log_base(alpha: f64) -> f64 {
    (4.0 * E).ln() + alpha.ln() + (alpha - 1.0) * std::f64::consts::LN_2
}

/// A(alpha) * ln(4 e alpha 2^(alpha-1)).
fn log_objective(alpha: f64) -> f64 {
    a_of(alpha) * log_base(alpha)
}

fn objective(alpha: f64) -> f64 {
    log_objective(alpha).exp()
}

fn log_objective_derivative(alpha: f64) -> f64 {
    let c = (4.0 * E / CONSTRAINT_TARGET).ln() + alpha.ln();
    let dlog_r = 1.0 / (alpha * (alpha - 1.0)) - c / ((alpha - 1.0) * (alpha - 1.0));
    let r2 = (2.0 * log_r(alpha)).exp();
    let a = (r2 - 1.0).sqrt();
    let da = r2 / a * dlog_r;
    da * log_base(alpha) + a * (1.0 / alpha + std::f64::consts::LN_2)
}

fn a1_equation(a1: f64, alpha: f64) -> f64 {
    a1 * (1.0 - a1 * (alpha - 1.0) / (2.0 * alpha)).exp()
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, what: &str) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::Internal(format!("{what}: root not bracketed in [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= SOLVER_TOLERANCE * 1e-3 * mid.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the minimizing alpha, refined by bisection on
/// the derivative of the log objective.
pub fn solve_constants() -> Result<Constants> {
    let (mut lo, mut hi) = ALPHA_BRACKET;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (log_objective(x1), log_objective(x2));
    while hi - lo > 1e-6 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = log_objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = log_objective(x2);
        }
    }
    let width = 1e-3;
    let alpha = bisect(
        log_objective_derivative,
        (lo - width).max(ALPHA_BRACKET.0),
        (hi + width).min(ALPHA_BRACKET.1),
        "alpha",
    )?;
    let a = a_of(alpha);
    if !(a > 1.0) {
        return Err(Error::Internal(format!("A = {a} is not above 1")));
    }
    let r = (a * a + 1.0).sqrt();
    let v = 2.0 * (4.0 * E * alpha).powf(1.0 / (alpha - 1.0)) + V_OFFSET;
    let a0 = 1.0 / (E * v);
    // a1_equation decreases past its maximum at 2 alpha / (alpha - 1) > 2.
    let peak = 2.0 * alpha / (alpha - 1.0);
    let a1 = bisect(|x| a1_equation(x, alpha) - 1.0 / v, peak, 100.0, "A1")?;
    Ok(Constants {
        alpha,
        a,
        r,
        v,
        a0,
        a1,
        xi: XI,
    })
}
