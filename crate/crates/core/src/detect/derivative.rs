//! High derivatives of the logarithmic derivative via their Dirichlet
//! expansion, and the quantities bounding them from above and below.

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use super::config::DetectionConfig;
use super::jk::jk;
use super::zeros::ZeroList;
use crate::coeffs::{CoefficientSeries, SeriesKind};
use crate::error::{Error, Result};
use crate::localdata::Representation;

/// psi(x) <= 1.03883 x for all x > 0 (Rosser-Schoenfeld).
pub const CHEBYSHEV_PSI_RATIO: f64 = 1.038_83;
/// Base of the lower bound (1/4.019815115)^{M_eta}.
pub const LOWER_BOUND_BASE: f64 = 4.019_815_115;
pub const OCTAVE_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HighDerivativeQuery {
    pub k: u64,
    pub eta: f64,
    pub tau: f64,
    pub truncation: u64,
    /// Truncations below this are refused.
    pub floor: f64,
    /// Bound on sum over N n = m of |Lambda(n)| in units of the rational
    /// von Mangoldt function; enables the rigorous tail.
    pub coefficient_scale: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HighDerivative {
    pub re: f64,
    pub im: f64,
    pub terms: usize,
    pub truncation: u64,
    pub tail_bound: Option<f64>,
}

/// [F:Q] times the size of the local multiset when both sides satisfy the
/// Ramanujan bound, else `None`.
pub fn coefficient_scale(pi: &Representation, pi0: Option<&Representation>) -> Option<f64> {
    let d = pi.degree * pi0.map_or(1, |p| p.degree);
    let tempered = pi.ramanujan_exponent() == 0.0 && pi0.is_none_or(|p| p.ramanujan_exponent() == 0.0);
    tempered.then(|| f64::from(pi.field.degree) * d as f64)
}

fn check_series(series: &CoefficientSeries, truncation: u64) -> Result<()> {
    if series.kind != SeriesKind::BigLambda {
        return Err(Error::usage(format!("expected a von Mangoldt series, got {}", series.kind.name())));
    }
    if truncation > series.bound {
        return Err(Error::usage(format!(
            "truncation {truncation} exceeds the series bound {}",
            series.bound
        )));
    }
    Ok(())
}

fn weighted_sum(series: &CoefficientSeries, k: u64, eta: f64, tau: f64, truncation: u64) -> (Complex64, usize) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for (id, v) in series.iter() {
        if id.norm > truncation {
            break;
        }
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let ln_n = (id.norm as f64).ln();
        acc += v * Complex64::from_polar(jk(eta * ln_n, k) / id.norm as f64, -tau * ln_n);
        terms += 1;
    }
    (acc * eta, terms)
}

/// eta * sum_{N n <= truncation} Lambda(n) N n^{-1 - i tau} j_k(eta log N n).
pub fn high_derivative(series: &CoefficientSeries, q: &HighDerivativeQuery) -> Result<HighDerivative> {
    check_series(series, q.truncation)?;
    if !(q.eta > 0.0) {
        return Err(Error::usage("eta must be positive"));
    }
    if (q.truncation as f64) < q.floor {
        return Err(Error::usage(format!(
            "truncation {} is below {}; the omitted tail would dominate",
            q.truncation, q.floor
        )));
    }
    let (v, terms) = weighted_sum(series, q.k, q.eta, q.tau, q.truncation);
    let ln_u = (q.truncation as f64).ln();
    let u0 = q.eta * ln_u;
    // The weight x^{-1} j_k(eta log x) decreases once log x > k / (1 + eta).
    let tail_bound = q.coefficient_scale.and_then(|s| {
        (ln_u > q.k as f64 / (1.0 + q.eta)).then(|| {
            s * CHEBYSHEV_PSI_RATIO * (q.eta * jk(u0, q.k) + gamma_ur(q.k as f64 + 1.0, u0))
        })
    });
    Ok(HighDerivative {
        re: v.re,
        im: v.im,
        terms,
        truncation: q.truncation,
        tail_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeStatus {
    /// The truncation reaches N_eta*.
    Full,
    /// N_eta <= truncation < N_eta*: the integral stops at the truncation.
    Partial,
    /// The truncation is below N_eta and the integral range is empty.
    BelowNEta,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionReport {
    pub k: u64,
    pub truncation: u64,
    pub range_status: RangeStatus,
    pub log_n_eta: f64,
    pub log_n_eta_star: f64,
    /// |eta^{k+1}/k! (L'/L)^{(k)}(s0)| from the truncated expansion.
    pub lhs: f64,
    /// eta^2 int |sum_{N_eta < N n <= u} Lambda N n^{-1-i tau}| du/u, exact for the step function.
    pub integral: f64,
    pub integral_trapezoid: f64,
    pub integral_trapezoid_refined: f64,
    pub refinement_ok: bool,
    /// Terms outside the integral range, bounded trivially.
    pub outside: f64,
    /// Boundary term of the partial summation.
    pub boundary: f64,
    pub chain_rhs: f64,
    pub chain_holds: bool,
    /// (lhs - integral) V^k / k: the additive constant this run needs.
    pub measured_constant: f64,
    pub log_measured_constant: f64,
    pub constant_label: &'static str,
    pub scale: f64,
    pub scale_overridden: bool,
    pub lower: Option<LowerLeg>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerLeg {
    /// |sum over |1 + i tau - rho| <= A eta of (eta / (s0 - rho))^{k+1}|.
    pub near_sum: f64,
    pub near_zeros: usize,
    /// Whether some zero lies within eta of 1 + i tau.
    pub triggered: bool,
    pub pole_term: f64,
    /// lhs + pole term, against the floor (1/4.019815115)^{M_eta}.
    pub lower_lhs: f64,
    pub floor: f64,
}

fn trapezoid_log_grid(steps: &[(f64, Complex64)], ln_a: f64, ln_b: f64, per_octave: usize) -> f64 {
    if ln_b <= ln_a {
        return 0.0;
    }
    let h = std::f64::consts::LN_2 / per_octave as f64;
    let n = ((ln_b - ln_a) / h).ceil() as usize;
    let h = (ln_b - ln_a) / n as f64;
    let at = |t: f64| -> f64 {
        let idx = steps.partition_point(|(ln_m, _)| *ln_m <= t);
        if idx == 0 {
            0.0
        } else {
            steps[idx - 1].1.norm()
        }
    };
    let mut s = 0.5 * (at(ln_a) + at(ln_b));
    for i in 1..n {
        s += at(ln_a + i as f64 * h);
    }
    s * h
}

/// Evaluates the upper-bound chain and, when requested, the near-zero sum.
pub fn detection_bounds(
    series: &CoefficientSeries,
    zeros: Option<&ZeroList>,
    config: &DetectionConfig,
    k: u64,
    truncation: u64,
    lower_leg: bool,
) -> Result<DetectionReport> {
    check_series(series, truncation)?;
    if lower_leg && zeros.is_none() {
        return Err(Error::usage("the lower-bound leg needs a zero list"));
    }
    let (eta, tau) = (config.eta, config.tau);
    let (lhs_c, _) = weighted_sum(series, k, eta, tau, truncation);
    let lhs = lhs_c.norm();
    let ln_a = config.log_n_eta();
    let ln_star = config.log_n_eta_star();
    let ln_u = (truncation as f64).ln();
    let ln_b = ln_star.min(ln_u);
    let range_status = if ln_u >= ln_star {
        RangeStatus::Full
    } else if ln_u >= ln_a {
        RangeStatus::Partial
    } else {
        RangeStatus::BelowNEta
    };
    let mut steps: Vec<(f64, Complex64)> = Vec::new();
    let mut running = Complex64::new(0.0, 0.0);
    let mut outside = 0.0;
    let mut inside_abs = 0.0;
    for (id, v) in series.iter() {
        if id.norm > truncation {
            break;
        }
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let ln_m = (id.norm as f64).ln();
        if ln_m > ln_a && ln_m <= ln_b {
            running += v * Complex64::from_polar(1.0 / id.norm as f64, -tau * ln_m);
            inside_abs += v.norm() / id.norm as f64;
            match steps.last_mut() {
                Some(last) if last.0 == ln_m => last.1 = running,
                _ => steps.push((ln_m, running)),
            }
        } else {
            outside += v.norm() / id.norm as f64 * jk(eta * ln_m, k);
        }
    }
    let mut integral = 0.0;
    for (i, (ln_m, s)) in steps.iter().enumerate() {
        let next = steps.get(i + 1).map_or(ln_b, |x| x.0);
        integral += s.norm() * (next - ln_m);
    }
    let eta2 = eta * eta;
    integral *= eta2;
    let trap = eta2 * trapezoid_log_grid(&steps, ln_a, ln_b, OCTAVE_POINTS);
    let trap2 = eta2 * trapezoid_log_grid(&steps, ln_a, ln_b, 2 * OCTAVE_POINTS);
    let refinement_ok = (trap - trap2).abs() <= 0.01 * trap2.abs().max(1e-300) || trap2 == trap;
    let boundary = if ln_b > ln_a { eta * inside_abs * jk(eta * ln_b, k) } else { 0.0 };
    outside *= eta;
    let chain_rhs = outside + boundary + integral;
    let excess = lhs - integral;
    let ln_c = if excess > 0.0 {
        excess.ln() + k as f64 * config.constants.v.ln() - (k.max(1) as f64).ln()
    } else {
        f64::NEG_INFINITY
    };
    let lower = match (lower_leg, zeros) {
        (true, Some(z)) => {
            let s0 = config.s0();
            let one = Complex64::new(1.0, tau);
            let radius = config.constants.a * eta;
            let mut near = Complex64::new(0.0, 0.0);
            let mut count = 0;
            let mut triggered = false;
            for rho in z.expanded() {
                let d = (one - rho).norm();
                if d <= radius {
                    let w = Complex64::new(eta, 0.0) / (s0 - rho);
                    near += w.powi(i32::try_from(k + 1).unwrap_or(i32::MAX));
                    count += 1;
                }
                triggered |= d <= eta;
            }
            let pole_term = if config.delta && tau.abs() <= radius { 1.0 } else { 0.0 };
            Some(LowerLeg {
                near_sum: near.norm(),
                near_zeros: count,
                triggered,
                pole_term,
                lower_lhs: lhs + pole_term,
                floor: (-config.m_eta * LOWER_BOUND_BASE.ln()).exp(),
            })
        }
        _ => None,
    };
    Ok(DetectionReport {
        k,
        truncation,
        range_status,
        log_n_eta: ln_a,
        log_n_eta_star: ln_star,
        lhs,
        integral,
        integral_trapezoid: trap,
        integral_trapezoid_refined: trap2,
        refinement_ok,
        outside,
        boundary,
        chain_rhs,
        chain_holds: lhs <= chain_rhs * (1.0 + 1e-12) + 1e-300,
        measured_constant: ln_c.exp(),
        log_measured_constant: ln_c,
        constant_label: config.constant_label,
        scale: config.scale,
        scale_overridden: config.scale_overridden,
        lower,
    })
}
