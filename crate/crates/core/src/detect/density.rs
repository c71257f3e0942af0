//! Counting members whose local parameters at a prime exceed N p^theta, with
//! a power-sum certificate for each, and the size of families of bounded
//! conductor.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::turan::log_floor_factor;
use crate::error::{Error, Result};
use crate::ideals::{NumberFieldSpec, PrimeIdeal};
use crate::localdata::{analytic_conductor, DirichletCharacter, Family, Representation, MAGNITUDE_SLACK};

#[derive(Debug, Clone, Serialize)]
pub struct DensityQuery {
    pub prime: PrimeIdeal,
    pub theta: f64,
    pub epsilon: f64,
    /// Replaces the derived scale when set.
    pub scale_override: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberScan {
    pub index: usize,
    pub label: String,
    pub max_abs: f64,
    pub violator: bool,
    pub certificate_fired: bool,
    pub k_fired: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub prime_norm: u64,
    pub theta: f64,
    pub count: usize,
    pub scale: f64,
    pub m: Option<u64>,
    /// Whether N p <= scale^{1/(n+1)} and M >= 1.
    pub range_ok: bool,
    pub members: Vec<MemberScan>,
    /// max over k in [M+1, M+n] of sum over violators of |sum_j alpha_j^k / k|^2.
    pub measured: f64,
    pub shape: f64,
    pub shape_only: bool,
    pub seed: u64,
}

fn violates(alphas: &[Complex64], norm: u64, theta: f64) -> (f64, bool) {
    let m = alphas.iter().map(|a| a.norm()).fold(0.0, f64::max);
    (m, m >= (norm as f64).powf(theta) * (1.0 - MAGNITUDE_SLACK))
}

/// The scale from the count of violators: ceil(D^{-n^2} Q^{2n} |S|^eps) for
/// theta <= 1/4, ceil(D^{-n^2/2} Q^n |S|^{1+eps}) above.
pub fn density_scale(field: &NumberFieldSpec, n: usize, q: f64, count: usize, theta: f64, epsilon: f64) -> f64 {
    let d = field.abs_discriminant() as f64;
    let nf = n as f64;
    let s = count as f64;
    if theta <= 0.25 {
        (d.powf(-nf * nf) * q.powf(2.0 * nf) * s.powf(epsilon)).ceil()
    } else {
        (d.powf(-nf * nf / 2.0) * q.powf(nf) * s.powf(1.0 + epsilon)).ceil()
    }
}

pub fn density_scan(family: &Family, query: &DensityQuery, seed: u64) -> Result<DensityReport> {
    if !(query.theta >= 0.0) {
        return Err(Error::usage("theta must be nonnegative"));
    }
    let p = query.prime;
    let norm = p.norm;
    let locals: Vec<Vec<Complex64>> = family
        .members
        .par_iter()
        .map(|m| Ok(m.local_parameters(&p)?.alphas))
        .collect::<Result<_>>()?;
    let flags: Vec<(f64, bool)> = locals.iter().map(|a| violates(a, norm, query.theta)).collect();
    let count = flags.iter().filter(|f| f.1).count();
    let n = match family.degree() {
        Some(n) => n,
        None if family.is_empty() => 1,
        None => return Err(Error::usage("density scans need a family of common degree")),
    };
    let scale = query
        .scale_override
        .unwrap_or_else(|| density_scale(&family.field, n, family.q_max, count, query.theta, query.epsilon));
    let ln_np = (norm as f64).ln();
    let raw_m = scale.ln() / ln_np - n as f64;
    let range_ok = scale >= 1.0 && (norm as f64) <= scale.powf(1.0 / (n as f64 + 1.0)) && raw_m >= 1.0;
    if query.scale_override.is_some() && !range_ok {
        return Err(Error::usage(format!("scale {scale} does not admit N p = {norm} with M >= 1")));
    }
    let m = range_ok.then(|| raw_m.floor() as u64);
    let members: Vec<MemberScan> = family
        .members
        .par_iter()
        .enumerate()
        .map(|(i, rep)| scan_member(i, rep, &locals[i], flags[i], m, n, norm, query.theta))
        .collect();
    let mut measured = 0.0;
    if let Some(m) = m {
        for k in m + 1..=m + n as u64 {
            let s: f64 = locals
                .iter()
                .zip(&flags)
                .filter(|(_, f)| f.1)
                .map(|(a, _)| (power_sum(a, k) / k as f64).norm_sqr())
                .sum();
            measured = f64::max(measured, s);
        }
        if let Some(bad) = members.iter().find(|s| s.violator && !s.certificate_fired) {
            return Err(Error::Invariant(format!(
                "power-sum certificate did not fire for violator {} at N p = {norm}",
                bad.label
            )));
        }
    }
    let nf = n as f64;
    let d = family.field.abs_discriminant() as f64;
    let exponent = (1.0 - 2.0 * query.theta) / f64::max(1.0, 4.0 * query.theta) + query.epsilon;
    let shape = (norm as f64).powf(nf) * (d.powf(-nf * nf) * family.q_max.powf(2.0 * nf)).powf(exponent);
    Ok(DensityReport {
        prime_norm: norm,
        theta: query.theta,
        count,
        scale,
        m,
        range_ok,
        members,
        measured,
        shape,
        shape_only: true,
        seed,
    })
}

fn power_sum(alphas: &[Complex64], k: u64) -> Complex64 {
    alphas.iter().map(|a| a.powi(k as i32)).sum()
}

#[allow(clippy::too_many_arguments)]
fn scan_member(
    index: usize,
    rep: &Representation,
    alphas: &[Complex64],
    flag: (f64, bool),
    m: Option<u64>,
    n: usize,
    norm: u64,
    theta: f64,
) -> MemberScan {
    let mut k_fired = None;
    if let Some(m) = m {
        let ln_np = (norm as f64).ln();
        for k in m + 1..=m + n as u64 {
            let kf = k as f64;
            let log_floor = kf * theta * ln_np - kf.ln() + log_floor_factor(m, n);
            let v = power_sum(alphas, k).norm() / kf;
            if v > 0.0 && v.ln() >= log_floor - 1e-9 {
                k_fired = Some(k);
                break;
            }
        }
    }
    MemberScan {
        index,
        label: rep.label.clone(),
        max_abs: flag.0,
        violator: flag.1,
        certificate_fired: k_fired.is_some(),
        k_fired,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyCount {
    pub enumerated: Option<u64>,
    pub bound_shape: f64,
    pub ratio: Option<f64>,
    pub shape_only: bool,
}

/// D^{-n^2} Q^{2n + eps}, with the exact count of primitive Dirichlet
/// characters of analytic conductor <= Q when n = 1 over the rationals.
pub fn family_count_bound(field: &NumberFieldSpec, n: usize, q: f64, epsilon: f64, enumerate: bool) -> Result<FamilyCount> {
    if n == 0 || !(q >= 1.0) {
        return Err(Error::usage("need n >= 1 and Q >= 1"));
    }
    let nf = n as f64;
    let shape = (field.abs_discriminant() as f64).powf(-nf * nf) * q.powf(2.0 * nf + epsilon);
    if !enumerate {
        return Ok(FamilyCount {
            enumerated: None,
            bound_shape: shape,
            ratio: None,
            shape_only: true,
        });
    }
    if n != 1 || !field.is_rationals() {
        return Err(Error::Unsupported(format!(
            "enumeration is available only for n = 1 over Q, not n = {n} over {}",
            field.label()
        )));
    }
    // The analytic conductor of a character mod q is at least 3q.
    let q_max = (q / 3.0).floor() as u64;
    let count: u64 = (1..=q_max)
        .into_par_iter()
        .map(|modulus| {
            DirichletCharacter::primitive_mod(modulus)
                .into_iter()
                .filter(|chi| analytic_conductor(&Representation::from_character(chi.clone()), 0.0) <= q)
                .count() as u64
        })
        .sum();
    Ok(FamilyCount {
        enumerated: Some(count),
        bound_shape: shape,
        ratio: Some(count as f64 / shape),
        shape_only: true,
    })
}
