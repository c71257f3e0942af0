//! The smooth majorant, its Laplace transform, and smoothed coefficient sums
//! compared against their residue main term.

use num_complex::Complex64;
use serde::Serialize;

use super::quad::{adaptive_gk, composite_gauss_legendre};
use super::selberg::g_factor;
use crate::arith::KahanSum;
use crate::coeffs::{expand_on_table, ModelChoice, RamifiedModel, RsPair, SeriesKind};
use crate::error::{Error, Result};
use crate::ideals::{IdealIndex, IdealTable};
use crate::localdata::Representation;
use std::sync::Arc;

/// Target absolute accuracy for the transform.
pub const HAT_TOLERANCE: f64 = 1e-12;

/// exp(4/3 - 1/(1 - y^2/4)) on (-2, 2), zero elsewhere: the standard bump
/// scaled by e^{1/3} so that it is at least 1 on [-1, 1].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BumpFunction;

impl BumpFunction {
    pub fn eval(&self, y: f64) -> f64 {
        let t = 1.0 - y * y / 4.0;
        if t <= 0.0 {
            0.0
        } else {
            (4.0 / 3.0 - 1.0 / t).exp()
        }
    }

    /// int phi(y) e^{w y} dy by adaptive Gauss-Kronrod.
    pub fn hat(&self, w: f64) -> f64 {
        adaptive_gk(|y| self.eval(y) * (w * y).exp(), -2.0, 2.0, HAT_TOLERANCE / 4.0).0
    }

    /// The same transform from the even moments: sum_k w^{2k} m_{2k} / (2k)!.
    pub fn hat_series(&self, w: f64) -> f64 {
        let mut total = 0.0;
        let mut fact = 1.0;
        for k in 0..200 {
            if k > 0 {
                fact *= ((2 * k - 1) * (2 * k)) as f64;
            }
            let m = composite_gauss_legendre(|y| self.eval(y) * y.powi(2 * k), -2.0, 2.0, 64, 20);
            let term = w.powi(2 * k) * m / fact;
            total += term;
            if term.abs() < 1e-18 * total.abs().max(1.0) && k > 2 {
                break;
            }
        }
        total
    }
}

/// Where the residue in the main term came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueSource {
    ExactGl1,
    ProductModel,
    User,
    Unavailable,
}

/// Res at s = 1 of L(s, a x b~) when it is known exactly: for characters
/// under the exact GL(1) model it is 1 when chi * conj(chi') is principal
/// and 0 otherwise; under the product model the diagonal residue is
/// prod_{p | q} (1 - 1/p).
pub fn known_residue(a: &Representation, b: &Representation, model: ModelChoice) -> Result<Option<(f64, ResidueSource)>> {
    let pair = RsPair::new(a, Some(b), model)?;
    match (pair.model, pair.exact_character()) {
        (RamifiedModel::Gl1Exact, Some(psi)) => Ok(Some((if psi.modulus == 1 { 1.0 } else { 0.0 }, ResidueSource::ExactGl1))),
        _ => match (a.character_data(), b.character_data()) {
            (Some(x), Some(y)) => {
                let prod = x.mul(&y.conj());
                if !prod.is_principal() {
                    return Ok(Some((0.0, ResidueSource::ProductModel)));
                }
                let r = crate::arith::factorize(prod.modulus)
                    .iter()
                    .map(|(p, _)| 1.0 - 1.0 / *p as f64)
                    .product();
                Ok(Some((r, ResidueSource::ProductModel)))
            }
            _ => Ok(None),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothSum {
    pub lhs: (f64, f64),
    pub main: Option<f64>,
    pub diff: Option<(f64, f64)>,
    pub residue: Option<f64>,
    pub residue_source: ResidueSource,
    pub g_d: f64,
    pub phi_hat: f64,
    pub terms: usize,
}

/// sum over d | n of phi(T log(N n / x)) lambda_{a x b~}(n), next to
/// g_a(d) x phi_hat(1/T) / T Res L(s, a x b~).
pub fn smooth_sum_residue(
    a: &Representation,
    b: &Representation,
    x: f64,
    t: f64,
    d: &IdealIndex,
    residue: Option<f64>,
) -> Result<SmoothSum> {
    if !(x >= 1.0 && t >= 1.0) {
        return Err(Error::usage("smooth sums need x >= 1 and T >= 1"));
    }
    if !d.is_squarefree() {
        return Err(Error::usage("the divisor ideal must be squarefree"));
    }
    let phi = BumpFunction;
    let limit = (x * (2.0 / t).exp()).floor() as u64;
    let table = Arc::new(IdealTable::new(&a.field, limit.max(1))?);
    let series = expand_on_table(&table, &RsPair::new(a, Some(b), ModelChoice::Auto)?, SeriesKind::Lambda)?;
    let mut acc = KahanSum::new();
    let mut terms = 0;
    for (id, v) in series.iter() {
        if !d.divides(id) {
            continue;
        }
        let w = phi.eval(t * (id.norm as f64 / x).ln());
        if w != 0.0 {
            acc.add(v * w);
            terms += 1;
        }
    }
    let lhs = acc.value();
    let (res, source) = match residue {
        Some(r) => (Some(r), ResidueSource::User),
        None => match known_residue(a, b, ModelChoice::Auto)? {
            Some((r, s)) => (Some(r), s),
            None => (None, ResidueSource::Unavailable),
        },
    };
    let g_d = g_factor(a, d)?.value;
    let phi_hat = phi.hat(1.0 / t);
    let main = res.map(|r| g_d * x * phi_hat / t * r);
    Ok(SmoothSum {
        lhs: (lhs.re, lhs.im),
        main,
        diff: main.map(|m| {
            let z = lhs - Complex64::new(m, 0.0);
            (z.re, z.im)
        }),
        residue: res,
        residue_source: source,
        g_d,
        phi_hat,
        terms,
    })
}
