//! Mean values over |v| <= T of Dirichlet polynomials with Mobius-type coefficients.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quad::gauss_legendre;
use crate::coeffs::{expand_on_table, ModelChoice, RsPair, SeriesKind};
use crate::error::{Error, Result};
use crate::ideals::IdealTable;
use crate::localdata::{Family, Representation};

pub const DEFAULT_TRUNCATION_FACTOR: f64 = 20.0;
pub const GL_ORDER: usize = 16;
pub const MAX_PANELS: usize = 1 << 16;

/// Which Dirichlet polynomial is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MvtRange {
    /// N n <= X at real part 1/2.
    Head,
    /// X < N n <= factor * X at real part 1 + 1/log Y.
    Tail,
}

#[derive(Debug, Clone, Serialize)]
pub struct MvtReport {
    pub range: MvtRange,
    pub value: f64,
    pub shape: f64,
    pub shape_label: &'static str,
    pub panels: usize,
    /// Set when the panel count hit `MAX_PANELS` before resolving T log X.
    pub undersampled: bool,
    pub truncation: u64,
    pub distinct_norms: usize,
}

/// Coefficients summed over ideals of equal norm, scaled by m^{-sigma}: (log m, c_m).
pub type NormPolynomial = Vec<(f64, Complex64)>;

pub fn norm_polynomial(
    rep: &Representation,
    pi0: Option<&Representation>,
    table: &Arc<IdealTable>,
    lo: u64,
    sigma: f64,
) -> Result<NormPolynomial> {
    let pi0c = pi0.map(Representation::contragredient);
    let pair = RsPair::new(rep, pi0c.as_ref(), ModelChoice::Auto)?;
    let series = expand_on_table(table, &pair, SeriesKind::Mu)?;
    let mut by_norm: BTreeMap<u64, Complex64> = BTreeMap::new();
    for (id, v) in series.iter() {
        if id.norm > lo && v != Complex64::new(0.0, 0.0) {
            *by_norm.entry(id.norm).or_default() += v;
        }
    }
    Ok(by_norm
        .into_iter()
        .map(|(m, c)| {
            let lm = (m as f64).ln();
            (lm, c * (-sigma * lm).exp())
        })
        .collect())
}

/// |sum c_m m^{-iv}|^2.
pub fn polynomial_sq(poly: &NormPolynomial, v: f64) -> f64 {
    poly.iter()
        .map(|(lm, c)| c * Complex64::from_polar(1.0, -v * lm))
        .sum::<Complex64>()
        .norm_sqr()
}

/// Integral over [-T, T] of `polynomial_sq` by composite Gauss-Legendre; the
/// panel count tracks the oscillation scale T log(max norm).
pub fn integrate_polynomial(poly: &NormPolynomial, t: f64) -> (f64, usize, bool) {
    let lmax = poly.iter().map(|(l, _)| *l).fold(0.0, f64::max);
    let wanted = (2.0 * t * lmax / std::f64::consts::PI).ceil() as usize + 8;
    let panels = wanted.min(MAX_PANELS);
    let (x, w) = gauss_legendre(GL_ORDER);
    let h = 2.0 * t / panels as f64;
    let total: f64 = (0..panels)
        .into_par_iter()
        .map(|p| {
            let mid = -t + (p as f64 + 0.5) * h;
            x.iter()
                .zip(&w)
                .map(|(xi, wi)| wi * polynomial_sq(poly, mid + h / 2.0 * xi))
                .sum::<f64>()
                * h
                / 2.0
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    (total, panels, wanted > MAX_PANELS)
}

/// Closed form of the same integral: sum_{m,n} c_m conj(c_n) 2 sin(T log(n/m)) / log(n/m).
pub fn integrate_polynomial_exact(poly: &NormPolynomial, t: f64) -> f64 {
    let mut s = 0.0;
    for (lm, cm) in poly {
        for (ln, cn) in poly {
            let d = ln - lm;
            let k = if d == 0.0 { 2.0 * t } else { 2.0 * (t * d).sin() / d };
            s += (cm * cn.conj()).re * k;
        }
    }
    s
}

/// Sum over the family of the mean square, head (N n <= X) or tail (N n in
/// (X, factor X] at real part 1 + 1/log Y).
pub fn mvt_mu(
    family: &Family,
    pi0: Option<&Representation>,
    x: f64,
    t: f64,
    y: f64,
    range: MvtRange,
    truncation_factor: f64,
) -> Result<MvtReport> {
    let e = std::f64::consts::E;
    if !(x >= e && y >= e && t > 0.0) {
        return Err(Error::usage("mean values need X, Y >= e and T > 0"));
    }
    if !(truncation_factor > 1.0) {
        return Err(Error::usage("the tail truncation factor must exceed 1"));
    }
    let (lo, hi, sigma) = match range {
        MvtRange::Head => (0, x.floor() as u64, 0.5),
        MvtRange::Tail => (x.floor() as u64, (truncation_factor * x).floor() as u64, 1.0 + 1.0 / y.ln()),
    };
    let (shape, shape_label) = match range {
        MvtRange::Head => (x * x.ln(), "X_log_X"),
        MvtRange::Tail => (x.ln(), "log_X"),
    };
    let mut report = MvtReport {
        range,
        value: 0.0,
        shape,
        shape_label,
        panels: 0,
        undersampled: false,
        truncation: hi,
        distinct_norms: 0,
    };
    if family.is_empty() {
        return Ok(report);
    }
    let table = Arc::new(IdealTable::new(&family.field, hi)?);
    for pi in &family.members {
        let poly = norm_polynomial(pi, pi0, &table, lo, sigma)?;
        let (v, panels, under) = integrate_polynomial(&poly, t);
        report.value += v;
        report.panels = report.panels.max(panels);
        report.undersampled |= under;
        report.distinct_norms = report.distinct_norms.max(poly.len());
    }
    Ok(report)
}
