//! Large-sieve constants: the largest eigenvalue of the Gram matrix of the
//! family's coefficient vectors, and the comparison table of bound shapes.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{expand_on_table, ModelChoice, RsPair, SeriesKind};
use crate::covers::{hermitian_eigenvalues, CoverTarget};
use crate::error::{Error, Result};
use crate::ideals::IdealTable;
use crate::localdata::{theta_bound, Family, Representation};

/// Coefficient kind entering the sieve matrix.
pub type SieveKind = CoverTarget;

pub const GRAM_BLOCK: usize = 1024;
pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITERATIONS: usize = 100_000;

/// Rows are family members, columns are ideals of norm <= N.
#[derive(Debug, Clone)]
pub struct SieveMatrix {
    pub entries: DMatrix<Complex64>,
    /// Columns removed because lambda_{pi0 x pi0~} vanished there.
    pub dropped_columns: usize,
    pub column_norms: Vec<u64>,
}

/// Builds the coefficient matrix. With `pi0`, entries are the coefficients of
/// L(s, pi x pi0) scaled by lambda_{pi0 x pi0~}(n)^{-1/2}.
pub fn sieve_matrix(family: &Family, n: u64, pi0: Option<&Representation>, kind: SieveKind) -> Result<SieveMatrix> {
    if family.is_empty() {
        return Err(Error::usage("the family is empty"));
    }
    let table = Arc::new(IdealTable::new(&family.field, n)?);
    let pi0c = pi0.map(Representation::contragredient);
    let rows: Vec<Vec<Complex64>> = family
        .members
        .par_iter()
        .map(|pi| {
            let pair = RsPair::new(pi, pi0c.as_ref(), ModelChoice::Auto)?;
            Ok(expand_on_table(&table, &pair, kind.series_kind())?.values)
        })
        .collect::<Result<_>>()?;
    let scale: Vec<Option<f64>> = match pi0 {
        None => vec![Some(1.0); table.len()],
        Some(p0) => {
            let diag = expand_on_table(&table, &RsPair::new(p0, Some(p0), ModelChoice::Auto)?, SeriesKind::Lambda)?;
            diag.values
                .iter()
                .map(|v| (v.re > 0.0).then(|| v.re.sqrt().recip()))
                .collect()
        }
    };
    let keep: Vec<usize> = (0..table.len()).filter(|&j| scale[j].is_some()).collect();
    let entries = DMatrix::from_fn(rows.len(), keep.len(), |i, c| {
        let j = keep[c];
        rows[i][j] * scale[j].unwrap_or(0.0)
    });
    Ok(SieveMatrix {
        entries,
        dropped_columns: table.len() - keep.len(),
        column_norms: keep.iter().map(|&j| table.ideals()[j].norm).collect(),
    })
}

/// The smaller Gram matrix: A A* when rows <= columns, otherwise A* A.
/// Column blocks of `GRAM_BLOCK` are summed in parallel and reduced in order.
pub fn gram_matrix(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (m, k) = a.shape();
    if m <= k {
        let blocks: Vec<DMatrix<Complex64>> = (0..k.div_ceil(GRAM_BLOCK))
            .into_par_iter()
            .map(|b| {
                let lo = b * GRAM_BLOCK;
                let hi = (lo + GRAM_BLOCK).min(k);
                let sub = a.columns(lo, hi - lo);
                sub * sub.adjoint()
            })
            .collect();
        blocks.into_iter().fold(DMatrix::zeros(m, m), |acc, g| acc + g)
    } else {
        a.adjoint() * a
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SieveConstant {
    pub value: f64,
    pub rows: usize,
    pub columns: usize,
    pub dropped_columns: usize,
    pub frobenius_sq: f64,
    /// Set when the matrix is identically zero.
    pub zero_matrix: bool,
}

/// Largest eigenvalue of A* A.
pub fn sieve_constant(family: &Family, n: u64, pi0: Option<&Representation>, kind: SieveKind) -> Result<SieveConstant> {
    let sm = sieve_matrix(family, n, pi0, kind)?;
    constant_of_matrix(&sm.entries, sm.dropped_columns)
}

pub fn constant_of_matrix(a: &DMatrix<Complex64>, dropped: usize) -> Result<SieveConstant> {
    let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let (rows, columns) = a.shape();
    if frob == 0.0 {
        return Ok(SieveConstant {
            value: 0.0,
            rows,
            columns,
            dropped_columns: dropped,
            frobenius_sq: 0.0,
            zero_matrix: true,
        });
    }
    let (eig, _) = hermitian_eigenvalues(&gram_matrix(a))?;
    Ok(SieveConstant {
        value: eig.last().copied().unwrap_or(0.0).max(0.0),
        rows,
        columns,
        dropped_columns: dropped,
        frobenius_sq: frob,
        zero_matrix: false,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerIteration {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest Rayleigh quotient of a PSD Hermitian matrix from `starts` seeded
/// Gaussian unit vectors, each refined by power iteration.
pub fn power_iteration(g: &DMatrix<Complex64>, starts: usize, seed: u64) -> PowerIteration {
    let n = g.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = PowerIteration {
        value: 0.0,
        iterations: 0,
        converged: true,
    };
    if n == 0 {
        return best;
    }
    for _ in 0..starts.max(1) {
        let mut v = nalgebra::DVector::from_fn(n, |_, _| {
            Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        v /= Complex64::new(v.norm(), 0.0);
        let mut lambda = 0.0;
        let mut converged = false;
        let mut it = 0;
        while it < POWER_MAX_ITERATIONS {
            it += 1;
            let w = g * &v;
            let next = v.dotc(&w).re;
            let norm = w.norm();
            if norm == 0.0 {
                lambda = 0.0;
                converged = true;
                break;
            }
            v = w / Complex64::new(norm, 0.0);
            if (next - lambda).abs() <= POWER_TOLERANCE * next.abs().max(1.0) {
                lambda = next;
                converged = true;
                break;
            }
            lambda = next;
        }
        if lambda > best.value {
            best.value = lambda;
        }
        best.iterations = best.iterations.max(it);
        best.converged &= converged;
    }
    best
}

/// One row of the shape table.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub n: u64,
    pub measured: f64,
    pub trivial: f64,
    pub frobenius_sq: f64,
    pub shape_main: f64,
    pub shape_conjectural: f64,
    pub shape_theta_exponent: f64,
    pub shape_theta_mixed: f64,
    pub shape_only: bool,
}

/// Column names matching `BoundRow`.
pub const BOUND_TABLE_HEADER: [&str; 9] = [
    "N",
    "measured_C",
    "trivial_N_S",
    "frobenius_sq",
    "shape_N_plus_Q^n_S",
    "shape_N_plus_sqrtN_Q^(n/2)_S",
    "shape_N_plus_Q^(4theta_n^2+n)_S",
    "shape_N_plus_N^(1/2+theta)_Q^(n(1/2-theta))_S",
    "shape_only",
];

pub fn bound_table(family: &Family, n_list: &[u64], pi0: Option<&Representation>, kind: SieveKind) -> Result<Vec<BoundRow>> {
    let deg = family
        .degree()
        .ok_or_else(|| Error::usage("bound shapes need a family of common degree"))? as f64;
    let theta = theta_bound(deg as usize);
    let q = family.q_max;
    let s = family.len() as f64;
    n_list
        .iter()
        .map(|&n| {
            let c = sieve_constant(family, n, pi0, kind)?;
            let nf = n as f64;
            Ok(BoundRow {
                n,
                measured: c.value,
                trivial: nf * s,
                frobenius_sq: c.frobenius_sq,
                shape_main: nf + q.powf(deg) * s,
                shape_conjectural: nf + nf.sqrt() * q.powf(deg / 2.0) * s,
                shape_theta_exponent: nf + q.powf(4.0 * theta * deg * deg + deg) * s,
                shape_theta_mixed: nf + nf.powf(0.5 + theta) * q.powf(deg * (0.5 - theta)) * s,
                shape_only: true,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::NumberFieldSpec;

    #[test]
    fn trivial_character_at_three() {
        let q = NumberFieldSpec::rationals();
        let fam = Family::new(&q, vec![Representation::trivial(&q)], "t").unwrap();
        let c = sieve_constant(&fam, 3, None, SieveKind::Lambda).unwrap();
        assert!((c.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_agrees() {
        let fam = crate::localdata::dirichlet_character_family(7).unwrap();
        let sm = sieve_matrix(&fam, 60, None, SieveKind::Lambda).unwrap();
        let c = constant_of_matrix(&sm.entries, 0).unwrap();
        let p = power_iteration(&gram_matrix(&sm.entries), 20, 1);
        assert!((c.value - p.value).abs() <= 1e-6 * c.value);
    }
}
