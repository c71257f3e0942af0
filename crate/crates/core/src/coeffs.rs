//! Dirichlet coefficients of L(s, a x b~), its inverse, its negative
//! logarithmic derivative and its logarithm, assembled from local parameters.
//!
//! Convention: `expand_global(a, Some(b), ..)` expands the Rankin-Selberg
//! product of `a` with the contragredient of `b`, whose local multiset at an
//! unramified prime is {alpha_i * conj(beta_j)}. To expand L(s, a x c) pass
//! `c.contragredient()` as `b`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::KahanSum;
use crate::error::{Error, Result};
use crate::ideals::{divisors, IdealIndex, IdealTable, NumberFieldSpec, PrimeIdeal};
use crate::localdata::{DirichletCharacter, LocalParameters, Representation};

/// Largest partition size the Schur-sum path accepts.
pub const MAX_PARTITION_SIZE: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Coefficients of L.
    Lambda,
    /// Coefficients of 1/L.
    Mu,
    /// Coefficients of -L'/L.
    BigLambda,
    /// Coefficients of log L.
    LogL,
    /// Output of a convolution or other combination.
    Derived,
}

impl SeriesKind {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesKind::Lambda => "lambda",
            SeriesKind::Mu => "mu",
            SeriesKind::BigLambda => "biglambda",
            SeriesKind::LogL => "logl",
            SeriesKind::Derived => "derived",
        }
    }
}

/// How local factors at primes dividing a conductor are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RamifiedModel {
    /// The product multiset {alpha_i conj(beta_j)}, zeros included. Exact away
    /// from the conductors; a stand-in at ramified primes in degree >= 2.
    Product,
    /// Degree one only: the primitive character inducing chi * conj(chi').
    Gl1Exact,
}

/// Model selection for a pair: `Auto` is exact for characters, product otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    Auto,
    Product,
    Gl1Exact,
}

/// h_0, ..., h_kmax of the multiset.
pub fn complete_homogeneous(alphas: &[Complex64], kmax: usize) -> Vec<Complex64> {
    let mut c = vec![ZERO; kmax + 1];
    c[0] = ONE;
    for &a in alphas {
        for k in 1..=kmax {
            let prev = c[k - 1];
            c[k] += a * prev;
        }
    }
    c
}

/// The complete homogeneous symmetric polynomial h_k of the parameters.
pub fn local_lambda(params: &LocalParameters, k: usize) -> Complex64 {
    complete_homogeneous(&params.alphas, k)[k]
}

/// e_0, ..., e_n of the multiset.
pub fn elementary(alphas: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![ZERO; alphas.len() + 1];
    e[0] = ONE;
    for (i, &a) in alphas.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let prev = e[k - 1];
            e[k] += a * prev;
        }
    }
    e
}

pub fn power_sum(alphas: &[Complex64], k: u32) -> Complex64 {
    alphas.iter().map(|a| a.powu(k)).sum()
}

/// Partitions of k into at most `max_parts` parts, parts descending.
pub fn partitions(k: usize, max_parts: usize) -> Result<Vec<Vec<usize>>> {
    if k > MAX_PARTITION_SIZE {
        return Err(Error::usage(format!(
            "partition size {k} exceeds the cap of {MAX_PARTITION_SIZE}"
        )));
    }
    fn rec(rem: usize, max_part: usize, parts_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        if parts_left == 0 {
            return;
        }
        for p in (1..=rem.min(max_part)).rev() {
            cur.push(p);
            rec(rem - p, p, parts_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, max_parts, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn complex_determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .expect("nonempty range");
        if m[pivot][col].norm() == 0.0 {
            return ZERO;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            let (upper, lower) = m.split_at_mut(row);
            for (dst, src) in lower[0][col..n].iter_mut().zip(&upper[col][col..n]) {
                *dst -= f * src;
            }
        }
    }
    det
}

/// Schur polynomial s_lambda via the Jacobi-Trudi determinant det(h_{lambda_i - i + j}),
/// given h_0..h_{|lambda|} of the variables.
pub fn schur_from_h(partition: &[usize], h: &[Complex64]) -> Complex64 {
    let l = partition.len();
    if l == 0 {
        return ONE;
    }
    let m = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let idx = partition[i] as i64 - i as i64 + j as i64;
                    if idx < 0 {
                        ZERO
                    } else {
                        h.get(idx as usize).copied().unwrap_or(ZERO)
                    }
                })
                .collect()
        })
        .collect();
    complex_determinant(m)
}

/// Primitive character inducing chi * conj(chi').
pub fn rs_character(a: &DirichletCharacter, b: &DirichletCharacter) -> DirichletCharacter {
    a.mul(&b.conj()).primitive()
}

/// Coefficient of x^k in prod_{i,j} (1 - alpha_i conj(beta_j) x)^{-1}.
///
/// The product model sums s_lambda(alpha) conj(s_lambda(beta)) over partitions
/// of k with at most min(n, n') parts; the exact GL(1) model reads the
/// coefficient off the primitive character inducing chi * conj(chi').
pub fn rankin_selberg_local(
    a: &LocalParameters,
    b: &LocalParameters,
    k: usize,
    model: RamifiedModel,
) -> Result<Complex64> {
    if a.prime != b.prime {
        return Err(Error::usage("local parameters at different primes"));
    }
    match model {
        RamifiedModel::Gl1Exact => {
            let (Some(ca), Some(cb)) = (&a.character, &b.character) else {
                return Err(Error::usage("gl1_exact needs character data on both sides"));
            };
            Ok(rs_character(ca, cb).value(a.prime.p).powu(k as u32))
        }
        RamifiedModel::Product => {
            let parts = a.alphas.len().min(b.alphas.len());
            let ha = complete_homogeneous(&a.alphas, k);
            let hb = complete_homogeneous(&b.alphas, k);
            let mut acc = KahanSum::new();
            for lam in partitions(k, parts)? {
                acc.add(schur_from_h(&lam, &ha) * schur_from_h(&lam, &hb).conj());
            }
            Ok(acc.value())
        }
    }
}

/// Local data for one Rankin-Selberg pair, with the exact GL(1) character
/// precomputed once.
#[derive(Debug, Clone)]
pub struct RsPair<'a> {
    pub a: &'a Representation,
    pub b: Option<&'a Representation>,
    pub model: RamifiedModel,
    exact: Option<DirichletCharacter>,
}

impl<'a> RsPair<'a> {
    pub fn new(a: &'a Representation, b: Option<&'a Representation>, choice: ModelChoice) -> Result<Self> {
        if let Some(b) = b {
            if a.field != b.field {
                return Err(Error::usage("representations over different fields"));
            }
        }
        let chars = match b {
            Some(b) => a.character_data().zip(b.character_data()),
            None => a.character_data().map(|c| (c, Arc::new(DirichletCharacter::trivial()))),
        };
        let model = match (choice, &chars) {
            (ModelChoice::Product, _) => RamifiedModel::Product,
            (ModelChoice::Gl1Exact, None) => {
                return Err(Error::usage(format!(
                    "gl1_exact needs character data ({} / {})",
                    a.label,
                    b.map_or("none", |r| r.label.as_str())
                )))
            }
            (ModelChoice::Gl1Exact, Some(_)) | (ModelChoice::Auto, Some(_)) => RamifiedModel::Gl1Exact,
            (ModelChoice::Auto, None) => RamifiedModel::Product,
        };
        let exact = match model {
            RamifiedModel::Gl1Exact => chars.map(|(x, y)| rs_character(&x, &y)),
            RamifiedModel::Product => None,
        };
        Ok(Self { a, b, model, exact })
    }

    pub fn field(&self) -> NumberFieldSpec {
        self.a.field
    }

    /// The exact GL(1) character, when that model is in force.
    pub fn exact_character(&self) -> Option<&DirichletCharacter> {
        self.exact.as_ref()
    }

    /// The local multiset whose power series defines the local factor.
    pub fn local_multiset(&self, prime: &PrimeIdeal) -> Result<Vec<Complex64>> {
        if let Some(psi) = &self.exact {
            return Ok(vec![psi.value(prime.p)]);
        }
        let pa = self.a.local_parameters(prime)?;
        match self.b {
            None => Ok(pa.alphas),
            Some(b) => {
                let pb = b.local_parameters(prime)?;
                Ok(pa
                    .alphas
                    .iter()
                    .flat_map(|x| pb.alphas.iter().map(move |y| x * y.conj()))
                    .collect())
            }
        }
    }

    /// True when some prime up to `bound` is ramified and the product model
    /// stands in for unknown local factors.
    pub fn uses_stand_in(&self) -> bool {
        self.model == RamifiedModel::Product
            && (self.a.degree > 1 || self.b.is_some_and(|b| b.degree > 1))
            && (!self.a.conductor.is_unit() || self.b.is_some_and(|b| !b.conductor.is_unit()))
    }
}

/// Local coefficients at p^0..p^kmax of the requested kind.
pub fn local_series(multiset: &[Complex64], prime: &PrimeIdeal, kind: SeriesKind, kmax: usize) -> Vec<Complex64> {
    match kind {
        SeriesKind::Lambda => complete_homogeneous(multiset, kmax),
        SeriesKind::Mu => {
            let e = elementary(multiset);
            (0..=kmax)
                .map(|k| {
                    let v = e.get(k).copied().unwrap_or(ZERO);
                    if k % 2 == 1 {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        }
        SeriesKind::BigLambda | SeriesKind::LogL => {
            let log_p = (prime.norm as f64).ln();
            (0..=kmax)
                .map(|k| {
                    if k == 0 {
                        return ZERO;
                    }
                    let pk = power_sum(multiset, k as u32);
                    if kind == SeriesKind::BigLambda {
                        pk * log_p
                    } else {
                        pk / k as f64
                    }
                })
                .collect()
        }
        SeriesKind::Derived => vec![ZERO; kmax + 1],
    }
}

/// The coefficient of the requested kind at a single ideal.
pub fn coefficient_at(pair: &RsPair<'_>, ideal: &IdealIndex, kind: SeriesKind) -> Result<Complex64> {
    match kind {
        SeriesKind::Lambda | SeriesKind::Mu => {
            let mut acc = ONE;
            for (pr, e) in &ideal.factors {
                let m = pair.local_multiset(pr)?;
                acc *= local_series(&m, pr, kind, *e as usize)[*e as usize];
            }
            Ok(acc)
        }
        SeriesKind::BigLambda | SeriesKind::LogL => match ideal.as_prime_power() {
            Some((pr, e)) => {
                let m = pair.local_multiset(&pr)?;
                Ok(local_series(&m, &pr, kind, e as usize)[e as usize])
            }
            None => Ok(ZERO),
        },
        SeriesKind::Derived => Err(Error::usage("derived series have no local definition")),
    }
}

/// Dirichlet coefficients indexed by a shared ideal table.
#[derive(Debug, Clone)]
pub struct CoefficientSeries {
    pub field: NumberFieldSpec,
    pub kind: SeriesKind,
    pub bound: u64,
    pub table: Arc<IdealTable>,
    pub values: Vec<Complex64>,
    pub model: Option<RamifiedModel>,
    /// Set when a ramified degree >= 2 factor used the product stand-in.
    pub stand_in: bool,
}

impl CoefficientSeries {
    pub fn zeros(table: Arc<IdealTable>, kind: SeriesKind) -> Self {
        Self {
            field: table.field,
            kind,
            bound: table.bound,
            values: vec![ZERO; table.len()],
            table,
            model: None,
            stand_in: false,
        }
    }

    pub fn value(&self, ideal: &IdealIndex) -> Option<Complex64> {
        self.table.position(ideal).map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Iterates (ideal, value) in table order.
    pub fn iter(&self) -> impl Iterator<Item = (&IdealIndex, Complex64)> {
        self.table.ideals().iter().zip(self.values.iter().copied())
    }

    /// CSV rows "norm,ideal_id,re,im" with a header, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("norm,ideal_id,re,im\n");
        for (id, v) in self.iter() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                id.norm,
                id.ideal_id(),
                crate::report::fmt_f64(v.re),
                crate::report::fmt_f64(v.im)
            ));
        }
        out
    }
}

/// Expands the requested kind on a prebuilt ideal table.
pub fn expand_on_table(table: &Arc<IdealTable>, pair: &RsPair<'_>, kind: SeriesKind) -> Result<CoefficientSeries> {
    if table.field != pair.field() {
        return Err(Error::usage("ideal table and representations over different fields"));
    }
    let bound = table.bound;
    let mut locals: HashMap<PrimeIdeal, Vec<Complex64>> = HashMap::with_capacity(table.prime_ideals().len());
    for prime in table.prime_ideals() {
        let mut kmax = 1usize;
        let mut q = prime.norm;
        while q.saturating_mul(prime.norm) <= bound {
            q *= prime.norm;
            kmax += 1;
        }
        let multiset = pair.local_multiset(prime)?;
        locals.insert(*prime, local_series(&multiset, prime, kind, kmax));
    }
    let values = table
        .ideals()
        .iter()
        .map(|id| match kind {
            SeriesKind::Lambda | SeriesKind::Mu => id
                .factors
                .iter()
                .fold(ONE, |acc, (pr, e)| acc * locals[pr][*e as usize]),
            SeriesKind::BigLambda | SeriesKind::LogL => match id.as_prime_power() {
                Some((pr, e)) => locals[&pr][e as usize],
                None => ZERO,
            },
            SeriesKind::Derived => ZERO,
        })
        .collect();
    Ok(CoefficientSeries {
        field: table.field,
        kind,
        bound,
        table: table.clone(),
        values,
        model: Some(pair.model),
        stand_in: pair.uses_stand_in(),
    })
}

/// Coefficients of L(s, a x b~) (or of L(s, a) when `b` is `None`) up to norm `bound`.
pub fn expand_global(
    a: &Representation,
    b: Option<&Representation>,
    bound: u64,
    kind: SeriesKind,
) -> Result<CoefficientSeries> {
    let table = Arc::new(IdealTable::new(&a.field, bound)?);
    expand_on_table(&table, &RsPair::new(a, b, ModelChoice::Auto)?, kind)
}

/// (a * b)(n) = sum over ab = n of a(a) b(b), for norms up to `bound`.
pub fn dirichlet_convolve(a: &CoefficientSeries, b: &CoefficientSeries, bound: u64) -> Result<CoefficientSeries> {
    if a.field != b.field {
        return Err(Error::usage("cannot convolve series over different fields"));
    }
    if a.bound < bound || b.bound < bound {
        return Err(Error::usage(format!(
            "convolution to {bound} needs both inputs to reach it (have {} and {})",
            a.bound, b.bound
        )));
    }
    let table = if a.bound == bound {
        a.table.clone()
    } else {
        Arc::new(IdealTable::new(&a.field, bound)?)
    };
    let mut acc = vec![KahanSum::new(); table.len()];
    for (ia, va) in a.iter() {
        if ia.norm > bound {
            break;
        }
        if va == ZERO {
            continue;
        }
        for (ib, vb) in b.iter() {
            if ia.norm.saturating_mul(ib.norm) > bound {
                break;
            }
            let prod = ia.mul(ib)?;
            let pos = table
                .position(&prod)
                .ok_or_else(|| Error::Internal(format!("product {} missing from table", prod.ideal_id())))?;
            acc[pos].add(va * vb);
        }
    }
    Ok(CoefficientSeries {
        field: a.field,
        kind: SeriesKind::Derived,
        bound,
        values: acc.iter().map(KahanSum::value).collect(),
        table,
        model: None,
        stand_in: a.stand_in || b.stand_in,
    })
}

/// exp of a Dirichlet series with vanishing constant term, via
/// B(n) log N(n) = sum over d | n, d != 1 of A(d) log N(d) B(n/d).
pub fn dirichlet_exp(a: &CoefficientSeries) -> Result<CoefficientSeries> {
    if a.values.first().is_some_and(|v| v.norm() > 0.0) {
        return Err(Error::usage("exp needs a series with zero unit-ideal coefficient"));
    }
    let table = a.table.clone();
    let mut b = vec![ZERO; table.len()];
    if !b.is_empty() {
        b[0] = ONE;
    }
    for (i, id) in table.ideals().iter().enumerate().skip(1) {
        let mut acc = KahanSum::new();
        for d in divisors(id, None, false).into_iter().skip(1) {
            let ad = a.values[table.position(&d).expect("divisor in table")];
            if ad == ZERO {
                continue;
            }
            let rest = id.quotient(&d).expect("d divides n");
            acc.add(ad * (d.norm as f64).ln() * b[table.position(&rest).expect("cofactor in table")]);
        }
        b[i] = acc.value() / (id.norm as f64).ln();
    }
    Ok(CoefficientSeries {
        field: a.field,
        kind: SeriesKind::Derived,
        bound: a.bound,
        table,
        values: b,
        model: a.model,
        stand_in: a.stand_in,
    })
}

/// Sum over N(n) <= x of lambda_{pi x pi~}(n) / N(n).
pub fn mertens_sum(rep: &Representation, x: u64) -> Result<f64> {
    if x < 3 {
        return Err(Error::usage("mertens_sum needs X >= 3"));
    }
    let s = expand_global(rep, Some(rep), x, SeriesKind::Lambda)?;
    let mut acc = crate::arith::KahanReal::default();
    for (id, v) in s.iter() {
        acc.add(v.re / id.norm as f64);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localdata::{dirichlet_character_family, DirichletCharacter};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn h_and_e_small_cases() {
        let a = [c(0.3, 0.4), c(-0.5, 0.1)];
        let h = complete_homogeneous(&a, 2);
        assert!((h[1] - (a[0] + a[1])).norm() < 1e-15);
        assert!((h[2] - (a[0] * a[0] + a[0] * a[1] + a[1] * a[1])).norm() < 1e-15);
        let e = elementary(&a);
        assert!((e[2] - a[0] * a[1]).norm() < 1e-15);
        let single = [c(0.7, -0.2)];
        assert!((complete_homogeneous(&single, 5)[5] - single[0].powu(5)).norm() < 1e-15);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=8).map(|k| partitions(k, k.max(1)).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(partitions(6, 2).unwrap().len(), 4);
        assert!(partitions(65, 2).is_err());
    }

    #[test]
    fn first_order_rs() {
        let p = PrimeIdeal { p: 5, slot: 0, norm: 5 };
        let a = LocalParameters::new(p, vec![c(0.6, 0.8), c(0.6, -0.8)]);
        let b = LocalParameters::new(p, vec![c(0.0, 1.0), c(0.0, -1.0)]);
        let v = rankin_selberg_local(&a, &b, 1, RamifiedModel::Product).unwrap();
        let expect = (a.alphas[0] + a.alphas[1]) * (b.alphas[0].conj() + b.alphas[1].conj());
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn exact_gl1_at_the_ramified_prime() {
        let chi = Representation::from_character(DirichletCharacter::primitive_mod(3).remove(0));
        let three = PrimeIdeal { p: 3, slot: 0, norm: 3 };
        let lp = chi.local_parameters(&three).unwrap();
        assert_eq!(rankin_selberg_local(&lp, &lp, 1, RamifiedModel::Gl1Exact).unwrap(), ONE);
        assert_eq!(rankin_selberg_local(&lp, &lp, 1, RamifiedModel::Product).unwrap(), ZERO);
        let bare = LocalParameters::new(three, vec![ONE]);
        assert!(rankin_selberg_local(&bare, &bare, 1, RamifiedModel::Gl1Exact).is_err());
    }

    #[test]
    fn von_mangoldt_and_harmonic_sum() {
        let q = NumberFieldSpec::rationals();
        let triv = Representation::trivial(&q);
        let s = expand_global(&triv, Some(&triv), 30, SeriesKind::BigLambda).unwrap();
        for (id, v) in s.iter() {
            let expect = match id.as_prime_power() {
                Some((pr, _)) => (pr.p as f64).ln(),
                None => 0.0,
            };
            assert!((v.re - expect).abs() < 1e-14 && v.im == 0.0, "{}", id.norm);
        }
        let h10 = mertens_sum(&triv, 10).unwrap();
        assert!((h10 - 2.928_968_253_968_254).abs() < 1e-14);
    }

    #[test]
    fn mu_at_a_prime() {
        let fam = dirichlet_character_family(7).unwrap();
        let (a, b) = (&fam.members[3], &fam.members[5]);
        let s = expand_global(a, Some(b), 20, SeriesKind::Mu).unwrap();
        let p = IdealIndex::rational(11).unwrap();
        let expect = -(a.character().unwrap().value(11) * b.character().unwrap().value(11).conj());
        assert!((s.value(&p).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn convolution_gives_the_unit() {
        let fam = dirichlet_character_family(5).unwrap();
        let a = &fam.members[4];
        let lam = expand_global(a, None, 200, SeriesKind::Lambda).unwrap();
        let mu = expand_global(a, None, 200, SeriesKind::Mu).unwrap();
        let one = dirichlet_convolve(&lam, &mu, 200).unwrap();
        for (i, v) in one.values.iter().enumerate() {
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert!((v - expect).norm() < 1e-12);
        }
    }
}
