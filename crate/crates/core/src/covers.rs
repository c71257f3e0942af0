//! Positive semi-definite covers: family coefficient matrices, eigenvalue
//! verdicts, randomized bilinear inequalities, and rank-one decompositions
//! closed under scaling, sums, products and exponentials.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::coeffs::{coefficient_at, ModelChoice, RsPair, SeriesKind};
use crate::error::{Error, Result};
use crate::ideals::{IdealIndex, IdealTable, NumberFieldSpec};
use crate::localdata::{Family, Representation};

pub const DEFAULT_PSD_TOLERANCE: f64 = 1e-9;
/// Hermitian defect beyond which a matrix signals a coefficient bug.
pub const HERMITIAN_LIMIT: f64 = 1e-6;
/// Allowed excess of |d_j| over 1.
pub const MODULUS_SLACK: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Lambda,
    Mu,
    BigLambda,
    LogL,
    /// lambda_{pi x pi'~} - lambda_pi conj(lambda_pi').
    LambdaMinusProduct,
}

impl MatrixKind {
    pub fn name(&self) -> &'static str {
        match self {
            MatrixKind::Lambda => "lambda",
            MatrixKind::Mu => "mu",
            MatrixKind::BigLambda => "biglambda",
            MatrixKind::LogL => "logl",
            MatrixKind::LambdaMinusProduct => "lambda_minus_product",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    pub ideal: IdealIndex,
    pub kind: MatrixKind,
    pub entries: DMatrix<Complex64>,
}

/// Pair data for a family, reused across ideals.
pub struct FamilyView<'a> {
    pub family: &'a Family,
    pairs: Vec<RsPair<'a>>,
    singles: Vec<RsPair<'a>>,
}

impl<'a> FamilyView<'a> {
    pub fn new(family: &'a Family) -> Result<Self> {
        let m = family.len();
        let mut pairs = Vec::with_capacity(m * m);
        for a in &family.members {
            for b in &family.members {
                pairs.push(RsPair::new(a, Some(b), ModelChoice::Auto)?);
            }
        }
        let singles = family
            .members
            .iter()
            .map(|a| RsPair::new(a, None, ModelChoice::Auto))
            .collect::<Result<_>>()?;
        Ok(Self { family, pairs, singles })
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    /// lambda_{pi}(n) for every member.
    pub fn standard(&self, ideal: &IdealIndex) -> Result<Vec<Complex64>> {
        self.singles
            .iter()
            .map(|p| coefficient_at(p, ideal, SeriesKind::Lambda))
            .collect()
    }

    pub fn matrix(&self, ideal: &IdealIndex, kind: MatrixKind) -> Result<CoefficientMatrix> {
        let m = self.len();
        let series = match kind {
            MatrixKind::Lambda | MatrixKind::LambdaMinusProduct => SeriesKind::Lambda,
            MatrixKind::Mu => SeriesKind::Mu,
            MatrixKind::BigLambda => SeriesKind::BigLambda,
            MatrixKind::LogL => SeriesKind::LogL,
        };
        let mut entries = DMatrix::from_element(m, m, ZERO);
        for i in 0..m {
            for j in 0..m {
                entries[(i, j)] = coefficient_at(&self.pairs[i * m + j], ideal, series)?;
            }
        }
        if kind == MatrixKind::LambdaMinusProduct {
            let v = self.standard(ideal)?;
            for i in 0..m {
                for j in 0..m {
                    entries[(i, j)] -= v[i] * v[j].conj();
                }
            }
        }
        Ok(CoefficientMatrix {
            ideal: ideal.clone(),
            kind,
            entries,
        })
    }
}

/// Entry (pi, pi') is the coefficient of L(s, pi x pi'~) of the requested kind.
pub fn coefficient_matrix(family: &Family, ideal: &IdealIndex, kind: MatrixKind) -> Result<CoefficientMatrix> {
    FamilyView::new(family)?.matrix(ideal, kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub min_eigenvalue: f64,
    pub spectral_norm: f64,
    pub hermitian_defect: f64,
    pub verdict: bool,
}

/// Hermitian eigenvalues (ascending) after symmetrizing; errors on a
/// Hermitian defect above `HERMITIAN_LIMIT` relative to max(1, max |entry|).
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, f64)> {
    if m.nrows() != m.ncols() {
        return Err(Error::usage("matrix is not square"));
    }
    let adj = m.adjoint();
    let defect = (m - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if defect > HERMITIAN_LIMIT * scale {
        return Err(Error::DataIntegrity(format!(
            "matrix is not Hermitian (defect {defect:e} at scale {scale:e})"
        )));
    }
    if m.nrows() == 0 {
        return Ok((Vec::new(), defect));
    }
    let sym = (m + adj) * Complex64::new(0.5, 0.0);
    let mut eig: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok((eig, defect))
}

/// Verdict: min eigenvalue >= -tol * spectral norm.
pub fn psd_check(m: &CoefficientMatrix, tol: f64) -> Result<PsdVerdict> {
    psd_check_matrix(&m.entries, tol)
}

pub fn psd_check_matrix(m: &DMatrix<Complex64>, tol: f64) -> Result<PsdVerdict> {
    let (eig, defect) = hermitian_eigenvalues(m)?;
    let min = eig.first().copied().unwrap_or(0.0);
    let norm = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
    Ok(PsdVerdict {
        min_eigenvalue: min,
        spectral_norm: norm,
        hermitian_defect: defect,
        verdict: min >= -tol * norm.max(PSD_SCALE_FLOOR),
    })
}

/// Lower bound on the scale used for the PSD tolerance, so a matrix that is
/// zero up to cancellation error is not rejected.
pub const PSD_SCALE_FLOOR: f64 = 1.0;

/// Which series the coefficient series lambda is asked to cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CoverTarget {
    Lambda,
    Mu,
    Log,
}

impl CoverTarget {
    pub fn series_kind(&self) -> SeriesKind {
        match self {
            CoverTarget::Lambda => SeriesKind::Lambda,
            CoverTarget::Mu => SeriesKind::Mu,
            CoverTarget::Log => SeriesKind::LogL,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CoverTarget::Lambda => "lambda",
            CoverTarget::Mu => "mu",
            CoverTarget::Log => "log",
        }
    }
}

/// RHS - LHS of the averaged bound:
/// lambda_{pi0 x pi0~} * sum w_pi conj(w_pi') lambda_{pi x pi'~} - |sum w_pi c_pi|^2.
pub fn bilinear_margin(diag0: f64, m: &DMatrix<Complex64>, targets: &[Complex64], w: &[Complex64]) -> f64 {
    let k = w.len();
    let mut quad = ZERO;
    for i in 0..k {
        if w[i] == ZERO {
            continue;
        }
        let mut row = ZERO;
        for j in 0..k {
            row += m[(i, j)] * w[j].conj();
        }
        quad += w[i] * row;
    }
    let lin: Complex64 = w.iter().zip(targets).map(|(a, b)| a * b).sum();
    diag0 * quad.re - lin.norm_sqr()
}

/// Weight vectors for a sweep: all-ones, one spike per member, then `trials`
/// seeded complex Gaussian vectors.
pub fn sweep_weights(members: usize, trials: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(1 + members + trials);
    out.push(vec![ONE; members]);
    for i in 0..members {
        let mut v = vec![ZERO; members];
        v[i] = ONE;
        out.push(v);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        out.push(
            (0..members)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect(),
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct BilinearOutcome {
    pub ideal_norm: u64,
    pub target: CoverTarget,
    pub worst_margin: f64,
    pub argmin_trial: usize,
    pub argmin_weights: Vec<(f64, f64)>,
    pub seed: u64,
}

/// Reusable state for bilinear sweeps over many ideals: the family view,
/// the pi0 pairs and a fixed weight set.
pub struct BilinearSweep<'a> {
    view: FamilyView<'a>,
    pi0: &'a Representation,
    contra: Vec<Representation>,
    weights: Vec<Vec<Complex64>>,
    pub seed: u64,
}

impl<'a> BilinearSweep<'a> {
    pub fn new(family: &'a Family, pi0: &'a Representation, trials: usize, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::usage("bilinear check needs trials >= 1"));
        }
        if pi0.field != family.field {
            return Err(Error::usage("pi0 lives over a different field than the family"));
        }
        Ok(Self {
            view: FamilyView::new(family)?,
            pi0,
            contra: family.members.iter().map(Representation::contragredient).collect(),
            weights: sweep_weights(family.len(), trials, seed),
            seed,
        })
    }

    pub fn check(&self, target: CoverTarget, ideal: &IdealIndex) -> Result<BilinearOutcome> {
        let m = self.view.matrix(ideal, MatrixKind::Lambda)?.entries;
        let diag0 = coefficient_at(&RsPair::new(self.pi0, Some(self.pi0), ModelChoice::Auto)?, ideal, SeriesKind::Lambda)?.re;
        let targets = self
            .contra
            .iter()
            .map(|c| coefficient_at(&RsPair::new(self.pi0, Some(c), ModelChoice::Auto)?, ideal, target.series_kind()))
            .collect::<Result<Vec<_>>>()?;
        let (mut worst, mut arg) = (f64::INFINITY, 0usize);
        for (t, w) in self.weights.iter().enumerate() {
            let margin = bilinear_margin(diag0, &m, &targets, w);
            if margin < worst {
                worst = margin;
                arg = t;
            }
        }
        Ok(BilinearOutcome {
            ideal_norm: ideal.norm,
            target,
            worst_margin: worst,
            argmin_trial: arg,
            argmin_weights: self.weights[arg].iter().map(|z| (z.re, z.im)).collect(),
            seed: self.seed,
        })
    }
}

/// Minimum over seeded weight vectors of the averaged-bound margin at one ideal.
/// `pi0` defaults to the trivial representation of the family's field.
pub fn bilinear_inequality_check(
    target: CoverTarget,
    family: &Family,
    pi0: Option<&Representation>,
    ideal: &IdealIndex,
    trials: usize,
    seed: u64,
) -> Result<BilinearOutcome> {
    let trivial = Representation::trivial(&family.field);
    BilinearSweep::new(family, pi0.unwrap_or(&trivial), trials, seed)?.check(target, ideal)
}

/// One rank-one piece d * u(x) conj(u(y)) / N(n)^s.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverTerm {
    pub d: Complex64,
    pub ideal: IdealIndex,
    pub u: Vec<Complex64>,
}

/// A covered series A = sum d_j u_j(x) conj(u_j(y)) N(n_j)^{-s} together with
/// its cover A+ = sum u_j(x) conj(u_j(y)) N(n_j)^{-s}.
#[derive(Debug, Clone)]
pub struct CoverDecomposition {
    pub field: NumberFieldSpec,
    pub labels: Vec<String>,
    pub terms: Vec<CoverTerm>,
}

/// Per-ideal reconstructed coefficient matrices: (covered, cover).
pub type Reconstruction = BTreeMap<IdealIndex, (DMatrix<Complex64>, DMatrix<Complex64>)>;

impl CoverDecomposition {
    pub fn members(&self) -> usize {
        self.labels.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            if t.d.norm() > 1.0 + MODULUS_SLACK {
                return Err(Error::Invariant(format!("term {i}: |d| = {} exceeds 1", t.d.norm())));
            }
            if t.u.len() != self.members() {
                return Err(Error::Invariant(format!("term {i}: u has length {}, expected {}", t.u.len(), self.members())));
            }
            t.ideal.validate(&self.field)?;
        }
        Ok(())
    }

    pub fn reconstruct(&self) -> Reconstruction {
        let m = self.members();
        let mut out: Reconstruction = BTreeMap::new();
        for t in &self.terms {
            let entry = out
                .entry(t.ideal.clone())
                .or_insert_with(|| (DMatrix::from_element(m, m, ZERO), DMatrix::from_element(m, m, ZERO)));
            for i in 0..m {
                for j in 0..m {
                    let r = t.u[i] * t.u[j].conj();
                    entry.0[(i, j)] += t.d * r;
                    entry.1[(i, j)] += r;
                }
            }
        }
        out
    }

    /// Largest deviation of the reconstructed covered series from `target`,
    /// over the listed ideals; missing ideals reconstruct to zero.
    pub fn residual<F>(&self, ideals: &[IdealIndex], mut target: F) -> Result<f64>
    where
        F: FnMut(&IdealIndex) -> Result<DMatrix<Complex64>>,
    {
        let rec = self.reconstruct();
        let m = self.members();
        let zero = DMatrix::from_element(m, m, ZERO);
        let mut worst = 0.0f64;
        for id in ideals {
            let got = rec.get(id).map_or(&zero, |p| &p.0);
            let want = target(id)?;
            worst = worst.max((got - want).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        Ok(worst)
    }

    /// True when every reconstructed cover matrix is PSD.
    pub fn cover_is_psd(&self, tol: f64) -> Result<bool> {
        for (_, (_, cover)) in self.reconstruct() {
            if !psd_check_matrix(&cover, tol)?.verdict {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The log-decomposition of a family of GL(1) members: terms (p^f, chi(p)^f / sqrt f)
/// for primes coprime to every conductor, N(p^f) <= bound.
pub fn gl1_log_decomposition(family: &Family, bound: u64) -> Result<CoverDecomposition> {
    let chars = family
        .members
        .iter()
        .map(|m| {
            m.character_data()
                .ok_or_else(|| Error::usage(format!("{} is not a GL(1) member with character data", m.label)))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = IdealTable::new(&family.field, bound)?;
    let mut terms = Vec::new();
    for id in table.ideals() {
        let Some((pr, f)) = id.as_prime_power() else { continue };
        if chars.iter().any(|c| c.modulus % pr.p == 0) {
            continue;
        }
        let s = (f as f64).sqrt();
        terms.push(CoverTerm {
            d: ONE,
            ideal: id.clone(),
            u: chars.iter().map(|c| c.value(pr.p).powu(f) / s).collect(),
        });
    }
    Ok(CoverDecomposition {
        field: family.field,
        labels: family.members.iter().map(|m| m.label.clone()).collect(),
        terms,
    })
}

/// The log-decomposition term at one ideal; ramified ideals are unsupported.
pub fn gl1_log_term(family: &Family, ideal: &IdealIndex) -> Result<Option<CoverTerm>> {
    let chars = family
        .members
        .iter()
        .map(|m| m.character_data().ok_or_else(|| Error::usage(format!("{} has no character data", m.label))))
        .collect::<Result<Vec<_>>>()?;
    let Some((pr, f)) = ideal.as_prime_power() else { return Ok(None) };
    if let Some(c) = chars.iter().find(|c| c.modulus % pr.p == 0) {
        return Err(Error::Unsupported(format!(
            "log-decomposition at the ramified ideal {} (modulus {}) has no explicit form",
            ideal.ideal_id(),
            c.modulus
        )));
    }
    let s = (f as f64).sqrt();
    Ok(Some(CoverTerm {
        d: ONE,
        ideal: ideal.clone(),
        u: chars.iter().map(|c| c.value(pr.p).powu(f) / s).collect(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoverOp {
    Scale(Complex64),
    Add,
    Mul,
    Exp,
}

fn pointwise(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Closure operations. `b` is required for `Add` and `Mul`; `truncation`
/// bounds the ideal norms produced by `Mul` and `Exp`.
pub fn cover_ops(a: &CoverDecomposition, b: Option<&CoverDecomposition>, op: CoverOp, truncation: u64) -> Result<CoverDecomposition> {
    if let Some(b) = b {
        if b.field != a.field || b.labels != a.labels {
            return Err(Error::usage("cover decompositions over different families"));
        }
    }
    let need_b = || b.ok_or_else(|| Error::usage("operation needs a second decomposition"));
    if matches!(op, CoverOp::Mul | CoverOp::Exp) && truncation < 1 {
        return Err(Error::usage("truncation below 1 cannot represent any term"));
    }
    let terms = match op {
        CoverOp::Scale(z) => {
            let r = z.norm();
            if r == 0.0 {
                Vec::new()
            } else {
                let s = r.sqrt();
                a.terms
                    .iter()
                    .map(|t| CoverTerm {
                        d: t.d * z / r,
                        ideal: t.ideal.clone(),
                        u: t.u.iter().map(|x| x * s).collect(),
                    })
                    .collect()
            }
        }
        CoverOp::Add => a.terms.iter().chain(need_b()?.terms.iter()).cloned().collect(),
        CoverOp::Mul => {
            let b = need_b()?;
            let mut out = Vec::new();
            for s in &a.terms {
                for t in &b.terms {
                    if s.ideal.norm.saturating_mul(t.ideal.norm) <= truncation {
                        out.push(CoverTerm {
                            d: s.d * t.d,
                            ideal: s.ideal.mul(&t.ideal)?,
                            u: pointwise(&s.u, &t.u),
                        });
                    }
                }
            }
            out
        }
        CoverOp::Exp => exp_terms(a, truncation)?,
    };
    let out = CoverDecomposition {
        field: a.field,
        labels: a.labels.clone(),
        terms,
    };
    out.validate()?;
    Ok(out)
}

/// exp(A) = sum_k A^k / k!: one unit term plus, for every multiset of terms
/// with multiplicities m_i and product norm within the truncation, the
/// pointwise product weighted by sqrt(1 / prod m_i!).
fn exp_terms(a: &CoverDecomposition, truncation: u64) -> Result<Vec<CoverTerm>> {
    if let Some(t) = a.terms.iter().find(|t| t.ideal.is_unit()) {
        return Err(Error::usage(format!(
            "exp needs a series with zero unit-ideal coefficient (found a unit term with d = {})",
            t.d
        )));
    }
    let m = a.members();
    let mut out = vec![CoverTerm {
        d: ONE,
        ideal: IdealIndex::unit(&a.field),
        u: vec![ONE; m],
    }];
    let terms: Vec<&CoverTerm> = a.terms.iter().filter(|t| t.ideal.norm <= truncation).collect();

    struct State {
        d: Complex64,
        ideal: IdealIndex,
        u: Vec<Complex64>,
        inv_fact: f64,
    }
    fn rec(terms: &[&CoverTerm], start: usize, st: &State, truncation: u64, out: &mut Vec<CoverTerm>) -> Result<()> {
        for i in start..terms.len() {
            let t = terms[i];
            let mut cur = State {
                d: st.d,
                ideal: st.ideal.clone(),
                u: st.u.clone(),
                inv_fact: st.inv_fact,
            };
            let mut mult = 0u32;
            loop {
                if cur.ideal.norm.saturating_mul(t.ideal.norm) > truncation {
                    break;
                }
                mult += 1;
                cur.d *= t.d;
                cur.ideal = cur.ideal.mul(&t.ideal)?;
                cur.u = pointwise(&cur.u, &t.u);
                cur.inv_fact /= mult as f64;
                let s = cur.inv_fact.sqrt();
                out.push(CoverTerm {
                    d: cur.d,
                    ideal: cur.ideal.clone(),
                    u: cur.u.iter().map(|x| x * s).collect(),
                });
                rec(terms, i + 1, &cur, truncation, out)?;
            }
        }
        Ok(())
    }
    let root = State {
        d: ONE,
        ideal: IdealIndex::unit(&a.field),
        u: vec![ONE; m],
        inv_fact: 1.0,
    };
    rec(&terms, 0, &root, truncation, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localdata::{dirichlet_character_family, DirichletCharacter};

    #[test]
    fn unit_ideal_gives_all_ones() {
        let fam = dirichlet_character_family(5).unwrap();
        let unit = IdealIndex::unit(&fam.field);
        let m = coefficient_matrix(&fam, &unit, MatrixKind::Lambda).unwrap();
        assert!(m.entries.iter().all(|z| *z == ONE));
    }

    #[test]
    fn ramified_diagonal_is_exact() {
        let q = NumberFieldSpec::rationals();
        let chi = Representation::from_character(DirichletCharacter::primitive_mod(3).remove(0));
        let fam = Family::new(&q, vec![chi, Representation::trivial(&q)], "t").unwrap();
        let m = coefficient_matrix(&fam, &IdealIndex::rational(3).unwrap(), MatrixKind::Lambda).unwrap();
        assert_eq!(m.entries[(0, 0)], ONE);
        assert_eq!(m.entries[(0, 1)], ZERO);
    }

    #[test]
    fn identity_is_psd() {
        let v = psd_check_matrix(&DMatrix::identity(4, 4), 1e-9).unwrap();
        assert!((v.min_eigenvalue - 1.0).abs() < 1e-14 && v.verdict);
        let mut bad = DMatrix::<Complex64>::identity(2, 2);
        bad[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(psd_check_matrix(&bad, 1e-9), Err(Error::DataIntegrity(_))));
    }

    #[test]
    fn zero_weights_give_zero_margin() {
        let m = DMatrix::from_element(2, 2, ONE);
        assert_eq!(bilinear_margin(1.0, &m, &[ONE, ONE], &[ZERO, ZERO]), 0.0);
    }

    #[test]
    fn ramified_log_term_is_unsupported() {
        let fam = dirichlet_character_family(5).unwrap();
        let five = IdealIndex::rational(5).unwrap();
        assert!(matches!(gl1_log_term(&fam, &five), Err(Error::Unsupported(_))));
        assert!(gl1_log_term(&fam, &IdealIndex::rational(7).unwrap()).unwrap().is_some());
    }

    #[test]
    fn exp_rejects_unit_terms_and_tiny_truncation() {
        let fam = dirichlet_character_family(1).unwrap();
        let dec = gl1_log_decomposition(&fam, 10).unwrap();
        assert!(cover_ops(&dec, None, CoverOp::Exp, 0).is_err());
        let with_unit = cover_ops(&dec, None, CoverOp::Exp, 10).unwrap();
        assert!(cover_ops(&with_unit, None, CoverOp::Exp, 10).is_err());
    }
}
