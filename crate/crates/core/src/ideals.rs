//! Integral ideals of the rationals and of quadratic fields.
//!
//! Ideals are stored by their prime factorization. A prime ideal is named by
//! the rational prime below it and a slot: slot 0 and slot 1 tell apart the
//! two primes over a split p, and every other prime uses slot 0. Slot 0 over a
//! split p is the prime attached to the smallest nonnegative root modulo p of
//! the minimal polynomial of the standard integral generator (x^2 - x + (1-D)/4
//! when D = 1 mod 4, x^2 - D/4 otherwise).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, is_squarefree, kronecker_prime, primes_up_to};
use crate::error::{Error, Result};

/// Default ceiling on the number of ideals a single enumeration may produce.
pub const DEFAULT_IDEAL_CEILING: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Rationals,
    Quadratic(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumberFieldSpec {
    pub kind: FieldKind,
    pub discriminant: i64,
    pub degree: u32,
    pub real_places: u32,
    pub complex_places: u32,
}

impl NumberFieldSpec {
    pub fn rationals() -> Self {
        Self {
            kind: FieldKind::Rationals,
            discriminant: 1,
            degree: 1,
            real_places: 1,
            complex_places: 0,
        }
    }

    /// The field generated by the square root of a squarefree integer d != 0, 1.
    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 1 || !is_squarefree(d) {
            return Err(Error::usage(format!(
                "quadratic field needs a squarefree d other than 0 and 1, got {d}"
            )));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let (real_places, complex_places) = if d > 0 { (2, 0) } else { (0, 1) };
        Ok(Self {
            kind: FieldKind::Quadratic(d),
            discriminant,
            degree: 2,
            real_places,
            complex_places,
        })
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self.kind, FieldKind::Rationals)
    }

    pub fn abs_discriminant(&self) -> u64 {
        self.discriminant.unsigned_abs()
    }

    pub fn label(&self) -> String {
        match self.kind {
            FieldKind::Rationals => "Q".to_string(),
            FieldKind::Quadratic(d) => format!("Q(sqrt({d}))"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let expected = match self.kind {
            FieldKind::Rationals => Self::rationals(),
            FieldKind::Quadratic(d) => Self::quadratic(d)?,
        };
        if *self != expected {
            return Err(Error::DataIntegrity(format!(
                "inconsistent field record for {}",
                self.label()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub slot: u8,
    pub norm: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplittingType {
    /// The only prime of the rationals above p.
    Rational,
    Split,
    Inert,
    Ramified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSplitting {
    pub kind: SplittingType,
    pub primes: Vec<PrimeIdeal>,
}

pub fn split_prime(field: &NumberFieldSpec, p: u64) -> Result<PrimeSplitting> {
    if !is_prime(p) {
        return Err(Error::usage(format!("{p} is not prime")));
    }
    let one = |slot, norm| PrimeIdeal { p, slot, norm };
    Ok(match field.kind {
        FieldKind::Rationals => PrimeSplitting {
            kind: SplittingType::Rational,
            primes: vec![one(0, p)],
        },
        FieldKind::Quadratic(_) => match kronecker_prime(field.discriminant, p) {
            0 => PrimeSplitting {
                kind: SplittingType::Ramified,
                primes: vec![one(0, p)],
            },
            1 => PrimeSplitting {
                kind: SplittingType::Split,
                primes: vec![one(0, p), one(1, p)],
            },
            _ => PrimeSplitting {
                kind: SplittingType::Inert,
                primes: vec![one(0, p * p)],
            },
        },
    })
}

/// Roots modulo p of the generator's minimal polynomial at a split prime,
/// ascending; the first belongs to slot 0.
pub fn split_roots(field: &NumberFieldSpec, p: u64) -> Option<[u64; 2]> {
    let d = field.discriminant;
    if field.is_rationals() || kronecker_prime(d, p) != 1 {
        return None;
    }
    let pi = p as i128;
    let (b, c): (i128, i128) = if d.rem_euclid(4) == 1 {
        (-1, ((1 - d as i128) / 4).rem_euclid(pi))
    } else {
        (0, (-(d as i128) / 4).rem_euclid(pi))
    };
    let roots: Vec<u64> = (0..p)
        .filter(|&x| {
            let x = x as i128;
            (x * x + b * x + c).rem_euclid(pi) == 0
        })
        .collect();
    match roots.as_slice() {
        [r0, r1] => Some([*r0, *r1]),
        _ => None,
    }
}

/// A nonzero integral ideal, carried with its norm and canonical factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealIndex {
    pub discriminant: i64,
    pub norm: u64,
    pub factors: Vec<(PrimeIdeal, u32)>,
}

impl Ord for IdealIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm
            .cmp(&other.norm)
            .then_with(|| self.factors.cmp(&other.factors))
            .then_with(|| self.discriminant.cmp(&other.discriminant))
    }
}

impl PartialOrd for IdealIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IdealIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ideal_id())
    }
}

impl IdealIndex {
    pub fn unit(field: &NumberFieldSpec) -> Self {
        Self {
            discriminant: field.discriminant,
            norm: 1,
            factors: Vec::new(),
        }
    }

    pub fn prime(field: &NumberFieldSpec, prime: PrimeIdeal) -> Self {
        Self::prime_power(field, prime, 1)
    }

    pub fn prime_power(field: &NumberFieldSpec, prime: PrimeIdeal, exp: u32) -> Self {
        if exp == 0 {
            return Self::unit(field);
        }
        Self {
            discriminant: field.discriminant,
            norm: prime.norm.pow(exp),
            factors: vec![(prime, exp)],
        }
    }

    /// Builds an ideal from (prime, exponent) pairs, merging repeats.
    pub fn from_factors(field: &NumberFieldSpec, factors: &[(PrimeIdeal, u32)]) -> Result<Self> {
        let mut merged: Vec<(PrimeIdeal, u32)> = Vec::new();
        let mut sorted = factors.to_vec();
        sorted.sort();
        for (pr, e) in sorted {
            if e == 0 {
                continue;
            }
            match merged.last_mut() {
                Some((last, le)) if *last == pr => *le += e,
                _ => merged.push((pr, e)),
            }
        }
        let mut norm: u64 = 1;
        for (pr, e) in &merged {
            let split = split_prime(field, pr.p)?;
            if !split.primes.contains(pr) {
                return Err(Error::usage(format!(
                    "({}, slot {}) is not a prime ideal of {}",
                    pr.p,
                    pr.slot,
                    field.label()
                )));
            }
            norm = pr
                .norm
                .checked_pow(*e)
                .and_then(|x| norm.checked_mul(x))
                .ok_or_else(|| Error::usage("ideal norm overflows 64 bits"))?;
        }
        Ok(Self {
            discriminant: field.discriminant,
            norm,
            factors: merged,
        })
    }

    /// The ideal (n) of the rationals.
    pub fn rational(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("the zero ideal is not indexed"));
        }
        let field = NumberFieldSpec::rationals();
        let factors: Vec<(PrimeIdeal, u32)> = crate::arith::factorize(n)
            .into_iter()
            .map(|(p, e)| (PrimeIdeal { p, slot: 0, norm: p }, e))
            .collect();
        Self::from_factors(&field, &factors)
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn as_prime_power(&self) -> Option<(PrimeIdeal, u32)> {
        match self.factors.as_slice() {
            [(pr, e)] => Some((*pr, *e)),
            _ => None,
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn exponent_of(&self, prime: &PrimeIdeal) -> u32 {
        self.factors
            .iter()
            .find(|(pr, _)| pr == prime)
            .map_or(0, |&(_, e)| e)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.discriminant == other.discriminant
            && self.factors.iter().all(|(pr, e)| other.exponent_of(pr) >= *e)
    }

    pub fn is_coprime_to(&self, other: &Self) -> bool {
        self.factors.iter().all(|(pr, _)| other.exponent_of(pr) == 0)
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.discriminant != other.discriminant {
            return Err(Error::usage(format!(
                "ideals from different fields (discriminants {} and {})",
                self.discriminant, other.discriminant
            )));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, pick: impl Fn(u32, u32) -> u32) -> Self {
        let mut factors = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            let next = match (self.factors.get(i), other.factors.get(j)) {
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    Ordering::Less => {
                        i += 1;
                        (a.0, pick(a.1, 0))
                    }
                    Ordering::Greater => {
                        j += 1;
                        (b.0, pick(0, b.1))
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (a.0, pick(a.1, b.1))
                    }
                },
                (Some(a), None) => {
                    i += 1;
                    (a.0, pick(a.1, 0))
                }
                (None, Some(b)) => {
                    j += 1;
                    (b.0, pick(0, b.1))
                }
                (None, None) => unreachable!(),
            };
            if next.1 > 0 {
                factors.push(next);
            }
        }
        let norm = factors
            .iter()
            .map(|(pr, e)| pr.norm.pow(*e))
            .product();
        Self {
            discriminant: self.discriminant,
            norm,
            factors,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        Ok(self.combine(other, |a, b| a + b))
    }

    /// self / other, if other divides self.
    pub fn quotient(&self, other: &Self) -> Option<Self> {
        if !other.divides(self) {
            return None;
        }
        Some(self.combine(other, |a, b| a - b))
    }

    /// Stable text label: "1" for the unit ideal, otherwise prime labels
    /// joined by '*', with 'a'/'b' marking the two primes over a split p.
    pub fn ideal_id(&self) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|(pr, e)| {
                let split =
                    self.discriminant != 1 && kronecker_prime(self.discriminant, pr.p) == 1;
                let mut s = pr.p.to_string();
                if split {
                    s.push(if pr.slot == 0 { 'a' } else { 'b' });
                }
                if *e > 1 {
                    s.push('^');
                    s.push_str(&e.to_string());
                }
                s
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Checks the norm/factorization invariant against the field's splitting.
    pub fn validate(&self, field: &NumberFieldSpec) -> Result<()> {
        if self.discriminant != field.discriminant {
            return Err(Error::DataIntegrity("ideal carries a foreign discriminant".into()));
        }
        let rebuilt = Self::from_factors(field, &self.factors)
            .map_err(|e| Error::DataIntegrity(e.to_string()))?;
        if rebuilt != *self {
            return Err(Error::DataIntegrity(format!(
                "ideal {} fails the norm/factorization invariant",
                self.ideal_id()
            )));
        }
        Ok(())
    }
}

/// Componentwise min and max of exponents.
pub fn gcd_lcm(a: &IdealIndex, b: &IdealIndex) -> Result<(IdealIndex, IdealIndex)> {
    a.check_same_field(b)?;
    Ok((a.combine(b, u32::min), a.combine(b, u32::max)))
}

/// Divisors of `a` with norm at most `norm_bound`, ascending in canonical order.
pub fn divisors(a: &IdealIndex, norm_bound: Option<u64>, squarefree_only: bool) -> Vec<IdealIndex> {
    let bound = norm_bound.unwrap_or(u64::MAX);
    let mut out = vec![IdealIndex {
        discriminant: a.discriminant,
        norm: 1,
        factors: Vec::new(),
    }];
    for &(pr, e) in &a.factors {
        let max_e = if squarefree_only { 1 } else { e };
        let len = out.len();
        for i in 0..len {
            let mut norm = out[i].norm;
            for k in 1..=max_e {
                norm = match norm.checked_mul(pr.norm) {
                    Some(n) if n <= bound => n,
                    _ => break,
                };
                let mut factors = out[i].factors.clone();
                factors.push((pr, k));
                out.push(IdealIndex {
                    discriminant: a.discriminant,
                    norm,
                    factors,
                });
            }
        }
    }
    out.sort();
    out
}

/// Prime ideals of norm at most `bound`, sorted by (norm, p, slot).
pub fn prime_ideals_up_to(field: &NumberFieldSpec, bound: u64) -> Vec<PrimeIdeal> {
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        let split = split_prime(field, p).expect("sieve output is prime");
        out.extend(split.primes.into_iter().filter(|pr| pr.norm <= bound));
    }
    out.sort_by_key(|pr| (pr.norm, pr.p, pr.slot));
    out
}

pub fn enumerate_ideals(field: &NumberFieldSpec, bound: u64) -> Result<Vec<IdealIndex>> {
    enumerate_ideals_with_ceiling(field, bound, DEFAULT_IDEAL_CEILING)
}

/// All ideals of norm at most `bound`, sorted by (norm, factorization).
pub fn enumerate_ideals_with_ceiling(
    field: &NumberFieldSpec,
    bound: u64,
    ceiling: u64,
) -> Result<Vec<IdealIndex>> {
    if bound == 0 {
        return Err(Error::usage("enumeration bound must be at least 1"));
    }
    let too_many = || Error::Resource {
        what: format!("ideal enumeration up to norm {bound}"),
        ceiling,
    };
    if field.is_rationals() && bound > ceiling {
        return Err(too_many());
    }
    let primes = prime_ideals_up_to(field, bound);
    let mut out = Vec::new();
    let mut stack: Vec<(PrimeIdeal, u32)> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn walk(
        primes: &[PrimeIdeal],
        start: usize,
        norm: u64,
        bound: u64,
        ceiling: u64,
        stack: &mut Vec<(PrimeIdeal, u32)>,
        disc: i64,
        out: &mut Vec<IdealIndex>,
    ) -> bool {
        if out.len() as u64 >= ceiling {
            return false;
        }
        let mut factors = stack.clone();
        factors.sort();
        out.push(IdealIndex {
            discriminant: disc,
            norm,
            factors,
        });
        for i in start..primes.len() {
            let q = primes[i].norm;
            if norm.saturating_mul(q) > bound {
                break;
            }
            let mut n = norm;
            let mut e = 0;
            while n.saturating_mul(q) <= bound {
                n *= q;
                e += 1;
                stack.push((primes[i], e));
                let ok = walk(primes, i + 1, n, bound, ceiling, stack, disc, out);
                stack.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    if !walk(&primes, 0, 1, bound, ceiling, &mut stack, field.discriminant, &mut out) {
        return Err(too_many());
    }
    out.sort();
    Ok(out)
}

/// Enumerated ideals with a reverse index, shared by every Dirichlet series.
#[derive(Debug, Clone)]
pub struct IdealTable {
    pub field: NumberFieldSpec,
    pub bound: u64,
    ideals: Vec<IdealIndex>,
    index: HashMap<IdealIndex, usize>,
    primes: Vec<PrimeIdeal>,
}

impl IdealTable {
    pub fn new(field: &NumberFieldSpec, bound: u64) -> Result<Self> {
        Self::with_ceiling(field, bound, DEFAULT_IDEAL_CEILING)
    }

    pub fn with_ceiling(field: &NumberFieldSpec, bound: u64, ceiling: u64) -> Result<Self> {
        let ideals = enumerate_ideals_with_ceiling(field, bound, ceiling)?;
        let index = ideals
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        Ok(Self {
            field: *field,
            bound,
            primes: prime_ideals_up_to(field, bound),
            ideals,
            index,
        })
    }

    pub fn ideals(&self) -> &[IdealIndex] {
        &self.ideals
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn get(&self, i: usize) -> &IdealIndex {
        &self.ideals[i]
    }

    pub fn position(&self, ideal: &IdealIndex) -> Option<usize> {
        self.index.get(ideal).copied()
    }

    pub fn prime_ideals(&self) -> &[PrimeIdeal] {
        &self.primes
    }

    /// Index of the product of entries i and j, if its norm is in range.
    pub fn product_position(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = (&self.ideals[i], &self.ideals[j]);
        if a.norm.saturating_mul(b.norm) > self.bound {
            return None;
        }
        self.position(&a.combine(b, |x, y| x + y))
    }
}
