//! Selberg sieve weights for the sifting density
//! g(p) = 1 - L(1, pi_p x pi~_p)^{-1}, and the diagonal sums they control.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::smooth::{known_residue, ResidueSource};
use crate::coeffs::{coefficient_at, mertens_sum, ModelChoice, RsPair, SeriesKind};
use crate::error::{Error, Result};
use crate::ideals::{gcd_lcm, IdealIndex, IdealTable, PrimeIdeal};
use crate::localdata::{Family, Representation};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GFactor {
    pub value: f64,
    /// Primes whose local parameters are all zero, where L_p(1) = 1 and g = 0.
    pub flagged: Vec<PrimeIdeal>,
}

/// g at a single prime ideal, with the all-zero flag.
pub fn local_g(rep: &Representation, prime: &PrimeIdeal) -> Result<(f64, bool)> {
    let pair = RsPair::new(rep, Some(rep), ModelChoice::Auto)?;
    let gammas = pair.local_multiset(prime)?;
    let inv: Complex64 = gammas
        .iter()
        .map(|g| Complex64::new(1.0, 0.0) - g / prime.norm as f64)
        .product();
    let all_zero = gammas.iter().all(|g| g.norm() == 0.0);
    Ok((1.0 - inv.re, all_zero))
}

/// prod over p | d of (1 - L(1, pi_p x pi~_p)^{-1}).
pub fn g_factor(rep: &Representation, d: &IdealIndex) -> Result<GFactor> {
    if !d.is_squarefree() {
        return Err(Error::usage(format!("g is defined on squarefree ideals, got {}", d.ideal_id())));
    }
    let mut value = 1.0;
    let mut flagged = Vec::new();
    for (p, _) in &d.factors {
        let (g, zero) = local_g(rep, p)?;
        if zero {
            flagged.push(*p);
        }
        value *= g;
    }
    Ok(GFactor { value, flagged })
}

#[derive(Debug, Clone, Serialize)]
pub struct SieveWeights {
    pub rep_label: String,
    pub z: f64,
    /// (d, rho(d)) over the support, in ideal order; the unit ideal first.
    pub rho: Vec<(IdealIndex, f64)>,
    /// Primes dividing P: norm <= z and g != 0, with their g values.
    pub sieve_primes: Vec<(PrimeIdeal, f64)>,
    pub flagged_primes: Vec<PrimeIdeal>,
    /// (sum over the support of prod g/(1-g))^{-1}.
    pub diagonal_closed: f64,
    /// sum over d, d' of rho(d) rho(d') g([d, d']).
    pub diagonal_brute: f64,
}

impl SieveWeights {
    pub fn rho_of(&self, d: &IdealIndex) -> f64 {
        self.rho
            .binary_search_by(|(id, _)| id.cmp(d))
            .map_or(0.0, |i| self.rho[i].1)
    }

    /// sum over d | n of rho(d).
    pub fn divisor_sum(&self, n: &IdealIndex) -> f64 {
        self.rho.iter().filter(|(d, _)| d.divides(n)).map(|(_, r)| r).sum()
    }

    /// Checks rho(unit) = 1, |rho| <= 1 and the support condition; returns
    /// the list of violations (empty when all hold).
    pub fn clause_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self.rho.first() {
            Some((d, r)) if d.is_unit() && *r == 1.0 => {}
            _ => out.push("rho(unit) != 1".to_string()),
        }
        let primes: Vec<PrimeIdeal> = self.sieve_primes.iter().map(|(p, _)| *p).collect();
        for (d, r) in &self.rho {
            if r.abs() > 1.0 {
                out.push(format!("|rho({})| = {} > 1", d.ideal_id(), r.abs()));
            }
            if d.norm as f64 > self.z || !d.is_squarefree() || d.factors.iter().any(|(p, _)| !primes.contains(p)) {
                out.push(format!("{} lies outside the support", d.ideal_id()));
            }
        }
        out
    }
}

/// Optimal weights rho(d) = mu(d) prod_{p | d} (1 - g(p))^{-1} G_d(z / N d) / G(z),
/// where G_d(y) sums h = g / (1 - g) over squarefree e | P, N e <= y, coprime to d.
pub fn selberg_weights(rep: &Representation, z: f64) -> Result<SieveWeights> {
    if !(z >= 1.0) {
        return Err(Error::usage(format!("z must be at least 1, got {z}")));
    }
    let table = IdealTable::new(&rep.field, z.floor() as u64)?;
    let mut g: HashMap<PrimeIdeal, f64> = HashMap::new();
    let mut flagged = Vec::new();
    let mut sieve_primes = Vec::new();
    for p in table.prime_ideals() {
        let (gp, zero) = local_g(rep, p)?;
        if zero {
            flagged.push(*p);
        }
        if gp != 0.0 {
            if gp >= 1.0 {
                return Err(Error::DataIntegrity(format!("g = {gp} >= 1 at the prime above {}", p.p)));
            }
            g.insert(*p, gp);
            sieve_primes.push((*p, gp));
        }
    }
    let support: Vec<&IdealIndex> = table
        .ideals()
        .iter()
        .filter(|d| d.is_squarefree() && d.factors.iter().all(|(p, _)| g.contains_key(p)))
        .collect();
    let h = |d: &IdealIndex| -> f64 { d.factors.iter().map(|(p, _)| g[p] / (1.0 - g[p])).product() };
    let hs: Vec<f64> = support.iter().map(|d| h(d)).collect();
    let big_g: f64 = hs.iter().sum();
    let mut rho = Vec::with_capacity(support.len());
    for d in &support {
        let limit = z / d.norm as f64;
        let gd: f64 = support
            .iter()
            .zip(&hs)
            .take_while(|(e, _)| e.norm as f64 <= limit)
            .filter(|(e, _)| e.is_coprime_to(d))
            .map(|(_, h)| h)
            .sum();
        let sign = if d.factors.len() % 2 == 0 { 1.0 } else { -1.0 };
        let scale: f64 = d.factors.iter().map(|(p, _)| 1.0 / (1.0 - g[p])).product();
        let r = if d.is_unit() { 1.0 } else { sign * scale * gd / big_g };
        rho.push(((*d).clone(), r));
    }
    let gl = |d: &IdealIndex| -> f64 { d.factors.iter().map(|(p, _)| g[p]).product() };
    let mut brute = 0.0;
    for (d, rd) in &rho {
        for (e, re) in &rho {
            let (_, l) = gcd_lcm(d, e)?;
            brute += rd * re * gl(&l);
        }
    }
    Ok(SieveWeights {
        rep_label: rep.label.clone(),
        z,
        rho,
        sieve_primes,
        flagged_primes: flagged,
        diagonal_closed: 1.0 / big_g,
        diagonal_brute: brute,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalRatio {
    pub z: f64,
    pub harmonic_sum: f64,
    pub log_z: f64,
    pub residue: Option<f64>,
    pub residue_source: ResidueSource,
    /// harmonic_sum / (log z * residue), when both factors are nonzero.
    pub ratio: Option<f64>,
}

/// (sum_{N n <= z} lambda_{pi x pi~}(n) / N n) / ((log z) Res L(s, pi x pi~)).
pub fn diagonal_lower_bound_check(rep: &Representation, z: f64, residue: Option<f64>) -> Result<DiagonalRatio> {
    if !(z >= 1.0) {
        return Err(Error::usage("z must be at least 1"));
    }
    let zi = z.floor() as u64;
    let sum = if zi >= 3 {
        mertens_sum(rep, zi)?
    } else {
        // Below 3 the sum is short enough to take directly.
        let pair = RsPair::new(rep, Some(rep), ModelChoice::Auto)?;
        let table = IdealTable::new(&rep.field, zi)?;
        let mut s = 0.0;
        for id in table.ideals() {
            s += coefficient_at(&pair, id, SeriesKind::Lambda)?.re / id.norm as f64;
        }
        s
    };
    let (res, src) = match residue {
        Some(r) => (Some(r), ResidueSource::User),
        None => match known_residue(rep, rep, ModelChoice::Auto)? {
            Some((r, s)) => (Some(r), s),
            None => (None, ResidueSource::Unavailable),
        },
    };
    let log_z = z.ln();
    let ratio = match res {
        Some(r) if r != 0.0 && log_z > 0.0 => Some(sum / (log_z * r)),
        _ => None,
    };
    Ok(DiagonalRatio {
        z,
        harmonic_sum: sum,
        log_z,
        residue: res,
        residue_source: src,
        ratio,
    })
}

/// Coefficients a(n) on the ideals with N n in (lo, hi].
#[derive(Debug, Clone)]
pub struct WeightVector {
    pub entries: Vec<(IdealIndex, Complex64)>,
}

impl WeightVector {
    /// a = 1 on every ideal with N n in (x, e^{1/T} x].
    pub fn ones(field: &crate::ideals::NumberFieldSpec, x: f64, t: f64) -> Result<Self> {
        let hi = (x * (1.0 / t).exp()).floor() as u64;
        let table = IdealTable::new(field, hi.max(1))?;
        Ok(Self {
            entries: table
                .ideals()
                .iter()
                .filter(|id| id.norm as f64 > x)
                .map(|id| (id.clone(), Complex64::new(1.0, 0.0)))
                .collect(),
        })
    }

    pub fn zero_like(other: &Self) -> Self {
        Self {
            entries: other.entries.iter().map(|(id, _)| (id.clone(), Complex64::new(0.0, 0.0))).collect(),
        }
    }

    pub fn l2_sq(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// sum |a(n)|^2 lambda_{pi0 x pi0~}(n).
    pub fn weighted_l2_sq(&self, pi0: &Representation) -> Result<f64> {
        let pair = RsPair::new(pi0, Some(pi0), ModelChoice::Auto)?;
        let mut s = 0.0;
        for (id, a) in &self.entries {
            s += a.norm_sqr() * coefficient_at(&pair, id, SeriesKind::Lambda)?.re;
        }
        Ok(s)
    }
}

/// True when every prime factor of n has norm > z.
pub fn is_sifted(n: &IdealIndex, z: f64) -> bool {
    n.factors.iter().all(|(p, _)| p.norm as f64 > z)
}

#[derive(Debug, Clone, Serialize)]
pub struct SiftedReport {
    pub lhs: f64,
    pub rhs_shape: f64,
    pub sifted_terms: usize,
    pub weighted_norm_sq: f64,
    /// Single-representation variant: sum over sifted n of lambda_{pi0 x pi0~}(n).
    pub single_lhs: f64,
    pub single_shape: f64,
    pub shape_only: bool,
}

/// Sifted large-sieve sum and its shape (constants omitted).
pub fn sifted_sum_check(
    family: &Family,
    pi0: &Representation,
    x: f64,
    t: f64,
    z: f64,
    a: &WeightVector,
    kind: SeriesKind,
) -> Result<SiftedReport> {
    if !(z >= 1.0 && x >= 1.0 && t >= 1.0) {
        return Err(Error::usage("sifted sums need x, T, z >= 1"));
    }
    let pi0c = pi0.contragredient();
    let hi = x * (1.0 / t).exp();
    let sifted: Vec<&(IdealIndex, Complex64)> = a
        .entries
        .iter()
        .filter(|(id, _)| id.norm as f64 > x && id.norm as f64 <= hi && is_sifted(id, z))
        .collect();
    let mut lhs = 0.0;
    for pi in &family.members {
        let pair = RsPair::new(pi, Some(&pi0c), ModelChoice::Auto)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (id, w) in &sifted {
            s += w * coefficient_at(&pair, id, kind)?;
        }
        lhs += s.norm_sqr();
    }
    let diag = RsPair::new(pi0, Some(pi0), ModelChoice::Auto)?;
    let mut weighted = 0.0;
    let mut single = 0.0;
    for (id, w) in &sifted {
        let l = coefficient_at(&diag, id, SeriesKind::Lambda)?.re;
        weighted += w.norm_sqr() * l;
        single += l;
    }
    let n = family.degree().unwrap_or_else(|| family.members.iter().map(|m| m.degree).max().unwrap_or(1)) as f64;
    let deg_f = f64::from(family.field.degree);
    let d_f = family.field.abs_discriminant() as f64;
    let log_z = z.ln();
    let shape_term = d_f.powf(-n * n / 2.0) * family.q_max.powf(n) * z.powf(2.0 * n * n + 2.0) * t.powf(deg_f * n * n / 2.0) * family.len() as f64;
    let rhs_shape = (x / t + shape_term) * weighted / log_z;
    let n0 = pi0.degree as f64;
    let c0 = crate::localdata::analytic_conductor(pi0, 0.0);
    let single_shape = x / (t * log_z) + d_f.powf(-n0 * n0 / 2.0) * c0.powf(n0) * z.powf(2.0 * n0 * n0 + 2.0) * t.powf(deg_f * n0 * n0 / 2.0);
    Ok(SiftedReport {
        lhs,
        rhs_shape,
        sifted_terms: sifted.len(),
        weighted_norm_sq: weighted,
        single_lhs: single,
        single_shape,
        shape_only: true,
    })
}
