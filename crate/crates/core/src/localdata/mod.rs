//! Families of L-functions described by local parameters.
//!
//! A [`Representation`] hands out the multiset of local parameters at any prime
//! ideal on request. Characters and the trivial representation answer for every
//! prime; synthetic members regenerate their parameters from a keyed ChaCha8
//! stream, so repeated or concurrent requests always see the same values;
//! ingested GL(2) data answers only for primes present in the file.

pub mod characters;
pub mod hecke;
pub mod spec_file;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideals::{IdealIndex, NumberFieldSpec, PrimeIdeal};

pub use characters::DirichletCharacter;
pub use hecke::ingest_hecke_eigenvalues;

/// Relative slack used when comparing parameter magnitudes with prime powers.
pub const MAGNITUDE_SLACK: f64 = 1e-12;

/// Best known exponent toward the Ramanujan conjecture in degree n.
pub fn theta_bound(n: usize) -> f64 {
    0.5 - 1.0 / ((n * n + 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalParameters {
    pub prime: PrimeIdeal,
    pub alphas: Vec<Complex64>,
    /// Present for GL(1) members built from a Dirichlet character.
    pub character: Option<Arc<DirichletCharacter>>,
}

impl LocalParameters {
    pub fn new(prime: PrimeIdeal, alphas: Vec<Complex64>) -> Self {
        Self {
            prime,
            alphas,
            character: None,
        }
    }

    pub fn degree(&self) -> usize {
        self.alphas.len()
    }

    /// Checks |alpha| <= N(p)^theta_n and, away from the conductor, that no
    /// parameter vanishes.
    pub fn check(&self, ramified: bool) -> Result<()> {
        let n = self.alphas.len();
        let ceiling = (self.prime.norm as f64).powf(theta_bound(n)) * (1.0 + MAGNITUDE_SLACK);
        for a in &self.alphas {
            if a.norm() > ceiling {
                return Err(Error::DataIntegrity(format!(
                    "|alpha| = {} exceeds N(p)^theta_{n} = {} at p = {}",
                    a.norm(),
                    ceiling,
                    self.prime.p
                )));
            }
            if !ramified && a.norm() == 0.0 {
                return Err(Error::DataIntegrity(format!(
                    "zero parameter at unramified prime {}",
                    self.prime.p
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchPlace {
    /// 1 for a real place, 2 for a complex place.
    pub d: u8,
    pub mus: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ArchimedeanParameters {
    pub places: Vec<ArchPlace>,
}

impl ArchimedeanParameters {
    /// The same parameter list at every infinite place of the field.
    pub fn uniform(field: &NumberFieldSpec, mus: &[f64]) -> Self {
        let mut places = Vec::new();
        let mus: Vec<(f64, f64)> = mus.iter().map(|&m| (m, 0.0)).collect();
        for _ in 0..field.real_places {
            places.push(ArchPlace { d: 1, mus: mus.clone() });
        }
        for _ in 0..field.complex_places {
            places.push(ArchPlace { d: 2, mus: mus.clone() });
        }
        Self { places }
    }

    fn conj(&self) -> Self {
        Self {
            places: self
                .places
                .iter()
                .map(|pl| ArchPlace {
                    d: pl.d,
                    mus: pl.mus.iter().map(|&(re, im)| (re, -im)).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepKind {
    DirichletCharacter,
    HeckeGl2,
    Synthetic,
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SyntheticModel {
    /// Unit-circle parameters in conjugate-stable tuples.
    Grc,
    /// One designated member gets a parameter of size N(p)^theta at the prime
    /// above p (slot 0).
    Planted { p: u64, theta: f64 },
}

#[derive(Debug, Clone)]
enum LocalSource {
    Trivial,
    Character(Arc<DirichletCharacter>),
    Table(BTreeMap<PrimeIdeal, Vec<Complex64>>),
    Synthetic {
        seed: u64,
        member: u64,
        model: SyntheticModel,
        planted_here: bool,
        conjugate: bool,
    },
}

#[derive(Debug, Clone)]
pub struct Representation {
    pub degree: usize,
    pub field: NumberFieldSpec,
    pub conductor: IdealIndex,
    pub arch: ArchimedeanParameters,
    pub kind: RepKind,
    pub label: String,
    source: LocalSource,
}

impl Representation {
    pub fn trivial(field: &NumberFieldSpec) -> Self {
        Self {
            degree: 1,
            field: *field,
            conductor: IdealIndex::unit(field),
            arch: ArchimedeanParameters::uniform(field, &[0.0]),
            kind: RepKind::Trivial,
            label: "trivial".to_string(),
            source: LocalSource::Trivial,
        }
    }

    pub fn from_character(chi: DirichletCharacter) -> Self {
        let field = NumberFieldSpec::rationals();
        let conductor = IdealIndex::rational(chi.modulus).expect("positive modulus");
        Self {
            degree: 1,
            field,
            conductor,
            arch: ArchimedeanParameters::uniform(&field, &[chi.parity_mu()]),
            kind: RepKind::DirichletCharacter,
            label: format!("chi{}", chi.label),
            source: LocalSource::Character(Arc::new(chi)),
        }
    }

    pub(crate) fn from_table(
        degree: usize,
        field: &NumberFieldSpec,
        conductor: IdealIndex,
        arch: ArchimedeanParameters,
        kind: RepKind,
        label: String,
        table: BTreeMap<PrimeIdeal, Vec<Complex64>>,
    ) -> Self {
        Self {
            degree,
            field: *field,
            conductor,
            arch,
            kind,
            label,
            source: LocalSource::Table(table),
        }
    }

    pub fn character(&self) -> Option<&Arc<DirichletCharacter>> {
        match &self.source {
            LocalSource::Character(c) => Some(c),
            _ => None,
        }
    }

    /// The character data, with the trivial representation over the
    /// rationals read as the character of modulus 1.
    pub fn character_data(&self) -> Option<Arc<DirichletCharacter>> {
        match &self.source {
            LocalSource::Character(c) => Some(c.clone()),
            LocalSource::Trivial if self.field.is_rationals() => Some(Arc::new(DirichletCharacter::trivial())),
            _ => None,
        }
    }

    pub fn is_ramified_at(&self, prime: &PrimeIdeal) -> bool {
        self.conductor.exponent_of(prime) > 0
    }

    /// Exponent t with |alpha(p)| <= N(p)^t at every prime, as known from the
    /// construction (0 for characters, holomorphic GL(2) data and unit-circle
    /// synthetic members).
    pub fn ramanujan_exponent(&self) -> f64 {
        match &self.source {
            LocalSource::Synthetic {
                model: SyntheticModel::Planted { theta, .. },
                planted_here: true,
                ..
            } => *theta,
            _ => 0.0,
        }
    }

    /// Largest prime norm with stored parameters, for data-backed members.
    pub fn data_limit(&self) -> Option<u64> {
        match &self.source {
            LocalSource::Table(t) => Some(t.keys().map(|p| p.norm).max().unwrap_or(0)),
            _ => None,
        }
    }

    pub fn local_parameters(&self, prime: &PrimeIdeal) -> Result<LocalParameters> {
        let alphas = match &self.source {
            LocalSource::Trivial => vec![Complex64::new(1.0, 0.0)],
            LocalSource::Character(chi) => {
                let mut lp = LocalParameters::new(*prime, vec![chi.value(prime.p)]);
                lp.character = Some(chi.clone());
                return Ok(lp);
            }
            LocalSource::Table(table) => table.get(prime).cloned().ok_or_else(|| {
                Error::DataIntegrity(format!(
                    "{}: no local parameters stored for the prime above {} (norm {})",
                    self.label, prime.p, prime.norm
                ))
            })?,
            LocalSource::Synthetic {
                seed,
                member,
                model,
                planted_here,
                conjugate,
            } => {
                let mut alphas = synthetic_parameters(self.degree, *seed, *member, prime);
                if let (SyntheticModel::Planted { p, theta }, true) = (model, planted_here) {
                    if prime.p == *p && prime.slot == 0 {
                        let scale = (prime.norm as f64).powf(*theta);
                        alphas[0] *= scale;
                        alphas[1] /= scale;
                    }
                }
                if *conjugate {
                    alphas.iter_mut().for_each(|a| *a = a.conj());
                }
                alphas
            }
        };
        Ok(LocalParameters::new(*prime, alphas))
    }

    /// The contragredient: every local and archimedean parameter conjugated.
    pub fn contragredient(&self) -> Self {
        let source = match &self.source {
            LocalSource::Trivial => LocalSource::Trivial,
            LocalSource::Character(chi) => {
                let mut c = chi.conj();
                c.label = if let Some(inner) = chi.label.strip_prefix("conj(").and_then(|s| s.strip_suffix(')')) {
                    inner.to_string()
                } else {
                    format!("conj({})", chi.label)
                };
                LocalSource::Character(Arc::new(c))
            }
            LocalSource::Table(t) => LocalSource::Table(
                t.iter()
                    .map(|(k, v)| (*k, v.iter().map(|a| a.conj()).collect()))
                    .collect(),
            ),
            LocalSource::Synthetic {
                seed,
                member,
                model,
                planted_here,
                conjugate,
            } => LocalSource::Synthetic {
                seed: *seed,
                member: *member,
                model: *model,
                planted_here: *planted_here,
                conjugate: !conjugate,
            },
        };
        let label = match self.label.strip_prefix('~') {
            Some(inner) => inner.to_string(),
            None => format!("~{}", self.label),
        };
        Self {
            degree: self.degree,
            field: self.field,
            conductor: self.conductor.clone(),
            arch: self.arch.conj(),
            kind: self.kind,
            label,
            source,
        }
    }
}

/// Seeded unit-circle parameters: conjugate pairs, plus +-1 in odd degree.
fn synthetic_parameters(n: usize, seed: u64, member: u64, prime: &PrimeIdeal) -> Vec<Complex64> {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&member.to_le_bytes());
    key[16..24].copy_from_slice(&prime.p.to_le_bytes());
    key[24..32].copy_from_slice(&u64::from(prime.slot).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let phi: f64 = rng.random::<f64>() * 2.0 * PI;
        let z = Complex64::from_polar(1.0, phi);
        out.push(z);
        out.push(z.conj());
    }
    if n % 2 == 1 {
        out.push(Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0));
    }
    out
}

/// D_F^n * N(q) * prod over places and parameters of (3 + |it + mu|^d).
pub fn analytic_conductor(rep: &Representation, t: f64) -> f64 {
    let mut c = (rep.field.abs_discriminant() as f64).powi(rep.degree as i32) * rep.conductor.norm as f64;
    for place in &rep.arch.places {
        for &(re, im) in &place.mus {
            let z = Complex64::new(re, im + t);
            c *= 3.0 + z.norm().powi(i32::from(place.d));
        }
    }
    c
}

#[derive(Debug, Clone)]
pub struct Family {
    pub field: NumberFieldSpec,
    pub members: Vec<Representation>,
    /// Largest analytic conductor (at t = 0) over the members.
    pub q_max: f64,
    pub description: String,
}

impl Family {
    pub fn new(field: &NumberFieldSpec, members: Vec<Representation>, description: impl Into<String>) -> Result<Self> {
        if let Some(bad) = members.iter().find(|m| m.field != *field) {
            return Err(Error::usage(format!("member {} lives over a different field", bad.label)));
        }
        let q_max = members
            .iter()
            .map(|m| analytic_conductor(m, 0.0))
            .fold(0.0, f64::max);
        Ok(Self {
            field: *field,
            members,
            q_max,
            description: description.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Common degree of the members, if they agree.
    pub fn degree(&self) -> Option<usize> {
        let d = self.members.first()?.degree;
        self.members.iter().all(|m| m.degree == d).then_some(d)
    }
}

/// All primitive Dirichlet characters of modulus at most `q_max`.
pub fn dirichlet_character_family(q_max: u64) -> Result<Family> {
    if q_max == 0 {
        return Err(Error::usage("q_max must be at least 1"));
    }
    let members = (1..=q_max)
        .flat_map(DirichletCharacter::primitive_mod)
        .map(Representation::from_character)
        .collect();
    Family::new(
        &NumberFieldSpec::rationals(),
        members,
        format!("primitive Dirichlet characters of modulus <= {q_max}"),
    )
}

/// Seed-reproducible synthetic family of degree n over `field`.
pub fn synthetic_family(
    field: &NumberFieldSpec,
    n: usize,
    count: usize,
    seed: u64,
    model: SyntheticModel,
) -> Result<Family> {
    if n == 0 || count == 0 {
        return Err(Error::usage("synthetic families need n >= 1 and count >= 1"));
    }
    let mut designated = None;
    if let SyntheticModel::Planted { p, theta } = model {
        let ceiling = theta_bound(n);
        if !(0.0..=ceiling).contains(&theta) {
            return Err(Error::usage(format!(
                "planted theta = {theta} outside [0, 1/2 - 1/(n^2+1)] = [0, {ceiling}] for n = {n}"
            )));
        }
        if n < 2 {
            return Err(Error::usage("planting needs degree at least 2 (a partner parameter absorbs the scale)"));
        }
        if !crate::arith::is_prime(p) {
            return Err(Error::usage(format!("planted prime {p} is not prime")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        designated = Some(rng.random_range(0..count as u64));
    }
    let members = (0..count as u64)
        .map(|member| Representation {
            degree: n,
            field: *field,
            conductor: IdealIndex::unit(field),
            arch: ArchimedeanParameters::uniform(field, &vec![0.0; n]),
            kind: RepKind::Synthetic,
            label: format!("syn{n}.{seed}.{member}"),
            source: LocalSource::Synthetic {
                seed,
                member,
                model,
                planted_here: designated == Some(member),
                conjugate: false,
            },
        })
        .collect();
    let tag = match model {
        SyntheticModel::Grc => "grc".to_string(),
        SyntheticModel::Planted { p, theta } => format!("planted(p={p}, theta={theta})"),
    };
    Family::new(field, members, format!("synthetic degree {n}, {count} members, seed {seed}, {tag}"))
}

impl Family {
    /// Index of the planted member of a planted synthetic family.
    pub fn planted_member(&self) -> Option<usize> {
        self.members.iter().position(|m| {
            matches!(
                m.source,
                LocalSource::Synthetic {
                    planted_here: true,
                    ..
                }
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_family_moduli() {
        let fam = dirichlet_character_family(5).unwrap();
        let moduli: Vec<u64> = fam.members.iter().map(|m| m.conductor.norm).collect();
        assert_eq!(moduli, vec![1, 3, 4, 5, 5, 5]);
    }

    #[test]
    fn analytic_conductor_examples() {
        let q = NumberFieldSpec::rationals();
        assert_eq!(analytic_conductor(&Representation::trivial(&q), 0.0), 3.0);
        let chi3 = Representation::from_character(DirichletCharacter::primitive_mod(3).remove(0));
        assert_eq!(analytic_conductor(&chi3, 0.0), 12.0);
        let chi4 = Representation::from_character(DirichletCharacter::primitive_mod(4).remove(0));
        assert_eq!(analytic_conductor(&chi4, 0.0), 16.0);
        assert!(analytic_conductor(&chi3, 2.0) > analytic_conductor(&chi3, 1.0));
    }

    #[test]
    fn planted_member_has_the_planted_size() {
        let q = NumberFieldSpec::rationals();
        let fam = synthetic_family(&q, 2, 4, 11, SyntheticModel::Planted { p: 2, theta: 0.2 }).unwrap();
        let i = fam.planted_member().unwrap();
        let two = PrimeIdeal { p: 2, slot: 0, norm: 2 };
        let lp = fam.members[i].local_parameters(&two).unwrap();
        let max = lp.alphas.iter().map(|a| a.norm()).fold(0.0, f64::max);
        assert!((max - 2f64.powf(0.2)).abs() < 1e-15);
        let prod: f64 = lp.alphas.iter().map(|a| a.norm()).product();
        assert!((prod - 1.0).abs() < 1e-15);
        assert!(synthetic_family(&q, 2, 4, 11, SyntheticModel::Planted { p: 2, theta: 0.31 }).is_err());
    }

    #[test]
    fn synthetic_determinism_and_contragredient() {
        let q = NumberFieldSpec::rationals();
        let a = synthetic_family(&q, 3, 3, 5, SyntheticModel::Grc).unwrap();
        let b = synthetic_family(&q, 3, 3, 5, SyntheticModel::Grc).unwrap();
        let p = PrimeIdeal { p: 7, slot: 0, norm: 7 };
        for (x, y) in a.members.iter().zip(&b.members) {
            assert_eq!(x.local_parameters(&p).unwrap(), y.local_parameters(&p).unwrap());
            let back = x.contragredient().contragredient();
            assert_eq!(back.local_parameters(&p).unwrap(), x.local_parameters(&p).unwrap());
            assert_eq!(back.label, x.label);
        }
    }
}
