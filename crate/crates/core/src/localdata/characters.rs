//! Dirichlet characters with exact values.
//!
//! A character modulo q is stored as a residue table of angle numerators over a
//! common denominator m, so chi(n) = exp(2 pi i k / m); residues sharing a factor
//! with q hold `None`. Products, conjugates and conductors are computed on the
//! integer angles, never on floating-point values.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{factorize, gcd, lcm, primitive_root_prime_power};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DirichletCharacter {
    pub modulus: u64,
    /// Common denominator of all angles.
    pub denominator: u64,
    table: Vec<Option<u64>>,
    pub conductor: u64,
    pub label: String,
}

/// exp(2 pi i k / m), exact at multiples of a quarter turn.
pub fn root_of_unity(k: u64, m: u64) -> Complex64 {
    let k = k % m;
    if (4 * k).is_multiple_of(m) {
        return match 4 * k / m {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)
}

struct Component {
    modulus: u64,
    /// (generator, order) pairs.
    gens: Vec<(u64, u64)>,
    /// Discrete logs of each residue, `None` off the unit group.
    logs: Vec<Option<Vec<u64>>>,
}

fn component(p: u64, e: u32) -> Component {
    let pe = p.pow(e);
    let gens: Vec<(u64, u64)> = if p == 2 {
        match e {
            1 => vec![],
            2 => vec![(3, 2)],
            _ => vec![(pe - 1, 2), (5, pe / 4)],
        }
    } else {
        vec![(primitive_root_prime_power(p, e), pe / p * (p - 1))]
    };
    let mut logs: Vec<Option<Vec<u64>>> = vec![None; pe as usize];
    if gens.is_empty() {
        logs[1 % pe as usize] = Some(vec![]);
    } else {
        let mut exps = vec![0u64; gens.len()];
        loop {
            let mut x = 1u64;
            for (j, &(g, _)) in gens.iter().enumerate() {
                x = x * crate::arith::mod_pow(g, exps[j], pe) % pe;
            }
            logs[x as usize] = Some(exps.clone());
            let mut j = 0;
            loop {
                if j == gens.len() {
                    return Component { modulus: pe, gens, logs };
                }
                exps[j] += 1;
                if exps[j] < gens[j].1 {
                    break;
                }
                exps[j] = 0;
                j += 1;
            }
        }
    }
    Component { modulus: pe, gens, logs }
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        Self {
            modulus: 1,
            denominator: 1,
            table: vec![Some(0)],
            conductor: 1,
            label: "1.1".to_string(),
        }
    }

    fn from_table(modulus: u64, denominator: u64, table: Vec<Option<u64>>, label: String) -> Self {
        let mut chi = Self {
            modulus,
            denominator,
            table,
            conductor: modulus,
            label,
        };
        chi.reduce_denominator();
        chi.conductor = chi.compute_conductor();
        chi
    }

    fn reduce_denominator(&mut self) {
        let g = self
            .table
            .iter()
            .flatten()
            .fold(self.denominator, |acc, &k| gcd(acc, k));
        if g > 1 {
            self.denominator /= g;
            for k in self.table.iter_mut().flatten() {
                *k /= g;
            }
        }
    }

    /// Angle numerator of chi(n), or `None` when gcd(n, q) > 1.
    pub fn angle(&self, n: u64) -> Option<u64> {
        self.table[(n % self.modulus) as usize]
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match self.angle(n) {
            Some(k) => root_of_unity(k, self.denominator),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.modulus > 2 && self.angle(self.modulus - 1).is_some_and(|k| k != 0)
    }

    /// The archimedean parameter: 0 for even characters, 1 for odd ones.
    pub fn parity_mu(&self) -> f64 {
        if self.is_odd() {
            1.0
        } else {
            0.0
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.table.iter().flatten().all(|&k| k == 0)
    }

    pub fn conj(&self) -> Self {
        let m = self.denominator;
        Self {
            modulus: self.modulus,
            denominator: m,
            table: self
                .table
                .iter()
                .map(|a| a.map(|k| (m - k) % m))
                .collect(),
            conductor: self.conductor,
            label: format!("conj({})", self.label),
        }
    }

    /// The product character modulo lcm of the two moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let q = lcm(self.modulus, other.modulus);
        let m = lcm(self.denominator, other.denominator);
        let (s1, s2) = (m / self.denominator, m / other.denominator);
        let table = (0..q)
            .map(|n| match (self.angle(n), other.angle(n)) {
                (Some(a), Some(b)) if gcd(n, q) == 1 => Some((a * s1 + b * s2) % m),
                _ => None,
            })
            .collect();
        Self::from_table(q, m, table, format!("{}*{}", self.label, other.label))
    }

    fn compute_conductor(&self) -> u64 {
        let q = self.modulus;
        let mut divs = crate::arith::divisors_of(q);
        divs.sort_unstable();
        for d in divs {
            let trivial_on_kernel = (1..=q)
                .step_by(d as usize)
                .filter(|&n| gcd(n, q) == 1)
                .all(|n| self.angle(n) == Some(0));
            if trivial_on_kernel {
                return d;
            }
        }
        q
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let f = self.conductor;
        if f == self.modulus {
            return self.clone();
        }
        let q = self.modulus;
        let table = (0..f)
            .map(|r| {
                if gcd(r, f) != 1 {
                    return None;
                }
                let mut n = r;
                while gcd(n, q) != 1 {
                    n += f;
                }
                self.angle(n)
            })
            .collect();
        let mut chi = Self {
            modulus: f,
            denominator: self.denominator,
            table,
            conductor: f,
            label: format!("prim({})", self.label),
        };
        chi.reduce_denominator();
        chi
    }

    /// All characters modulo q in a fixed order (lexicographic in generator exponents).
    pub fn all_mod(q: u64) -> Vec<Self> {
        assert!(q >= 1, "modulus must be positive");
        if q == 1 {
            return vec![Self::trivial()];
        }
        let comps: Vec<Component> = factorize(q).into_iter().map(|(p, e)| component(p, e)).collect();
        let orders: Vec<u64> = comps.iter().flat_map(|c| c.gens.iter().map(|g| g.1)).collect();
        let m = orders.iter().fold(1, |acc, &o| lcm(acc, o));
        let mut choice = vec![0u64; orders.len()];
        let mut out = Vec::new();
        loop {
            let table = (0..q)
                .map(|n| {
                    if gcd(n, q) != 1 {
                        return None;
                    }
                    let mut k = 0u64;
                    let mut slot = 0;
                    for c in &comps {
                        let logs = c.logs[(n % c.modulus) as usize].as_ref().expect("unit residue");
                        for (j, &(_, o)) in c.gens.iter().enumerate() {
                            k += logs[j] * choice[slot + j] % o * (m / o);
                        }
                        slot += c.gens.len();
                    }
                    Some(k % m)
                })
                .collect();
            out.push(Self::from_table(q, m, table, String::new()));
            let mut j = 0;
            loop {
                if j == choice.len() {
                    for (i, chi) in out.iter_mut().enumerate() {
                        chi.label = format!("{q}.{}", i + 1);
                    }
                    return out;
                }
                choice[j] += 1;
                if choice[j] < orders[j] {
                    break;
                }
                choice[j] = 0;
                j += 1;
            }
        }
    }

    /// Primitive characters modulo q, labelled "q.i" with i counting from 1.
    pub fn primitive_mod(q: u64) -> Vec<Self> {
        let mut out: Vec<Self> = Self::all_mod(q).into_iter().filter(|c| c.is_primitive()).collect();
        for (i, chi) in out.iter_mut().enumerate() {
            chi.label = format!("{q}.{}", i + 1);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_counts_by_modulus() {
        let counts: Vec<usize> = (1..=10).map(|q| DirichletCharacter::primitive_mod(q).len()).collect();
        assert_eq!(counts, vec![1, 0, 1, 1, 3, 0, 5, 2, 4, 0]);
    }

    #[test]
    fn mod_three_character() {
        let chi = &DirichletCharacter::primitive_mod(3)[0];
        assert_eq!(chi.value(2), Complex64::new(-1.0, 0.0));
        assert!(chi.is_odd());
        let rs = chi.mul(&chi.conj()).primitive();
        assert_eq!(rs.modulus, 1);
        assert_eq!(rs.value(3), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn mod_four_is_odd() {
        let chi = &DirichletCharacter::primitive_mod(4)[0];
        assert!(chi.is_odd());
        assert_eq!(chi.value(3), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn multiplicativity() {
        for q in 1..30 {
            for chi in DirichletCharacter::all_mod(q) {
                for a in 0..q {
                    for b in 0..q {
                        let lhs = chi.value(a * b);
                        let rhs = chi.value(a) * chi.value(b);
                        assert!((lhs - rhs).norm() < 1e-12, "q={q} a={a} b={b}");
                    }
                }
            }
        }
    }
}
