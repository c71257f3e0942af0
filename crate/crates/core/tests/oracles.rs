//! Library results against independently computed values.

use std::path::Path;

use num_bigint::BigUint;
use num_complex::Complex64;

use sievelab::coeffs::{expand_global, rankin_selberg_local, RamifiedModel, SeriesKind};
use sievelab::detect::jk::ln_jk;
use sievelab::detect::{hadamard_zero_sum, ZeroList};
use sievelab::ideals::{enumerate_ideals, IdealIndex, NumberFieldSpec, PrimeIdeal};
use sievelab::localdata::{ingest_hecke_eigenvalues, DirichletCharacter, Representation};

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn series_at(series: &sievelab::coeffs::CoefficientSeries, n: u64) -> Complex64 {
    series.value(&IdealIndex::rational(n).unwrap()).unwrap()
}

/// ln(u^k / k!) for integer u from exact big integers.
fn ln_power_over_factorial(u: u64, k: u32) -> f64 {
    let num = BigUint::from(u).pow(k);
    let den: BigUint = (1..=u64::from(k)).map(BigUint::from).product();
    let shift = (den.bits() + 100).saturating_sub(num.bits());
    let q = (num << shift) / den;
    let top = q.bits().saturating_sub(64);
    let mantissa = (&q >> top).to_u64_digits().first().copied().unwrap_or(0) as f64;
    mantissa.ln() + (top as f64 - shift as f64) * std::f64::consts::LN_2
}

#[test]
fn jk_matches_big_integer_oracle() {
    for (u, k) in [(500u64, 500u32), (10, 500), (1000, 500), (7, 3)] {
        let want = ln_power_over_factorial(u, k) - u as f64;
        let got = ln_jk(u as f64, u64::from(k));
        // 1e-10 relative on j_k is 1e-10 absolute on its logarithm.
        assert!((got - want).abs() <= 1e-10, "u = {u}, k = {k}: {got} vs {want}");
    }
}

fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let mut r = 1u128;
    let (mut b, mut e) = (u128::from(a), (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % u128::from(p);
        }
        b = b * b % u128::from(p);
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Character of the quadratic field with fundamental discriminant `disc` at n.
fn quadratic_character(disc: i64, n: u64) -> i32 {
    let mut chi = 1;
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            let local = if p == 2 {
                match disc.rem_euclid(8) {
                    1 => 1,
                    5 => -1,
                    _ => 0,
                }
            } else {
                legendre(disc, p)
            };
            chi *= local.pow(e);
        }
        p += 1;
    }
    chi
}

#[test]
fn ideal_counts_match_dedekind_zeta() {
    for (d, disc) in [(-1i64, -4i64), (-5, -20), (2, 8), (5, 5), (-3, -3), (13, 13)] {
        let field = NumberFieldSpec::quadratic(d).unwrap();
        let bound = 3000;
        let ideals = enumerate_ideals(&field, bound).unwrap();
        let mut counts = vec![0i64; bound as usize + 1];
        for id in &ideals {
            counts[id.norm as usize] += 1;
        }
        for n in 1..=bound {
            let want: i64 = (1..=n)
                .filter(|dv| n % dv == 0)
                .map(|dv| i64::from(quadratic_character(disc, dv)))
                .sum();
            assert_eq!(counts[n as usize], want, "d = {d}, norm {n}");
        }
    }
}

fn mobius(n: u64) -> i64 {
    let mut m = n;
    let mut sign = 1;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    sign
}

fn von_mangoldt(n: u64) -> f64 {
    let p = (2..=n).find(|p| n.is_multiple_of(*p)).unwrap_or(1);
    let mut m = n;
    while m.is_multiple_of(p) && m > 1 {
        m /= p;
    }
    if n > 1 && m == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

#[test]
fn trivial_representation_gives_classical_functions() {
    let t = Representation::trivial(&NumberFieldSpec::rationals());
    let mu = expand_global(&t, None, 2000, SeriesKind::Mu).unwrap();
    let big = expand_global(&t, None, 2000, SeriesKind::BigLambda).unwrap();
    let log = expand_global(&t, None, 2000, SeriesKind::LogL).unwrap();
    for n in 1..=2000u64 {
        assert_eq!(series_at(&mu, n).re, mobius(n) as f64, "mu({n})");
        assert!((series_at(&big, n).re - von_mangoldt(n)).abs() < 1e-12, "Lambda({n})");
        let want = if n > 1 { von_mangoldt(n) / (n as f64).ln() } else { 0.0 };
        assert!((series_at(&log, n).re - want).abs() < 1e-12, "log coefficient at {n}");
    }
}

#[test]
fn character_coefficients_are_character_values() {
    for q in [3u64, 5, 8, 12, 13] {
        for chi in DirichletCharacter::primitive_mod(q) {
            let rep = Representation::from_character(chi.clone());
            let lam = expand_global(&rep, None, 500, SeriesKind::Lambda).unwrap();
            for n in 1..=500u64 {
                assert!((series_at(&lam, n) - chi.value(n)).norm() < 1e-12, "q = {q}, n = {n}");
            }
        }
    }
}

#[test]
fn exact_model_at_the_ramified_prime() {
    let chi = DirichletCharacter::primitive_mod(3).into_iter().find(|c| !c.is_principal()).unwrap();
    let rep = Representation::from_character(chi);
    let p = PrimeIdeal { p: 3, slot: 0, norm: 3 };
    let lp = rep.local_parameters(&p).unwrap();
    let v = rankin_selberg_local(&lp, &lp, 1, RamifiedModel::Gl1Exact).unwrap();
    assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    let product = rankin_selberg_local(&lp, &lp, 1, RamifiedModel::Product).unwrap();
    assert_eq!(product, Complex64::new(0.0, 0.0));
}

#[test]
fn discriminant_form_matches_ramanujan_tau() {
    let delta = ingest_hecke_eigenvalues(&data("delta_ap.csv"), 12, 1).unwrap();
    let lam = expand_global(&delta, None, 30, SeriesKind::Lambda).unwrap();
    let tau: [(u64, f64); 8] = [
        (4, -1472.0),
        (6, -6048.0),
        (8, 84480.0),
        (9, -113643.0),
        (10, -115920.0),
        (12, -370944.0),
        (25, -25499225.0),
        (27, -73279080.0),
    ];
    for (n, t) in tau {
        let want = t / (n as f64).powf(5.5);
        assert!((series_at(&lam, n).re - want).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn zero_sums_converge_with_more_zeros() {
    let all = ZeroList::load(&data("zeta_zeros.txt")).unwrap();
    let half = all.truncated(100);
    let s = Complex64::new(1.1, 0.0);
    for k in [1u32, 2, 4] {
        let a = hadamard_zero_sum(&half, s, k).unwrap();
        let b = hadamard_zero_sum(&all, s, k).unwrap();
        let diff = Complex64::new(b.re - a.re, b.im - a.im).norm();
        let tail = a.tail_estimate.unwrap();
        assert!(diff <= tail, "k = {k}: added zeros moved the sum by {diff}, estimate {tail}");
        assert!(b.im.abs() < 1e-12);
    }
}
