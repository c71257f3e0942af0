//! Ingestion of holomorphic GL(2) Hecke eigenvalues from "p,a_p" text files.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use super::{theta_bound, ArchimedeanParameters, ArchPlace, RepKind, Representation, MAGNITUDE_SLACK};
use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};
use crate::ideals::{IdealIndex, NumberFieldSpec, PrimeIdeal};

/// Satake parameters from a unitarily normalized eigenvalue.
///
/// Away from the level they are the roots of x^2 - lambda x + 1; at a prime
/// dividing the level the pair is {lambda, 0}.
pub fn satake_pair(lambda: f64, ramified: bool) -> [Complex64; 2] {
    if ramified {
        return [Complex64::new(lambda, 0.0), Complex64::new(0.0, 0.0)];
    }
    let disc = lambda * lambda - 4.0;
    if disc <= 0.0 {
        let im = (-disc).sqrt() / 2.0;
        [Complex64::new(lambda / 2.0, im), Complex64::new(lambda / 2.0, -im)]
    } else {
        let s = disc.sqrt();
        let big = if lambda >= 0.0 { (lambda + s) / 2.0 } else { (lambda - s) / 2.0 };
        [Complex64::new(big, 0.0), Complex64::new(1.0 / big, 0.0)]
    }
}

pub fn ingest_hecke_eigenvalues(path: &Path, weight: u32, level: u64) -> Result<Representation> {
    let text = std::fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "hecke".into());
    parse_hecke_eigenvalues(&text, weight, level, &label)
}

pub fn parse_hecke_eigenvalues(text: &str, weight: u32, level: u64, label: &str) -> Result<Representation> {
    if weight < 2 || !weight.is_multiple_of(2) {
        return Err(Error::usage(format!("weight must be even and at least 2, got {weight}")));
    }
    if level == 0 {
        return Err(Error::usage("level must be positive"));
    }
    let field = NumberFieldSpec::rationals();
    let ceiling_exp = theta_bound(2);
    let level_primes: Vec<u64> = factorize(level).into_iter().map(|(p, _)| p).collect();
    let mut table = BTreeMap::new();
    let mut last_p = 0u64;
    let mut seen_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(format!("expected \"p,a_p\", found {line:?}")));
        }
        let p = match fields[0].parse::<u64>() {
            Ok(p) => p,
            Err(_) if !seen_data && fields[0].chars().any(|c| c.is_ascii_alphabetic()) => {
                seen_data = true;
                continue;
            }
            Err(_) => return Err(parse_err(format!("bad prime {:?}", fields[0]))),
        };
        seen_data = true;
        let ap: i128 = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("bad integer eigenvalue {:?}", fields[1])))?;
        if !is_prime(p) {
            return Err(parse_err(format!("{p} is not prime")));
        }
        if p <= last_p {
            return Err(parse_err(format!("primes must ascend ({p} after {last_p})")));
        }
        last_p = p;
        let lambda = ap as f64 / (p as f64).powf((weight as f64 - 1.0) / 2.0);
        let ramified = level_primes.contains(&p);
        let pair = satake_pair(lambda, ramified);
        let ceiling = (p as f64).powf(ceiling_exp) * (1.0 + MAGNITUDE_SLACK);
        if pair.iter().any(|a| a.norm() > ceiling) {
            return Err(Error::DataIntegrity(format!(
                "line {line_no}: lambda({p}) = {lambda} gives a Satake parameter beyond p^{ceiling_exp}"
            )));
        }
        table.insert(PrimeIdeal { p, slot: 0, norm: p }, pair.to_vec());
    }
    let k = weight as f64;
    let arch = ArchimedeanParameters {
        places: vec![ArchPlace {
            d: 1,
            mus: vec![((k - 1.0) / 2.0, 0.0), ((k + 1.0) / 2.0, 0.0)],
        }],
    };
    Ok(Representation::from_table(
        2,
        &field,
        IdealIndex::rational(level)?,
        arch,
        RepKind::HeckeGl2,
        label.to_string(),
        table,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_at_two() {
        let rep = parse_hecke_eigenvalues("p,a_p\n2,-24\n3,252\n", 12, 1, "delta").unwrap();
        let two = PrimeIdeal { p: 2, slot: 0, norm: 2 };
        let lp = rep.local_parameters(&two).unwrap();
        let lambda = lp.alphas[0] + lp.alphas[1];
        assert!((lambda.re + 0.530_330_086_1).abs() < 1e-9);
        assert!(((lp.alphas[0] * lp.alphas[1]) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_hecke_eigenvalues("2,-24\n\n4,1\n", 12, 1, "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_hecke_eigenvalues("3,1\n2,1\n", 12, 1, "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_hecke_eigenvalues("2,x\n", 12, 1, "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_hecke_eigenvalues("2,100000\n", 12, 1, "x").unwrap_err();
        assert!(matches!(err, Error::DataIntegrity(_)));
    }

    #[test]
    fn empty_file_fails_on_use() {
        let rep = parse_hecke_eigenvalues("", 12, 1, "empty").unwrap();
        let two = PrimeIdeal { p: 2, slot: 0, norm: 2 };
        assert!(rep.local_parameters(&two).is_err());
    }

    #[test]
    fn level_primes_store_a_zero() {
        let rep = parse_hecke_eigenvalues("11,1\n", 2, 11, "e11").unwrap();
        let lp = rep.local_parameters(&PrimeIdeal { p: 11, slot: 0, norm: 11 }).unwrap();
        assert_eq!(lp.alphas[1], Complex64::new(0.0, 0.0));
        assert!((lp.alphas[0].re - 11f64.powf(-0.5)).abs() < 1e-15);
    }
}
