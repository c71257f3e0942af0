//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sievelab::coeffs::{dirichlet_convolve, expand_global, rankin_selberg_local, RamifiedModel, SeriesKind};
use sievelab::covers::{psd_check_matrix, BilinearSweep, CoverTarget, FamilyView, MatrixKind};
use sievelab::detect::derivative::coefficient_scale;
use sievelab::detect::{
    density_scan, high_derivative, jk_tail_bounds_check, solve_constants, turan_existence, DensityQuery,
    DetectionConfig, DetectionInputs, HighDerivativeQuery,
};
use sievelab::ideals::{split_prime, IdealTable, NumberFieldSpec, PrimeIdeal};
use sievelab::localdata::{
    dirichlet_character_family, ingest_hecke_eigenvalues, synthetic_family, Family, LocalParameters, Representation,
    SyntheticModel,
};
use sievelab::sieve::{selberg_weights, sieve_constant, SieveKind};

const PUBLISHED: [(&str, f64); 5] = [
    ("alpha", 7.257570591),
    ("A", 3.893444953),
    ("V", 4.399815114),
    ("A0", 0.083612477),
    ("A1", 11.4016385180),
];
const CONSTANT_TOL: f64 = 1e-8;
const LARGE_SIEVE_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-9;
const MARGIN_TOL: f64 = 1e-9;
const POINTWISE_TOL: f64 = 1e-9;
const CAUCHY_REL_TOL: f64 = 1e-10;
const CONVOLUTION_TOL: f64 = 1e-9;
const SELBERG_TOL: f64 = 1e-10;
const EXAMPLE_TOL: f64 = 1e-10;

// eta * (-zeta'/zeta)(1 + eta), evaluated at 30 digits.
const ZETA_ORACLE: [(f64, f64); 2] = [(0.1, 0.944_103_638_528_463_7), (0.05, 0.971_601_712_064_232_2)];

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn rationals() -> NumberFieldSpec {
    NumberFieldSpec::rationals()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn delta() -> Result<Representation, String> {
    ingest_hecke_eigenvalues(&data("delta_ap.csv"), 12, 1).map_err(e)
}

fn prime_two(field: &NumberFieldSpec) -> Result<PrimeIdeal, String> {
    Ok(split_prime(field, 2).map_err(e)?.primes[0])
}

fn constants_reproduce() -> Outcome {
    let start = Instant::now();
    let c = solve_constants().map_err(e)?;
    let elapsed = start.elapsed();
    let values = [c.alpha, c.a, c.v, c.a0, c.a1];
    let worst_dev = PUBLISHED
        .iter()
        .zip(values)
        .map(|((_, p), v)| (p - v).abs())
        .fold(0.0, f64::max);
    let residuals = [
        c.constraint_residual(),
        c.a1_residual(),
        c.stationarity_residual(),
        (c.r * c.r - c.a * c.a - 1.0).abs(),
        (c.a0 * std::f64::consts::E * c.v - 1.0).abs(),
    ];
    let worst_res = residuals.iter().copied().map(f64::abs).fold(0.0, f64::max);
    Ok((
        worst_dev <= CONSTANT_TOL && worst_res <= CONSTANT_TOL && elapsed < Duration::from_secs(1),
        format!("max deviation {worst_dev:.2e}, max residual {worst_res:.2e}, {elapsed:.2?}"),
    ))
}

fn classical_large_sieve() -> Outcome {
    let mut worst = f64::INFINITY;
    for q in [5u64, 10, 20] {
        let fam = dirichlet_character_family(q).map_err(e)?;
        for n in [50u64, 100, 200, 500] {
            let c = sieve_constant(&fam, n, None, SieveKind::Lambda).map_err(e)?;
            let bound = n as f64 + (q * q) as f64 - 1.0;
            worst = worst.min(bound - c.value);
        }
    }
    let mut trivial_gap: f64 = 0.0;
    let trivial = Family::new(&rationals(), vec![Representation::trivial(&rationals())], "trivial").map_err(e)?;
    for n in [50u64, 100, 200, 500] {
        let c = sieve_constant(&trivial, n, None, SieveKind::Lambda).map_err(e)?;
        trivial_gap = trivial_gap.max((c.value - n as f64).abs());
    }
    Ok((
        worst >= 0.0 && trivial_gap <= LARGE_SIEVE_TOL,
        format!("min (N + Q^2 - 1 - C) = {worst:.4}, single trivial |C - N| = {trivial_gap:.1e}"),
    ))
}

/// (worst min eigenvalue / max(norm, 1), failures, matrices vanishing up to rounding).
fn psd_sweep(fam: &Family, nmax: u64, kind: MatrixKind) -> Result<(f64, usize, usize), String> {
    let view = FamilyView::new(fam).map_err(e)?;
    let table = IdealTable::new(&fam.field, nmax).map_err(e)?;
    let ratios = table
        .ideals()
        .par_iter()
        .map(|id| {
            let m = view.matrix(id, kind).map_err(e)?;
            let v = psd_check_matrix(&m.entries, PSD_TOL).map_err(e)?;
            let literal = v.min_eigenvalue >= -PSD_TOL * v.spectral_norm;
            // Matrices that vanish up to cancellation have a spectral norm at rounding level.
            let vanishing = v.spectral_norm <= 1e-10;
            Ok((v.min_eigenvalue / v.spectral_norm.max(1.0), v.verdict && (literal || vanishing), vanishing))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let worst = ratios.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    Ok((
        worst,
        ratios.iter().filter(|r| !r.1).count(),
        ratios.iter().filter(|r| r.2).count(),
    ))
}

fn positive_semidefinite() -> Outcome {
    let chars = dirichlet_character_family(20).map_err(e)?;
    let (w1, bad1, _) = psd_sweep(&chars, 2000, MatrixKind::Lambda)?;
    let mut w2 = f64::INFINITY;
    let mut bad2 = 0;
    let mut vanishing = 0;
    for n in [2usize, 3] {
        for seed in 1..=5u64 {
            let fam = synthetic_family(&rationals(), n, 6, seed, SyntheticModel::Grc).map_err(e)?;
            let (w, b, z) = psd_sweep(&fam, 2000, MatrixKind::LambdaMinusProduct)?;
            w2 = w2.min(w);
            bad2 += b;
            vanishing += z;
        }
    }
    Ok((
        bad1 == 0 && bad2 == 0,
        format!(
            "{} characters: worst min/norm {w1:.2e}; synthetic GL2/GL3 x 5 seeds: worst {w2:.2e} \
             ({vanishing} difference matrices vanish); failures {}",
            chars.len(),
            bad1 + bad2
        ),
    ))
}

fn cover_inequalities() -> Outcome {
    let trials = 1000;
    let chars = dirichlet_character_family(10).map_err(e)?;
    let syn = synthetic_family(&rationals(), 2, 5, 3, SyntheticModel::Grc).map_err(e)?;
    let trivial = Representation::trivial(&rationals());
    let mut worst = f64::INFINITY;
    let mut lines = Vec::new();
    for (label, fam) in [("GL1", &chars), ("GL2", &syn)] {
        let sweep = BilinearSweep::new(fam, &trivial, trials, 17).map_err(e)?;
        let table = IdealTable::new(&fam.field, 2000).map_err(e)?;
        for target in [CoverTarget::Lambda, CoverTarget::Mu, CoverTarget::Log] {
            let w = table
                .ideals()
                .par_iter()
                .map(|id| sweep.check(target, id).map(|o| o.worst_margin).map_err(e))
                .collect::<Result<Vec<_>, String>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            worst = worst.min(w);
            lines.push(format!("{label}/{} {w:.2e}", target.name()));
        }
    }
    Ok((worst >= -MARGIN_TOL, format!("worst margins: {}", lines.join(", "))))
}

fn test_reps() -> Result<Vec<Representation>, String> {
    let mut reps = vec![Representation::trivial(&rationals())];
    reps.extend(dirichlet_character_family(8).map_err(e)?.members);
    reps.extend(synthetic_family(&rationals(), 2, 3, 5, SyntheticModel::Grc).map_err(e)?.members);
    reps.extend(synthetic_family(&rationals(), 3, 2, 6, SyntheticModel::Grc).map_err(e)?.members);
    reps.push(delta()?);
    Ok(reps)
}

fn pointwise_bounds() -> Outcome {
    let bound = 10_000;
    let reps = test_reps()?;
    let diag = reps
        .par_iter()
        .map(|r| {
            Ok((
                expand_global(r, Some(r), bound, SeriesKind::Lambda).map_err(e)?,
                expand_global(r, Some(r), bound, SeriesKind::BigLambda).map_err(e)?,
            ))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let pairs: Vec<(usize, usize)> = (0..reps.len()).flat_map(|i| (0..reps.len()).map(move |j| (i, j))).collect();
    let slacks = pairs
        .par_iter()
        .map(|&(i, j)| {
            let b = reps[j].contragredient();
            let mu = expand_global(&reps[i], Some(&b), bound, SeriesKind::Mu).map_err(e)?;
            let big = expand_global(&reps[i], Some(&b), bound, SeriesKind::BigLambda).map_err(e)?;
            let mut worst = (f64::INFINITY, f64::INFINITY);
            for k in 0..mu.values.len() {
                let s_mu = diag[i].0.values[k].re * diag[j].0.values[k].re - mu.values[k].norm_sqr();
                let s_br = 0.5 * (diag[i].1.values[k].re + diag[j].1.values[k].re) - big.values[k].norm();
                worst = (worst.0.min(s_mu), worst.1.min(s_br));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>, String>>()?;
    let w_mu = slacks.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let w_br = slacks.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok((
        w_mu >= -POINTWISE_TOL && w_br >= -POINTWISE_TOL,
        format!("{} pairs, n <= {bound}: mu slack {w_mu:.2e}, von Mangoldt slack {w_br:.2e}", pairs.len()),
    ))
}

/// Coefficients of prod_{i,j} (1 - alpha_i conj(beta_j) x)^{-1} by multiplying geometric series.
fn inverse_series(a: &[Complex64], b: &[Complex64], kmax: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); kmax + 1];
    out[0] = Complex64::new(1.0, 0.0);
    for x in a {
        for y in b {
            let r = x * y.conj();
            for k in 1..=kmax {
                let prev = out[k - 1];
                out[k] += r * prev;
            }
        }
    }
    out
}

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(rng.random_range(0.3..1.3), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn cauchy_identity() -> Outcome {
    let prime = PrimeIdeal { p: 2, slot: 0, norm: 2 };
    let kmax = 12;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 1..=4 {
            for n2 in 1..=4 {
                let a = random_params(&mut rng, n);
                let b = random_params(&mut rng, n2);
                let oracle = inverse_series(&a, &b, kmax);
                let (pa, pb) = (LocalParameters::new(prime, a), LocalParameters::new(prime, b));
                for (k, want) in oracle.iter().enumerate() {
                    let got = rankin_selberg_local(&pa, &pb, k, RamifiedModel::Product).map_err(e)?;
                    worst = worst.max((got - want).norm() / want.norm().max(1.0));
                    cases += 1;
                }
            }
        }
    }
    Ok((worst <= CAUCHY_REL_TOL, format!("{cases} coefficients, worst relative error {worst:.2e}")))
}

fn convolution_identities() -> Outcome {
    let bound = 10_000;
    let mut reps = test_reps()?;
    let quad = NumberFieldSpec::quadratic(-1).map_err(e)?;
    reps.push(Representation::trivial(&quad));
    reps.extend(synthetic_family(&quad, 2, 2, 9, SyntheticModel::Grc).map_err(e)?.members);
    let worst = reps
        .par_iter()
        .map(|r| {
            let lam = expand_global(r, None, bound, SeriesKind::Lambda).map_err(e)?;
            let mu = expand_global(r, None, bound, SeriesKind::Mu).map_err(e)?;
            let big = expand_global(r, None, bound, SeriesKind::BigLambda).map_err(e)?;
            let unit = dirichlet_convolve(&lam, &mu, bound).map_err(e)?;
            let logs = dirichlet_convolve(&big, &lam, bound).map_err(e)?;
            let mut w: f64 = 0.0;
            for (k, id) in lam.table.ideals().iter().enumerate() {
                let one = if id.is_unit() { 1.0 } else { 0.0 };
                w = w.max((unit.values[k] - one).norm());
                w = w.max((logs.values[k] - lam.values[k] * (id.norm as f64).ln()).norm());
            }
            Ok(w)
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((
        worst <= CONVOLUTION_TOL,
        format!("{} reps, n <= {bound}: worst deviation {worst:.2e}", reps.len()),
    ))
}

fn selberg() -> Outcome {
    let q = rationals();
    let hand = selberg_weights(&Representation::trivial(&q), 3.0).map_err(e)?;
    let hand_ok = hand.diagonal_closed == 0.4 && hand.diagonal_brute == 0.4;
    let mut reps = vec![Representation::trivial(&q)];
    let chars = dirichlet_character_family(7).map_err(e)?;
    reps.extend([1usize, 3, 5].iter().map(|&i| chars.members[i].clone()));
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for r in &reps {
        for z in [1.0, 2.0, 3.0, 10.0, 30.0, 100.0, 316.0, 1000.0] {
            let w = selberg_weights(r, z).map_err(e)?;
            violations += w.clause_violations().len();
            worst = worst.max((w.diagonal_closed - w.diagonal_brute).abs() / w.diagonal_closed.abs().max(1e-300));
        }
    }
    Ok((
        hand_ok && violations == 0 && worst <= SELBERG_TOL,
        format!(
            "hand value {}, clause violations {violations}, closed vs brute worst {worst:.2e} over {} reps",
            hand.diagonal_closed,
            reps.len()
        ),
    ))
}

fn power_sums() -> Outcome {
    let one = Complex64::new(1.0, 0.0);
    let e1 = turan_existence(&[one], 0).map_err(e)?;
    let e2 = turan_existence(&[one, -one], 0).map_err(e)?;
    let four_e = 4.0 * std::f64::consts::E;
    let ex_ok = e1.k_star == 1
        && (e1.achieved - 1.0).abs() <= EXAMPLE_TOL
        && (e1.bound - 1.007 / four_e).abs() <= EXAMPLE_TOL
        && e2.k_star == 2
        && (e2.achieved - 2.0).abs() <= EXAMPLE_TOL
        && (e2.bound - 1.007 / (four_e * four_e)).abs() <= EXAMPLE_TOL;
    let random_min = (0..100_000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let n = rng.random_range(1..=6usize);
            let m = rng.random_range(0..=30u64);
            let z: Vec<Complex64> = (0..n)
                .map(|_| Complex64::from_polar(rng.random_range(0.0..=1.0), rng.random_range(0.0..std::f64::consts::TAU)))
                .collect();
            turan_existence(&z, m).map(|t| t.log_slack).map_err(e)
        })
        .collect::<Result<Vec<_>, String>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let steps = 48;
    let grid_min = (0..steps * steps)
        .into_par_iter()
        .map(|ij| {
            let phase = |s: usize| Complex64::from_polar(1.0, std::f64::consts::TAU * s as f64 / steps as f64);
            let (i, j) = (ij / steps, ij % steps);
            let mut w = f64::INFINITY;
            for m in [0u64, 1, 5, 30] {
                w = w.min(turan_existence(&[Complex64::new(1.0, 0.0), phase(i)], m).map_err(e)?.log_slack);
                w = w.min(
                    turan_existence(&[Complex64::new(1.0, 0.0), phase(i), phase(j)], m)
                        .map_err(e)?
                        .log_slack,
                );
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>, String>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok((
        ex_ok && random_min >= 0.0 && grid_min >= 0.0,
        format!(
            "examples k* = {}, {}; bounds {:.6}, {:.6}; min log slack random {random_min:.3}, phase grid {grid_min:.3}",
            e1.k_star, e2.k_star, e1.bound, e2.bound
        ),
    ))
}

fn density() -> Outcome {
    let mut mismatches = 0;
    let mut unfired = 0;
    let mut out_of_range = 0;
    let mut runs = 0;
    for (i, theta) in [0.25, 0.3, 0.4].into_iter().enumerate() {
        let n = if theta > 0.3 { 3 } else { 2 };
        for seed in 0..20u64 {
            let fam = synthetic_family(&rationals(), n, 8, 1000 * i as u64 + seed, SyntheticModel::Planted { p: 2, theta })
                .map_err(e)?;
            let q = DensityQuery {
                prime: prime_two(&fam.field)?,
                theta,
                epsilon: 0.0,
                scale_override: None,
            };
            let r = density_scan(&fam, &q, seed).map_err(e)?;
            runs += 1;
            mismatches += usize::from(r.count != 1);
            out_of_range += usize::from(!r.range_ok);
            unfired += r.members.iter().filter(|m| m.violator && !m.certificate_fired).count();
        }
    }
    Ok((
        mismatches == 0 && unfired == 0 && out_of_range == 0,
        format!("{runs} families: count mismatches {mismatches}, unfired certificates {unfired}, out of range {out_of_range}"),
    ))
}

fn tails_and_oracle() -> Outcome {
    let mut near = f64::INFINITY;
    let mut far = f64::INFINITY;
    let mut configs = 0;
    for n in [1usize, 2, 3] {
        for eta in [0.1, 0.05, 0.02] {
            for scale in [None, Some(40.0)] {
                let mut inputs = DetectionInputs::new(n, 1, 1, 3.0, 2.0, eta);
                inputs.scale_override = scale;
                let Ok(cfg) = DetectionConfig::new(inputs) else { continue };
                let t = jk_tail_bounds_check(&cfg, 256).map_err(e)?;
                near = near.min(t.near_slack);
                far = far.min(t.far_slack);
                configs += 1;
            }
        }
    }
    let zeta = Representation::trivial(&rationals());
    let truncation = 2_000_000;
    let series = expand_global(&zeta, None, truncation, SeriesKind::BigLambda).map_err(e)?;
    let mut oracle_ok = true;
    let mut gaps = Vec::new();
    for (eta, want) in ZETA_ORACLE {
        let q = HighDerivativeQuery {
            k: 0,
            eta,
            tau: 0.0,
            truncation,
            floor: 0.0,
            coefficient_scale: coefficient_scale(&zeta, None),
        };
        let h = high_derivative(&series, &q).map_err(e)?;
        let tail = h.tail_bound.ok_or("no rigorous tail at k = 0")?;
        let gap = want - h.re;
        oracle_ok &= gap >= -1e-12 && gap <= tail && h.im.abs() < 1e-12;
        gaps.push(format!("eta {eta}: gap {gap:.4} <= tail {tail:.4}"));
    }
    Ok((
        near >= 0.0 && far >= 0.0 && configs > 0 && oracle_ok,
        format!("{configs} configs, min slack near {near:.3} far {far:.3}; {}", gaps.join("; ")),
    ))
}

fn run_bin(args: &[&str], out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_sievelab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(e)?;
    if status.code() != Some(0) {
        return Err(format!("{args:?} exited with {status}"));
    }
    std::fs::read(out).map_err(e)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let zeros = data("zeta_zeros.txt");
    let zeros = zeros.to_str().ok_or("non-UTF-8 path")?;
    let family = data("planted_gl2.toml");
    let family = family.to_str().ok_or("non-UTF-8 path")?;
    let runs: Vec<Vec<&str>> = vec![
        vec!["constants"],
        vec!["large-sieve", "--gl1", "--qmax", "10", "--n", "50,200"],
        vec!["psd", "--gl1", "--qmax", "10", "--nmax", "200"],
        vec!["covers", "--gl1", "--qmax", "5", "--nmax", "100", "--trials", "50"],
        vec!["covers", "--family", family, "--nmax", "60", "--trials", "50", "--target", "mu"],
        vec!["sieve-weights", "--z", "100"],
        vec!["sifted", "--gl1", "--qmax", "5", "--x", "500", "--z", "5"],
        vec!["mvt", "--gl1", "--qmax", "5", "--x", "100", "--t", "5"],
        vec!["detect", "--zeros", zeros, "--eta", "0.1", "--scale", "40", "--k", "20", "--lower-leg"],
        vec!["density", "--synthetic", "2", "--planted-p", "2", "--planted-theta", "0.3", "--theta", "0.3"],
        vec!["count", "--q", "50", "--enumerate"],
        vec!["psd", "--threads", "1", "--gl1", "--qmax", "10", "--nmax", "200"],
    ];
    let mut differing = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let a = run_bin(args, &dir.path().join(format!("a{i}.csv")))?;
        let b = run_bin(args, &dir.path().join(format!("b{i}.csv")))?;
        if a != b {
            differing.push(args[0]);
        }
    }
    let single = std::fs::read(dir.path().join(format!("a{}.csv", runs.len() - 1))).map_err(e)?;
    let multi = std::fs::read(dir.path().join("a2.csv")).map_err(e)?;
    let strip = |b: &[u8]| -> Vec<u8> {
        let s = String::from_utf8_lossy(b);
        s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n").into_bytes()
    };
    let threads_ok = strip(&single) == strip(&multi);
    Ok((
        differing.is_empty() && threads_ok,
        format!(
            "{} commands run twice, differing: {:?}; thread count changes results: {}",
            runs.len(),
            differing,
            !threads_ok
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("constants reproduction", constants_reproduce),
        ("classical GL1 large sieve", classical_large_sieve),
        ("positive semi-definiteness", positive_semidefinite),
        ("cover inequalities", cover_inequalities),
        ("pointwise bounds", pointwise_bounds),
        ("Cauchy identity oracle", cauchy_identity),
        ("convolution identities", convolution_identities),
        ("Selberg weights", selberg),
        ("power sums", power_sums),
        ("density scan", density),
        ("j_k tails and derivative oracle", tails_and_oracle),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(msg) => (false, format!("error: {msg}")),
        };
        failed += usize::from(!ok);
        println!(
            "[{}] {:>2}. {name}: {detail} ({:.1?})",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
