//! Per-subcommand invariant suites, small enough to run in seconds.

use num_complex::Complex64;

use super::{Command, Outcome};
use crate::coeffs::{dirichlet_convolve, expand_global, SeriesKind};
use crate::covers::{bilinear_inequality_check, coefficient_matrix, psd_check, CoverTarget, MatrixKind};
use crate::detect::{
    family_count_bound, hadamard_zero_sum, jk, jk_tail_bounds_check, solve_constants, turan_existence,
    DetectionConfig, DetectionInputs, ZeroList,
};
use crate::error::Result;
use crate::ideals::{IdealIndex, IdealTable, NumberFieldSpec};
use crate::localdata::{dirichlet_character_family, synthetic_family, Family, Representation, SyntheticModel};
use crate::report::Record;
use crate::sieve::large::{gram_matrix, power_iteration, sieve_matrix};
use crate::sieve::mvt::{integrate_polynomial, integrate_polynomial_exact, norm_polynomial};
use crate::sieve::{
    diagonal_lower_bound_check, selberg_weights, sieve_constant, sifted_sum_check, smooth_sum_residue,
    BumpFunction, SieveKind, WeightVector,
};

type Check = (&'static str, bool, String);

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((ok, detail)) => (name, ok, detail),
        Err(e) => (name, false, format!("error: {e}")),
    }
}

fn rationals() -> NumberFieldSpec {
    NumberFieldSpec::rationals()
}

fn trivial_family() -> Result<Family> {
    let q = rationals();
    Family::new(&q, vec![Representation::trivial(&q)], "trivial")
}

pub fn run(command: &Command) -> Result<Outcome> {
    let checks: Vec<Check> = match command {
        Command::Constants { .. } => vec![check("constants_system", || {
            let c = solve_constants()?;
            let worst = [
                c.constraint_residual(),
                c.a1_residual(),
                (c.r * c.r - c.a * c.a - 1.0).abs(),
                (c.a0 * std::f64::consts::E * c.v - 1.0).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            Ok((worst <= 1e-8, format!("max residual {worst:.2e}")))
        })],
        Command::LargeSieve { .. } => vec![
            check("single_trivial_saturates", || {
                let c = sieve_constant(&trivial_family()?, 50, None, SieveKind::Lambda)?;
                Ok(((c.value - 50.0).abs() <= 1e-8, format!("C = {}", c.value)))
            }),
            check("classical_gl1", || {
                let c = sieve_constant(&dirichlet_character_family(5)?, 50, None, SieveKind::Lambda)?;
                Ok((c.value <= 74.0, format!("C = {} vs 74", c.value)))
            }),
            check("power_iteration_duality", || {
                let m = sieve_matrix(&dirichlet_character_family(5)?, 50, None, SieveKind::Lambda)?;
                let g = gram_matrix(&m.entries);
                let c = sieve_constant(&dirichlet_character_family(5)?, 50, None, SieveKind::Lambda)?;
                let p = power_iteration(&g, 200, 7);
                let rel = (c.value - p.value).abs() / c.value;
                Ok((rel <= 1e-6, format!("relative gap {rel:.2e}")))
            }),
        ],
        Command::Psd { .. } => vec![
            check("gl1_psd", || {
                let fam = dirichlet_character_family(8)?;
                let table = IdealTable::new(&fam.field, 100)?;
                for id in table.ideals() {
                    let v = psd_check(&coefficient_matrix(&fam, id, MatrixKind::Lambda)?, 1e-9)?;
                    if !v.verdict {
                        return Ok((false, format!("n = {}", id.norm)));
                    }
                }
                Ok((true, format!("{} ideals", table.len())))
            }),
            check("synthetic_gl2_minus_product_psd", || {
                let fam = synthetic_family(&rationals(), 2, 4, 3, SyntheticModel::Grc)?;
                let table = IdealTable::new(&fam.field, 60)?;
                for id in table.ideals() {
                    let v = psd_check(&coefficient_matrix(&fam, id, MatrixKind::LambdaMinusProduct)?, 1e-9)?;
                    if !v.verdict {
                        return Ok((false, format!("n = {}", id.norm)));
                    }
                }
                Ok((true, format!("{} ideals", table.len())))
            }),
        ],
        Command::Covers { .. } => {
            let mut out = Vec::new();
            for target in [CoverTarget::Lambda, CoverTarget::Mu, CoverTarget::Log] {
                out.push(check(target.name(), move || {
                    let fam = dirichlet_character_family(6)?;
                    let table = IdealTable::new(&fam.field, 40)?;
                    let mut worst = f64::INFINITY;
                    for id in table.ideals() {
                        worst = worst.min(bilinear_inequality_check(target, &fam, None, id, 20, 1)?.worst_margin);
                    }
                    Ok((worst >= -1e-9, format!("worst margin {worst:.3e}")))
                }));
            }
            out
        }
        Command::SieveWeights { .. } => vec![
            check("hand_value_z3", || {
                let w = selberg_weights(&Representation::trivial(&rationals()), 3.0)?;
                Ok((w.diagonal_closed == 0.4 && w.clause_violations().is_empty(), format!("{}", w.diagonal_closed)))
            }),
            check("closed_form_vs_brute", || {
                let w = selberg_weights(&Representation::trivial(&rationals()), 200.0)?;
                let gap = (w.diagonal_closed - w.diagonal_brute).abs();
                Ok((gap <= 1e-10 && w.clause_violations().is_empty(), format!("gap {gap:.2e}")))
            }),
            check("key_sieve_property", || {
                let w = selberg_weights(&Representation::trivial(&rationals()), 10.0)?;
                let n = IdealIndex::rational(11 * 13)?;
                let s = w.divisor_sum(&n);
                Ok((s == 1.0, format!("sum = {s}")))
            }),
            check("harmonic_ratio", || {
                let r = diagonal_lower_bound_check(&Representation::trivial(&rationals()), 1000.0, None)?;
                let v = r.ratio.unwrap_or(f64::NAN);
                Ok(((v - 1.0836).abs() < 1e-4, format!("{v}")))
            }),
        ],
        Command::Sifted { .. } => vec![
            check("zero_weights", || {
                let fam = dirichlet_character_family(5)?;
                let a = WeightVector::ones(&fam.field, 100.0, 1.0)?;
                let zero = WeightVector::zero_like(&a);
                let r = sifted_sum_check(&fam, &Representation::trivial(&fam.field), 100.0, 1.0, 5.0, &zero, SeriesKind::Lambda)?;
                Ok((r.lhs == 0.0, format!("lhs {}", r.lhs)))
            }),
            check("large_z_empties", || {
                let fam = dirichlet_character_family(5)?;
                let a = WeightVector::ones(&fam.field, 100.0, 1.0)?;
                let r = sifted_sum_check(&fam, &Representation::trivial(&fam.field), 100.0, 1.0, 500.0, &a, SeriesKind::Lambda)?;
                Ok((r.lhs == 0.0 && r.sifted_terms == 0, format!("lhs {}", r.lhs)))
            }),
        ],
        Command::Residue { .. } => vec![
            check("transform_two_ways", || {
                let phi = BumpFunction;
                let gap = (phi.hat(1.0) - phi.hat_series(1.0)).abs();
                Ok((gap <= 1e-10, format!("gap {gap:.2e}")))
            }),
            check("diagonal_trivial_small_diff", || {
                let t = Representation::trivial(&rationals());
                let s = smooth_sum_residue(&t, &t, 1000.0, 1.0, &IdealIndex::unit(&rationals()), None)?;
                let d = s.diff.map_or(f64::NAN, |d| d.0.abs() / 1000.0);
                Ok((d <= 0.05, format!("|diff|/x = {d:.3e}")))
            }),
            check("distinct_characters_no_pole", || {
                let fam = dirichlet_character_family(5)?;
                let s = smooth_sum_residue(&fam.members[1], &fam.members[2], 500.0, 1.0, &IdealIndex::unit(&rationals()), None)?;
                Ok((s.main == Some(0.0), format!("main {:?}", s.main)))
            }),
        ],
        Command::Mvt { .. } => vec![check("quadrature_vs_closed_form", || {
            let q = rationals();
            let table = std::sync::Arc::new(IdealTable::new(&q, 50)?);
            let poly = norm_polynomial(&Representation::trivial(&q), None, &table, 0, 0.5)?;
            let (v, _, _) = integrate_polynomial(&poly, 1.0);
            let exact = integrate_polynomial_exact(&poly, 1.0);
            Ok(((v - exact).abs() <= 1e-6, format!("{v} vs {exact}")))
        })],
        Command::Detect { .. } => vec![
            check("jk_closed_form", || Ok(((jk(1.0, 1) - (-1f64).exp()).abs() < 1e-15, String::new()))),
            check("tail_bounds", || {
                let mut inputs = DetectionInputs::new(1, 1, 1, 3.0, 2.0, 0.05);
                inputs.scale_override = Some(40.0);
                let cfg = DetectionConfig::new(inputs)?;
                let t = jk_tail_bounds_check(&cfg, 200)?;
                Ok((t.near_slack >= 0.0 && t.far_slack >= 0.0, format!("{:.3} / {:.3}", t.near_slack, t.far_slack)))
            }),
            check("single_zero_sum", || {
                let z = ZeroList { paired: false, ..ZeroList::new(vec![(0.5, 0.0)], "selftest")? };
                let s = hadamard_zero_sum(&z, Complex64::new(1.5, 0.0), 0)?;
                Ok(((s.re - 1.0).abs() < 1e-15, format!("{}", s.re)))
            }),
        ],
        Command::Density { .. } => vec![
            check("planted_violator_found", || {
                let fam = synthetic_family(&rationals(), 2, 6, 4, SyntheticModel::Planted { p: 2, theta: 0.3 })?;
                let q = crate::detect::DensityQuery {
                    prime: crate::ideals::IdealIndex::rational(2)?.as_prime_power().map(|(p, _)| p).expect("prime"),
                    theta: 0.3,
                    epsilon: 0.0,
                    scale_override: None,
                };
                let r = crate::detect::density_scan(&fam, &q, 0)?;
                let fired = r.members.iter().filter(|m| m.violator).all(|m| m.certificate_fired);
                Ok((r.count == 1 && fired, format!("count {}", r.count)))
            }),
            check("power_sum_examples", || {
                let t = turan_existence(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], 0)?;
                Ok((t.k_star == 2 && (t.achieved - 2.0).abs() < 1e-12, format!("k* = {}", t.k_star)))
            }),
        ],
        Command::Count { .. } => vec![check("count_at_twelve", || {
            let c = family_count_bound(&rationals(), 1, 12.0, 0.0, true)?;
            Ok((c.enumerated == Some(2), format!("{:?}", c.enumerated)))
        })],
        Command::Ingest { .. } => vec![
            check("zeros_parse", || {
                let z = ZeroList::parse("# c\n14.134725141734693\n21.022039638771555\n", "selftest")?;
                Ok((z.len() == 2 && z.paired, String::new()))
            }),
            check("convolution_identity", || {
                let t = Representation::trivial(&rationals());
                let l = expand_global(&t, None, 200, SeriesKind::Lambda)?;
                let m = expand_global(&t, None, 200, SeriesKind::Mu)?;
                let c = dirichlet_convolve(&l, &m, 200)?;
                let bad = c.iter().filter(|(id, v)| (v - Complex64::new(if id.is_unit() { 1.0 } else { 0.0 }, 0.0)).norm() > 1e-9).count();
                Ok((bad == 0, format!("{bad} mismatches")))
            }),
        ],
    };
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let records = checks
        .iter()
        .map(|(name, ok, detail)| Record::new().with("check", *name).with("passed", *ok).with("detail", detail.clone()))
        .collect();
    Ok(Outcome {
        records,
        header: Some(vec!["check", "passed", "detail"]),
        summary: format!("selftest {} checks, {} failed", checks.len(), failed.len()),
        violation: (!failed.is_empty()).then(|| format!("selftest failures: {}", failed.join(", "))),
    })
}
