use num_complex::Complex64;
use proptest::prelude::*;

use sievelab::coeffs::{dirichlet_convolve, expand_global, rankin_selberg_local, RamifiedModel, SeriesKind};
use sievelab::covers::{psd_check_matrix, FamilyView, MatrixKind};
use sievelab::detect::jk::jk;
use sievelab::detect::turan_existence;
use sievelab::ideals::{divisors, enumerate_ideals, NumberFieldSpec, PrimeIdeal};
use sievelab::localdata::{dirichlet_character_family, synthetic_family, LocalParameters, Representation, SyntheticModel};
use sievelab::report::fmt_f64;
use sievelab::sieve::{selberg_weights, sieve_constant, SieveKind};

fn field_for(d: i64) -> NumberFieldSpec {
    if d == 1 {
        NumberFieldSpec::rationals()
    } else {
        NumberFieldSpec::quadratic(d).unwrap()
    }
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..1.5f64, 0.0..std::f64::consts::TAU), n)
        .prop_map(|v| v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ideal_norms_multiply(d in prop::sample::select(vec![1i64, -1, -5, 2, 3, 5, -23]), i in 0usize..200, j in 0usize..200) {
        let field = field_for(d);
        let ideals = enumerate_ideals(&field, 300).unwrap();
        let (a, b) = (&ideals[i % ideals.len()], &ideals[j % ideals.len()]);
        let ab = a.mul(b).unwrap();
        prop_assert_eq!(ab.norm, a.norm * b.norm);
        prop_assert!(a.divides(&ab) && b.divides(&ab));
        let q = ab.quotient(b);
        prop_assert_eq!(q.as_ref(), Some(a));
    }

    #[test]
    fn divisors_divide(d in prop::sample::select(vec![1i64, -1, 5, -7]), i in 0usize..400) {
        let field = field_for(d);
        let ideals = enumerate_ideals(&field, 500).unwrap();
        let n = &ideals[i % ideals.len()];
        let divs = divisors(n, None, false);
        prop_assert!(divs.iter().all(|x| x.divides(n)));
        prop_assert!(divs.iter().any(|x| x.is_unit()) && divs.contains(n));
    }

    #[test]
    fn rankin_selberg_is_conjugate_symmetric(
        a in (1usize..=4).prop_flat_map(complex_vec),
        b in (1usize..=4).prop_flat_map(complex_vec),
        k in 0usize..10,
    ) {
        let p = PrimeIdeal { p: 5, slot: 0, norm: 5 };
        let (pa, pb) = (LocalParameters::new(p, a), LocalParameters::new(p, b));
        let ab = rankin_selberg_local(&pa, &pb, k, RamifiedModel::Product).unwrap();
        let ba = rankin_selberg_local(&pb, &pa, k, RamifiedModel::Product).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-9 * ab.norm().max(1.0));
    }

    #[test]
    fn inverse_series_cancels(n in 1usize..=3, seed in 0u64..1000, d in prop::sample::select(vec![1i64, -1, 2])) {
        let fam = synthetic_family(&field_for(d), n, 1, seed, SyntheticModel::Grc).unwrap();
        let rep = &fam.members[0];
        let lam = expand_global(rep, None, 400, SeriesKind::Lambda).unwrap();
        let mu = expand_global(rep, None, 400, SeriesKind::Mu).unwrap();
        let c = dirichlet_convolve(&lam, &mu, 400).unwrap();
        for (id, v) in c.iter() {
            let want = if id.is_unit() { 1.0 } else { 0.0 };
            prop_assert!((v - Complex64::new(want, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn character_gram_matrices_are_psd(q in 3u64..=12, n in 1u64..=3000) {
        let fam = dirichlet_character_family(q).unwrap();
        let view = FamilyView::new(&fam).unwrap();
        let id = sievelab::ideals::IdealIndex::rational(n).unwrap();
        let m = view.matrix(&id, MatrixKind::Lambda).unwrap();
        prop_assert!(psd_check_matrix(&m.entries, 1e-9).unwrap().verdict);
    }

    #[test]
    fn sieve_constant_is_between_row_and_frobenius(q in 3u64..=9, n in 10u64..150) {
        let fam = dirichlet_character_family(q).unwrap();
        let c = sieve_constant(&fam, n, None, SieveKind::Lambda).unwrap();
        // The trivial character's row has squared length N.
        prop_assert!(c.value >= n as f64 * (1.0 - 1e-12));
        prop_assert!(c.value <= c.frobenius_sq * (1.0 + 1e-12));
    }

    #[test]
    fn selberg_clauses_hold(z in 1.0f64..400.0, which in 0usize..4) {
        let rep = if which == 0 {
            Representation::trivial(&NumberFieldSpec::rationals())
        } else {
            dirichlet_character_family(7).unwrap().members[which].clone()
        };
        let w = selberg_weights(&rep, z).unwrap();
        prop_assert!(w.clause_violations().is_empty());
        prop_assert!((w.diagonal_closed - w.diagonal_brute).abs() <= 1e-10 * w.diagonal_closed.max(1e-300));
        prop_assert!(w.rho.iter().all(|(_, r)| r.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn power_sum_floor_holds(z in (1usize..=6).prop_flat_map(complex_vec), m in 0u64..=30) {
        prop_assume!(z.iter().any(|w| w.norm() > 0.0));
        let t = turan_existence(&z, m).unwrap();
        prop_assert!(t.log_slack >= 0.0);
        prop_assert!(t.k_star > m && t.k_star <= m + z.len() as u64);
    }

    #[test]
    fn power_sums_scale_homogeneously(z in (1usize..=4).prop_flat_map(complex_vec), c in 0.2f64..3.0, m in 0u64..10) {
        prop_assume!(z.iter().any(|w| w.norm() > 1e-3));
        let t = turan_existence(&z, m).unwrap();
        let scaled: Vec<Complex64> = z.iter().map(|w| w * c).collect();
        let s = turan_existence(&scaled, m).unwrap();
        prop_assert_eq!(s.k_star, t.k_star);
        let factor = c.powi(t.k_star as i32);
        prop_assert!((s.achieved - t.achieved * factor).abs() <= 1e-9 * s.achieved.max(1e-300));
        prop_assert!((s.bound - t.bound * factor).abs() <= 1e-9 * s.bound.max(1e-300));
    }

    #[test]
    fn jk_peaks_at_k(k in 1u64..400, u in 0.0f64..800.0) {
        prop_assert!(jk(u, k) <= jk(k as f64, k) * (1.0 + 1e-12));
    }

    #[test]
    fn floats_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
