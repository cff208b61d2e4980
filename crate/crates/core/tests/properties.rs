//! Property tests for the algebraic invariants of the estimators, models
//! and closed forms.

use comodep::analytic::{egm3_kappa, egm3_rho, pareto3_rho, ParetoVariant};
use comodep::empirical::{
    box_integrals, classical_hat, comonotonic_rearrangement, kappa_hat, rho_c_hat, rho_hat_general,
    rho_hat_general_parts, rho_hat_nonneg, rho_hat_nonneg_parts,
};
use comodep::model::{egm3_admissible, DiscreteJoint, Marginal, SampleMatrix, UnitPoint};
use comodep::oracle::discrete_rho;
use proptest::prelude::*;

/// Samples with `m` columns on a coarse grid (so ties occur) and no
/// constant column.
fn sample_strategy(m: std::ops::RangeInclusive<usize>, lo: i32, hi: i32) -> impl Strategy<Value = SampleMatrix> {
    (m, 2usize..40)
        .prop_flat_map(move |(m, n)| proptest::collection::vec(lo..=hi, n * m).prop_map(move |v| (n, m, v)))
        .prop_filter_map("constant column", |(n, m, v)| {
            let data: Vec<f64> = v.into_iter().map(|k| f64::from(k) / 4.0).collect();
            let s = SampleMatrix::from_row_major(n, m, data).ok()?;
            (!s.has_degenerate_column()).then_some(s)
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rearrangement_sorts_each_column(s in sample_strategy(2..=4, -40, 40)) {
        let r = comonotonic_rearrangement(&s);
        let sorted = r.sorted();
        for j in 0..s.ncols() {
            let mut orig = s.column(j);
            orig.sort_by(f64::total_cmp);
            prop_assert_eq!(sorted.column(j), orig);
        }
        for i in 1..s.nrows() {
            prop_assert!(sorted.row(i - 1).iter().zip(sorted.row(i)).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn sorted_sample_has_rho_one(s in sample_strategy(2..=4, -40, 40)) {
        let sorted = comonotonic_rearrangement(&s).into_sorted();
        match rho_hat_general(&sorted) {
            Ok(v) => prop_assert_eq!(v, 1.0),
            Err(e) => {
                let degenerate = matches!(e, comodep::Error::DegenerateDenominator { .. });
                prop_assert!(degenerate, "unexpected error {:?}", e);
            }
        }
    }

    #[test]
    fn permutations_are_bit_exact(s in sample_strategy(2..=4, -40, 40), seed in any::<u64>()) {
        let n = s.nrows();
        let m = s.ncols();
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..m).collect();
        // deterministic shuffles from the seed
        let mut x = seed | 1;
        for i in (1..n).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            rows.swap(i, (x % (i as u64 + 1)) as usize);
        }
        for i in (1..m).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            cols.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let p = s.permute_rows(&rows).unwrap().permute_columns(&cols).unwrap();
        prop_assert_eq!(rho_hat_general_parts(&s), rho_hat_general_parts(&p));
        prop_assert_eq!(rho_hat_nonneg_parts(&s), rho_hat_nonneg_parts(&p));
    }

    #[test]
    fn duality(s in sample_strategy(2..=4, -40, 40)) {
        if let Ok(v) = rho_hat_general(&s) {
            let neg = rho_hat_general(&s.negated()).unwrap();
            prop_assert!(close(v, neg, 1e-12), "{} vs {}", v, neg);
        }
    }

    #[test]
    fn bounded_by_one_for_nonnegative_data(s in sample_strategy(2..=4, 0, 40)) {
        if let Ok(v) = rho_hat_general(&s) {
            prop_assert!(v <= 1.0 + 1e-12, "{}", v);
        }
    }

    #[test]
    fn bounded_by_one_for_pairs(s in sample_strategy(2..=2, -40, 40)) {
        if let Ok(v) = rho_hat_general(&s) {
            prop_assert!(v <= 1.0 + 1e-12, "{}", v);
        }
    }

    #[test]
    fn positive_column_scaling(s in sample_strategy(2..=4, 1, 40), c in proptest::collection::vec(0.1f64..10.0, 4)) {
        let scaled = s.map(|j, v| v * c[j]).unwrap();
        if let Ok(v) = rho_hat_general(&s) {
            let w = rho_hat_general(&scaled).unwrap();
            prop_assert!(close(v, w, 1e-12), "{} vs {}", v, w);
        }
    }

    #[test]
    fn pair_affine_invariance(s in sample_strategy(2..=2, -40, 40), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let t = s.map(|j, v| if j == 0 { a * v + b } else { v - b }).unwrap();
        let (v, w) = (rho_hat_general(&s).unwrap(), rho_hat_general(&t).unwrap());
        prop_assert!(close(v, w, 1e-10), "{} vs {}", v, w);
    }

    #[test]
    fn shift_identity(s in sample_strategy(2..=4, -40, 40)) {
        if let Ok(v) = rho_hat_nonneg(&s) {
            let w = rho_hat_general(&s.shifted_to_zero()).unwrap();
            prop_assert!(close(v, w, 1e-12), "{} vs {}", v, w);
        }
    }

    #[test]
    fn pair_identities(s in sample_strategy(2..=2, -40, 40)) {
        let r = rho_hat_general(&s).unwrap();
        prop_assert!(close(r, rho_c_hat(&s).unwrap(), 1e-9));
        prop_assert!(close(r, kappa_hat(&s).unwrap(), 1e-9));
    }

    #[test]
    fn rho_c_at_most_one(s in sample_strategy(2..=4, -40, 40)) {
        if let Ok(v) = rho_c_hat(&s) {
            prop_assert!(v <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn kappa_of_negation_is_nonneg_rho(s in sample_strategy(3..=3, 0, 40)) {
        if let Ok(v) = rho_hat_nonneg(&s) {
            let k = kappa_hat(&s.negated()).unwrap();
            prop_assert!(close(v, k, 1e-9), "{} vs {}", v, k);
        }
    }

    #[test]
    fn nonneg_parts_are_tail_integrals(s in sample_strategy(2..=3, -40, 40)) {
        let parts = rho_hat_nonneg_parts(&s);
        let b = box_integrals(&s).unwrap();
        prop_assert!(close(parts.numerator, b.tail_gap, 1e-10), "{:?} {:?}", parts, b);
        prop_assert!(close(parts.denominator, b.comonotone_tail_gap, 1e-10), "{:?} {:?}", parts, b);
    }

    #[test]
    fn classical_measures_in_range(s in sample_strategy(2..=2, -40, 40)) {
        let c = classical_hat(&s).unwrap();
        for v in [c.pearson, c.kendall, c.spearman, c.gini, c.blomqvist] {
            prop_assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn egm3_kappa_minus_rho(a in -0.25f64..0.25, b in -0.25f64..0.25, c in -0.25f64..0.25, d in -0.25f64..0.25) {
        prop_assume!(egm3_admissible(a, b, c, d));
        let gap = egm3_kappa(a, b, c, d).unwrap() - egm3_rho(a, b, c, d).unwrap();
        prop_assert!((gap - 2.0 * d / 27.0).abs() < 1e-15);
    }

    #[test]
    fn pareto_rho_in_unit_interval(a0 in 0.0f64..20.0, alpha in 0.5f64..10.0) {
        prop_assume!(a0 + alpha > 3.0);
        let r = pareto3_rho(a0, alpha, ParetoVariant::Corrected).unwrap();
        prop_assert!((0.0..1.0).contains(&r), "{}", r);
        prop_assert_eq!(r == 0.0, a0 == 0.0);
    }

    #[test]
    fn quantile_is_generalized_inverse(p in 1e-12f64..(1.0 - 1e-12), which in 0usize..6) {
        let m = [
            Marginal::standard_uniform(),
            Marginal::exponential(2.0).unwrap(),
            Marginal::pareto2(1.0, 2.0, 3.0).unwrap(),
            Marginal::normal(1.0, 3.0).unwrap(),
            Marginal::empirical(comodep::model::EmpiricalColumn::from_unsorted(vec![1.0, 2.0, 2.0, 5.0]).unwrap()),
            Marginal::uniform(-3.0, -1.0).unwrap(),
        ][which].clone();
        let x = m.quantile(p).unwrap();
        prop_assert!(m.cdf(x) >= p - 1e-9, "cdf {} below {}", m.cdf(x), p);
        let p2 = (p * 1.01).min(1.0 - 1e-13);
        prop_assert!(m.quantile(p2).unwrap() >= x);
        let _ = m.quantile_at(UnitPoint::new(p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4096))]

    #[test]
    fn discrete_oracle_matches_estimator(s in sample_strategy(2..=4, -40, 40)) {
        let law = DiscreteJoint::from_sample(&s);
        match (rho_hat_general(&s), discrete_rho(&law)) {
            (Ok(a), Ok(b)) => prop_assert!(close(a, b, 1e-12), "{} vs {}", a, b),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "estimator {:?} vs oracle {:?}", a, b),
        }
    }
}
