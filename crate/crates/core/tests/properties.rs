//! Property tests for the estimator invariants.

use proptest::prelude::*;
use shrinkage_core::denoise::{
    eb_statistics, ebayes, soft_threshold, EbParams, SoftThresholdParams,
};
use shrinkage_core::model::squared_loss;
use shrinkage_core::risk::{sure_ebayes_zero_location, sure_soft_threshold};
use shrinkage_core::selection::{hybrid, tune_eb, tune_st, Grid};

fn observation() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8.0..8.0f64, 4..64)
}

proptest! {
    #[test]
    fn soft_threshold_is_odd_and_contractive(y in observation(), lambda in 0.0..4.0f64) {
        let params = SoftThresholdParams::new(lambda).unwrap();
        let est = soft_threshold(&y, &params);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let est_neg = soft_threshold(&neg, &params);
        for ((e, en), v) in est.iter().zip(&est_neg).zip(&y) {
            prop_assert_eq!(*e, -en);
            prop_assert!(e.abs() <= v.abs() + 1e-15);
        }
    }

    #[test]
    fn soft_threshold_is_one_lipschitz(
        y in observation(),
        lambda in 0.0..4.0f64,
        bump in -0.5..0.5f64,
        idx in 0usize..64,
    ) {
        let params = SoftThresholdParams::new(lambda).unwrap();
        let i = idx % y.len();
        let mut shifted = y.clone();
        shifted[i] += bump;
        let a = soft_threshold(&y, &params);
        let b = soft_threshold(&shifted, &params);
        // Compare against the effective (rounded) perturbation.
        let applied = (shifted[i] - y[i]).abs();
        prop_assert!((a[i] - b[i]).abs() <= applied + 1e-12);
    }

    #[test]
    fn ebayes_zero_location_is_odd_and_contractive(
        y in observation(),
        eps in 0.02..=1.0f64,
    ) {
        let params = EbParams::new(eps, true).unwrap();
        let est = ebayes(&y, &params);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let est_neg = ebayes(&neg, &params);
        let stats = eb_statistics(&y, &params);
        for ((e, en), v) in est.iter().zip(&est_neg).zip(&y) {
            prop_assert!((e + en).abs() <= 1e-12);
            // |est_i| <= a |y_i| <= |y_i| since every b_i >= 1.
            prop_assert!(e.abs() <= stats.a_y * v.abs() + 1e-12);
        }
        for b in &stats.b {
            prop_assert!(*b >= 1.0);
        }
    }

    #[test]
    fn ebayes_shrinks_large_entries_proportionally_less(
        y in observation(),
        eps in 0.02..=1.0f64,
    ) {
        let params = EbParams::new(eps, true).unwrap();
        let est = ebayes(&y, &params);
        // Collect (|y_i|, est_i / y_i) for nonzero entries; the shrink
        // ratio must be nondecreasing in |y_i|.
        let mut pairs: Vec<(f64, f64)> = y
            .iter()
            .zip(&est)
            .filter(|(v, _)| v.abs() > 1e-9)
            .map(|(v, e)| (v.abs(), e / v))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pairs.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 - 1e-12);
        }
    }

    #[test]
    fn ebayes_is_permutation_covariant(y in observation(), eps in 0.02..=1.0f64) {
        let params = EbParams::new(eps, false).unwrap();
        let est = ebayes(&y, &params);
        // Rotate by one: the estimate must rotate with it.
        let mut rotated = y.clone();
        rotated.rotate_left(1);
        let mut est_rotated = ebayes(&rotated, &params);
        est_rotated.rotate_right(1);
        for (a, b) in est.iter().zip(&est_rotated) {
            // The global statistics sum in a different order after the
            // rotation, so allow summation-rounding noise.
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn squared_loss_is_symmetric_and_nonnegative(
        (a, b) in (1usize..32).prop_flat_map(|len| {
            (
                prop::collection::vec(-5.0..5.0f64, len),
                prop::collection::vec(-5.0..5.0f64, len),
            )
        }),
    ) {
        let ab = squared_loss(&a, &b).unwrap();
        let ba = squared_loss(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn tuned_parameters_come_from_the_grid(y in observation()) {
        let lambda_grid = Grid::new(vec![0.2, 0.5, 1.0, 2.0]).unwrap();
        let eps_grid = Grid::new(vec![0.1, 0.3, 0.7, 1.0]).unwrap();
        let (lambda, sure_st) = tune_st(&y, &lambda_grid).unwrap();
        prop_assert!(lambda_grid.values().contains(&lambda));
        prop_assert_eq!(sure_st, sure_soft_threshold(&y, lambda));
        let (eps, sure_eb) = tune_eb(&y, &eps_grid, true).unwrap();
        prop_assert!(eps_grid.values().contains(&eps));
        prop_assert_eq!(sure_eb, sure_ebayes_zero_location(&y, eps, true).unwrap());
    }

    #[test]
    fn hybrid_gamma_depends_only_on_sure_ordering(
        y in observation(),
        lambda in 0.1..3.0f64,
        eps in 0.02..=1.0f64,
    ) {
        let choice = hybrid(&y, lambda, eps, true).unwrap();
        prop_assert_eq!(choice.gamma, u8::from(choice.sure_eb <= choice.sure_st));
        // The selected estimate is exactly the chosen estimator's output,
        // so its loss is that estimator's loss by construction.
        let expected = if choice.gamma == 1 {
            ebayes(&y, &EbParams::new(eps, true).unwrap())
        } else {
            soft_threshold(&y, &SoftThresholdParams::new(lambda).unwrap())
        };
        prop_assert_eq!(choice.estimate, expected);
    }
}
