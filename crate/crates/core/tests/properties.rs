//! Property tests over randomly drawn symmetric sets.

use num_complex::Complex64;
use proptest::prelude::*;
use seqmc::linalg::Tolerances;
use seqmc::povm::{mc_povm_symmetric, me_povm, validate_povm};
use seqmc::smc::{p_correct_closed_form, plan};
use seqmc::symmetric::SymmetricSet;

/// Normalized coefficient vector with 2 <= D < N <= 8 and a conditioning
/// floor on the smallest magnitude.
fn arb_set() -> impl Strategy<Value = SymmetricSet> {
    (3usize..=8)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..n),
            )
        })
        .prop_filter_map("ill-conditioned draw", |(n, raw)| {
            let mut coeffs: Vec<Complex64> =
                raw.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            for z in &mut coeffs {
                *z /= norm;
            }
            if coeffs.iter().any(|z| z.norm() < 0.05) {
                return None;
            }
            SymmetricSet::make_root_set(n, &coeffs).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mc_povm_is_valid_and_pins_inconclusive(set in arb_set()) {
        let tol = Tolerances::default();
        let (povm, report) = mc_povm_symmetric(&set, &tol);
        let check = validate_povm(&povm, &tol).unwrap();
        prop_assert!(check.pass);
        let d = set.dim() as f64;
        let c_min = set.coefficient_profile(&tol).c_min;
        let expected = (1.0 - d * c_min * c_min).max(0.0);
        prop_assert!((report.inconclusive_probability - expected).abs() <= 1e-10);
    }

    #[test]
    fn me_confidence_never_exceeds_mc(set in arb_set()) {
        let tol = Tolerances::default();
        let (_, mc) = mc_povm_symmetric(&set, &tol);
        let (_, me) = me_povm(&set);
        prop_assert!(me.confidence_per_outcome[0] <= mc.confidence_per_outcome[0] + 1e-10);
    }

    #[test]
    fn plan_totals_partition_unity(set in arb_set()) {
        let tol = Tolerances::default();
        let p = plan(&set, &tol).unwrap();
        let total = p.p_correct_total + p.p_inconclusive_total + p.p_error_total;
        prop_assert!((total - 1.0).abs() <= 1e-10);
        prop_assert!((p.p_correct_total - p_correct_closed_form(&p)).abs() <= 1e-10);
        // Confidences strictly decrease across stages.
        for w in p.stages.windows(2) {
            prop_assert!(w[1].confidence < w[0].confidence);
        }
    }
}
