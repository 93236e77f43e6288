use proptest::prelude::*;
use pvbounds::{build_band, compute_curves, BandConfig, ScoredDataset};

fn dataset() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (2usize..300).prop_flat_map(|n| {
        (
            prop::collection::vec(-1e3f64..1e3, n),
            prop::collection::vec(0u8..=1, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bands_bracket_estimates_and_have_monotone_widths(
        (scores, labels) in dataset(),
        delta in 1e-4f64..0.99,
        vc in 1usize..4,
    ) {
        let curves = compute_curves(&ScoredDataset::from_scores_labels(&scores, &labels).unwrap());
        let n = curves.n();
        let mut configs = vec![BandConfig::fixed(delta)];
        if vc <= n {
            configs.push(BandConfig::uniform_vc(delta, vc));
        }
        for config in configs {
            let band = build_band(&curves, &config).unwrap();
            prop_assert_eq!(band.rows.len(), n - 1);
            for r in &band.rows {
                prop_assert!(0.0 <= r.ppv_lo && r.ppv_lo <= r.ppv_hat && r.ppv_hat <= r.ppv_hi && r.ppv_hi <= 1.0);
                prop_assert!(0.0 <= r.npv_lo && r.npv_lo <= r.npv_hat && r.npv_hat <= r.npv_hi && r.npv_hi <= 1.0);
            }
            for w in band.rows.windows(2) {
                prop_assert!(w[1].ppv_halfwidth() <= w[0].ppv_halfwidth());
                prop_assert!(w[1].npv_halfwidth() >= w[0].npv_halfwidth());
            }
        }
    }

    #[test]
    fn uniform_band_contains_fixed_band((scores, labels) in dataset(), delta in 1e-4f64..0.99) {
        let curves = compute_curves(&ScoredDataset::from_scores_labels(&scores, &labels).unwrap());
        let fixed = build_band(&curves, &BandConfig::fixed(delta)).unwrap();
        let uniform = build_band(&curves, &BandConfig::uniform_vc(delta, 1)).unwrap();
        for (f, u) in fixed.rows.iter().zip(&uniform.rows) {
            prop_assert!(u.ppv_lo <= f.ppv_lo && f.ppv_hi <= u.ppv_hi);
            prop_assert!(u.npv_lo <= f.npv_lo && f.npv_hi <= u.npv_hi);
        }
    }
}
