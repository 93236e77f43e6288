use proptest::prelude::*;
use pvbounds::{
    build_band, compute_curves, select_accuracy, select_maximin_lcb, BandConfig, BandMode, BandRow, ConfidenceBand,
    ScoredDataset,
};

fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn band_from(lo: &[(f64, f64)]) -> ConfidenceBand {
    let n = lo.len() + 1;
    let rows = lo
        .iter()
        .enumerate()
        .map(|(i, &(p, q))| BandRow {
            k: i + 1,
            alpha: (i + 1) as f64 / n as f64,
            ppv_hat: p,
            ppv_lo: p,
            ppv_hi: 1.0,
            npv_hat: q,
            npv_lo: q,
            npv_hi: 1.0,
            ppv_deviation: 0.0,
            ppv_bias: 0.0,
            npv_deviation: 0.0,
            npv_bias: 0.0,
        })
        .collect();
    ConfidenceBand { n, delta: 0.1, mode: BandMode::Fixed, rows }
}

fn dataset() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (2usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec((0u8..6).prop_map(f64::from), n),
            prop::collection::vec(0u8..=1, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn accuracy_rule_matches_exhaustive_scan((scores, labels) in dataset()) {
        let curves = compute_curves(&ScoredDataset::from_scores_labels(&scores, &labels).unwrap());
        let correct: Vec<f64> = curves
            .points()
            .iter()
            .map(|p| (p.true_positives + p.true_negatives) as f64)
            .collect();
        let choice = select_accuracy(&curves);
        prop_assert_eq!(choice.k, first_argmax(&correct) + 1);
        let p = curves.point(choice.k).unwrap();
        let mixed = p.alpha * p.ppv_hat + (1.0 - p.alpha) * p.npv_hat;
        prop_assert!((choice.objective_value - mixed).abs() < 1e-12);
    }

    #[test]
    fn maximin_rule_matches_exhaustive_scan(
        lo in prop::collection::vec((0u8..8, 0u8..8), 1..60),
        shift in 0u8..4,
    ) {
        let lo: Vec<(f64, f64)> = lo.iter().map(|&(p, q)| (f64::from(p) / 8.0, f64::from(q) / 8.0)).collect();
        let mins: Vec<f64> = lo.iter().map(|&(p, q)| p.min(q)).collect();
        let choice = select_maximin_lcb(&band_from(&lo)).unwrap();
        prop_assert_eq!(choice.k, first_argmax(&mins) + 1);
        prop_assert_eq!(choice.objective_value, mins[choice.k - 1]);

        let c = f64::from(shift) / 4.0;
        let shifted: Vec<(f64, f64)> = lo.iter().map(|&(p, q)| (p + c, q + c)).collect();
        prop_assert_eq!(select_maximin_lcb(&band_from(&shifted)).unwrap().k, choice.k);
    }

    #[test]
    fn maximin_on_built_bands_matches_scan((scores, labels) in dataset(), delta in 0.01f64..0.9) {
        let curves = compute_curves(&ScoredDataset::from_scores_labels(&scores, &labels).unwrap());
        let band = build_band(&curves, &BandConfig::fixed(delta)).unwrap();
        let mins: Vec<f64> = band.rows.iter().map(|r| r.ppv_lo.min(r.npv_lo)).collect();
        prop_assert_eq!(select_maximin_lcb(&band).unwrap().k, first_argmax(&mins) + 1);
    }
}
