//! Threshold selection over the empirical curves.
//!
//! Both rules scan every `k = 1..n-1` and keep the first maximizer, so ties
//! resolve to the smallest `k`.

use serde::{Deserialize, Serialize};

use crate::bands::ConfidenceBand;
use crate::curves::EmpiricalCurves;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Maximize `alpha_k ppv_hat + (1 - alpha_k) npv_hat`.
    Accuracy,
    /// Maximize `min(ppv_lo, npv_lo)`.
    MaximinLcb,
}

impl SelectionRule {
    pub fn name(self) -> &'static str {
        match self {
            SelectionRule::Accuracy => "accuracy",
            SelectionRule::MaximinLcb => "maximin_lcb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub k: usize,
    pub alpha: f64,
    pub objective_value: f64,
    pub rule: SelectionRule,
}

/// Accuracy-maximizing threshold. The objective is compared as the integer
/// count `TP_k + TN_k`, so ties are exact.
pub fn select_accuracy(curves: &EmpiricalCurves) -> ThresholdChoice {
    let mut best = &curves.points()[0];
    for p in &curves.points()[1..] {
        if p.true_positives + p.true_negatives > best.true_positives + best.true_negatives {
            best = p;
        }
    }
    ThresholdChoice {
        k: best.k,
        alpha: best.alpha,
        objective_value: (best.true_positives + best.true_negatives) as f64 / curves.n() as f64,
        rule: SelectionRule::Accuracy,
    }
}

/// Threshold maximizing the smaller of the two lower confidence bounds.
pub fn select_maximin_lcb(band: &ConfidenceBand) -> Result<ThresholdChoice> {
    let first = band
        .rows
        .first()
        .ok_or_else(|| Error::InvalidInput("band has no rows".into()))?;
    let objective = |r: &crate::bands::BandRow| r.ppv_lo.min(r.npv_lo);
    let mut best = first;
    let mut best_value = objective(first);
    for r in &band.rows[1..] {
        let v = objective(r);
        if v > best_value {
            best = r;
            best_value = v;
        }
    }
    Ok(ThresholdChoice {
        k: best.k,
        alpha: best.alpha,
        objective_value: best_value,
        rule: SelectionRule::MaximinLcb,
    })
}
