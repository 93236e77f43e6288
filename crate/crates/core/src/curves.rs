//! Labeled score samples and the empirical predictive value curves.
//!
//! A sample of `n` scored examples is thresholded at every positive rate
//! `alpha_k = k / n` for `k = 1..n-1`. The `k` examples with the largest scores
//! are classified positive; ties are broken by original position (earlier
//! examples win), so exactly `k` examples are counted at every `k` even when
//! scores repeat. On tie-free data this is the same split as comparing each
//! score against the empirical quantile.
//!
//! Counts are kept as integers; the `f64` ratios are derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};

/// A single `(score, label)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub score: f64,
    pub positive: bool,
}

impl LabeledSample {
    /// Builds a sample from a `{0, 1}` label.
    pub fn new(score: f64, label: u8) -> Result<Self> {
        if !score.is_finite() {
            return Err(Error::InvalidInput(format!("score {score} is not finite")));
        }
        let positive = match label {
            0 => false,
            1 => true,
            other => return Err(Error::InvalidInput(format!("label {other} is not 0 or 1"))),
        };
        Ok(Self { score, positive })
    }

    pub fn label(&self) -> u8 {
        u8::from(self.positive)
    }
}

/// Indices of `scores` ordered by decreasing score, ties in original order.
///
/// Scores are compared with `f64::total_cmp`, so two scores tie only when
/// their bit patterns are equal (`-0.0` ranks below `0.0`).
pub fn descending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // `sort_by` is stable: equal scores keep their input order.
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// The stable top-k map: indices (0-based, ascending) of the `k` largest
/// scores, with ties resolved in favour of earlier positions.
pub fn stable_top_k(scores: &[f64], k: usize) -> Result<Vec<usize>> {
    check_index("k", k, 1, scores.len())?;
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidInput(format!("score {bad} is not finite")));
    }
    let mut top = descending_order(scores);
    top.truncate(k);
    top.sort_unstable();
    Ok(top)
}

/// `n >= 2` scored samples in their original order, plus the stable
/// descending sort permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDataset {
    samples: Vec<LabeledSample>,
    order: Vec<usize>,
    positives: usize,
}

impl ScoredDataset {
    pub fn new(samples: Vec<LabeledSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                got: samples.len(),
            });
        }
        if let Some(bad) = samples.iter().find(|s| !s.score.is_finite()) {
            return Err(Error::InvalidInput(format!("score {} is not finite", bad.score)));
        }
        let scores: Vec<f64> = samples.iter().map(|s| s.score).collect();
        let order = descending_order(&scores);
        let positives = samples.iter().filter(|s| s.positive).count();
        Ok(Self {
            samples,
            order,
            positives,
        })
    }

    /// Builds a dataset from parallel score and `{0, 1}` label slices.
    pub fn from_scores_labels(scores: &[f64], labels: &[u8]) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} scores but {} labels",
                scores.len(),
                labels.len()
            )));
        }
        let samples = scores
            .iter()
            .zip(labels)
            .map(|(&s, &y)| LabeledSample::new(s, y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; a dataset holds at least two samples.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn scores(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.score).collect()
    }

    /// Total number of positive labels.
    pub fn positives(&self) -> usize {
        self.positives
    }

    /// Stable descending sort permutation of the scores.
    pub fn descending_order(&self) -> &[usize] {
        &self.order
    }

    /// Score at descending rank `r` (0-based): rank 0 is `f_(n)`.
    fn ranked_score(&self, r: usize) -> f64 {
        self.samples[self.order[r]].score
    }

    fn check_k(&self, k: usize) -> Result<()> {
        check_index("k", k, 1, self.len() - 1)
    }

    /// Positive labels among the stable top-k samples.
    pub fn true_positives(&self, k: usize) -> Result<usize> {
        self.check_k(k)?;
        Ok(self.order[..k]
            .iter()
            .filter(|&&i| self.samples[i].positive)
            .count())
    }

    /// Negative labels among the `n - k` samples outside the stable top-k.
    pub fn true_negatives(&self, k: usize) -> Result<usize> {
        self.check_k(k)?;
        Ok(self.order[k..]
            .iter()
            .filter(|&&i| !self.samples[i].positive)
            .count())
    }
}

/// Midpoint of the `(n-k)`-th and `(n-k+1)`-th order statistics.
pub fn empirical_quantile(dataset: &ScoredDataset, k: usize) -> Result<f64> {
    dataset.check_k(k)?;
    Ok(midpoint(dataset.ranked_score(k - 1), dataset.ranked_score(k)))
}

fn midpoint(a: f64, b: f64) -> f64 {
    // Halving first keeps the sum finite for scores near f64::MAX.
    0.5 * a + 0.5 * b
}

/// Fraction of positive labels among the stable top-k samples.
pub fn empirical_ppv(dataset: &ScoredDataset, k: usize) -> Result<f64> {
    Ok(dataset.true_positives(k)? as f64 / k as f64)
}

/// Fraction of negative labels among the remaining `n - k` samples.
pub fn empirical_npv(dataset: &ScoredDataset, k: usize) -> Result<f64> {
    let rest = dataset.len() - k;
    Ok(dataset.true_negatives(k)? as f64 / rest as f64)
}

/// One threshold index of the empirical curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub alpha: f64,
    pub q_hat: f64,
    pub true_positives: usize,
    pub true_negatives: usize,
    pub ppv_hat: f64,
    pub npv_hat: f64,
}

/// Empirical ppv/npv curves and quantiles at `k = 1..n-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCurves {
    n: usize,
    positives: usize,
    points: Vec<CurvePoint>,
}

impl EmpiricalCurves {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    /// Points ordered by `k`; `points()[k - 1]` is threshold index `k`.
    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn point(&self, k: usize) -> Result<&CurvePoint> {
        check_index("k", k, 1, self.n - 1)?;
        Ok(&self.points[k - 1])
    }

    /// Number of correctly classified samples at threshold index `k`.
    pub fn correct(&self, k: usize) -> Result<usize> {
        let p = self.point(k)?;
        Ok(p.true_positives + p.true_negatives)
    }

    /// `alpha_k * ppv_hat + (1 - alpha_k) * npv_hat`, i.e. `(TP + TN) / n`.
    pub fn accuracy(&self, k: usize) -> Result<f64> {
        Ok(self.correct(k)? as f64 / self.n as f64)
    }
}

/// Evaluates the empirical curves at every `k = 1..n-1` in one pass.
pub fn compute_curves(dataset: &ScoredDataset) -> EmpiricalCurves {
    let n = dataset.len();
    let positives = dataset.positives();
    let mut points = Vec::with_capacity(n - 1);
    let mut true_positives = 0usize;
    for k in 1..n {
        if dataset.samples[dataset.order[k - 1]].positive {
            true_positives += 1;
        }
        // Negatives outside the top-k = (n - k) minus the positives left there.
        let true_negatives = (n - k) - (positives - true_positives);
        points.push(CurvePoint {
            k,
            alpha: k as f64 / n as f64,
            q_hat: midpoint(dataset.ranked_score(k - 1), dataset.ranked_score(k)),
            true_positives,
            true_negatives,
            ppv_hat: true_positives as f64 / k as f64,
            npv_hat: true_negatives as f64 / (n - k) as f64,
        });
    }
    EmpiricalCurves {
        n,
        positives,
        points,
    }
}
