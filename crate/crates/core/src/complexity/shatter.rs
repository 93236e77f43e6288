//! Shattering counts of tabulated classes.
//!
//! For a threshold vector `b`, function `f` produces the pattern
//! `(f(x_1) > b_1, ..., f(x_n) > b_n)`. The shattering count is the largest
//! number of distinct patterns over all `b`.
//!
//! Only the set `{f : f(x_i) > b_i}` matters in each column, and it changes
//! only when `b_i` crosses one of the column's distinct values. Taking `b_i`
//! equal to each distinct value (the split is the same as at the midpoint to
//! the next value up) plus one threshold at or above the maximum (no split)
//! therefore realizes every achievable pattern set. A threshold below the
//! minimum also gives no split, so one sentinel stands for both.
//!
//! The search is exact for every `n` up to the guard. It walks the columns,
//! tracking the partition of the functions into pattern prefixes:
//! - a split column refines the partition, so the no-split choice is dropped
//!   whenever the column has at least two distinct values;
//! - cuts that give an already-seen partition are skipped;
//! - a branch is cut off when `sum over parts of min(distinct remaining rows
//!   in the part, 2^(columns left))` cannot beat the best count so far;
//! - the search stops once the count reaches `min(distinct rows, 2^n)`.

use std::collections::{HashMap, HashSet};

use super::class::{FiniteFunctionClass, PoolClass, SearchBudget};
use super::order::for_each_subset;
use crate::error::{Error, Result};

pub const MAX_SHATTER_POINTS: usize = 16;
const MEMO_LIMIT: usize = 1 << 20;

/// Largest number of distinct threshold patterns the class realizes.
pub fn shattering_count(class: &FiniteFunctionClass) -> Result<usize> {
    let n = class.n();
    if n > MAX_SHATTER_POINTS {
        return Err(Error::Size {
            what: "point set",
            got: n,
            limit: MAX_SHATTER_POINTS,
        });
    }
    Ok(Search::new(class).run())
}

struct Search {
    n: usize,
    /// `columns[j][f]`, with -0.0 folded into 0.0.
    columns: Vec<Vec<f64>>,
    /// Thresholds to try per column, most balanced first.
    cuts: Vec<Vec<f64>>,
    /// `suffix[j][f]` identifies `f`'s values on columns `j..n`.
    suffix: Vec<Vec<u32>>,
    target: usize,
    best: usize,
    memo: HashSet<(usize, Vec<u32>)>,
}

impl Search {
    fn new(class: &FiniteFunctionClass) -> Self {
        let (m, n) = (class.m(), class.n());
        let columns: Vec<Vec<f64>> = (0..n)
            .map(|j| class.rows().iter().map(|row| row[j] + 0.0).collect())
            .collect();

        let cuts = columns
            .iter()
            .map(|col| {
                let mut distinct = col.clone();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                distinct.pop();
                let mid = distinct.len() / 2;
                let mut order: Vec<usize> = (0..distinct.len()).collect();
                order.sort_by_key(|&i| i.abs_diff(mid));
                order.into_iter().map(|i| distinct[i]).collect()
            })
            .collect();

        let mut suffix = vec![vec![0u32; m]; n + 1];
        for j in (0..n).rev() {
            let mut ids: HashMap<(u64, u32), u32> = HashMap::new();
            for f in 0..m {
                let key = (columns[j][f].to_bits(), suffix[j + 1][f]);
                let next = ids.len() as u32;
                suffix[j][f] = *ids.entry(key).or_insert(next);
            }
        }
        let distinct_rows = suffix[0].iter().collect::<HashSet<_>>().len();
        let target = if n >= usize::BITS as usize - 1 {
            distinct_rows
        } else {
            distinct_rows.min(1 << n)
        };

        Self {
            n,
            columns,
            cuts,
            suffix,
            target,
            best: 0,
            memo: HashSet::new(),
        }
    }

    fn run(mut self) -> usize {
        let all: Vec<u32> = (0..self.suffix[0].len() as u32).collect();
        self.dfs(0, vec![all]);
        self.best
    }

    fn bound(&self, j: usize, parts: &[Vec<u32>]) -> usize {
        let cap = 1usize << (self.n - j);
        parts
            .iter()
            .map(|part| {
                let distinct: HashSet<u32> = part.iter().map(|&f| self.suffix[j][f as usize]).collect();
                distinct.len().min(cap)
            })
            .sum()
    }

    fn labels(&self, parts: &[Vec<u32>]) -> Vec<u32> {
        // Parts are kept in order of their smallest member, so the part index
        // is a canonical label.
        let mut labels = vec![0u32; self.suffix[0].len()];
        for (i, part) in parts.iter().enumerate() {
            for &f in part {
                labels[f as usize] = i as u32;
            }
        }
        labels
    }

    fn split(&self, j: usize, parts: &[Vec<u32>], cut: f64) -> Vec<Vec<u32>> {
        let mut out = Vec::with_capacity(parts.len() * 2);
        for part in parts {
            let (above, below): (Vec<u32>, Vec<u32>) =
                part.iter().partition(|&&f| self.columns[j][f as usize] > cut);
            match (above.is_empty(), below.is_empty()) {
                (false, false) => {
                    out.push(above);
                    out.push(below);
                }
                (false, true) => out.push(above),
                _ => out.push(below),
            }
        }
        out.sort_unstable_by_key(|p| p[0]);
        out
    }

    fn dfs(&mut self, j: usize, parts: Vec<Vec<u32>>) {
        if self.best >= self.target {
            return;
        }
        if j == self.n {
            self.best = self.best.max(parts.len());
            return;
        }
        if self.memo.len() < MEMO_LIMIT && !self.memo.insert((j, self.labels(&parts))) {
            return;
        }
        if self.cuts[j].is_empty() {
            self.dfs(j + 1, parts);
            return;
        }

        let mut seen = HashSet::new();
        let mut children = Vec::new();
        for &cut in &self.cuts[j] {
            let child = self.split(j, &parts, cut);
            if seen.insert(self.labels(&child)) {
                children.push((self.bound(j + 1, &child), child));
            }
        }
        children.sort_by_key(|c| std::cmp::Reverse(c.0));
        for (bound, child) in children {
            if bound <= self.best || self.best >= self.target {
                break;
            }
            self.dfs(j + 1, child);
        }
    }
}

/// Bounds on the VC-subgraph dimension of a pooled class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcBounds {
    pub lower: usize,
    pub upper: usize,
    /// `false` when no dimension was declared and `upper` is only the
    /// `2 * pool size` sentinel.
    pub upper_certified: bool,
    /// Pool indices of a shattered set of size `lower`.
    pub witness: Vec<usize>,
    /// Whether every subset size tried was searched exhaustively.
    pub exhaustive: bool,
}

/// Lower bound from subset search; upper bound `dim + 1` from a declared
/// vector-space dimension.
///
/// Sizes are tried upward from 1. Subsets of a shattered set are shattered,
/// so the search stops at the first size with no shattered subset found.
pub fn vc_subgraph_dimension_bounds(pool: &PoolClass, budget: SearchBudget) -> Result<VcBounds> {
    let size = pool.pool_size();
    let mut bounds = VcBounds {
        lower: 0,
        upper: pool.vector_space_dim.map_or(2 * size, |d| d + 1),
        upper_certified: pool.vector_space_dim.is_some(),
        witness: Vec::new(),
        exhaustive: true,
    };
    for s in 1..=size.min(MAX_SHATTER_POINTS) {
        if (1usize << s) > pool.class.m() {
            break;
        }
        let mut found = None;
        let (exhaustive, _) = for_each_subset(size, s, budget, |subset| {
            if shattering_count(&pool.class.restrict(subset)?)? == 1 << s {
                found = Some(subset.to_vec());
                return Ok(true);
            }
            Ok(false)
        })?;
        bounds.exhaustive &= exhaustive;
        match found {
            Some(w) => {
                bounds.lower = s;
                bounds.witness = w;
            }
            None => break,
        }
    }
    Ok(bounds)
}
