use std::collections::BTreeSet;

use num_bigint::BigUint;

use super::class::{FiniteFunctionClass, PoolClass, SearchBudget};
use crate::curves::stable_top_k;
use crate::error::{check_index, Error, Result};
use crate::rng::SampleRng;

/// Distinct top-`k` index sets (0-based, sorted) realized by the rows.
pub fn order_behaviors(class: &FiniteFunctionClass, k: usize) -> Result<BTreeSet<Vec<usize>>> {
    check_index("k", k, 1, class.n())?;
    class.rows().iter().map(|row| stable_top_k(row, k)).collect()
}

/// Best subset found by a pool search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCoefficientSearch {
    /// Certified lower bound on the order coefficient.
    pub value: usize,
    /// Pool indices of a subset attaining `value`, in pool order.
    pub best_subset: Vec<usize>,
    pub exhaustive: bool,
    pub subsets_examined: u64,
    /// Seed of the random search; `None` when the search was exhaustive.
    pub seed: Option<u64>,
}

pub(crate) fn binomial_u64(n: usize, k: usize) -> Option<u64> {
    let c = num_integer::binomial(BigUint::from(n), BigUint::from(k));
    u64::try_from(c).ok()
}

/// Visits `n`-subsets of `0..pool`: all of them in lexicographic order when
/// there are at most `budget.max_subsets`, otherwise that many random ones.
/// Stops early when `visit` returns `true`. Returns `(exhaustive, examined)`.
pub(crate) fn for_each_subset(
    pool: usize,
    n: usize,
    budget: SearchBudget,
    mut visit: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<(bool, u64)> {
    let total = binomial_u64(pool, n);
    let mut examined = 0u64;
    if total.is_some_and(|t| t <= budget.max_subsets) {
        let mut subset: Vec<usize> = (0..n).collect();
        loop {
            examined += 1;
            if visit(&subset)? {
                break;
            }
            // Advance to the next combination.
            let Some(i) = (0..n).rev().find(|&i| subset[i] < pool - n + i) else {
                break;
            };
            subset[i] += 1;
            for j in i + 1..n {
                subset[j] = subset[j - 1] + 1;
            }
        }
        Ok((true, examined))
    } else {
        let mut rng = SampleRng::new(budget.seed);
        let mut perm: Vec<usize> = (0..pool).collect();
        while examined < budget.max_subsets {
            for i in 0..n {
                let j = i + rng.below((pool - i) as u64) as usize;
                perm.swap(i, j);
            }
            let mut subset = perm[..n].to_vec();
            subset.sort_unstable();
            examined += 1;
            if visit(&subset)? {
                break;
            }
        }
        Ok((false, examined))
    }
}

/// Lower bound on the order coefficient: the largest number of top-`k`
/// behaviors over `n`-point subsets of the pool.
pub fn order_coefficient_lower_bound(
    pool: &PoolClass,
    n: usize,
    k: usize,
    budget: SearchBudget,
) -> Result<OrderCoefficientSearch> {
    let size = pool.pool_size();
    if n == 0 || n > size {
        return Err(Error::range("n", n, format!("[1, {size}] (pool size)")));
    }
    check_index("k", k, 1, n)?;
    let ceiling = binomial_u64(n, k).map_or(pool.class.m(), |c| pool.class.m().min(c as usize));
    let mut best = (0usize, Vec::new());
    let (exhaustive, examined) = for_each_subset(size, n, budget, |subset| {
        let count = order_behaviors(&pool.class.restrict(subset)?, k)?.len();
        if count > best.0 {
            best = (count, subset.to_vec());
        }
        Ok(best.0 >= ceiling)
    })?;
    Ok(OrderCoefficientSearch {
        value: best.0,
        best_subset: best.1,
        exhaustive,
        subsets_examined: examined,
        seed: (!exhaustive).then_some(budget.seed),
    })
}
