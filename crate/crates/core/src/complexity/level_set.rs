//! Exhaustive check that level sets of the regression function are not
//! strictly dominated in (ppv, npv) by any other subset.
//!
//! Arithmetic is exact: masses are scaled to integers over a common
//! denominator and fractions are compared by cross-multiplication.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MAX_INSTANCE_POINTS: usize = 20;

/// Finite instance space with point masses `mu` and regression values `eta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteInstance {
    mu: Vec<BigRational>,
    eta: Vec<BigRational>,
}

impl FiniteInstance {
    pub fn new(mu: Vec<BigRational>, eta: Vec<BigRational>) -> Result<Self> {
        if mu.is_empty() || mu.len() != eta.len() {
            return Err(Error::InvalidInput(format!(
                "need equally many masses and regression values, got {} and {}",
                mu.len(),
                eta.len()
            )));
        }
        if let Some(w) = mu.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidInput(format!("negative mass {w}")));
        }
        let total: BigRational = mu.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!("masses sum to {total}, not 1")));
        }
        if let Some(e) = eta.iter().find(|e| e.is_negative() || **e > BigRational::one()) {
            return Err(Error::InvalidInput(format!("regression value {e} outside [0, 1]")));
        }
        Ok(Self { mu, eta })
    }

    /// Parses rationals such as `"1/2"` or `"1"`.
    pub fn parse<S: AsRef<str>>(mu: &[S], eta: &[S]) -> Result<Self> {
        let parse = |s: &S| {
            s.as_ref()
                .trim()
                .parse::<BigRational>()
                .map_err(|_| Error::InvalidInput(format!("not a rational: {:?}", s.as_ref())))
        };
        Self::new(
            mu.iter().map(parse).collect::<Result<_>>()?,
            eta.iter().map(parse).collect::<Result<_>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self) -> &[BigRational] {
        &self.mu
    }

    pub fn eta(&self) -> &[BigRational] {
        &self.eta
    }

    /// Points reordered so that new point `i` is old point `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..self.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("not a permutation of the points".into()));
        }
        Ok(Self {
            mu: order.iter().map(|&i| self.mu[i].clone()).collect(),
            eta: order.iter().map(|&i| self.eta[i].clone()).collect(),
        })
    }

    fn mass(&self, set: &[usize]) -> BigRational {
        set.iter().map(|&i| &self.mu[i]).sum()
    }

    /// Exact `P(y = 1 | x in set)`, or 0 when the set has no mass.
    pub fn ppv(&self, set: &[usize]) -> BigRational {
        let mass = self.mass(set);
        if mass.is_zero() {
            return BigRational::zero();
        }
        let pos: BigRational = set.iter().map(|&i| &self.eta[i] * &self.mu[i]).sum();
        pos / mass
    }

    /// Exact `P(y = 0 | x not in set)`, or 0 when the complement has no mass.
    pub fn npv(&self, set: &[usize]) -> BigRational {
        let complement: Vec<usize> = (0..self.len()).filter(|i| !set.contains(i)).collect();
        let mass = self.mass(&complement);
        if mass.is_zero() {
            return BigRational::zero();
        }
        let neg: BigRational = complement
            .iter()
            .map(|&i| (BigRational::one() - &self.eta[i]) * &self.mu[i])
            .sum();
        neg / mass
    }
}

/// A level set together with a subset that strictly dominates it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub level_set: Vec<usize>,
    pub dominating: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSetReport {
    pub holds: bool,
    pub level_sets_checked: usize,
    /// Level sets of mass 0 or 1, not checked unless requested.
    pub degenerate_skipped: usize,
    pub counterexample: Option<Counterexample>,
}

/// Checks every level set of mass strictly between 0 and 1.
///
/// With ppv and npv set to 0 on massless conditioning sets, the empty set and
/// the full space can be dominated (for `mu = (1/2, 1/2)`,
/// `eta = (4/5, 1/5)`, the set `{x_1}` beats the empty set), so they are
/// counted in `degenerate_skipped` instead.
pub fn verify_level_set_optimality(instance: &FiniteInstance) -> Result<LevelSetReport> {
    verify_level_set_optimality_with(instance, false)
}

/// As [`verify_level_set_optimality`], optionally checking the level sets of
/// mass 0 and 1 too.
pub fn verify_level_set_optimality_with(
    instance: &FiniteInstance,
    include_degenerate: bool,
) -> Result<LevelSetReport> {
    let m = instance.len();
    if m > MAX_INSTANCE_POINTS {
        return Err(Error::Size {
            what: "instance",
            got: m,
            limit: MAX_INSTANCE_POINTS,
        });
    }

    // Integer masses over a common denominator.
    let weights: Vec<BigRational> = instance.mu.clone();
    let positive: Vec<BigRational> = instance.mu.iter().zip(&instance.eta).map(|(w, e)| w * e).collect();
    let denom = weights
        .iter()
        .chain(&positive)
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &BigRational| (r * &denom).to_integer();
    let w: Vec<BigInt> = weights.iter().map(scale).collect();
    let p: Vec<BigInt> = positive.iter().map(scale).collect();

    let level_sets = level_set_masks(instance);
    let small = denom.bits() <= 60;
    if small {
        let to_i = |v: &[BigInt]| v.iter().map(|x| x.to_i128().unwrap()).collect::<Vec<_>>();
        check(&to_i(&w), &to_i(&p), denom.to_i128().unwrap(), &level_sets, include_degenerate)
    } else {
        check(&w, &p, denom, &level_sets, include_degenerate)
    }
}

/// Distinct masks `{i : eta_i > t}` for `t` below the minimum, at each
/// distinct value, and above the maximum; ordered from largest set down.
fn level_set_masks(instance: &FiniteInstance) -> Vec<u32> {
    let mut values = instance.eta.clone();
    values.sort();
    values.dedup();
    let below = &values[0] - BigRational::one();
    let mut masks: Vec<u32> = Vec::new();
    for t in std::iter::once(&below).chain(&values) {
        let mask = instance
            .eta
            .iter()
            .enumerate()
            .filter(|(_, e)| *e > t)
            .fold(0u32, |acc, (i, _)| acc | (1 << i));
        if !masks.contains(&mask) {
            masks.push(mask);
        }
    }
    masks
}

trait Exact: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {}
impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T>> Exact for T {}

/// Fraction `num / den` with `den > 0`.
#[derive(Clone)]
struct Frac<T> {
    num: T,
    den: T,
}

impl<T: Exact> Frac<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num.clone() * other.den.clone()).cmp(&(other.num.clone() * self.den.clone()))
    }
}

fn check<T: Exact>(
    w: &[T],
    p: &[T],
    total: T,
    level_sets: &[u32],
    include_degenerate: bool,
) -> Result<LevelSetReport> {
    let m = w.len();
    let size = 1usize << m;
    let mut mass = vec![T::zero(); size];
    let mut pos = vec![T::zero(); size];
    for mask in 1..size {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        mass[mask] = mass[rest].clone() + w[i].clone();
        pos[mask] = pos[rest].clone() + p[i].clone();
    }
    let all_pos = pos[size - 1].clone();

    // Zero fractions use the total mass as denominator.
    let values = |mask: usize| -> (Frac<T>, Frac<T>) {
        let inside = mass[mask].clone();
        let outside = total.clone() - inside.clone();
        let ppv = if inside.is_zero() {
            Frac { num: T::zero(), den: total.clone() }
        } else {
            Frac { num: pos[mask].clone(), den: inside }
        };
        let npv = if outside.is_zero() {
            Frac { num: T::zero(), den: total.clone() }
        } else {
            let neg = outside.clone() - (all_pos.clone() - pos[mask].clone());
            Frac { num: neg, den: outside }
        };
        (ppv, npv)
    };
    let table: Vec<(Frac<T>, Frac<T>)> = (0..size).map(values).collect();

    let mut report = LevelSetReport {
        holds: true,
        level_sets_checked: 0,
        degenerate_skipped: 0,
        counterexample: None,
    };
    let members = |mask: usize| (0..m).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
    for &a in level_sets {
        let a = a as usize;
        let degenerate = mass[a].is_zero() || mass[a] == total;
        if degenerate && !include_degenerate {
            report.degenerate_skipped += 1;
            continue;
        }
        report.level_sets_checked += 1;
        if report.counterexample.is_some() {
            continue;
        }
        let (ppv_a, npv_a) = &table[a];
        let dominating = table.iter().position(|(ppv_b, npv_b)| {
            let dp = ppv_b.cmp(ppv_a);
            let dn = npv_b.cmp(npv_a);
            dp.is_ge() && dn.is_ge() && (dp.is_gt() || dn.is_gt())
        });
        if let Some(b) = dominating {
            report.holds = false;
            report.counterexample = Some(Counterexample {
                level_set: members(a),
                dominating: members(b),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SampleRng;

    fn inst(mu: &[&str], eta: &[&str]) -> FiniteInstance {
        FiniteInstance::parse(mu, eta).unwrap()
    }

    fn random_instance(rng: &mut SampleRng, m: usize) -> FiniteInstance {
        let raw: Vec<u64> = (0..m).map(|_| rng.below(6)).collect();
        let raw = if raw.iter().all(|&r| r == 0) { vec![1; m] } else { raw };
        let total: u64 = raw.iter().sum();
        let mu: Vec<String> = raw.iter().map(|r| format!("{r}/{total}")).collect();
        let eta: Vec<String> = (0..m)
            .map(|_| {
                let den = 1 + rng.below(9);
                format!("{}/{den}", rng.below(den + 1))
            })
            .collect();
        FiniteInstance::parse(&mu, &eta).unwrap()
    }

    #[test]
    fn two_point_instance() {
        let i = inst(&["1/2", "1/2"], &["4/5", "1/5"]);
        let r = verify_level_set_optimality(&i).unwrap();
        assert!(r.holds);
        assert_eq!((r.level_sets_checked, r.degenerate_skipped), (1, 2));

        let strict = verify_level_set_optimality_with(&i, true).unwrap();
        assert!(!strict.holds);
        let c = strict.counterexample.unwrap();
        assert!(c.level_set.is_empty() || c.level_set.len() == 2);
        let (a, b) = (&c.level_set, &c.dominating);
        assert!(i.ppv(b) >= i.ppv(a) && i.npv(b) >= i.npv(a));
        assert!(i.ppv(b) > i.ppv(a) || i.npv(b) > i.npv(a));
    }

    #[test]
    fn constant_regression() {
        let i = inst(&["1/4", "1/4", "1/2"], &["1/3", "1/3", "1/3"]);
        let r = verify_level_set_optimality(&i).unwrap();
        assert!(r.holds);
        // The only level sets are the full space and the empty set.
        assert_eq!((r.level_sets_checked, r.degenerate_skipped), (0, 2));
        let third: BigRational = "1/3".parse().unwrap();
        assert_eq!(i.ppv(&[0, 2]), third);
        assert_eq!(i.npv(&[0, 2]), BigRational::one() - &third);
    }

    #[test]
    fn validation() {
        assert!(FiniteInstance::parse(&["1/2", "1/3"], &["0", "1"]).is_err());
        assert!(FiniteInstance::parse(&["1/2", "1/2"], &["0", "3/2"]).is_err());
        assert!(FiniteInstance::parse(&["3/2", "-1/2"], &["0", "1"]).is_err());
        assert!(FiniteInstance::parse(&["1"], &["0", "1"]).is_err());
        assert!(FiniteInstance::parse(&["one"], &["0"]).is_err());
        let big: Vec<String> = (0..21).map(|_| "1/21".to_string()).collect();
        let eta = vec!["0".to_string(); 21];
        let i = FiniteInstance::parse(&big, &eta).unwrap();
        assert!(matches!(verify_level_set_optimality(&i), Err(Error::Size { .. })));
    }

    #[test]
    fn random_instances_hold_and_ignore_point_order() {
        let mut rng = SampleRng::new(17);
        for _ in 0..150 {
            let m = 1 + rng.below(8) as usize;
            let i = random_instance(&mut rng, m);
            let r = verify_level_set_optimality(&i).unwrap();
            assert!(r.holds, "{i:?}: {r:?}");
            let order: Vec<usize> = (0..m).rev().collect();
            assert_eq!(verify_level_set_optimality(&i.permuted(&order).unwrap()).unwrap(), r);
        }
    }

    /// Reference check straight from the rational definitions.
    fn direct(i: &FiniteInstance) -> bool {
        let m = i.len();
        let sets: Vec<Vec<usize>> = (0..1u32 << m)
            .map(|mask| (0..m).filter(|b| mask >> b & 1 == 1).collect())
            .collect();
        level_set_masks(i).into_iter().all(|a| {
            let a: Vec<usize> = (0..m).filter(|b| a >> b & 1 == 1).collect();
            let mass: BigRational = a.iter().map(|&x| &i.mu()[x]).sum();
            if mass.is_zero() || mass.is_one() {
                return true;
            }
            let (pa, na) = (i.ppv(&a), i.npv(&a));
            !sets.iter().any(|b| {
                let (pb, nb) = (i.ppv(b), i.npv(b));
                pb >= pa && nb >= na && (pb > pa || nb > na)
            })
        })
    }

    #[test]
    fn agrees_with_direct_rationals() {
        let mut rng = SampleRng::new(23);
        for _ in 0..40 {
            let m = 1 + rng.below(5) as usize;
            let i = random_instance(&mut rng, m);
            assert_eq!(verify_level_set_optimality(&i).unwrap().holds, direct(&i));
        }
    }

    #[test]
    fn large_denominators_use_big_integers() {
        let p = "1/1000000007";
        let q = "1/998244353";
        let mu = [p.to_string(), q.to_string(), {
            let a: BigRational = p.parse().unwrap();
            let b: BigRational = q.parse().unwrap();
            (BigRational::one() - a - b).to_string()
        }];
        let i = FiniteInstance::parse(&mu, &["9/10".into(), "1/2".into(), "1/7".into()]).unwrap();
        assert!(verify_level_set_optimality(&i).unwrap().holds);
    }
}
