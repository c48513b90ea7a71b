//! Exact minimum coalition size for unweighted manipulation.
//!
//! All three rules read a profile only through its pairwise counts, so `k`
//! manipulators matter only through the sum of their ballots' pairwise
//! indicator vectors. The set of such sums reachable with exactly `k` ballots
//! (a "level") depends on `m` alone; it is built once per `m` and shared. The
//! search then scans levels `lb, lb+1, ..., k_max` and stops at the first sum
//! that makes the preferred candidate win. This covers every multiset of `k`
//! linear orders, including ones that do not rank the preferred candidate
//! first.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use super::{manipulator_lower_bound, Budget, ManipulationInstance};
use crate::election::LinearOrder;
use crate::error::{Error, Result};
use crate::rules::{Buffers, Rule};
use crate::tally::Tally;

/// Per-level size cap for the reachable-sum tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_level_entries: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        // Level 6 for five candidates holds roughly 15 million sums.
        OracleLimits {
            max_level_entries: 40_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    /// The minimum coalition size and one witness coalition.
    Optimal { k: usize, ballots: Vec<LinearOrder> },
    /// No coalition of size `<= k_max` works.
    NotWithin { k_max: usize },
    /// The level for `k` could not be built within the limits; levels below
    /// `k` were all checked and failed.
    BudgetExceeded { k: usize },
}

impl OracleOutcome {
    pub fn optimal(&self) -> Option<usize> {
        match self {
            OracleOutcome::Optimal { k, .. } => Some(*k),
            _ => None,
        }
    }
}

/// Distinct manipulator pairwise sums reachable with `k` ballots over `m`
/// candidates, packed into `u64` keys with a fixed-width field per pair.
#[derive(Debug)]
pub struct ReachableSums {
    m: usize,
    pairs: Vec<(usize, usize)>,
    bits: u32,
    orders: Vec<LinearOrder>,
    keys: Vec<u64>,
    levels: Mutex<Vec<Arc<Vec<u64>>>>,
}

impl ReachableSums {
    /// Shared table for `m` candidates.
    pub fn for_candidates(m: usize) -> Result<Arc<ReachableSums>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ReachableSums>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("oracle cache poisoned");
        if let Some(s) = guard.get(&m) {
            return Ok(Arc::clone(s));
        }
        let s = Arc::new(ReachableSums::new(m)?);
        guard.insert(m, Arc::clone(&s));
        Ok(s)
    }

    fn new(m: usize) -> Result<Self> {
        if !(2..=8).contains(&m) {
            return Err(Error::Domain(format!(
                "brute-force oracle supports 2..=8 candidates, got {m}"
            )));
        }
        let pairs: Vec<(usize, usize)> = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .collect();
        let bits = (64 / pairs.len() as u32).min(16);
        let orders = all_orders(m);
        let keys = orders
            .iter()
            .map(|o| {
                let pos = o.positions();
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(i, j))| pos[i] < pos[j])
                    .fold(0u64, |acc, (p, _)| acc | 1u64 << (p as u32 * bits))
            })
            .collect();
        Ok(ReachableSums {
            m,
            pairs,
            bits,
            orders,
            keys,
            levels: Mutex::new(vec![Arc::new(vec![0])]),
        })
    }

    /// Largest coalition size the packing can represent.
    pub fn max_k(&self) -> usize {
        (1usize << self.bits) - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sorted distinct sums for exactly `k` ballots.
    pub fn level(&self, k: usize, limits: OracleLimits) -> Result<Arc<Vec<u64>>> {
        if k > self.max_k() {
            return Err(Error::Budget(format!(
                "{k} ballots overflow the packed sums for {} candidates",
                self.m
            )));
        }
        let mut levels = self.levels.lock().expect("oracle level table poisoned");
        while levels.len() <= k {
            let prev = levels.last().expect("level 0");
            let mut next = FxHashSet::default();
            next.reserve(prev.len().saturating_mul(8).min(limits.max_level_entries));
            for &s in prev.iter() {
                for &o in &self.keys {
                    next.insert(s + o);
                }
                if next.len() > limits.max_level_entries {
                    return Err(Error::Budget(format!(
                        "level {} exceeds {} sums",
                        levels.len(),
                        limits.max_level_entries
                    )));
                }
            }
            let mut sorted: Vec<u64> = next.into_iter().collect();
            sorted.sort_unstable();
            levels.push(Arc::new(sorted));
        }
        Ok(Arc::clone(&levels[k]))
    }

    #[inline]
    fn field(&self, key: u64, pair: usize) -> i64 {
        let mask = (1u64 << self.bits) - 1;
        ((key >> (pair as u32 * self.bits)) & mask) as i64
    }

    /// Writes `base + sum` into `work`, with each manipulator weighing `unit`.
    fn combine(&self, base: &[i64], key: u64, k: usize, unit: i64, work: &mut [i64]) {
        work.copy_from_slice(base);
        let m = self.m;
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let above = self.field(key, p);
            work[i * m + j] += above * unit;
            work[j * m + i] += (k as i64 - above) * unit;
        }
    }

    /// Splits a level-`k` sum back into `k` ballots.
    fn decompose(&self, key: u64, k: usize, limits: OracleLimits) -> Result<Vec<LinearOrder>> {
        let mut out = Vec::with_capacity(k);
        let mut key = key;
        for level in (0..k).rev() {
            let below = self.level(level, limits)?;
            let idx = (0..self.keys.len())
                .find(|&o| {
                    let ok = self
                        .pairs
                        .iter()
                        .enumerate()
                        .all(|(p, _)| self.field(key, p) >= self.field(self.keys[o], p));
                    ok && below.binary_search(&(key - self.keys[o])).is_ok()
                })
                .ok_or_else(|| Error::Construction("reachable sum does not decompose".into()))?;
            out.push(self.orders[idx].clone());
            key -= self.keys[idx];
        }
        Ok(out)
    }
}

/// All `m!` linear orders in lexicographic order.
pub(crate) fn all_orders(m: usize) -> Vec<LinearOrder> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        out.push(LinearOrder::new_unchecked(perm.clone()));
        // Next lexicographic permutation.
        let Some(i) = (1..m).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..m)
            .rev()
            .find(|&j| perm[j] > perm[i - 1])
            .expect("successor");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    out
}

pub fn brute_force_optimal_unweighted(
    instance: &ManipulationInstance,
    k_max: usize,
) -> Result<OracleOutcome> {
    brute_force_optimal_unweighted_with(instance, k_max, OracleLimits::default())
}

/// Minimum `k <= k_max` such that some `k` unit-weight ballots make the
/// preferred candidate win, with a witness.
pub fn brute_force_optimal_unweighted_with(
    instance: &ManipulationInstance,
    k_max: usize,
    limits: OracleLimits,
) -> Result<OracleOutcome> {
    if let Budget::Weights(_) = instance.budget {
        return Err(Error::InvalidInstance(
            "the unweighted oracle needs an unweighted coalition".into(),
        ));
    }
    let base = instance.base_tally();
    let m = base.m();
    let c = instance.preferred;
    let tie = instance.tie_break();
    let rule = instance.rule;
    if rule.winner(&base, tie) == c {
        return Ok(OracleOutcome::Optimal {
            k: 0,
            ballots: Vec::new(),
        });
    }
    if m < 2 {
        return Ok(OracleOutcome::NotWithin { k_max });
    }
    let sums = ReachableSums::for_candidates(m)?;
    let unit = base.scale();
    let start = manipulator_lower_bound(instance).max(1);
    for k in start..=k_max {
        if k > sums.max_k() {
            return Ok(OracleOutcome::BudgetExceeded { k });
        }
        let level = match sums.level(k, limits) {
            Ok(level) => level,
            Err(Error::Budget(_)) => return Ok(OracleOutcome::BudgetExceeded { k }),
            Err(e) => return Err(e),
        };
        let found = level.par_chunks(1 << 14).find_map_first(|chunk| {
            let mut work = base.clone();
            let mut buf = Buffers::new(m);
            chunk.iter().copied().find(|&key| {
                sums.combine(base.raw(), key, k, unit, work.prefer_mut());
                if rule != Rule::Borda && strict_condorcet_loser(&work, c) {
                    return false;
                }
                rule.winner_with(&work, tie, &mut buf) == c
            })
        });
        if let Some(key) = found {
            let ballots = sums.decompose(key, k, limits)?;
            return Ok(OracleOutcome::Optimal { k, ballots });
        }
    }
    Ok(OracleOutcome::NotWithin { k_max })
}

/// Exhaustive search over all `m!` ballots of a single unit-weight
/// manipulator. Returns the lexicographically first successful ballot.
///
/// Ballots are built top-down; placing `x` next adds one unit to `N(x, y)`
/// for every `y` not yet placed, so each leaf costs one rule evaluation and
/// no re-tally.
pub fn brute_force_single_ballot(instance: &ManipulationInstance) -> Result<Option<LinearOrder>> {
    if let Budget::Weights(_) = instance.budget {
        return Err(Error::InvalidInstance(
            "single-ballot search needs an unweighted coalition".into(),
        ));
    }
    let base = instance.base_tally();
    let m = base.m();
    if m > 12 {
        return Err(Error::Domain(format!(
            "single-ballot search is limited to 12 candidates, got {m}"
        )));
    }
    let found = (0..m).into_par_iter().find_map_first(|top| {
        let mut dfs = SingleDfs {
            rule: instance.rule,
            preferred: instance.preferred,
            tie: instance.tie_break(),
            unit: base.scale(),
            work: base.clone(),
            placed: vec![false; m],
            ranking: Vec::with_capacity(m),
            buf: Buffers::new(m),
        };
        dfs.place(top);
        dfs.search()
            .then(|| LinearOrder::new_unchecked(dfs.ranking))
    });
    Ok(found)
}

struct SingleDfs {
    rule: Rule,
    preferred: usize,
    tie: crate::rules::TieBreak,
    unit: i64,
    work: Tally,
    placed: Vec<bool>,
    ranking: Vec<usize>,
    buf: Buffers,
}

impl SingleDfs {
    fn shift(&mut self, x: usize, delta: i64) {
        let m = self.placed.len();
        let prefer = self.work.prefer_mut();
        for y in 0..m {
            if !self.placed[y] {
                prefer[x * m + y] += delta;
            }
        }
    }

    fn place(&mut self, x: usize) {
        self.placed[x] = true;
        self.shift(x, self.unit);
        self.ranking.push(x);
    }

    fn unplace(&mut self, x: usize) {
        self.ranking.pop();
        self.shift(x, -self.unit);
        self.placed[x] = false;
    }

    fn search(&mut self) -> bool {
        let m = self.placed.len();
        if self.ranking.len() == m {
            return self.rule.winner_with(&self.work, self.tie, &mut self.buf) == self.preferred;
        }
        for x in 0..m {
            if self.placed[x] {
                continue;
            }
            self.place(x);
            if self.search() {
                return true;
            }
            self.unplace(x);
        }
        false
    }
}

/// Neither elimination rule can elect a strict Condorcet loser.
#[inline]
fn strict_condorcet_loser(t: &Tally, c: usize) -> bool {
    (0..t.m()).all(|y| y == c || t.prefer(c, y) < t.prefer(y, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{CandidateSet, Profile};
    use crate::manipulation::{evaluate, minimize_manipulators, Heuristic};

    #[test]
    fn enumerates_all_orders() {
        let orders = all_orders(4);
        assert_eq!(orders.len(), 24);
        assert_eq!(orders[0].ranking(), &[0, 1, 2, 3]);
        assert_eq!(orders[23].ranking(), &[3, 2, 1, 0]);
        let distinct: std::collections::HashSet<_> = orders.iter().collect();
        assert_eq!(distinct.len(), 24);
    }

    #[test]
    fn level_sizes_for_three_candidates() {
        // k ballots over 3 candidates: every sum of k of the six transitive
        // indicator vectors. Enumerated independently below.
        let sums = ReachableSums::for_candidates(3).unwrap();
        for k in 0..5 {
            let got = sums.level(k, OracleLimits::default()).unwrap().len();
            let mut expected = std::collections::HashSet::new();
            let mut stack = vec![(0usize, [0i64; 3])];
            while let Some((n, v)) = stack.pop() {
                if n == k {
                    expected.insert(v);
                    continue;
                }
                for o in all_orders(3) {
                    let pos = o.positions();
                    let mut w = v;
                    w[0] += i64::from(pos[0] < pos[1]);
                    w[1] += i64::from(pos[0] < pos[2]);
                    w[2] += i64::from(pos[1] < pos[2]);
                    stack.push((n + 1, w));
                }
            }
            assert_eq!(got, expected.len(), "k = {k}");
        }
    }

    #[test]
    fn already_winning_is_zero() {
        let p =
            Profile::unweighted(CandidateSet::numbered(3), vec![LinearOrder::identity(3)]).unwrap();
        let inst = ManipulationInstance::unweighted(Rule::Baldwin, p, 0).unwrap();
        assert_eq!(
            brute_force_optimal_unweighted(&inst, 3).unwrap().optimal(),
            Some(0)
        );
    }

    #[test]
    fn hopeless_within_small_cap() {
        let p = Profile::unweighted(CandidateSet::numbered(3), vec![LinearOrder::identity(3); 9])
            .unwrap();
        let inst = ManipulationInstance::unweighted(Rule::Nanson, p, 2).unwrap();
        assert_eq!(
            brute_force_optimal_unweighted(&inst, 2).unwrap(),
            OracleOutcome::NotWithin { k_max: 2 }
        );
    }

    #[test]
    fn witness_is_sound_and_beats_heuristics() {
        let orders = [
            vec![0, 1, 2, 3],
            vec![1, 2, 3, 0],
            vec![2, 0, 1, 3],
            vec![1, 0, 2, 3],
        ];
        let p = Profile::unweighted(
            CandidateSet::numbered(4),
            orders
                .iter()
                .map(|r| LinearOrder::new(r.clone()).unwrap())
                .collect(),
        )
        .unwrap();
        for rule in Rule::ALL {
            let inst = ManipulationInstance::unweighted(rule, p.clone(), 3).unwrap();
            let best = Heuristic::ALL
                .iter()
                .map(|&h| minimize_manipulators(&inst, h).unwrap().manipulators_used)
                .min()
                .unwrap();
            match brute_force_optimal_unweighted(&inst, best).unwrap() {
                OracleOutcome::Optimal { k, ballots } => {
                    assert!(k <= best);
                    assert_eq!(ballots.len(), k);
                    assert!(evaluate(&inst, &ballots).unwrap(), "{rule}");
                    if k > 0 {
                        let fewer = brute_force_optimal_unweighted(&inst, k - 1).unwrap();
                        assert_eq!(fewer, OracleOutcome::NotWithin { k_max: k - 1 });
                    }
                }
                other => panic!("{rule}: {other:?}"),
            }
        }
    }
}
