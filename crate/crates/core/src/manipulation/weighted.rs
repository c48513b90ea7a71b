//! Weighted coalitional manipulation: exhaustive search for few candidates,
//! and the decision procedure for Nanson with three candidates.

use rustc_hash::{FxHashMap, FxHashSet};

use super::oracle::all_orders;
use super::{evaluate, Budget, ManipulationInstance};
use crate::election::{LinearOrder, Weight};
use crate::error::{Error, Result};
use crate::rules::{Buffers, Rule};
use crate::tally::Tally;

fn coalition_weights(instance: &ManipulationInstance) -> Result<Vec<Weight>> {
    match &instance.budget {
        Budget::Weights(ws) => Ok(ws.clone()),
        Budget::Unweighted(Some(k)) => Ok(vec![Weight::from_integer(1); *k]),
        Budget::Unweighted(None) => Err(Error::InvalidInstance(
            "weighted search needs a fixed coalition".into(),
        )),
    }
}

/// Exact feasibility of weighted coalitional manipulation by search over
/// every assignment of linear orders to manipulators. Returns a witness (one
/// ballot per manipulator, in the instance's order) or `None`.
///
/// Manipulators with equal weight are interchangeable, and partial sums that
/// were already expanded at the same depth are skipped, so the search is over
/// distinct weighted pairwise sums rather than `(m!)^|M|` tuples.
pub fn brute_force_weighted(instance: &ManipulationInstance) -> Result<Option<Vec<LinearOrder>>> {
    let weights = coalition_weights(instance)?;
    let m = instance.m();
    if m > 5 {
        return Err(Error::Domain(format!(
            "weighted brute force is limited to 5 candidates, got {m}"
        )));
    }
    let base = instance.base_tally();
    let scaled: Vec<i64> = weights
        .iter()
        .map(|&w| base.scaled(w))
        .collect::<Result<_>>()?;
    // Heaviest first; equal weights adjacent.
    let mut slots: Vec<usize> = (0..weights.len()).collect();
    slots.sort_by(|&a, &b| scaled[b].cmp(&scaled[a]).then(a.cmp(&b)));

    let orders = all_orders(m);
    let mut search = Search {
        rule: instance.rule,
        preferred: instance.preferred,
        tie: instance.tie_break(),
        orders: &orders,
        weights: slots.iter().map(|&s| scaled[s]).collect(),
        seen: vec![FxHashSet::default(); slots.len() + 1],
        chosen: Vec::with_capacity(slots.len()),
        buf: Buffers::new(m),
    };
    let mut work = base;
    if !search.dfs(&mut work, 0, 0) {
        return Ok(None);
    }
    let mut ballots = vec![LinearOrder::identity(m); weights.len()];
    for (depth, &slot) in slots.iter().enumerate() {
        ballots[slot] = orders[search.chosen[depth]].clone();
    }
    debug_assert!(evaluate(instance, &ballots).unwrap_or(false));
    Ok(Some(ballots))
}

struct Search<'a> {
    rule: Rule,
    preferred: usize,
    tie: crate::rules::TieBreak,
    orders: &'a [LinearOrder],
    weights: Vec<i64>,
    seen: Vec<FxHashSet<Vec<i64>>>,
    chosen: Vec<usize>,
    buf: Buffers,
}

impl Search<'_> {
    fn dfs(&mut self, work: &mut Tally, depth: usize, min_order: usize) -> bool {
        if depth == self.weights.len() {
            return self.rule.winner_with(work, self.tie, &mut self.buf) == self.preferred;
        }
        // Same partial sum under the same ordering constraint: same subtree.
        let mut key = work.raw().to_vec();
        key.push(min_order as i64);
        if !self.seen[depth].insert(key) {
            return false;
        }
        let w = self.weights[depth];
        let same_as_next = self.weights.get(depth + 1) == Some(&w);
        for o in min_order..self.orders.len() {
            let ranking = self.orders[o].ranking();
            work.add_ranking(ranking, w);
            self.chosen.push(o);
            let next_min = if same_as_next { o } else { 0 };
            if self.dfs(work, depth + 1, next_min) {
                return true;
            }
            self.chosen.pop();
            work.add_ranking(ranking, -w);
        }
        false
    }
}

/// Weighted Nanson manipulation with at most three candidates.
///
/// First tries the coalition all voting `p > a > b`, then all voting
/// `p > b > a` (with two candidates, all voting `p` first). Those two votes
/// cover every way `p` can win except one: an exact three-way tie in the
/// first round, which ends the count with `p` winning on the tie-break and
/// may need some manipulators to rank `p` second. That case is decided by
/// [`three_way_tie`], a search over the score additions the coalition can
/// reach, pseudo-polynomial in the total manipulator weight.
///
/// Returns the successful coalition's ballots, or `None` if `p` cannot win.
pub fn nanson_weighted_3cand(instance: &ManipulationInstance) -> Result<Option<Vec<LinearOrder>>> {
    if instance.rule != Rule::Nanson {
        return Err(Error::InvalidInstance(format!(
            "the three-candidate procedure is for Nanson, not {}",
            instance.rule
        )));
    }
    let m = instance.m();
    if m > 3 {
        return Err(Error::Dimension {
            expected: 3,
            actual: m,
        });
    }
    let n = coalition_weights(instance)?.len();
    let p = instance.preferred;
    let rivals: Vec<usize> = (0..m).filter(|&i| i != p).collect();
    let mut candidates_votes = Vec::new();
    match rivals.as_slice() {
        [] => candidates_votes.push(vec![p]),
        [a] => candidates_votes.push(vec![p, *a]),
        [a, b] => {
            candidates_votes.push(vec![p, *a, *b]);
            candidates_votes.push(vec![p, *b, *a]);
        }
        _ => unreachable!("m <= 3"),
    }
    for ranking in candidates_votes {
        let ballots = vec![LinearOrder::new_unchecked(ranking); n];
        if evaluate(instance, &ballots)? {
            return Ok(Some(ballots));
        }
    }
    if m == 3 {
        if let Some(ballots) = three_way_tie(instance)? {
            debug_assert!(evaluate(instance, &ballots).unwrap_or(false));
            return Ok(Some(ballots));
        }
    }
    Ok(None)
}

/// Ballots giving all three candidates the same Borda score, if any exist.
///
/// Manipulator `i` of scaled weight `u` adds a permutation of `(2u, u, 0)`
/// to the scores, so the reachable additions after `i` manipulators are
/// pairs `(add_0, add_1)` with `add_2` fixed by the running total. Each layer
/// keeps one predecessor per pair for the witness.
pub fn three_way_tie(instance: &ManipulationInstance) -> Result<Option<Vec<LinearOrder>>> {
    let m = instance.m();
    if m != 3 {
        return Err(Error::Dimension {
            expected: 3,
            actual: m,
        });
    }
    let base = instance.base_tally();
    let scaled: Vec<i64> = coalition_weights(instance)?
        .iter()
        .map(|&w| base.scaled(w))
        .collect::<Result<_>>()?;
    let s = base.borda();
    let total: i64 = s.iter().sum::<i64>() + 3 * scaled.iter().sum::<i64>();
    if total % 3 != 0 {
        return Ok(None);
    }
    let need: Vec<i64> = s.iter().map(|&x| total / 3 - x).collect();
    if need.iter().any(|&x| x < 0) {
        return Ok(None);
    }
    let orders = all_orders(3);
    // layers[i] maps (add_0, add_1) after i manipulators to (previous pair, order).
    type Layer = FxHashMap<(i64, i64), ((i64, i64), usize)>;
    let mut layers: Vec<Layer> = Vec::new();
    let mut frontier: FxHashSet<(i64, i64)> = FxHashSet::default();
    frontier.insert((0, 0));
    let mut spent = 0;
    for &u in &scaled {
        spent += 3 * u;
        let mut next = FxHashMap::default();
        for &(a0, a1) in &frontier {
            for (o, order) in orders.iter().enumerate() {
                let mut add = [0i64; 3];
                for (pos, &x) in order.ranking().iter().enumerate() {
                    add[x] = (2 - pos as i64) * u;
                }
                let state = (a0 + add[0], a1 + add[1]);
                let third = spent - state.0 - state.1;
                if state.0 <= need[0] && state.1 <= need[1] && third <= need[2] {
                    next.entry(state).or_insert(((a0, a1), o));
                }
            }
        }
        frontier = next.keys().copied().collect();
        layers.push(next);
        if frontier.is_empty() {
            return Ok(None);
        }
    }
    let mut state = (need[0], need[1]);
    if !frontier.contains(&state) {
        return Ok(None);
    }
    let mut ballots = vec![LinearOrder::identity(3); scaled.len()];
    for (i, layer) in layers.iter().enumerate().rev() {
        let (prev, o) = layer[&state];
        ballots[i] = orders[o].clone();
        state = prev;
    }
    Ok(Some(ballots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{CandidateSet, Profile, WeightedBallot};

    fn weighted_profile(m: usize, ballots: &[(i64, &[usize])]) -> Profile {
        Profile::new(
            CandidateSet::numbered(m),
            ballots
                .iter()
                .map(|&(w, r)| WeightedBallot {
                    order: LinearOrder::new(r.to_vec()).unwrap(),
                    weight: Weight::from_integer(w),
                })
                .collect(),
        )
        .unwrap()
    }

    fn weights(ws: &[i64]) -> Budget {
        Budget::Weights(ws.iter().map(|&w| Weight::from_integer(w)).collect())
    }

    #[test]
    fn single_manipulator_already_winning() {
        let p = weighted_profile(3, &[(1, &[0, 1, 2])]);
        let inst = ManipulationInstance::new(Rule::Baldwin, p, 0, weights(&[1])).unwrap();
        let w = brute_force_weighted(&inst).unwrap().expect("feasible");
        assert_eq!(w.len(), 1);
        assert!(evaluate(&inst, &w).unwrap());
    }

    #[test]
    fn two_candidates_is_weighted_majority() {
        let p = weighted_profile(2, &[(5, &[0, 1])]);
        for (ws, ok) in [(&[2, 2][..], false), (&[3, 2][..], true), (&[4][..], false)] {
            let inst = ManipulationInstance::new(Rule::Nanson, p.clone(), 1, weights(ws)).unwrap();
            assert_eq!(
                nanson_weighted_3cand(&inst).unwrap().is_some(),
                ok,
                "{ws:?}"
            );
            assert_eq!(brute_force_weighted(&inst).unwrap().is_some(), ok, "{ws:?}");
        }
    }

    #[test]
    fn three_candidate_procedure_matches_search() {
        let p = weighted_profile(3, &[(3, &[0, 1, 2]), (2, &[1, 2, 0]), (1, &[2, 0, 1])]);
        for c in 0..3 {
            for ws in [&[1][..], &[2, 1], &[1, 1, 1], &[4, 2]] {
                let inst =
                    ManipulationInstance::new(Rule::Nanson, p.clone(), c, weights(ws)).unwrap();
                let fast = nanson_weighted_3cand(&inst).unwrap();
                let slow = brute_force_weighted(&inst).unwrap();
                assert_eq!(fast.is_some(), slow.is_some(), "c={c} ws={ws:?}");
                if let Some(b) = fast {
                    assert!(evaluate(&inst, &b).unwrap());
                }
            }
        }
    }

    #[test]
    fn three_way_tie_needs_p_second() {
        // Scores 14, 21, 10 with weights 1, 4, 1. Both uniform votes leave c2
        // facing c1 in round two and losing 9 to 12; the only win is a
        // three-way tie at 21, which needs one manipulator to rank c2 second.
        let p = weighted_profile(
            3,
            &[
                (4, &[1, 0, 2]),
                (4, &[0, 1, 2]),
                (4, &[1, 2, 0]),
                (1, &[2, 1, 0]),
                (2, &[2, 0, 1]),
            ],
        );
        let inst = ManipulationInstance::new(Rule::Nanson, p, 2, weights(&[1, 4, 1])).unwrap();
        for order in [[2, 0, 1], [2, 1, 0]] {
            let uniform = vec![LinearOrder::new(order.to_vec()).unwrap(); 3];
            assert!(!evaluate(&inst, &uniform).unwrap());
        }
        let tie = three_way_tie(&inst).unwrap().expect("tie reachable");
        assert!(tie.iter().any(|b| b.ranking()[0] != 2));
        let mut t = inst.base_tally();
        for (b, w) in tie.iter().zip([1, 4, 1]) {
            t.add(b, w);
        }
        assert_eq!(t.borda(), vec![21, 21, 21]);
        assert!(nanson_weighted_3cand(&inst).unwrap().is_some());
        assert!(brute_force_weighted(&inst).unwrap().is_some());
    }

    #[test]
    fn procedure_rejects_wrong_shape() {
        let p = weighted_profile(4, &[(1, &[0, 1, 2, 3])]);
        let inst = ManipulationInstance::new(Rule::Nanson, p.clone(), 0, weights(&[1])).unwrap();
        assert!(nanson_weighted_3cand(&inst).is_err());
        let p3 = weighted_profile(3, &[(1, &[0, 1, 2])]);
        let inst = ManipulationInstance::new(Rule::Baldwin, p3, 0, weights(&[1])).unwrap();
        assert!(nanson_weighted_3cand(&inst).is_err());
    }
}
