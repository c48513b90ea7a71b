//! Reverse, LargestFit, AverageFit, Eliminate and RevEliminate.
//!
//! Every heuristic puts the preferred candidate first on each manipulator
//! ballot. Reverse and the two elimination methods build ballots one at a
//! time until the preferred candidate wins; the fit methods fill a coalition
//! of fixed size `k` and are minimized by scanning `k` upward.

use std::cmp::{Ordering, Reverse};

use super::matching::scores_to_ballots;
use super::{manipulator_lower_bound, Heuristic, ManipulationInstance, ManipulationResult};
use crate::election::LinearOrder;
use crate::error::Result;
use crate::rules::{Buffers, EliminationTrace, Rule, TieBreak};
use crate::tally::Tally;

/// Candidates other than `c` in increasing order of current Borda score, so
/// the weakest rival gets second place. Equal scores put the candidate
/// favoured by the tie-break later.
pub fn heuristic_reverse(instance: &ManipulationInstance) -> ManipulationResult {
    let c = instance.preferred;
    let tie = instance.tie_break();
    construct(instance, |tally| {
        let scores = tally.borda();
        let mut others: Vec<usize> = (0..tally.m()).filter(|&i| i != c).collect();
        others.sort_by_key(|&i| (scores[i], Reverse(tie.rank(i))));
        prepend(c, others)
    })
}

/// `c` first, then the other candidates in elimination order: the first
/// eliminated goes second and the current winner goes last. Candidates
/// leaving in the same Nanson round are ordered by their score in that
/// round, lowest first. Borda counts as a single round, so on Borda this is
/// Reverse.
pub fn heuristic_eliminate(instance: &ManipulationInstance) -> ManipulationResult {
    let c = instance.preferred;
    let tie = instance.tie_break();
    let rule = instance.rule;
    construct(instance, |tally| {
        let trace = rule.run(tally, tie);
        let mut ranking = vec![c];
        for mut block in elimination_blocks(&trace) {
            block.sort_by(|a, b| strength(a, b, tie));
            ranking.extend(block.into_iter().map(|(x, _)| x).filter(|&x| x != c));
        }
        ranking
    })
}

/// `c` first, then the other candidates in reverse elimination order: the
/// first eliminated goes last. Candidates leaving in the same Nanson round
/// are ordered by the inverse of their score in that round.
pub fn heuristic_rev_eliminate(instance: &ManipulationInstance) -> ManipulationResult {
    let c = instance.preferred;
    let tie = instance.tie_break();
    let rule = instance.rule;
    construct(instance, |tally| {
        let trace = rule.run(tally, tie);
        let mut ranking = vec![c];
        for mut block in elimination_blocks(&trace).into_iter().rev() {
            block.sort_by(|a, b| strength(b, a, tie));
            ranking.extend(block.into_iter().map(|(x, _)| x).filter(|&x| x != c));
        }
        ranking
    })
}

/// Weaker first: lower score, or on equal score the candidate the tie-break
/// disfavours.
fn strength(a: &(usize, i64), b: &(usize, i64), tie: TieBreak) -> Ordering {
    a.1.cmp(&b.1)
        .then_with(|| tie.rank(b.0).cmp(&tie.rank(a.0)))
}

/// Groups of candidates leaving together, with their score in that round,
/// earliest group first. The last group holds the candidates never
/// eliminated. Borda is a single round in which every candidate is ranked.
fn elimination_blocks(trace: &EliminationTrace) -> Vec<Vec<(usize, i64)>> {
    let with_scores = |round: &crate::rules::Round, members: &[usize]| -> Vec<(usize, i64)> {
        members
            .iter()
            .map(|&x| (x, round.score_of(x).unwrap_or(0)))
            .collect()
    };
    if trace.rule == Rule::Borda {
        let round = &trace.rounds[0];
        return vec![with_scores(round, &round.survivors)];
    }
    let mut blocks: Vec<Vec<(usize, i64)>> = trace
        .rounds
        .iter()
        .filter(|r| !r.eliminated.is_empty())
        .map(|r| with_scores(r, &r.eliminated))
        .collect();
    match trace.rounds.last() {
        Some(last) if last.eliminated.is_empty() => {
            blocks.push(with_scores(last, &last.survivors));
        }
        _ => blocks.push(vec![(trace.winner, 0)]),
    }
    blocks
}

fn prepend(c: usize, rest: Vec<usize>) -> Vec<usize> {
    let mut ranking = Vec::with_capacity(rest.len() + 1);
    ranking.push(c);
    ranking.extend(rest);
    ranking
}

fn construct<F>(instance: &ManipulationInstance, mut next: F) -> ManipulationResult
where
    F: FnMut(&Tally) -> Vec<usize>,
{
    let rule = instance.rule;
    let tie = instance.tie_break();
    let mut tally = instance.base_tally();
    let mut buf = Buffers::new(tally.m());
    let cap = instance.iteration_cap();
    let mut ballots = Vec::new();
    let success = loop {
        if rule.winner_with(&tally, tie, &mut buf) == instance.preferred {
            break true;
        }
        if ballots.len() >= cap {
            break false;
        }
        let ranking = next(&tally);
        tally.add_ranking(&ranking, tally.scale());
        ballots.push(LinearOrder::new_unchecked(ranking));
    };
    ManipulationResult {
        success,
        manipulators_used: ballots.len(),
        ballots,
        trace: rule.run(&tally, tie),
    }
}

/// LargestFit with `k` manipulators: the non-top scores `m-2, ..., 0` (k copies
/// each) go, largest first, to the rival with the lowest current Borda score
/// that still has room for another score.
pub fn heuristic_largest_fit(
    instance: &ManipulationInstance,
    k: usize,
) -> Result<ManipulationResult> {
    fit(instance, k, FitTarget::Largest)
}

/// AverageFit with `k` manipulators: each score goes to the rival whose
/// remaining gap to `c`'s final score, divided by its remaining free slots, is
/// largest (the lowest average Borda score). Ties go to the rival with the
/// fewest scores so far.
pub fn heuristic_average_fit(
    instance: &ManipulationInstance,
    k: usize,
) -> Result<ManipulationResult> {
    fit(instance, k, FitTarget::Average)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FitTarget {
    Largest,
    Average,
}

fn fit(instance: &ManipulationInstance, k: usize, target: FitTarget) -> Result<ManipulationResult> {
    let c = instance.preferred;
    let tie = instance.tie_break();
    let mut tally = instance.base_tally();
    let m = tally.m();
    let unit = tally.scale();
    let mut current = tally.borda();
    let c_final = current[c] + (k as i64) * (m as i64 - 1) * unit;
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); m];

    for value in (0..m.saturating_sub(1)).rev() {
        for _ in 0..k {
            let open = (0..m).filter(|&i| i != c && assigned[i].len() < k);
            let pick = match target {
                FitTarget::Largest => open.min_by_key(|&i| (current[i], Reverse(tie.rank(i)))),
                FitTarget::Average => open.min_by(|&a, &b| {
                    let gap_a = (c_final - current[a]) as i128;
                    let gap_b = (c_final - current[b]) as i128;
                    let slots_a = (k - assigned[a].len()) as i128;
                    let slots_b = (k - assigned[b].len()) as i128;
                    // Larger average gap first.
                    (gap_b * slots_a)
                        .cmp(&(gap_a * slots_b))
                        .then(assigned[a].len().cmp(&assigned[b].len()))
                        .then(tie.rank(b).cmp(&tie.rank(a)))
                }),
            }
            .expect("k slots per rival cover k copies of each score");
            current[pick] += value as i64 * unit;
            assigned[pick].push(value);
        }
    }

    let ballots = scores_to_ballots(&assigned, k, c)?;
    for b in &ballots {
        tally.add_unit(b);
    }
    let trace = instance.rule.run(&tally, tie);
    Ok(ManipulationResult {
        success: trace.winner == c,
        manipulators_used: k,
        ballots,
        trace,
    })
}

/// Smallest coalition the heuristic finds. Fit methods scan `k` upward from
/// a counting lower bound; the constructive methods already stop at their
/// first success.
pub fn minimize_manipulators(
    instance: &ManipulationInstance,
    heuristic: Heuristic,
) -> Result<ManipulationResult> {
    match heuristic {
        Heuristic::Reverse => Ok(heuristic_reverse(instance)),
        Heuristic::Eliminate => Ok(heuristic_eliminate(instance)),
        Heuristic::RevEliminate => Ok(heuristic_rev_eliminate(instance)),
        Heuristic::LargestFit | Heuristic::AverageFit => {
            let target = if heuristic == Heuristic::LargestFit {
                FitTarget::Largest
            } else {
                FitTarget::Average
            };
            let start = manipulator_lower_bound(instance);
            let cap = instance.iteration_cap().max(start);
            let mut last = None;
            for k in start..=cap {
                let result = fit(instance, k, target)?;
                if result.success {
                    return Ok(result);
                }
                last = Some(result);
            }
            Ok(last.expect("at least one attempt"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{CandidateSet, Profile};
    use crate::manipulation::evaluate;

    fn inst(rule: Rule, m: usize, orders: &[&[usize]], c: usize) -> ManipulationInstance {
        let p = Profile::unweighted(
            CandidateSet::numbered(m),
            orders
                .iter()
                .map(|r| LinearOrder::new(r.to_vec()).unwrap())
                .collect(),
        )
        .unwrap();
        ManipulationInstance::unweighted(rule, p, c).unwrap()
    }

    #[test]
    fn already_winning_needs_nobody() {
        for rule in Rule::ALL {
            let i = inst(rule, 3, &[&[0, 1, 2], &[0, 2, 1]], 0);
            for h in Heuristic::ALL {
                let r = minimize_manipulators(&i, h).unwrap();
                assert!(r.success);
                assert_eq!(r.manipulators_used, 0, "{rule} {h}");
            }
        }
    }

    #[test]
    fn two_candidates_fit_votes_c_first() {
        let i = inst(Rule::Baldwin, 2, &[&[0, 1]], 1);
        let la = heuristic_largest_fit(&i, 1).unwrap();
        assert_eq!(la.ballots, vec![LinearOrder::new(vec![1, 0]).unwrap()]);
        let av = heuristic_average_fit(&i, 1).unwrap();
        assert_eq!(av.ballots, la.ballots);
        assert!(la.success);
    }

    #[test]
    fn reverse_orders_by_current_score() {
        // Scores: c1 = 4, c2 = 2, c3 = 0; helping c3 means c2 second, c1 last.
        let i = inst(Rule::Borda, 3, &[&[0, 1, 2], &[0, 1, 2]], 2);
        let r = heuristic_reverse(&i);
        assert!(r.success);
        assert_eq!(r.ballots[0].ranking(), &[2, 1, 0]);
        assert!(evaluate(&i, &r.ballots).unwrap());
    }

    #[test]
    fn borda_eliminate_matches_reverse() {
        let i = inst(
            Rule::Borda,
            4,
            &[&[0, 1, 2, 3], &[1, 0, 3, 2], &[2, 0, 1, 3]],
            3,
        );
        let a = heuristic_reverse(&i);
        let b = heuristic_eliminate(&i);
        assert_eq!(a.ballots, b.ballots);
        let rev = heuristic_rev_eliminate(&i);
        assert!(rev.success);
    }

    #[test]
    fn baldwin_elimination_orders() {
        // Baldwin on these ballots eliminates c3, then c2, then c1; c4 wins.
        let i = inst(
            Rule::Baldwin,
            5,
            &[&[3, 0, 1, 2, 4], &[3, 0, 1, 2, 4], &[0, 3, 1, 4, 2]],
            4,
        );
        let trace = Rule::Baldwin.run(&i.base_tally(), i.tie_break());
        let order = trace.elimination_order();
        let e = heuristic_eliminate(&i);
        let r = heuristic_rev_eliminate(&i);
        let mut expected = vec![4];
        expected.extend(order.iter().copied().filter(|&x| x != 4));
        assert_eq!(e.ballots[0].ranking(), expected.as_slice());
        let mut reversed = vec![4];
        reversed.extend(order.iter().rev().copied().filter(|&x| x != 4));
        assert_eq!(r.ballots[0].ranking(), reversed.as_slice());
    }

    #[test]
    fn every_success_is_sound() {
        let i = inst(
            Rule::Nanson,
            4,
            &[&[0, 1, 2, 3], &[1, 2, 0, 3], &[2, 0, 1, 3], &[0, 2, 1, 3]],
            3,
        );
        for h in Heuristic::ALL {
            let r = minimize_manipulators(&i, h).unwrap();
            assert!(r.success, "{h}");
            assert!(evaluate(&i, &r.ballots).unwrap(), "{h}");
            assert!(r.ballots.iter().all(|b| b.ranking()[0] == 3));
            assert!(r.manipulators_used >= crate::manipulation::manipulator_lower_bound(&i));
        }
    }

    #[test]
    fn fit_fails_below_the_counting_bound() {
        let i = inst(Rule::Borda, 3, &[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]], 2);
        let lb = crate::manipulation::manipulator_lower_bound(&i);
        assert_eq!(lb, 3);
        assert!(!heuristic_largest_fit(&i, lb - 1).unwrap().success);
        assert!(!heuristic_average_fit(&i, lb - 1).unwrap().success);
    }
}
