#![allow(dead_code)]

//! Slow, obviously-correct reference code shared by the integration tests.
//! Nothing here goes through the pairwise tally used by the library.

use elimvote::{CandidateSet, LinearOrder, Profile, Rule, Weight};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every permutation of `0..m`, in lexicographic order.
pub fn all_orders(m: usize) -> Vec<LinearOrder> {
    fn rec(prefix: &mut Vec<usize>, m: usize, out: &mut Vec<LinearOrder>) {
        if prefix.len() == m {
            out.push(LinearOrder::new(prefix.clone()).unwrap());
            return;
        }
        for c in 0..m {
            if !prefix.contains(&c) {
                prefix.push(c);
                rec(prefix, m, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), m, &mut out);
    out
}

pub fn random_order(rng: &mut ChaCha8Rng, m: usize) -> LinearOrder {
    let mut r: Vec<usize> = (0..m).collect();
    r.shuffle(rng);
    LinearOrder::new(r).unwrap()
}

pub fn random_profile(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Profile {
    let orders = (0..n).map(|_| random_order(rng, m)).collect();
    Profile::unweighted(CandidateSet::numbered(m), orders).unwrap()
}

pub fn random_size(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo..=hi)
}

/// Borda score of `x` among `alive`, counted position by position.
fn score(ballots: &[(LinearOrder, Weight)], alive: &[usize], x: usize) -> Weight {
    let mut total = Weight::from_integer(0);
    for (order, w) in ballots {
        let below = order
            .ranking()
            .iter()
            .skip_while(|&&y| y != x)
            .skip(1)
            .filter(|y| alive.contains(y))
            .count();
        total += *w * Weight::from_integer(below as i64);
    }
    total
}

/// Lower is preferred on ties; `favor` jumps the queue.
fn rank(favor: Option<usize>, c: usize) -> (bool, usize) {
    (Some(c) != favor, c)
}

/// Winner under `rule` by direct recomputation, with `extra` unit ballots
/// appended to `profile`.
pub fn naive_winner(
    rule: Rule,
    profile: &Profile,
    extra: &[LinearOrder],
    favor: Option<usize>,
) -> usize {
    let mut ballots: Vec<(LinearOrder, Weight)> = profile
        .ballots()
        .iter()
        .map(|b| (b.order.clone(), b.weight))
        .collect();
    ballots.extend(extra.iter().map(|o| (o.clone(), Weight::from_integer(1))));
    naive_winner_weighted(rule, profile.m(), &ballots, favor)
}

pub fn naive_winner_weighted(
    rule: Rule,
    m: usize,
    ballots: &[(LinearOrder, Weight)],
    favor: Option<usize>,
) -> usize {
    let mut alive: Vec<usize> = (0..m).collect();
    loop {
        if alive.len() == 1 {
            return alive[0];
        }
        let scores: Vec<Weight> = alive.iter().map(|&x| score(ballots, &alive, x)).collect();
        match rule {
            Rule::Borda => {
                let best = (0..alive.len())
                    .max_by(|&i, &j| {
                        scores[i]
                            .cmp(&scores[j])
                            .then(rank(favor, alive[j]).cmp(&rank(favor, alive[i])))
                    })
                    .unwrap();
                return alive[best];
            }
            Rule::Baldwin => {
                let worst = (0..alive.len())
                    .min_by(|&i, &j| {
                        scores[i]
                            .cmp(&scores[j])
                            .then(rank(favor, alive[j]).cmp(&rank(favor, alive[i])))
                    })
                    .unwrap();
                alive.remove(worst);
            }
            Rule::Nanson => {
                let total: Weight = scores.iter().copied().sum();
                let avg = total / Weight::from_integer(alive.len() as i64);
                let keep: Vec<usize> = alive
                    .iter()
                    .zip(&scores)
                    .filter(|(_, s)| **s >= avg)
                    .map(|(&x, _)| x)
                    .collect();
                if keep.len() == alive.len() {
                    return *alive.iter().min_by_key(|&&c| rank(favor, c)).unwrap();
                }
                alive = keep;
            }
        }
    }
}

/// Calls `f` on every multiset of size `k` drawn from `0..n`, as a
/// nondecreasing index vector. Stops early when `f` returns true.
pub fn for_each_multiset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if rec(i, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, k, &mut Vec::with_capacity(k), &mut f)
}
