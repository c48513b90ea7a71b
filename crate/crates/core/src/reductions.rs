//! Hardness-reduction instances and their score identities.
//!
//! * X3C to single-manipulator Baldwin, built from `W(u, v)` vote pairs.
//! * PARTITION to weighted Nanson with four candidates.
//! * A Baldwin family on which the Reverse heuristic overshoots the optimum
//!   by a linear number of manipulators.
//!
//! Each constructor returns the instance together with an [`IdentityReport`]
//! recomputed from the built profile, never from closed forms alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::election::{CandidateSet, LinearOrder, Profile, Weight, WeightedBallot};
use crate::error::{Error, Result};
use crate::manipulation::{Budget, ManipulationInstance};
use crate::rules::Rule;
use crate::tally::Tally;

/// An exact-3-cover instance over ground set `v1..vq`. Elements are stored
/// 0-based; the JSON form is `{"q": 6, "sets": [[1,2,3],[4,5,6]]}` with
/// 1-based elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "X3CJson", into = "X3CJson")]
pub struct X3CInstance {
    q: usize,
    sets: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct X3CJson {
    q: usize,
    sets: Vec<[usize; 3]>,
}

impl TryFrom<X3CJson> for X3CInstance {
    type Error = Error;

    fn try_from(raw: X3CJson) -> Result<Self> {
        let mut sets = Vec::with_capacity(raw.sets.len());
        for s in raw.sets {
            if s.contains(&0) {
                return Err(Error::InvalidInstance(
                    "set elements are numbered from 1".into(),
                ));
            }
            sets.push(s.map(|v| v - 1));
        }
        X3CInstance::new(raw.q, sets)
    }
}

impl From<X3CInstance> for X3CJson {
    fn from(x: X3CInstance) -> Self {
        X3CJson {
            q: x.q,
            sets: x.sets.iter().map(|s| s.map(|v| v + 1)).collect(),
        }
    }
}

impl X3CInstance {
    /// Validates that every set has three distinct elements below `q`.
    pub fn new(q: usize, sets: Vec<[usize; 3]>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInstance("ground set is empty".into()));
        }
        if sets.is_empty() {
            return Err(Error::InvalidInstance("no sets".into()));
        }
        for (j, s) in sets.iter().enumerate() {
            if s.iter().any(|&v| v >= q) {
                return Err(Error::InvalidInstance(format!(
                    "set {} has an element outside 1..={q}",
                    j + 1
                )));
            }
            if s[0] == s[1] || s[0] == s[2] || s[1] == s[2] {
                return Err(Error::InvalidInstance(format!(
                    "set {} repeats an element",
                    j + 1
                )));
            }
        }
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        Ok(X3CInstance { q, sets })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn t(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[[usize; 3]] {
        &self.sets
    }

    /// Candidate count of the Baldwin instance: `q + t + 3`.
    pub fn candidates(&self) -> usize {
        self.q + self.t() + 3
    }

    /// Checks that `cover` (set indices) is an exact cover.
    pub fn check_cover(&self, cover: &[usize]) -> Result<()> {
        let mut hit = vec![false; self.q];
        let mut used = vec![false; self.t()];
        for &j in cover {
            if j >= self.t() {
                return Err(Error::InvalidInstance(format!("no set {}", j + 1)));
            }
            if std::mem::replace(&mut used[j], true) {
                return Err(Error::InvalidInstance(format!(
                    "set {} listed twice",
                    j + 1
                )));
            }
            for &v in &self.sets[j] {
                if std::mem::replace(&mut hit[v], true) {
                    return Err(Error::InvalidInstance(format!(
                        "element v{} covered twice",
                        v + 1
                    )));
                }
            }
        }
        if let Some(v) = hit.iter().position(|h| !h) {
            return Err(Error::InvalidInstance(format!(
                "element v{} not covered",
                v + 1
            )));
        }
        Ok(())
    }
}

/// The two ballots of a gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetVotePair {
    pub first: LinearOrder,
    pub second: LinearOrder,
}

impl GadgetVotePair {
    pub fn ballots(&self) -> [&LinearOrder; 2] {
        [&self.first, &self.second]
    }
}

/// `W(u, v)`: `u > v > Others` and `rev(Others) > u > v`, with Others the
/// remaining candidates in index order. Relative to any third candidate the
/// pair gives `u` exactly one point more and `v` exactly one point less.
pub fn gadget_w(u: usize, v: usize, m: usize) -> Result<GadgetVotePair> {
    if u == v || u >= m || v >= m {
        return Err(Error::InvalidInstance(format!(
            "gadget needs two distinct candidates below {m}, got {u} and {v}"
        )));
    }
    let others: Vec<usize> = (0..m).filter(|&x| x != u && x != v).collect();
    let mut first = vec![u, v];
    first.extend(&others);
    let mut second: Vec<usize> = others.iter().rev().copied().collect();
    second.extend([u, v]);
    Ok(GadgetVotePair {
        first: LinearOrder::new_unchecked(first),
        second: LinearOrder::new_unchecked(second),
    })
}

/// `R(u, v)`: `u > v > Others > p` and `rev(Others) > u > v > p`.
pub fn gadget_r(u: usize, v: usize, p: usize, m: usize) -> Result<GadgetVotePair> {
    if u == v || u == p || v == p || u >= m || v >= m || p >= m {
        return Err(Error::InvalidInstance(format!(
            "gadget needs three distinct candidates below {m}, got {u}, {v}, {p}"
        )));
    }
    let others: Vec<usize> = (0..m).filter(|&x| x != u && x != v && x != p).collect();
    let mut first = vec![u, v];
    first.extend(&others);
    first.push(p);
    let mut second: Vec<usize> = others.iter().rev().copied().collect();
    second.extend([u, v, p]);
    Ok(GadgetVotePair {
        first: LinearOrder::new_unchecked(first),
        second: LinearOrder::new_unchecked(second),
    })
}

/// One checked equality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub expected: i64,
    pub actual: i64,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.expected == self.actual
    }
}

/// Recomputed identities plus whether a witness is on hand.
///
/// `bounds` holds intermediate inequalities the construction's argument
/// leans on (as 0/1 checks). They are reported, not enforced: the identities
/// are the contract.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identities: Vec<IdentityCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<IdentityCheck>,
    pub witness_available: bool,
}

impl IdentityReport {
    fn check(&mut self, name: impl Into<String>, expected: i64, actual: i64) {
        self.identities.push(IdentityCheck {
            name: name.into(),
            expected,
            actual,
        });
    }

    fn bound(&mut self, name: impl Into<String>, holds: bool) {
        self.bounds.push(IdentityCheck {
            name: name.into(),
            expected: 1,
            actual: i64::from(holds),
        });
    }

    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(IdentityCheck::holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.identities.iter().filter(|c| !c.holds())
    }

    pub fn bound_failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.bounds.iter().filter(|c| !c.holds())
    }
}

/// Copies per gadget pair, keyed by `(u, v)` so construction order is fixed.
#[derive(Default)]
struct GadgetCounts(BTreeMap<(usize, usize), i64>);

impl GadgetCounts {
    fn add(&mut self, u: usize, v: usize, copies: i64) {
        *self.0.entry((u, v)).or_insert(0) += copies;
    }

    fn tally(&self, m: usize) -> Result<Tally> {
        let mut t = Tally::empty(m, 1);
        for (&(u, v), &n) in &self.0 {
            let g = gadget_w(u, v, m)?;
            t.add(&g.first, n);
            t.add(&g.second, n);
        }
        Ok(t)
    }

    fn ballots(&self, m: usize) -> Result<Vec<WeightedBallot>> {
        let mut out = Vec::new();
        for (&(u, v), &n) in &self.0 {
            if n == 0 {
                continue;
            }
            let g = gadget_w(u, v, m)?;
            for order in [g.first, g.second] {
                out.push(WeightedBallot {
                    order,
                    weight: Weight::from_integer(n),
                });
            }
        }
        Ok(out)
    }
}

/// Candidate layout of the X3C instance: `c, d, b, v1..vq, a1..at`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct X3CLayout {
    pub q: usize,
    pub t: usize,
}

impl X3CLayout {
    pub const C: usize = 0;
    pub const D: usize = 1;
    pub const B: usize = 2;

    pub fn v(&self, i: usize) -> usize {
        3 + i
    }

    pub fn a(&self, j: usize) -> usize {
        3 + self.q + j
    }

    pub fn m(&self) -> usize {
        self.q + self.t + 3
    }

    pub fn candidate_set(&self) -> CandidateSet {
        let mut names = vec!["c".to_string(), "d".into(), "b".into()];
        names.extend((1..=self.q).map(|i| format!("v{i}")));
        names.extend((1..=self.t).map(|j| format!("a{j}")));
        CandidateSet::new(names).expect("distinct names")
    }
}

#[derive(Clone, Debug)]
pub struct X3CReduction {
    pub layout: X3CLayout,
    /// Single-manipulator Baldwin instance; `c` is preferred.
    pub instance: ManipulationInstance,
    pub report: IdentityReport,
}

/// Builds the single-manipulator Baldwin instance for an X3C instance.
///
/// Part one: `2m` copies of `W(v_i, a_j)` for each `v_i` in `S_j`, `m`
/// copies of `W(b, v_i)` per `i`, and `m(t+6)` copies of `W(b, c)`. Part two
/// adds `W(d, x)` copies measured from part one's scores so that
/// `s(v_i) - s(c) = m`, `s(a_j) - s(c) = 1` and `s(b) - s(c) = mq`.
pub fn x3c_to_baldwin(x3c: &X3CInstance) -> Result<X3CReduction> {
    let layout = X3CLayout {
        q: x3c.q(),
        t: x3c.t(),
    };
    let m = layout.m();
    let mi = m as i64;
    let q = x3c.q() as i64;
    let (c, b, d) = (X3CLayout::C, X3CLayout::B, X3CLayout::D);

    let mut counts = GadgetCounts::default();
    for (j, set) in x3c.sets().iter().enumerate() {
        for &v in set {
            counts.add(layout.v(v), layout.a(j), 2 * mi);
        }
    }
    for i in 0..x3c.q() {
        counts.add(b, layout.v(i), mi);
    }
    counts.add(b, c, mi * (layout.t as i64 + 6));

    let mut report = IdentityReport::default();
    let p1 = counts.tally(m)?.borda();
    // The argument also claims s(x)-s(c) >= 2m on part one for every v_i and
    // a_j. For a_j part one gives exactly m t, so this fails when t = 1; the
    // balancing counts stay nonnegative regardless.
    report.bound("P1: s(b)-s(c) >= mq", p1[b] - p1[c] >= mi * q);
    for x in (0..x3c.q())
        .map(|i| layout.v(i))
        .chain((0..layout.t).map(|j| layout.a(j)))
    {
        report.bound(
            format!("P1: s({0})-s(c) >= 2m", name_of(&layout, x)),
            p1[x] - p1[c] >= 2 * mi,
        );
    }

    // Each W(d, x) copy lowers s(x) - s(c) by one.
    let mut part_two = Vec::new();
    for i in 0..x3c.q() {
        let x = layout.v(i);
        part_two.push((x, p1[x] - p1[c] - mi));
    }
    for j in 0..layout.t {
        let x = layout.a(j);
        part_two.push((x, p1[x] - p1[c] - 1));
    }
    part_two.push((b, p1[b] - p1[c] - mi * q));
    for &(x, n) in &part_two {
        if n < 0 {
            return Err(Error::Construction(format!(
                "negative copy count {n} for W(d, {})",
                name_of(&layout, x)
            )));
        }
        counts.add(d, x, n);
    }

    let scores = counts.tally(m)?.borda();
    for i in 0..x3c.q() {
        let x = layout.v(i);
        report.check(format!("s(v{})-s(c) = m", i + 1), mi, scores[x] - scores[c]);
    }
    for j in 0..layout.t {
        let x = layout.a(j);
        report.check(format!("s(a{})-s(c) = 1", j + 1), 1, scores[x] - scores[c]);
    }
    report.check("s(b)-s(c) = mq", mi * q, scores[b] - scores[c]);
    report.witness_available = x3c_solve_small(x3c).is_some();

    let profile = Profile::new(layout.candidate_set(), counts.ballots(m)?)?;
    let instance =
        ManipulationInstance::new(Rule::Baldwin, profile, c, Budget::Unweighted(Some(1)))?;
    Ok(X3CReduction {
        layout,
        instance,
        report,
    })
}

fn name_of(layout: &X3CLayout, x: usize) -> String {
    match x {
        0 => "c".into(),
        1 => "d".into(),
        2 => "b".into(),
        _ if x < 3 + layout.q => format!("v{}", x - 2),
        _ => format!("a{}", x - 2 - layout.q),
    }
}

/// The manipulator's ballot for an exact cover:
/// `c > d > (a_j not in cover) > b > v1..vq > (a_j in cover)`.
pub fn x3c_witness_vote(x3c: &X3CInstance, cover: &[usize]) -> Result<LinearOrder> {
    x3c.check_cover(cover)?;
    let layout = X3CLayout {
        q: x3c.q(),
        t: x3c.t(),
    };
    let mut in_cover = vec![false; layout.t];
    for &j in cover {
        in_cover[j] = true;
    }
    let mut ranking = vec![X3CLayout::C, X3CLayout::D];
    ranking.extend((0..layout.t).filter(|&j| !in_cover[j]).map(|j| layout.a(j)));
    ranking.push(X3CLayout::B);
    ranking.extend((0..layout.q).map(|i| layout.v(i)));
    ranking.extend((0..layout.t).filter(|&j| in_cover[j]).map(|j| layout.a(j)));
    LinearOrder::new(ranking)
}

/// An exact cover by backtracking on the lowest uncovered element, or `None`.
pub fn x3c_solve_small(x3c: &X3CInstance) -> Option<Vec<usize>> {
    fn go(x3c: &X3CInstance, hit: &mut [bool], chosen: &mut Vec<usize>) -> bool {
        let Some(v) = hit.iter().position(|h| !h) else {
            return true;
        };
        for (j, s) in x3c.sets().iter().enumerate() {
            if !s.contains(&v) || s.iter().any(|&e| hit[e]) || chosen.contains(&j) {
                continue;
            }
            s.iter().for_each(|&e| hit[e] = true);
            chosen.push(j);
            if go(x3c, hit, chosen) {
                return true;
            }
            chosen.pop();
            s.iter().for_each(|&e| hit[e] = false);
        }
        false
    }
    if !x3c.q().is_multiple_of(3) {
        return None;
    }
    let mut hit = vec![false; x3c.q()];
    let mut chosen = Vec::new();
    go(x3c, &mut hit, &mut chosen).then(|| {
        chosen.sort_unstable();
        chosen
    })
}

/// PARTITION: positive integers summing to `2K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct PartitionInstance {
    values: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    values: Vec<u64>,
}

impl TryFrom<PartitionJson> for PartitionInstance {
    type Error = Error;

    fn try_from(raw: PartitionJson) -> Result<Self> {
        PartitionInstance::new(raw.values)
    }
}

impl From<PartitionInstance> for PartitionJson {
    fn from(p: PartitionInstance) -> Self {
        PartitionJson { values: p.values }
    }
}

impl PartitionInstance {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() || values.contains(&0) {
            return Err(Error::InvalidInstance(
                "partition needs one or more positive integers".into(),
            ));
        }
        let sum: u64 = values.iter().sum();
        if !sum.is_multiple_of(2) {
            return Err(Error::InvalidInstance(format!("sum {sum} is odd")));
        }
        if sum > 1 << 40 {
            return Err(Error::InvalidInstance(format!("sum {sum} is too large")));
        }
        Ok(PartitionInstance { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Half the sum.
    pub fn k(&self) -> u64 {
        self.values.iter().sum::<u64>() / 2
    }
}

/// One side of an equal-sum split (`true` = first side), or `None`.
pub fn partition_solve(p: &PartitionInstance) -> Option<Vec<bool>> {
    let k = p.k() as usize;
    // reach[s] = index of the last value used to first reach sum s.
    let mut reach: Vec<Option<usize>> = vec![None; k + 1];
    let mut seen = vec![false; k + 1];
    seen[0] = true;
    for (i, &v) in p.values().iter().enumerate() {
        let v = v as usize;
        for s in (v..=k).rev() {
            if !seen[s] && seen[s - v] {
                seen[s] = true;
                reach[s] = Some(i);
            }
        }
    }
    if !seen[k] {
        return None;
    }
    let mut side = vec![false; p.values().len()];
    let mut s = k;
    while s > 0 {
        let i = reach[s].expect("reachable sum has a last item");
        side[i] = true;
        s -= p.values()[i] as usize;
    }
    Some(side)
}

/// Candidate indices of the PARTITION instance.
pub mod partition_layout {
    pub const A: usize = 0;
    pub const B: usize = 1;
    pub const C: usize = 2;
    pub const P: usize = 3;
}

#[derive(Clone, Debug)]
pub struct PartitionReduction {
    /// Weighted Nanson instance over `a, b, c, p`; `p` is preferred and the
    /// manipulators' weights are the integers.
    pub instance: ManipulationInstance,
    pub report: IdentityReport,
}

/// Builds the four-candidate weighted Nanson instance. Non-manipulators cast
/// weight `2K+1` on four orders, `K+2` on two and `1` on four more, giving
/// base scores `14K+18`, `17K+18`, `17K+18`, `12K+18` for `a, b, c, p`.
pub fn partition_to_nanson(p: &PartitionInstance) -> Result<PartitionReduction> {
    use partition_layout::{A, B, C, P};
    let k = p.k() as i64;
    let rows: [(i64, [usize; 4]); 10] = [
        (2 * k + 1, [B, P, C, A]),
        (2 * k + 1, [A, C, B, P]),
        (2 * k + 1, [C, P, B, A]),
        (2 * k + 1, [A, B, C, P]),
        (k + 2, [P, A, B, C]),
        (k + 2, [C, B, P, A]),
        (1, [A, B, P, C]),
        (1, [C, P, A, B]),
        (1, [A, C, P, B]),
        (1, [B, P, A, C]),
    ];
    let ballots = rows
        .iter()
        .map(|&(w, r)| WeightedBallot {
            order: LinearOrder::new_unchecked(r.to_vec()),
            weight: Weight::from_integer(w),
        })
        .collect();
    let profile = Profile::new(CandidateSet::new(["a", "b", "c", "p"])?, ballots)?;
    let scores = Tally::from_profile(&profile).borda();
    let mut report = IdentityReport::default();
    report.check("s(a) = 14K+18", 14 * k + 18, scores[A]);
    report.check("s(b) = 17K+18", 17 * k + 18, scores[B]);
    report.check("s(c) = 17K+18", 17 * k + 18, scores[C]);
    report.check("s(p) = 12K+18", 12 * k + 18, scores[P]);

    let weights = p
        .values()
        .iter()
        .map(|&v| Weight::from_integer(v as i64))
        .collect();
    let instance = ManipulationInstance::new(Rule::Nanson, profile, P, Budget::Weights(weights))?;
    if let Some(side) = partition_solve(p) {
        report.witness_available = true;
        let ballots = partition_witness(p, &side)?;
        let mut t = Tally::from_profile(&instance.base);
        for (ballot, &w) in ballots.iter().zip(p.values()) {
            t.add(ballot, w as i64);
        }
        let after = t.borda();
        for (x, name) in [(A, "a"), (B, "b"), (C, "c"), (P, "p")] {
            report.check(
                format!("witness: s({name}) = 18K+18"),
                18 * k + 18,
                after[x],
            );
        }
    }
    Ok(PartitionReduction { instance, report })
}

/// Manipulator ballots for a split: `p > a > b > c` on the `true` side and
/// `p > a > c > b` on the other. The split must balance.
pub fn partition_witness(p: &PartitionInstance, side: &[bool]) -> Result<Vec<LinearOrder>> {
    use partition_layout::{A, B, C, P};
    if side.len() != p.values().len() {
        return Err(Error::Dimension {
            expected: p.values().len(),
            actual: side.len(),
        });
    }
    let first: u64 = p
        .values()
        .iter()
        .zip(side)
        .filter(|(_, &s)| s)
        .map(|(v, _)| v)
        .sum();
    if first != p.k() {
        return Err(Error::InvalidInstance(format!(
            "split sums to {first}, not {}",
            p.k()
        )));
    }
    Ok(side
        .iter()
        .map(|&s| {
            LinearOrder::new_unchecked(if s {
                vec![P, A, B, C]
            } else {
                vec![P, A, C, B]
            })
        })
        .collect())
}

/// Candidate indices of the Reverse pathology family: `a..f` then `p`.
pub mod pathology_layout {
    pub const A: usize = 0;
    pub const F: usize = 5;
    pub const P: usize = 6;
}

#[derive(Clone, Debug)]
pub struct PathologyReduction {
    pub n: usize,
    pub instance: ManipulationInstance,
    pub report: IdentityReport,
}

/// The seven-candidate Baldwin election with `42n` votes: `3n` copies of
/// `R(a,b)`, `R(b,c)`, `R(c,d)`, `R(d,e)`, `R(e,f)` and `6n` copies of the
/// pair `p > a > Others`, `rev(Others) > p > a`.
pub fn reverse_pathology_instance(n: usize) -> Result<PathologyReduction> {
    use pathology_layout::{A, P};
    if n == 0 {
        return Err(Error::InvalidInstance("n must be at least 1".into()));
    }
    let m = 7;
    let ni = n as i64;
    let mut ballots = Vec::new();
    let mut push = |pair: GadgetVotePair, copies: i64| {
        for order in [pair.first, pair.second] {
            ballots.push(WeightedBallot {
                order,
                weight: Weight::from_integer(copies),
            });
        }
    };
    for u in 0..5 {
        push(gadget_r(u, u + 1, P, m)?, 3 * ni);
    }
    let others: Vec<usize> = (1..6).collect();
    let mut first = vec![P, A];
    first.extend(&others);
    let mut second: Vec<usize> = others.iter().rev().copied().collect();
    second.extend([P, A]);
    push(
        GadgetVotePair {
            first: LinearOrder::new_unchecked(first),
            second: LinearOrder::new_unchecked(second),
        },
        6 * ni,
    );
    let profile = Profile::new(
        CandidateSet::new(["a", "b", "c", "d", "e", "f", "p"])?,
        ballots,
    )?;
    let scores = Tally::from_profile(&profile).borda();
    let mut report = IdentityReport::default();
    report.check("votes = 42n", 42 * ni, profile.total_weight().to_integer());
    for (x, name, per_n) in [
        (0, "a", 138),
        (1, "b", 141),
        (2, "c", 141),
        (3, "d", 141),
        (4, "e", 141),
        (5, "f", 138),
        (6, "p", 42),
    ] {
        report.check(format!("s({name}) = {per_n}n"), per_n * ni, scores[x]);
    }
    let instance = ManipulationInstance::unweighted(Rule::Baldwin, profile, P)?;
    let upper = pathology_upper_bound_ballots(n);
    report.witness_available = crate::manipulation::evaluate(&instance, &upper)?;
    Ok(PathologyReduction {
        n,
        instance,
        report,
    })
}

/// `18n` identical ballots `p > a > b > c > d > e > f`.
pub fn pathology_upper_bound_ballots(n: usize) -> Vec<LinearOrder> {
    vec![LinearOrder::new_unchecked(vec![6, 0, 1, 2, 3, 4, 5]); 18 * n]
}

/// Every X3C instance over `q` elements with exactly `t` sets, as multisets
/// of triples in nondecreasing lexicographic order.
pub fn enumerate_x3c(q: usize, t: usize) -> Vec<X3CInstance> {
    let mut triples = Vec::new();
    for x in 0..q {
        for y in x + 1..q {
            for z in y + 1..q {
                triples.push([x, y, z]);
            }
        }
    }
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(t);
    fn go(
        triples: &[[usize; 3]],
        from: usize,
        t: usize,
        q: usize,
        pick: &mut Vec<[usize; 3]>,
        out: &mut Vec<X3CInstance>,
    ) {
        if pick.len() == t {
            out.push(X3CInstance::new(q, pick.clone()).expect("valid triples"));
            return;
        }
        for i in from..triples.len() {
            pick.push(triples[i]);
            go(triples, i, t, q, pick, out);
            pick.pop();
        }
    }
    if t > 0 {
        go(&triples, 0, t, q, &mut pick, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manipulation::evaluate;

    #[test]
    fn gadget_shifts_by_one() {
        let m = 5;
        let g = gadget_w(0, 1, m).unwrap();
        let mut t = Tally::empty(m, 1);
        t.add(&g.first, 1);
        t.add(&g.second, 1);
        let s = t.borda();
        for e in 2..m {
            assert_eq!(s[0] - s[e], 1);
            assert_eq!(s[1] - s[e], -1);
        }
        assert!(gadget_w(2, 2, m).is_err());
    }

    #[test]
    fn gadget_r_puts_p_last() {
        let g = gadget_r(0, 1, 6, 7).unwrap();
        assert_eq!(g.first.ranking(), &[0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(g.second.ranking(), &[5, 4, 3, 2, 0, 1, 6]);
    }

    #[test]
    fn smallest_x3c_identities_and_witness() {
        let x = X3CInstance::new(3, vec![[0, 1, 2], [0, 1, 2]]).unwrap();
        let red = x3c_to_baldwin(&x).unwrap();
        assert!(red.report.all_hold(), "{:?}", red.report);
        assert!(red.report.witness_available);
        let vote = x3c_witness_vote(&x, &[0]).unwrap();
        assert!(evaluate(&red.instance, &[vote]).unwrap());
    }

    #[test]
    fn cover_validation() {
        let x = X3CInstance::new(6, vec![[0, 1, 2], [3, 4, 5], [2, 3, 4]]).unwrap();
        assert_eq!(x3c_solve_small(&x), Some(vec![0, 1]));
        assert!(x.check_cover(&[0, 2]).is_err());
        assert!(x.check_cover(&[0]).is_err());
        assert!(x.check_cover(&[0, 0]).is_err());
        assert!(x3c_witness_vote(&x, &[1, 2]).is_err());
        assert!(X3CInstance::new(3, vec![[0, 0, 1]]).is_err());
        assert!(X3CInstance::new(3, vec![[0, 1, 3]]).is_err());
    }

    #[test]
    fn single_set_cover() {
        let x = X3CInstance::new(3, vec![[0, 1, 2]]).unwrap();
        assert_eq!(x3c_solve_small(&x), Some(vec![0]));
    }

    #[test]
    fn x3c_json_is_one_based() {
        let x: X3CInstance = serde_json::from_str(r#"{"q":3,"sets":[[1,2,3],[3,2,1]]}"#).unwrap();
        assert_eq!(x.sets(), &[[0, 1, 2], [0, 1, 2]]);
        assert_eq!(
            serde_json::to_string(&x).unwrap(),
            r#"{"q":3,"sets":[[1,2,3],[1,2,3]]}"#
        );
        assert!(serde_json::from_str::<X3CInstance>(r#"{"q":3,"sets":[[0,1,2]]}"#).is_err());
    }

    #[test]
    fn partition_k1_scores() {
        let p = PartitionInstance::new(vec![1, 1]).unwrap();
        let red = partition_to_nanson(&p).unwrap();
        assert!(red.report.all_hold(), "{:?}", red.report);
        let scores = Tally::from_profile(&red.instance.base).borda();
        assert_eq!(scores, vec![32, 35, 35, 30]);
        let ballots = partition_witness(&p, &[true, false]).unwrap();
        assert!(evaluate(&red.instance, &ballots).unwrap());
        assert!(partition_witness(&p, &[true, true]).is_err());
        assert!(PartitionInstance::new(vec![1, 2]).is_err());
    }

    #[test]
    fn partition_solver() {
        let p = PartitionInstance::new(vec![3, 1, 1, 2, 2, 1]).unwrap();
        let side = partition_solve(&p).unwrap();
        let s: u64 = p
            .values()
            .iter()
            .zip(&side)
            .filter(|(_, &b)| b)
            .map(|(v, _)| v)
            .sum();
        assert_eq!(s, 5);
        assert!(partition_solve(&PartitionInstance::new(vec![1, 3]).unwrap()).is_none());
    }

    #[test]
    fn pathology_scores() {
        let red = reverse_pathology_instance(2).unwrap();
        assert!(red.report.all_hold(), "{:?}", red.report);
        assert!(red.report.witness_available);
        let s = Tally::from_profile(&red.instance.base).borda();
        assert_eq!(s, vec![276, 282, 282, 282, 282, 276, 84]);
    }

    #[test]
    fn enumeration_counts() {
        // C(q,3) triples; multisets of size t.
        assert_eq!(enumerate_x3c(3, 2).len(), 1);
        assert_eq!(enumerate_x3c(6, 2).len(), 20 * 21 / 2);
    }
}
