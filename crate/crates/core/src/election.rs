//! Candidates, ballots, weighted profiles and score arithmetic.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact ballot weight. Unweighted ballots carry weight 1.
pub type Weight = Ratio<i64>;

/// The candidates of an election. The index order is the fixed tie-break
/// order: candidate 0 beats candidate 1 on a tie, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CandidateSet {
    names: Vec<String>,
}

impl CandidateSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Domain("candidate set is empty".into()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !valid_name(name) {
                return Err(Error::Domain(format!("invalid candidate name {name:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Domain(format!("duplicate candidate name {name:?}")));
            }
        }
        Ok(CandidateSet { names })
    }

    /// Candidates named `c1`, `c2`, ..., `cm`.
    pub fn numbered(m: usize) -> Self {
        assert!(m > 0, "need at least one candidate");
        CandidateSet {
            names: (1..=m).map(|i| format!("c{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.trim() == name && !name.contains([',', '>', ':', '#', '\n', '\r'])
}

/// A strict ranking of all candidates, most preferred first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearOrder(Vec<usize>);

impl LinearOrder {
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let m = ranking.len();
        let mut seen = vec![false; m];
        for &c in &ranking {
            if c >= m || seen[c] {
                return Err(Error::InvalidBallot(format!(
                    "{ranking:?} is not a permutation of 0..{m}"
                )));
            }
            seen[c] = true;
        }
        Ok(LinearOrder(ranking))
    }

    pub(crate) fn new_unchecked(ranking: Vec<usize>) -> Self {
        debug_assert!(LinearOrder::new(ranking.clone()).is_ok());
        LinearOrder(ranking)
    }

    /// `0 > 1 > ... > m-1`.
    pub fn identity(m: usize) -> Self {
        LinearOrder((0..m).collect())
    }

    pub fn ranking(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `positions()[c]` is the 0-based rank of candidate `c`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (rank, &c) in self.0.iter().enumerate() {
            pos[c] = rank;
        }
        pos
    }

    pub fn reversed(&self) -> Self {
        LinearOrder(self.0.iter().rev().copied().collect())
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        for &c in &self.0 {
            if c == a {
                return true;
            }
            if c == b {
                return false;
            }
        }
        false
    }

    /// Renders the order as `a>b>c`.
    pub fn display<'a>(&'a self, candidates: &'a CandidateSet) -> impl fmt::Display + 'a {
        DisplayOrder {
            order: self,
            candidates,
        }
    }
}

struct DisplayOrder<'a> {
    order: &'a LinearOrder,
    candidates: &'a CandidateSet,
}

impl fmt::Display for DisplayOrder<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &c) in self.order.0.iter().enumerate() {
            if i > 0 {
                f.write_str(">")?;
            }
            f.write_str(self.candidates.name(c))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedBallot {
    pub order: LinearOrder,
    pub weight: Weight,
}

impl WeightedBallot {
    pub fn unit(order: LinearOrder) -> Self {
        WeightedBallot {
            order,
            weight: Weight::one(),
        }
    }
}

/// A weighted multiset of linear orders over a candidate set.
///
/// Voters are anonymous, so equality is multiset equality of ballots.
#[derive(Clone, Debug)]
pub struct Profile {
    candidates: CandidateSet,
    ballots: Vec<WeightedBallot>,
}

impl Profile {
    pub fn new(candidates: CandidateSet, ballots: Vec<WeightedBallot>) -> Result<Self> {
        let m = candidates.len();
        for ballot in &ballots {
            if ballot.order.len() != m {
                return Err(Error::Dimension {
                    expected: m,
                    actual: ballot.order.len(),
                });
            }
            if !ballot.weight.is_positive() {
                return Err(Error::InvalidBallot(format!(
                    "weight {} is not positive",
                    ballot.weight
                )));
            }
        }
        Ok(Profile {
            candidates,
            ballots,
        })
    }

    pub fn unweighted(candidates: CandidateSet, orders: Vec<LinearOrder>) -> Result<Self> {
        Self::new(
            candidates,
            orders.into_iter().map(WeightedBallot::unit).collect(),
        )
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn ballots(&self) -> &[WeightedBallot] {
        &self.ballots
    }

    /// Number of candidates.
    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    /// Number of ballots.
    pub fn len(&self) -> usize {
        self.ballots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ballots.is_empty()
    }

    pub fn total_weight(&self) -> Weight {
        self.ballots
            .iter()
            .fold(Weight::zero(), |acc, b| acc + b.weight)
    }

    /// The profile with `extra` ballots appended.
    pub fn with_ballots(&self, extra: impl IntoIterator<Item = WeightedBallot>) -> Result<Self> {
        let mut ballots = self.ballots.clone();
        ballots.extend(extra);
        Profile::new(self.candidates.clone(), ballots)
    }

    /// Keeps only `survivors`, preserving each ballot's relative order and the
    /// original tie-break order. The result's candidate `i` is the `i`-th
    /// survivor in original index order.
    pub fn restrict(&self, survivors: &[usize]) -> Result<Profile> {
        let m = self.m();
        let mut keep = vec![false; m];
        for &c in survivors {
            if c >= m {
                return Err(Error::Domain(format!("candidate index {c} out of range")));
            }
            keep[c] = true;
        }
        let mut remap = vec![usize::MAX; m];
        let mut names = Vec::new();
        for c in (0..m).filter(|&c| keep[c]) {
            remap[c] = names.len();
            names.push(self.candidates.name(c).to_string());
        }
        if names.is_empty() {
            return Err(Error::Domain(
                "cannot restrict to an empty candidate set".into(),
            ));
        }
        let ballots = self
            .ballots
            .iter()
            .map(|b| WeightedBallot {
                order: LinearOrder(
                    b.order
                        .ranking()
                        .iter()
                        .filter(|&&c| keep[c])
                        .map(|&c| remap[c])
                        .collect(),
                ),
                weight: b.weight,
            })
            .collect();
        Ok(Profile {
            candidates: CandidateSet { names },
            ballots,
        })
    }

    /// Every ballot reversed, weights kept.
    pub fn reversal(&self) -> Profile {
        Profile {
            candidates: self.candidates.clone(),
            ballots: self
                .ballots
                .iter()
                .map(|b| WeightedBallot {
                    order: b.order.reversed(),
                    weight: b.weight,
                })
                .collect(),
        }
    }

    /// Looks a candidate up by name.
    pub fn candidate(&self, name: &str) -> Result<usize> {
        self.candidates
            .index_of(name)
            .ok_or_else(|| Error::Domain(format!("unknown candidate {name:?}")))
    }
}

impl PartialEq for Profile {
    fn eq(&self, other: &Self) -> bool {
        if self.candidates != other.candidates || self.ballots.len() != other.ballots.len() {
            return false;
        }
        let mut a = self.ballots.clone();
        let mut b = other.ballots.clone();
        a.sort();
        b.sort();
        a == b
    }
}

impl Eq for Profile {}

/// A positional scoring vector: strictly decreasing integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoringVector(Vec<i64>);

impl ScoringVector {
    pub fn new(scores: Vec<i64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::Domain("scoring vector is empty".into()));
        }
        if scores.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Domain(format!(
                "scoring vector {scores:?} is not strictly decreasing"
            )));
        }
        Ok(ScoringVector(scores))
    }

    /// `(m-1, m-2, ..., 0)`.
    pub fn borda(m: usize) -> Self {
        ScoringVector((0..m as i64).rev().collect())
    }

    pub fn scores(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Total (weighted) score per candidate index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreTable(Vec<Weight>);

impl ScoreTable {
    pub fn from_scores(scores: Vec<Weight>) -> Self {
        ScoreTable(scores)
    }

    pub fn get(&self, candidate: usize) -> Weight {
        self.0[candidate]
    }

    pub fn as_slice(&self) -> &[Weight] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Weight {
        self.0.iter().fold(Weight::zero(), |acc, &s| acc + s)
    }
}

pub fn positional_scores(profile: &Profile, vec: &ScoringVector) -> Result<ScoreTable> {
    let m = profile.m();
    if vec.len() != m {
        return Err(Error::Dimension {
            expected: m,
            actual: vec.len(),
        });
    }
    let mut scores = vec![Weight::zero(); m];
    for ballot in profile.ballots() {
        for (rank, &c) in ballot.order.ranking().iter().enumerate() {
            scores[c] += ballot.weight * vec.scores()[rank];
        }
    }
    Ok(ScoreTable(scores))
}

/// Borda scores with vector `(m-1, ..., 0)` for the profile's own `m`.
pub fn borda_scores(profile: &Profile) -> ScoreTable {
    positional_scores(profile, &ScoringVector::borda(profile.m()))
        .expect("Borda vector matches the candidate count")
}

/// Antisymmetric matrix of weighted head-to-head margins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwiseMargins {
    m: usize,
    margins: Vec<Weight>,
}

impl PairwiseMargins {
    /// Weight preferring `i` over `j` minus weight preferring `j` over `i`.
    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.margins[i * self.m + j]
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

pub fn pairwise_majority(profile: &Profile) -> PairwiseMargins {
    let m = profile.m();
    let mut margins = vec![Weight::zero(); m * m];
    for ballot in profile.ballots() {
        let r = ballot.order.ranking();
        for (i, &hi) in r.iter().enumerate() {
            for &lo in &r[i + 1..] {
                margins[hi * m + lo] += ballot.weight;
                margins[lo * m + hi] -= ballot.weight;
            }
        }
    }
    PairwiseMargins { m, margins }
}

/// The candidate beating every other candidate by a strict majority.
pub fn condorcet_winner(profile: &Profile) -> Option<usize> {
    let margins = pairwise_majority(profile);
    let m = profile.m();
    (0..m).find(|&i| (0..m).all(|j| i == j || margins.get(i, j).is_positive()))
}

/// The candidate losing to every other candidate by a strict majority.
pub fn condorcet_loser(profile: &Profile) -> Option<usize> {
    let margins = pairwise_majority(profile);
    let m = profile.m();
    (0..m).find(|&i| (0..m).all(|j| i == j || margins.get(i, j).is_negative()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(r: &[usize]) -> LinearOrder {
        LinearOrder::new(r.to_vec()).unwrap()
    }

    fn abc() -> CandidateSet {
        CandidateSet::new(["a", "b", "c"]).unwrap()
    }

    fn weighted(ballots: &[(i64, &[usize])]) -> Profile {
        Profile::new(
            abc(),
            ballots
                .iter()
                .map(|&(w, r)| WeightedBallot {
                    order: order(r),
                    weight: Weight::from_integer(w),
                })
                .collect(),
        )
        .unwrap()
    }

    fn ints(t: &ScoreTable) -> Vec<i64> {
        t.as_slice().iter().map(|s| s.to_integer()).collect()
    }

    #[test]
    fn single_ballot_reads_off_vector() {
        let p = weighted(&[(1, &[0, 1, 2])]);
        let v = ScoringVector::new(vec![2, 1, 0]).unwrap();
        assert_eq!(ints(&positional_scores(&p, &v).unwrap()), vec![2, 1, 0]);
        assert_eq!(ints(&borda_scores(&p)), vec![2, 1, 0]);
    }

    #[test]
    fn reversed_pair_ties() {
        let p = weighted(&[(1, &[0, 1, 2]), (1, &[2, 1, 0])]);
        assert_eq!(ints(&borda_scores(&p)), vec![2, 2, 2]);
    }

    #[test]
    fn three_two_profile() {
        // 3x a>b>c, 2x b>c>a: a = 3*2, b = 3*1 + 2*2, c = 2*1.
        let p = weighted(&[(3, &[0, 1, 2]), (2, &[1, 2, 0])]);
        assert_eq!(ints(&borda_scores(&p)), vec![6, 7, 2]);
        let pm = pairwise_majority(&p);
        assert_eq!(pm.get(0, 1), Weight::from_integer(1));
        assert_eq!(pm.get(0, 2), Weight::from_integer(1));
        assert_eq!(pm.get(1, 2), Weight::from_integer(5));
        assert_eq!(pm.get(2, 1), Weight::from_integer(-5));
        assert_eq!(condorcet_winner(&p), Some(0));
        assert_eq!(condorcet_loser(&p), Some(2));
    }

    #[test]
    fn tied_pair_has_no_condorcet_candidates() {
        let cands = CandidateSet::new(["a", "b"]).unwrap();
        let p = Profile::unweighted(cands, vec![order(&[0, 1]), order(&[1, 0])]).unwrap();
        let pm = pairwise_majority(&p);
        assert!(pm.get(0, 1).is_zero());
        assert_eq!(condorcet_winner(&p), None);
        assert_eq!(condorcet_loser(&p), None);
    }

    #[test]
    fn single_ballot_condorcet() {
        let p = weighted(&[(1, &[0, 1, 2])]);
        assert_eq!(condorcet_winner(&p), Some(0));
        assert_eq!(condorcet_loser(&p), Some(2));
        let pm = pairwise_majority(&p);
        assert_eq!(pm.get(1, 2), Weight::one());
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        let p = weighted(&[(1, &[0, 1, 2])]);
        let v = ScoringVector::new(vec![1, 0]).unwrap();
        assert!(matches!(
            positional_scores(&p, &v),
            Err(Error::Dimension {
                expected: 3,
                actual: 2
            })
        ));
    }

    #[test]
    fn scoring_vector_must_decrease() {
        assert!(ScoringVector::new(vec![2, 2, 0]).is_err());
        assert!(ScoringVector::new(vec![3, 1, 0]).is_ok());
    }

    #[test]
    fn restrict_keeps_relative_order() {
        let p = weighted(&[(1, &[0, 1, 2])]);
        let r = p.restrict(&[2, 0]).unwrap();
        assert_eq!(r.candidates().names(), &["a".to_string(), "c".to_string()]);
        assert_eq!(r.ballots()[0].order.ranking(), &[0, 1]);
        assert_eq!(p.restrict(&[0, 1, 2]).unwrap(), p);
        assert!(matches!(p.restrict(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn equality_is_multiset_equality() {
        let p = weighted(&[(1, &[0, 1, 2]), (2, &[2, 1, 0])]);
        let q = weighted(&[(2, &[2, 1, 0]), (1, &[0, 1, 2])]);
        assert_eq!(p, q);
        assert_ne!(p, weighted(&[(1, &[0, 1, 2])]));
    }

    #[test]
    fn rejects_bad_ballots() {
        assert!(LinearOrder::new(vec![0, 0, 2]).is_err());
        assert!(LinearOrder::new(vec![0, 3, 1]).is_err());
        let bad = Profile::new(
            abc(),
            vec![WeightedBallot {
                order: order(&[0, 1, 2]),
                weight: Weight::zero(),
            }],
        );
        assert!(bad.is_err());
        assert!(Profile::unweighted(abc(), vec![order(&[0, 1])]).is_err());
    }

    #[test]
    fn candidate_names_validated() {
        assert!(CandidateSet::new(["a", "a"]).is_err());
        assert!(CandidateSet::new(["a>b"]).is_err());
        assert!(CandidateSet::new(Vec::<String>::new()).is_err());
    }
}
