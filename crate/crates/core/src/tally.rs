//! Integer pairwise-preference tallies.
//!
//! Borda scores on any surviving subset `S` are determined by pairwise counts:
//! `s(x, S) = sum over y in S of N(x, y)`, where `N(x, y)` is the weight of
//! ballots ranking `x` above `y`. Baldwin and Nanson therefore only ever need
//! the `m x m` matrix `N`. Rational weights are brought to a common
//! denominator (`scale`) so all arithmetic is exact `i64`.

use num_integer::Integer;
use num_rational::Ratio;

use crate::election::{LinearOrder, Profile, Weight};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    m: usize,
    prefer: Vec<i64>,
    scale: i64,
}

impl Tally {
    /// An empty tally over `m` candidates where one unit of weight is `scale`.
    pub fn empty(m: usize, scale: i64) -> Self {
        assert!(scale > 0);
        Tally {
            m,
            prefer: vec![0; m * m],
            scale,
        }
    }

    pub fn from_profile(profile: &Profile) -> Self {
        let scale = common_denominator(profile.ballots().iter().map(|b| b.weight));
        Self::from_profile_scaled(profile, scale).expect("scale is a common denominator")
    }

    /// Tally with an explicit scale; every ballot weight times `scale` must be
    /// an integer.
    pub fn from_profile_scaled(profile: &Profile, scale: i64) -> Result<Self> {
        let mut tally = Tally::empty(profile.m(), scale);
        for ballot in profile.ballots() {
            let w = tally.scaled(ballot.weight)?;
            tally.add(&ballot.order, w);
        }
        Ok(tally)
    }

    /// `w * scale` as an integer.
    pub fn scaled(&self, w: Weight) -> Result<i64> {
        let s = w * self.scale;
        if !s.is_integer() {
            return Err(Error::Domain(format!(
                "weight {w} is not a multiple of 1/{}",
                self.scale
            )));
        }
        Ok(s.to_integer())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Scaled weight of ballots ranking `x` above `y`.
    #[inline]
    pub fn prefer(&self, x: usize, y: usize) -> i64 {
        self.prefer[x * self.m + y]
    }

    #[inline]
    pub(crate) fn prefer_mut(&mut self) -> &mut [i64] {
        &mut self.prefer
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[i64] {
        &self.prefer
    }

    /// Adds a ballot with already-scaled weight.
    pub fn add(&mut self, order: &LinearOrder, scaled_weight: i64) {
        self.add_ranking(order.ranking(), scaled_weight);
    }

    pub fn add_ranking(&mut self, ranking: &[usize], scaled_weight: i64) {
        debug_assert_eq!(ranking.len(), self.m);
        let m = self.m;
        for (i, &hi) in ranking.iter().enumerate() {
            let row = hi * m;
            for &lo in &ranking[i + 1..] {
                self.prefer[row + lo] += scaled_weight;
            }
        }
    }

    /// Adds a ballot of unit weight (i.e. `scale`).
    pub fn add_unit(&mut self, order: &LinearOrder) {
        self.add_ranking(order.ranking(), self.scale);
    }

    /// Scaled Borda scores over the full candidate set.
    pub fn borda(&self) -> Vec<i64> {
        (0..self.m)
            .map(|x| self.prefer[x * self.m..(x + 1) * self.m].iter().sum())
            .collect()
    }

    /// Unscaled score as an exact rational.
    pub fn unscale(&self, value: i64) -> Ratio<i64> {
        Ratio::new(value, self.scale)
    }

    /// Total scaled weight, recovered from any pair's counts.
    pub fn total_weight(&self) -> i64 {
        if self.m < 2 {
            return 0;
        }
        self.prefer(0, 1) + self.prefer(1, 0)
    }
}

/// Least common multiple of the weights' denominators.
pub fn common_denominator(weights: impl IntoIterator<Item = Weight>) -> i64 {
    weights.into_iter().fold(1i64, |acc, w| acc.lcm(w.denom()))
}
