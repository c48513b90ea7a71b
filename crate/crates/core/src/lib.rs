//! Nanson's and Baldwin's elimination rules, coalitional manipulation of
//! them, and the machinery to study that manipulation experimentally.
//!
//! * [`election`] holds profiles, ballots and score arithmetic.
//! * [`rules`] evaluates Borda, Baldwin and Nanson with full traces.
//! * [`manipulation`] has the five approximation heuristics plus exact oracles.
//! * [`reductions`] builds the hardness-reduction instances.
//! * [`generators`] draws uniform and urn profiles.
//! * [`experiment`] runs the small-optimal and scaling protocols.
//!
//! Weights and scores are exact. Ballot weights are rationals; internally every
//! election is reduced to an integer [`tally::Tally`] of pairwise preferences
//! scaled by a common denominator, so score ties are never lost to rounding.

pub mod election;
pub mod error;
pub mod experiment;
pub mod format;
pub mod generators;
pub mod manipulation;
pub mod reductions;
pub mod rules;
pub mod tally;

pub use election::{
    borda_scores, condorcet_loser, condorcet_winner, pairwise_majority, positional_scores,
    CandidateSet, LinearOrder, PairwiseMargins, Profile, ScoreTable, ScoringVector, Weight,
    WeightedBallot,
};
pub use error::{Error, Result};
pub use rules::{EliminationTrace, Rule, TieBreak};
