//! Coalitional manipulation: problem instances, the five approximation
//! heuristics, and exact oracles.

mod heuristics;
mod matching;
mod oracle;
mod weighted;

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::election::{LinearOrder, Profile, Weight};
use crate::error::{Error, Result};
use crate::rules::{EliminationTrace, Rule, TieBreak, TraceView};
use crate::tally::{common_denominator, Tally};

pub use heuristics::{
    heuristic_average_fit, heuristic_eliminate, heuristic_largest_fit, heuristic_rev_eliminate,
    heuristic_reverse, minimize_manipulators,
};
pub use matching::scores_to_ballots;
pub use oracle::{
    brute_force_optimal_unweighted, brute_force_optimal_unweighted_with, brute_force_single_ballot,
    OracleLimits, OracleOutcome, ReachableSums,
};
pub use weighted::{brute_force_weighted, nanson_weighted_3cand, three_way_tie};

/// The manipulators: either an unweighted coalition (optionally capped in
/// size) or a list of positive weights, one per manipulator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Budget {
    Unweighted(Option<usize>),
    Weights(Vec<Weight>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManipulationInstance {
    pub rule: Rule,
    /// Non-manipulators' ballots.
    pub base: Profile,
    pub preferred: usize,
    pub budget: Budget,
}

impl ManipulationInstance {
    pub fn new(rule: Rule, base: Profile, preferred: usize, budget: Budget) -> Result<Self> {
        if preferred >= base.m() {
            return Err(Error::InvalidInstance(format!(
                "preferred candidate {preferred} out of range"
            )));
        }
        if let Budget::Weights(ws) = &budget {
            if ws.iter().any(|w| *w <= Weight::zero()) {
                return Err(Error::InvalidInstance(
                    "manipulator weights must be positive".into(),
                ));
            }
        }
        Ok(ManipulationInstance {
            rule,
            base,
            preferred,
            budget,
        })
    }

    /// An unweighted instance with no cap on the coalition size.
    pub fn unweighted(rule: Rule, base: Profile, preferred: usize) -> Result<Self> {
        Self::new(rule, base, preferred, Budget::Unweighted(None))
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn tie_break(&self) -> TieBreak {
        TieBreak::Favor(self.preferred)
    }

    /// Base tally scaled so unit manipulators and any listed manipulator
    /// weights are integers.
    pub(crate) fn base_tally(&self) -> Tally {
        let mut weights: Vec<Weight> = self.base.ballots().iter().map(|b| b.weight).collect();
        if let Budget::Weights(ws) = &self.budget {
            weights.extend(ws.iter().copied());
        }
        let scale = common_denominator(weights);
        Tally::from_profile_scaled(&self.base, scale).expect("common denominator")
    }

    /// Iteration cap for the constructive heuristics: 50 x (n + 1) with `n`
    /// the (rounded-up) total non-manipulator weight.
    pub fn iteration_cap(&self) -> usize {
        let total = self.base.total_weight();
        let n = total.ceil().to_integer().max(0) as usize;
        50 * (n + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManipulationResult {
    pub success: bool,
    pub ballots: Vec<LinearOrder>,
    pub manipulators_used: usize,
    /// Trace of the final combined election.
    pub trace: EliminationTrace,
}

impl ManipulationResult {
    pub fn witness(&self, instance: &ManipulationInstance) -> WitnessView {
        let cands = instance.base.candidates();
        WitnessView {
            success: self.success,
            manipulators_used: self.manipulators_used,
            ballots: self
                .ballots
                .iter()
                .map(|b| b.display(cands).to_string())
                .collect(),
            rule: instance.rule,
            trace: self.trace.view(cands),
        }
    }
}

/// JSON witness: `{success, manipulators_used, ballots, rule, trace}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessView {
    pub success: bool,
    pub manipulators_used: usize,
    pub ballots: Vec<String>,
    pub rule: Rule,
    pub trace: TraceView,
}

/// Does the preferred candidate win once `ballots` are added, with ties
/// broken in its favour?
pub fn evaluate(instance: &ManipulationInstance, ballots: &[LinearOrder]) -> Result<bool> {
    let tally = combined_tally(instance, ballots)?;
    Ok(instance.rule.winner(&tally, instance.tie_break()) == instance.preferred)
}

/// Trace of the combined election.
pub fn combined_trace(
    instance: &ManipulationInstance,
    ballots: &[LinearOrder],
) -> Result<EliminationTrace> {
    let tally = combined_tally(instance, ballots)?;
    Ok(instance.rule.run(&tally, instance.tie_break()))
}

fn combined_tally(instance: &ManipulationInstance, ballots: &[LinearOrder]) -> Result<Tally> {
    let m = instance.m();
    if let Some(b) = ballots.iter().find(|b| b.len() != m) {
        return Err(Error::Dimension {
            expected: m,
            actual: b.len(),
        });
    }
    let mut tally = instance.base_tally();
    match &instance.budget {
        Budget::Unweighted(cap) => {
            if let Some(cap) = cap {
                if ballots.len() > *cap {
                    return Err(Error::InvalidInstance(format!(
                        "{} ballots exceed the coalition size {cap}",
                        ballots.len()
                    )));
                }
            }
            for b in ballots {
                tally.add_unit(b);
            }
        }
        Budget::Weights(ws) => {
            if ws.len() != ballots.len() {
                return Err(Error::InvalidInstance(format!(
                    "{} ballots for {} weighted manipulators",
                    ballots.len(),
                    ws.len()
                )));
            }
            for (b, &w) in ballots.iter().zip(ws) {
                let w = tally.scaled(w)?;
                tally.add(b, w);
            }
        }
    }
    Ok(tally)
}

/// A lower bound on the number of unit-weight manipulators needed, from
/// counting arguments valid for the instance's rule.
///
/// * Borda: `c` must at least reach every rival's current score, so
///   `s(c) + k(m-1) >= max s(i)`.
/// * Nanson: `c` must not fall below the first-round average, and must not
///   be a Condorcet loser.
/// * Baldwin: `c` must not be the unique lowest in round one even if its
///   weakest rival gains nothing, and must not be a Condorcet loser.
pub fn manipulator_lower_bound(instance: &ManipulationInstance) -> usize {
    let tally = instance.base_tally();
    let tie = instance.tie_break();
    if instance.rule.winner(&tally, tie) == instance.preferred {
        return 0;
    }
    let m = tally.m() as i64;
    let c = instance.preferred;
    let unit = tally.scale();
    let scores = tally.borda();
    let sc = scores[c];
    let others = || (0..tally.m()).filter(move |&i| i != c);
    // Smallest k >= 1 with value(k) >= 0 for a nondecreasing linear value.
    let solve = |need: i64, per_k: i64| -> usize {
        if need <= 0 {
            1
        } else {
            (need.div_euclid(per_k) + i64::from(need.rem_euclid(per_k) != 0)).max(1) as usize
        }
    };
    let condorcet = || {
        others()
            .map(|y| solve(tally.prefer(y, c) - tally.prefer(c, y), unit))
            .min()
            .unwrap_or(1)
    };
    match instance.rule {
        Rule::Borda => {
            let top = others().map(|i| scores[i]).max().unwrap_or(sc);
            solve(top - sc, (m - 1) * unit)
        }
        Rule::Nanson => {
            // m(s(c) + k(m-1)u) >= T + k u m(m-1)/2
            let total: i64 = scores.iter().sum();
            let need = total - m * sc;
            let per_k = unit * m * (m - 1) - unit * m * (m - 1) / 2;
            solve(need, per_k.max(1)).max(condorcet())
        }
        Rule::Baldwin => {
            let low = others().map(|i| scores[i]).min().unwrap_or(sc);
            solve(low - sc, (m - 1) * unit).max(condorcet())
        }
    }
}

/// The five approximation methods, in the conventional column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Heuristic {
    #[serde(rename = "Rev")]
    Reverse,
    #[serde(rename = "LaFit")]
    LargestFit,
    #[serde(rename = "AvFit")]
    AverageFit,
    #[serde(rename = "Elim")]
    Eliminate,
    #[serde(rename = "RevElim")]
    RevEliminate,
}

impl Heuristic {
    pub const ALL: [Heuristic; 5] = [
        Heuristic::Reverse,
        Heuristic::LargestFit,
        Heuristic::AverageFit,
        Heuristic::Eliminate,
        Heuristic::RevEliminate,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Heuristic::Reverse => "Rev",
            Heuristic::LargestFit => "LaFit",
            Heuristic::AverageFit => "AvFit",
            Heuristic::Eliminate => "Elim",
            Heuristic::RevEliminate => "RevElim",
        }
    }

    /// Fit heuristics build a whole coalition for a fixed size `k`.
    pub fn is_fit(self) -> bool {
        matches!(self, Heuristic::LargestFit | Heuristic::AverageFit)
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rev" | "reverse" => Ok(Heuristic::Reverse),
            "lafit" | "largestfit" | "largest-fit" => Ok(Heuristic::LargestFit),
            "avfit" | "avgfit" | "averagefit" | "average-fit" => Ok(Heuristic::AverageFit),
            "elim" | "eliminate" => Ok(Heuristic::Eliminate),
            "revelim" | "reveliminate" | "rev-eliminate" => Ok(Heuristic::RevEliminate),
            _ => Err(Error::Domain(format!("unknown heuristic {s:?}"))),
        }
    }
}
