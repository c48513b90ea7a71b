//! Borda, Baldwin and Nanson winners with elimination traces.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::election::{CandidateSet, Profile};
use crate::error::{Error, Result};
use crate::tally::Tally;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Borda,
    Nanson,
    Baldwin,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Baldwin, Rule::Nanson, Rule::Borda];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Borda => "borda",
            Rule::Nanson => "nanson",
            Rule::Baldwin => "baldwin",
        }
    }

    /// Winner without building a trace.
    pub fn winner(self, tally: &Tally, tie: TieBreak) -> usize {
        let mut buf = Buffers::new(tally.m());
        self.winner_with(tally, tie, &mut buf)
    }

    /// Winner reusing caller-provided scratch space.
    pub fn winner_with(self, tally: &Tally, tie: TieBreak, buf: &mut Buffers) -> usize {
        let noop = |_: &[bool], _: &[i64], _: &[usize]| {};
        match self {
            Rule::Borda => borda_core(tally, tie, buf, noop),
            Rule::Nanson => nanson_core(tally, tie, buf, noop),
            Rule::Baldwin => baldwin_core(tally, tie, buf, noop),
        }
    }

    pub fn run(self, tally: &Tally, tie: TieBreak) -> EliminationTrace {
        let m = tally.m();
        let mut buf = Buffers::new(m);
        let mut rounds = Vec::new();
        let record = |alive: &[bool], scores: &[i64], eliminated: &[usize]| {
            let survivors: Vec<usize> = (0..m).filter(|&c| alive[c]).collect();
            rounds.push(Round {
                scores: survivors.iter().map(|&c| scores[c]).collect(),
                survivors,
                eliminated: eliminated.to_vec(),
            });
        };
        let winner = match self {
            Rule::Borda => borda_core(tally, tie, &mut buf, record),
            Rule::Nanson => nanson_core(tally, tie, &mut buf, record),
            Rule::Baldwin => baldwin_core(tally, tie, &mut buf, record),
        };
        EliminationTrace {
            rule: self,
            rounds,
            winner,
            scale: tally.scale(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "borda" => Ok(Rule::Borda),
            "nanson" => Ok(Rule::Nanson),
            "baldwin" => Ok(Rule::Baldwin),
            _ => Err(Error::Domain(format!("unknown rule {s:?}"))),
        }
    }
}

/// How ties are resolved. `Favor(c)` moves `c` to the front of the fixed
/// index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum TieBreak {
    #[default]
    FixedOrder,
    Favor(usize),
}

impl TieBreak {
    /// Position in the effective tie-break order; lower is preferred.
    #[inline]
    pub fn rank(self, c: usize) -> usize {
        match self {
            TieBreak::FixedOrder => c,
            TieBreak::Favor(p) if c == p => 0,
            TieBreak::Favor(_) => c + 1,
        }
    }

    #[inline]
    pub fn prefers(self, a: usize, b: usize) -> bool {
        self.rank(a) < self.rank(b)
    }
}

/// Scratch space for the elimination loops.
#[derive(Clone, Debug)]
pub struct Buffers {
    alive: Vec<bool>,
    scores: Vec<i64>,
    eliminated: Vec<usize>,
}

impl Buffers {
    pub fn new(m: usize) -> Self {
        Buffers {
            alive: vec![true; m],
            scores: vec![0; m],
            eliminated: Vec::with_capacity(m),
        }
    }

    fn reset(&mut self, tally: &Tally) {
        let m = tally.m();
        self.alive.clear();
        self.alive.resize(m, true);
        self.scores.clear();
        let raw = tally.raw();
        self.scores
            .extend((0..m).map(|x| raw[x * m..(x + 1) * m].iter().sum::<i64>()));
        self.eliminated.clear();
    }
}

fn borda_core<F>(tally: &Tally, tie: TieBreak, buf: &mut Buffers, mut record: F) -> usize
where
    F: FnMut(&[bool], &[i64], &[usize]),
{
    buf.reset(tally);
    let m = tally.m();
    let mut best = 0;
    for c in 1..m {
        let (s, b) = (buf.scores[c], buf.scores[best]);
        if s > b || (s == b && tie.prefers(c, best)) {
            best = c;
        }
    }
    buf.eliminated.extend((0..m).filter(|&c| c != best));
    record(&buf.alive, &buf.scores, &buf.eliminated);
    best
}

fn baldwin_core<F>(tally: &Tally, tie: TieBreak, buf: &mut Buffers, mut record: F) -> usize
where
    F: FnMut(&[bool], &[i64], &[usize]),
{
    buf.reset(tally);
    let m = tally.m();
    let raw = tally.raw();
    let mut remaining = m;
    while remaining > 1 {
        // Lowest score goes; on a tie the candidate last in tie-break order goes.
        let mut loser = usize::MAX;
        for c in 0..m {
            if !buf.alive[c] {
                continue;
            }
            if loser == usize::MAX {
                loser = c;
                continue;
            }
            let (s, l) = (buf.scores[c], buf.scores[loser]);
            if s < l || (s == l && tie.prefers(loser, c)) {
                loser = c;
            }
        }
        buf.eliminated.clear();
        buf.eliminated.push(loser);
        record(&buf.alive, &buf.scores, &buf.eliminated);
        buf.alive[loser] = false;
        remaining -= 1;
        for c in 0..m {
            if buf.alive[c] {
                buf.scores[c] -= raw[c * m + loser];
            }
        }
    }
    (0..m).find(|&c| buf.alive[c]).expect("one survivor")
}

fn nanson_core<F>(tally: &Tally, tie: TieBreak, buf: &mut Buffers, mut record: F) -> usize
where
    F: FnMut(&[bool], &[i64], &[usize]),
{
    buf.reset(tally);
    let m = tally.m();
    let raw = tally.raw();
    let mut remaining = m;
    loop {
        if remaining == 1 {
            return (0..m).find(|&c| buf.alive[c]).expect("one survivor");
        }
        let total: i128 = (0..m)
            .filter(|&c| buf.alive[c])
            .map(|c| buf.scores[c] as i128)
            .sum();
        let count = remaining as i128;
        buf.eliminated.clear();
        for c in 0..m {
            // Strictly below the average: score * count < total.
            if buf.alive[c] && (buf.scores[c] as i128) * count < total {
                buf.eliminated.push(c);
            }
        }
        record(&buf.alive, &buf.scores, &buf.eliminated);
        if buf.eliminated.is_empty() {
            // Everyone sits exactly at the average.
            return (0..m)
                .filter(|&c| buf.alive[c])
                .min_by_key(|&c| tie.rank(c))
                .expect("nonempty");
        }
        for &e in &buf.eliminated {
            buf.alive[e] = false;
        }
        remaining -= buf.eliminated.len();
        for c in 0..m {
            if buf.alive[c] {
                let lost: i64 = buf.eliminated.iter().map(|&e| raw[c * m + e]).sum();
                buf.scores[c] -= lost;
            }
        }
    }
}

/// One elimination round: the candidates still standing, their Borda scores
/// on the restricted profile (scaled, aligned with `survivors`), and who left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub survivors: Vec<usize>,
    pub scores: Vec<i64>,
    pub eliminated: Vec<usize>,
}

impl Round {
    pub fn score_of(&self, c: usize) -> Option<i64> {
        self.survivors
            .iter()
            .position(|&s| s == c)
            .map(|i| self.scores[i])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTrace {
    pub rule: Rule,
    pub rounds: Vec<Round>,
    pub winner: usize,
    /// Scores in `rounds` are multiplied by this common denominator.
    pub scale: i64,
}

impl EliminationTrace {
    pub fn score(&self, round: usize, c: usize) -> Option<Ratio<i64>> {
        self.rounds[round]
            .score_of(c)
            .map(|s| Ratio::new(s, self.scale))
    }

    pub fn average(&self, round: usize) -> Ratio<i64> {
        let r = &self.rounds[round];
        let total: i64 = r.scores.iter().sum();
        Ratio::new(total, self.scale * r.survivors.len() as i64)
    }

    /// Candidates in the order they left; the winner comes last.
    pub fn elimination_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self
            .rounds
            .iter()
            .flat_map(|r| r.eliminated.iter().copied())
            .collect();
        if let Some(last) = self.rounds.last() {
            // Survivors of a final all-tied Nanson round, winner last.
            if last.eliminated.is_empty() {
                order.extend(last.survivors.iter().copied().filter(|&c| c != self.winner));
            }
        }
        order.push(self.winner);
        order
    }

    pub fn view(&self, candidates: &CandidateSet) -> TraceView {
        TraceView {
            rule: self.rule,
            winner: candidates.name(self.winner).to_string(),
            rounds: self
                .rounds
                .iter()
                .enumerate()
                .map(|(i, r)| RoundView {
                    survivors: r
                        .survivors
                        .iter()
                        .map(|&c| candidates.name(c).to_string())
                        .collect(),
                    scores: r
                        .scores
                        .iter()
                        .map(|&s| Ratio::new(s, self.scale).to_string())
                        .collect(),
                    average: self.average(i).to_string(),
                    eliminated: r
                        .eliminated
                        .iter()
                        .map(|&c| candidates.name(c).to_string())
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Serializable trace with candidate names and exact rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceView {
    pub rule: Rule,
    pub winner: String,
    pub rounds: Vec<RoundView>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundView {
    pub survivors: Vec<String>,
    pub scores: Vec<String>,
    pub average: String,
    pub eliminated: Vec<String>,
}

pub fn borda_winner(profile: &Profile, tie: TieBreak) -> usize {
    Rule::Borda.winner(&Tally::from_profile(profile), tie)
}

pub fn baldwin_winner(profile: &Profile, tie: TieBreak) -> (usize, EliminationTrace) {
    let trace = Rule::Baldwin.run(&Tally::from_profile(profile), tie);
    (trace.winner, trace)
}

pub fn nanson_winner(profile: &Profile, tie: TieBreak) -> (usize, EliminationTrace) {
    let trace = Rule::Nanson.run(&Tally::from_profile(profile), tie);
    (trace.winner, trace)
}

pub fn reversal(profile: &Profile) -> Profile {
    profile.reversal()
}
