//! Plain-text profile format.
//!
//! ```text
//! # comment
//! candidates: a,b,c
//! 3: a>b>c
//! 1/2: c>b>a
//! ```
//!
//! The first non-comment line lists the candidates in tie-break order. Every
//! other non-empty line is `<weight>: <ranking>` where the weight is a positive
//! integer or a `p/q` rational.

use std::fmt::Write as _;

use num_traits::{One, Signed};

use crate::election::{CandidateSet, LinearOrder, Profile, Weight, WeightedBallot};
use crate::error::{Error, Result};

pub fn parse_profile(text: &str) -> Result<Profile> {
    let mut candidates: Option<CandidateSet> = None;
    let mut ballots = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected `<key>: <value>`, got {line:?}")))?;
        let head = head.trim();
        let rest = rest.trim();
        match &candidates {
            None => {
                if head != "candidates" {
                    return Err(err("first line must be `candidates: ...`".into()));
                }
                let names: Vec<&str> = rest.split(',').map(str::trim).collect();
                candidates = Some(CandidateSet::new(names).map_err(|e| err(e.to_string()))?);
            }
            Some(cands) => {
                let weight = parse_weight(head).map_err(err)?;
                let mut ranking = Vec::with_capacity(cands.len());
                for name in rest.split('>').map(str::trim) {
                    let idx = cands
                        .index_of(name)
                        .ok_or_else(|| err(format!("unknown candidate {name:?}")))?;
                    ranking.push(idx);
                }
                if ranking.len() != cands.len() {
                    return Err(err(format!(
                        "ballot ranks {} candidates, expected {}",
                        ranking.len(),
                        cands.len()
                    )));
                }
                let order = LinearOrder::new(ranking)
                    .map_err(|_| err("ballot is not a permutation of the candidates".into()))?;
                ballots.push(WeightedBallot { order, weight });
            }
        }
    }
    let candidates = candidates.ok_or(Error::Parse {
        line: 0,
        message: "missing `candidates:` line".into(),
    })?;
    Profile::new(candidates, ballots)
}

fn parse_weight(text: &str) -> std::result::Result<Weight, String> {
    let bad = || format!("invalid weight {text:?}");
    let weight = match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Weight::new(p, q)
        }
        None => Weight::from_integer(text.parse().map_err(|_| bad())?),
    };
    if !weight.is_positive() {
        return Err(format!("weight {text} is not positive"));
    }
    Ok(weight)
}

pub fn serialize_profile(profile: &Profile) -> String {
    let cands = profile.candidates();
    let mut out = format!("candidates: {}\n", cands.names().join(","));
    for ballot in profile.ballots() {
        let _ = writeln!(
            out,
            "{}: {}",
            format_weight(ballot.weight),
            ballot.order.display(cands)
        );
    }
    out
}

pub fn format_weight(w: Weight) -> String {
    if w.denom().is_one() {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}
