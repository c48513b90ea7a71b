//! Seeded random profiles: impartial culture and the Pólya-Eggenberger urn.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with `seed_from_u64`, which
//! is portable across platforms and word sizes.
//!
//! The urn starts with one copy of each of the `m!` orders; each drawn order
//! goes back with `a` extra copies. After `k` draws the urn holds `m! + k a`
//! balls, `k a` of them extra copies spread evenly over the previous draws, so
//! the next draw copies a uniformly chosen previous vote with probability
//! `k a / (m! + k a)` and is a fresh uniform order otherwise. That is how it
//! is sampled here; the urn itself is never materialized.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::election::{CandidateSet, LinearOrder, Profile};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Uniform,
    Urn,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Uniform => "uniform",
            Model::Urn => "urn",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Model::Uniform),
            "urn" => Ok(Model::Urn),
            _ => Err(Error::Domain(format!("unknown model {s:?}"))),
        }
    }
}

/// Extra copies returned to the urn with each drawn vote.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UrnA {
    /// `a = m!`, so the second vote repeats the first about half the time.
    #[default]
    Factorial,
    Count(u64),
}

impl FromStr for UrnA {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m!" | "factorial" => Ok(UrnA::Factorial),
            _ => s
                .parse()
                .map(UrnA::Count)
                .map_err(|_| Error::Domain(format!("bad urn parameter {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub model: Model,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub urn_a: UrnA,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 candidates, got {}",
                self.m
            )));
        }
        if self.n < 1 {
            return Err(Error::Domain("need at least one voter".into()));
        }
        Ok(())
    }

    /// Probability that draw number `k + 1` copies an earlier vote.
    pub fn copy_probability(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self.urn_a {
            // k m! / (m! + k m!)
            UrnA::Factorial => k as f64 / (1.0 + k as f64),
            UrnA::Count(0) => 0.0,
            UrnA::Count(a) => {
                let fact = (2..=self.m).fold(1f64, |acc, i| acc * i as f64);
                let extra = k as f64 * a as f64;
                extra / (fact + extra)
            }
        }
    }
}

fn shuffled(m: usize, rng: &mut ChaCha8Rng) -> LinearOrder {
    let mut r: Vec<usize> = (0..m).collect();
    r.shuffle(rng);
    LinearOrder::new_unchecked(r)
}

/// `n` independent uniform linear orders.
pub fn uniform_profile(spec: &GeneratorSpec) -> Result<Profile> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let orders = (0..spec.n).map(|_| shuffled(spec.m, &mut rng)).collect();
    Profile::unweighted(CandidateSet::numbered(spec.m), orders)
}

/// `n` sequential draws from the urn described in the module docs.
pub fn urn_profile(spec: &GeneratorSpec) -> Result<Profile> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut orders: Vec<LinearOrder> = Vec::with_capacity(spec.n);
    for k in 0..spec.n {
        let copy = k > 0 && rng.gen_bool(spec.copy_probability(k));
        let next = if copy {
            orders[rng.gen_range(0..k)].clone()
        } else {
            shuffled(spec.m, &mut rng)
        };
        orders.push(next);
    }
    Profile::unweighted(CandidateSet::numbered(spec.m), orders)
}

pub fn generate(spec: &GeneratorSpec) -> Result<Profile> {
    match spec.model {
        Model::Uniform => uniform_profile(spec),
        Model::Urn => urn_profile(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(model: Model, m: usize, n: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            model,
            m,
            n,
            seed,
            urn_a: UrnA::Factorial,
        }
    }

    #[test]
    fn deterministic_under_seed() {
        for model in [Model::Uniform, Model::Urn] {
            let a = generate(&spec(model, 6, 40, 9)).unwrap();
            let b = generate(&spec(model, 6, 40, 9)).unwrap();
            let c = generate(&spec(model, 6, 40, 10)).unwrap();
            assert_eq!(a.ballots(), b.ballots());
            assert_ne!(a.ballots(), c.ballots());
        }
    }

    #[test]
    fn copy_probability_values() {
        let s = spec(Model::Urn, 3, 2, 0);
        assert_eq!(s.copy_probability(0), 0.0);
        assert!((s.copy_probability(1) - 0.5).abs() < 1e-12);
        let s = GeneratorSpec {
            urn_a: UrnA::Count(6),
            ..s
        };
        assert!((s.copy_probability(2) - 12.0 / 18.0).abs() < 1e-12);
        let huge = GeneratorSpec {
            urn_a: UrnA::Count(0),
            ..s
        };
        assert_eq!(huge.copy_probability(5), 0.0);
    }

    #[test]
    fn rejects_degenerate_specs() {
        assert!(generate(&spec(Model::Uniform, 1, 3, 0)).is_err());
        assert!(generate(&spec(Model::Urn, 3, 0, 0)).is_err());
    }

    #[test]
    fn parses_names() {
        assert_eq!("URN".parse::<Model>().unwrap(), Model::Urn);
        assert_eq!("m!".parse::<UrnA>().unwrap(), UrnA::Factorial);
        assert_eq!("12".parse::<UrnA>().unwrap(), UrnA::Count(12));
        assert!("x".parse::<UrnA>().is_err());
    }
}
