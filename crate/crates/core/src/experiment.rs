//! The two experiment protocols and their outputs.
//!
//! *Small-optimal*: elections with 5 candidates and 5 voters, small enough for
//! the exact oracle. Each cell is the share of elections where a heuristic's
//! coalition is as small as the optimum, with a 95% Wilson interval.
//!
//! *Scaling*: `n = m` voters for `m` in a list of sizes. Each cell is the mean
//! coalition size a heuristic needs, with its standard error.
//!
//! Election `i` of a run uses seed `base_seed + i` for the profile, and a
//! separate ChaCha stream of the same seed for the preferred candidate, so
//! results do not depend on scheduling. Elections where the preferred
//! candidate already wins are recorded as discarded and left out of the
//! tables. With [`Quota::Used`] the run instead keeps drawing until every rule
//! has the requested number of usable elections; size `j` then seeds election
//! `i` with `base_seed + (j << 32) + i`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::election::Profile;
use crate::error::{Error, Result};
use crate::format::serialize_profile;
use crate::generators::{generate, GeneratorSpec, Model, UrnA};
use crate::manipulation::{
    brute_force_optimal_unweighted_with, minimize_manipulators, Heuristic, ManipulationInstance,
    OracleLimits, OracleOutcome,
};
use crate::rules::Rule;
use crate::tally::Tally;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    SmallOptimal,
    Scaling,
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" | "small-optimal" => Ok(Protocol::SmallOptimal),
            "scaling" => Ok(Protocol::Scaling),
            _ => Err(Error::Domain(format!("unknown protocol {s:?}"))),
        }
    }
}

/// How the candidate the manipulators back is picked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreferredPolicy {
    #[default]
    Random,
    Fixed(usize),
}

/// What `elections` counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quota {
    /// Generate exactly `elections` elections per size; discarded ones
    /// shrink the sample.
    #[default]
    Generated,
    /// Keep generating until every rule has `elections` usable elections per
    /// size.
    Used,
}

impl FromStr for Quota {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generated" => Ok(Quota::Generated),
            "used" => Ok(Quota::Used),
            _ => Err(Error::Domain(format!("unknown quota {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub rules: Vec<Rule>,
    pub heuristics: Vec<Heuristic>,
    /// Elections per size, counted as `quota` says.
    pub elections: usize,
    #[serde(default)]
    pub quota: Quota,
    /// Candidate counts.
    pub sizes: Vec<usize>,
    /// Voters per election; `None` means 5 for small-optimal and `m` for
    /// scaling.
    pub voters: Option<usize>,
    pub model: Model,
    pub urn_a: UrnA,
    pub seed: u64,
    pub preferred: PreferredPolicy,
    /// Cap on the oracle's reachable-sum table per coalition size. Instances
    /// that need a bigger table are flagged and excluded.
    pub oracle_max_level_entries: usize,
}

impl ExperimentConfig {
    pub fn small_optimal(model: Model, elections: usize, seed: u64) -> Self {
        ExperimentConfig {
            protocol: Protocol::SmallOptimal,
            rules: Rule::ALL.to_vec(),
            heuristics: Heuristic::ALL.to_vec(),
            elections,
            quota: Quota::Generated,
            sizes: vec![5],
            voters: None,
            model,
            urn_a: UrnA::Factorial,
            seed,
            preferred: PreferredPolicy::Random,
            oracle_max_level_entries: OracleLimits::default().max_level_entries,
        }
    }

    pub fn scaling(model: Model, sizes: Vec<usize>, elections: usize, seed: u64) -> Self {
        ExperimentConfig {
            protocol: Protocol::Scaling,
            sizes,
            ..Self::small_optimal(model, elections, seed)
        }
    }

    pub fn voters_for(&self, m: usize) -> usize {
        self.voters.unwrap_or(match self.protocol {
            Protocol::SmallOptimal => 5,
            Protocol::Scaling => m,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.rules.is_empty() {
            return Err(Error::Domain("no rules selected".into()));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&m| m < 2) {
            return Err(Error::Domain("sizes must be at least 2".into()));
        }
        if let PreferredPolicy::Fixed(c) = self.preferred {
            if let Some(&m) = self.sizes.iter().find(|&&m| c >= m) {
                return Err(Error::Domain(format!(
                    "fixed preferred candidate {c} out of range for {m} candidates"
                )));
            }
        }
        if self.protocol == Protocol::SmallOptimal && self.sizes.iter().any(|&m| m > 8) {
            return Err(Error::Domain(
                "the exact oracle handles at most 8 candidates".into(),
            ));
        }
        Ok(())
    }
}

/// The preferred candidate for an election seeded with `seed`.
pub fn choose_preferred(profile: &Profile, seed: u64, policy: PreferredPolicy) -> usize {
    match policy {
        PreferredPolicy::Fixed(c) => c,
        PreferredPolicy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            rng.gen_range(0..profile.m())
        }
    }
}

/// First 16 bytes of the SHA-256 of the canonical profile text, in hex.
pub fn profile_digest(profile: &Profile) -> String {
    let hash = Sha256::digest(serialize_profile(profile).as_bytes());
    hash[..16]
        .iter()
        .fold(String::with_capacity(32), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicCount {
    pub heuristic: Heuristic,
    /// `None` if the heuristic hit its iteration cap.
    pub manipulators: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub rule: Rule,
    pub m: usize,
    pub n: usize,
    pub election: usize,
    pub seed: u64,
    pub digest: String,
    pub preferred: usize,
    /// The preferred candidate wins without manipulators.
    pub discarded: bool,
    pub counts: Vec<HeuristicCount>,
    /// Exact minimum, small-optimal protocol only.
    pub optimal: Option<usize>,
    /// Reasons to exclude the record from the tables.
    pub flags: Vec<String>,
}

impl InstanceRecord {
    pub fn count(&self, h: Heuristic) -> Option<usize> {
        self.counts
            .iter()
            .find(|c| c.heuristic == h)
            .and_then(|c| c.manipulators)
    }

    /// Counted in the tables.
    pub fn used(&self) -> bool {
        !self.discarded && self.flags.is_empty()
    }
}

/// Runs every election of the configured protocol.
pub fn run_records(config: &ExperimentConfig) -> Result<Vec<InstanceRecord>> {
    config.validate()?;
    if config.quota == Quota::Used {
        let mut out = Vec::new();
        for (si, &m) in config.sizes.iter().enumerate() {
            out.extend(run_until_used(config, si, m)?);
        }
        return Ok(out);
    }
    let jobs: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&m| (0..config.elections).map(move |i| (m, i)))
        .collect();
    let nested: Vec<Vec<InstanceRecord>> = jobs
        .par_iter()
        .enumerate()
        .map(|(global, &(m, i))| run_election(config, m, i, global as u64))
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Give up on reaching the quota after this many elections per quota unit.
const USED_QUOTA_LIMIT: usize = 100;

/// Elections for size index `si` with seeds `base + (si << 32) + i`, in
/// batches, until each rule has `elections` usable records. Each rule keeps
/// the prefix of elections up to its last needed usable one, so the result
/// does not depend on the batch size.
fn run_until_used(config: &ExperimentConfig, si: usize, m: usize) -> Result<Vec<InstanceRecord>> {
    let want = config.elections;
    let limit = want.saturating_mul(USED_QUOTA_LIMIT).max(1000);
    let batch = want.clamp(64, 4096);
    let mut records: Vec<InstanceRecord> = Vec::new();
    let mut used = vec![0usize; config.rules.len()];
    let mut start = 0;
    while start < limit && used.iter().any(|&u| u < want) {
        let end = (start + batch).min(limit);
        let offset = (si as u64) << 32;
        let fresh: Vec<Vec<InstanceRecord>> = (start..end)
            .into_par_iter()
            .map(|i| run_election(config, m, i, offset + i as u64))
            .collect::<Result<_>>()?;
        for r in fresh.into_iter().flatten() {
            let k = config
                .rules
                .iter()
                .position(|&x| x == r.rule)
                .expect("rule");
            if used[k] < want {
                used[k] += usize::from(r.used());
                records.push(r);
            }
        }
        start = end;
    }
    Ok(records)
}

fn run_election(
    config: &ExperimentConfig,
    m: usize,
    election: usize,
    offset: u64,
) -> Result<Vec<InstanceRecord>> {
    let seed = config.seed.wrapping_add(offset);
    let n = config.voters_for(m);
    let profile = generate(&GeneratorSpec {
        model: config.model,
        m,
        n,
        seed,
        urn_a: config.urn_a,
    })?;
    let preferred = choose_preferred(&profile, seed, config.preferred);
    let digest = profile_digest(&profile);
    let tally = Tally::from_profile(&profile);
    let mut out = Vec::with_capacity(config.rules.len());
    for &rule in &config.rules {
        let instance = ManipulationInstance::unweighted(rule, profile.clone(), preferred)?;
        let discarded = rule.winner(&tally, instance.tie_break()) == preferred;
        let mut record = InstanceRecord {
            rule,
            m,
            n,
            election,
            seed,
            digest: digest.clone(),
            preferred,
            discarded,
            counts: Vec::new(),
            optimal: None,
            flags: Vec::new(),
        };
        if !discarded {
            fill_counts(config, &instance, &mut record)?;
        }
        out.push(record);
    }
    Ok(out)
}

fn fill_counts(
    config: &ExperimentConfig,
    instance: &ManipulationInstance,
    record: &mut InstanceRecord,
) -> Result<()> {
    for &h in &config.heuristics {
        let r = minimize_manipulators(instance, h)?;
        let manipulators = r.success.then_some(r.manipulators_used);
        if manipulators.is_none() {
            record
                .flags
                .push(format!("{}: iteration cap", h.short_name()));
        }
        record.counts.push(HeuristicCount {
            heuristic: h,
            manipulators,
        });
    }
    if config.protocol != Protocol::SmallOptimal {
        return Ok(());
    }
    // The smallest heuristic coalition bounds the optimum from above, so the
    // oracle only has to rule out sizes below it. Reverse always runs so the
    // bound exists even when it is not a reported column.
    let mut best = record.counts.iter().filter_map(|c| c.manipulators).min();
    if !config.heuristics.contains(&Heuristic::Reverse) {
        let r = minimize_manipulators(instance, Heuristic::Reverse)?;
        if r.success {
            best = Some(best.map_or(r.manipulators_used, |b| b.min(r.manipulators_used)));
        }
    }
    let Some(best) = best else {
        record.flags.push("no heuristic succeeded".into());
        return Ok(());
    };
    let limits = OracleLimits {
        max_level_entries: config.oracle_max_level_entries,
    };
    match brute_force_optimal_unweighted_with(instance, best.saturating_sub(1), limits)? {
        OracleOutcome::Optimal { k, .. } => record.optimal = Some(k),
        OracleOutcome::NotWithin { .. } => record.optimal = Some(best),
        OracleOutcome::BudgetExceeded { k } => {
            record.flags.push(format!("oracle budget at k = {k}"));
        }
    }
    Ok(())
}

/// One table cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub heuristic: Heuristic,
    /// Percent optimal (small-optimal) or mean coalition size (scaling).
    pub value: Option<f64>,
    /// 95% interval: Wilson for percentages, mean +- 1.96 SE for means.
    pub low: Option<f64>,
    pub high: Option<f64>,
    /// Standard error (scaling only).
    pub se: Option<f64>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub rule: Rule,
    pub m: usize,
    pub elections: usize,
    pub used: usize,
    pub discarded: usize,
    pub flagged: usize,
    pub cells: Vec<Cell>,
}

impl SummaryRow {
    pub fn cell(&self, h: Heuristic) -> Option<&Cell> {
        self.cells.iter().find(|c| c.heuristic == h)
    }

    pub fn value(&self, h: Heuristic) -> Option<f64> {
        self.cell(h).and_then(|c| c.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub protocol: Protocol,
    pub model: Model,
    pub heuristics: Vec<Heuristic>,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn row(&self, rule: Rule, m: usize) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.rule == rule && r.m == m)
    }
}

/// 95% Wilson score interval for `successes` out of `n`, as fractions.
pub fn wilson_interval(successes: usize, n: usize) -> Option<(f64, f64)> {
    if n == 0 {
        return None;
    }
    let z = 1.959_963_984_540_054_f64;
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let denom = 1.0 + z * z / n_f;
    let centre = (p + z * z / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z * z / (4.0 * n_f * n_f)).sqrt() / denom;
    Some(((centre - half).max(0.0), (centre + half).min(1.0)))
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Some((mean, 0.0));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, (var / n).sqrt()))
}

/// Aggregates records into one row per (rule, size), in configuration order.
pub fn summarize(config: &ExperimentConfig, records: &[InstanceRecord]) -> Summary {
    let mut rows = Vec::new();
    for &rule in &config.rules {
        for &m in &config.sizes {
            let group: Vec<&InstanceRecord> = records
                .iter()
                .filter(|r| r.rule == rule && r.m == m)
                .collect();
            let used: Vec<&InstanceRecord> = group.iter().copied().filter(|r| r.used()).collect();
            let cells = config
                .heuristics
                .iter()
                .map(|&h| match config.protocol {
                    Protocol::SmallOptimal => {
                        let hits = used
                            .iter()
                            .filter(|r| r.count(h).is_some() && r.count(h) == r.optimal)
                            .count();
                        let ci = wilson_interval(hits, used.len());
                        Cell {
                            heuristic: h,
                            value: (!used.is_empty())
                                .then(|| 100.0 * hits as f64 / used.len() as f64),
                            low: ci.map(|c| 100.0 * c.0),
                            high: ci.map(|c| 100.0 * c.1),
                            se: None,
                            samples: used.len(),
                        }
                    }
                    Protocol::Scaling => {
                        let xs: Vec<f64> = used
                            .iter()
                            .filter_map(|r| r.count(h))
                            .map(|k| k as f64)
                            .collect();
                        let stats = mean_and_se(&xs);
                        Cell {
                            heuristic: h,
                            value: stats.map(|s| s.0),
                            low: stats.map(|s| s.0 - 1.96 * s.1),
                            high: stats.map(|s| s.0 + 1.96 * s.1),
                            se: stats.map(|s| s.1),
                            samples: xs.len(),
                        }
                    }
                })
                .collect();
            rows.push(SummaryRow {
                rule,
                m,
                elections: group.len(),
                used: used.len(),
                discarded: group.iter().filter(|r| r.discarded).count(),
                flagged: group
                    .iter()
                    .filter(|r| !r.discarded && !r.flags.is_empty())
                    .count(),
                cells,
            });
        }
    }
    Summary {
        protocol: config.protocol,
        model: config.model,
        heuristics: config.heuristics.clone(),
        rows,
    }
}

pub fn run_small_optimal(config: &ExperimentConfig) -> Result<(Vec<InstanceRecord>, Summary)> {
    if config.protocol != Protocol::SmallOptimal {
        return Err(Error::Domain("configuration is not small-optimal".into()));
    }
    let records = run_records(config)?;
    let summary = summarize(config, &records);
    Ok((records, summary))
}

pub fn run_scaling(config: &ExperimentConfig) -> Result<(Vec<InstanceRecord>, Summary)> {
    if config.protocol != Protocol::Scaling {
        return Err(Error::Domain("configuration is not scaling".into()));
    }
    let records = run_records(config)?;
    let summary = summarize(config, &records);
    Ok((records, summary))
}

pub fn run(config: &ExperimentConfig) -> Result<(Vec<InstanceRecord>, Summary)> {
    match config.protocol {
        Protocol::SmallOptimal => run_small_optimal(config),
        Protocol::Scaling => run_scaling(config),
    }
}

fn fmt_opt(x: Option<f64>, decimals: usize) -> String {
    x.map_or_else(String::new, |v| format!("{v:.decimals$}"))
}

/// CSV: `rule,m,<heuristics...>,elections,used,discarded,flagged`, then
/// interval bounds per heuristic.
pub fn summary_csv(summary: &Summary) -> String {
    let names: Vec<&str> = summary.heuristics.iter().map(|h| h.short_name()).collect();
    let mut out = String::from("rule,m");
    for n in &names {
        let _ = write!(out, ",{n}");
    }
    out.push_str(",elections,used,discarded,flagged");
    for n in &names {
        let _ = write!(out, ",{n}_low,{n}_high");
    }
    out.push('\n');
    for row in &summary.rows {
        let _ = write!(out, "{},{}", row.rule, row.m);
        for c in &row.cells {
            let _ = write!(out, ",{}", fmt_opt(c.value, 4));
        }
        let _ = write!(
            out,
            ",{},{},{},{}",
            row.elections, row.used, row.discarded, row.flagged
        );
        for c in &row.cells {
            let _ = write!(out, ",{},{}", fmt_opt(c.low, 4), fmt_opt(c.high, 4));
        }
        out.push('\n');
    }
    out
}

/// Aligned text table, one line per row.
pub fn summary_text(summary: &Summary) -> String {
    let unit = match summary.protocol {
        Protocol::SmallOptimal => "percent of elections where the heuristic is optimal",
        Protocol::Scaling => "mean manipulators (standard error)",
    };
    let mut out = format!(
        "{} / {}: {unit}\n",
        protocol_name(summary.protocol),
        summary.model
    );
    let _ = write!(out, "{:<8} {:>4}", "rule", "m");
    for h in &summary.heuristics {
        let _ = write!(out, " {:>16}", h.short_name());
    }
    out.push_str("     used  discarded  flagged\n");
    for row in &summary.rows {
        let _ = write!(out, "{:<8} {:>4}", row.rule.name(), row.m);
        for c in &row.cells {
            let text = match (summary.protocol, c.value) {
                (_, None) => "-".to_string(),
                (Protocol::SmallOptimal, Some(v)) => format!(
                    "{v:.1} [{:.1},{:.1}]",
                    c.low.unwrap_or(v),
                    c.high.unwrap_or(v)
                ),
                (Protocol::Scaling, Some(v)) => format!("{v:.2} ({:.2})", c.se.unwrap_or(0.0)),
            };
            let _ = write!(out, " {text:>16}");
        }
        let _ = writeln!(
            out,
            " {:>8} {:>10} {:>8}",
            row.used, row.discarded, row.flagged
        );
    }
    out
}

fn protocol_name(p: Protocol) -> &'static str {
    match p {
        Protocol::SmallOptimal => "small-optimal",
        Protocol::Scaling => "scaling",
    }
}

/// Writes `summary.csv`, `summary.txt`, `records.jsonl` and `config.json`
/// into `dir`, creating it if needed.
pub fn emit_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    records: &[InstanceRecord],
    summary: &Summary,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("summary.csv"), summary_csv(summary))?;
    fs::write(dir.join("summary.txt"), summary_text(summary))?;
    let mut jsonl = String::new();
    for r in records {
        jsonl.push_str(&serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?);
        jsonl.push('\n');
    }
    fs::write(dir.join("records.jsonl"), jsonl)?;
    let config_json = serde_json::to_string_pretty(config).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("config.json"), config_json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        let (lo, hi) = wilson_interval(50, 100).unwrap();
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 10).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-3);
        assert!(wilson_interval(0, 0).is_none());
    }

    #[test]
    fn mean_se() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m, 2.5);
        assert!((se - 0.645_497).abs() < 1e-5);
        assert!(mean_and_se(&[]).is_none());
    }

    #[test]
    fn zero_elections_is_empty() {
        let cfg = ExperimentConfig::small_optimal(Model::Uniform, 0, 1);
        let (records, summary) = run(&cfg).unwrap();
        assert!(records.is_empty());
        for row in &summary.rows {
            assert_eq!(row.used, 0);
            assert!(row.cells.iter().all(|c| c.value.is_none()));
        }
        assert!(summary_csv(&summary).starts_with("rule,m,Rev,LaFit,AvFit,Elim,RevElim,"));
    }

    #[test]
    fn fixed_policy() {
        let p = generate(&GeneratorSpec {
            model: Model::Uniform,
            m: 5,
            n: 5,
            seed: 3,
            urn_a: UrnA::Factorial,
        })
        .unwrap();
        for s in 0..20 {
            assert_eq!(choose_preferred(&p, s, PreferredPolicy::Fixed(0)), 0);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::small_optimal(Model::Uniform, 1, 1);
        cfg.sizes = vec![9];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::scaling(Model::Urn, vec![4], 1, 1);
        cfg.preferred = PreferredPolicy::Fixed(4);
        assert!(cfg.validate().is_err());
        cfg.rules.clear();
        assert!(cfg.validate().is_err());
    }
}
