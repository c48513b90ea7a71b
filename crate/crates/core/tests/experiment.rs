use std::fs;

use elimvote::experiment::{
    choose_preferred, emit_outputs, run, ExperimentConfig, PreferredPolicy, Protocol, Quota,
};
use elimvote::generators::{generate, GeneratorSpec, Model, UrnA};
use elimvote::manipulation::Heuristic;
use elimvote::Rule;

fn small(model: Model, elections: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::small_optimal(model, elections, seed)
}

#[test]
fn optimum_never_exceeds_a_heuristic() {
    let cfg = small(Model::Uniform, 300, 17);
    let (records, _) = run(&cfg).unwrap();
    assert_eq!(records.len(), 300 * 3);
    for r in records.iter().filter(|r| r.used()) {
        let opt = r.optimal.expect("optimum on every used record");
        assert!(opt >= 1);
        for h in Heuristic::ALL {
            let k = r.count(h).expect("no caps hit at this size");
            assert!(opt <= k, "{r:?}");
        }
        if r.rule == Rule::Borda {
            assert!(r.count(Heuristic::Reverse).unwrap() <= opt + 1);
        }
    }
}

#[test]
fn discard_rate_is_near_one_fifth() {
    let cfg = ExperimentConfig {
        rules: vec![Rule::Baldwin],
        ..small(Model::Uniform, 1000, 3)
    };
    let (records, summary) = run(&cfg).unwrap();
    let discarded = records.iter().filter(|r| r.discarded).count();
    let rate = discarded as f64 / records.len() as f64;
    assert!((0.10..=0.35).contains(&rate), "{rate}");
    assert_eq!(summary.rows[0].discarded, discarded);
    // Discarded means the preferred candidate already wins.
    assert!(records
        .iter()
        .filter(|r| r.discarded)
        .all(|r| r.optimal == Some(0) || r.optimal.is_none()));
}

#[test]
fn preferred_candidate_is_uniform() {
    let spec = GeneratorSpec {
        model: Model::Uniform,
        m: 5,
        n: 5,
        seed: 0,
        urn_a: UrnA::Factorial,
    };
    let p = generate(&spec).unwrap();
    let mut hits = [0usize; 5];
    for seed in 0..10_000 {
        hits[choose_preferred(&p, seed, PreferredPolicy::Random)] += 1;
    }
    for h in hits {
        assert!((h as f64 / 10_000.0 - 0.2).abs() < 0.02, "{hits:?}");
    }
    assert_eq!(choose_preferred(&p, 9, PreferredPolicy::Fixed(0)), 0);
}

#[test]
fn fixed_policy_backs_the_first_candidate() {
    let cfg = ExperimentConfig {
        preferred: PreferredPolicy::Fixed(0),
        ..small(Model::Urn, 40, 5)
    };
    let (records, _) = run(&cfg).unwrap();
    assert!(records.iter().all(|r| r.preferred == 0));
}

#[test]
fn serial_and_parallel_runs_agree() {
    let cfg = ExperimentConfig::scaling(Model::Urn, vec![4, 8, 16], 30, 99);
    let (par_records, par_summary) = run(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let (ser_records, ser_summary) = pool.install(|| run(&cfg)).unwrap();
    assert_eq!(par_records, ser_records);
    assert_eq!(par_summary, ser_summary);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cfg = small(Model::Uniform, 60, 8);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let (records, summary) = run(&cfg).unwrap();
        emit_outputs(d.path(), &cfg, &records, &summary).unwrap();
    }
    for name in ["summary.csv", "summary.txt", "records.jsonl", "config.json"] {
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        let b = fs::read(dirs[1].path().join(name)).unwrap();
        assert!(!a.is_empty(), "{name}");
        assert_eq!(a, b, "{name}");
    }

    let csv = fs::read_to_string(dirs[0].path().join("summary.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("rule,m,Rev,LaFit,AvFit,Elim,RevElim,"));
    assert_eq!(csv.lines().count(), 1 + 3);

    let jsonl = fs::read_to_string(dirs[0].path().join("records.jsonl")).unwrap();
    let lines: Vec<&str> = jsonl.lines().collect();
    // One line per election and rule, discarded ones included.
    assert_eq!(lines.len(), 60 * 3);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["digest"].as_str().unwrap().len() == 32);
    }
    let config: ExperimentConfig =
        serde_json::from_str(&fs::read_to_string(dirs[0].path().join("config.json")).unwrap())
            .unwrap();
    assert_eq!(config, cfg);
}

#[test]
fn disabled_heuristics_give_empty_columns() {
    let cfg = ExperimentConfig {
        heuristics: Vec::new(),
        rules: vec![Rule::Baldwin],
        ..ExperimentConfig::scaling(Model::Uniform, vec![4], 20, 1)
    };
    let (records, summary) = run(&cfg).unwrap();
    assert_eq!(records.len(), 20);
    assert!(summary.rows.iter().all(|r| r.cells.is_empty()));
}

#[test]
fn scaling_means_respect_small_sizes() {
    let cfg = ExperimentConfig::scaling(Model::Uniform, vec![4], 100, 4);
    assert_eq!(cfg.protocol, Protocol::Scaling);
    let (records, summary) = run(&cfg).unwrap();
    for r in records.iter().filter(|r| r.used()) {
        assert!(r.optimal.is_none());
        assert!(Heuristic::ALL.iter().all(|&h| r.count(h).unwrap() >= 1));
    }
    for row in &summary.rows {
        for c in &row.cells {
            let (v, lo, hi) = (c.value.unwrap(), c.low.unwrap(), c.high.unwrap());
            assert!(lo <= v && v <= hi && v >= 1.0);
        }
    }
}

#[test]
fn small_protocol_rejects_large_elections() {
    let cfg = ExperimentConfig {
        sizes: vec![9],
        ..small(Model::Uniform, 1, 1)
    };
    assert!(run(&cfg).is_err());
}

#[test]
fn used_quota_fills_every_row() {
    let cfg = ExperimentConfig {
        quota: Quota::Used,
        ..ExperimentConfig::scaling(Model::Uniform, vec![4, 6], 50, 12)
    };
    let (records, summary) = run(&cfg).unwrap();
    for row in &summary.rows {
        assert_eq!(row.used, 50, "{row:?}");
    }
    // Each rule stops at its own fiftieth usable election.
    assert!(records.iter().filter(|r| r.used()).count() == 50 * 2 * cfg.rules.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let (serial, _) = pool.install(|| run(&cfg)).unwrap();
    assert_eq!(records, serial);
    assert_eq!("used".parse::<Quota>().unwrap(), Quota::Used);
    assert!("some".parse::<Quota>().is_err());
}
