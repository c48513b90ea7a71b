//! `elimvote`: evaluate Borda, Nanson and Baldwin elections, manipulate them,
//! build reduction instances, generate profiles and run experiments.
//!
//! Exit codes: 0 on success, 1 when a manipulation is infeasible or a
//! `--check` fails, 2 on bad usage or unreadable input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use elimvote::experiment::{self, ExperimentConfig, PreferredPolicy, Protocol, Quota};
use elimvote::format::{format_weight, parse_profile, serialize_profile};
use elimvote::generators::{generate, GeneratorSpec, Model, UrnA};
use elimvote::manipulation::{
    brute_force_optimal_unweighted, brute_force_weighted, evaluate, minimize_manipulators,
    nanson_weighted_3cand, Budget, Heuristic, ManipulationInstance, OracleOutcome,
};
use elimvote::reductions::{
    partition_solve, partition_to_nanson, partition_witness, pathology_upper_bound_ballots,
    reverse_pathology_instance, x3c_solve_small, x3c_to_baldwin, x3c_witness_vote, IdentityReport,
    PartitionInstance, X3CInstance,
};
use elimvote::rules::TieBreak;
use elimvote::{LinearOrder, Profile, Rule, Weight};

#[derive(Parser)]
#[command(
    name = "elimvote",
    version,
    about = "Elimination-rule elections and their manipulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the winner and elimination trace of a profile.
    Eval(EvalArgs),
    /// Run one heuristic and print the coalition it finds.
    Manipulate(ManipulateArgs),
    /// Exact minimum coalition (unweighted) or exact feasibility (weighted).
    Optimal(OptimalArgs),
    /// Build a reduction instance.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Draw a random profile.
    Generate(GenerateArgs),
    /// Run an experiment protocol and write its tables.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    rule: Rule,
    #[arg(long)]
    profile: PathBuf,
    /// Break ties in this candidate's favour instead of by listing order.
    #[arg(long)]
    favor: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ManipulateArgs {
    #[arg(long)]
    rule: Rule,
    #[arg(long)]
    heuristic: Heuristic,
    #[arg(long)]
    profile: PathBuf,
    /// Candidate the coalition wants to win.
    #[arg(long)]
    prefer: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OptimalArgs {
    #[arg(long)]
    rule: Rule,
    #[arg(long)]
    profile: PathBuf,
    #[arg(long)]
    prefer: String,
    /// Largest coalition to try (unweighted). Defaults to the Reverse count.
    #[arg(long)]
    max_k: Option<usize>,
    /// Comma-separated manipulator weights; switches to the weighted problem.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<String>>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReduceOutput {
    /// Exit 1 unless every identity holds.
    #[arg(long)]
    check: bool,
    /// Write the profile here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the identity report as JSON here.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Print one JSON object with profile, report and witness.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Exact 3-cover to single-manipulator Baldwin.
    X3c {
        /// JSON `{"q": 6, "sets": [[1,2,3],[4,5,6]]}`.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: ReduceOutput,
    },
    /// PARTITION to weighted Nanson with four candidates.
    Partition {
        /// JSON `{"values": [1, 2, 3]}`.
        #[arg(long, conflicts_with = "values")]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<u64>>,
        #[command(flatten)]
        output: ReduceOutput,
    },
    /// Baldwin family where Reverse overshoots the optimum.
    Pathology {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: ReduceOutput,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    model: Model,
    #[arg(long)]
    candidates: usize,
    #[arg(long)]
    voters: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Urn reinforcement: an integer or `m!` (default).
    #[arg(long, default_value = "m!")]
    urn_a: UrnA,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    protocol: Protocol,
    /// Rules to include (repeatable); all three by default.
    #[arg(long)]
    rule: Vec<Rule>,
    /// Heuristics to include (repeatable); all five by default.
    #[arg(long)]
    heuristic: Vec<Heuristic>,
    #[arg(long)]
    model: Model,
    /// Elections per size.
    #[arg(long)]
    elections: usize,
    /// `generated` counts every election; `used` keeps drawing until each
    /// rule has that many elections the preferred candidate does not
    /// already win.
    #[arg(long, default_value = "generated")]
    count: Quota,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Candidate counts; defaults to 5 (small) or 4,8,...,128 (scaling).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    voters: Option<usize>,
    /// `random` or a fixed candidate index.
    #[arg(long, default_value = "random")]
    preferred: String,
    #[arg(long, default_value = "m!")]
    urn_a: UrnA,
    /// Print the summary as JSON instead of the aligned table.
    #[arg(long)]
    json: bool,
}

enum Failure {
    /// Exit 1.
    Negative(String),
    /// Exit 2.
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

// A closed stdout (say, piped into `head`) ends the program quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        if write!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => eval(a),
        Command::Manipulate(a) => manipulate(a),
        Command::Optimal(a) => optimal(a),
        Command::Reduce(r) => reduce(r),
        Command::Generate(a) => generate_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_profile(path: &Path) -> Result<Profile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_profile(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> Outcome {
    outln!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn seed_or_auto(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn eval(a: EvalArgs) -> Outcome {
    let profile = read_profile(&a.profile)?;
    let tie = match &a.favor {
        Some(name) => TieBreak::Favor(profile.candidate(name)?),
        None => TieBreak::FixedOrder,
    };
    let tally = elimvote::tally::Tally::from_profile(&profile);
    let trace = a.rule.run(&tally, tie);
    let view = trace.view(profile.candidates());
    if a.json {
        print_json(&view)
    } else {
        outln!("{}", view.winner);
        outln!("{}", serde_json::to_string(&view)?);
        Ok(())
    }
}

fn manipulate(a: ManipulateArgs) -> Outcome {
    let profile = read_profile(&a.profile)?;
    let c = profile.candidate(&a.prefer)?;
    let instance = ManipulationInstance::unweighted(a.rule, profile, c)?;
    let result = minimize_manipulators(&instance, a.heuristic)?;
    let view = result.witness(&instance);
    if a.json {
        print_json(&view)?;
    } else {
        outln!("manipulators: {}", view.manipulators_used);
        for b in &view.ballots {
            outln!("{b}");
        }
        outln!("winner: {}", view.trace.winner);
    }
    if result.success {
        Ok(())
    } else {
        Err(Failure::Negative(format!(
            "{} hit its iteration cap without making {} win",
            a.heuristic, a.prefer
        )))
    }
}

fn parse_weights(raw: &[String]) -> Result<Vec<Weight>, Failure> {
    raw.iter()
        .map(|w| {
            let text = format!("candidates: x\n{w}: x\n");
            let p =
                parse_profile(&text).map_err(|_| Failure::Usage(format!("bad weight {w:?}")))?;
            Ok(p.ballots()[0].weight)
        })
        .collect()
}

fn optimal(a: OptimalArgs) -> Outcome {
    let profile = read_profile(&a.profile)?;
    let c = profile.candidate(&a.prefer)?;
    let names = profile.candidates().clone();
    let show = |ballots: &[LinearOrder]| -> Vec<String> {
        ballots
            .iter()
            .map(|b| b.display(&names).to_string())
            .collect()
    };
    if let Some(raw) = &a.weights {
        let weights = parse_weights(raw)?;
        let instance =
            ManipulationInstance::new(a.rule, profile, c, Budget::Weights(weights.clone()))?;
        let found = if a.rule == Rule::Nanson && instance.m() <= 3 {
            nanson_weighted_3cand(&instance)?
        } else {
            brute_force_weighted(&instance)?
        };
        let report = json!({
            "feasible": found.is_some(),
            "weights": weights.iter().map(|w| format_weight(*w)).collect::<Vec<_>>(),
            "ballots": found.as_deref().map(show),
        });
        if a.json {
            print_json(&report)?;
        } else {
            outln!("feasible: {}", found.is_some());
            for b in found.as_deref().map(show).unwrap_or_default() {
                outln!("{b}");
            }
        }
        return if found.is_some() {
            Ok(())
        } else {
            Err(Failure::Negative(String::new()))
        };
    }
    let instance = ManipulationInstance::unweighted(a.rule, profile, c)?;
    let k_max = match a.max_k {
        Some(k) => k,
        None => {
            let rev = minimize_manipulators(&instance, Heuristic::Reverse)?;
            if !rev.success {
                return Err(Failure::Usage(
                    "Reverse found no coalition; pass --max-k".into(),
                ));
            }
            rev.manipulators_used
        }
    };
    let outcome = brute_force_optimal_unweighted(&instance, k_max)?;
    let (k, ballots, status) = match &outcome {
        OracleOutcome::Optimal { k, ballots } => (Some(*k), Some(show(ballots)), "optimal"),
        OracleOutcome::NotWithin { .. } => (None, None, "not-within"),
        OracleOutcome::BudgetExceeded { .. } => (None, None, "budget-exceeded"),
    };
    if a.json {
        print_json(&json!({"status": status, "k_max": k_max, "optimal": k, "ballots": ballots}))?;
    } else {
        match k {
            Some(k) => outln!("optimal: {k}"),
            None => outln!("{status} (k_max = {k_max})"),
        }
        for b in ballots.unwrap_or_default() {
            outln!("{b}");
        }
    }
    match outcome {
        OracleOutcome::Optimal { .. } => Ok(()),
        OracleOutcome::NotWithin { .. } => Err(Failure::Negative(String::new())),
        OracleOutcome::BudgetExceeded { k } => {
            Err(Failure::Usage(format!("search table too large at k = {k}")))
        }
    }
}

struct Built {
    instance: ManipulationInstance,
    report: IdentityReport,
    witness: Option<Vec<LinearOrder>>,
}

fn reduce(cmd: ReduceCommand) -> Outcome {
    let (built, output) = match cmd {
        ReduceCommand::X3c { input, output } => {
            let text = fs::read_to_string(&input)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
            let x3c: X3CInstance = serde_json::from_str(&text)?;
            let red = x3c_to_baldwin(&x3c)?;
            let witness = match x3c_solve_small(&x3c) {
                Some(cover) => Some(vec![x3c_witness_vote(&x3c, &cover)?]),
                None => None,
            };
            (
                Built {
                    instance: red.instance,
                    report: red.report,
                    witness,
                },
                output,
            )
        }
        ReduceCommand::Partition {
            input,
            values,
            output,
        } => {
            let p: PartitionInstance = match (input, values) {
                (Some(path), None) => {
                    let text = fs::read_to_string(&path).map_err(|e| {
                        Failure::Usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    serde_json::from_str(&text)?
                }
                (None, Some(vs)) => PartitionInstance::new(vs)?,
                _ => return Err(Failure::Usage("give --input or --values".into())),
            };
            let red = partition_to_nanson(&p)?;
            let witness = match partition_solve(&p) {
                Some(side) => Some(partition_witness(&p, &side)?),
                None => None,
            };
            (
                Built {
                    instance: red.instance,
                    report: red.report,
                    witness,
                },
                output,
            )
        }
        ReduceCommand::Pathology { n, output } => {
            let red = reverse_pathology_instance(n)?;
            (
                Built {
                    instance: red.instance,
                    report: red.report,
                    witness: Some(pathology_upper_bound_ballots(n)),
                },
                output,
            )
        }
    };
    emit_reduction(&built, &output)
}

fn emit_reduction(built: &Built, out: &ReduceOutput) -> Outcome {
    let inst = &built.instance;
    let names = inst.base.candidates();
    let profile_text = serialize_profile(&inst.base);
    let witness_holds = match &built.witness {
        Some(w) => Some(evaluate(inst, w)?),
        None => None,
    };
    let manipulators = match &inst.budget {
        Budget::Weights(ws) => {
            json!({"weights": ws.iter().map(|w| format_weight(*w)).collect::<Vec<_>>()})
        }
        Budget::Unweighted(k) => json!({"count": k}),
    };
    let sidecar = json!({
        "rule": inst.rule,
        "preferred": names.name(inst.preferred),
        "manipulators": manipulators,
        "identities": built.report.identities,
        "identities_hold": built.report.all_hold(),
        "bounds": built.report.bounds,
        "witness_available": built.report.witness_available,
        "witness_wins": witness_holds,
        "witness": built.witness.as_ref().map(|w| w.iter().map(|b| b.display(names).to_string()).collect::<Vec<_>>()),
    });
    if let Some(path) = &out.sidecar {
        fs::write(path, serde_json::to_string_pretty(&sidecar)? + "\n")?;
    }
    if let Some(path) = &out.out {
        fs::write(path, &profile_text)?;
    }
    if out.json {
        let mut all = sidecar.clone();
        all["profile"] = json!(profile_text);
        print_json(&all)?;
    } else if out.out.is_none() {
        out!("{profile_text}");
    }
    for failure in built.report.failures() {
        eprintln!(
            "identity failed: {} (expected {}, got {})",
            failure.name, failure.expected, failure.actual
        );
    }
    for bound in built.report.bound_failures() {
        eprintln!("note: intermediate bound does not hold: {}", bound.name);
    }
    if witness_holds == Some(false) {
        eprintln!("witness does not make {} win", names.name(inst.preferred));
    }
    if out.check && (!built.report.all_hold() || witness_holds == Some(false)) {
        return Err(Failure::Negative("check failed".into()));
    }
    Ok(())
}

fn generate_cmd(a: GenerateArgs) -> Outcome {
    let spec = GeneratorSpec {
        model: a.model,
        m: a.candidates,
        n: a.voters,
        seed: seed_or_auto(a.seed),
        urn_a: a.urn_a,
    };
    out!("{}", serialize_profile(&generate(&spec)?));
    Ok(())
}

fn experiment_cmd(a: ExperimentArgs) -> Outcome {
    let seed = seed_or_auto(a.seed);
    let mut config = match a.protocol {
        Protocol::SmallOptimal => ExperimentConfig::small_optimal(a.model, a.elections, seed),
        Protocol::Scaling => {
            ExperimentConfig::scaling(a.model, vec![4, 8, 16, 32, 64, 128], a.elections, seed)
        }
    };
    if let Some(sizes) = a.sizes {
        config.sizes = sizes;
    }
    if !a.rule.is_empty() {
        config.rules = a.rule;
    }
    if !a.heuristic.is_empty() {
        let mut hs = a.heuristic;
        hs.sort();
        hs.dedup();
        config.heuristics = hs;
    }
    config.voters = a.voters;
    config.urn_a = a.urn_a;
    config.quota = a.count;
    config.preferred = match a.preferred.as_str() {
        "random" => PreferredPolicy::Random,
        idx => PreferredPolicy::Fixed(
            idx.parse()
                .map_err(|_| Failure::Usage(format!("bad --preferred {idx:?}")))?,
        ),
    };
    config.validate()?;
    let (records, summary) = experiment::run(&config)?;
    experiment::emit_outputs(&a.out, &config, &records, &summary)?;
    if a.json {
        print_json(&summary)
    } else {
        out!("{}", experiment::summary_text(&summary));
        Ok(())
    }
}
