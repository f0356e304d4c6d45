//! `matchnuc`: load a weighted matching game, compute its leastcore,
//! decomposition or nucleolus, and print a JSON run report.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use matchnuc::leastcore::{core_is_empty, in_leastcore, solve_leastcore};
use matchnuc::lp::to_lp_text;
use matchnuc::maschler::{compact_p1_problem, decomposition_for, nucleolus, NucleolusResult};
use matchnuc::oracle::{brute_nucleolus_with, prekernel_check, random_game, CoalitionTable, ThetaVector};
use matchnuc::rational::format_rational;
use matchnuc::{Error, GameFormat, GameInstance, SolveOptions};

/// Largest game `--check` cross-verifies against the brute-force oracle.
const CHECK_NODE_LIMIT: usize = 8;
const THETA_HEAD: usize = 20;

#[derive(Parser)]
#[command(name = "matchnuc", version, about = "Exact nucleolus of weighted matching games")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    format: OutputFormat,
    /// Seed for randomly generated oracle instances.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Largest edge count for which matchings are enumerated explicitly.
    #[arg(long, global = true)]
    max_enum: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Compact,
    Bruteforce,
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the nucleolus.
    Solve {
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Cross-verify against the brute-force oracle (games with at most 8 nodes).
        #[arg(long)]
        check: bool,
        /// Print the compact leastcore LP to stderr.
        #[arg(long)]
        dump_lp: bool,
    },
    /// Compute the leastcore value and a witness allocation.
    Leastcore { game: PathBuf },
    /// Dump the maximal blossoms, representatives and edge classes (empty core only).
    Decompose { game: PathBuf },
    /// Run the brute-force nucleolus; without a file, on a random game from `--seed`.
    Oracle {
        game: Option<PathBuf>,
        /// Node count of the random game.
        #[arg(long, default_value_t = 6)]
        nodes: usize,
    },
}

enum Failure {
    Input(String),
    Internal(String),
    CheckMismatch(String),
    CoreNotEmpty,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Internal(_) => 2,
            Failure::CheckMismatch(_) => 3,
            Failure::CoreNotEmpty => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => format!("input error: {m}"),
            Failure::Internal(m) => format!("internal error: {m}"),
            Failure::CheckMismatch(m) => format!("check failed: {m}"),
            Failure::CoreNotEmpty => "the core is not empty; the decomposition is only defined for empty-core games".into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() || matches!(e, Error::BoundExceeded { .. }) {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

struct Loaded {
    game: GameInstance,
    digest: String,
}

fn load(path: &PathBuf) -> Result<Loaded, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    let format = if first == Some(&b'{') { GameFormat::Json } else { GameFormat::Edgelist };
    let game = GameInstance::load(&bytes, format)?;
    Ok(Loaded {
        game,
        digest: hex::encode(Sha256::digest(&bytes)),
    })
}

struct Report {
    command: &'static str,
    digest: String,
    result: Value,
    checks_passed: Vec<String>,
}

fn solve(
    loaded: &Loaded,
    method: MethodArg,
    check: bool,
    dump_lp: bool,
    options: &SolveOptions,
) -> Result<Report, Failure> {
    let game = &loaded.game;
    let leastcore = solve_leastcore(game, options)?;
    if dump_lp {
        if core_is_empty(&leastcore) {
            let dec = decomposition_for(game, &leastcore, options)?;
            eprint!("{}", to_lp_text(&compact_p1_problem(game, &dec)));
        } else {
            eprintln!("# core is not empty; the compact leastcore LP is not used");
        }
    }
    let result = match method {
        MethodArg::Bruteforce => brute_nucleolus_with(&CoalitionTable::new(game)?, options)?,
        MethodArg::Compact | MethodArg::Auto => nucleolus(game, options)?,
    };
    let mut checks = Vec::new();
    if check {
        if !in_leastcore(game, &result.allocation, &leastcore.epsilon1) {
            return Err(Failure::CheckMismatch("allocation is outside the leastcore".into()));
        }
        checks.push("in-leastcore".to_string());
        if game.node_count() <= CHECK_NODE_LIMIT {
            let table = CoalitionTable::new(game)?;
            let oracle = brute_nucleolus_with(&table, options)?;
            if oracle.allocation != result.allocation {
                return Err(Failure::CheckMismatch(format!(
                    "oracle allocation {:?} differs",
                    oracle.allocation.to_label_map(game)
                )));
            }
            checks.push("oracle-match".into());
            if oracle.epsilons != result.epsilons {
                return Err(Failure::CheckMismatch("per-round excess levels differ from the oracle".into()));
            }
            checks.push("epsilons-match".into());
            if !prekernel_check(&table, &result.allocation) {
                return Err(Failure::CheckMismatch("allocation is not in the prekernel".into()));
            }
            checks.push("prekernel".into());
        } else {
            eprintln!("note: oracle cross-check skipped for more than {CHECK_NODE_LIMIT} nodes");
        }
    }
    Ok(Report {
        command: "solve",
        digest: loaded.digest.clone(),
        result: result.to_json(game),
        checks_passed: checks,
    })
}

fn oracle_result(game: &GameInstance, result: &NucleolusResult, table: &CoalitionTable) -> Value {
    let theta = ThetaVector::new(table, &result.allocation);
    let head: Vec<String> = theta.sorted_excesses.iter().take(THETA_HEAD).map(format_rational).collect();
    let mut value = result.to_json(game);
    value["theta_head"] = json!(head);
    value["prekernel"] = json!(prekernel_check(table, &result.allocation));
    value
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let mut options = SolveOptions::default();
    if let Some(limit) = cli.max_enum {
        options = options.with_enumeration_limit(limit);
    }
    match &cli.command {
        Command::Solve {
            game,
            method,
            check,
            dump_lp,
        } => solve(&load(game)?, *method, *check, *dump_lp, &options),
        Command::Leastcore { game } => {
            let loaded = load(game)?;
            let result = solve_leastcore(&loaded.game, &options)?;
            Ok(Report {
                command: "leastcore",
                digest: loaded.digest,
                result: result.to_json(&loaded.game),
                checks_passed: Vec::new(),
            })
        }
        Command::Decompose { game } => {
            let loaded = load(game)?;
            let leastcore = solve_leastcore(&loaded.game, &options)?;
            if !core_is_empty(&leastcore) {
                return Err(Failure::CoreNotEmpty);
            }
            let dec = decomposition_for(&loaded.game, &leastcore, &options)?;
            Ok(Report {
                command: "decompose",
                digest: loaded.digest,
                result: dec.to_json(&loaded.game),
                checks_passed: Vec::new(),
            })
        }
        Command::Oracle { game, nodes } => {
            let loaded = match game {
                Some(path) => load(path)?,
                None => {
                    let game = random_game(cli.seed, *nodes);
                    let digest = hex::encode(Sha256::digest(game.to_edgelist().as_bytes()));
                    Loaded { game, digest }
                }
            };
            let table = CoalitionTable::new(&loaded.game)?;
            let result = brute_nucleolus_with(&table, &options)?;
            let mut value = oracle_result(&loaded.game, &result, &table);
            if game.is_none() {
                value["game"] = loaded.game.to_json();
            }
            Ok(Report {
                command: "oracle",
                digest: loaded.digest,
                result: value,
                checks_passed: Vec::new(),
            })
        }
    }
}

fn render_text(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                match v {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        render_text(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{key}: {}\n", scalar_text(v))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other))),
    }
}

fn scalar_text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|item| match item {
                Value::Array(_) => format!("({})", scalar_text(item)),
                other => scalar_text(other),
            })
            .collect::<Vec<_>>()
            .join(" "),
        Value::Object(_) => value.to_string(),
        other => other.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(report) => {
            let mut root = Map::new();
            root.insert("command".into(), json!(report.command));
            root.insert("input_digest".into(), json!(report.digest));
            root.insert("result".into(), report.result);
            root.insert("timing_ms".into(), json!(start.elapsed().as_millis() as u64));
            root.insert("checks_passed".into(), json!(report.checks_passed));
            let root = Value::Object(root);
            match cli.format {
                OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&root).expect("serializable")),
                OutputFormat::Text => {
                    let mut out = String::new();
                    render_text(&root, 0, &mut out);
                    print!("{out}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
