//! Command-line surface over the parsing library: brute-force verification,
//! per-sentence oracle runs, treebank coverage tables, the enrichment
//! summary, and raw enumeration reports.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use canonparse::{
    canonical_oracle, check_equivalence, check_oracle, coverage, coverage_tsv,
    enriched_ambiguity_report, lift_to_enriched, parse_conllx, reachable_feature_vectors,
    ambiguity_report, CoverageRow, EnrichedSystem, OracleOutcome, SystemSpec, DEFAULT_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "canonparse",
    version,
    about = "Shift-reduce dependency parsing with canonical, ambiguity-free derivations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exhaustive checks for a system at every length up to a bound.
    Verify(VerifyArgs),
    /// Print each sentence's canonical transition sequence.
    Oracle(OracleArgs),
    /// Tabulate oracle coverage over CoNLL-X files as TSV.
    Coverage(CoverageArgs),
    /// Show the ambiguity-free system derived from a base system.
    Transform(TransformArgs),
    /// Enumerate all complete computations at one sentence length.
    Enumerate(EnumerateArgs),
}

/// A base system given as a builtin name (`arc-standard`, `attardi:<depth>`,
/// `attardi-deg2`) or a template list such as `la:2,1;ra:2,1`.
#[derive(Args)]
struct SystemArg {
    #[arg(long)]
    system: SystemSpec,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Largest sentence length to enumerate.
    #[arg(long)]
    max_len: usize,
    /// Configuration budget per enumeration (overrides CANONPARSE_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    system: SystemArg,
    /// CoNLL-X file to read sentences from.
    #[arg(long)]
    conll: PathBuf,
    /// Print the enriched (ambiguity-free) sequences instead of the base ones.
    #[arg(long)]
    enriched: bool,
}

#[derive(Args)]
struct CoverageArgs {
    #[command(flatten)]
    system: SystemArg,
    /// CoNLL-X files, one output row each.
    #[arg(long, required = true, num_args = 1..)]
    conll: Vec<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    system: SystemArg,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Sentence length to enumerate.
    #[arg(long)]
    len: usize,
    /// Enumerate the enriched system instead of the base one.
    #[arg(long)]
    enriched: bool,
    /// Configuration budget (overrides CANONPARSE_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
}

const USAGE_ERROR: u8 = 2;
const CHECK_FAILED: u8 = 1;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(args) => run_verify(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Coverage(args) => run_coverage(args),
        Command::Transform(args) => run_transform(args),
        Command::Enumerate(args) => run_enumerate(args),
    }
}

/// The enumeration budget: explicit flag, then CANONPARSE_BUDGET, then the
/// library default.
fn resolve_budget(flag: Option<u64>) -> Result<u64, String> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("CANONPARSE_BUDGET") {
        Ok(raw) => raw
            .parse()
            .map_err(|_| format!("CANONPARSE_BUDGET is not a number: {raw}")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(USAGE_ERROR)
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let budget = match resolve_budget(args.budget) {
        Ok(b) => b,
        Err(e) => return usage_error(&e),
    };
    let system = args.system.system;

    let enriched = match EnrichedSystem::transform(&system) {
        Ok(enriched) => {
            println!(
                "PASS monotonicity: {} (degree {}, depth {})",
                system,
                enriched.degree(),
                enriched.depth()
            );
            enriched
        }
        Err(e) => {
            println!("FAIL monotonicity: {e}");
            return ExitCode::from(CHECK_FAILED);
        }
    };

    let mut all_passed = true;
    let mut check = |line: String, passed: bool| {
        println!("{} {line}", if passed { "PASS" } else { "FAIL" });
        all_passed &= passed;
    };

    for n in 1..=args.max_len {
        match enriched_ambiguity_report(&enriched, n, budget) {
            Ok(report) => check(
                format!(
                    "non-ambiguity n={n}: {} trees, {} computations, max ambiguity {}",
                    report.tree_count(),
                    report.computation_count,
                    report.max_ambiguity
                ),
                report.max_ambiguity <= 1,
            ),
            Err(e) => check(format!("non-ambiguity n={n}: {e}"), false),
        }
        match check_equivalence(&system, n, budget) {
            Ok(report) => check(
                format!(
                    "equivalence n={n}: {} base trees, {} enriched trees, {} projection failures",
                    report.base_trees.len(),
                    report.enriched_trees.len(),
                    report.projection_failures.len()
                ),
                report.passed(),
            ),
            Err(e) => check(format!("equivalence n={n}: {e}"), false),
        }
        match check_oracle(&system, n, budget) {
            Ok(report) => check(
                format!(
                    "oracle n={n}: {} trees, {} derivable, {} oracle successes, {} failures",
                    report.trees_total,
                    report.derivable,
                    report.oracle_successes,
                    report.failures.len()
                ),
                report.passed(),
            ),
            Err(e) => check(format!("oracle n={n}: {e}"), false),
        }
        let bound = 1usize << enriched.features_per_symbol();
        match reachable_feature_vectors(&enriched, n, budget) {
            Ok(seen) => check(
                format!("feature-bound n={n}: {} of at most {bound} vectors", seen.len()),
                seen.len() <= bound,
            ),
            Err(e) => check(format!("feature-bound n={n}: {e}"), false),
        }
    }

    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CHECK_FAILED)
    }
}

fn run_oracle(args: OracleArgs) -> ExitCode {
    let system = args.system.system;
    let enriched = if args.enriched {
        match EnrichedSystem::transform(&system) {
            Ok(e) => Some(e),
            Err(e) => return usage_error(&format!("--enriched needs a monotonic system: {e}")),
        }
    } else {
        None
    };
    let text = match fs::read_to_string(&args.conll) {
        Ok(text) => text,
        Err(e) => return usage_error(&format!("cannot read {}: {e}", args.conll.display())),
    };

    for (index, sentence) in parse_conllx(&text).iter().enumerate() {
        let label = index + 1;
        match &sentence.tree {
            Err(flag) => println!("sent {label}: MALFORMED ({flag})"),
            Ok(tree) => match canonical_oracle(tree, &system) {
                OracleOutcome::Unparseable(_) => println!("sent {label}: UNPARSEABLE"),
                OracleOutcome::Success(comp) => match &enriched {
                    None => println!("sent {label}: {comp}"),
                    Some(enriched) => {
                        let lifted = lift_to_enriched(&comp, tree, enriched)
                            .expect("the oracle output is canonical by construction");
                        println!("sent {label}: {lifted}");
                    }
                },
            },
        }
    }
    ExitCode::SUCCESS
}

fn run_coverage(args: CoverageArgs) -> ExitCode {
    let system = args.system.system;
    if !system.is_monotonic() {
        return usage_error(&format!(
            "coverage needs a monotonic system, got {system}"
        ));
    }

    let mut rows = Vec::new();
    let mut unreadable = false;
    for path in &args.conll {
        let source = path.display().to_string();
        match fs::read_to_string(path) {
            Ok(text) => rows.push(coverage(&source, &parse_conllx(&text), &system)),
            Err(e) => {
                eprintln!("error: cannot read {source}: {e}");
                unreadable = true;
                rows.push(CoverageRow {
                    source,
                    size: 0,
                    failures: 0,
                    non_projective: 0,
                    malformed: 0,
                });
            }
        }
    }
    print!("{}", coverage_tsv(&rows));

    if unreadable {
        ExitCode::from(CHECK_FAILED)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_transform(args: TransformArgs) -> ExitCode {
    match EnrichedSystem::transform(&args.system.system) {
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(CHECK_FAILED)
        }
        Ok(enriched) => {
            let transitions = enriched.transitions();
            println!("base: {}", enriched.base());
            println!("degree: {}", enriched.degree());
            println!("depth: {}", enriched.depth());
            println!("features per symbol: {}", enriched.features_per_symbol());
            println!("transitions ({}):", transitions.len());
            for t in transitions {
                println!("  {t}");
            }
            ExitCode::SUCCESS
        }
    }
}

fn run_enumerate(args: EnumerateArgs) -> ExitCode {
    let budget = match resolve_budget(args.budget) {
        Ok(b) => b,
        Err(e) => return usage_error(&e),
    };
    let system = args.system.system;

    let report = if args.enriched {
        let enriched = match EnrichedSystem::transform(&system) {
            Ok(e) => e,
            Err(e) => return usage_error(&format!("--enriched needs a monotonic system: {e}")),
        };
        enriched_ambiguity_report(&enriched, args.len, budget)
    } else {
        ambiguity_report(&system, args.len, budget)
    };
    match report {
        Ok(report) => {
            println!("n\tsystem\tcomputations\ttrees\tmax_ambiguity");
            println!(
                "{}\t{}\t{}\t{}\t{}",
                report.n,
                report.system,
                report.computation_count,
                report.tree_count(),
                report.max_ambiguity
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CHECK_FAILED)
        }
    }
}
