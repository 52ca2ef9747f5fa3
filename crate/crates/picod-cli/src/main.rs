//! Command-line frontend for the picod toolkit.
//!
//! Exit codes: 0 success; 1 failed verification or rejected certificate;
//! 2 usage error (from argument parsing); 3 malformed input file;
//! 4 infeasible parameters or no scheme within the requested length;
//! 5 search budget exhausted.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use picod::bounds::{
    certify, decide_length1, mais_min_over_choices, nesting_number, BoundsError, Budgets,
    LengthOneOutcome, LowerWitness, NestingMode,
};
use picod::construct::{degree_descending, grcov_greedy, min_cover_exact, DegreeDescendingOptions};
use picod::format::{
    check_certificate, parse_certificate, parse_instance, parse_scheme, serialize_certificate,
    serialize_instance, serialize_scheme, FormatError,
};
use picod::generate::{matching, nested_tree, uniform_k, GenerateError, NestedTreeParams};
use picod::gf::FieldError;
use picod::oracle::{exact_linear_optimum, OracleError, OracleOptions};
use picod::scheme::{verify, ClientStatus};
use picod::{FieldOrder, PicodInstance, Scheme};

const EXIT_UNSATISFIED: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_BUDGET: u8 = 5;

/// Pliable index coding toolkit: build, verify, bound, and certify
/// broadcast schemes for clients that each want any one message from a
/// request set.
#[derive(Parser)]
#[command(name = "picod", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a scheme for an instance and print its length.
    Solve(SolveArgs),
    /// Check a scheme against an instance, client by client.
    Verify {
        instance: PathBuf,
        scheme: PathBuf,
    },
    /// Print lower bounds and their witnesses.
    Bound(BoundArgs),
    /// Compute a two-sided bracket with embedded witnesses.
    Certify(CertifyArgs),
    /// Re-validate a previously written certificate.
    Check {
        instance: PathBuf,
        certificate: PathBuf,
    },
    /// Exhaustively find the optimal scheme length over one field.
    Oracle(OracleArgs),
    /// List connected components; optionally solve them separately.
    Components {
        instance: PathBuf,
        /// Solve each component and splice the schemes back together.
        #[arg(long)]
        solve_combined: bool,
    },
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Run the constructors over a directory of instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    /// Degree-descending rounds; length never exceeds the maximum degree.
    #[value(alias = "degree")]
    Alg1,
    /// Plain greedy residual covering, no length guarantee.
    Grcov,
    /// Exact minimum conflict-free cover (exponential search).
    Cover,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Alg1)]
    algo: Algo,
    /// Prime order of the coefficient field.
    #[arg(long, default_value_t = 2)]
    field: u64,
    /// Search nodes for --algo cover.
    #[arg(long)]
    budget: Option<u64>,
    /// Write the scheme here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NestingArg {
    Strict,
    Relaxed,
}

#[derive(Args)]
struct BoundArgs {
    instance: PathBuf,
    /// Nested-collection depth; mode defaults to strict.
    #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "strict")]
    nesting: Option<NestingArg>,
    /// Minimum over decoding choices of the longest demand chain.
    #[arg(long)]
    mais: bool,
    /// Decide whether a single transmission suffices.
    #[arg(long)]
    length1: bool,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct CertifyArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 2)]
    field: u64,
    /// Overrides every per-search budget with one value.
    #[arg(long)]
    budget: Option<u64>,
    /// Write the full certificate here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 2)]
    field: u64,
    /// Longest scheme to look for before giving up.
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Matching,
    UniformK,
    NestedTree,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    seed: u64,
    /// Message count (matching and uniform-k).
    #[arg(long, required_if_eq_any([("model", "matching"), ("model", "uniform-k")]))]
    messages: Option<usize>,
    /// Client count (matching and uniform-k).
    #[arg(long, required_if_eq_any([("model", "matching"), ("model", "uniform-k")]))]
    clients: Option<usize>,
    /// Request-set size (matching and uniform-k).
    #[arg(long, required_if_eq_any([("model", "matching"), ("model", "uniform-k")]))]
    set_size: Option<usize>,
    /// Planted-tree depth (nested-tree).
    #[arg(long, required_if_eq("model", "nested-tree"))]
    depth: Option<usize>,
    /// Messages per leaf client (nested-tree).
    #[arg(long, required_if_eq("model", "nested-tree"))]
    leaf_size: Option<usize>,
    /// Extra random clients (nested-tree).
    #[arg(long, default_value_t = 0)]
    noise: usize,
    /// Messages untouched by the planted tree (nested-tree).
    #[arg(long, default_value_t = 0)]
    extra_messages: usize,
    /// Write the instance here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory scanned for *.instance files.
    #[arg(long)]
    corpus: PathBuf,
    /// Report file: lengths only, so reruns diff clean.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<FormatError>().is_some()
            || cause.downcast_ref::<FieldError>().is_some()
        {
            return EXIT_PARSE;
        }
        if let Some(e) = cause.downcast_ref::<BoundsError>() {
            return match e {
                BoundsError::BudgetExhausted | BoundsError::ChoiceSpaceTooLarge { .. } => {
                    EXIT_BUDGET
                }
                _ => EXIT_INFEASIBLE,
            };
        }
        if let Some(e) = cause.downcast_ref::<OracleError>() {
            return match e {
                OracleError::BudgetExhausted { .. } => EXIT_BUDGET,
                OracleError::NoSchemeWithinMaxLen { .. } => EXIT_INFEASIBLE,
            };
        }
        if cause.downcast_ref::<GenerateError>().is_some() {
            return EXIT_INFEASIBLE;
        }
    }
    1
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify { instance, scheme } => cmd_verify(&instance, &scheme),
        Command::Bound(args) => cmd_bound(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Check {
            instance,
            certificate,
        } => cmd_check(&instance, &certificate),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Components {
            instance,
            solve_combined,
        } => cmd_components(&instance, solve_combined),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> Result<PicodInstance> {
    let text = read_file(path)?;
    let inst = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(inst)
}

fn env_budget() -> Option<u64> {
    std::env::var("PICOD_BUDGET").ok().and_then(|s| s.parse().ok())
}

fn budget_or(flag: Option<u64>, default: u64) -> u64 {
    flag.or_else(env_budget).unwrap_or(default)
}

fn budgets_for(flag: Option<u64>) -> Budgets {
    match flag.or_else(env_budget) {
        Some(n) => Budgets {
            nesting: n,
            mais: n,
            cover: n,
            length1: n,
            oracle: n,
            ..Budgets::default()
        },
        None => Budgets::default(),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let field = FieldOrder::new(args.field)?;
    let scheme = match args.algo {
        Algo::Alg1 => {
            degree_descending(
                &inst,
                &DegreeDescendingOptions {
                    field,
                    fast_descent: true,
                },
            )
            .scheme
        }
        Algo::Grcov => grcov_greedy(&inst, field),
        Algo::Cover => {
            let budget = budget_or(args.budget, 1_000_000);
            let cover = min_cover_exact(&inst, budget)
                .ok_or(BoundsError::BudgetExhausted)
                .context("exact cover search did not finish")?;
            Scheme::from_supports(field, inst.message_count(), &cover.supports)?
        }
    };
    let report = verify(&inst, &scheme)?;
    if !report.all_satisfied {
        bail!("constructed scheme failed verification; this is a bug");
    }
    println!("length {}", scheme.length());
    if let Some(out) = &args.output {
        write_file(out, &serialize_scheme(&scheme))?;
    } else {
        print!("{}", serialize_scheme(&scheme));
    }
    Ok(0)
}

fn cmd_verify(instance: &Path, scheme_path: &Path) -> Result<u8> {
    let inst = load_instance(instance)?;
    let text = read_file(scheme_path)?;
    let scheme =
        parse_scheme(&text).with_context(|| format!("parsing {}", scheme_path.display()))?;
    if scheme.message_count() != inst.message_count() {
        bail!(
            "scheme covers {} messages but the instance has {}",
            scheme.message_count(),
            inst.message_count()
        );
    }
    let report = verify(&inst, &scheme)?;
    for (i, status) in report.statuses.iter().enumerate() {
        match status {
            ClientStatus::Satisfied { message, .. } => {
                println!("client {}: satisfied via message {}", i + 1, message);
            }
            ClientStatus::Unsatisfied => println!("client {}: UNSATISFIED", i + 1),
        }
    }
    let satisfied = report.statuses.iter().filter(|s| s.is_satisfied()).count();
    println!("satisfied {} of {}", satisfied, report.statuses.len());
    if report.all_satisfied {
        println!("all satisfied");
        Ok(0)
    } else {
        Ok(EXIT_UNSATISFIED)
    }
}

fn index_list(indices: impl IntoIterator<Item = usize>) -> String {
    let mut out = String::new();
    for (k, v) in indices.into_iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
    }
    out
}

fn cmd_bound(args: BoundArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let budget = budget_or(args.budget, 1_000_000);
    let all = args.nesting.is_none() && !args.mais && !args.length1;

    if let Some(mode_arg) = args.nesting.or(if all { Some(NestingArg::Strict) } else { None }) {
        let mode = match mode_arg {
            NestingArg::Strict => NestingMode::Strict,
            NestingArg::Relaxed => NestingMode::Relaxed,
        };
        let outcome = nesting_number(&inst, mode, budget);
        let label = match mode {
            NestingMode::Strict => "strict",
            NestingMode::Relaxed => "relaxed",
        };
        let qual = if outcome.exact { "exact" } else { "budget-limited" };
        println!("nesting {label} = {} ({qual})", outcome.length);
        for (d, level) in outcome.collection.levels.iter().enumerate() {
            println!(
                "  level {}: clients {}",
                d + 1,
                index_list(level.iter().map(|c| c + 1))
            );
        }
    }
    if args.mais || all {
        let min = mais_min_over_choices(&inst, budget)?;
        println!("chain-min = {}", min.value);
        println!("  choices: {}", index_list(min.choices.iter().copied()));
        println!(
            "  chain clients: {}",
            index_list(min.chain.clients.iter().map(|c| c + 1))
        );
        println!(
            "  chain demands: {}",
            index_list(min.chain.demands.iter().copied())
        );
    }
    if args.length1 || all {
        match decide_length1(&inst, budget)? {
            LengthOneOutcome::Feasible { witness } => {
                println!("one-transmission = feasible");
                println!("  messages: {}", index_list(witness));
            }
            LengthOneOutcome::Infeasible => println!("one-transmission = infeasible"),
        }
    }
    Ok(0)
}

fn witness_kind(witness: &LowerWitness) -> &'static str {
    match witness {
        LowerWitness::Nesting { .. } => "nesting",
        LowerWitness::MaisMin { .. } => "chain-min",
        LowerWitness::NoLengthOne => "no-length-one",
        LowerWitness::TrivialOne => "trivial",
        LowerWitness::Empty => "empty",
    }
}

fn cmd_certify(args: CertifyArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let field = FieldOrder::new(args.field)?;
    let budgets = budgets_for(args.budget);
    let cert = certify(&inst, field, &budgets);
    println!(
        "lower={} ({}), upper={}, {}",
        cert.lower,
        witness_kind(&cert.lower_witness),
        cert.upper,
        if cert.tight { "TIGHT" } else { "GAP" }
    );
    if let Some(out) = &args.output {
        write_file(out, &serialize_certificate(&cert, &inst))?;
    }
    Ok(0)
}

fn cmd_check(instance: &Path, certificate: &Path) -> Result<u8> {
    let inst = load_instance(instance)?;
    let text = read_file(certificate)?;
    let doc =
        parse_certificate(&text).with_context(|| format!("parsing {}", certificate.display()))?;
    match check_certificate(&inst, &doc, &Budgets::default()) {
        Ok(()) => {
            println!(
                "certificate OK: lower={}, upper={}, {}",
                doc.certificate.lower,
                doc.certificate.upper,
                if doc.certificate.tight { "TIGHT" } else { "GAP" }
            );
            Ok(0)
        }
        Err(err) => {
            eprintln!("certificate REJECTED: {err}");
            Ok(EXIT_UNSATISFIED)
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let inst = load_instance(&args.instance)?;
    let field = FieldOrder::new(args.field)?;
    let opts = OracleOptions {
        max_len: args.max_len,
        budget: budget_or(args.budget, OracleOptions::default().budget),
        start_len: None,
    };
    let result = exact_linear_optimum(&inst, field, &opts)?;
    println!(
        "optimum {} ({})",
        result.optimum,
        if result.exact { "exact" } else { "upper bound" }
    );
    println!("explored {} candidate row spaces", result.explored);
    print!("{}", serialize_scheme(&result.scheme));
    Ok(0)
}

fn cmd_components(instance: &Path, solve_combined: bool) -> Result<u8> {
    let inst = load_instance(instance)?;
    let parts = inst.components();
    println!("{} component(s)", parts.len());
    for (i, comp) in parts.components.iter().enumerate() {
        println!(
            "component {}: {} messages, {} clients",
            i + 1,
            comp.vertices.len(),
            comp.client_indices.len()
        );
        println!("  messages: {}", index_list(comp.vertices.iter().copied()));
        println!(
            "  clients: {}",
            index_list(comp.client_indices.iter().map(|c| c + 1))
        );
    }
    if solve_combined {
        if parts.is_empty() {
            bail!("no components to solve");
        }
        let field = FieldOrder::BINARY;
        let solved: Vec<(PicodInstance, Scheme)> = parts
            .components
            .iter()
            .map(|comp| {
                let scheme = degree_descending(
                    &comp.instance,
                    &DegreeDescendingOptions {
                        field,
                        fast_descent: true,
                    },
                )
                .scheme;
                (comp.instance.clone(), scheme)
            })
            .collect();
        let combined = picod::scheme::combine_component_schemes(&solved)?;
        let report = verify(&inst, &combined)?;
        if !report.all_satisfied {
            bail!("combined scheme failed verification; this is a bug");
        }
        println!("combined length {}", combined.length());
    }
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> Result<u8> {
    let inst = match args.model {
        Model::Matching => matching(
            args.messages.unwrap(),
            args.clients.unwrap(),
            args.set_size.unwrap(),
            args.seed,
        )?,
        Model::UniformK => uniform_k(
            args.messages.unwrap(),
            args.clients.unwrap(),
            args.set_size.unwrap(),
            args.seed,
        )?,
        Model::NestedTree => nested_tree(
            &NestedTreeParams {
                depth: args.depth.unwrap(),
                leaf_size: args.leaf_size.unwrap(),
                noise_clients: args.noise,
                extra_messages: args.extra_messages,
            },
            args.seed,
        )?,
    };
    eprintln!(
        "generated instance: m={}, n={}",
        inst.message_count(),
        inst.client_count()
    );
    emit(&serialize_instance(&inst), args.output.as_deref())?;
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<u8> {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.corpus)
        .with_context(|| format!("reading corpus directory {}", args.corpus.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "instance"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no *.instance files in {}", args.corpus.display());
    }

    let field = FieldOrder::BINARY;
    let mut report = String::from("# file m n delta alg1 grcov\n");
    println!(
        "{:<28} {:>6} {:>6} {:>6} {:>6} {:>9} {:>6} {:>9}",
        "file", "m", "n", "delta", "alg1", "alg1-ms", "grcov", "grcov-ms"
    );
    let mut failures = 0usize;
    for path in &files {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let inst = load_instance(path)?;
        let delta = inst.degrees().max_degree();

        let t0 = Instant::now();
        let alg1 = degree_descending(
            &inst,
            &DegreeDescendingOptions {
                field,
                fast_descent: true,
            },
        )
        .scheme;
        let alg1_ms = t0.elapsed().as_secs_f64() * 1e3;

        let t1 = Instant::now();
        let grcov = grcov_greedy(&inst, field);
        let grcov_ms = t1.elapsed().as_secs_f64() * 1e3;

        for (label, scheme) in [("alg1", &alg1), ("grcov", &grcov)] {
            if !verify(&inst, scheme)?.all_satisfied {
                eprintln!("{name}: {label} scheme failed verification");
                failures += 1;
            }
        }

        println!(
            "{:<28} {:>6} {:>6} {:>6} {:>6} {:>9.2} {:>6} {:>9.2}",
            name,
            inst.message_count(),
            inst.client_count(),
            delta,
            alg1.length(),
            alg1_ms,
            grcov.length(),
            grcov_ms
        );
        let _ = writeln!(
            report,
            "{name} {} {} {delta} {} {}",
            inst.message_count(),
            inst.client_count(),
            alg1.length(),
            grcov.length()
        );
    }
    if let Some(out) = &args.out {
        write_file(out, &report)?;
    }
    if failures > 0 {
        bail!("{failures} scheme(s) failed verification; this is a bug");
    }
    Ok(0)
}
