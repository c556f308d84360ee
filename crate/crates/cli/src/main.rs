//! Command-line front door: generate instances, reduce, solve, certify,
//! run the full pipeline, sweep benchmarks, and evaluate cost formulas.
//!
//! Machine-readable results go to stdout as line-oriented `key value`
//! pairs (`stat`/`exp` prefixed where the contract asks for them); human
//! summaries go to stderr. Exit codes: 0 YES, 1 NO, 2 promise violation,
//! 3 usage/parse error, 4 resource cap.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rhombus_core::ann::Backend;
use rhombus_core::cost;
use rhombus_core::error::Error;
use rhombus_core::gen::{generate_certified_no, generate_planted_yes, PlantSpec};
use rhombus_core::graph::{parse_graph, write_graph, GapSpec};
use rhombus_core::lattice::{decide_cvp, parse_cvp, write_cvp, CvpInstance};
use rhombus_core::mitm::{choose_split, solve_binary_cvp_mitm, MitmOptions, SplitConfig};
use rhombus_core::num_mode::{parse_rat, rat_to_f64};
use rhombus_core::oracle::{brute_binary_cvp, certify_lemmas};
use rhombus_core::pipeline::{run_pipeline, PipelineOptions, SolverKind};
use rhombus_core::reduce::{choose_iota, reduce_auto, ReductionMode, ReductionParams};
use rhombus_core::{Decision, Rat};

#[derive(Parser)]
#[command(name = "rhombus", version, about = "gap Max-Cut to binary CVP toolchain")]
struct Cli {
    /// Seed for all randomness in the invocation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Require exact rational arithmetic; error if the instance cannot be exact.
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,

    /// Force float arithmetic even when exact rationals are available.
    #[arg(long, global = true)]
    float: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted YES or certified NO instance.
    Gen(GenArgs),
    /// Reduce a Max-Cut file to a binary-CVP file.
    Reduce(ReduceArgs),
    /// Decide a binary-CVP file.
    Solve(SolveArgs),
    /// Run the lemma certifier on a Max-Cut file.
    Certify(CertifyArgs),
    /// Reduce, solve, and verify end to end.
    Pipeline(PipelineArgs),
    /// Sweep instance sizes and record query counts.
    Bench(BenchArgs),
    /// Evaluate the closed-form exponent calculators.
    Cost(CostArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Instance kind: yes (planted) or no (brute-force certified).
    #[arg(long, value_parser = ["yes", "no"])]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Completeness parameter epsilon in (0,1), as a rational like 1/4.
    #[arg(long)]
    epsilon: String,
    /// Soundness exponent c in (0,1].
    #[arg(long, default_value = "1")]
    c: String,
    /// Norm p >= 1.
    #[arg(long, default_value = "2")]
    p: String,
    /// Maximum edge weight (1 = unit weights).
    #[arg(long, default_value = "1")]
    w_max: String,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// Input Max-Cut file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Gadget parameter iota > 1 (auto-tuned if omitted).
    #[arg(long)]
    iota: Option<String>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Input binary-CVP file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Solver: oracle (exhaustive) or mitm.
    #[arg(long, default_value = "oracle", value_parser = ["oracle", "mitm"])]
    algo: String,
    /// Split fraction a in (0,1) for mitm.
    #[arg(long)]
    a: Option<f64>,
    /// Near-neighbor backend for mitm.
    #[arg(long, default_value = "exact", value_parser = ["exact", "lsh"])]
    backend: String,
    /// Disable early exit so query counts are exact.
    #[arg(long)]
    audit: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Input Max-Cut file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Gadget parameter iota > 1 (auto-tuned if omitted).
    #[arg(long)]
    iota: Option<String>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Input Max-Cut file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "oracle", value_parser = ["oracle", "mitm"])]
    algo: String,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, default_value = "exact", value_parser = ["exact", "lsh"])]
    backend: String,
    #[arg(long)]
    audit: bool,
    #[arg(long)]
    iota: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 6)]
    min_n: usize,
    #[arg(long, default_value_t = 14)]
    max_n: usize,
    #[arg(long, default_value_t = 2)]
    step: usize,
    /// Edges per vertex in the generated instances.
    #[arg(long, default_value_t = 2)]
    density: usize,
    #[arg(long, default_value = "1/4")]
    epsilon: String,
    #[arg(long, default_value = "1/2")]
    c: String,
    #[arg(long, default_value = "1")]
    p: String,
    #[arg(long, default_value = "exact", value_parser = ["exact", "lsh"])]
    backend: String,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    /// Approximation factor gamma > 1.
    #[arg(long)]
    gamma: f64,
    /// Norm: 1 or 2.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Also report the hard-regime gamma bound at this n.
    #[arg(long)]
    n: Option<u64>,
    /// Also report the max epsilon exponent at this c.
    #[arg(long)]
    c: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's default exit code is 2, which this tool reserves for
            // promise violations; help/version still exit 0
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.threads > 0 {
        let _ = rayon_global(cli.threads);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::ResourceCap(_) => ExitCode::from(4),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn rayon_global(threads: usize) -> Result<(), rhombus_core::Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Validation(e.to_string()))
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Reduce(args) => cmd_reduce(cli, args),
        Command::Solve(args) => cmd_solve(cli, args),
        Command::Certify(args) => cmd_certify(cli, args),
        Command::Pipeline(args) => cmd_pipeline(cli, args),
        Command::Bench(args) => cmd_bench(cli, args),
        Command::Cost(args) => cmd_cost(args),
    }
}

fn parse_pos_rat(label: &str, s: &str) -> Result<Rat, Error> {
    parse_rat(s).map_err(|e| Error::Parse(format!("{label}: {e}")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<ExitCode, Error> {
    let gap = GapSpec::new(
        parse_pos_rat("epsilon", &args.epsilon)?,
        parse_pos_rat("c", &args.c)?,
        parse_pos_rat("p", &args.p)?,
    )?;
    let spec = PlantSpec {
        n: args.n,
        m: args.m,
        gap: gap.clone(),
        seed: cli.seed,
        w_max: parse_pos_rat("w_max", &args.w_max)?,
    };
    let g = match args.kind.as_str() {
        "yes" => generate_planted_yes(&spec)?,
        _ => generate_certified_no(&spec)?,
    };
    emit(&args.out, &write_graph(&g, &gap))?;
    eprintln!(
        "generated {} instance: n = {}, m = {}, w_tot = {}",
        args.kind,
        g.n(),
        g.m(),
        rat_to_f64(&g.w_tot())
    );
    Ok(ExitCode::SUCCESS)
}

fn build_instance(
    cli: &Cli,
    input: &PathBuf,
    iota: &Option<String>,
) -> Result<(rhombus_core::graph::WeightedGraph, GapSpec, CvpInstance), Error> {
    let text = std::fs::read_to_string(input)?;
    let (g, gap) = parse_graph(&text)?;
    let g = rhombus_core::graph::normalize_weights(&g);
    let iota = match iota {
        Some(s) => {
            let i = parse_pos_rat("iota", s)?;
            if i <= Rat::from_integer(1.into()) {
                return Err(Error::Validation("iota must exceed 1".into()));
            }
            i
        }
        None => choose_iota(&g, &gap, 0.01)?,
    };
    let mode = if g.is_unit_weight() {
        ReductionMode::Unweighted
    } else {
        ReductionMode::Weighted
    };
    let inst = reduce_auto(&g, &gap, &ReductionParams::new(iota, mode)?)?;
    let inst = apply_mode(cli, inst)?;
    Ok((g, gap, inst))
}

fn apply_mode(cli: &Cli, inst: CvpInstance) -> Result<CvpInstance, Error> {
    if cli.exact && !inst.is_exact() {
        return Err(Error::Validation(
            "--exact requested but the instance has irrational data; \
             use p = 1, perfect p-th-power weights, or --float"
                .into(),
        ));
    }
    Ok(if cli.float { inst.to_float() } else { inst })
}

fn cmd_reduce(cli: &Cli, args: &ReduceArgs) -> Result<ExitCode, Error> {
    let (g, _, inst) = build_instance(cli, &args.input, &args.iota)?;
    emit(&args.out, &write_cvp(&inst))?;
    eprintln!(
        "reduced: n = {}, m = {} -> d = {}, rank = {}, r = {}, gamma = {}",
        g.n(),
        g.m(),
        inst.dim(),
        inst.rank(),
        inst.r().f64(),
        inst.gamma().f64()
    );
    Ok(ExitCode::SUCCESS)
}

fn decision_exit(d: Decision) -> ExitCode {
    ExitCode::from(d.exit_code() as u8)
}

fn cmd_solve(cli: &Cli, args: &SolveArgs) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&args.input)?;
    let inst = apply_mode(cli, parse_cvp(&text)?)?;
    let decision = match args.algo.as_str() {
        "oracle" => {
            let (min_pow, argmin) = brute_binary_cvp(&inst)?;
            println!("stat dist_pow {}", min_pow.f64());
            println!("stat queries {}", 1u64 << inst.rank());
            let d = decide_cvp(&inst, &min_pow);
            if d == Decision::Yes {
                println!(
                    "stat witness {}",
                    argmin.0.iter().map(|y| y.to_string()).collect::<String>()
                );
            }
            d
        }
        _ => {
            let split = match args.a {
                Some(a) => SplitConfig::fraction(inst.rank(), a)?,
                None => choose_split(inst.rank(), None)?,
            };
            let opts = MitmOptions {
                backend: backend_of(&args.backend),
                audit: args.audit,
                seed: cli.seed,
            };
            let (d, stats) = solve_binary_cvp_mitm(&inst, &split, &opts)?;
            println!("stat index_size {}", stats.index_size);
            println!("stat queries {}", stats.queries);
            if let Some(lsh) = &stats.lsh {
                println!("stat lsh_tables {}", lsh.l);
                println!("stat lsh_functions {}", lsh.k);
            }
            if let Some(w) = &stats.witness {
                println!(
                    "stat witness {}",
                    w.0.iter().map(|y| y.to_string()).collect::<String>()
                );
            }
            d
        }
    };
    println!("decision {decision}");
    eprintln!("solve: {decision}");
    Ok(decision_exit(decision))
}

fn backend_of(s: &str) -> Backend {
    if s == "lsh" {
        Backend::Lsh
    } else {
        Backend::Exact
    }
}

fn cmd_certify(cli: &Cli, args: &CertifyArgs) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&args.input)?;
    let (g, gap) = parse_graph(&text)?;
    let g = rhombus_core::graph::normalize_weights(&g);
    let iota = match &args.iota {
        Some(s) => parse_pos_rat("iota", s)?,
        None => choose_iota(&g, &gap, 0.01)?,
    };
    let mode = if g.is_unit_weight() {
        ReductionMode::Unweighted
    } else {
        ReductionMode::Weighted
    };
    let _ = cli;
    let report = certify_lemmas(&g, &gap, &ReductionParams::new(iota, mode)?)?;
    print!("{report}");
    let ok = report.all_pass();
    eprintln!("certify: {}", if ok { "all checks pass" } else { "CHECKS FAILED" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_pipeline(cli: &Cli, args: &PipelineArgs) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&args.input)?;
    let (g, gap) = parse_graph(&text)?;
    let opts = PipelineOptions {
        solver: if args.algo == "mitm" {
            SolverKind::Mitm
        } else {
            SolverKind::Oracle
        },
        backend: backend_of(&args.backend),
        a: args.a,
        audit: args.audit,
        seed: cli.seed,
        iota: match &args.iota {
            Some(s) => Some(parse_pos_rat("iota", s)?),
            None => None,
        },
    };
    let report = run_pipeline(&g, &gap, &opts)?;
    for (k, v) in &report.entries {
        println!("{k} {v}");
    }
    eprintln!("pipeline: {}", report.decision);
    Ok(decision_exit(report.decision))
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> Result<ExitCode, Error> {
    let gap = GapSpec::new(
        parse_pos_rat("epsilon", &args.epsilon)?,
        parse_pos_rat("c", &args.c)?,
        parse_pos_rat("p", &args.p)?,
    )?;
    if args.min_n < 4 || args.max_n < args.min_n || args.step == 0 {
        return Err(Error::Validation(
            "need 4 <= min_n <= max_n and step >= 1".into(),
        ));
    }
    let mut lines = String::from("# n queries index_size\n");
    let mut n = args.min_n;
    while n <= args.max_n {
        let spec = PlantSpec {
            n,
            m: (n * args.density).min(n * (n - 1) / 2),
            gap: gap.clone(),
            seed: cli.seed.wrapping_add(n as u64),
            w_max: Rat::from_integer(1.into()),
        };
        let g = generate_planted_yes(&spec)?;
        let opts = PipelineOptions {
            solver: SolverKind::Mitm,
            backend: backend_of(&args.backend),
            a: None,
            audit: true,
            seed: cli.seed.wrapping_add(n as u64),
            iota: None,
        };
        let start = std::time::Instant::now();
        let report = run_pipeline(&g, &gap, &opts)?;
        let ms = start.elapsed().as_millis();
        let queries = report.get("queries").unwrap_or("0").to_string();
        let index = report.get("index_size").unwrap_or("0").to_string();
        lines.push_str(&format!("bench {n} {queries} {index}\n"));
        eprintln!(
            "bench n = {n}: decision {}, {queries} queries, {index} points, {ms} ms",
            report.decision
        );
        n += args.step;
    }
    emit(&args.out, &lines)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_cost(args: &CostArgs) -> Result<ExitCode, Error> {
    println!("exp ar15_rho {}", cost::ar15_rho(args.gamma, args.p)?);
    println!(
        "exp classical_exponent {}",
        cost::classical_exponent(args.gamma, args.p)?
    );
    if args.p == 2 {
        println!("exp quantum_exponent {}", cost::quantum_exponent(args.gamma)?);
    }
    if let Some(n) = args.n {
        println!(
            "exp hard_regime_gamma_bound {}",
            cost::hard_regime_gamma_bound(n, args.p as f64)?
        );
    }
    if let Some(c) = args.c {
        println!("exp max_eps_exponent {}", cost::max_eps_exponent(c)?);
    }
    Ok(ExitCode::SUCCESS)
}
