//! Command-line surface: instance generation, solving, the decisional test,
//! bound evaluation, the counting oracle, and the experiment suites.
//!
//! Exit codes: 0 on success, 1 with a JSON error envelope on stderr for any
//! module error, 2 for invalid flags (clap).

mod bench;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

use hidden_lattice::bounds::{self, AnalysisParams};
use hidden_lattice::io::{
    self, algorithm_from_str, hlp_to_file, load_instance, nhlp_to_file, verdict_to_file, ErrorFile,
    InstanceFile, LoadedInstance,
};
use hidden_lattice::lab::{self, GenKind, GenSpec};
use hidden_lattice::lll::ReductionParams;
use hidden_lattice::matrix::{triangular_contains, triangular_span_mod};
use hidden_lattice::solve::{
    decide_dhlp, solve_hlp, solve_nhlp, CompletionMode, DhlpSide, SolveReport,
};
use hidden_lattice::transforms::completion;

#[derive(Parser)]
#[command(
    name = "hlp",
    about = "Exact-arithmetic solver toolkit for hidden lattice problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded random instance and write it as JSON.
    Gen(GenArgs),
    /// Solve an instance file with the orthogonal (I) or congruence (II)
    /// route and re-verify the answer.
    Solve(SolveArgs),
    /// Decide whether a small hidden lattice exists (norm-jump detection).
    Decide(DecideArgs),
    /// Solve a noisy instance (embedding + integer kernel split).
    Nhlp(NhlpArgs),
    /// Evaluate heuristic and proven parameter bounds.
    Bounds(BoundsArgs),
    /// Brute-force oracles.
    Oracle(OracleArgs),
    /// Run a scaled experiment suite and write a CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Modulus exponent: N is the smallest prime above 2^log_n (or
    /// 2^log_n + random odd offset with --composite).
    #[arg(long = "log-n", default_value_t = 60)]
    log_n: u32,
    /// Hidden basis entries are uniform in [-alpha, alpha].
    #[arg(long, default_value_t = 2)]
    alpha: i64,
    /// Noise norm bound (nhlp).
    #[arg(long)]
    rho: Option<i64>,
    /// Prime size in bits (crt-acd).
    #[arg(long)]
    eta: Option<u64>,
    /// Residue size in bits (crt-acd).
    #[arg(long = "rho-acd")]
    rho_acd: Option<u64>,
    /// Overridable through HLP_SEED.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use a composite modulus 2^log_n + odd offset instead of a prime.
    #[arg(long, default_value_t = false)]
    composite: bool,
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Hlp,
    Nhlp,
    CrtAcd,
    Hssp,
    Rank2Preset,
}

#[derive(Args)]
struct SolveArgs {
    /// I (orthogonal lattice) or II (congruence lattice).
    #[arg(long, default_value = "I")]
    algo: String,
    #[arg(long, default_value = "0.99")]
    delta: String,
    #[arg(long, value_enum, default_value_t = CompletionArg::Auto)]
    completion: CompletionArg,
    #[arg(long)]
    input: PathBuf,
    /// Emit the full report as JSON instead of a summary.
    #[arg(long, default_value_t = false)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompletionArg {
    Auto,
    #[value(name = "double-orth")]
    DoubleOrth,
    #[value(name = "mod-n")]
    ModN,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long)]
    input: PathBuf,
    /// Threshold on the log2 norm jump.
    #[arg(long, default_value_t = 32.0)]
    tau: f64,
    #[arg(long, value_enum, default_value_t = SideArg::Orth)]
    side: SideArg,
    #[arg(long, default_value = "0.99")]
    delta: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Orth,
    Cong,
}

#[derive(Args)]
struct NhlpArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "I")]
    algo: String,
    #[arg(long, default_value = "0.99")]
    delta: String,
    #[arg(long, default_value_t = false)]
    json: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: usize,
    #[arg(long = "log-mu")]
    log_mu: f64,
    #[arg(long = "log-iota", default_value_t = 0.03)]
    log_iota: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.99)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Enables the density invariant, cost and k/l diagnostics.
    #[arg(long = "log-n")]
    log_n: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    which: OracleCmd,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Count vectors orthogonal to t modulo N by exhaustion.
    CountOrth {
        /// Comma-separated entries of t, e.g. 2,4
        #[arg(long)]
        t: String,
        #[arg(long)]
        modulus: String,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long)]
    out: PathBuf,
    /// Overridable through HLP_SEED.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Table4,
    Table5,
    Table2,
    SuccessRate,
}

type CmdResult = Result<(), ErrorFile>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Decide(args) => cmd_decide(args),
        Cmd::Nhlp(args) => cmd_nhlp(args),
        Cmd::Bounds(args) => cmd_bounds(args),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::Bench(args) => bench::run(args.suite, seed_override(args.seed), &args.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::to_string(&e).expect("error serialization")
            );
            ExitCode::FAILURE
        }
    }
}

fn seed_override(flag: u64) -> u64 {
    match std::env::var("HLP_SEED") {
        Ok(v) => v.parse().unwrap_or(flag),
        Err(_) => flag,
    }
}

/// Parse a decimal string like "0.99" into an exact rational.
fn parse_delta(s: &str) -> Result<BigRational, ErrorFile> {
    let bad = || ErrorFile::new("invalid_delta", format!("cannot parse delta {s:?}"));
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow::pow(BigInt::from(10), frac.len());
        Ok(BigRational::new(num, den))
    } else if let Some((num, den)) = s.split_once('/') {
        Ok(BigRational::new(
            num.parse().map_err(|_| bad())?,
            den.parse().map_err(|_| bad())?,
        ))
    } else {
        Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
    }
}

fn reduction_params(delta: &str) -> Result<ReductionParams, ErrorFile> {
    let params = ReductionParams {
        delta: parse_delta(delta)?,
        ..ReductionParams::default()
    };
    params
        .validate()
        .map_err(|e| ErrorFile::new("invalid_delta", e))?;
    Ok(params)
}

fn read_instance(path: &PathBuf) -> Result<LoadedInstance, ErrorFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ErrorFile::new("io", format!("{}: {e}", path.display())))?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| ErrorFile::new("parse", e))?;
    load_instance(&file).map_err(|e| ErrorFile::new("invalid_instance", e))
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let seed = seed_override(args.seed);
    let gen_err = |e: lab::LabError| ErrorFile::new("generation", e);
    let file = match args.kind {
        KindArg::Hlp => {
            let mut spec = GenSpec::hlp(args.n, args.m, args.r, args.log_n, args.alpha, seed);
            spec.prime_modulus = !args.composite;
            hlp_to_file(&lab::gen_hlp(&spec).map_err(gen_err)?, "hlp")
        }
        KindArg::Nhlp => {
            let rho = args
                .rho
                .ok_or_else(|| ErrorFile::new("invalid_flags", "nhlp needs --rho"))?;
            let mut spec = GenSpec::nhlp(args.n, args.m, args.r, args.log_n, args.alpha, rho, seed);
            spec.prime_modulus = !args.composite;
            spec.kind = GenKind::Nhlp;
            nhlp_to_file(&lab::gen_nhlp(&spec).map_err(gen_err)?)
        }
        KindArg::CrtAcd => {
            let eta = args
                .eta
                .ok_or_else(|| ErrorFile::new("invalid_flags", "crt-acd needs --eta"))?;
            let rho = args
                .rho_acd
                .ok_or_else(|| ErrorFile::new("invalid_flags", "crt-acd needs --rho-acd"))?;
            hlp_to_file(
                &lab::gen_crt_acd(args.n, eta, rho, seed).map_err(gen_err)?,
                "crt_acd",
            )
        }
        KindArg::Hssp => hlp_to_file(
            &lab::gen_hssp(args.n, args.m, args.log_n, seed).map_err(gen_err)?,
            "hssp",
        ),
        KindArg::Rank2Preset => hlp_to_file(
            &lab::gen_rank2(args.m, args.alpha, args.log_n, seed).map_err(gen_err)?,
            "rank2_preset",
        ),
    };
    let json = serde_json::to_string_pretty(&file).expect("instance serialization");
    std::fs::write(&args.out, json + "\n")
        .map_err(|e| ErrorFile::new("io", format!("{}: {e}", args.out.display())))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

/// Independent verification: the public rows lie in the recovered lattice
/// mod N, and the recovered basis is complete (equal to its own completion).
fn verify_hlp_solution(
    inst: &hidden_lattice::solve::HlpInstance,
    report: &SolveReport,
    params: &ReductionParams,
) -> bool {
    let span = triangular_span_mod(report.recovered.matrix(), &inst.modulus);
    let members = inst
        .m_basis
        .matrix()
        .iter_rows()
        .all(|row| triangular_contains(&span, row));
    let complete = completion(&report.recovered, params)
        .map(|c| c.gram_det() == report.recovered.gram_det())
        .unwrap_or(false);
    members && complete
}

fn print_report(report: &SolveReport, verified: bool, json: bool) {
    let file = io::report_to_file(report, verified);
    if json {
        println!("{}", serde_json::to_string_pretty(&file).expect("report"));
        return;
    }
    println!(
        "algorithm {} recovered rank {} (sigma_out = {:.4}, log2 = {:.3})",
        file.algorithm,
        report.recovered.rank(),
        file.sigma_out,
        report.recovered.log2_sigma(),
    );
    println!(
        "reduction: {} swaps, {} size reductions, max {} bits",
        file.swap_count, file.size_reduction_count, file.max_intermediate_bits
    );
    println!(
        "timing: step1 {:.1} ms, step2 {:.1} ms",
        file.step1_ms, file.step2_ms
    );
    match report.success {
        Some(true) => println!("success: true (matches planted completion)"),
        Some(false) => println!("success: false (does not match planted completion)"),
        None => println!("success: unknown (no planted truth)"),
    }
    println!("verified: {verified}");
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let algo = algorithm_from_str(&args.algo)
        .map_err(|_| ErrorFile::new("invalid_flags", format!("unknown algo {:?}", args.algo)))?;
    let params = reduction_params(&args.delta)?;
    let mode = match args.completion {
        CompletionArg::Auto => CompletionMode::Auto,
        CompletionArg::DoubleOrth => CompletionMode::DoubleOrthogonal,
        CompletionArg::ModN => CompletionMode::ModulusLocal,
    };
    let LoadedInstance::Hlp(inst) = read_instance(&args.input)? else {
        return Err(ErrorFile::new(
            "invalid_instance",
            "this is a noisy instance; use the nhlp subcommand",
        ));
    };
    let report = solve_hlp(&inst, &params, algo, mode).map_err(|e| ErrorFile::new("solve", e))?;
    let verified = verify_hlp_solution(&inst, &report, &params);
    print_report(&report, verified, args.json);
    if !verified {
        return Err(ErrorFile::new(
            "verification",
            "recovered basis failed the independent verification pass",
        ));
    }
    Ok(())
}

fn cmd_decide(args: DecideArgs) -> CmdResult {
    let params = reduction_params(&args.delta)?;
    let LoadedInstance::Hlp(inst) = read_instance(&args.input)? else {
        return Err(ErrorFile::new(
            "invalid_instance",
            "decide expects a plain instance file",
        ));
    };
    let side = match args.side {
        SideArg::Orth => DhlpSide::Orthogonal,
        SideArg::Cong => DhlpSide::Congruence,
    };
    let verdict = decide_dhlp(&inst.m_basis, &inst.modulus, args.tau, side, &params)
        .map_err(|e| ErrorFile::new("decide", e))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&verdict_to_file(&verdict)).expect("verdict")
    );
    Ok(())
}

fn cmd_nhlp(args: NhlpArgs) -> CmdResult {
    let algo = algorithm_from_str(&args.algo)
        .map_err(|_| ErrorFile::new("invalid_flags", format!("unknown algo {:?}", args.algo)))?;
    let params = reduction_params(&args.delta)?;
    let LoadedInstance::Nhlp(inst) = read_instance(&args.input)? else {
        return Err(ErrorFile::new(
            "invalid_instance",
            "nhlp expects a noisy instance file (kind = nhlp)",
        ));
    };
    let report = solve_nhlp(&inst, &params, algo).map_err(|e| ErrorFile::new("solve", e))?;
    // Completeness is the verifiable half here; the public rows are noisy,
    // so membership mod N is not expected.
    let verified = completion(&report.recovered, &params)
        .map(|c| c.gram_det() == report.recovered.gram_det())
        .unwrap_or(false);
    print_report(&report, verified, args.json);
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> CmdResult {
    let params = AnalysisParams {
        n: args.n,
        m: args.m,
        r: args.r,
        log_mu: args.log_mu,
        log_iota: args.log_iota,
        theta: args.theta,
        delta: args.delta,
        epsilon: args.epsilon,
        hermite_mode: Default::default(),
        clamp_negative_theta_term: true,
    };
    let report = bounds::evaluate(&params, args.log_n)
        .map_err(|e| ErrorFile::new("param_out_of_range", e))?;
    println!("{}", serde_json::to_string_pretty(&report).expect("bounds"));
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> CmdResult {
    match args.which {
        OracleCmd::CountOrth { t, modulus } => {
            let t: Result<Vec<BigInt>, _> = t.split(',').map(|s| s.trim().parse()).collect();
            let t = t.map_err(|_| ErrorFile::new("invalid_flags", "cannot parse --t"))?;
            let modulus: BigInt = modulus
                .parse()
                .map_err(|_| ErrorFile::new("invalid_flags", "cannot parse --modulus"))?;
            let count = lab::count_orthogonal_mod_oracle(&t, &modulus)
                .map_err(|e| ErrorFile::new("oracle", e))?;
            println!("{count}");
            Ok(())
        }
    }
}
