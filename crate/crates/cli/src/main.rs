//! `sl2lines`: generate, certify and export biangular line packings, and run
//! the self-test battery.
//!
//! Exit codes: 0 success, 1 certification failure, 2 bad parameters,
//! 3 I/O or format error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use sl2lines_core::packing::{build_phi_even, build_phi_odd, even_representation, odd_representation};
use sl2lines_core::selftest::{run_plan, SelftestPlan};
use sl2lines_core::{full_certificate, gram, Error, GroupElement, LineSystem, RepStrategy, Representation};

/// Largest even `q` whose Gram matrix (`(q² - 1)²` entries) fits comfortably in memory.
const MAX_EVEN_Q: u32 = 32;
const MAX_ODD_Q: u32 = 81;
const DEFAULT_OUT: &str = "out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ThetaArg {
    Sqrt,
    First,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CommandName {
    Generate,
    Certify,
    Export,
    Selftest,
}

/// Mirror of the command-line flags, read from `--config`. Flags given on
/// the command line take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    command: Option<CommandName>,
    family: Option<FamilyArg>,
    q: Option<u32>,
    #[serde(default)]
    qs: Vec<u32>,
    theta: Option<ThetaArg>,
    out: Option<PathBuf>,
    input: Option<PathBuf>,
    format: Option<FormatArg>,
    threads: Option<usize>,
    verbosity: Option<u8>,
    extended: Option<bool>,
}

#[derive(Parser)]
#[command(name = "sl2lines", version, about = "Optimal biangular line packings from SL(2, q) representations")]
struct Cli {
    /// JSON file with defaults for any flag, including the command itself
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for Gram and certification (default: available cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print timings to stderr
    #[arg(long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(clap::Args, Default)]
struct FamilyOpts {
    /// even: q = 2^(2k+1), real lines in dimension q - 1; odd: q = 3^k, two complex systems in dimension (q - 1)/2
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,

    #[arg(long)]
    q: Option<u32>,

    /// Circle representatives (sqrt is available for even q only)
    #[arg(long, value_enum)]
    theta: Option<ThetaArg>,

    /// Output directory, created if absent [default: ./out]
    #[arg(long)]
    out: Option<PathBuf>,

    /// json: line systems; csv: line systems plus Gram data (generate) or Gram data only (export)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family member, write it and print its summary line
    Generate(FamilyOpts),
    /// Certify a line-system JSON file and write its certificate
    Certify {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write audit artifacts: Bessel values and generator matrices (json) or Gram data (csv)
    Export(FamilyOpts),
    /// Run the invariant suites
    Selftest {
        /// Orders to test (repeatable); powers of 2 above 32 run in values-only mode
        #[arg(long)]
        q: Vec<u32>,
        /// Also run q = 32 and q = 27, and q = 128 values-only
        #[arg(long)]
        extended: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn params(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    fn certification(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Unsupported(_) => 2,
            Error::Format(_) => 3,
            Error::Invariant(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Flags resolved against the config file and defaults.
struct Resolved {
    family: Option<FamilyArg>,
    q: Option<u32>,
    theta: Option<ThetaArg>,
    out: PathBuf,
    format: FormatArg,
    verbose: bool,
}

fn resolve(opts: FamilyOpts, cfg: &RunConfig, verbose: bool) -> Resolved {
    Resolved {
        family: opts.family.or(cfg.family),
        q: opts.q.or(cfg.q),
        theta: opts.theta.or(cfg.theta),
        out: opts.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        format: opts.format.or(cfg.format).unwrap_or(FormatArg::Json),
        verbose,
    }
}

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::io(format!("bad config {}: {e}", path.display())))
}

fn family_and_q(r: &Resolved) -> CliResult<(FamilyArg, u32)> {
    let family = r.family.ok_or_else(|| Failure::params("--family is required (even or odd)"))?;
    let q = r.q.ok_or_else(|| Failure::params("--q is required"))?;
    let cap = match family {
        FamilyArg::Even => MAX_EVEN_Q,
        FamilyArg::Odd => MAX_ODD_Q,
    };
    if q > cap {
        return Err(Failure::params(format!(
            "q = {q} exceeds the supported maximum {cap} for the {} family (even: q = 2^(2k+1) <= {MAX_EVEN_Q}; odd: q = 3^k <= {MAX_ODD_Q})",
            if family == FamilyArg::Even { "even" } else { "odd" }
        )));
    }
    Ok((family, q))
}

fn strategy(family: FamilyArg, theta: Option<ThetaArg>) -> CliResult<RepStrategy> {
    match (family, theta) {
        (_, None) => Ok(RepStrategy::default_for(family == FamilyArg::Even)),
        (FamilyArg::Odd, Some(ThetaArg::Sqrt)) => Err(Failure::params("--theta sqrt needs even q; use --theta first")),
        (FamilyArg::Even, Some(ThetaArg::First)) => {
            Err(Failure::params("the even family is defined with square-root representatives; use --theta sqrt"))
        }
        (_, Some(ThetaArg::Sqrt)) => Ok(RepStrategy::Sqrt),
        (_, Some(ThetaArg::First)) => Ok(RepStrategy::First),
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

/// The systems of a family member, each with its file stem.
fn build(family: FamilyArg, q: u32, theta: RepStrategy) -> CliResult<Vec<(String, LineSystem)>> {
    Ok(match family {
        FamilyArg::Even => vec![(format!("even-q{q}"), build_phi_even(q)?)],
        FamilyArg::Odd => {
            let (plus, minus) = build_phi_odd(q, theta)?;
            vec![(format!("odd-plus-q{q}"), plus), (format!("odd-minus-q{q}"), minus)]
        }
    })
}

fn summary(sys: &LineSystem, coherence: sl2lines_core::Rational) -> String {
    let family = sys.family.map(|f| f.as_str()).unwrap_or("custom");
    let q = sys.q.map(|q| q.to_string()).unwrap_or_else(|| "-".into());
    format!(
        "family={family} q={q} N={} dim={} coherence^2={}/{}",
        sys.len(),
        sys.dim,
        coherence.numer(),
        coherence.denom()
    )
}

fn cmd_generate(r: Resolved) -> CliResult<()> {
    let (family, q) = family_and_q(&r)?;
    let theta = strategy(family, r.theta)?;
    let start = Instant::now();
    let systems = build(family, q, theta)?;
    ensure_dir(&r.out)?;
    for (stem, sys) in &systems {
        let g = gram(sys)?;
        write(&r.out.join(format!("{stem}.json")), &sys.to_json()?)?;
        if r.format == FormatArg::Csv {
            write(&r.out.join(format!("{stem}.gram.csv")), &g.to_csv())?;
        }
        println!("{}", summary(sys, g.coherence()?));
    }
    if r.verbose {
        eprintln!("generated in {:.2?}", start.elapsed());
    }
    Ok(())
}

fn cmd_certify(input: Option<PathBuf>, out: PathBuf, verbose: bool) -> CliResult<()> {
    let input = input.ok_or_else(|| Failure::params("--input is required"))?;
    let text = fs::read_to_string(&input).map_err(|e| Failure::io(format!("cannot read {}: {e}", input.display())))?;
    let sys = LineSystem::from_json(&text).map_err(|e| Failure::io(e.to_string()))?;
    let start = Instant::now();
    let cert = full_certificate(&sys)?;
    ensure_dir(&out)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("system");
    write(&out.join(format!("{stem}.certificate.json")), &cert.to_json()?)?;
    print!("{}", cert.render_text());
    if verbose {
        eprintln!("certified in {:.2?}", start.elapsed());
    }
    match cert.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::certification(format!("certification failed: {} ({})", c.name, c.detail))),
    }
}

fn generator_matrices(rep: &Representation, family: FamilyArg) -> CliResult<String> {
    let f = rep.field();
    let (zero, one) = (f.element(0), f.from_int(1));
    let xi = f.generator();
    let gens = [
        GroupElement::new(f, zero, f.neg(one), one, zero)?,
        GroupElement::new(f, one, one, zero, one)?,
        GroupElement::new(f, xi, zero, zero, f.inv(xi)?)?,
    ];
    let mut mats = Vec::new();
    for g in &gens {
        match family {
            FamilyArg::Even => mats.push(rep.even(g)?),
            FamilyArg::Odd => {
                let (plus, minus) = rep.pi2_blocks(g)?;
                mats.push(plus);
                mats.push(minus);
            }
        }
    }
    let values = mats
        .iter()
        .map(|m| Ok(serde_json::from_str::<serde_json::Value>(&m.to_json()?).map_err(Error::from)?))
        .collect::<CliResult<Vec<_>>>()?;
    serde_json::to_string_pretty(&values).map_err(|e| Failure::io(e.to_string()))
}

fn cmd_export(r: Resolved) -> CliResult<()> {
    let (family, q) = family_and_q(&r)?;
    let theta = strategy(family, r.theta)?;
    ensure_dir(&r.out)?;
    match r.format {
        FormatArg::Json => {
            let rep = match family {
                FamilyArg::Even => even_representation(q)?,
                FamilyArg::Odd => odd_representation(q, theta)?,
            };
            let stem = match family {
                FamilyArg::Even => format!("even-q{q}"),
                FamilyArg::Odd => format!("odd-q{q}"),
            };
            write(&r.out.join(format!("{stem}.bessel.json")), &rep.table().to_json(rep.ext())?)?;
            write(&r.out.join(format!("{stem}.matrices.json")), &generator_matrices(&rep, family)?)?;
            println!("wrote {stem}.bessel.json {stem}.matrices.json");
        }
        FormatArg::Csv => {
            for (stem, sys) in build(family, q, theta)? {
                write(&r.out.join(format!("{stem}.gram.csv")), &gram(&sys)?.to_csv())?;
                println!("wrote {stem}.gram.csv");
            }
        }
    }
    Ok(())
}

fn cmd_selftest(qs: Vec<u32>, extended: bool, out: Option<PathBuf>) -> CliResult<()> {
    let plan = if !qs.is_empty() {
        for &q in &qs {
            let even_ok = q.is_power_of_two() && q.trailing_zeros() % 2 == 1 && (8..=128).contains(&q);
            let odd_ok = [9, 27, 81].contains(&q);
            if !(even_ok || odd_ok) {
                return Err(Failure::params(format!(
                    "selftest supports q = 2^(2k+1) in 8..=128 or q = 3^k in 9..=81, got {q}"
                )));
            }
        }
        SelftestPlan::for_orders(&qs)
    } else if extended {
        SelftestPlan::extended()
    } else {
        SelftestPlan::quick()
    };
    let results = run_plan(&plan);
    let mut failed = 0;
    for s in &results {
        let verdict = if s.passed() { "PASS" } else { "FAIL" };
        println!("[{verdict}] {} ({} checks, {:.2?})", s.name, s.checks.len(), s.elapsed);
        for c in s.checks.iter().filter(|c| !c.passed) {
            println!("    {c}");
        }
        failed += usize::from(!s.passed());
    }
    println!("selftest suites={} failed={failed}", results.len());
    if let Some(dir) = out {
        ensure_dir(&dir)?;
        let report = serde_json::to_string_pretty(&results).map_err(|e| Failure::io(e.to_string()))?;
        write(&dir.join("selftest.json"), &report)?;
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::certification(format!("{failed} suite(s) failed")))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = load_config(cli.config.as_deref())?;
    if let Some(n) = cli.threads.or(cfg.threads) {
        if n == 0 {
            return Err(Failure::params("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::params(e.to_string()))?;
    }
    let verbose = cli.verbose > 0 || cfg.verbosity.unwrap_or(0) > 0;
    let command = match (cli.command, cfg.command) {
        (Some(c), _) => c,
        (None, Some(CommandName::Generate)) => Command::Generate(FamilyOpts::default()),
        (None, Some(CommandName::Export)) => Command::Export(FamilyOpts::default()),
        (None, Some(CommandName::Certify)) => Command::Certify { input: None, out: None },
        (None, Some(CommandName::Selftest)) => Command::Selftest { q: vec![], extended: false, out: None },
        (None, None) => return Err(Failure::params("no command given (generate, certify, export or selftest)")),
    };
    match command {
        Command::Generate(opts) => cmd_generate(resolve(opts, &cfg, verbose)),
        Command::Export(opts) => cmd_export(resolve(opts, &cfg, verbose)),
        Command::Certify { input, out } => cmd_certify(
            input.or_else(|| cfg.input.clone()),
            out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            verbose,
        ),
        Command::Selftest { q, extended, out } => {
            let qs = if q.is_empty() { cfg.qs.clone() } else { q };
            cmd_selftest(qs, extended || cfg.extended.unwrap_or(false), out.or_else(|| cfg.out.clone()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
