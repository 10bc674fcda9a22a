//! Command line front end.

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cone::Mode;
use crate::error::{Error, Result};
use crate::frobenius::Expansion;
use crate::input::{Problem, ProblemSpec};
use crate::oracle;
use crate::pipeline::{self, Options};

#[derive(Parser, Debug)]
#[command(name = "dwork-zeta", version, about = "Zeta functions of nondegenerate hypersurfaces over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the zeta function (the default when no subcommand is given).
    Compute(ComputeArgs),
    /// Exhaustive enumeration utilities.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// Input JSON file, or - for standard input.
    pub input: PathBuf,
    /// Target p-adic precision N (otherwise chosen from the coefficient bound).
    #[arg(long)]
    pub precision: Option<u32>,
    /// Use the cruder precision bound.
    #[arg(long)]
    pub crude_precision: bool,
    #[arg(long, value_enum, default_value = "fewnomial")]
    pub expansion: ExpansionArg,
    /// Apply a unimodular change of coordinates shrinking the Newton polytope (toric mode).
    #[arg(long)]
    pub confine: bool,
    /// Cross-check point counts over F_(q^r), r = 1..=R, by enumeration.
    #[arg(long, value_name = "R")]
    pub verify: Option<usize>,
    /// Include the Frobenius matrix in the report.
    #[arg(long)]
    pub emit_matrix: bool,
    /// Search F_(q^k), k <= K, for a singular point on some face before computing.
    #[arg(long, value_name = "K")]
    pub check_nondegenerate: Option<usize>,
    /// Override the mode given in the input file.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Number of derived point counts to report.
    #[arg(long, default_value_t = 5)]
    pub counts: usize,
    /// Enumeration budget for --verify and --check-nondegenerate.
    #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Count points over F_(q^r) for r = 1..=R by exhaustive evaluation.
    Count(OracleArgs),
    /// Recover the zeta function from enumerated counts.
    Zeta(OracleZetaArgs),
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub input: PathBuf,
    #[arg(long, short = 'r', default_value_t = 1)]
    pub r: usize,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Args, Debug)]
pub struct OracleZetaArgs {
    #[command(flatten)]
    pub count: OracleArgs,
    #[arg(long)]
    pub num_deg: usize,
    #[arg(long)]
    pub den_deg: usize,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum ExpansionArg {
    Fewnomial,
    Dense,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Toric,
    Affine,
    Projective,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Toric => Mode::Toric,
            ModeArg::Affine => Mode::Affine,
            ModeArg::Projective => Mode::Projective,
        }
    }
}

#[derive(Serialize)]
struct CountReport {
    mode: Mode,
    p: u64,
    a: usize,
    n: usize,
    counts: Vec<u128>,
}

#[derive(Serialize)]
struct OracleZetaReport {
    mode: Mode,
    counts: Vec<i128>,
    numerator: Vec<i128>,
    denominator: Vec<i128>,
}

fn load(path: &PathBuf, mode: Option<ModeArg>) -> Result<Problem> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?
    };
    let mut spec = ProblemSpec::from_json(&text)?;
    if let Some(m) = mode {
        spec.mode = m.into();
    }
    spec.validate()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn compute(args: &ComputeArgs) -> Result<String> {
    let problem = load(&args.input, args.mode)?;
    if let Some(k) = args.check_nondegenerate {
        if let Some(w) = oracle::find_degeneracy_witness(&problem.field, &problem.poly, k, args.budget)? {
            return Err(Error::NondegeneracyFailure(format!(
                "f restricted to the face spanned by {:?} is singular at {:?} over the degree {} extension",
                w.face_points, w.point, w.extension_degree
            )));
        }
    }
    let opts = Options {
        precision: args.precision,
        crude_precision: args.crude_precision,
        expansion: match args.expansion {
            ExpansionArg::Fewnomial => Expansion::Fewnomial,
            ExpansionArg::Dense => Expansion::Dense,
        },
        confine: args.confine,
        verify: args.verify,
        emit_matrix: args.emit_matrix,
        point_counts: args.counts,
        budget: args.budget,
        ..Options::default()
    };
    Ok(to_json(&pipeline::run(&problem, &opts)?))
}

fn oracle_counts(args: &OracleArgs) -> Result<(Problem, Vec<u128>)> {
    let problem = load(&args.input, args.mode)?;
    let counts = (1..=args.r)
        .map(|r| oracle::count_points(&problem.field, &problem.poly, problem.mode, r, args.budget))
        .collect::<Result<Vec<_>>>()?;
    Ok((problem, counts))
}

/// Executes a parsed command and returns the JSON output.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Compute(args) => compute(args),
        Command::Oracle(OracleCommand::Count(args)) => {
            let (pr, counts) = oracle_counts(args)?;
            Ok(to_json(&CountReport { mode: pr.mode, p: pr.field.p, a: pr.field.a, n: pr.poly.n, counts }))
        }
        Command::Oracle(OracleCommand::Zeta(args)) => {
            let (pr, counts) = oracle_counts(&args.count)?;
            let counts: Vec<i128> = counts.into_iter().map(|c| c as i128).collect();
            let (numerator, denominator) = oracle::zeta_from_counts(&counts, args.num_deg, args.den_deg)?;
            Ok(to_json(&OracleZetaReport { mode: pr.mode, counts, numerator, denominator }))
        }
    }
}

/// Parses arguments, inserting the default `compute` subcommand when none is given.
pub fn parse<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let first = args.get(1).and_then(|a| a.to_str()).map(str::to_owned);
    let explicit = matches!(first.as_deref(), Some("compute" | "oracle" | "help" | "-h" | "--help" | "-V" | "--version"));
    if !explicit && args.len() > 1 {
        args.insert(1, "compute".into());
    }
    Cli::try_parse_from(args)
}

/// Runs the tool: prints the report or an error and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            println!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            eprintln!("hint: {}", e.hint());
            e.exit_code()
        }
    }
}
