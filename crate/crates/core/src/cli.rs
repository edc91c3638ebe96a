//! Command-line front end. Every subcommand writes a CSV table (header row,
//! comma separated, `\n` line endings) to `--out` or stdout.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::channel::ChannelParams;
use crate::distill::{
    cad_threshold_numeric, distilled_betas, eve_guess_probs, min_secure_block_length,
    security_margin, srm_closed_form, threshold_table, DEFAULT_L_MAX, DEFAULT_TOL,
};
use crate::error::Error;
use crate::sim::{run_cad_experiment, SimConfig};
use crate::srm::srm_success_probability;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for inputs outside an operation's domain, or I/O failure.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tomocad",
    version,
    about = "Noise thresholds, information curves and Monte Carlo runs for advantage distillation under coherent attacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// QED and CAD noise thresholds per dimension (columns n,e_qed,e_cad[,e_cad_numeric])
    Thresholds(ThresholdsArgs),
    /// Exact and asymptotic informations per block length
    Curves(CurvesArgs),
    /// Monte Carlo run of the CAD protocol under the coherent attack
    Simulate(SimulateArgs),
    /// Compare the closed-form SRM success probability with the Gram-matrix oracle
    VerifySrm(VerifySrmArgs),
    /// Smallest secure block length, or "none"
    MinL(MinLArgs),
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdsArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
    /// Add the finite-block-length threshold found by bisection
    #[arg(long)]
    pub numeric: bool,
    /// Largest block length searched by --numeric
    #[arg(long, default_value_t = DEFAULT_L_MAX)]
    pub l_max: usize,
    /// Bisection tolerance for --numeric
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// Dimension of the qunits
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Noise parameter in [0, 1]
    #[arg(long)]
    pub noise: f64,
    #[arg(long, default_value_t = 32)]
    pub l_max: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub noise: f64,
    #[arg(long, default_value_t = 2)]
    pub block_length: usize,
    /// Number of raw blocks
    #[arg(long, default_value_t = 100_000)]
    pub blocks: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simulate basis choices and discard mismatched pairs
    #[arg(long)]
    pub sift: bool,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct VerifySrmArgs {
    /// Largest dimension checked (from 2)
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Overlap grid points on [0, 1], endpoints included
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct MinLArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub noise: f64,
    #[arg(long, default_value_t = 64)]
    pub l_max: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Formats a number with 12 significant digits, like C's `%.12g`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    format_sig(x.unwrap_or(f64::NAN))
}

type Table = csv::Writer<Vec<u8>>;

fn table() -> Table {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(t: Table) -> Result<Vec<u8>, CliError> {
    t.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn thresholds(args: &ThresholdsArgs) -> Result<Vec<u8>, CliError> {
    let rows = threshold_table(args.n_min, args.n_max)?;
    let mut t = table();
    if args.numeric {
        t.write_record(["n", "e_qed", "e_cad", "e_cad_numeric"])?;
    } else {
        t.write_record(["n", "e_qed", "e_cad"])?;
    }
    for row in rows {
        let mut rec = vec![row.n.to_string(), format_sig(row.e_qed), format_sig(row.e_cad)];
        if args.numeric {
            rec.push(format_sig(cad_threshold_numeric(row.n, args.l_max, args.tol)?));
        }
        t.write_record(&rec)?;
    }
    finish(t)
}

fn curves(args: &CurvesArgs) -> Result<Vec<u8>, CliError> {
    let params = ChannelParams::from_noise(args.n, args.noise)?;
    if args.l_max < 1 {
        return Err(Error::BlockLength { min: 1, got: 0 }.into());
    }
    let mut t = table();
    t.write_record([
        "L", "i_ab", "i_ae", "i_ab_asym", "i_ae_asym", "margin", "beta0L", "eta0L", "p_accept",
    ])?;
    for l in 1..=args.l_max {
        let report = security_margin(&params, l)?;
        let block = distilled_betas(&params, l)?;
        let eve = eve_guess_probs(&params, l)?;
        t.write_record([
            l.to_string(),
            format_sig(report.i_ab),
            format_sig(report.i_ae),
            opt(report.i_ab_asym),
            opt(report.i_ae_asym),
            format_sig(report.margin),
            format_sig(block.beta0),
            format_sig(eve.eta0),
            format_sig(block.p_accept),
        ])?;
    }
    finish(t)
}

fn simulate(args: &SimulateArgs) -> Result<Vec<u8>, CliError> {
    let params = ChannelParams::from_noise(args.n, args.noise)?;
    let config = SimConfig {
        params,
        block_length: args.block_length,
        n_blocks: args.blocks,
        seed: args.seed,
        simulate_sifting: args.sift,
    };
    let r = run_cad_experiment(&config)?;
    let exact = security_margin(&params, args.block_length)?;
    let block = distilled_betas(&params, args.block_length)?;

    let mut t = table();
    t.write_record(["metric", "value"])?;
    let ints: [(&str, u64); 11] = [
        ("n", args.n as u64),
        ("block_length", args.block_length as u64),
        ("blocks", args.blocks as u64),
        ("seed", r.seed()),
        ("sift", args.sift as u64),
        ("accepted", r.accepted),
        ("rejected", r.rejected),
        ("case1", r.case1),
        ("case2", r.accepted - r.case1),
        ("raw_pairs", r.raw_pairs),
        ("sifted_pairs", r.sifted_pairs),
    ];
    for (name, v) in ints {
        t.write_record([name, &v.to_string()])?;
    }
    let reals = [
        ("noise", args.noise),
        ("sift_rate", r.sift_rate()),
        ("p_accept", r.p_accept),
        ("p_accept_exact", block.p_accept),
        ("beta0L", r.beta0l),
        ("beta0L_exact", block.beta0),
        ("i_ab_hat", r.i_ab_hat),
        ("i_ab_exact", exact.i_ab),
        ("i_ae_hat", r.i_ae_hat),
        ("i_ae_exact", exact.i_ae),
    ];
    for (name, v) in reals {
        t.write_record([name, &format_sig(v)])?;
    }
    let joint_ae = r.joint_ae();
    for (name, table) in [("joint_ab", &r.joint_ab), ("joint_ae", &joint_ae)] {
        for a in 0..table.rows() {
            for b in 0..table.cols() {
                t.write_record([format!("{name}.{a}.{b}"), table.get(a, b).to_string()])?;
            }
        }
    }
    finish(t)
}

fn verify_srm(args: &VerifySrmArgs) -> Result<(Vec<u8>, usize), CliError> {
    if args.n_max < 2 {
        return Err(Error::Dimension(args.n_max).into());
    }
    if args.grid < 2 {
        return Err(CliError::Invalid(format!(
            "grid must have at least 2 points, got {}",
            args.grid
        )));
    }
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Error::Tolerance(args.tol).into());
    }
    let mut t = table();
    t.write_record(["n", "overlap", "closed_form", "oracle", "abs_diff", "pass"])?;
    let mut failures = 0;
    for n in 2..=args.n_max {
        for k in 0..args.grid {
            let overlap = k as f64 / (args.grid - 1) as f64;
            let closed = srm_closed_form(n, overlap);
            let oracle = srm_success_probability(n, overlap)?;
            let diff = (closed - oracle).abs();
            let pass = diff < args.tol;
            failures += usize::from(!pass);
            t.write_record([
                n.to_string(),
                format_sig(overlap),
                format_sig(closed),
                format_sig(oracle),
                format_sig(diff),
                pass.to_string(),
            ])?;
        }
    }
    Ok((finish(t)?, failures))
}

fn min_l(args: &MinLArgs) -> Result<Vec<u8>, CliError> {
    let params = ChannelParams::from_noise(args.n, args.noise)?;
    let answer = match min_secure_block_length(&params, args.l_max)? {
        Some(l) => l.to_string(),
        None => "none".to_string(),
    };
    Ok(format!("{answer}\n").into_bytes())
}

fn emit(bytes: &[u8], out: &OutArg, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &out.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn execute(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Thresholds(a) => emit(&thresholds(a)?, &a.out, stdout),
        Command::Curves(a) => emit(&curves(a)?, &a.out, stdout),
        Command::Simulate(a) => emit(&simulate(a)?, &a.out, stdout),
        Command::MinL(a) => emit(&min_l(a)?, &a.out, stdout),
        Command::VerifySrm(a) => {
            let (bytes, failures) = verify_srm(a)?;
            emit(&bytes, &a.out, stdout)?;
            if failures > 0 {
                return Err(CliError::Failed(format!(
                    "{failures} grid points exceed tolerance {}",
                    a.tol
                )));
            }
            Ok(())
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand.
///
/// Returns the process exit status: [`EXIT_OK`], [`EXIT_VALIDATION`] or
/// [`EXIT_USAGE`]. Diagnostics go to `stderr` as a single line.
pub fn run_command<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_VALIDATION
        }
    }
}
