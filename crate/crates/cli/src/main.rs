//! `tachyon`: eigenvalue tables, self-force scans and tunneling runs.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use tachyon::nullcone::{count_roots, singular_velocities, write_eigenvalues};
use tachyon::scan::{self, census_of, Census, ScanConfig, ScanResult};
use tachyon::selfforce::Mode;
use tachyon::tunnel::{integrate_1d, integrate_2d, write_trajectory, Outcome, Trajectory};
use tachyon::verify::{run_checks, Fixture};
use tachyon::{BigReal, PrecisionPolicy};
use thiserror::Error;

use config::FileConfig;

/// Rows per flush when a scan streams to a file.
const SCAN_CHUNK: usize = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0} verification check(s) failed")]
    Verify(usize),
    #[error(transparent)]
    Core(#[from] tachyon::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) | CliError::Core(tachyon::Error::Io(_)) => 2,
            CliError::Verify(_) => 3,
            CliError::Core(_) => 1,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "tachyon", version, about = "Self-force and tunneling for superluminal charges")]
struct Cli {
    /// Working precision in decimal digits (starting rung for scans).
    #[arg(long, global = true)]
    digits: Option<u32>,
    /// Relative agreement required between precision rungs.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_digits: Option<u32>,
    /// Worker threads for scans; defaults to available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// TOML file with default settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Singular velocities, one per line.
    Singular {
        #[arg(long, default_value_t = 15)]
        count: u32,
    },
    /// Number of null-cone self-intersections at one velocity.
    Nroots {
        #[arg(long)]
        beta: String,
    },
    /// Coarse sweep of the radial self-force.
    Zscan(SweepArgs),
    /// Uniform window around a velocity, optionally refined by doubling.
    Zoom(ZoomArgs),
    /// Retarded-mode sweep of the azimuthal-to-radial ratio.
    Epsilon(SweepArgs),
    /// Trajectory through a barrier described by a TOML file.
    Tunnel { config: PathBuf },
    /// Self-checks against reference values and oracles.
    Verify {
        /// TOML file overriding the built-in reference values.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    beta_min: Option<String>,
    #[arg(long)]
    beta_max: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// `feynman_wheeler` or `retarded`.
    #[arg(long)]
    mode: Option<String>,
    /// Half-width of the window skipped around each singular velocity.
    #[arg(long)]
    exclusion: Option<String>,
    /// Continue an interrupted run in the output file.
    #[arg(long)]
    resume: bool,
}

#[derive(Debug, Args)]
struct ZoomArgs {
    /// Window center; the first singular velocity when absent.
    #[arg(long)]
    center: Option<String>,
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// Refinement levels; each doubles the sample count.
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    resume: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureFile {
    singular_betas: Option<Vec<String>>,
    singular_betas_16: Option<Vec<String>>,
    seed: Option<u64>,
}

/// Flags merged over the config file.
struct Settings {
    file: FileConfig,
    digits: Option<u32>,
    tol: Option<f64>,
    max_digits: Option<u32>,
    workers: Option<usize>,
    output: Option<PathBuf>,
}

impl Settings {
    fn policy(&self) -> Result<PrecisionPolicy, CliError> {
        let d = PrecisionPolicy::default();
        let p = &self.file.precision;
        Ok(PrecisionPolicy::new(
            self.digits.or(p.digits).unwrap_or(d.start_digits),
            p.growth_factor.unwrap_or(d.growth_factor),
            self.tol.or(p.tol).unwrap_or(d.agreement_tol),
            self.max_digits.or(p.max_digits).unwrap_or(d.max_digits),
        )?)
    }

    fn workers(&self) -> usize {
        self.workers.or(self.file.workers).unwrap_or_else(scan::default_workers)
    }

    fn output(&self) -> Option<PathBuf> {
        self.output.clone().or_else(|| self.file.output.as_ref().map(PathBuf::from))
    }
}

/// Parses a decimal string at the requested precision.
fn parse_decimal(s: &str, digits: u32, what: &str) -> Result<BigReal, CliError> {
    BigReal::parse(s.trim(), digits).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

fn parse_mode(s: &str) -> Result<Mode, CliError> {
    s.parse().map_err(|e: tachyon::Error| CliError::Usage(e.to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Where the one-line summaries go: stdout unless data already occupies it.
fn summary_sink(output: &Option<PathBuf>) -> Box<dyn Write> {
    if output.is_some() {
        Box::new(io::stdout())
    } else {
        Box::new(io::stderr())
    }
}

fn print_census(out: &mut dyn Write, label: &str, c: &Census) -> io::Result<()> {
    writeln!(
        out,
        "{label}: positive={} negative={} alternations={} unconverged={}",
        c.positive, c.negative, c.alternations, c.unconverged
    )
}

fn cmd_singular(s: &Settings, count: u32) -> Result<(), CliError> {
    if count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let digits = s.digits.or(s.file.precision.digits).unwrap_or(30);
    let svs = singular_velocities(count, digits)?;
    match s.output() {
        Some(path) => {
            let mut w = create(&path)?;
            write_eigenvalues(&svs, digits, &mut w)?;
            w.flush()?;
        }
        None => write_eigenvalues(&svs, digits, io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_nroots(s: &Settings, beta: &str) -> Result<(), CliError> {
    let digits = s.digits.or(s.file.precision.digits).unwrap_or(50);
    let beta = parse_decimal(beta, digits, "--beta")?;
    match count_roots(&beta) {
        Ok(n) => println!("{n}"),
        Err(tachyon::Error::AmbiguousCount { lower, upper }) => println!("ambiguous {lower} {upper}"),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

/// Evaluates `config`, streaming to the output file when one is given.
fn run_scan(s: &Settings, config: &ScanConfig, resume: bool) -> Result<ScanResult, CliError> {
    config.validate()?;
    let workers = s.workers();
    match s.output() {
        Some(path) => Ok(scan::run_to_file(config, workers, &path, resume, SCAN_CHUNK)?),
        None => {
            if resume {
                return Err(CliError::Usage("--resume needs --output".into()));
            }
            let result = scan::sweep(config, workers)?;
            scan::write_result(&result, io::stdout().lock())?;
            Ok(result)
        }
    }
}

fn cmd_sweep(s: &Settings, args: &SweepArgs, epsilon: bool) -> Result<(), CliError> {
    let policy = s.policy()?;
    let f = &s.file.scan;
    let (lo, hi, n, mode) = if epsilon { ("4.7", "16", 200, "retarded") } else { ("1.5", "21", 400, "feynman_wheeler") };
    let pick = |flag: &Option<String>, file: &Option<String>, default: &str| -> String {
        flag.clone().or_else(|| file.clone()).unwrap_or_else(|| default.to_string())
    };
    let d = policy.max_digits;
    let beta_min = parse_decimal(&pick(&args.beta_min, &f.beta_min, lo), d, "beta_min")?;
    let beta_max = parse_decimal(&pick(&args.beta_max, &f.beta_max, hi), d, "beta_max")?;
    let samples = args.samples.or(f.samples).unwrap_or(n);
    let mode = parse_mode(&pick(&args.mode, &f.mode, mode))?;
    let exclusion = parse_decimal(&pick(&args.exclusion, &f.exclusion, scan::DEFAULT_EXCLUSION), d, "exclusion")?;
    let config = ScanConfig::sweep(beta_min, beta_max, samples, mode, policy).with_exclusion(exclusion);
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let result = run_scan(s, &config, args.resume)?;
    let mut out = summary_sink(&s.output());
    print_census(&mut out, "Z", &census_of(&result.samples))?;
    if mode == Mode::Retarded {
        let conv: Vec<_> = result.samples.iter().filter(|x| x.converged).collect();
        let positive = conv.iter().filter(|x| x.epsilon.is_positive()).count();
        writeln!(out, "epsilon: positive={positive} of {} converged", conv.len())?;
    }
    Ok(())
}

fn cmd_zoom(s: &Settings, args: &ZoomArgs) -> Result<(), CliError> {
    let policy = s.policy()?;
    let f = &s.file.zoom;
    let d = policy.max_digits;
    let center = match args.center.clone().or_else(|| f.center.clone()) {
        Some(c) => parse_decimal(&c, d, "center")?,
        None => singular_velocities(1, d)?.remove(0).beta,
    };
    let width = args.width.clone().or_else(|| f.width.clone()).unwrap_or_else(|| "1e-3".into());
    let width = parse_decimal(&width, d, "width")?;
    let samples = args.samples.or(f.samples).unwrap_or(1000);
    let levels = args.levels.or(f.levels).unwrap_or(1);
    if levels == 0 {
        return Err(CliError::Usage("--levels must be at least 1".into()));
    }
    let mode = match args.mode.as_ref().or(f.mode.as_ref()) {
        Some(m) => parse_mode(m)?,
        None => Mode::FeynmanWheeler,
    };

    let mut out = summary_sink(&s.output());
    for level in 0..levels {
        let n = samples
            .checked_mul(1usize << level)
            .ok_or_else(|| CliError::Usage("sample count overflow".into()))?;
        let config = ScanConfig::zoom(center.clone(), width.clone(), n, mode, policy.clone())
            .and_then(|c| c.validate().map(|_| c))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let census = if level + 1 == levels {
            census_of(&run_scan(s, &config, args.resume)?.samples)
        } else {
            scan::sign_census(&scan::sweep(&config, s.workers())?)
        };
        print_census(&mut out, &format!("level {level} ({n} samples)"), &census)?;
    }
    Ok(())
}

fn tunnel_summary(out: &mut dyn Write, traj: &Trajectory) -> io::Result<()> {
    writeln!(out, "outcome: {}", traj.outcome.name())?;
    match traj.outcome {
        Outcome::Tunneled => {
            if let Some((entry, exit)) = traj.forbidden_times() {
                writeln!(out, "entry_time: {entry:.12e}")?;
                writeln!(out, "exit_time: {exit:.12e}")?;
            }
        }
        Outcome::Reflected => {
            if let Some(x) = traj.turning_x {
                writeln!(out, "turning_x: {x:.12e}")?;
            }
        }
    }
    Ok(())
}

fn cmd_tunnel(s: &Settings, path: &Path) -> Result<(), CliError> {
    let file = config::load(path)?;
    let t = file
        .tunnel
        .ok_or_else(|| CliError::Usage(format!("{}: missing [tunnel] section", path.display())))?;
    let barrier = t.barrier.profile().map_err(|e| CliError::Usage(e.to_string()))?;
    let control = t.step.control();
    let traj = if t.p_y == 0.0 && t.start[1] == 0.0 {
        integrate_1d(t.e_total, &barrier, t.start[0], t.x_end, &control)
    } else {
        integrate_2d(t.e_total, t.p_y, &barrier, t.start, t.x_end, &control)
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let output = s.output().or_else(|| file.output.map(PathBuf::from));
    match &output {
        Some(p) => {
            let mut w = create(p)?;
            write_trajectory(&traj, &mut w)?;
            w.flush()?;
        }
        None => write_trajectory(&traj, io::stdout().lock())?,
    }
    tunnel_summary(&mut summary_sink(&output), &traj)?;
    Ok(())
}

fn cmd_verify(s: &Settings, fixture: Option<&Path>) -> Result<(), CliError> {
    let mut fx = Fixture::default();
    if let Some(path) = fixture {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let f: FixtureFile = toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if let Some(v) = f.singular_betas {
            fx.singular_betas = v;
        }
        if let Some(v) = f.singular_betas_16 {
            fx.singular_betas_16 = v;
        }
        if let Some(seed) = f.seed {
            fx.seed = seed;
        }
    }
    let report = run_checks(&fx);
    match s.output() {
        Some(p) => {
            let mut w = create(&p)?;
            write!(w, "{report}")?;
            w.flush()?;
        }
        None => print!("{report}"),
    }
    let failed = report.failures();
    if failed.is_empty() {
        Ok(())
    } else {
        for c in &failed {
            eprintln!("failed: {}", c.name);
        }
        Err(CliError::Verify(failed.len()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => config::load(p)?,
        None => FileConfig::default(),
    };
    let settings = Settings {
        file,
        digits: cli.digits,
        tol: cli.tol,
        max_digits: cli.max_digits,
        workers: cli.workers,
        output: cli.output,
    };
    match &cli.command {
        Command::Singular { count } => cmd_singular(&settings, *count),
        Command::Nroots { beta } => cmd_nroots(&settings, beta),
        Command::Zscan(args) => cmd_sweep(&settings, args, false),
        Command::Epsilon(args) => cmd_sweep(&settings, args, true),
        Command::Zoom(args) => cmd_zoom(&settings, args),
        Command::Tunnel { config } => cmd_tunnel(&settings, config),
        Command::Verify { fixture } => cmd_verify(&settings, fixture.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
