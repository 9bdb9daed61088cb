use clap::{Args, Parser, Subcommand};
use dafsim::harness::csvio::{write_ber_points, write_outage, write_sweep};
use dafsim::harness::{
    parse_grid, parse_key_values, run_ber_curve, run_outage_curve, run_power_allocation_sweep, run_validation_suite,
    ExperimentConfig,
};
use dafsim::Error;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_WARNINGS: u8 = 3;

#[derive(Parser)]
#[command(name = "dafsim", version, about = "Differential AF relaying: BER curves, power sweeps, outage and self-checks")]
struct Cli {
    /// key = value file with experiment settings; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Exit with status 3 when any point stops on the symbol budget
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER against total power for SC and semi-MRC
    BerCurve(ExperimentArgs),
    /// BER against the power allocation factor q
    PowerSweep(ExperimentArgs),
    /// Outage probability table
    Outage(OutageArgs),
    /// Run the oracle comparisons and print a JSON report
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// dbpsk or dqpsk
    #[arg(long = "mod")]
    modulation: Option<String>,
    /// Total power in dB: list `a,b,c` or range `start:stop:step`
    #[arg(long)]
    power_db: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    q_grid: Option<String>,
    /// `derived` or a fixed relay gain
    #[arg(long)]
    amplification: Option<String>,
    #[arg(long)]
    doppler: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    min_errors: Option<String>,
    #[arg(long)]
    max_symbols: Option<String>,
    #[arg(long)]
    frame_length: Option<String>,
    #[arg(long)]
    analytical_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn settings(&self) -> Vec<(&'static str, &str)> {
        let mut v: Vec<(&'static str, &str)> = [
            ("modulation", &self.modulation),
            ("power_db", &self.power_db),
            ("q", &self.q),
            ("q_grid", &self.q_grid),
            ("amplification", &self.amplification),
            ("doppler", &self.doppler),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("min_errors", &self.min_errors),
            ("max_symbols", &self.max_symbols),
            ("frame_length", &self.frame_length),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect();
        if self.analytical_only {
            v.push(("analytical_only", "true"));
        }
        v
    }
}

#[derive(Args)]
struct OutageArgs {
    #[arg(long, default_value = "10,20,30")]
    power_db: String,
    #[arg(long, default_value = "0.7")]
    q: f64,
    #[arg(long, default_value = "derived")]
    amplification: String,
    /// Linear SNR thresholds: list or range
    #[arg(long, default_value = "0:10:0.5")]
    gamma_th: String,
    /// Monte Carlo draws per row; 0 disables the check column
    #[arg(long, default_value_t = 0)]
    mc_draws: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn build_config(cli_config: &Option<PathBuf>, base: ExperimentConfig, args: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let mut config = base;
    if let Some(path) = cli_config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        for (k, v) in parse_key_values(&text)? {
            config.set(&k, &v)?;
        }
    }
    for (k, v) in args.settings() {
        config.set(k, v)?;
    }
    config.validate()?;
    Ok(config)
}

fn warn_low_confidence(label: &str, xs: &[f64]) -> bool {
    for x in xs {
        eprintln!("warning: {label} {x}: symbol budget reached before the error target");
    }
    !xs.is_empty()
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::BerCurve(args) => {
            let config = build_config(&cli.config, ExperimentConfig::default(), args)?;
            let curve = run_ber_curve(&config)?;
            write_ber_points(output(&args.out)?, &curve.points)?;
            Ok(warn_low_confidence("power_db", &curve.low_confidence()))
        }
        Command::PowerSweep(args) => {
            let base = ExperimentConfig { power_db: vec![15.0, 20.0, 25.0], ..ExperimentConfig::default() };
            let config = build_config(&cli.config, base, args)?;
            let sweep = run_power_allocation_sweep(&config)?;
            write_sweep(output(&args.out)?, &sweep)?;
            let mut warned = false;
            for s in &sweep {
                eprintln!("power_db {:.2}: argmin q = {:.2}", s.power_db, s.argmin_q());
                warned |= warn_low_confidence(&format!("power_db {:.2}, q", s.power_db), &s.curve.low_confidence());
            }
            Ok(warned)
        }
        Command::Outage(args) => {
            let rule: dafsim::harness::AmplificationRule = args.amplification.parse()?;
            let profiles = parse_grid(&args.power_db)?
                .into_iter()
                .map(|db| rule.profile(db, args.q))
                .collect::<dafsim::Result<Vec<_>>>()?;
            let rows = run_outage_curve(&parse_grid(&args.gamma_th)?, &profiles, args.mc_draws, args.seed, args.workers)?;
            write_outage(output(&args.out)?, &rows)?;
            Ok(false)
        }
        Command::Validate { out } => {
            let report = run_validation_suite()?;
            let mut w = output(out)?;
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(w).map_err(|e| Failure::Usage(e.to_string()))?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAILED {}: worst {:e} > {:e} ({})", c.name, c.worst, c.tolerance, c.detail);
            }
            if report.passed {
                Ok(false)
            } else {
                Err(Failure::Validation)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let strict = cli.strict;
    match run(cli) {
        Ok(true) if strict => ExitCode::from(EXIT_WARNINGS),
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Validation) => ExitCode::from(EXIT_VALIDATION),
    }
}
