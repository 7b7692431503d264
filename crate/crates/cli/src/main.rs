use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lefschetz_cli::{emit, run_suite, Check, CliError, Config, Format};

/// Run the Lefschetz identity checks and write machine-readable reports.
#[derive(Parser, Debug)]
#[command(name = "lefschetz", version)]
struct Args {
    /// TOML manifest; defaults apply to anything it leaves out.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Run every check listed in the manifest (all checks if none are listed).
    #[arg(long, conflicts_with = "check")]
    suite: bool,
    /// Run only this check; repeatable.
    #[arg(long, value_name = "NAME")]
    check: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest spectral cutoff R for the special Lagrangian check.
    #[arg(long, value_name = "R")]
    cutoff: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
    /// Write zero wall times so identical runs give identical bytes.
    #[arg(long)]
    no_timing: bool,
    /// List check names and exit.
    #[arg(long)]
    list: bool,
}

fn run(args: Args) -> Result<bool, CliError> {
    if args.list {
        for c in Check::ALL {
            println!("{c}");
        }
        return Ok(true);
    }
    let format: Format = args.format.parse()?;
    let mut cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if !args.check.is_empty() {
        for name in &args.check {
            name.parse::<Check>()?;
        }
        cfg.checks = args.check.clone();
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.cutoff {
        if !(r > 0.0) {
            return Err(CliError::Config(format!("cutoff must be positive, got {r}")));
        }
        cfg.cutoff = r;
    }
    if args.no_timing {
        cfg.timing = false;
    }
    let reports = run_suite(&cfg)?;
    match &args.out {
        Some(p) => emit::write(&reports, format, p)?,
        None => print!("{}", emit::render(&reports, format)?),
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.test.as_str()).collect();
    eprintln!("{} reports, {} failed{}", reports.len(), failed.len(), if failed.is_empty() { String::new() } else { format!(": {}", failed.join(", ")) });
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
