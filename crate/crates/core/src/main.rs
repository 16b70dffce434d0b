use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mumford_lambda::cli::{run, Command, CurveSpec};

#[derive(Parser)]
#[command(
    name = "mumford",
    about = "Theta characteristics and branch-point cross ratios of p-adic hyperelliptic Mumford curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Ping-pong certificate for the ball system.
    Certify(Opts),
    /// Period matrix and polarization.
    Periods(Opts),
    /// Half-period characters of the branch points and their theta values.
    ThetaTable(Opts),
    /// Normalized branch coordinates from theta quotients.
    Lambdas(Opts),
    /// Every identity and invariance check; exit code 0 iff all pass.
    Verify(Opts),
}

#[derive(Args)]
struct Opts {
    /// Curve description (TOML).
    #[arg(long)]
    spec: PathBuf,
    /// Maximal word length L.
    #[arg(long = "trunc")]
    trunc: Option<usize>,
    /// Theta box radius R.
    #[arg(long)]
    radius: Option<usize>,
    /// Identity tolerance T in p-adic digits.
    #[arg(long)]
    tolerance: Option<i64>,
    /// Results directory; also holds the period cache.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        Sub::Certify(o) => (Command::Certify, o),
        Sub::Periods(o) => (Command::Periods, o),
        Sub::ThetaTable(o) => (Command::ThetaTable, o),
        Sub::Lambdas(o) => (Command::Lambdas, o),
        Sub::Verify(o) => (Command::Verify, o),
    };
    let mut spec = match CurveSpec::load(&opts.spec) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(l) = opts.trunc {
        spec.trunc = l;
    }
    if let Some(r) = opts.radius {
        spec.radius = r;
    }
    if let Some(t) = opts.tolerance {
        spec.tolerance = t;
    }
    match run(command, &spec, opts.out.as_deref()) {
        Ok(rep) => {
            print!("{}", rep.body());
            eprint!("{}", rep.diagnostics());
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
