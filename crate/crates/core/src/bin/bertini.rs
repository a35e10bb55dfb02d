use std::path::PathBuf;
use std::process::ExitCode;

use bertini_lab::caps;
use bertini_lab::cli::{self, Kind, Overrides};
use clap::{Args, Parser, Subcommand};

const CAPS_HELP: &str = concat!(
    "Enumeration caps can be raised through the environment:\n  ",
    "BERTINI_CENSUS_CAP  forms streamed by one census (default 2^28)\n  ",
    "BERTINI_POINT_CAP   projective points visited by one point search (default 2^24)\n  ",
    "BERTINI_MATRIX_CAP  entries of one Macaulay matrix (default 2^24)\n  ",
    "BERTINI_FIELD_CAP   largest field order (default 2^20)\n\n",
    "Exit codes: 0 passed, 1 tolerance or verification failure, 2 invalid config, 3 cap exceeded."
);

#[derive(Parser)]
#[command(name = "bertini", version, about = "Hypersurface-section censuses, zeta tables and DVR lifts", after_help = CAPS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for subsample mode.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a density census.
    Census(RunArgs),
    /// Tabulate closed points and a truncated zeta product.
    Zeta(RunArgs),
    /// Search for lifts over F_q[t]_(t).
    Lift(RunArgs),
    /// List experiment kinds.
    List,
}

fn run(args: RunArgs, accept: fn(Kind) -> bool) -> ExitCode {
    let ov = Overrides {
        out: args.out,
        threads: args.threads,
        seed: args.seed,
        accept: Some(accept),
    };
    let outcome = cli::run(&args.config, &ov);
    if outcome.exit_code == cli::EXIT_OK || outcome.exit_code == cli::EXIT_FAILED {
        print!("{}", outcome.message);
        for p in &outcome.written {
            println!("wrote {}", p.display());
        }
    } else {
        eprintln!("{}", outcome.message);
        if outcome.exit_code == cli::EXIT_CAP {
            eprintln!("raise the cap with {}, {} or {}", caps::CENSUS_CAP_ENV, caps::POINT_CAP_ENV, caps::MATRIX_CAP_ENV);
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Census(a) => run(a, Kind::is_census),
        Command::Zeta(a) => run(a, |k| k == Kind::ZetaTable),
        Command::Lift(a) => run(a, |k| k == Kind::DvrLift),
        Command::List => {
            for line in cli::list_experiments() {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
    }
}
