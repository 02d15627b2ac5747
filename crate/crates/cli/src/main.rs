use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liesym_cli::catalog::{run_catalog, Settings, CASE_IDS};
use liesym_cli::commands::{self, FieldArgs};
use liesym_cli::report::Report;
use liesym_core::determining::Mode;

/// Lie point symmetries of evolution equations u_t = F(x, t, u, u_x, u_xx).
#[derive(Parser)]
#[command(name = "liesym", version)]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Scaled-residual tolerance for oracle verdicts.
    #[arg(long, global = true, default_value = "1e-8")]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Free,
    Evolution,
}

#[derive(Args)]
struct Field {
    #[arg(long, allow_hyphen_values = true)]
    xi: String,
    #[arg(long, allow_hyphen_values = true)]
    eta: String,
    #[arg(long, allow_hyphen_values = true)]
    phi: String,
}

impl Field {
    fn args(&self) -> FieldArgs<'_> {
        FieldArgs {
            xi: &self.xi,
            eta: &self.eta,
            phi: &self.phi,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Determining system of a problem file.
    Determine {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Free)]
        mode: ModeArg,
    },
    /// Check one generator against the symmetry criterion.
    VerifyGenerator {
        file: PathBuf,
        #[command(flatten)]
        field: Field,
    },
    /// Solve the determining equations over the file's polynomial bases.
    SolveAnsatz { file: PathBuf },
    /// Check that a generator annihilates an invariant pair.
    VerifyInvariants {
        file: PathBuf,
        #[command(flatten)]
        field: Field,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Reduce the equation by the ansatz w = W(r).
    Reduce {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Run built-in cases (all when no --case is given).
    Catalog {
        #[arg(long = "case")]
        cases: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    let s = Settings {
        seed: cli.seed,
        tol: cli.tol,
    };
    let start = Instant::now();
    let result: Result<Report, String> = match &cli.command {
        Command::Determine { file, mode } => {
            let mode = match mode {
                ModeArg::Free => Mode::Free,
                ModeArg::Evolution => Mode::Evolution,
            };
            commands::determine(file, mode, s).map_err(|e| e.0)
        }
        Command::VerifyGenerator { file, field } => commands::verify_generator_cmd(file, &field.args(), s).map_err(|e| e.0),
        Command::SolveAnsatz { file } => commands::solve_ansatz_cmd(file, s).map_err(|e| e.0),
        Command::VerifyInvariants { file, field, r, w } => {
            commands::verify_invariants_cmd(file, &field.args(), r, w, s).map_err(|e| e.0)
        }
        Command::Reduce { file, r, w } => commands::reduce_cmd(file, r, w, s).map_err(|e| e.0),
        Command::Catalog { cases } if cases.is_empty() => {
            let all: Vec<String> = CASE_IDS.iter().map(|c| c.to_string()).collect();
            run_catalog(&all, s)
        }
        Command::Catalog { cases } => run_catalog(cases, s),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    let text = match cli.format {
        Format::Human => report.human(Some(start.elapsed())),
        Format::Machine => report.machine(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                return ExitCode::from(2);
            }
        }
        None => print!("{}", text),
    }
    if report.consistent {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
