//! `coproduct`: build amalgamated coproducts of operator systems over the
//! diagonal algebra and query their matrix cones.
//!
//! Machine-readable JSON goes to stdout, a human table to stderr.

mod commands;
mod report;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use opsys_core::{SolverOptions, Tolerance};

use commands::{CliError, Cone, Settings};
use report::RunReport;

#[derive(Parser, Debug)]
#[command(name = "coproduct", version, about = "Operator-system coproducts over D_n", arg_required_else_help = true)]
struct Cli {
    /// RNG seed for every sampled check.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Relative slack of the PSD test.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_psd: f64,
    /// Relative residual for subspace membership.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_subspace: f64,
    /// Iteration cap of the feasibility solver.
    #[arg(long, global = true, default_value_t = 20_000)]
    max_iter: usize,
    /// Also write the run report as JSON to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graph operator system from an edge list or graph JSON.
    Graph {
        #[arg(long)]
        input: PathBuf,
        /// Where to write the system JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and persist the coproduct of two systems.
    Build {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide membership of q(s ⊕ t) in a cone of the coproduct.
    Member {
        #[arg(long)]
        cp: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
        #[arg(long, value_enum, default_value_t = ConeArg::D)]
        cone: ConeArg,
    },
    /// Certificate table of the M_2 ⊕ M_2 counterexample.
    DemoPaper,
    /// Fixed regression suite.
    PaperSuite,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConeArg {
    D,
    C,
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let tolerance = Tolerance::new(cli.tol_psd, cli.tol_subspace).map_err(|e| CliError::Usage(e.to_string()))?;
    if cli.max_iter == 0 {
        return Err(CliError::Usage("--max-iter must be positive".into()));
    }
    Ok(Settings {
        seed: cli.seed,
        opts: SolverOptions {
            max_iter: cli.max_iter,
            tolerance,
            ..SolverOptions::default()
        },
    })
}

fn emit(report: &RunReport, stdout_json: Option<String>, path: Option<&PathBuf>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    eprint!("{}", report.table());
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", stdout_json.unwrap_or_else(|| text.clone())) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(CliError::Input(format!("stdout: {e}"))),
        _ => {}
    }
    if let Some(p) = path {
        std::fs::write(p, &text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let s = settings(&cli)?;
    let (report, json) = match &cli.command {
        Command::Graph { input, out } => (commands::cmd_graph(input, out.as_deref(), &s)?, None),
        Command::Build { left, right, out } => (commands::cmd_build(left, right, out, &s)?, None),
        Command::Member { cp, level, s: sp, t, cone } => {
            let cone = match cone {
                ConeArg::D => Cone::D,
                ConeArg::C => Cone::C,
            };
            let (report, answer) = commands::cmd_member(cp, *level, sp, t, cone, &s)?;
            (report, Some(serde_json::to_string_pretty(&answer).expect("answer serializes")))
        }
        Command::DemoPaper => (commands::cmd_demo_paper(&s)?, None),
        Command::PaperSuite => (commands::cmd_paper_suite(&s)?, None),
    };
    emit(&report, json, cli.report.as_ref())?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("coproduct: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
