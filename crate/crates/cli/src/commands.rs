use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rumorsim::abm::run_simulation;
use rumorsim::experiment::{epsilon_delta_grid, epsilon_sweep};
use rumorsim::ledger::{validate_chain, Chain};
use rumorsim::model::{initial_bsir_state, initial_sir_state};
use rumorsim::ode::integrate;
use rumorsim::Execution;

use crate::config::{ModelKind, RunConfig};
use crate::error::CliError;
use crate::plot::{render_lineplot, PlotRequest};
use crate::table;

#[derive(Debug, Parser)]
#[command(
    name = "rumorsim",
    version,
    about = "Rumor spreading with and without a blockchain credit contract"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the rate equations and write `t,i_b,i_n,s,r`.
    Ode(RunArgs),
    /// Run the agent simulation and write `t,n_ib,n_in,n_s,n_r,c_max,blocks`.
    Abm(RunArgs),
    /// Integrate once per `sweep.epsilon_values` and write `epsilon,t,s,r`.
    SweepEpsilon(RunArgs),
    /// Spreader and stifler densities at `sweep.snapshot_day` over the epsilon x delta grid.
    Grid(RunArgs),
    /// Render CSV columns as an SVG line plot.
    Plot(PlotArgs),
    /// Check the hash links and contents of an exported chain.
    LedgerVerify { chain: PathBuf },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON config; unspecified fields keep their defaults.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Override one field, e.g. `--set pop.epsilon=inf` or `--set sweep.delta_values=[0.1,0.3]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Column for the horizontal axis; defaults to the first column.
    #[arg(long)]
    pub x: Option<String>,
    /// Comma-separated series columns; defaults to all other columns.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// Draw one line per distinct value of this column.
    #[arg(long)]
    pub group_by: Option<String>,
}

pub fn run(cli: Cli, execution: Execution) -> Result<(), CliError> {
    match cli.command {
        Command::Ode(args) => run_ode(&load(&args)?),
        Command::Abm(args) => run_abm(&load(&args)?),
        Command::SweepEpsilon(args) => run_sweep(&load(&args)?, execution),
        Command::Grid(args) => run_grid(&load(&args)?, execution),
        Command::Plot(args) => run_plot(&args),
        Command::LedgerVerify { chain } => {
            let report = verify_chain_file(&chain)?;
            println!("{report}");
            Ok(())
        }
    }
}

fn load(args: &RunArgs) -> Result<RunConfig, CliError> {
    RunConfig::load(args.config.as_deref(), &args.overrides)
}

fn run_ode(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate_ode()?;
    let pop = cfg.effective_pop();
    let mut csv = Vec::new();
    match cfg.model {
        ModelKind::Sir => {
            let rates = cfg.rates.non_enrolled();
            let initial = initial_sir_state(&pop).map_err(|e| CliError::config(format!("pop.{e}")))?;
            table::write_sir(&mut csv, &integrate(initial, &rates, &cfg.integrator)?)?;
        }
        ModelKind::Bsir => {
            let initial = initial_bsir_state(&pop).map_err(|e| CliError::config(format!("pop.{e}")))?;
            table::write_bsir(&mut csv, &integrate(initial, &cfg.rates, &cfg.integrator)?)?;
        }
    }
    emit(cfg, &csv, &["i_b", "i_n", "s", "r"], None)
}

fn run_abm(cfg: &RunConfig) -> Result<(), CliError> {
    let config = cfg.abm_config()?;
    if cfg.output.chain.is_some() && config.mode != rumorsim::abm::SimMode::Ledger {
        return Err(CliError::config("output.chain: only ledger-mode runs produce a chain"));
    }
    let run = run_simulation(&config)?;
    let mut csv = Vec::new();
    table::write_abm(&mut csv, &run.trajectory)?;
    if let (Some(path), Some(ledger)) = (&cfg.output.chain, &run.ledger) {
        write_file(Path::new(path), ledger.chain().to_json().as_bytes())?;
    }
    emit(cfg, &csv, &["n_ib", "n_in", "n_s", "n_r"], None)
}

fn run_sweep(cfg: &RunConfig, execution: Execution) -> Result<(), CliError> {
    cfg.validate_sweep()?;
    let runs = epsilon_sweep(
        &cfg.pop,
        &cfg.rates,
        &cfg.integrator,
        &cfg.sweep.epsilon_values,
        execution,
    )?;
    let mut csv = Vec::new();
    table::write_sweep(&mut csv, &runs)?;
    emit(cfg, &csv, &["s"], Some("epsilon"))
}

fn run_grid(cfg: &RunConfig, execution: Execution) -> Result<(), CliError> {
    cfg.validate_sweep()?;
    if cfg.output.svg.is_some() {
        return Err(CliError::config("output.svg: the grid is emitted as CSV only"));
    }
    let points = epsilon_delta_grid(&cfg.pop, &cfg.rates, &cfg.integrator, &cfg.sweep, execution)?;
    let mut csv = Vec::new();
    table::write_grid(&mut csv, &points)?;
    emit(cfg, &csv, &[], None)
}

/// Writes the CSV to `output.csv` or stdout, then the optional plot.
fn emit(cfg: &RunConfig, csv: &[u8], plot_columns: &[&str], group_by: Option<&str>) -> Result<(), CliError> {
    match &cfg.output.csv {
        Some(path) => write_file(Path::new(path), csv)?,
        None => match std::io::stdout().lock().write_all(csv) {
            // A closed downstream pipe (e.g. `| head`) is not an error.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
            other => other.map_err(|e| CliError::io("writing stdout", e))?,
        },
    }
    if let Some(path) = &cfg.output.svg {
        let request = PlotRequest {
            x: Some("t".into()),
            columns: plot_columns.iter().map(|c| c.to_string()).collect(),
            group_by: group_by.map(str::to_string),
        };
        let text = std::str::from_utf8(csv).expect("CSV output is ASCII");
        write_file(Path::new(path), render_lineplot(text, &request)?.as_bytes())?;
    }
    Ok(())
}

fn run_plot(args: &PlotArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", args.input.display())))?;
    let request = PlotRequest {
        x: args.x.clone(),
        columns: args.columns.clone(),
        group_by: args.group_by.clone(),
    };
    write_file(&args.output, render_lineplot(&text, &request)?.as_bytes())
}

/// Loads and validates a JSON chain, returning a one-line summary.
pub fn verify_chain_file(path: &Path) -> Result<String, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let chain = Chain::from_json(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    validate_chain(&chain).map_err(|v| CliError::ChainInvalid(v.to_string()))?;
    Ok(format!(
        "ok: {} blocks, {} transactions",
        chain.len(),
        chain.transactions().count()
    ))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}
