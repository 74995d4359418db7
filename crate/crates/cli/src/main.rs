use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use magnocorr::sweep::{self, Format, SweepSpec};
use magnocorr::{validate, Error};

#[derive(Parser)]
#[command(
    name = "magnocorr",
    version,
    about = "Steady-state correlations of the feedback magnomechanical system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the base point of a configuration and print its report.
    Point(RunArgs),
    /// Evaluate a parameter grid and write one row per point.
    Sweep(RunArgs),
    /// List or run the shipped figure presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
    /// Run the oracle suites.
    Validate {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Run {
        name: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a named preset (a `preset` key in the config overrides it).
    #[arg(long)]
    preset: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn load_spec(args: &RunArgs) -> magnocorr::Result<SweepSpec> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    sweep::parse_config_with(&text, args.preset.as_deref())
}

fn write_out(bytes: &[u8], out: Option<&Path>) -> magnocorr::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn point(args: &RunArgs) -> magnocorr::Result<()> {
    let mut spec = load_spec(args)?;
    spec.axes.clear();
    let reports = spec
        .evaluate(0)
        .outcomes
        .into_iter()
        .collect::<magnocorr::Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    match args.output.format {
        Format::Json => {
            let value = if reports.len() == 1 {
                serde_json::to_value(&reports[0])
            } else {
                serde_json::to_value(&reports)
            }
            .map_err(std::io::Error::from)?;
            serde_json::to_writer_pretty(&mut buf, &value).map_err(std::io::Error::from)?;
            buf.push(b'\n');
        }
        Format::Csv => sweep::emit(&sweep::run_sweep(&spec, 1)?, Format::Csv, &mut buf)?,
    }
    write_out(&buf, args.output.out.as_deref())
}

fn sweep_to_output(spec: &SweepSpec, output: &OutputArgs) -> magnocorr::Result<()> {
    let table = sweep::run_sweep(spec, output.workers)?;
    let failed: Vec<_> = table
        .rows
        .iter()
        .filter_map(|row| match &row[spec.axes.len() + 1] {
            sweep::Cell::Text(code) if code != "unstable" => Some(code.clone()),
            _ => None,
        })
        .collect();
    let mut buf = Vec::new();
    sweep::emit(&table, output.format, &mut buf)?;
    write_out(&buf, output.out.as_deref())?;
    let unstable = table
        .rows
        .iter()
        .filter(|r| r[spec.axes.len()] == sweep::Cell::Bool(false))
        .count();
    eprintln!(
        "{} points, {} without a steady state, {} numerical failures",
        table.rows.len(),
        unstable,
        failed.len()
    );
    Ok(())
}

fn run(cli: Cli) -> magnocorr::Result<bool> {
    match cli.command {
        Command::Point(args) => point(&args)?,
        Command::Sweep(args) => sweep_to_output(&load_spec(&args)?, &args.output)?,
        Command::Presets {
            action: PresetAction::List,
        } => {
            for p in sweep::presets() {
                let spec = p.spec()?;
                println!("{:<10} {:>5} points  {}", p.name, spec.len(), p.description);
            }
        }
        Command::Presets {
            action: PresetAction::Run { name, output },
        } => sweep_to_output(&sweep::preset(&name)?.spec()?, &output)?,
        Command::Validate { seed } => {
            let reports = validate::run_all(seed);
            for r in &reports {
                println!("{r}");
            }
            return Ok(reports.iter().all(|r| r.passed()));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
