use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qmf_core::experiments::{
    emit, run_berezin, run_convergence, run_duality, run_fluctuation, run_lambda, with_threads,
    Format, RunConfig, Tabular,
};
use qmf_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qmf", version, about = "Mean-field spin models with random fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean exact pressure per N against the variational limit
    Converge(Common),
    /// Magnetization fluctuations under Gaussian tilts
    Fluct(Common),
    /// Both sides of the quadratic duality for each alpha
    Duality(Common),
    /// Berezin-Lieb sandwich per spin
    Berezin(Common),
    /// Lambda, its gradient and conjugate along a ray
    Lambda(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Defaults to standard output
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Worker threads, 0 for one per core
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn render<T: Tabular>(report: Result<T>, format: Format) -> Result<(Vec<u8>, usize)> {
    let report = report?;
    Ok((emit(&report, format)?, report.failures()))
}

fn run(cmd: Command) -> Result<usize> {
    let (Command::Converge(c) | Command::Fluct(c) | Command::Duality(c) | Command::Berezin(c) | Command::Lambda(c)) = &cmd;
    let cfg = RunConfig::load(&c.config)?;
    let format = match c.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let (bytes, failures) = with_threads(c.threads, || match &cmd {
        Command::Converge(_) => render(run_convergence(&cfg), format),
        Command::Fluct(_) => render(run_fluctuation(&cfg), format),
        Command::Duality(_) => render(run_duality(&cfg), format),
        Command::Berezin(_) => render(run_berezin(&cfg), format),
        Command::Lambda(_) => render(run_lambda(&cfg), format),
    })??;
    match &c.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => std::io::stdout().write_all(&bytes).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?,
    }
    Ok(failures)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("error: {n} row(s) violate a numerical contract");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
