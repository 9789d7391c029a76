use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use weakseq_cli::{cmd_exact, cmd_simulate, cmd_tree, write_rows, Format, RunSpec};

#[derive(Parser)]
#[command(
    name = "weakseq",
    version,
    about = "Sequential unsharp measurements on a shared entangled pair"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form state parameters, CHSH value and witness for every branch
    Exact(Common),
    /// Poisson-count estimates of CHSH or witness for every branch
    Simulate(Common),
    /// Branch tree with reach probabilities
    Tree(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Number of measurement steps; must match the length of --mu
    #[arg(long)]
    steps: Option<usize>,
    /// Comma-separated sharpness schedule in radians
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    mu: Option<Vec<f64>>,
    /// Expected coincidences per estimate
    #[arg(long, default_value_t = weakseq::montecarlo::DEFAULT_PAIRS)]
    pairs: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Correlation visibility for σ_Z-type settings
    #[arg(long = "visibility-z", default_value_t = 1.0)]
    visibility_z: f64,
    /// Correlation visibility for σ_X-type settings
    #[arg(long = "visibility-x", default_value_t = 1.0)]
    visibility_x: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report angles in degrees
    #[arg(long)]
    degrees: bool,
}

impl Common {
    fn spec(&self) -> Result<RunSpec> {
        Ok(RunSpec {
            schedule: RunSpec::resolve_schedule(self.steps, self.mu.clone())?,
            seed: self.seed,
            pairs: self.pairs,
            visibility_z: self.visibility_z,
            visibility_x: self.visibility_x,
            format: match self.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            degrees: self.degrees,
        })
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn run(cli: Cli) -> Result<()> {
    // rendered before opening the sink so a failed run leaves no partial file
    let mut buf = Vec::new();
    let common = match &cli.command {
        Command::Exact(c) => {
            let spec = c.spec()?;
            write_rows(&cmd_exact(&spec)?, spec.format, &mut buf)?;
            c
        }
        Command::Simulate(c) => {
            let spec = c.spec()?;
            write_rows(&cmd_simulate(&spec)?, spec.format, &mut buf)?;
            c
        }
        Command::Tree(c) => {
            let spec = c.spec()?;
            write_rows(&cmd_tree(&spec)?, spec.format, &mut buf)?;
            c
        }
    };
    let mut sink = common.sink()?;
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weakseq: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
