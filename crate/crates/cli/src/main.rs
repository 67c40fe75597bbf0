//! `qperc`: command-line frontend for the quantum perceptron simulator.
//!
//! Exit codes: 0 on success, 2 for invalid arguments or malformed input
//! files, 1 for anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qperc::dataset::{self, generate_dataset, Dataset};
use qperc::pattern::{default_shape, PatternGrid};
use qperc::perceptron::{self, MeasureMode, PerceptronConfig, DEFAULT_SHOTS};
use qperc::sweep::{self, sample_cells, sweep};
use qperc::training::{self, train, ConvergenceMode, TrainConfig};
use qperc::{format_probability, io};

#[derive(Parser)]
#[command(name = "qperc", version, about = "Quantum perceptron simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probability of the ancilla reading 1 for one (input, weight) pair.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: u64,
        #[arg(long)]
        weight: u64,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Probability matrix over every (input, weight) pair.
    Sweep {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write this many random cells instead of the full matrix. Needed for
        /// n = 4 and above.
        #[arg(long, value_name = "COUNT")]
        force_sample: Option<usize>,
    },
    /// Label every input against a fixed weight.
    GenData {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 626)]
        weight: u64,
        #[command(flatten)]
        measure: MeasureArgs,
        /// Dataset CSV; metadata goes to `<out>.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a weight on a generated dataset.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Target weight; defaults to the weight the dataset was generated with.
        #[arg(long)]
        optimal_weight: Option<u64>,
        #[arg(long, default_value_t = training::DEFAULT_LEARNING_RATE)]
        lr: f64,
        #[arg(long, default_value_t = training::DEFAULT_MAX_EPOCHS)]
        max_epochs: usize,
        #[arg(long, value_enum, default_value_t = Convergence::Functional)]
        convergence: Convergence,
        #[command(flatten)]
        measure: MeasureArgs,
        /// JSON-lines trace, one step per line.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Draw a value as a pixel grid.
    Render {
        #[arg(long)]
        value: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long, value_enum, default_value_t = RenderFormat::Ascii)]
        format: RenderFormat,
        /// Pixel size in PGM output.
        #[arg(long, default_value_t = 1)]
        scale: usize,
        /// Output file; ASCII goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct MeasureArgs {
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, env = "QPERC_SEED", default_value_t = 0)]
    seed: u64,
}

impl MeasureArgs {
    fn config(self, n: usize) -> Result<PerceptronConfig, CliError> {
        let mode = match self.mode {
            Mode::Exact => MeasureMode::Exact,
            Mode::Sampled => MeasureMode::Sampled,
        };
        if mode == MeasureMode::Sampled && self.shots == 0 {
            return Err(CliError::usage(
                "--shots must be at least 1 in sampled mode",
            ));
        }
        Ok(PerceptronConfig {
            n,
            shots: self.shots,
            mode,
            seed: self.seed,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderFormat {
    Ascii,
    Pgm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convergence {
    Strict,
    Functional,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<qperc::Error> for CliError {
    fn from(e: qperc::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

fn check_n(flag: &str, n: usize) -> Result<(), CliError> {
    perceptron::check_n(n).map_err(|e| CliError::usage(format!("{flag}: {e}")))
}

fn check_value(flag: &str, value: u64, n: usize) -> Result<(), CliError> {
    let max = perceptron::max_value(n);
    if value > max {
        Err(CliError::usage(format!(
            "{flag}: {value} out of range for n = {n} (must be <= {max})"
        )))
    } else {
        Ok(())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    io::write_atomic(path, bytes).map_err(CliError::from)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            n,
            input,
            weight,
            measure,
        } => {
            check_n("--n", n)?;
            check_value("--input", input, n)?;
            check_value("--weight", weight, n)?;
            let p = perceptron::measure(input, weight, &measure.config(n)?)?;
            println!("{}", format_probability(p));
        }

        Command::Sweep {
            n,
            measure,
            out,
            format,
            force_sample,
        } => {
            check_n("--n", n)?;
            let config = measure.config(n)?;
            if let Some(count) = force_sample {
                let cells = sample_cells(count, &config)?;
                let body = match format {
                    Format::Csv => sweep::cells_to_csv(&cells),
                    Format::Json => sweep::cells_to_json(&cells),
                };
                write_file(&out, body.as_bytes())?;
                println!("wrote {} sampled cells to {}", cells.len(), out.display());
                return Ok(());
            }
            if n > sweep::MAX_SWEEP_N {
                return Err(CliError::usage(format!(
                    "--n {n}: a full sweep is limited to n <= {}; \
                     pass --force-sample COUNT for a random subsample",
                    sweep::MAX_SWEEP_N
                )));
            }
            let matrix = sweep(&config)?;
            let body = match format {
                Format::Csv => matrix.to_csv(),
                Format::Json => matrix.to_json(),
            };
            write_file(&out, body.as_bytes())?;
            println!("wrote {0}x{0} matrix to {1}", matrix.size(), out.display());
            if config.mode == MeasureMode::Exact {
                let dev = matrix.max_oracle_deviation()?;
                println!("max deviation from closed form: {dev:e}");
                if dev >= 1e-9 {
                    return Err(CliError::Internal(format!(
                        "circuit disagrees with closed form by {dev:e}"
                    )));
                }
            }
        }

        Command::GenData {
            n,
            weight,
            measure,
            out,
        } => {
            check_n("--n", n)?;
            if n > dataset::MAX_EXHAUSTIVE_N {
                return Err(CliError::usage(format!(
                    "--n {n}: dataset generation enumerates every input and supports n <= {}",
                    dataset::MAX_EXHAUSTIVE_N
                )));
            }
            check_value("--weight", weight, n)?;
            let ds = generate_dataset(weight, &measure.config(n)?)?;
            ds.save(&out)?;
            let ones = ds.examples.iter().filter(|e| e.label == 1).count();
            println!(
                "wrote {} examples ({ones} labeled 1) to {}",
                ds.len(),
                out.display()
            );
        }

        Command::Train {
            data,
            optimal_weight,
            lr,
            max_epochs,
            convergence,
            measure,
            trace_out,
        } => {
            if !(lr > 0.0 && lr <= 1.0) {
                return Err(CliError::usage(format!(
                    "--lr: must be in (0, 1], got {lr}"
                )));
            }
            if max_epochs == 0 {
                return Err(CliError::usage("--max-epochs: must be at least 1"));
            }
            let ds = Dataset::load(&data)?;
            let target = optimal_weight.unwrap_or(ds.optimal_weight);
            check_value("--optimal-weight", target, ds.n)?;
            let config = TrainConfig {
                n: ds.n,
                learning_rate: lr,
                max_epochs,
                seed: measure.seed,
                measurement: measure.config(ds.n)?,
                convergence: match convergence {
                    Convergence::Strict => ConvergenceMode::Strict,
                    Convergence::Functional => ConvergenceMode::Functional,
                },
            };
            let result = train(&ds, target, &config)?;
            if let Some(path) = trace_out {
                write_file(&path, result.trace_jsonl().as_bytes())?;
            }
            println!("converged: {}", result.converged);
            println!("initial weight: {}", result.initial_weight);
            println!("final weight: {}", result.final_weight);
            println!("target weight: {target}");
            println!("epochs: {}", result.epochs_run);
            println!("updates: {}", result.update_count());
        }

        Command::Render {
            value,
            n,
            rows,
            cols,
            format,
            scale,
            out,
        } => {
            check_n("--n", n)?;
            check_value("--value", value, n)?;
            let m = perceptron::bit_width(n);
            let (rows, cols) = match (rows, cols) {
                (None, None) => default_shape(n),
                (Some(r), None) if r > 0 && m.is_multiple_of(r) => (r, m / r),
                (None, Some(c)) if c > 0 && m.is_multiple_of(c) => (m / c, c),
                (Some(r), Some(c)) => (r, c),
                _ => return Err(CliError::usage(format!("--rows/--cols must divide {m}"))),
            };
            if rows.checked_mul(cols) != Some(m) {
                return Err(CliError::usage(format!(
                    "--rows x --cols must equal {m} for n = {n}, got {rows}x{cols}"
                )));
            }
            let grid = PatternGrid::new(value, n, rows, cols)?;
            match (format, out) {
                (RenderFormat::Ascii, None) => print!("{}", grid.to_ascii()),
                (RenderFormat::Ascii, Some(path)) => write_file(&path, grid.to_ascii().as_bytes())?,
                (RenderFormat::Pgm, Some(path)) => write_file(&path, &grid.to_pgm(scale))?,
                (RenderFormat::Pgm, None) => {
                    return Err(CliError::usage("--out is required for --format pgm"))
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
