//! Command line experiment runner.
//!
//! Experiments are described either by a JSON config file (`--config`) or by
//! per-command flags mirroring the config fields. The report is printed to
//! standard output as JSON (and optionally written to files); errors are
//! emitted as JSON on standard error. Exit codes: 0 success, 2 invalid
//! config or input, 3 numeric failure, 4 inequality violation.
//!
//! Thread count of the dense linear-algebra kernels is controlled only via
//! the `OPENBLAS_NUM_THREADS` environment variable.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qdecouple::report::{
    exit_code, run, CommandName, ExperimentConfig, ExperimentReport, SourceSpec,
};
use qdecouple::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qdecouple",
    about = "Decoupling and unitary-design experiments",
    version
)]
struct Cli {
    /// JSON config file; mutually exclusive with a subcommand.
    #[arg(long, global = false)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// RNG seed (required for stochastic commands).
    #[arg(long)]
    seed: Option<u64>,
    /// Slack used by inequality audits (default 1e-9).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the JSON report to this path as well as standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Conditional min-entropy of a fixture state.
    Entropy {
        /// Built-in fixture name or path to a fixture JSON file.
        #[arg(long)]
        fixture: String,
        /// Conditioned subsystem labels (defaults to the fixture's A part).
        #[arg(long, value_delimiter = ',')]
        a_labels: Option<Vec<String>>,
        /// Smoothing radius; enables the smooth-entropy variant.
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Design quality δ of a unitary ensemble.
    DesignDelta {
        /// Ensemble name (clifford1q) or path to an ensemble JSON file.
        #[arg(long)]
        ensemble: String,
        /// diamond or choi-trace-bounds.
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Design-quality proxy of the random circuit model over depths.
    CircuitSweep {
        #[arg(long, default_value_t = 2)]
        n_qubits: usize,
        /// Comma-separated circuit depths.
        #[arg(long, value_delimiter = ',', required = true)]
        t_values: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        output_csv: Option<PathBuf>,
        #[arg(long)]
        output_plot: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Empirical decoupling experiment against the theorem bounds.
    DecoupleRun {
        #[arg(long)]
        fixture: String,
        /// haar, circuit, an ensemble name (clifford1q) or a path to an
        /// ensemble JSON file.
        #[arg(long)]
        source: String,
        #[arg(long)]
        trials: Option<usize>,
        /// Circuit-source qubit count.
        #[arg(long)]
        n_qubits: Option<usize>,
        /// Circuit-source depth.
        #[arg(long)]
        depth: Option<usize>,
        /// Design error δ override for the approximate-design bound.
        #[arg(long)]
        delta: Option<f64>,
        /// Smoothing radius; enables the smoothed bound.
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monte Carlo check of the Haar 2-norm identity against its closed form.
    IdentityCheck {
        /// Input dimension.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        trials: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn blank_config(command: CommandName, common: CommonArgs) -> ExperimentConfig {
    ExperimentConfig {
        version: 1,
        command,
        fixture: None,
        source: None,
        trials: None,
        seed: common.seed,
        dim: None,
        a_labels: None,
        eps: None,
        delta: None,
        n_qubits: None,
        t_values: None,
        method: None,
        ensemble: None,
        tolerance: common.tolerance,
        output: common.output,
        output_csv: None,
        output_plot: None,
    }
}

fn to_config(command: Command) -> ExperimentConfig {
    match command {
        Command::Entropy {
            fixture,
            a_labels,
            eps,
            common,
        } => {
            let mut c = blank_config(CommandName::Entropy, common);
            c.fixture = Some(fixture);
            c.a_labels = a_labels;
            c.eps = eps;
            c
        }
        Command::DesignDelta {
            ensemble,
            method,
            common,
        } => {
            let mut c = blank_config(CommandName::DesignDelta, common);
            c.ensemble = Some(ensemble);
            c.method = method;
            c
        }
        Command::CircuitSweep {
            n_qubits,
            t_values,
            trials,
            output_csv,
            output_plot,
            common,
        } => {
            let mut c = blank_config(CommandName::CircuitSweep, common);
            c.n_qubits = Some(n_qubits);
            c.t_values = Some(t_values);
            c.trials = Some(trials);
            c.output_csv = output_csv;
            c.output_plot = output_plot;
            c
        }
        Command::DecoupleRun {
            fixture,
            source,
            trials,
            n_qubits,
            depth,
            delta,
            eps,
            common,
        } => {
            let mut c = blank_config(CommandName::DecoupleRun, common);
            c.fixture = Some(fixture);
            c.source = Some(match source.as_str() {
                "haar" => SourceSpec::Haar,
                "circuit" => SourceSpec::Circuit {
                    n_qubits: n_qubits.unwrap_or(2),
                    depth: depth.unwrap_or(0),
                },
                name => SourceSpec::Ensemble { name: name.into() },
            });
            c.trials = trials;
            c.delta = delta;
            c.eps = eps;
            c
        }
        Command::IdentityCheck { d, trials, common } => {
            let mut c = blank_config(CommandName::IdentityCheck, common);
            c.dim = Some(d);
            c.trials = Some(trials);
            c
        }
    }
}

fn execute(cli: Cli) -> Result<ExperimentReport> {
    let config = match (cli.config, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            ExperimentConfig::from_json(&text)?
        }
        (None, Some(command)) => to_config(command),
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "--config and a subcommand are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Config(
                "either --config PATH or a subcommand is required".into(),
            ))
        }
    };
    run(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(report) => {
            let json = serde_json::to_string_pretty(&report)
                .unwrap_or_else(|e| format!("{{\"error\":\"serialization\",\"message\":{e:?}}}"));
            println!("{json}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
