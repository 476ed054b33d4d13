use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "repeaterlab",
    version,
    about = "Entanglement swapping between two partially entangled pairs: rates, bases, bounds and sweeps"
)]
pub(super) struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub(super) struct AngleArgs {
    /// Schmidt angle of the Alice–Clare pair, radians unless --degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Schmidt angle of the Clare–Bob pair.
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Read --theta and --eta in degrees.
    #[arg(long)]
    pub degrees: bool,
    /// JSON file with "left" and "right" state descriptions.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(super) struct PhaseArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta2: f64,
}

#[derive(Debug, Args)]
pub(super) struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub(super) enum Sub {
    /// Exact success probability of the optimal-basis protocol.
    Rate {
        #[command(flatten)]
        angles: AngleArgs,
        #[command(flatten)]
        phases: PhaseArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Clare's four measurement kets, one per row in matrix text format.
    Basis {
        #[command(flatten)]
        angles: AngleArgs,
        #[command(flatten)]
        phases: PhaseArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte-Carlo run of the full protocol.
    Simulate {
        #[command(flatten)]
        angles: AngleArgs,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, env = "REPEATERLAB_SEED")]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Optimality test for a projective measurement of Clare's qubits.
    Criterion {
        #[command(flatten)]
        angles: AngleArgs,
        #[arg(long, value_parser = ["bell", "optimal", "computational"], conflicts_with = "measurement_file")]
        measurement: Option<String>,
        /// Four kets of dimension 4 in matrix text format, one per row.
        #[arg(long, value_name = "PATH")]
        measurement_file: Option<PathBuf>,
        #[arg(long, default_value_t = crate::criterion::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bound on one successful outcome for general Schmidt coefficients.
    Bound {
        /// Squared Schmidt coefficients of the Alice–Clare pair, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        b: Option<Vec<f64>>,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Grid of rates and bounds over both angles in (0, π/4].
    Sweep {
        /// Grid points per angle.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Optimal basis against the Bell basis: rates and Bob's workload.
    Compare {
        #[command(flatten)]
        angles: AngleArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}
