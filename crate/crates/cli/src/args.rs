// Copyright 2026 The seqmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Sequential-measurement chains: closed-form matrices, entropy diagrams and
/// emulated tomography.
#[derive(Debug, Parser)]
#[command(name = "seqmeas", version)]
pub struct Cli {
    /// Master seed. A random one is drawn and logged when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// JSON file replacing the command's configuration flags: a chain
    /// config for `matrix` and `venn`, a sweep spec for `sweep` and
    /// `reconstruct`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint readout matrix of a chain and its element magnitudes.
    Matrix(MatrixArgs),
    /// Purity against waveplate angle.
    Sweep(SweepArgs),
    /// Entropy diagrams after each measurement, both models.
    Venn(ChainArgs),
    /// Emulated tomography over the sweep grid.
    Reconstruct(ReconstructArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Input {
    /// The diagonal mixture rotated by 45°.
    Rotated,
    /// `sin²φ |H⟩⟨H| + cos²φ |V⟩⟨V|`.
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Unitary,
    Collapse,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// State-preparation angle φ in degrees.
    #[arg(long, default_value_t = 45.0, allow_negative_numbers = true)]
    pub phi: f64,

    #[arg(long, value_enum, default_value_t = Input::Diagonal)]
    pub input: Input,

    /// Relative basis angles in degrees, one per measurement.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0.0, 45.0, 45.0])]
    pub angles: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// State-preparation angle φ in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,

    #[arg(long, value_enum, default_value_t = Input::Rotated)]
    pub input: Input,

    #[arg(long, value_enum, default_value_t = ModelArg::Unitary)]
    pub model: ModelArg,

    /// Relative basis angles in degrees. Defaults to 0,45,135 for the
    /// rotated input and 90,45,45 for the diagonal one.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub angles: Option<Vec<f64>>,

    /// Dephase readout k (1-based) after it is written. Repeatable.
    #[arg(long)]
    pub dephase: Vec<usize>,

    /// Order rows as M3 M1 M2 (three readouts) or M2 M1 (two).
    #[arg(long)]
    pub last_first: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Cross,
    Raw,
    Projected,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// First waveplate angle ξ in degrees (φ = 2ξ).
    #[arg(long, default_value_t = 0.0)]
    pub xi_start: f64,

    #[arg(long, default_value_t = 22.5)]
    pub xi_end: f64,

    #[arg(long, default_value_t = 2.25)]
    pub xi_step: f64,

    /// Replicates per angle.
    #[arg(long, default_value_t = 5, conflicts_with = "tabulated_replicates")]
    pub replicates: usize,

    /// Use 4 replicates at φ = 0 and 2 at φ = 90° on the compensated curve.
    #[arg(long)]
    pub tabulated_replicates: bool,

    /// Multiplier on the default noise; 0 gives noiseless frames.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,

    /// Background as a fraction of the peak intensity.
    #[arg(long)]
    pub background: Option<f64>,

    /// Shot-noise scale.
    #[arg(long)]
    pub shot: Option<f64>,

    /// Run only the curve without walk-off compensation after crystal 2.
    #[arg(long, conflicts_with = "both")]
    pub no_compensation_2: bool,

    /// Run the compensated and crystal-2 uncompensated curves.
    #[arg(long)]
    pub both: bool,

    #[arg(long, value_enum, default_value_t = EstimatorArg::Cross)]
    pub estimator: EstimatorArg,

    /// Evaluate on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,

    /// `auto`, `minimal`, or a path to an axis-plan JSON file.
    #[arg(long, default_value = "auto")]
    pub plan: String,
}
