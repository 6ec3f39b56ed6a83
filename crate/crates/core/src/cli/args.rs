use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "thermo",
    version,
    about = "Qubit thermometry: Fisher information of IID and sequential measurement protocols"
)]
pub struct Cli {
    /// Flat key=value file; keys are flag names without the leading dashes.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fisher information of one input state over a temperature grid.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    FiCurve(FiCurveArgs),
    /// Min / mean / max Fisher information over sampled input states.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Ensemble(EnsembleArgs),
    /// Ratio of SMS to IID band widths for n = 1..n-max.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Bandwidth(BandwidthArgs),
    /// Simulated records, ML estimates and the Cramer-Rao comparison.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Trajectory(TrajectoryArgs),
    /// Run a named preset configuration.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Preset(PresetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Iid,
    Sms,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
pub enum PresetId {
    #[value(name = "fig3")]
    #[serde(rename = "fig3")]
    Fig3,
    #[value(name = "fig4a")]
    #[serde(rename = "fig4a")]
    Fig4a,
    #[value(name = "fig4b")]
    #[serde(rename = "fig4b")]
    Fig4b,
    #[value(name = "fig4-collapse")]
    #[serde(rename = "fig4-collapse")]
    Fig4Collapse,
    #[value(name = "fig5-iid")]
    #[serde(rename = "fig5-iid")]
    Fig5Iid,
    #[value(name = "fig5-sms")]
    #[serde(rename = "fig5-sms")]
    Fig5Sms,
    #[value(name = "fig6-short-tau")]
    #[serde(rename = "fig6-short-tau")]
    Fig6ShortTau,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent (no metadata sidecar is written then).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; falls back to THERMO_THREADS, then to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long = "T-min", default_value_t = 0.05)]
    pub t_min: f64,
    #[arg(long = "T-max", default_value_t = 3.0)]
    pub t_max: f64,
    #[arg(long = "T-steps", default_value_t = 200)]
    pub t_steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MeasurementArgs {
    /// Interval between measurements, in units of 1/gamma.
    #[arg(long, default_value_t = 4.0)]
    pub tau: f64,
    /// POVM angle in [0, pi/4].
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Omega / gamma; irrelevant for population readout.
    #[arg(long = "omega-ratio", default_value_t = 0.0)]
    pub omega_ratio: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Do not append the ground and excited states to the samples.
    #[arg(long = "no-poles")]
    pub no_poles: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FiCurveArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Both)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// ground | excited | thermal | maxmixed | rx,ry,rz
    #[arg(long, default_value = "ground", allow_hyphen_values = true)]
    pub rho0: String,
    #[command(flatten)]
    pub measurement: MeasurementArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Both)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[command(flatten)]
    pub measurement: MeasurementArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BandwidthArgs {
    #[arg(long = "n-max", default_value_t = 7)]
    pub n_max: usize,
    #[command(flatten)]
    pub measurement: MeasurementArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TrajectoryArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Sms)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, default_value = "ground", allow_hyphen_values = true)]
    pub rho0: String,
    #[arg(long = "tau", default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[arg(long = "omega-ratio", default_value_t = 0.0)]
    pub omega_ratio: f64,
    #[arg(long = "true-T", default_value_t = 1.0)]
    pub true_t: f64,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "prior-min", default_value_t = 0.1)]
    pub prior_min: f64,
    #[arg(long = "prior-max", default_value_t = 5.0)]
    pub prior_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PresetArgs {
    #[arg(value_enum)]
    pub id: PresetId,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "no-poles")]
    pub no_poles: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
