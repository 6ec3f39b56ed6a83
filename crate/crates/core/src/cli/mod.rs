//! Command-line front end: argument parsing, named presets and CSV / JSON output.

mod args;
mod config;
mod output;
mod run;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};
use std::fmt;
use std::path::PathBuf;

use clap::Parser;
use serde::Serialize;

pub use args::{Cli, Format, PresetId};
pub use config::parse_config;
pub use output::format_float;
pub use output::CsvWriter;
pub use run::{exit_code, run, RunSummary};

use crate::bloch::{thermal_state, BathParams, QubitState};
use crate::ensemble::{EnsembleSpec, TemperatureGrid};
use crate::fisher::Scheme;
use crate::povm::MeasurementFamily;
use crate::trajectory::PriorRange;
use args::{Command, GridArgs, MeasurementArgs, OutputArgs, SamplingArgs, SchemeArg};

pub const TOOL_NAME: &str = "thermo";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "THERMO_THREADS";

/// Input state as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho0 {
    Ground,
    Excited,
    /// Thermal state of the bath being probed, prepared as a fixed input.
    Thermal,
    MaxMixed,
    Bloch(QubitState),
}

impl Rho0 {
    pub fn parse(text: &str) -> Result<Self, String> {
        match text.trim().to_ascii_lowercase().as_str() {
            "ground" => Ok(Rho0::Ground),
            "excited" => Ok(Rho0::Excited),
            "thermal" => Ok(Rho0::Thermal),
            "maxmixed" => Ok(Rho0::MaxMixed),
            other => {
                let parts: Vec<&str> = other.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(format!(
                        "--rho0: expected ground|excited|thermal|maxmixed|rx,ry,rz, got '{text}'"
                    ));
                }
                let mut r = [0.0; 3];
                for (slot, part) in r.iter_mut().zip(&parts) {
                    *slot = part
                        .parse()
                        .map_err(|_| format!("--rho0: '{part}' is not a number"))?;
                }
                QubitState::new(r[0], r[1], r[2]).map(Rho0::Bloch).map_err(|_| {
                    let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                    format!("--rho0: Bloch vector norm {norm} exceeds 1 (state must satisfy |r| <= 1)")
                })
            }
        }
    }

    pub fn resolve(&self, bath: &BathParams) -> QubitState {
        match self {
            Rho0::Ground => QubitState::ground(),
            Rho0::Excited => QubitState::excited(),
            Rho0::Thermal => thermal_state(bath),
            Rho0::MaxMixed => QubitState::maximally_mixed(),
            Rho0::Bloch(s) => *s,
        }
    }
}

impl fmt::Display for Rho0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rho0::Ground => f.write_str("ground"),
            Rho0::Excited => f.write_str("excited"),
            Rho0::Thermal => f.write_str("thermal"),
            Rho0::MaxMixed => f.write_str("maxmixed"),
            Rho0::Bloch(s) => write!(
                f,
                "{},{},{}",
                format_float(s.x()),
                format_float(s.y()),
                format_float(s.z())
            ),
        }
    }
}

impl Serialize for Rho0 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Task {
    FiCurve {
        schemes: Vec<Scheme>,
        n: usize,
        tau: f64,
        phis: Vec<f64>,
        rho0: Rho0,
        omega_ratio: f64,
        grid: TemperatureGrid,
    },
    Ensemble {
        schemes: Vec<Scheme>,
        ns: Vec<usize>,
        tau: f64,
        phi: f64,
        omega_ratio: f64,
        grid: TemperatureGrid,
        ensemble: EnsembleSpec,
    },
    Bandwidth {
        n_max: usize,
        tau: f64,
        phi: f64,
        omega_ratio: f64,
        grid: TemperatureGrid,
        ensemble: EnsembleSpec,
    },
    Trajectory {
        scheme: Scheme,
        n: usize,
        tau: f64,
        phi: f64,
        rho0: Rho0,
        omega_ratio: f64,
        true_temperature: f64,
        trials: usize,
        seed: u64,
        prior: PriorRange,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub task: Task,
    pub preset: Option<PresetId>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

/// Why `argv` did not produce a [`RunConfig`].
#[derive(Debug)]
pub enum ParseFailure {
    /// Syntax errors, `--help` and `--version`; clap knows how to report these.
    Clap(clap::Error),
    /// One diagnostic line per invalid setting.
    Invalid(Vec<String>),
}

impl ParseFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            ParseFailure::Clap(e) => e.exit_code(),
            ParseFailure::Invalid(_) => 2,
        }
    }
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseFailure::Clap(e) => write!(f, "{e}"),
            ParseFailure::Invalid(lines) => {
                for line in lines {
                    writeln!(f, "error: {line}")?;
                }
                Ok(())
            }
        }
    }
}

/// Collects every semantic problem instead of stopping at the first.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn phi(&mut self, phi: f64) {
        if !(0.0..=FRAC_PI_4).contains(&phi) {
            self.0.push(format!(
                "--phi {phi} is out of range: must lie in [0, pi/4] = [0, {FRAC_PI_4}]"
            ));
        }
    }

    fn tau(&mut self, tau: f64) {
        if !(tau >= 0.0 && tau.is_finite()) {
            self.0.push(format!("--tau {tau} must be non-negative"));
        }
    }

    fn n(&mut self, flag: &str, n: usize) {
        if n == 0 {
            self.0.push(format!("--{flag} must be at least 1"));
        }
    }

    fn omega(&mut self, omega: f64) {
        if !omega.is_finite() {
            self.0.push(format!("--omega-ratio {omega} must be finite"));
        }
    }

    fn grid(&mut self, g: &GridArgs) -> TemperatureGrid {
        if !(g.t_min > 0.0 && g.t_min.is_finite()) {
            self.0.push(format!("--T-min {} must be positive", g.t_min));
        }
        if !(g.t_min < g.t_max && g.t_max.is_finite()) {
            self.0.push(format!(
                "--T-max {} must be finite and greater than --T-min {}",
                g.t_max, g.t_min
            ));
        }
        if g.t_steps < 2 {
            self.0
                .push(format!("--T-steps {} must be at least 2", g.t_steps));
        }
        TemperatureGrid {
            t_min: g.t_min,
            t_max: g.t_max,
            steps: g.t_steps,
        }
    }

    fn sampling(&mut self, s: &SamplingArgs) -> EnsembleSpec {
        if s.samples == 0 {
            self.0.push("--samples must be at least 1".into());
        }
        EnsembleSpec {
            samples: s.samples,
            seed: s.seed,
            include_poles: !s.no_poles,
        }
    }

    fn rho0(&mut self, text: &str) -> Rho0 {
        Rho0::parse(text).unwrap_or_else(|e| {
            self.0.push(e);
            Rho0::Ground
        })
    }

    fn measurement(&mut self, m: &MeasurementArgs) {
        self.tau(m.tau);
        self.phi(m.phi);
        self.omega(m.omega_ratio);
    }

    fn threads(&mut self, o: &OutputArgs) -> Option<usize> {
        if o.threads == Some(0) {
            self.0.push("--threads must be a positive integer".into());
            return None;
        }
        if o.threads.is_some() {
            return o.threads;
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(k) if k > 0 => Some(k),
                _ => {
                    self.0
                        .push(format!("{THREADS_ENV}='{v}' must be a positive integer"));
                    None
                }
            },
            Err(_) => None,
        }
    }
}

fn schemes(arg: SchemeArg) -> Vec<Scheme> {
    match arg {
        SchemeArg::Iid => vec![Scheme::Iid],
        SchemeArg::Sms => vec![Scheme::Sms],
        SchemeArg::Both => vec![Scheme::Iid, Scheme::Sms],
    }
}

/// Protocol settings behind each named preset.
pub fn preset_task(id: PresetId, grid: TemperatureGrid, ensemble: EnsembleSpec) -> Task {
    let ensemble_task = |ns: Vec<usize>, tau: f64, phi: f64| Task::Ensemble {
        schemes: vec![Scheme::Iid, Scheme::Sms],
        ns,
        tau,
        phi,
        omega_ratio: 0.0,
        grid,
        ensemble,
    };
    let fig5 = |scheme: Scheme| Task::FiCurve {
        schemes: vec![scheme],
        n: 3,
        tau: 9.5,
        phis: vec![0.0, FRAC_PI_8, FRAC_PI_6, FRAC_PI_4],
        rho0: Rho0::Ground,
        omega_ratio: 0.0,
        grid,
    };
    match id {
        PresetId::Fig3 => Task::Bandwidth {
            n_max: 7,
            tau: 4.0,
            phi: 0.0,
            omega_ratio: 0.0,
            grid,
            ensemble,
        },
        PresetId::Fig4a => ensemble_task(vec![3], 4.0, 0.0),
        PresetId::Fig4b => ensemble_task(vec![7], 4.0, 0.0),
        PresetId::Fig4Collapse => ensemble_task(vec![3, 7], 10.0, 0.0),
        PresetId::Fig5Iid => fig5(Scheme::Iid),
        PresetId::Fig5Sms => fig5(Scheme::Sms),
        PresetId::Fig6ShortTau => ensemble_task(vec![3], 2.0, FRAC_PI_8),
    }
}

impl Task {
    fn default_format(&self) -> Format {
        match self {
            Task::Trajectory { .. } => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Parses `argv` (including the program name) after merging any `--config` file.
pub fn parse<I, T>(argv: I) -> Result<RunConfig, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let merged = config::merge_config(&argv).map_err(ParseFailure::Invalid)?;
    let cli = Cli::try_parse_from(merged).map_err(ParseFailure::Clap)?;
    let mut checks = Checks::default();

    let (task, preset, output) = match cli.command {
        Command::FiCurve(a) => {
            checks.n("n", a.n);
            checks.measurement(&a.measurement);
            let task = Task::FiCurve {
                schemes: schemes(a.scheme),
                n: a.n,
                tau: a.measurement.tau,
                phis: vec![a.measurement.phi],
                rho0: checks.rho0(&a.rho0),
                omega_ratio: a.measurement.omega_ratio,
                grid: checks.grid(&a.grid),
            };
            (task, None, a.output)
        }
        Command::Ensemble(a) => {
            checks.n("n", a.n);
            checks.measurement(&a.measurement);
            let task = Task::Ensemble {
                schemes: schemes(a.scheme),
                ns: vec![a.n],
                tau: a.measurement.tau,
                phi: a.measurement.phi,
                omega_ratio: a.measurement.omega_ratio,
                grid: checks.grid(&a.grid),
                ensemble: checks.sampling(&a.sampling),
            };
            (task, None, a.output)
        }
        Command::Bandwidth(a) => {
            checks.n("n-max", a.n_max);
            checks.measurement(&a.measurement);
            let task = Task::Bandwidth {
                n_max: a.n_max,
                tau: a.measurement.tau,
                phi: a.measurement.phi,
                omega_ratio: a.measurement.omega_ratio,
                grid: checks.grid(&a.grid),
                ensemble: checks.sampling(&a.sampling),
            };
            (task, None, a.output)
        }
        Command::Trajectory(a) => {
            checks.n("n", a.n);
            checks.tau(a.tau);
            checks.phi(a.phi);
            checks.omega(a.omega_ratio);
            if !(a.true_t > 0.0 && a.true_t.is_finite()) {
                checks
                    .0
                    .push(format!("--true-T {} must be positive", a.true_t));
            }
            if a.trials < crate::trajectory::MIN_TRIALS {
                checks.0.push(format!(
                    "--trials {} must be at least {}",
                    a.trials,
                    crate::trajectory::MIN_TRIALS
                ));
            }
            if !(a.prior_min > 0.0 && a.prior_min < a.prior_max && a.prior_max.is_finite()) {
                checks.0.push(format!(
                    "--prior-min {} / --prior-max {} must satisfy 0 < min < max",
                    a.prior_min, a.prior_max
                ));
            }
            let scheme = match a.scheme {
                SchemeArg::Iid => Scheme::Iid,
                SchemeArg::Sms => Scheme::Sms,
                SchemeArg::Both => {
                    checks
                        .0
                        .push("--scheme for trajectory must be iid or sms".into());
                    Scheme::Sms
                }
            };
            let task = Task::Trajectory {
                scheme,
                n: a.n,
                tau: a.tau,
                phi: a.phi,
                rho0: checks.rho0(&a.rho0),
                omega_ratio: a.omega_ratio,
                true_temperature: a.true_t,
                trials: a.trials,
                seed: a.seed,
                prior: PriorRange {
                    lo: a.prior_min,
                    hi: a.prior_max,
                },
            };
            (task, None, a.output)
        }
        Command::Preset(a) => {
            let grid = checks.grid(&a.grid);
            let ensemble = checks.sampling(&SamplingArgs {
                samples: a.samples,
                seed: a.seed,
                no_poles: a.no_poles,
            });
            (preset_task(a.id, grid, ensemble), Some(a.id), a.output)
        }
    };
    let threads = checks.threads(&output);
    if !checks.0.is_empty() {
        return Err(ParseFailure::Invalid(checks.0));
    }
    Ok(RunConfig {
        format: output.format.unwrap_or_else(|| task.default_format()),
        task,
        preset,
        out: output.out,
        threads,
    })
}

// Keeps the family constructor next to the validated phi it relies on.
pub(crate) fn family(phi: f64) -> crate::Result<MeasurementFamily> {
    MeasurementFamily::new(phi)
}
