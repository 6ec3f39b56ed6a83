use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::output::{format_float, CsvWriter};
use super::{family, Format, RunConfig, Task, TOOL_NAME, TOOL_VERSION};
use crate::bloch::BathParams;
use crate::ensemble::{band_curve, bandwidth_ratio, BandCurve};
use crate::error::{Result, ThermoError};
use crate::fisher::{fisher_information, ProtocolSpec};
use crate::trajectory::crb_report;

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub rows: usize,
    pub out: Option<PathBuf>,
    pub meta: Option<PathBuf>,
}

/// Process exit status for a failed run: 3 for I/O, 1 for everything else.
pub fn exit_code(err: &ThermoError) -> i32 {
    match err {
        ThermoError::Io(_) => 3,
        _ => 1,
    }
}

fn unit_bath(temperature: f64, omega_ratio: f64) -> Result<BathParams> {
    Ok(BathParams::new(temperature, 1.0)?.with_omega_ratio(omega_ratio))
}

#[derive(Serialize)]
struct FiRow {
    scheme: crate::fisher::Scheme,
    n: usize,
    tau: f64,
    phi: f64,
    #[serde(rename = "T")]
    temperature: f64,
    rho0: String,
    #[serde(rename = "FI")]
    fi: f64,
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    preset: Option<super::PresetId>,
    format: Format,
    seed: Option<u64>,
    params: &'a Task,
}

fn subcommand_name(task: &Task) -> &'static str {
    match task {
        Task::FiCurve { .. } => "fi-curve",
        Task::Ensemble { .. } => "ensemble",
        Task::Bandwidth { .. } => "bandwidth",
        Task::Trajectory { .. } => "trajectory",
    }
}

fn task_seed(task: &Task) -> Option<u64> {
    match task {
        Task::FiCurve { .. } => None,
        Task::Ensemble { ensemble, .. } | Task::Bandwidth { ensemble, .. } => Some(ensemble.seed),
        Task::Trajectory { seed, .. } => Some(*seed),
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    text
}

fn f(x: f64) -> String {
    format_float(x)
}

/// Computes the task and renders it; returns the document and its row count.
fn render(task: &Task, format: Format) -> Result<(String, usize)> {
    match task {
        Task::FiCurve {
            schemes,
            n,
            tau,
            phis,
            rho0,
            omega_ratio,
            grid,
        } => {
            let temps = grid.points();
            let mut rows = Vec::new();
            for &scheme in schemes {
                for &phi in phis {
                    let fam = family(phi)?;
                    for &t in &temps {
                        let bath = unit_bath(t, *omega_ratio)?;
                        let spec = ProtocolSpec::new(scheme, *n, *tau, rho0.resolve(&bath), fam)?;
                        let fi = fisher_information(&spec, &bath)?.value;
                        rows.push(FiRow {
                            scheme,
                            n: *n,
                            tau: *tau,
                            phi,
                            temperature: t,
                            rho0: rho0.to_string(),
                            fi,
                        });
                    }
                }
            }
            let count = rows.len();
            let doc = match format {
                Format::Json => to_json(&rows),
                Format::Csv => {
                    let mut w = CsvWriter::new(&["scheme", "n", "tau", "phi", "T", "rho0", "FI"]);
                    for r in &rows {
                        w.row([
                            r.scheme.to_string(),
                            r.n.to_string(),
                            f(r.tau),
                            f(r.phi),
                            f(r.temperature),
                            r.rho0.clone(),
                            f(r.fi),
                        ]);
                    }
                    w.finish()
                }
            };
            Ok((doc, count))
        }
        Task::Ensemble {
            schemes,
            ns,
            tau,
            phi,
            omega_ratio,
            grid,
            ensemble,
        } => {
            let fam = family(*phi)?;
            let bath = unit_bath(1.0, *omega_ratio)?;
            let mut bands: Vec<BandCurve> = Vec::new();
            for &n in ns {
                for &scheme in schemes {
                    bands.push(band_curve(scheme, n, *tau, &fam, &bath, grid, ensemble)?);
                }
            }
            let count = bands.iter().map(|b| b.temperatures.len()).sum();
            let doc = match format {
                Format::Json => to_json(&bands),
                Format::Csv => {
                    let mut w = CsvWriter::new(&[
                        "scheme", "n", "tau", "phi", "T", "fi_min", "fi_mean", "fi_max",
                    ]);
                    for b in &bands {
                        for (i, &t) in b.temperatures.iter().enumerate() {
                            w.row([
                                b.scheme.to_string(),
                                b.n.to_string(),
                                f(b.tau),
                                f(b.phi),
                                f(t),
                                f(b.fi_min[i]),
                                f(b.fi_mean[i]),
                                f(b.fi_max[i]),
                            ]);
                        }
                    }
                    w.finish()
                }
            };
            Ok((doc, count))
        }
        Task::Bandwidth {
            n_max,
            tau,
            phi,
            omega_ratio,
            grid,
            ensemble,
        } => {
            let fam = family(*phi)?;
            let bath = unit_bath(1.0, *omega_ratio)?;
            let result = bandwidth_ratio(*n_max, *tau, &fam, &bath, grid, ensemble)?;
            let count = result.n_values.len();
            let doc = match format {
                Format::Json => to_json(&result),
                Format::Csv => {
                    let mut w = CsvWriter::new(&[
                        "n",
                        "tau",
                        "phi",
                        "T_peak",
                        "delta_iid",
                        "delta_sms",
                        "ratio",
                    ]);
                    for (i, n) in result.n_values.iter().enumerate() {
                        w.row([
                            n.to_string(),
                            f(result.tau),
                            f(result.phi),
                            f(result.peak_temperature),
                            f(result.delta_iid[i]),
                            f(result.delta_sms[i]),
                            f(result.ratio[i]),
                        ]);
                    }
                    w.finish()
                }
            };
            Ok((doc, count))
        }
        Task::Trajectory {
            scheme,
            n,
            tau,
            phi,
            rho0,
            omega_ratio,
            true_temperature,
            trials,
            seed,
            prior,
        } => {
            let bath = unit_bath(*true_temperature, *omega_ratio)?;
            let spec = ProtocolSpec::new(*scheme, *n, *tau, rho0.resolve(&bath), family(*phi)?)?;
            let prior = crate::trajectory::PriorRange::new(prior.lo, prior.hi)?;
            let report = crb_report(&spec, &bath, *trials, *seed, &prior)?;
            let doc = match format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut w = CsvWriter::new(&[
                        "scheme",
                        "n",
                        "tau",
                        "phi",
                        "true_T",
                        "seed",
                        "trials",
                        "flat_trials",
                        "boundary_hits",
                        "mean",
                        "median",
                        "bias",
                        "rmse",
                        "fisher_information",
                        "crb",
                        "ratio",
                    ]);
                    w.row([
                        report.scheme.to_string(),
                        report.n.to_string(),
                        f(report.tau),
                        f(report.phi),
                        f(report.true_temperature),
                        report.seed.to_string(),
                        report.trials.to_string(),
                        report.flat_trials.to_string(),
                        report.boundary_hits.to_string(),
                        f(report.mean),
                        f(report.median),
                        f(report.bias),
                        f(report.rmse),
                        f(report.fisher_information),
                        f(report.crb),
                        f(report.ratio),
                    ]);
                    w.finish()
                }
            };
            Ok((doc, 1))
        }
    }
}

fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| {
        ThermoError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn execute(config: &RunConfig) -> Result<RunSummary> {
    let (doc, rows) = render(&config.task, config.format)?;
    let Some(out) = &config.out else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(doc.as_bytes())?;
        stdout.flush()?;
        return Ok(RunSummary {
            rows,
            out: None,
            meta: None,
        });
    };
    write_file(out, &doc)?;
    let meta = Meta {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        subcommand: subcommand_name(&config.task),
        preset: config.preset,
        format: config.format,
        seed: task_seed(&config.task),
        params: &config.task,
    };
    let path = meta_path(out);
    write_file(&path, &to_json(&meta))?;
    Ok(RunSummary {
        rows,
        out: Some(out.clone()),
        meta: Some(path),
    })
}

/// Runs the configured task, on a dedicated pool when a thread count is set.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| ThermoError::Config(format!("cannot start {k} worker threads: {e}")))?
            .install(|| execute(config)),
        None => execute(config),
    }
}
