//! Seeded multi-run campaigns, summary statistics and CSV output.
//!
//! Run `i` of a campaign uses seed `base + i`, so any single run can be
//! reproduced in isolation. Standard deviations are population values.

mod config;
mod csv_io;

use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

pub use config::{load_config, parse_config, ExperimentSpec, Settings, Target};
pub use csv_io::{
    read_convergence_csv, read_power_curve_csv, read_summary_csv, write_convergence_csv,
    write_power_curve_csv, write_summary_csv,
};

use crate::error::{Error, Result};
use crate::optimizer::{optimize, Termination, TracePoint};
use crate::solar::{
    arrangement_power, baseline_tct, max_power, row_currents, run_discrete_swarm, Arrangement,
    IrradianceMatrix, PowerCurve,
};
use crate::testbed::{FunctionId, Matrix, ObjectiveSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Benchmark {
        position: Vec<f64>,
        error: f64,
    },
    Solar {
        arrangement: Arrangement,
        curve: PowerCurve,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// Objective value for benchmarks; output power in watts for solar runs.
    pub best_fitness: f64,
    pub evaluations: u64,
    pub termination: Termination,
    pub trace: Vec<TracePoint>,
    pub outcome: Outcome,
}

impl RunRecord {
    /// Final error against the known optimum; `None` for solar runs.
    pub fn error(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Benchmark { error, .. } => Some(error),
            Outcome::Solar { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub function: String,
    pub dim: usize,
    pub best: f64,
    pub mean: f64,
    pub std: f64,
}

/// Best, mean and population standard deviation of the final errors.
pub fn summarize(function: &str, dim: usize, records: &[RunRecord]) -> Result<SummaryStats> {
    let errors: Vec<f64> = records
        .iter()
        .map(|r| {
            r.error()
                .ok_or_else(|| Error::Contract("solar runs have no error to summarize".into()))
        })
        .collect::<Result<_>>()?;
    summarize_errors(function, dim, &errors)
}

pub fn summarize_errors(function: &str, dim: usize, errors: &[f64]) -> Result<SummaryStats> {
    if errors.is_empty() {
        return Err(Error::Contract("cannot summarize zero runs".into()));
    }
    let n = errors.len() as f64;
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n;
    let var = sorted.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    Ok(SummaryStats {
        function: function.to_string(),
        dim,
        best: sorted[0],
        mean,
        std: var.sqrt(),
    })
}

/// Creates `dir` and checks that files can be written into it.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

fn read_reals(path: &Path, needed: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::with_capacity(needed);
    for (i, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            if values.len() == needed {
                return Ok(values);
            }
            values.push(tok.parse::<f64>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("`{tok}`: {e}"),
            })?);
        }
    }
    if values.len() < needed {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("expected at least {needed} values, found {}", values.len()),
        });
    }
    Ok(values)
}

/// Benchmark instance of a campaign, with any external shift or rotation
/// applied.
pub fn benchmark_instance(spec: &ExperimentSpec) -> Result<ObjectiveSpec> {
    let Target::Benchmark { function, dim } = spec.target else {
        return Err(Error::Contract("not a benchmark experiment".into()));
    };
    let mut obj = ObjectiveSpec::generate(function, dim, spec.seed)?;
    if let Some(path) = &spec.shift_file {
        obj = obj.with_shift(read_reals(path, dim)?)?;
    }
    if let Some(path) = &spec.rotation_file {
        obj = obj.with_rotation(Matrix::new(dim, dim, read_reals(path, dim * dim)?)?)?;
    }
    Ok(obj)
}

fn solar_irradiance(irradiance: &Option<PathBuf>) -> Result<IrradianceMatrix> {
    match irradiance {
        Some(p) => IrradianceMatrix::read(p),
        None => Ok(IrradianceMatrix::short_wide_shadow()),
    }
}

fn run_file(dir: &Path, stem: &str, run: usize, suffix: &str) -> PathBuf {
    dir.join(format!("{stem}_run{run:02}_{suffix}"))
}

/// Runs every seeded repetition of `spec` in parallel and writes one
/// convergence file per run as it finishes. Records come back in run order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    ensure_writable(&spec.out_dir)?;
    match &spec.target {
        Target::Benchmark { function, dim } => {
            let obj = benchmark_instance(spec)?;
            let stem = format!("{function}_{dim}d");
            (0..spec.runs)
                .into_par_iter()
                .map(|run| {
                    let seed = spec.run_seed(run);
                    let cfg = spec
                        .settings
                        .swarm_config(obj.search_bounds().clone(), seed)?;
                    let result = optimize(cfg, obj.objective(!seed))?;
                    let record = RunRecord {
                        run,
                        seed,
                        best_fitness: result.best.fitness,
                        evaluations: result.evaluations,
                        termination: result.termination,
                        outcome: Outcome::Benchmark {
                            error: result.best.fitness - obj.f_min,
                            position: result.best.position,
                        },
                        trace: result.trace,
                    };
                    write_convergence_csv(
                        &record.trace,
                        &run_file(&spec.out_dir, &stem, run, "convergence.csv"),
                    )?;
                    info!(
                        "{stem} run {run}: error {:e}",
                        record.best_fitness - obj.f_min
                    );
                    Ok(record)
                })
                .collect()
        }
        Target::Solar { irradiance, .. } => {
            let irr = solar_irradiance(irradiance)?;
            let params = spec.settings.pv_params()?;
            (0..spec.runs)
                .into_par_iter()
                .map(|run| {
                    let seed = spec.run_seed(run);
                    let cfg = spec.settings.discrete_config(seed)?;
                    let result = run_discrete_swarm(&cfg, &irr, &params)?;
                    let record = RunRecord {
                        run,
                        seed,
                        best_fitness: result.power,
                        evaluations: result.evaluations,
                        termination: result.termination,
                        trace: result.trace,
                        outcome: Outcome::Solar {
                            arrangement: result.best,
                            curve: result.curve,
                        },
                    };
                    if let Outcome::Solar { arrangement, curve } = &record.outcome {
                        write_convergence_csv(
                            &record.trace,
                            &run_file(&spec.out_dir, "solar", run, "convergence.csv"),
                        )?;
                        write_power_curve_csv(
                            curve,
                            &run_file(&spec.out_dir, "solar", run, "curve.csv"),
                        )?;
                        arrangement.write(run_file(&spec.out_dir, "solar", run, "best.txt"))?;
                    }
                    info!("solar run {run}: {:.3} W", record.best_fitness);
                    Ok(record)
                })
                .collect()
        }
    }
}

/// Result of a benchmark campaign, summary written to `summary.csv`.
pub fn run_benchmark_campaign(spec: &ExperimentSpec) -> Result<(Vec<RunRecord>, SummaryStats)> {
    let Target::Benchmark { function, dim } = spec.target else {
        return Err(Error::Contract("not a benchmark experiment".into()));
    };
    let records = run_experiment(spec)?;
    let stats = summarize(&function.to_string(), dim, &records)?;
    write_summary_csv(
        std::slice::from_ref(&stats),
        &spec.out_dir.join("summary.csv"),
    )?;
    Ok((records, stats))
}

/// Baselines and per-run powers of a solar campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct SolarReport {
    pub tct_power: f64,
    /// Power of the user-supplied arrangement, when one was given.
    pub arrangement_power: Option<f64>,
    pub records: Vec<RunRecord>,
}

impl SolarReport {
    pub fn best_power(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.best_fitness)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Runs a solar campaign and writes `solar_tct_curve.csv` and
/// `solar_summary.csv` (`label,evaluations,power_watts`) next to the
/// per-run files.
pub fn run_solar_campaign(spec: &ExperimentSpec) -> Result<SolarReport> {
    let Target::Solar {
        irradiance,
        arrangement,
    } = &spec.target
    else {
        return Err(Error::Contract("not a solar experiment".into()));
    };
    spec.validate()?;
    let irr = solar_irradiance(irradiance)?;
    let params = spec.settings.pv_params()?;
    let user = arrangement
        .as_ref()
        .map(|p| -> Result<(f64, PowerCurve)> {
            let arr = Arrangement::read(p)?;
            let power = arrangement_power(&arr, &irr, &params)?;
            let (_, curve) = max_power(&row_currents(&arr, &irr, &params)?, params.v_m);
            Ok((power, curve))
        })
        .transpose()?;
    ensure_writable(&spec.out_dir)?;
    let (tct_power, tct_curve) = baseline_tct(&irr, &params);
    write_power_curve_csv(&tct_curve, &spec.out_dir.join("solar_tct_curve.csv"))?;
    if let Some((_, curve)) = &user {
        write_power_curve_csv(curve, &spec.out_dir.join("solar_arrangement_curve.csv"))?;
    }
    let records = run_experiment(spec)?;

    let path = spec.out_dir.join("solar_summary.csv");
    let mut rows = vec![("tct".to_string(), 1, tct_power)];
    if let Some((p, _)) = user {
        rows.push(("arrangement".to_string(), 1, p));
    }
    rows.extend(
        records
            .iter()
            .map(|r| (format!("run{:02}", r.run), r.evaluations, r.best_fitness)),
    );
    csv_io::write_rows(
        &path,
        &["label", "evaluations", "power_watts"],
        rows.iter()
            .map(|(l, e, p)| vec![l.clone(), e.to_string(), p.to_string()]),
    )?;
    Ok(SolarReport {
        tct_power,
        arrangement_power: user.map(|(p, _)| p),
        records,
    })
}

/// Every supported function at every dimension in `dims`, one summary row
/// each, written to `summary.csv`.
pub fn run_suite(base: &ExperimentSpec, dims: &[usize]) -> Result<Vec<SummaryStats>> {
    ensure_writable(&base.out_dir)?;
    let mut all = Vec::new();
    for &dim in dims {
        for function in FunctionId::ALL {
            let spec = ExperimentSpec {
                target: Target::Benchmark { function, dim },
                shift_file: None,
                rotation_file: None,
                ..base.clone()
            };
            let records = run_experiment(&spec)?;
            let stats = summarize(&function.to_string(), dim, &records)?;
            info!(
                "{function} {dim}-D: best {:e} mean {:e} std {:e}",
                stats.best, stats.mean, stats.std
            );
            all.push(stats);
        }
    }
    write_summary_csv(&all, &base.out_dir.join("summary.csv"))?;
    Ok(all)
}
