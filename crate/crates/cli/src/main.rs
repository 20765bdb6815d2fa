use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use swarmopt::harness::{
    load_config, run_benchmark_campaign, run_solar_campaign, run_suite, ExperimentSpec, Target,
};
use swarmopt::testbed::FunctionId;

/// Swarm optimizer: benchmark campaigns and PV array reconfiguration.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Repeated seeded runs on one benchmark function.
    Benchmark {
        /// Function id, e.g. F9.
        #[arg(long)]
        function: Option<FunctionId>,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Reconfigure a shaded PV array.
    Solar {
        /// Irradiance file (`R C` header, then R rows of factors in [0,1]).
        /// Defaults to the built-in 9x9 short wide shadow.
        #[arg(long)]
        irradiance: Option<PathBuf>,
        /// Arrangement file to score next to the TCT baseline.
        #[arg(long)]
        arrangement: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Every benchmark function at each requested dimension.
    Suite {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        dims: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// `key = value` experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Common {
    fn base(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => load_config(path)?,
            None => ExperimentSpec::default(),
        };
        if let Some(runs) = self.runs {
            spec.runs = runs;
        }
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(dir) = &self.out_dir {
            spec.out_dir = dir.clone();
        }
        Ok(spec)
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Benchmark {
            function,
            dim,
            common,
        } => {
            let mut spec = common.base()?;
            let (f0, d0) = match spec.target {
                Target::Benchmark { function, dim } => (function, dim),
                Target::Solar { .. } => bail!("config describes a solar experiment"),
            };
            spec.target = Target::Benchmark {
                function: function.unwrap_or(f0),
                dim: dim.unwrap_or(d0),
            };
            let (_, s) = run_benchmark_campaign(&spec).context("benchmark campaign failed")?;
            println!("function,dim,best,mean,std");
            println!(
                "{},{},{:e},{:e},{:e}",
                s.function, s.dim, s.best, s.mean, s.std
            );
        }
        Command::Solar {
            irradiance,
            arrangement,
            common,
        } => {
            let mut spec = common.base()?;
            let (i0, a0) = match (common.config.is_some(), spec.target) {
                (
                    _,
                    Target::Solar {
                        irradiance,
                        arrangement,
                    },
                ) => (irradiance, arrangement),
                (true, Target::Benchmark { .. }) => {
                    bail!("config describes a benchmark experiment")
                }
                (false, Target::Benchmark { .. }) => (None, None),
            };
            spec.target = Target::Solar {
                irradiance: irradiance.or(i0),
                arrangement: arrangement.or(a0),
            };
            let report = run_solar_campaign(&spec).context("solar campaign failed")?;
            println!("label,power_watts");
            println!("tct,{:.3}", report.tct_power);
            if let Some(p) = report.arrangement_power {
                println!("arrangement,{p:.3}");
            }
            println!("best,{:.3}", report.best_power());
        }
        Command::Suite { dims, common } => {
            let spec = common.base()?;
            if let Target::Solar { .. } = spec.target {
                bail!("config describes a solar experiment");
            }
            let stats = run_suite(&spec, &dims).context("suite failed")?;
            println!("function,dim,best,mean,std");
            for s in stats {
                println!(
                    "{},{},{:e},{:e},{:e}",
                    s.function, s.dim, s.best, s.mean, s.std
                );
            }
        }
    }
    Ok(())
}
