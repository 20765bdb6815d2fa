//! Flat `key = value` experiment files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::geometry::Bounds;
use crate::optimizer::{StopCriteria, SwarmConfig};
use crate::solar::{DiscreteConfig, PvParams};
use crate::testbed::FunctionId;

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Benchmark {
        function: FunctionId,
        dim: usize,
    },
    Solar {
        /// Irradiance file; the built-in short wide shadow when `None`.
        irradiance: Option<PathBuf>,
        /// Extra arrangement scored alongside the TCT baseline.
        arrangement: Option<PathBuf>,
    },
}

impl Target {
    pub fn mode(&self) -> &'static str {
        match self {
            Target::Benchmark { .. } => "benchmark",
            Target::Solar { .. } => "solar",
        }
    }
}

/// Optimizer settings. Range-dependent values left at `None` are derived
/// from the search bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub population: usize,
    pub max_iterations: u64,
    pub local_iterations: usize,
    pub local_iteration_step: usize,
    pub min_local_iterations: usize,
    pub buffer_len: usize,
    pub neighborhood_fraction: f64,
    pub close_count: Option<usize>,
    pub initial_radius: Option<f64>,
    pub radius_step: Option<f64>,
    pub min_radius: Option<f64>,
    pub max_radius: Option<f64>,
    pub founder_radius: Option<f64>,
    /// Defaults to `10 000 · D` for benchmarks and 50 000 for solar runs.
    pub max_evaluations: Option<u64>,
    pub convergence_epsilon: Option<f64>,
    pub time_budget_secs: Option<f64>,
    pub accept_sideways: bool,
    pub v_m: f64,
    pub i_m: f64,
}

impl Default for Settings {
    fn default() -> Self {
        let discrete = DiscreteConfig::default();
        let pv = PvParams::default();
        Self {
            population: 40,
            max_iterations: 1_000_000,
            local_iterations: 50,
            local_iteration_step: 5,
            min_local_iterations: 10,
            buffer_len: 5,
            neighborhood_fraction: 0.1,
            close_count: None,
            initial_radius: None,
            radius_step: None,
            min_radius: None,
            max_radius: None,
            founder_radius: None,
            max_evaluations: None,
            convergence_epsilon: None,
            time_budget_secs: None,
            accept_sideways: discrete.accept_sideways,
            v_m: pv.v_m,
            i_m: pv.i_m,
        }
    }
}

impl Settings {
    fn time_budget(&self) -> Option<Duration> {
        self.time_budget_secs.map(Duration::from_secs_f64)
    }

    pub fn swarm_config(&self, bounds: Bounds, seed: u64) -> Result<SwarmConfig> {
        let dim = bounds.dim();
        let mut cfg = SwarmConfig::for_bounds(bounds);
        cfg.population = self.population;
        cfg.max_iterations = self.max_iterations;
        cfg.local_iterations = self.local_iterations;
        cfg.local_iteration_step = self.local_iteration_step;
        cfg.min_local_iterations = self.min_local_iterations;
        cfg.buffer_len = self.buffer_len;
        cfg.neighborhood_fraction = self.neighborhood_fraction;
        cfg.close_count = self.close_count.unwrap_or(self.population.div_ceil(4));
        if let Some(v) = self.initial_radius {
            cfg.initial_radius = v;
            cfg.radius_step = 0.1 * v;
        }
        if let Some(v) = self.radius_step {
            cfg.radius_step = v;
        }
        if let Some(v) = self.min_radius {
            cfg.min_radius = v;
        }
        if let Some(v) = self.max_radius {
            cfg.max_radius = v;
        }
        if let Some(v) = self.founder_radius {
            cfg.founder_radius = v;
        }
        cfg.stop = StopCriteria {
            convergence_epsilon: self.convergence_epsilon,
            time_budget: self.time_budget(),
            iteration_cap: true,
            max_evaluations: Some(self.max_evaluations.unwrap_or(10_000 * dim as u64)),
        };
        cfg.seed = seed;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn discrete_config(&self, seed: u64) -> Result<DiscreteConfig> {
        let cfg = DiscreteConfig {
            population: self.population,
            max_iterations: self.max_iterations,
            local_iterations: self.local_iterations,
            local_iteration_step: self.local_iteration_step,
            min_local_iterations: self.min_local_iterations,
            max_evaluations: Some(
                self.max_evaluations
                    .unwrap_or(DiscreteConfig::default().max_evaluations.unwrap_or(50_000)),
            ),
            time_budget: self.time_budget(),
            accept_sideways: self.accept_sideways,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn pv_params(&self) -> Result<PvParams> {
        PvParams::new(self.v_m, self.i_m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub target: Target,
    pub settings: Settings,
    pub runs: usize,
    /// Run `i` uses seed `seed + i`; benchmark instances are generated from
    /// `seed` itself.
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Whitespace-separated shift vector; the first `D` values are used.
    pub shift_file: Option<PathBuf>,
    /// Whitespace-separated row-major rotation; the first `D²` values are used.
    pub rotation_file: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            target: Target::Benchmark {
                function: FunctionId::F1,
                dim: 2,
            },
            settings: Settings::default(),
            runs: 30,
            seed: 0,
            out_dir: PathBuf::from("results"),
            shift_file: None,
            rotation_file: None,
        }
    }
}

impl ExperimentSpec {
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }

    /// Checks every constraint that can be checked without reading data
    /// files. Errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        self.settings.pv_params()?;
        if let Some(t) = self.settings.time_budget_secs {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config("time_budget_secs", "must be positive"));
            }
        }
        match &self.target {
            Target::Benchmark { function, dim } => {
                if *dim < 2 {
                    return Err(Error::config("dim", "must be at least 2"));
                }
                let (lo, hi) = function.init_range();
                self.settings
                    .swarm_config(Bounds::uniform(lo, hi, *dim)?, self.seed)
                    .map(|_| ())
            }
            Target::Solar { .. } => self.settings.discrete_config(self.seed).map(|_| ()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("mode", self.target.mode().to_string());
        match &self.target {
            Target::Benchmark { function, dim } => {
                kv("function", function.to_string());
                kv("dim", dim.to_string());
            }
            Target::Solar {
                irradiance,
                arrangement,
            } => {
                if let Some(p) = irradiance {
                    kv("irradiance", p.display().to_string());
                }
                if let Some(p) = arrangement {
                    kv("arrangement", p.display().to_string());
                }
            }
        }
        kv("runs", self.runs.to_string());
        kv("seed", self.seed.to_string());
        kv("out_dir", self.out_dir.display().to_string());
        if let Some(p) = &self.shift_file {
            kv("shift_file", p.display().to_string());
        }
        if let Some(p) = &self.rotation_file {
            kv("rotation_file", p.display().to_string());
        }
        let s = &self.settings;
        kv("NG", s.population.to_string());
        kv("IG", s.max_iterations.to_string());
        kv("IL", s.local_iterations.to_string());
        kv("S_IL", s.local_iteration_step.to_string());
        kv("L_IL", s.min_local_iterations.to_string());
        kv("B", s.buffer_len.to_string());
        kv("F", s.neighborhood_fraction.to_string());
        let optional = [
            ("NC", s.close_count.map(|v| v.to_string())),
            ("N_init", s.initial_radius.map(|v| v.to_string())),
            ("S_N", s.radius_step.map(|v| v.to_string())),
            ("L_N", s.min_radius.map(|v| v.to_string())),
            ("U_N", s.max_radius.map(|v| v.to_string())),
            ("N_GB", s.founder_radius.map(|v| v.to_string())),
            ("max_evaluations", s.max_evaluations.map(|v| v.to_string())),
            (
                "convergence_epsilon",
                s.convergence_epsilon.map(|v| v.to_string()),
            ),
            (
                "time_budget_secs",
                s.time_budget_secs.map(|v| v.to_string()),
            ),
        ];
        for (k, v) in optional {
            if let Some(v) = v {
                kv(k, v);
            }
        }
        kv("accept_sideways", s.accept_sideways.to_string());
        kv("V_m", s.v_m.to_string());
        kv("I_m", s.i_m.to_string());
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

const KEYS: &[&str] = &[
    "mode",
    "function",
    "dim",
    "irradiance",
    "arrangement",
    "runs",
    "seed",
    "out_dir",
    "shift_file",
    "rotation_file",
    "NG",
    "IG",
    "IL",
    "S_IL",
    "L_IL",
    "B",
    "F",
    "NC",
    "N_init",
    "S_N",
    "L_N",
    "U_N",
    "N_GB",
    "max_evaluations",
    "convergence_epsilon",
    "time_budget_secs",
    "accept_sideways",
    "V_m",
    "I_m",
];

struct Entries<'a> {
    path: &'a Path,
    values: HashMap<String, (usize, String)>,
}

impl Entries<'_> {
    fn err(&self, key: &str, message: String) -> Error {
        let line = self.values.get(key).map_or(0, |(l, _)| *l);
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            message: format!("`{key}`: {message}"),
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some((_, raw)) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| self.err(key, format!("cannot parse `{raw}`: {e}"))),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.values.get(key).map(|(_, v)| PathBuf::from(v))
    }
}

/// Parses an experiment file. Missing keys take their defaults; unknown
/// keys, malformed values and violated constraints are reported with the
/// key and its line.
pub fn parse_config(text: &str, path: &Path) -> Result<ExperimentSpec> {
    let mut values = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(parse_err(format!("unknown key `{key}`")));
        }
        if values
            .insert(key.to_string(), (line, value.to_string()))
            .is_some()
        {
            return Err(parse_err(format!("`{key}` given twice")));
        }
    }
    let e = Entries { path, values };

    let mode: String = e.get("mode")?.unwrap_or_else(|| "benchmark".into());
    let target = match mode.as_str() {
        "benchmark" => {
            for key in ["irradiance", "arrangement"] {
                if e.values.contains_key(key) {
                    return Err(e.err(key, "only valid in solar mode".into()));
                }
            }
            Target::Benchmark {
                function: match e.values.get("function") {
                    Some((_, raw)) => raw
                        .parse()
                        .map_err(|err: Error| e.err("function", err.to_string()))?,
                    None => FunctionId::F1,
                },
                dim: e.get("dim")?.unwrap_or(2),
            }
        }
        "solar" => {
            for key in ["function", "dim", "shift_file", "rotation_file"] {
                if e.values.contains_key(key) {
                    return Err(e.err(key, "only valid in benchmark mode".into()));
                }
            }
            Target::Solar {
                irradiance: e.path("irradiance"),
                arrangement: e.path("arrangement"),
            }
        }
        other => {
            return Err(e.err(
                "mode",
                format!("expected `benchmark` or `solar`, found `{other}`"),
            ))
        }
    };

    let d = Settings::default();
    let settings = Settings {
        population: e.get("NG")?.unwrap_or(d.population),
        max_iterations: e.get("IG")?.unwrap_or(d.max_iterations),
        local_iterations: e.get("IL")?.unwrap_or(d.local_iterations),
        local_iteration_step: e.get("S_IL")?.unwrap_or(d.local_iteration_step),
        min_local_iterations: e.get("L_IL")?.unwrap_or(d.min_local_iterations),
        buffer_len: e.get("B")?.unwrap_or(d.buffer_len),
        neighborhood_fraction: e.get("F")?.unwrap_or(d.neighborhood_fraction),
        close_count: e.get("NC")?,
        initial_radius: e.get("N_init")?,
        radius_step: e.get("S_N")?,
        min_radius: e.get("L_N")?,
        max_radius: e.get("U_N")?,
        founder_radius: e.get("N_GB")?,
        max_evaluations: e.get("max_evaluations")?,
        convergence_epsilon: e.get("convergence_epsilon")?,
        time_budget_secs: e.get("time_budget_secs")?,
        accept_sideways: e.get("accept_sideways")?.unwrap_or(d.accept_sideways),
        v_m: e.get("V_m")?.unwrap_or(d.v_m),
        i_m: e.get("I_m")?.unwrap_or(d.i_m),
    };
    let spec = ExperimentSpec {
        target,
        settings,
        runs: e.get("runs")?.unwrap_or(30),
        seed: e.get("seed")?.unwrap_or(0),
        out_dir: e
            .path("out_dir")
            .unwrap_or_else(|| PathBuf::from("results")),
        shift_file: e.path("shift_file"),
        rotation_file: e.path("rotation_file"),
    };
    spec.validate().map_err(|err| match err {
        Error::InvalidConfig { key, reason } => e.err(&key, reason),
        other => other,
    })?;
    Ok(spec)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}
