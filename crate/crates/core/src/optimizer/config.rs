use std::time::Duration;

use crate::error::{Error, Result};
use crate::geometry::Bounds;

/// Which stop criteria are active. A criterion left at `None`/`false` never
/// fires.
#[derive(Debug, Clone, PartialEq)]
pub struct StopCriteria {
    /// Stop when consecutive global bests differ by less than this.
    pub convergence_epsilon: Option<f64>,
    pub time_budget: Option<Duration>,
    /// Stop once the global iteration index reaches `SwarmConfig::max_iterations`.
    pub iteration_cap: bool,
    pub max_evaluations: Option<u64>,
}

impl StopCriteria {
    /// Only the evaluation cap, at `10_000 · dim` evaluations.
    pub fn evaluation_budget(dim: usize) -> Self {
        Self {
            convergence_epsilon: None,
            time_budget: None,
            iteration_cap: false,
            max_evaluations: Some(10_000 * dim as u64),
        }
    }
}

/// Default convergence threshold when the criterion is switched on.
pub const DEFAULT_CONVERGENCE_EPSILON: f64 = 1e-8;

/// Hyperparameters of one continuous run.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    /// Number of particles (NG).
    pub population: usize,
    /// Global iteration cap (IG).
    pub max_iterations: u64,
    /// Local iterations in the first global iteration (IL).
    pub local_iterations: usize,
    /// Decrement of IL per global iteration (S_IL).
    pub local_iteration_step: usize,
    /// Floor of IL (L_IL).
    pub min_local_iterations: usize,
    /// Neighborhood radius used for collision checks and the first local phase.
    pub initial_radius: f64,
    /// Radius change on a status transition (S_N).
    pub radius_step: f64,
    /// L_N
    pub min_radius: f64,
    /// U_N
    pub max_radius: f64,
    /// Length of the stagnation window (B).
    pub buffer_len: usize,
    /// Fraction of the distance to the global best used as radius (F).
    pub neighborhood_fraction: f64,
    /// Radius of the particle sitting on the global best (N_GB).
    pub founder_radius: f64,
    /// Number of particles nearest the global best that drift toward it (NC).
    pub close_count: usize,
    pub bounds: Bounds,
    pub stop: StopCriteria,
    pub seed: u64,
}

impl SwarmConfig {
    /// Shipped defaults scaled to the mean bound width of `bounds`.
    pub fn for_bounds(bounds: Bounds) -> Self {
        let range = bounds.mean_width();
        let dim = bounds.dim();
        let population = 40;
        let initial_radius = 0.05 * range;
        Self {
            population,
            max_iterations: 1_000_000,
            local_iterations: 50,
            local_iteration_step: 5,
            min_local_iterations: 10,
            initial_radius,
            radius_step: 0.1 * initial_radius,
            min_radius: 1e-6 * range,
            max_radius: 0.5 * range,
            buffer_len: 5,
            neighborhood_fraction: 0.1,
            founder_radius: 0.01 * range,
            close_count: population.div_ceil(4),
            bounds,
            stop: StopCriteria::evaluation_budget(dim),
            seed: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() < 2 {
            return Err(Error::config(
                "dim",
                "the swarm needs at least 2 dimensions",
            ));
        }
        positive_int("NG", self.population)?;
        positive_int("IG", self.max_iterations as usize)?;
        positive_int("IL", self.local_iterations)?;
        positive_int("S_IL", self.local_iteration_step)?;
        positive_int("L_IL", self.min_local_iterations)?;
        positive_int("B", self.buffer_len)?;
        positive_real("N_init", self.initial_radius)?;
        positive_real("S_N", self.radius_step)?;
        positive_real("L_N", self.min_radius)?;
        positive_real("U_N", self.max_radius)?;
        positive_real("N_GB", self.founder_radius)?;
        if self.min_local_iterations > self.local_iterations {
            return Err(Error::config("L_IL", "must not exceed IL"));
        }
        if !(self.neighborhood_fraction > 0.0 && self.neighborhood_fraction <= 1.0) {
            return Err(Error::config("F", "must lie in (0, 1]"));
        }
        if !(self.min_radius <= self.initial_radius && self.initial_radius <= self.max_radius) {
            return Err(Error::config("N_init", "must satisfy L_N <= N_init <= U_N"));
        }
        if !(self.min_radius <= self.founder_radius && self.founder_radius <= self.max_radius) {
            return Err(Error::config("N_GB", "must satisfy L_N <= N_GB <= U_N"));
        }
        if self.close_count > self.population {
            return Err(Error::config("NC", "must not exceed NG"));
        }
        if let Some(eps) = self.stop.convergence_epsilon {
            positive_real("convergence_epsilon", eps)?;
        }
        if self.stop.max_evaluations == Some(0) {
            return Err(Error::config("max_evaluations", "must be positive"));
        }
        if !self.stop.iteration_cap
            && self.stop.max_evaluations.is_none()
            && self.stop.time_budget.is_none()
        {
            return Err(Error::config(
                "stop",
                "enable at least one of the iteration, evaluation or time caps",
            ));
        }
        Ok(())
    }
}

fn positive_int(key: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::config(key, "must be a positive integer"))
    } else {
        Ok(())
    }
}

fn positive_real(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!("must be a positive real, got {v}"),
        ))
    }
}
