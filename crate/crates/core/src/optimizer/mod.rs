//! Continuous swarm optimizer.
//!
//! Each global iteration moves every particle once (sea wave, or a jump to
//! the global best for the particle that found it), then lets it forage
//! for `IL` local iterations in an adaptive neighborhood ball. The local best
//! of each particle is merged into the global best before the next particle
//! moves, so particle order matters and a run is strictly sequential.
//!
//! Cost per global iteration is `O(NG · (IL + log NG) · D)` plus the
//! objective evaluations; memory is `O(NG · (D + B))`.

mod config;
mod particle;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{StopCriteria, SwarmConfig, DEFAULT_CONVERGENCE_EPSILON};
pub use particle::{
    adapt_neighborhood, apply_wave, apply_wave_with_strength, init_neighborhood, local_search_step,
    Evaluator, Particle, Solution, Status,
};

use crate::error::Result;
use crate::geometry::distance_unchecked;
use log::warn;

/// Redraws allowed per particle before a collision is accepted.
pub const COLLISION_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Converged,
    Timeout,
    IterationCap,
    EvaluationCap,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::Timeout => "timeout",
            Termination::IterationCap => "iteration-cap",
            Termination::EvaluationCap => "evaluation-cap",
        }
    }
}

/// Snapshot emitted after every global iteration (iteration 0 is the
/// initial population).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: u64,
    pub evaluations: u64,
    pub best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Solution,
    pub trace: Vec<TracePoint>,
    pub termination: Termination,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub global_best: Solution,
    /// Index of the particle that found the current global best.
    pub founder: usize,
    pub evaluations: u64,
    pub iteration: u64,
    /// Current number of local iterations (IL).
    pub local_iterations: usize,
    /// Global best fitness at the end of the previous global iteration.
    pub previous_best: Option<f64>,
}

/// Uniform placement with collision redraws, one evaluation per particle.
pub fn initialize_swarm<F, R>(
    cfg: &SwarmConfig,
    objective: &mut Evaluator<F>,
    rng: &mut R,
) -> SwarmState
where
    F: FnMut(&[f64]) -> f64,
    R: rand::Rng + ?Sized,
{
    let mut particles: Vec<Particle> = Vec::with_capacity(cfg.population);
    let mut best: Option<(usize, Solution)> = None;
    for i in 0..cfg.population {
        let mut position = cfg.bounds.sample(rng);
        let mut attempts = 0;
        while particles
            .iter()
            .any(|p| distance_unchecked(&p.position, &position) < cfg.initial_radius)
        {
            attempts += 1;
            if attempts > COLLISION_RETRIES {
                warn!("particle {i}: no collision-free spot after {COLLISION_RETRIES} redraws");
                break;
            }
            position = cfg.bounds.sample(rng);
        }
        let fitness = objective.evaluate(&position);
        if best.as_ref().is_none_or(|(_, b)| fitness < b.fitness) {
            best = Some((
                i,
                Solution {
                    position: position.clone(),
                    fitness,
                },
            ));
        }
        particles.push(Particle::new(position, cfg.initial_radius));
    }
    let (founder, global_best) = best.expect("population is positive");
    SwarmState {
        particles,
        global_best,
        founder,
        evaluations: objective.count(),
        iteration: 0,
        local_iterations: cfg.local_iterations,
        previous_best: None,
    }
}

/// Indices of the `close_count` particles nearest the global best, nearest
/// first, ties broken by index.
pub fn classify_proximity(state: &SwarmState, close_count: usize) -> Vec<usize> {
    let gb = &state.global_best.position;
    let mut ranked: Vec<(f64, usize)> = state
        .particles
        .iter()
        .enumerate()
        .map(|(i, p)| (distance_unchecked(gb, &p.position), i))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ranked
        .into_iter()
        .take(close_count)
        .map(|(_, i)| i)
        .collect()
}

pub fn decrement_local_iterations(il: usize, cfg: &SwarmConfig) -> usize {
    il.saturating_sub(cfg.local_iteration_step)
        .max(cfg.min_local_iterations)
}

pub fn check_stop(state: &SwarmState, cfg: &SwarmConfig, elapsed: Duration) -> Option<Termination> {
    let stop = &cfg.stop;
    if let (Some(eps), Some(prev)) = (stop.convergence_epsilon, state.previous_best) {
        if (state.global_best.fitness - prev).abs() < eps {
            return Some(Termination::Converged);
        }
    }
    if stop.time_budget.is_some_and(|t| elapsed >= t) {
        return Some(Termination::Timeout);
    }
    if stop.iteration_cap && state.iteration >= cfg.max_iterations {
        return Some(Termination::IterationCap);
    }
    if stop.max_evaluations.is_some_and(|m| state.evaluations >= m) {
        return Some(Termination::EvaluationCap);
    }
    None
}

/// Step-wise driver of one run. [`run`] is the usual entry point; this type
/// exposes the state between global iterations.
pub struct Swarm<F> {
    cfg: SwarmConfig,
    objective: Evaluator<F>,
    rng: ChaCha8Rng,
    state: SwarmState,
    trace: Vec<TracePoint>,
    started: Instant,
    done: Option<Termination>,
}

impl<F: FnMut(&[f64]) -> f64> Swarm<F> {
    pub fn new(cfg: SwarmConfig, objective: F) -> Result<Self> {
        cfg.validate()?;
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut objective = Evaluator::new(objective);
        let state = initialize_swarm(&cfg, &mut objective, &mut rng);
        let trace = vec![TracePoint {
            iteration: 0,
            evaluations: state.evaluations,
            best_fitness: state.global_best.fitness,
        }];
        Ok(Self {
            cfg,
            objective,
            rng,
            state,
            trace,
            started,
            done: None,
        })
    }

    pub fn state(&self) -> &SwarmState {
        &self.state
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    pub fn config(&self) -> &SwarmConfig {
        &self.cfg
    }

    pub fn termination(&self) -> Option<Termination> {
        self.done
    }

    fn budget_left(&self) -> bool {
        self.cfg
            .stop
            .max_evaluations
            .is_none_or(|m| self.objective.count() < m)
    }

    fn close_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.state.particles.len()];
        for i in classify_proximity(&self.state, self.cfg.close_count) {
            mask[i] = true;
        }
        mask
    }

    /// Run one global iteration. Returns the termination reason once a stop
    /// criterion fires; further calls are no-ops.
    pub fn step(&mut self) -> Option<Termination> {
        if self.done.is_some() {
            return self.done;
        }
        self.state.iteration += 1;
        let first = self.state.iteration == 1;
        let mut close = if first { Vec::new() } else { self.close_mask() };
        let il = self.state.local_iterations;

        for i in 0..self.state.particles.len() {
            if !self.budget_left() {
                break;
            }
            let founder = i == self.state.founder;
            if !first {
                let gb = &self.state.global_best.position;
                let particle = &self.state.particles[i];
                let position = if founder {
                    gb.clone()
                } else {
                    apply_wave(particle, gb, close[i], &mut self.rng, &self.cfg.bounds)
                };
                let particle = &mut self.state.particles[i];
                particle.position = position;
                particle.radius = init_neighborhood(particle, gb, &self.cfg, founder);
            }

            let particle = &mut self.state.particles[i];
            particle.begin_local_phase();
            for j in 1..=il {
                if self
                    .cfg
                    .stop
                    .max_evaluations
                    .is_some_and(|m| self.objective.count() >= m)
                {
                    break;
                }
                local_search_step(
                    particle,
                    &mut self.objective,
                    &mut self.rng,
                    &self.cfg.bounds,
                    self.cfg.buffer_len,
                );
                adapt_neighborhood(particle, &self.cfg, j);
            }

            if let Some(lb) = particle.local_best.clone() {
                if lb.fitness < self.state.global_best.fitness {
                    self.state.global_best = lb;
                    self.state.founder = i;
                    if !first {
                        close = self.close_mask();
                    }
                }
            }
        }

        self.state.local_iterations = decrement_local_iterations(il, &self.cfg);
        self.state.evaluations = self.objective.count();
        self.trace.push(TracePoint {
            iteration: self.state.iteration,
            evaluations: self.state.evaluations,
            best_fitness: self.state.global_best.fitness,
        });
        self.done = check_stop(&self.state, &self.cfg, self.started.elapsed());
        self.state.previous_best = Some(self.state.global_best.fitness);
        self.done
    }

    pub fn into_result(self) -> RunResult {
        RunResult {
            best: self.state.global_best,
            trace: self.trace,
            termination: self.done.unwrap_or(Termination::IterationCap),
            evaluations: self.objective.count(),
        }
    }
}

/// Run to completion, calling `observer` after every global iteration.
pub fn run<F, O>(cfg: SwarmConfig, objective: F, mut observer: O) -> Result<RunResult>
where
    F: FnMut(&[f64]) -> f64,
    O: FnMut(&TracePoint),
{
    let mut swarm = Swarm::new(cfg, objective)?;
    observer(&swarm.trace[0]);
    loop {
        let done = swarm.step();
        observer(swarm.trace.last().expect("trace is never empty"));
        if done.is_some() {
            return Ok(swarm.into_result());
        }
    }
}

/// [`run`] without an observer.
pub fn optimize<F: FnMut(&[f64]) -> f64>(cfg: SwarmConfig, objective: F) -> Result<RunResult> {
    run(cfg, objective, |_| {})
}
