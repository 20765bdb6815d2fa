use std::collections::VecDeque;

use log::warn;
use rand::Rng;

use super::config::SwarmConfig;
use crate::geometry::{
    clamp_in_place, compose_wave, direction_angles, distance_unchecked, random_angles,
    sample_in_ball, Bounds,
};

/// Objective wrapper that counts evaluations and maps NaN to `+∞`.
pub struct Evaluator<F> {
    f: F,
    count: u64,
    nan_seen: bool,
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<F> {
    pub fn new(f: F) -> Self {
        Self {
            f,
            count: 0,
            nan_seen: false,
        }
    }

    pub fn evaluate(&mut self, x: &[f64]) -> f64 {
        self.count += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            if !self.nan_seen {
                warn!("objective returned NaN at {x:?}; treating it as +inf");
                self.nan_seen = true;
            }
            f64::INFINITY
        } else {
            v
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// A position together with its fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub position: Vec<f64>,
    pub fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    NoChange,
    Increase,
    Decrease,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub radius: f64,
    pub status: Status,
    /// Most recent local-search outcomes, oldest first; `true` means the
    /// local best improved.
    pub buffer: VecDeque<bool>,
    /// Best point seen in the current local phase.
    pub local_best: Option<Solution>,
}

impl Particle {
    pub fn new(position: Vec<f64>, radius: f64) -> Self {
        Self {
            position,
            radius,
            status: Status::NoChange,
            buffer: VecDeque::new(),
            local_best: None,
        }
    }

    /// Reset bookkeeping at the start of a particle's local phase.
    pub fn begin_local_phase(&mut self) {
        self.status = Status::NoChange;
        self.buffer.clear();
        self.local_best = None;
    }

    fn record(&mut self, improved: bool, capacity: usize) {
        if self.buffer.len() == capacity {
            self.buffer.pop_front();
        }
        self.buffer.push_back(improved);
    }
}

/// Sea-wave update with a random strength factor `U(0,1)`.
pub fn apply_wave<R: Rng + ?Sized>(
    particle: &Particle,
    global_best: &[f64],
    is_close: bool,
    rng: &mut R,
    bounds: &Bounds,
) -> Vec<f64> {
    let strength = rng.random::<f64>();
    apply_wave_with_strength(particle, global_best, is_close, strength, rng, bounds)
}

/// Sea-wave update with an explicit strength factor in `[0, 1]`.
///
/// The wave length is `strength · ‖GB − x‖`. Close particles are pushed
/// along `GB − x`, all others in a random direction.
pub fn apply_wave_with_strength<R: Rng + ?Sized>(
    particle: &Particle,
    global_best: &[f64],
    is_close: bool,
    strength: f64,
    rng: &mut R,
    bounds: &Bounds,
) -> Vec<f64> {
    let dist = distance_unchecked(global_best, &particle.position);
    if dist == 0.0 {
        return particle.position.clone();
    }
    let angles = if is_close {
        let toward: Vec<f64> = global_best
            .iter()
            .zip(&particle.position)
            .map(|(g, x)| g - x)
            .collect();
        direction_angles(&toward).expect("non-zero vector has a direction")
    } else {
        random_angles(particle.position.len(), rng).expect("dimension checked at configuration")
    };
    let wave = compose_wave(strength * dist, &angles).expect("angle count is D - 1");
    let mut next: Vec<f64> = particle
        .position
        .iter()
        .zip(&wave)
        .map(|(x, w)| x + w)
        .collect();
    clamp_in_place(&mut next, bounds);
    next
}

/// Radius for the start of a local phase: `N_GB` for the founder, otherwise
/// `F · ‖GB − x‖` clamped into `[L_N, U_N]`.
pub fn init_neighborhood(
    particle: &Particle,
    global_best: &[f64],
    cfg: &SwarmConfig,
    is_founder: bool,
) -> f64 {
    if is_founder {
        return cfg.founder_radius;
    }
    let dist = distance_unchecked(global_best, &particle.position);
    (cfg.neighborhood_fraction * dist).clamp(cfg.min_radius, cfg.max_radius)
}

/// One foraging probe: sample the neighborhood ball, evaluate, and move
/// there when it beats the local best. Returns whether it improved.
pub fn local_search_step<F, R>(
    particle: &mut Particle,
    objective: &mut Evaluator<F>,
    rng: &mut R,
    bounds: &Bounds,
    buffer_len: usize,
) -> bool
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let mut candidate = sample_in_ball(&particle.position, particle.radius, rng);
    clamp_in_place(&mut candidate, bounds);
    let fitness = objective.evaluate(&candidate);
    let improved = particle
        .local_best
        .as_ref()
        .is_none_or(|lb| fitness < lb.fitness);
    if improved {
        particle.position.clone_from(&candidate);
        particle.local_best = Some(Solution {
            position: candidate,
            fitness,
        });
    }
    particle.record(improved, buffer_len);
    improved
}

/// Stagnation-driven radius adaptation after local iteration `j` (1-based).
///
/// Once the buffer holds `B` outcomes without a single improvement the status
/// flips (NoChange/Decrease → Increase, Increase → Decrease), the radius moves
/// by `S_N` within `[L_N, U_N]`, and the buffer starts a fresh window.
pub fn adapt_neighborhood(particle: &mut Particle, cfg: &SwarmConfig, j: usize) {
    let window = cfg.buffer_len;
    if j < window || particle.buffer.len() < window {
        return;
    }
    if particle.buffer.iter().any(|&improved| improved) {
        return;
    }
    match particle.status {
        Status::NoChange | Status::Decrease => {
            particle.status = Status::Increase;
            particle.radius = (particle.radius + cfg.radius_step).min(cfg.max_radius);
        }
        Status::Increase => {
            particle.status = Status::Decrease;
            particle.radius = (particle.radius - cfg.radius_step).max(cfg.min_radius);
        }
    }
    particle.buffer.clear();
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg2() -> SwarmConfig {
        let mut c = SwarmConfig::for_bounds(Bounds::symmetric(100.0, 2).unwrap());
        c.min_radius = 0.01;
        c.max_radius = 10.0;
        c.radius_step = 1.0;
        c.neighborhood_fraction = 0.1;
        c.buffer_len = 3;
        c
    }

    #[test]
    fn nan_becomes_infinity() {
        let mut e = Evaluator::new(|_: &[f64]| f64::NAN);
        assert_eq!(e.evaluate(&[0.0]), f64::INFINITY);
        assert_eq!(e.evaluate(&[0.0]), f64::INFINITY);
        assert_eq!(e.count(), 2);
    }

    #[test]
    fn wave_at_global_best_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = Bounds::symmetric(100.0, 2).unwrap();
        let p = Particle::new(vec![3.0, 4.0], 1.0);
        assert_eq!(
            apply_wave(&p, &[3.0, 4.0], false, &mut rng, &b),
            vec![3.0, 4.0]
        );
        assert_eq!(
            apply_wave(&p, &[3.0, 4.0], true, &mut rng, &b),
            vec![3.0, 4.0]
        );
    }

    #[test]
    fn full_strength_close_wave_lands_on_gb() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = Bounds::symmetric(100.0, 2).unwrap();
        let p = Particle::new(vec![0.0, 0.0], 1.0);
        let next = apply_wave_with_strength(&p, &[10.0, 0.0], true, 1.0, &mut rng, &b);
        assert!((next[0] - 10.0).abs() < 1e-12 && next[1].abs() < 1e-12);
    }

    #[test]
    fn wave_distance_bounds() {
        // Toward-GB displacement of length m <= d lands at distance d - m;
        // a random direction of length m <= d lands within 2d.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let b = Bounds::symmetric(100.0, 3).unwrap();
        for _ in 0..1000 {
            let gb = b.sample(&mut rng);
            let p = Particle::new(b.sample(&mut rng), 1.0);
            let before = distance_unchecked(&gb, &p.position);
            let far = apply_wave(&p, &gb, false, &mut rng, &b);
            let after_far = distance_unchecked(&gb, &far);
            assert!(after_far <= 2.0 * before + 1e-9);
            let strength = rng.random::<f64>();
            let near = apply_wave_with_strength(&p, &gb, true, strength, &mut rng, &b);
            let after_near = distance_unchecked(&gb, &near);
            assert!(after_near <= before + 1e-9);
            assert!((after_near - (1.0 - strength) * before).abs() <= 1e-9 * before.max(1.0));
        }
    }

    #[test]
    fn neighborhood_initialisation() {
        let c = cfg2();
        let p = Particle::new(vec![50.0, 0.0], 1.0);
        assert_eq!(
            init_neighborhood(&p, &[0.0, 0.0], &c, true),
            c.founder_radius
        );
        assert_eq!(init_neighborhood(&p, &[0.0, 0.0], &c, false), 5.0);
        let q = Particle::new(vec![0.001, 0.0], 1.0);
        assert_eq!(init_neighborhood(&q, &[0.0, 0.0], &c, false), 0.01);
    }

    #[test]
    fn zero_radius_search_only_improves_first_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = Bounds::symmetric(100.0, 2).unwrap();
        let mut eval = Evaluator::new(|x: &[f64]| x[0] * x[0] + x[1] * x[1]);
        let mut p = Particle::new(vec![3.0, 4.0], 0.0);
        assert!(local_search_step(&mut p, &mut eval, &mut rng, &b, 3));
        for _ in 0..5 {
            assert!(!local_search_step(&mut p, &mut eval, &mut rng, &b, 3));
        }
        assert_eq!(p.position, vec![3.0, 4.0]);
        assert_eq!(eval.count(), 6);
        assert_eq!(p.buffer.len(), 3);
    }

    #[test]
    fn search_candidate_is_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = Bounds::symmetric(1.0, 2).unwrap();
        let mut seen = Vec::new();
        let mut eval = Evaluator::new(|x: &[f64]| {
            seen.push(x.to_vec());
            0.0
        });
        let mut p = Particle::new(vec![1.0, 1.0], 5.0);
        for _ in 0..50 {
            local_search_step(&mut p, &mut eval, &mut rng, &b, 5);
        }
        assert!(seen.iter().all(|x| b.contains(x)));
    }

    #[test]
    fn hill_climb_on_bowl() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Bounds::symmetric(100.0, 2).unwrap();
        let mut eval = Evaluator::new(|x: &[f64]| x[0] * x[0]);
        let mut p = Particle::new(vec![10.0, 0.0], 5.0);
        for _ in 0..200 {
            local_search_step(&mut p, &mut eval, &mut rng, &b, 5);
        }
        assert!(p.local_best.unwrap().fitness < 100.0);
    }

    #[test]
    fn adaptation_schedule() {
        let c = cfg2();
        let mut p = Particle::new(vec![0.0, 0.0], 2.0);
        p.buffer.extend([false, false]);
        adapt_neighborhood(&mut p, &c, 2);
        assert_eq!((p.status, p.radius), (Status::NoChange, 2.0));

        p.buffer.push_back(false);
        adapt_neighborhood(&mut p, &c, 3);
        assert_eq!((p.status, p.radius), (Status::Increase, 3.0));
        assert!(p.buffer.is_empty());

        p.buffer.extend([false, true, false]);
        adapt_neighborhood(&mut p, &c, 6);
        assert_eq!((p.status, p.radius), (Status::Increase, 3.0));

        p.radius = c.min_radius + c.radius_step / 2.0;
        p.buffer = [false; 3].into();
        adapt_neighborhood(&mut p, &c, 9);
        assert_eq!((p.status, p.radius), (Status::Decrease, c.min_radius));

        p.radius = 9.5;
        p.buffer = [false; 3].into();
        adapt_neighborhood(&mut p, &c, 12);
        assert_eq!((p.status, p.radius), (Status::Increase, c.max_radius));
    }

    proptest! {
        #[test]
        fn radius_stays_in_range(outcomes in prop::collection::vec(any::<bool>(), 1..200)) {
            let c = cfg2();
            let mut p = Particle::new(vec![0.0, 0.0], 5.0);
            for (j, ok) in outcomes.into_iter().enumerate() {
                p.record(ok, c.buffer_len);
                adapt_neighborhood(&mut p, &c, j + 1);
                prop_assert!(p.buffer.len() <= c.buffer_len);
                prop_assert!(c.min_radius <= p.radius && p.radius <= c.max_radius);
            }
        }
    }
}
