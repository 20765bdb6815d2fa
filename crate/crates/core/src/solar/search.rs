use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::array::{Arrangement, IrradianceMatrix, PvParams};
use super::power::{arrangement_power_unchecked, max_power, row_currents, PowerCurve};
use crate::error::{Error, Result};
use crate::optimizer::{Termination, TracePoint, COLLISION_RETRIES};

/// Relative margin a power must clear to count as better. Row sums of the
/// same cells in a different order can differ in the last bits.
const IMPROVEMENT_TOLERANCE: f64 = 1e-12;

fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + IMPROVEMENT_TOLERANCE * incumbent.abs().max(1.0)
}

fn ties(candidate: f64, incumbent: f64) -> bool {
    (candidate - incumbent).abs() <= IMPROVEMENT_TOLERANCE * incumbent.abs().max(1.0)
}

/// Settings of the discrete swarm. Neighbourhood radii have no meaning here.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteConfig {
    /// NG
    pub population: usize,
    /// IG
    pub max_iterations: u64,
    /// IL in the first global iteration.
    pub local_iterations: usize,
    /// S_IL
    pub local_iteration_step: usize,
    /// L_IL
    pub min_local_iterations: usize,
    pub max_evaluations: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Let the local search move to swaps of equal power, so it can walk
    /// across the plateaus of the max-power landscape.
    pub accept_sideways: bool,
    pub seed: u64,
}

impl Default for DiscreteConfig {
    fn default() -> Self {
        Self {
            population: 40,
            max_iterations: 1_000_000,
            local_iterations: 50,
            local_iteration_step: 5,
            min_local_iterations: 10,
            max_evaluations: Some(50_000),
            time_budget: None,
            accept_sideways: false,
            seed: 0,
        }
    }
}

impl DiscreteConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("NG", self.population),
            ("IL", self.local_iterations),
            ("S_IL", self.local_iteration_step),
            ("L_IL", self.min_local_iterations),
        ] {
            if v == 0 {
                return Err(Error::config(key, "must be at least 1"));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::config("IG", "must be at least 1"));
        }
        if self.min_local_iterations > self.local_iterations {
            return Err(Error::config("L_IL", "must not exceed IL"));
        }
        if self.max_evaluations == Some(0) {
            return Err(Error::config("max_evaluations", "must be at least 1"));
        }
        Ok(())
    }
}

fn mismatches(a: &Arrangement, b: &Arrangement) -> usize {
    a.labels()
        .iter()
        .zip(b.labels())
        .filter(|(x, y)| x != y)
        .count()
}

fn normalized(mismatches: usize, slots: usize) -> f64 {
    (mismatches as f64 / slots as f64).sqrt()
}

/// `‖v‖₂ / √(R·C)` where `v` marks the slots holding different cells.
pub fn arrangement_distance(a: &Arrangement, b: &Arrangement) -> Result<f64> {
    a.same_shape(b)?;
    Ok(normalized(mismatches(a, b), a.labels().len()))
}

/// Swaps slot `row` with the slot `offset` rows away, wrapping the column
/// as a ring.
pub fn swap_with_offset(arr: &mut Arrangement, col: usize, row: usize, offset: i64) {
    let rows = arr.rows() as i64;
    let target = (row as i64 + offset).rem_euclid(rows) as usize;
    arr.swap(col, row, target);
}

/// One wave over every cell. Each column uses the distance to `gb` as it
/// stands when the column is reached; each cell moves with that probability
/// by a rounded offset in `[−round(R·d), round(R·d)]`.
pub fn wave_swap_pass<R: Rng + ?Sized>(
    arr: &mut Arrangement,
    gb: &Arrangement,
    rng: &mut R,
) -> Result<()> {
    arr.same_shape(gb)?;
    let (rows, cols) = (arr.rows(), arr.cols());
    let slots = rows * cols;
    let mut count = mismatches(arr, gb);
    for c in 0..cols {
        let distance = normalized(count, slots);
        if distance == 0.0 {
            return Ok(());
        }
        let magnitude = (rows as f64 * distance).round();
        for r in 0..rows {
            if rng.random::<f64>() < distance {
                let offset = rng.random_range(-magnitude..=magnitude).round() as i64;
                let target = (r as i64 + offset).rem_euclid(rows as i64) as usize;
                let before = usize::from(arr.get(r, c) != gb.get(r, c))
                    + usize::from(arr.get(target, c) != gb.get(target, c));
                arr.swap(c, r, target);
                let after = usize::from(arr.get(r, c) != gb.get(r, c))
                    + usize::from(arr.get(target, c) != gb.get(target, c));
                count = count + after - before;
            }
        }
    }
    Ok(())
}

/// Swaps two distinct random rows of a random column in place and returns
/// `(column, row_a, row_b)`, or `None` when there is only one row.
pub fn random_column_swap<R: Rng + ?Sized>(
    arr: &mut Arrangement,
    rng: &mut R,
) -> Option<(usize, usize, usize)> {
    let rows = arr.rows();
    if rows < 2 {
        return None;
    }
    let c = rng.random_range(0..arr.cols());
    let a = rng.random_range(0..rows);
    let mut b = rng.random_range(0..rows - 1);
    if b >= a {
        b += 1;
    }
    arr.swap(c, a, b);
    Some((c, a, b))
}

/// Candidate one random in-column swap away from `arr`.
pub fn local_search_discrete<R: Rng + ?Sized>(arr: &Arrangement, rng: &mut R) -> Arrangement {
    let mut candidate = arr.clone();
    random_column_swap(&mut candidate, rng);
    candidate
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteResult {
    pub best: Arrangement,
    /// Maximum power of `best`, in watts.
    pub power: f64,
    pub curve: PowerCurve,
    /// Best power after each global iteration; `best_fitness` holds watts.
    pub trace: Vec<TracePoint>,
    pub evaluations: u64,
    pub termination: Termination,
}

struct Scorer<'a> {
    irr: &'a IrradianceMatrix,
    params: &'a PvParams,
    evaluations: u64,
    cap: Option<u64>,
}

impl Scorer<'_> {
    fn exhausted(&self) -> bool {
        self.cap.is_some_and(|cap| self.evaluations >= cap)
    }

    fn power(&mut self, arr: &Arrangement) -> f64 {
        self.evaluations += 1;
        arrangement_power_unchecked(arr, self.irr, self.params)
    }
}

/// Reconfigures `irr` for maximum power with the discrete swarm.
///
/// Particle 0 starts from the TCT wiring, so the result is never worse than
/// the baseline; the rest start from random column shuffles.
pub fn run_discrete_swarm(
    cfg: &DiscreteConfig,
    irr: &IrradianceMatrix,
    params: &PvParams,
) -> Result<DiscreteResult> {
    cfg.validate()?;
    let (rows, cols) = (irr.rows(), irr.cols());
    if rows < 2 {
        return Err(Error::Contract(
            "reconfiguration needs at least two rows".into(),
        ));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut scorer = Scorer {
        irr,
        params,
        evaluations: 0,
        cap: cfg.max_evaluations,
    };

    let mut positions: Vec<Arrangement> = Vec::with_capacity(cfg.population);
    positions.push(Arrangement::identity(rows, cols));
    while positions.len() < cfg.population {
        let mut candidate = Arrangement::random(rows, cols, &mut rng);
        for _ in 0..COLLISION_RETRIES {
            if !positions.contains(&candidate) {
                break;
            }
            candidate = Arrangement::random(rows, cols, &mut rng);
        }
        positions.push(candidate);
    }
    let mut powers: Vec<f64> = positions.iter().map(|p| scorer.power(p)).collect();

    let mut founder = 0;
    for (i, &p) in powers.iter().enumerate() {
        if improves(p, powers[founder]) {
            founder = i;
        }
    }
    let mut gb = positions[founder].clone();
    let mut gb_power = powers[founder];
    let mut trace = vec![TracePoint {
        iteration: 0,
        evaluations: scorer.evaluations,
        best_fitness: gb_power,
    }];

    let mut il = cfg.local_iterations;
    let mut iteration = 0u64;
    let termination = 'outer: loop {
        iteration += 1;
        for i in 0..cfg.population {
            if i == founder {
                positions[i] = gb.clone();
                powers[i] = gb_power;
            } else if iteration > 1 {
                if scorer.exhausted() {
                    break 'outer Termination::EvaluationCap;
                }
                wave_swap_pass(&mut positions[i], &gb, &mut rng)?;
                powers[i] = scorer.power(&positions[i]);
            }
            let pos = &mut positions[i];
            for _ in 0..il {
                if scorer.exhausted() {
                    break;
                }
                let Some((c, a, b)) = random_column_swap(pos, &mut rng) else {
                    break;
                };
                let p = scorer.power(pos);
                if improves(p, powers[i]) || (cfg.accept_sideways && ties(p, powers[i])) {
                    powers[i] = p;
                } else {
                    pos.swap(c, a, b);
                }
            }
            if improves(powers[i], gb_power) {
                gb = positions[i].clone();
                gb_power = powers[i];
                founder = i;
            }
        }
        il = il
            .saturating_sub(cfg.local_iteration_step)
            .max(cfg.min_local_iterations);
        trace.push(TracePoint {
            iteration,
            evaluations: scorer.evaluations,
            best_fitness: gb_power,
        });
        if scorer.exhausted() {
            break Termination::EvaluationCap;
        }
        if cfg.time_budget.is_some_and(|t| start.elapsed() >= t) {
            break Termination::Timeout;
        }
        if iteration >= cfg.max_iterations {
            break Termination::IterationCap;
        }
    };
    if trace.last().is_some_and(|t| t.iteration != iteration) {
        trace.push(TracePoint {
            iteration,
            evaluations: scorer.evaluations,
            best_fitness: gb_power,
        });
    }

    let (power, curve) = max_power(&row_currents(&gb, irr, params)?, params.v_m);
    Ok(DiscreteResult {
        best: gb,
        power,
        curve,
        trace,
        evaluations: scorer.evaluations,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solar::{baseline_tct, brute_force_best};
    use proptest::prelude::*;

    fn unit() -> PvParams {
        PvParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn distance_counts() {
        let a = Arrangement::identity(3, 3);
        assert_eq!(arrangement_distance(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        b.swap(0, 0, 1);
        b.swap(2, 1, 2);
        assert!((arrangement_distance(&a, &b).unwrap() - (4.0f64 / 9.0).sqrt()).abs() < 1e-15);
        // Cyclic shift of every column moves every cell.
        let shifted = Arrangement::from_labels(3, 2, vec![1, 1, 2, 2, 0, 0]).unwrap();
        assert_eq!(
            arrangement_distance(&Arrangement::identity(3, 2), &shifted).unwrap(),
            1.0
        );
        assert!(arrangement_distance(&a, &Arrangement::identity(2, 3)).is_err());
    }

    #[test]
    fn ring_wrap() {
        let mut arr = Arrangement::identity(4, 1);
        swap_with_offset(&mut arr, 0, 0, 4);
        assert_eq!(arr, Arrangement::identity(4, 1));
        swap_with_offset(&mut arr, 0, 0, -1);
        assert_eq!(arr.column(0), vec![3, 1, 2, 0]);
        swap_with_offset(&mut arr, 0, 3, 2);
        assert_eq!(arr.column(0), vec![3, 0, 2, 1]);
    }

    #[test]
    fn wave_is_a_fixed_point_at_gb() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gb = Arrangement::random(9, 9, &mut rng);
        let mut arr = gb.clone();
        wave_swap_pass(&mut arr, &gb, &mut rng).unwrap();
        assert_eq!(arr, gb);
    }

    #[test]
    fn forced_swap_on_two_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let arr = Arrangement::identity(2, 1);
        let cand = local_search_discrete(&arr, &mut rng);
        assert_eq!(cand.column(0), vec![1, 0]);
        let mut single = Arrangement::identity(1, 3);
        assert!(random_column_swap(&mut single, &mut rng).is_none());
    }

    #[test]
    fn candidate_differs_in_two_slots() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let arr = Arrangement::random(5, 4, &mut rng);
        for _ in 0..100 {
            let cand = local_search_discrete(&arr, &mut rng);
            assert_eq!(mismatches(&arr, &cand), 2);
        }
    }

    #[test]
    fn uniform_irradiance_is_flat() {
        let irr = IrradianceMatrix::uniform(4, 3, 0.5).unwrap();
        let cfg = DiscreteConfig {
            max_evaluations: Some(500),
            ..DiscreteConfig::default()
        };
        let res = run_discrete_swarm(&cfg, &irr, &unit()).unwrap();
        assert!((res.power - 4.0 * 1.5).abs() < 1e-12);
    }

    #[test]
    fn never_below_tct_and_respects_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for seed in 0..5 {
            let irr = IrradianceMatrix::random(4, 4, &mut rng).unwrap();
            let cfg = DiscreteConfig {
                population: 10,
                max_evaluations: Some(777),
                seed,
                ..DiscreteConfig::default()
            };
            let res = run_discrete_swarm(&cfg, &irr, &unit()).unwrap();
            assert!(res.power >= baseline_tct(&irr, &unit()).0);
            assert_eq!(res.evaluations, 777);
            assert_eq!(res.termination, Termination::EvaluationCap);
            res.best.validate().unwrap();
            for w in res.trace.windows(2) {
                assert!(w[1].best_fitness >= w[0].best_fitness);
            }
        }
    }

    #[test]
    fn small_instance_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let irr = IrradianceMatrix::random(3, 3, &mut rng).unwrap();
        let (oracle, _) = brute_force_best(&irr, &unit()).unwrap();
        let cfg = DiscreteConfig {
            max_evaluations: Some(5_000),
            ..DiscreteConfig::default()
        };
        let res = run_discrete_swarm(&cfg, &irr, &unit()).unwrap();
        assert!((res.power - oracle).abs() <= 1e-9 * oracle);
    }

    #[test]
    fn deterministic() {
        let irr = IrradianceMatrix::short_wide_shadow();
        let cfg = DiscreteConfig {
            max_evaluations: Some(3_000),
            seed: 5,
            ..DiscreteConfig::default()
        };
        let a = run_discrete_swarm(&cfg, &irr, &PvParams::default()).unwrap();
        let b = run_discrete_swarm(&cfg, &irr, &PvParams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_config() {
        let irr = IrradianceMatrix::uniform(3, 3, 0.5).unwrap();
        let cfg = DiscreteConfig {
            population: 0,
            ..DiscreteConfig::default()
        };
        assert!(matches!(
            run_discrete_swarm(&cfg, &irr, &unit()),
            Err(Error::InvalidConfig { .. })
        ));
        let one_row = IrradianceMatrix::uniform(1, 3, 0.5).unwrap();
        assert!(run_discrete_swarm(&DiscreteConfig::default(), &one_row, &unit()).is_err());
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(seed in any::<u64>(), rows in 2usize..7, cols in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Arrangement::random(rows, cols, &mut rng);
            let b = Arrangement::random(rows, cols, &mut rng);
            let c = Arrangement::random(rows, cols, &mut rng);
            let ab = arrangement_distance(&a, &b).unwrap();
            let bc = arrangement_distance(&b, &c).unwrap();
            let ac = arrangement_distance(&a, &c).unwrap();
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab, arrangement_distance(&b, &a).unwrap());
            prop_assert_eq!(ab == 0.0, a == b);
            prop_assert!(ac <= ab + bc + 1e-12);
        }

        #[test]
        fn waves_preserve_columns(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gb = Arrangement::random(9, 9, &mut rng);
            let mut arr = Arrangement::random(9, 9, &mut rng);
            for _ in 0..20 {
                wave_swap_pass(&mut arr, &gb, &mut rng).unwrap();
                random_column_swap(&mut arr, &mut rng);
                prop_assert!(arr.validate().is_ok());
            }
        }
    }
}
