//! Unbiased basic functions. Every function here is evaluated on an already
//! transformed point `z`; biases are added by the caller.

use std::f64::consts::{E, TAU};

/// Weierstrass parameters: `a^k cos(2π b^k (z + 0.5))`, `k = 0..=K`.
const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_K: i32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasicFunction {
    Sphere,
    /// Schwefel 1.2: sum of squared prefix sums.
    Schwefel12,
    /// High-conditioned elliptic, condition number 10⁶.
    Elliptic,
    /// Minimum 0 at `z = 1`.
    Rosenbrock,
    Griewank,
    Ackley,
    Rastrigin,
    Weierstrass,
    /// Expanded Griewank of 2-D Rosenbrock over a ring; minimum 0 at `z = 1`.
    GriewankRosenbrock,
    /// Expanded Scaffer F6 over a ring.
    ExpandedScaffer,
}

impl BasicFunction {
    pub fn name(self) -> &'static str {
        match self {
            BasicFunction::Sphere => "sphere",
            BasicFunction::Schwefel12 => "schwefel_1_2",
            BasicFunction::Elliptic => "elliptic",
            BasicFunction::Rosenbrock => "rosenbrock",
            BasicFunction::Griewank => "griewank",
            BasicFunction::Ackley => "ackley",
            BasicFunction::Rastrigin => "rastrigin",
            BasicFunction::Weierstrass => "weierstrass",
            BasicFunction::GriewankRosenbrock => "griewank_rosenbrock",
            BasicFunction::ExpandedScaffer => "expanded_scaffer",
        }
    }

    pub fn eval(self, z: &[f64]) -> f64 {
        match self {
            BasicFunction::Sphere => sphere(z),
            BasicFunction::Schwefel12 => schwefel_1_2(z),
            BasicFunction::Elliptic => elliptic(z),
            BasicFunction::Rosenbrock => rosenbrock(z),
            BasicFunction::Griewank => griewank(z),
            BasicFunction::Ackley => ackley(z),
            BasicFunction::Rastrigin => rastrigin(z),
            BasicFunction::Weierstrass => weierstrass(z),
            BasicFunction::GriewankRosenbrock => griewank_rosenbrock(z),
            BasicFunction::ExpandedScaffer => expanded_scaffer(z),
        }
    }

    /// Offset added to `z` so that the minimum sits at the origin.
    pub fn origin_offset(self) -> f64 {
        match self {
            BasicFunction::Rosenbrock | BasicFunction::GriewankRosenbrock => 1.0,
            _ => 0.0,
        }
    }
}

pub fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

pub fn schwefel_1_2(z: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut total = 0.0;
    for v in z {
        prefix += v;
        total += prefix * prefix;
    }
    total
}

pub fn elliptic(z: &[f64]) -> f64 {
    let d = z.len();
    if d == 1 {
        return z[0] * z[0];
    }
    z.iter()
        .enumerate()
        .map(|(i, v)| 1e6f64.powf(i as f64 / (d - 1) as f64) * v * v)
        .sum()
}

pub fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

pub fn griewank(z: &[f64]) -> f64 {
    let sum: f64 = z.iter().map(|v| v * v / 4000.0).sum();
    let prod: f64 = z
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

pub fn ackley(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let sq: f64 = z.iter().map(|v| v * v).sum::<f64>() / d;
    let cs: f64 = z.iter().map(|v| (TAU * v).cos()).sum::<f64>() / d;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

pub fn rastrigin(z: &[f64]) -> f64 {
    z.iter()
        .map(|v| v * v - 10.0 * (TAU * v).cos() + 10.0)
        .sum()
}

fn weierstrass_term(v: f64) -> f64 {
    (0..=WEIERSTRASS_K)
        .map(|k| WEIERSTRASS_A.powi(k) * (TAU * WEIERSTRASS_B.powi(k) * (v + 0.5)).cos())
        .sum()
}

pub fn weierstrass(z: &[f64]) -> f64 {
    let offset = z.len() as f64 * weierstrass_term(0.0);
    z.iter().map(|&v| weierstrass_term(v)).sum::<f64>() - offset
}

/// 2-D Rosenbrock `100(x² − y)² + (x − 1)²`.
pub fn rosenbrock_pair(x: f64, y: f64) -> f64 {
    100.0 * (x * x - y).powi(2) + (x - 1.0).powi(2)
}

/// 1-D Griewank `s²/4000 − cos(s) + 1`.
pub fn griewank_1d(s: f64) -> f64 {
    s * s / 4000.0 - s.cos() + 1.0
}

/// Scaffer F6 on a pair.
pub fn scaffer_pair(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let s = r2.sqrt().sin();
    0.5 + (s * s - 0.5) / (1.0 + 0.001 * r2).powi(2)
}

fn ring_sum(z: &[f64], pair: impl Fn(f64, f64) -> f64) -> f64 {
    let d = z.len();
    (0..d).map(|i| pair(z[i], z[(i + 1) % d])).sum()
}

pub fn griewank_rosenbrock(z: &[f64]) -> f64 {
    ring_sum(z, |x, y| griewank_1d(rosenbrock_pair(x, y)))
}

pub fn expanded_scaffer(z: &[f64]) -> f64 {
    ring_sum(z, scaffer_pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minima_are_zero() {
        let zero = [0.0; 4];
        let ones = [1.0; 4];
        for f in [
            BasicFunction::Sphere,
            BasicFunction::Schwefel12,
            BasicFunction::Elliptic,
            BasicFunction::Griewank,
            BasicFunction::Rastrigin,
            BasicFunction::Weierstrass,
            BasicFunction::ExpandedScaffer,
        ] {
            assert_eq!(f.eval(&zero), 0.0, "{}", f.name());
        }
        assert!(BasicFunction::Ackley.eval(&zero).abs() < 1e-14);
        assert_eq!(BasicFunction::Rosenbrock.eval(&ones), 0.0);
        assert_eq!(BasicFunction::GriewankRosenbrock.eval(&ones), 0.0);
    }

    #[test]
    fn rastrigin_integer_lattice() {
        // Each coordinate at 1 contributes 1 - 10 cos(2π) + 10 = 1.
        assert!((rastrigin(&[1.0, 1.0, 1.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn schwefel_matches_double_loop() {
        let z = [0.3, -1.2, 4.5, 2.0, -0.7];
        let mut oracle = 0.0;
        for i in 0..z.len() {
            let mut s = 0.0;
            for v in &z[..=i] {
                s += v;
            }
            oracle += s * s;
        }
        assert!((schwefel_1_2(&z) - oracle).abs() < 1e-12);
    }

    #[test]
    fn elliptic_weights() {
        assert_eq!(elliptic(&[1.0, 0.0]), 1.0);
        assert!((elliptic(&[0.0, 1.0]) - 1e6).abs() < 1e-6);
        assert!((elliptic(&[0.0, 1.0, 0.0]) - 1e3).abs() < 1e-9);
    }

    #[test]
    fn scaffer_far_field() {
        assert_eq!(scaffer_pair(0.0, 0.0), 0.0);
        assert!(scaffer_pair(3.0, 4.0) > 0.0);
        // Ring over two coordinates visits both ordered pairs.
        let v = expanded_scaffer(&[1.0, 2.0]);
        assert!((v - (scaffer_pair(1.0, 2.0) + scaffer_pair(2.0, 1.0))).abs() < 1e-15);
    }

    #[test]
    fn griewank_rosenbrock_ring() {
        let z = [0.5, -0.2, 1.5];
        let expect = griewank_1d(rosenbrock_pair(0.5, -0.2))
            + griewank_1d(rosenbrock_pair(-0.2, 1.5))
            + griewank_1d(rosenbrock_pair(1.5, 0.5));
        assert!((griewank_rosenbrock(&z) - expect).abs() < 1e-12);
    }
}
