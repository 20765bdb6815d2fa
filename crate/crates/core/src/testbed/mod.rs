//! Shifted and rotated benchmark functions F1–F14 and three composition functions.
//!
//! Shift vectors, rotations and the auxiliary data of F5/F12 are generated
//! from a seed rather than read from the official data files, so values are
//! comparable to published tables only in order of magnitude. Official data
//! can still be plugged in through [`ObjectiveSpec::with_shift`] and
//! [`ObjectiveSpec::with_rotation`] together with [`Matrix::read`].

mod composition;
mod functions;
mod transform;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use composition::{CompositionSpec, Member, NORMALIZED_SCALE};
pub use functions::BasicFunction;
pub use transform::{random_orthogonal, Matrix, Transform};

use crate::error::{check_dims, Error, Result};
use crate::geometry::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
    F12,
    F13,
    F14,
    F15,
    F18,
    F21,
}

impl FunctionId {
    pub const ALL: [FunctionId; 17] = [
        FunctionId::F1,
        FunctionId::F2,
        FunctionId::F3,
        FunctionId::F4,
        FunctionId::F5,
        FunctionId::F6,
        FunctionId::F7,
        FunctionId::F8,
        FunctionId::F9,
        FunctionId::F10,
        FunctionId::F11,
        FunctionId::F12,
        FunctionId::F13,
        FunctionId::F14,
        FunctionId::F15,
        FunctionId::F18,
        FunctionId::F21,
    ];

    pub fn number(self) -> u32 {
        match self {
            FunctionId::F1 => 1,
            FunctionId::F2 => 2,
            FunctionId::F3 => 3,
            FunctionId::F4 => 4,
            FunctionId::F5 => 5,
            FunctionId::F6 => 6,
            FunctionId::F7 => 7,
            FunctionId::F8 => 8,
            FunctionId::F9 => 9,
            FunctionId::F10 => 10,
            FunctionId::F11 => 11,
            FunctionId::F12 => 12,
            FunctionId::F13 => 13,
            FunctionId::F14 => 14,
            FunctionId::F15 => 15,
            FunctionId::F18 => 18,
            FunctionId::F21 => 21,
        }
    }

    pub fn is_composition(self) -> bool {
        matches!(self, FunctionId::F15 | FunctionId::F18 | FunctionId::F21)
    }

    /// Known optimum value.
    pub fn f_min(self) -> f64 {
        match self {
            FunctionId::F1 | FunctionId::F2 | FunctionId::F3 | FunctionId::F4 => -450.0,
            FunctionId::F5 => -310.0,
            FunctionId::F6 => 390.0,
            FunctionId::F7 => -180.0,
            FunctionId::F8 => -140.0,
            FunctionId::F9 | FunctionId::F10 => -330.0,
            FunctionId::F11 => 90.0,
            FunctionId::F12 => -460.0,
            FunctionId::F13 => -130.0,
            FunctionId::F14 => -300.0,
            FunctionId::F15 => 120.0,
            FunctionId::F18 => 10.0,
            FunctionId::F21 => 360.0,
        }
    }

    /// Search bounds `(lo, hi)`, or `None` for unbounded functions.
    pub fn bounds(self) -> Option<(f64, f64)> {
        match self {
            FunctionId::F7 => None,
            _ => Some(self.init_range()),
        }
    }

    pub fn init_range(self) -> (f64, f64) {
        match self {
            FunctionId::F1
            | FunctionId::F2
            | FunctionId::F3
            | FunctionId::F4
            | FunctionId::F5
            | FunctionId::F6
            | FunctionId::F14 => (-100.0, 100.0),
            FunctionId::F7 => (0.0, 600.0),
            FunctionId::F8 => (-32.0, 32.0),
            FunctionId::F9 | FunctionId::F10 => (-5.0, 5.0),
            FunctionId::F11 => (-0.5, 0.5),
            FunctionId::F12 => (-PI, PI),
            FunctionId::F13 => (-3.0, 1.0),
            FunctionId::F15 | FunctionId::F18 | FunctionId::F21 => (-5.0, 5.0),
        }
    }

    fn rotated(self) -> bool {
        matches!(
            self,
            FunctionId::F3
                | FunctionId::F7
                | FunctionId::F8
                | FunctionId::F10
                | FunctionId::F11
                | FunctionId::F14
                | FunctionId::F18
                | FunctionId::F21
        )
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.number())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let n: u32 = t
            .strip_prefix(['F', 'f'])
            .unwrap_or(t)
            .parse()
            .map_err(|_| Error::config("function", format!("unknown function `{s}`")))?;
        FunctionId::ALL
            .into_iter()
            .find(|id| id.number() == n)
            .ok_or_else(|| Error::config("function", format!("unsupported function `{s}`")))
    }
}

/// How the transformed point is turned into a value.
#[derive(Debug, Clone, PartialEq)]
pub enum Landscape {
    Basic(BasicFunction),
    /// Schwefel 1.2 times `1 + 0.4|N(0,1)|`.
    NoisySchwefel,
    /// `max_i |A_i x − B_i|` with `B = A · optimum`.
    LinearMax {
        a: Matrix,
        b: Vec<f64>,
    },
    /// `Σ_i (T_i − Σ_j a_ij sin x_j + b_ij cos x_j)²` with `T` taken at the optimum.
    TrigSystem {
        a: Matrix,
        b: Matrix,
        target: Vec<f64>,
    },
    Composition(CompositionSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    pub id: FunctionId,
    pub dim: usize,
    /// `None` for functions without search bounds.
    pub bounds: Option<Bounds>,
    pub init: Bounds,
    pub transform: Transform,
    pub f_min: f64,
    /// Point at which the value equals `f_min`.
    pub optimum: Vec<f64>,
    pub landscape: Landscape,
}

impl ObjectiveSpec {
    /// Seeded instance of `id` in `dim` dimensions.
    pub fn generate(id: FunctionId, dim: usize, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::config(
                "dim",
                "benchmarks need at least 2 dimensions",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(id.number()));

        let (lo, hi) = id.init_range();
        let init = Bounds::uniform(lo, hi, dim)?;
        let bounds = id
            .bounds()
            .map(|(l, h)| Bounds::uniform(l, h, dim))
            .transpose()?;
        let shift = init.sample(&mut rng);
        let rotation = if id.rotated() && !id.is_composition() {
            Some(random_orthogonal(dim, &mut rng)?)
        } else {
            None
        };
        let pre_offset = match id {
            FunctionId::F6 | FunctionId::F13 => 1.0,
            _ => 0.0,
        };
        let transform = Transform {
            shift: shift.clone(),
            rotation,
            pre_offset,
            scale: 1.0,
        };

        let (landscape, optimum) = match id {
            FunctionId::F1 => (Landscape::Basic(BasicFunction::Sphere), shift),
            FunctionId::F2 => (Landscape::Basic(BasicFunction::Schwefel12), shift),
            FunctionId::F3 => (Landscape::Basic(BasicFunction::Elliptic), shift),
            FunctionId::F4 => (Landscape::NoisySchwefel, shift),
            FunctionId::F5 => {
                let a = Matrix::new(
                    dim,
                    dim,
                    (0..dim * dim)
                        .map(|_| f64::from(rng.random_range(-500i32..=500)))
                        .collect(),
                )?;
                let b = a.mul_vec(&shift);
                (Landscape::LinearMax { a, b }, shift)
            }
            FunctionId::F6 => (Landscape::Basic(BasicFunction::Rosenbrock), shift),
            FunctionId::F7 => (Landscape::Basic(BasicFunction::Griewank), shift),
            FunctionId::F8 => (Landscape::Basic(BasicFunction::Ackley), shift),
            FunctionId::F9 | FunctionId::F10 => (Landscape::Basic(BasicFunction::Rastrigin), shift),
            FunctionId::F11 => (Landscape::Basic(BasicFunction::Weierstrass), shift),
            FunctionId::F12 => {
                let int_matrix = |rng: &mut ChaCha8Rng| {
                    Matrix::new(
                        dim,
                        dim,
                        (0..dim * dim)
                            .map(|_| f64::from(rng.random_range(-100i32..=100)))
                            .collect(),
                    )
                };
                let a = int_matrix(&mut rng)?;
                let b = int_matrix(&mut rng)?;
                let target = trig_system(&a, &b, &shift);
                (Landscape::TrigSystem { a, b, target }, shift)
            }
            FunctionId::F13 => (Landscape::Basic(BasicFunction::GriewankRosenbrock), shift),
            FunctionId::F14 => (Landscape::Basic(BasicFunction::ExpandedScaffer), shift),
            FunctionId::F15 | FunctionId::F18 | FunctionId::F21 => {
                let comp = composition_instance(id, dim, &init, &mut rng)?;
                let optimum = comp.members[0].transform.shift.clone();
                (Landscape::Composition(comp), optimum)
            }
        };
        let transform = if id.is_composition() {
            Transform::shift_only(vec![0.0; dim])
        } else {
            transform
        };

        Ok(Self {
            id,
            dim,
            bounds,
            init,
            transform,
            f_min: id.f_min(),
            optimum,
            landscape,
        })
    }

    /// Box the optimizer searches: the bounds, or the initialization region
    /// for unbounded functions.
    pub fn search_bounds(&self) -> &Bounds {
        self.bounds.as_ref().unwrap_or(&self.init)
    }

    /// Replace the shift vector (e.g. with official data).
    pub fn with_shift(mut self, shift: Vec<f64>) -> Result<Self> {
        check_dims(self.dim, shift.len())?;
        match self.landscape {
            Landscape::Basic(_) | Landscape::NoisySchwefel => {
                self.optimum = shift.clone();
                self.transform.shift = shift;
                Ok(self)
            }
            Landscape::LinearMax { ref a, .. } => {
                let b = a.mul_vec(&shift);
                self.landscape = Landscape::LinearMax { a: a.clone(), b };
                self.optimum = shift;
                Ok(self)
            }
            _ => Err(Error::Contract(format!(
                "{} does not take an external shift vector",
                self.id
            ))),
        }
    }

    /// Replace the rotation matrix (e.g. with official data).
    pub fn with_rotation(mut self, rotation: Matrix) -> Result<Self> {
        check_dims(self.dim, rotation.rows())?;
        check_dims(self.dim, rotation.cols())?;
        match self.landscape {
            Landscape::Basic(_) | Landscape::NoisySchwefel => {
                self.transform.rotation = Some(rotation);
                Ok(self)
            }
            _ => Err(Error::Contract(format!(
                "{} does not take an external rotation matrix",
                self.id
            ))),
        }
    }

    /// Value at `x`, drawing F4's multiplicative noise from `noise`.
    pub fn evaluate<R: Rng + ?Sized>(&self, x: &[f64], noise: &mut R) -> Result<f64> {
        check_dims(self.dim, x.len())?;
        let factor = match self.landscape {
            Landscape::NoisySchwefel => {
                let n: f64 = noise.sample(StandardNormal);
                1.0 + 0.4 * n.abs()
            }
            _ => 1.0,
        };
        Ok(self.value(x, factor))
    }

    /// Value at `x` with F4's noise factor fixed at 1.
    pub fn evaluate_noiseless(&self, x: &[f64]) -> Result<f64> {
        check_dims(self.dim, x.len())?;
        Ok(self.value(x, 1.0))
    }

    fn value(&self, x: &[f64], noise_factor: f64) -> f64 {
        let raw = match &self.landscape {
            Landscape::Basic(f) => f.eval(&self.transform.apply_unchecked(x)),
            Landscape::NoisySchwefel => {
                functions::schwefel_1_2(&self.transform.apply_unchecked(x)) * noise_factor
            }
            Landscape::LinearMax { a, b } => a
                .mul_vec(x)
                .iter()
                .zip(b)
                .map(|(ax, bi)| (ax - bi).abs())
                .fold(0.0, f64::max),
            Landscape::TrigSystem { a, b, target } => trig_system(a, b, x)
                .iter()
                .zip(target)
                .map(|(v, t)| (t - v) * (t - v))
                .sum(),
            Landscape::Composition(c) => return c.evaluate_unchecked(x),
        };
        raw + self.f_min
    }

    /// Objective closure for the optimizer, with its own noise stream.
    pub fn objective(&self, noise_seed: u64) -> impl FnMut(&[f64]) -> f64 + '_ {
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        move |x| {
            self.evaluate(x, &mut rng)
                .expect("optimizer dimension matches the spec")
        }
    }
}

fn trig_system(a: &Matrix, b: &Matrix, x: &[f64]) -> Vec<f64> {
    let (s, c): (Vec<f64>, Vec<f64>) = x.iter().map(|v| v.sin_cos()).unzip();
    (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .zip(b.row(i))
                .zip(s.iter().zip(&c))
                .map(|((aij, bij), (sj, cj))| aij * sj + bij * cj)
                .sum()
        })
        .collect()
}

fn composition_instance(
    id: FunctionId,
    dim: usize,
    init: &Bounds,
    rng: &mut ChaCha8Rng,
) -> Result<CompositionSpec> {
    use BasicFunction::*;
    let (functions, lambdas, rotated): ([BasicFunction; 10], [f64; 10], bool) = match id {
        FunctionId::F15 => (
            [
                Rastrigin,
                Rastrigin,
                Weierstrass,
                Weierstrass,
                Griewank,
                Griewank,
                Ackley,
                Ackley,
                Sphere,
                Sphere,
            ],
            [
                1.0,
                1.0,
                10.0,
                10.0,
                5.0 / 60.0,
                5.0 / 60.0,
                5.0 / 32.0,
                5.0 / 32.0,
                5.0 / 100.0,
                5.0 / 100.0,
            ],
            false,
        ),
        FunctionId::F18 => (
            [
                Ackley,
                Ackley,
                Rastrigin,
                Rastrigin,
                Sphere,
                Sphere,
                Weierstrass,
                Weierstrass,
                Griewank,
                Griewank,
            ],
            [
                2.0 * 5.0 / 32.0,
                5.0 / 32.0,
                2.0,
                1.0,
                2.0 * 5.0 / 100.0,
                5.0 / 100.0,
                20.0,
                10.0,
                2.0 * 5.0 / 60.0,
                5.0 / 60.0,
            ],
            true,
        ),
        FunctionId::F21 => (
            [
                ExpandedScaffer,
                ExpandedScaffer,
                Rastrigin,
                Rastrigin,
                GriewankRosenbrock,
                GriewankRosenbrock,
                Weierstrass,
                Weierstrass,
                Griewank,
                Griewank,
            ],
            [
                5.0 * 5.0 / 100.0,
                5.0 / 100.0,
                5.0,
                1.0,
                5.0,
                1.0,
                50.0,
                10.0,
                5.0 * 5.0 / 200.0,
                5.0 / 200.0,
            ],
            true,
        ),
        other => {
            return Err(Error::Contract(format!("{other} is not a composition")));
        }
    };
    let mut members = Vec::with_capacity(10);
    for (i, (f, lambda)) in functions.into_iter().zip(lambdas).enumerate() {
        let shift = init.sample(rng);
        let rotation = if rotated {
            Some(random_orthogonal(dim, rng)?)
        } else {
            None
        };
        let transform = Transform {
            shift,
            rotation,
            pre_offset: 0.0,
            scale: lambda,
        };
        members.push(Member::new(f, 1.0, transform, 100.0 * i as f64));
    }
    Ok(CompositionSpec {
        members,
        f_bias: id.f_min(),
    })
}

/// Seeded specs for every supported function in `dim` dimensions.
pub fn make_suite(dim: usize, seed: u64) -> Result<Vec<ObjectiveSpec>> {
    FunctionId::ALL
        .into_iter()
        .map(|id| ObjectiveSpec::generate(id, dim, seed))
        .collect()
}
