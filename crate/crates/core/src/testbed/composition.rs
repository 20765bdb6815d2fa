//! Weighted compositions of shifted, stretched and rotated basic functions.

use super::functions::BasicFunction;
use super::transform::Transform;
use crate::error::{check_dims, Result};

/// Scale every member is normalised to before weighting.
pub const NORMALIZED_SCALE: f64 = 2000.0;

/// Coordinate used to measure a member's magnitude, `f(5·1 / λ · M)`.
const MAGNITUDE_PROBE: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub function: BasicFunction,
    /// Kernel width of the member's weight.
    pub sigma: f64,
    /// Shift, stretch `λ` and optional rotation.
    pub transform: Transform,
    pub bias: f64,
    /// Magnitude of the raw function, used to bring members to a common scale.
    pub magnitude: f64,
}

impl Member {
    /// Builds a member whose minimum is at `transform.shift`; the magnitude
    /// is probed from the transform's scale and rotation.
    pub fn new(function: BasicFunction, sigma: f64, mut transform: Transform, bias: f64) -> Self {
        transform.pre_offset = function.origin_offset();
        let probe = Transform {
            shift: vec![0.0; transform.dim()],
            ..transform.clone()
        };
        let raw = function.eval(&probe.apply_unchecked(&vec![MAGNITUDE_PROBE; transform.dim()]));
        let magnitude = if raw.abs() > 0.0 { raw.abs() } else { 1.0 };
        Self {
            function,
            sigma,
            transform,
            bias,
            magnitude,
        }
    }

    /// Member value on the shared scale, without bias.
    pub fn normalized_value(&self, x: &[f64]) -> f64 {
        let z = self.transform.apply_unchecked(x);
        NORMALIZED_SCALE * self.function.eval(&z) / self.magnitude
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionSpec {
    pub members: Vec<Member>,
    pub f_bias: f64,
}

impl CompositionSpec {
    pub fn dim(&self) -> usize {
        self.members[0].transform.dim()
    }

    /// Normalised member weights at `x`.
    ///
    /// `w_i = exp(−‖x − o_i‖² / (2 D σ_i²))`; all but the largest weight are
    /// damped by `1 − w_max¹⁰`, then the weights are scaled to sum to one.
    /// When every kernel underflows the nearest member takes all the weight.
    pub fn weights(&self, x: &[f64]) -> Vec<f64> {
        let dim = x.len() as f64;
        let sq_dists: Vec<f64> = self
            .members
            .iter()
            .map(|m| {
                x.iter()
                    .zip(&m.transform.shift)
                    .map(|(a, o)| (a - o) * (a - o))
                    .sum()
            })
            .collect();
        let mut w: Vec<f64> = self
            .members
            .iter()
            .zip(&sq_dists)
            .map(|(m, d2)| (-d2 / (2.0 * dim * m.sigma * m.sigma)).exp())
            .collect();
        let (argmax, max) =
            w.iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
                );
        let damp = 1.0 - max.powi(10);
        for (i, wi) in w.iter_mut().enumerate() {
            if i != argmax {
                *wi *= damp;
            }
        }
        let sum: f64 = w.iter().sum();
        if sum > 0.0 {
            w.iter_mut().for_each(|wi| *wi /= sum);
        } else {
            let nearest = sq_dists
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            w.iter_mut().for_each(|wi| *wi = 0.0);
            w[nearest] = 1.0;
        }
        w
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dims(self.dim(), x.len())?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        let w = self.weights(x);
        let total: f64 = self
            .members
            .iter()
            .zip(&w)
            .filter(|(_, &wi)| wi > 0.0)
            .map(|(m, wi)| wi * (m.normalized_value(x) + m.bias))
            .sum();
        total + self.f_bias
    }
}
