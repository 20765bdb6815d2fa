//! Vector helpers for the continuous swarm: distances, hyperspherical
//! direction angles, wave composition and bounded sampling.
//!
//! Positions are plain `[f64]` slices. A direction in `D` dimensions is
//! described by `D - 1` angles; [`direction_angles`] and [`compose_wave`]
//! are inverse to each other for any non-zero vector.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dims, Error, Result};

/// Per-dimension search box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dims(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::config(
                "bounds",
                "at least one dimension is required",
            ));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::config(
                    "bounds",
                    format!("dimension {d}: lower {lo} must be finite and below upper {hi}"),
                ));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same `[lo, hi]` interval in every one of `dim` dimensions.
    pub fn uniform(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    /// `[-limit, limit]` in every dimension.
    pub fn symmetric(limit: f64, dim: usize) -> Result<Self> {
        Self::uniform(-limit, limit, dim)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Mean of the per-dimension widths.
    pub fn mean_width(&self) -> f64 {
        let total: f64 = self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).sum();
        total / self.dim() as f64
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    /// Uniform point inside the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect()
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(distance_unchecked(a, b))
}

#[inline]
pub(crate) fn distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Hyperspherical angles of `v`.
///
/// The first `D - 2` angles are `atan2(‖v[d+1..]‖, v[d])` and lie in
/// `[0, π]`. The last one uses the half-angle form
/// `2·atan(v[D-1] / (v[D-2] + hypot(v[D-2], v[D-1])))`, which lies in
/// `(-π, π]`; it is evaluated through the conjugate expression when the
/// denominator would cancel, and is `π` on the negative `v[D-2]` axis.
pub fn direction_angles(v: &[f64]) -> Result<Vec<f64>> {
    let dim = v.len();
    if dim < 2 {
        return Err(Error::Contract(format!(
            "direction angles need at least 2 dimensions, got {dim}"
        )));
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::DegenerateDirection);
    }

    let mut angles = Vec::with_capacity(dim - 1);
    // Suffix norms, accumulated from the back so each angle costs O(1).
    let mut tail_sq = vec![0.0; dim + 1];
    for d in (0..dim).rev() {
        tail_sq[d] = tail_sq[d + 1] + v[d] * v[d];
    }
    for d in 0..dim - 2 {
        angles.push(tail_sq[d + 1].sqrt().atan2(v[d]));
    }
    angles.push(half_angle(v[dim - 2], v[dim - 1]));
    Ok(angles)
}

fn half_angle(x: f64, y: f64) -> f64 {
    let r = x.hypot(y);
    if x >= 0.0 {
        if r == 0.0 {
            0.0
        } else {
            2.0 * (y / (x + r)).atan()
        }
    } else if y == 0.0 {
        PI
    } else {
        // x + r = y² / (r - x), exact in real arithmetic and free of cancellation.
        2.0 * ((r - x) / y).atan()
    }
}

/// `D - 1` independent angles, each uniform on `[0, 2π)`.
pub fn random_angles<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<f64>> {
    if dim < 2 {
        return Err(Error::Contract(format!(
            "random angles need at least 2 dimensions, got {dim}"
        )));
    }
    Ok((0..dim - 1).map(|_| rng.random::<f64>() * TAU).collect())
}

/// Cartesian vector of length `magnitude` pointing along `angles`.
pub fn compose_wave(magnitude: f64, angles: &[f64]) -> Result<Vec<f64>> {
    if angles.is_empty() {
        return Err(Error::Contract("a wave needs at least one angle".into()));
    }
    if magnitude < 0.0 {
        return Err(Error::Contract(format!(
            "wave magnitude must be non-negative, got {magnitude}"
        )));
    }
    let dim = angles.len() + 1;
    let mut out = Vec::with_capacity(dim);
    let mut sin_prod = magnitude;
    for &theta in angles {
        out.push(sin_prod * theta.cos());
        sin_prod *= theta.sin();
    }
    out.push(sin_prod);
    Ok(out)
}

/// Uniform point in the closed ball of `radius` around `center`.
///
/// The direction comes from a normalised Gaussian vector and the length
/// from `radius · u^(1/D)`, which together give a uniform density.
pub fn sample_in_ball<R: Rng + ?Sized>(center: &[f64], radius: f64, rng: &mut R) -> Vec<f64> {
    if radius <= 0.0 {
        return center.to_vec();
    }
    let dim = center.len();
    let mut dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let mut len = norm(&dir);
    while len == 0.0 {
        dir = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        len = norm(&dir);
    }
    let u: f64 = rng.random();
    let scale = radius * u.powf(1.0 / dim as f64) / len;
    center
        .iter()
        .zip(&dir)
        .map(|(c, x)| c + x * scale)
        .collect()
}

pub fn clamp_to_bounds(p: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    check_dims(bounds.dim(), p.len())?;
    let mut out = p.to_vec();
    clamp_in_place(&mut out, bounds);
    Ok(out)
}

pub(crate) fn clamp_in_place(p: &mut [f64], bounds: &Bounds) {
    for (x, (lo, hi)) in p.iter_mut().zip(bounds.lower.iter().zip(&bounds.upper)) {
        *x = x.clamp(*lo, *hi);
    }
}
