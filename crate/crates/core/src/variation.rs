//! Simulated binary crossover and bounded polynomial mutation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Bounds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariationParams {
    pub eta_c: f64,
    pub eta_m: f64,
    pub p_c: f64,
    /// Per-variable mutation probability. `None` means 1/D.
    pub p_m: Option<f64>,
    pub rng_seed: u64,
}

impl Default for VariationParams {
    fn default() -> Self {
        VariationParams {
            eta_c: 20.0,
            eta_m: 20.0,
            p_c: 1.0,
            p_m: None,
            rng_seed: 0,
        }
    }
}

impl VariationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_c > 0.0 && self.eta_m > 0.0) {
            return Err(Error::Config("distribution indices must be positive".into()));
        }
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !prob_ok(self.p_c) || !self.p_m.is_none_or(prob_ok) {
            return Err(Error::Config("probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn mutation_probability(&self, d: usize) -> f64 {
        self.p_m.unwrap_or(1.0 / d as f64)
    }
}

/// Spread factor for a uniform draw `u` in [0, 1).
pub fn spread_factor(u: f64, eta_c: f64) -> f64 {
    let e = 1.0 / (eta_c + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(e)
    } else {
        (2.0 - 2.0 * u).powf(-e)
    }
}

/// SBX on one pair of parents.
///
/// Draws per pair: one crossover gate, then for every variable the spread
/// draw, the sign draw and the exchange coin, in that order.
pub fn sbx<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    params: &VariationParams,
    bounds: &Bounds,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let crossed = rng.random::<f64>() < params.p_c;
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for j in 0..p1.len() {
        let u: f64 = rng.random();
        let flip = rng.random::<bool>();
        let apply = rng.random::<f64>() < 0.5;
        if !crossed || !apply {
            continue;
        }
        let mut beta = spread_factor(u, params.eta_c);
        if flip {
            beta = -beta;
        }
        let mid = 0.5 * (p1[j] + p2[j]);
        let half = 0.5 * (p1[j] - p2[j]);
        c1[j] = bounds.clamp(j, mid + beta * half);
        c2[j] = bounds.clamp(j, mid - beta * half);
    }
    (c1, c2)
}

/// Bounded polynomial mutation. One gate draw per variable, followed by the
/// perturbation draw only when the gate opens.
pub fn poly_mutate<R: Rng + ?Sized>(
    x: &[f64],
    params: &VariationParams,
    bounds: &Bounds,
    rng: &mut R,
) -> Vec<f64> {
    let p_m = params.mutation_probability(x.len());
    let e = params.eta_m + 1.0;
    let mut y = x.to_vec();
    for (j, yj) in y.iter_mut().enumerate() {
        if rng.random::<f64>() >= p_m {
            continue;
        }
        let mu: f64 = rng.random();
        let (lo, hi) = (bounds.lower[j], bounds.upper[j]);
        let width = hi - lo;
        if width <= 0.0 {
            continue;
        }
        let v = bounds.clamp(j, *yj);
        let step = if mu <= 0.5 {
            let d1 = (v - lo) / width;
            (2.0 * mu + (1.0 - 2.0 * mu) * (1.0 - d1).powf(e)).powf(1.0 / e) - 1.0
        } else {
            let d2 = (hi - v) / width;
            1.0 - (2.0 * (1.0 - mu) + 2.0 * (mu - 0.5) * (1.0 - d2).powf(e)).powf(1.0 / e)
        };
        *yj = bounds.clamp(j, v + step * width);
    }
    y
}

/// Independent random streams for the three stages of variation.
pub struct VariationStreams<R> {
    pub mating: R,
    pub crossover: R,
    pub mutation: R,
}

/// Produces exactly `n` offspring from randomly paired parents.
pub fn offspring<R: Rng>(
    parents: &[Vec<f64>],
    n: usize,
    params: &VariationParams,
    bounds: &Bounds,
    streams: &mut VariationStreams<R>,
) -> Vec<Vec<f64>> {
    assert!(!parents.is_empty(), "offspring from an empty population");
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let a = streams.mating.random_range(0..parents.len());
        let b = streams.mating.random_range(0..parents.len());
        let (c1, c2) = sbx(&parents[a], &parents[b], params, bounds, &mut streams.crossover);
        out.push(c1);
        out.push(c2);
    }
    out.truncate(n);
    out.into_iter()
        .map(|c| poly_mutate(&c, params, bounds, &mut streams.mutation))
        .collect()
}
