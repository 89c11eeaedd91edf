//! Scalable benchmark problems (DTLZ1–7, MaF1, MaF2, MaF6, MaF7) with
//! true-front samplers.
//!
//! Every problem lives on the unit box and defaults to `D = M + k − 1`
//! variables; `D` can be overridden for large-scale runs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::dominance::frontier_mask;
use crate::error::{Error, Result};
use crate::refgen::{initial_density, simplex_lattice};
use crate::types::{Bounds, ObjectiveVector};

/// Whether the feasible objective space fills the whole positive orthant
/// region behind the front, or leaves parts of it infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FosKind {
    Full,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Dtlz1,
    Dtlz2,
    Dtlz3,
    Dtlz4,
    Dtlz5,
    Dtlz6,
    Dtlz7,
    Maf1,
    Maf2,
    Maf6,
    Maf7,
}

const REGISTRY: &[(&str, Family, usize, FosKind)] = &[
    ("dtlz1", Family::Dtlz1, 5, FosKind::Full),
    ("dtlz2", Family::Dtlz2, 10, FosKind::Full),
    ("dtlz3", Family::Dtlz3, 10, FosKind::Full),
    ("dtlz4", Family::Dtlz4, 10, FosKind::Full),
    ("dtlz5", Family::Dtlz5, 10, FosKind::Partial),
    ("dtlz6", Family::Dtlz6, 10, FosKind::Partial),
    ("dtlz7", Family::Dtlz7, 20, FosKind::Partial),
    ("maf1", Family::Maf1, 10, FosKind::Partial),
    ("maf2", Family::Maf2, 10, FosKind::Partial),
    ("maf6", Family::Maf6, 10, FosKind::Partial),
    ("maf7", Family::Maf7, 20, FosKind::Partial),
];

/// Names accepted by [`Problem::new`].
pub fn problem_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|r| r.0).collect()
}

/// Conventional decision-space size `M + k − 1`.
pub fn default_d(name: &str, m: usize) -> Result<usize> {
    let entry = lookup(name)?;
    Ok(m + entry.2 - 1)
}

fn lookup(name: &str) -> Result<&'static (&'static str, Family, usize, FosKind)> {
    let key = name.to_ascii_lowercase();
    REGISTRY
        .iter()
        .find(|r| r.0 == key)
        .ok_or_else(|| Error::UnknownProblem(name.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    name: &'static str,
    family: Family,
    m: usize,
    d: usize,
    bounds: Bounds,
    fos_kind: FosKind,
}

impl Problem {
    /// `d = None` picks the conventional size.
    pub fn new(name: &str, m: usize, d: Option<usize>) -> Result<Self> {
        let &(canonical, family, k, fos_kind) = lookup(name)?;
        if m < 2 {
            return Err(Error::Config(format!("{canonical} needs M >= 2, got {m}")));
        }
        let d = d.unwrap_or(m + k - 1);
        if d < m {
            return Err(Error::Config(format!("{canonical} needs D >= M, got D={d}, M={m}")));
        }
        Ok(Problem {
            name: canonical,
            family,
            m,
            d,
            bounds: Bounds::unit(d),
            fos_kind,
        })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn fos_kind(&self) -> FosKind {
        self.fos_kind
    }

    /// Objective vector of `x`.
    ///
    /// Panics if `x` has the wrong length or leaves the unit box.
    pub fn evaluate(&self, x: &[f64]) -> ObjectiveVector {
        assert!(self.bounds.contains(x), "{}: solution outside the bounds", self.name);
        let m = self.m;
        let (pos, dist) = x.split_at(m - 1);
        match self.family {
            Family::Dtlz1 => {
                let g = rastrigin_g(dist);
                linear(pos, 0.5 * (1.0 + g))
            }
            Family::Dtlz2 => spherical(pos, 1.0 + sphere_g(dist)),
            Family::Dtlz3 => spherical(pos, 1.0 + rastrigin_g(dist)),
            Family::Dtlz4 => {
                let t: Vec<f64> = pos.iter().map(|v| v.powi(100)).collect();
                spherical(&t, 1.0 + sphere_g(dist))
            }
            Family::Dtlz5 => {
                let g = sphere_g(dist);
                spherical(&degenerate_angles(pos, g, 1), 1.0 + g)
            }
            Family::Dtlz6 => {
                let g: f64 = dist.iter().map(|v| v.powf(0.1)).sum();
                spherical(&degenerate_angles(pos, g, 1), 1.0 + g)
            }
            Family::Dtlz7 | Family::Maf7 => {
                let g = 1.0 + 9.0 * dist.iter().sum::<f64>() / dist.len() as f64;
                let mut f: Vec<f64> = pos.to_vec();
                let h = m as f64
                    - pos
                        .iter()
                        .map(|&v| v / (1.0 + g) * (1.0 + (3.0 * PI * v).sin()))
                        .sum::<f64>();
                f.push((1.0 + g) * h);
                f
            }
            Family::Maf1 => {
                let g = sphere_g(dist);
                linear(pos, 1.0).into_iter().map(|v| (1.0 - v) * (1.0 + g)).collect()
            }
            Family::Maf2 => maf2(x, m),
            Family::Maf6 => {
                let g = sphere_g(dist);
                spherical(&degenerate_angles(pos, g, 1), 1.0 + 100.0 * g)
            }
        }
    }

    /// `n` deterministic, mutually nondominated points of the true front.
    pub fn sample_true_pf(&self, n: usize) -> Result<Vec<ObjectiveVector>> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample count must be positive".into()));
        }
        let m = self.m;
        let candidates = match self.family {
            Family::Dtlz1 => simplex_points(m, n)?
                .into_iter()
                .map(|w| w.into_iter().map(|v| 0.5 * v).collect())
                .collect(),
            Family::Dtlz2 | Family::Dtlz3 | Family::Dtlz4 => simplex_points(m, n)?
                .into_iter()
                .map(|w| {
                    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                    w.into_iter().map(|v| v / norm).collect()
                })
                .collect(),
            Family::Maf1 => simplex_points(m, n)?
                .into_iter()
                .map(|w| w.into_iter().map(|v| 1.0 - v).collect())
                .collect(),
            Family::Dtlz5 | Family::Dtlz6 | Family::Maf6 => degenerate_curve(m, n),
            Family::Maf2 => maf2_front(m, n)?,
            Family::Dtlz7 | Family::Maf7 => disconnected_front(self.name, m, n)?,
        };
        Ok(spread_subset(candidates, n))
    }
}

fn sphere_g(dist: &[f64]) -> f64 {
    dist.iter().map(|v| (v - 0.5) * (v - 0.5)).sum()
}

fn rastrigin_g(dist: &[f64]) -> f64 {
    100.0
        * (dist.len() as f64
            + dist
                .iter()
                .map(|v| (v - 0.5) * (v - 0.5) - (20.0 * PI * (v - 0.5)).cos())
                .sum::<f64>())
}

// f_i = scale · x_1 ⋯ x_{M−i} · (1 − x_{M−i+1})
fn linear(pos: &[f64], scale: f64) -> Vec<f64> {
    let m = pos.len() + 1;
    (0..m)
        .map(|i| {
            let keep = m - 1 - i;
            let mut v = scale * pos[..keep].iter().product::<f64>();
            if i > 0 {
                v *= 1.0 - pos[keep];
            }
            v
        })
        .collect()
}

// Angles given as fractions of π/2.
fn spherical(t: &[f64], scale: f64) -> Vec<f64> {
    let m = t.len() + 1;
    (0..m)
        .map(|i| {
            let keep = m - 1 - i;
            let mut v = scale * t[..keep].iter().map(|a| (a * FRAC_PI_2).cos()).product::<f64>();
            if i > 0 {
                v *= (t[keep] * FRAC_PI_2).sin();
            }
            v
        })
        .collect()
}

// The first `free` angles follow x directly; the rest collapse towards π/4
// as g vanishes. Returned as fractions of π/2.
fn degenerate_angles(pos: &[f64], g: f64, free: usize) -> Vec<f64> {
    pos.iter()
        .enumerate()
        .map(|(i, &v)| {
            if i < free {
                v
            } else {
                (FRAC_PI_4 / (1.0 + g) * (1.0 + 2.0 * g * v)) / FRAC_PI_2
            }
        })
        .collect()
}

fn maf2(x: &[f64], m: usize) -> Vec<f64> {
    let d = x.len();
    let c = (d - m + 1) / m;
    let shifted = |v: f64| v / 2.0 + 0.25;
    let g: Vec<f64> = (0..m)
        .map(|i| {
            let start = m - 1 + i * c;
            let end = if i + 1 == m { d } else { m - 1 + (i + 1) * c };
            x[start..end]
                .iter()
                .map(|&v| (shifted(v) - 0.5) * (shifted(v) - 0.5))
                .sum()
        })
        .collect();
    let t: Vec<f64> = x[..m - 1].iter().map(|&v| shifted(v)).collect();
    spherical(&t, 1.0)
        .into_iter()
        .zip(&g)
        .map(|(f, gi)| f * (1.0 + gi))
        .collect()
}

fn simplex_points(m: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    Ok(simplex_lattice(m, initial_density(m, n))?
        .into_iter()
        .map(|z| z.direction)
        .collect())
}

// Unit box grid with `r` points per axis, in row-major order.
fn grid(dims: usize, r: usize) -> Vec<Vec<f64>> {
    let total = r.pow(dims as u32);
    (0..total)
        .map(|mut idx| {
            (0..dims)
                .map(|_| {
                    let v = (idx % r) as f64 / (r - 1) as f64;
                    idx /= r;
                    v
                })
                .collect()
        })
        .collect()
}

const MAX_GRID_POINTS: usize = 1 << 22;

fn grid_resolution(dims: usize, at_least: usize) -> usize {
    ((at_least as f64).powf(1.0 / dims as f64).ceil() as usize).max(2)
}

// θ_1 sweeps the quarter circle, every other angle sits at π/4.
fn degenerate_curve(m: usize, n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![0.5; m - 1];
    (0..n.max(2))
        .map(|i| {
            t[0] = i as f64 / (n.max(2) - 1) as f64;
            spherical(&t, 1.0)
        })
        .collect()
}

// Unit-sphere patch with every angle in [π/8, 3π/8].
fn maf2_front(m: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    let r = grid_resolution(m - 1, n);
    if r.checked_pow(m as u32 - 1).is_none_or(|c| c > MAX_GRID_POINTS) {
        return Err(Error::UnsupportedProblem(format!("maf2 with M={m}")));
    }
    Ok(grid(m - 1, r)
        .into_iter()
        .map(|u| {
            let t: Vec<f64> = u.iter().map(|v| v / 2.0 + 0.25).collect();
            spherical(&t, 1.0)
        })
        .collect())
}

// Nondominated part of the g = 1 surface, sampled on a grid that is refined
// until enough points survive the filter.
fn disconnected_front(name: &str, m: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    let dims = m - 1;
    let mut r = grid_resolution(dims, 4 * n);
    loop {
        if r.checked_pow(dims as u32).is_none_or(|c| c > MAX_GRID_POINTS) {
            return Err(Error::UnsupportedProblem(format!("{name} with M={m}")));
        }
        let points: Vec<Vec<f64>> = grid(dims, r)
            .into_iter()
            .map(|mut f| {
                let h = m as f64
                    - f.iter()
                        .map(|&v| v / 2.0 * (1.0 + (3.0 * PI * v).sin()))
                        .sum::<f64>();
                f.push(2.0 * h);
                f
            })
            .collect();
        let mask = frontier_mask(&points);
        let front: Vec<Vec<f64>> = points
            .into_iter()
            .zip(mask)
            .filter_map(|(p, keep)| keep.then_some(p))
            .collect();
        if front.len() >= n {
            return Ok(front);
        }
        r *= 2;
    }
}

/// Greedy farthest-point subset of size `n`, seeded with the first
/// candidate. Returns the candidates unchanged when there are at most `n`.
fn spread_subset(candidates: Vec<Vec<f64>>, n: usize) -> Vec<Vec<f64>> {
    if candidates.len() <= n {
        return candidates;
    }
    let d2 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let mut nearest = vec![f64::INFINITY; candidates.len()];
    let mut picked = Vec::with_capacity(n);
    let mut next = 0;
    for _ in 0..n {
        picked.push(next);
        nearest[next] = f64::NEG_INFINITY;
        let mut best = 0;
        let mut best_d = f64::NEG_INFINITY;
        for (i, c) in candidates.iter().enumerate() {
            if nearest[i] == f64::NEG_INFINITY {
                continue;
            }
            nearest[i] = nearest[i].min(d2(c, &candidates[next]));
            if nearest[i] > best_d {
                best_d = nearest[i];
                best = i;
            }
        }
        next = best;
    }
    picked.sort_unstable();
    picked.into_iter().map(|i| candidates[i].clone()).collect()
}
