//! Cascade clustering: frontier split, angular clustering around reference
//! vectors, PDM ranking and round-robin picking.

use std::collections::BTreeMap;

use crate::dominance::frontier_mask;
use crate::error::{Error, Result};
use crate::geometry::{angle, associate};
use crate::types::{IdealPoint, Individual, ReferenceVector};

/// Proximity-and-diversity measure: mean of the translated objectives plus
/// the sine of their angle to `z`. Lower is better.
pub fn pdm(objectives: &[f64], z: &[f64], ideal: &IdealPoint) -> f64 {
    let t = ideal.translate(objectives);
    pdm_translated(&t, z)
}

fn pdm_translated(t: &[f64], z: &[f64]) -> f64 {
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    mean + angle(t, z).sin()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One cluster of the selection pass. Members are indices into the pool.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Index of the activated vector in the participating set.
    pub ref_index: usize,
    /// Nondominated members, ascending PDM.
    pub frontiers: Vec<usize>,
    /// Dominated members, ascending distance to the center.
    pub non_frontiers: Vec<usize>,
}

impl Cluster {
    pub fn center(&self) -> usize {
        self.frontiers[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub population: Vec<Individual>,
    /// Participating-set indices that received at least one frontier, ascending.
    pub active_indices: Vec<usize>,
    /// One per cluster, in the order of `active_indices`.
    pub centers: Vec<Individual>,
    /// The pool held fewer than `n` individuals.
    pub underfilled: bool,
}

/// Builds the clusters of a pool, ordered by ascending reference index.
pub fn build_clusters(
    pool: &[Individual],
    z: &[ReferenceVector],
    ideal: &IdealPoint,
) -> Result<Vec<Cluster>> {
    if pool.is_empty() {
        return Err(Error::EmptyInput("selection pool"));
    }
    if z.is_empty() {
        return Err(Error::EmptyTargets);
    }
    let translated: Vec<Vec<f64>> = pool.iter().map(|ind| ideal.translate(&ind.objectives)).collect();
    let raw: Vec<&[f64]> = pool.iter().map(|ind| ind.objectives.as_slice()).collect();
    let mask = frontier_mask(&raw);

    let (frontier, rest): (Vec<usize>, Vec<usize>) = (0..pool.len()).partition(|&i| mask[i]);
    let frontier_points: Vec<&[f64]> = frontier.iter().map(|&i| translated[i].as_slice()).collect();
    let attached = associate(&frontier_points, z)?;

    let mut by_ref: BTreeMap<usize, Vec<(f64, usize)>> = BTreeMap::new();
    for (&i, &r) in frontier.iter().zip(&attached) {
        let score = pdm_translated(&translated[i], &z[r].direction);
        by_ref.entry(r).or_default().push((score, i));
    }
    let mut clusters: Vec<Cluster> = by_ref
        .into_iter()
        .map(|(ref_index, mut members)| {
            // stable: PDM ties keep pool order
            members.sort_by(|a, b| a.0.total_cmp(&b.0));
            Cluster {
                ref_index,
                frontiers: members.into_iter().map(|(_, i)| i).collect(),
                non_frontiers: Vec::new(),
            }
        })
        .collect();

    let mut assigned: Vec<Vec<(f64, usize)>> = vec![Vec::new(); clusters.len()];
    for &i in &rest {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, cluster) in clusters.iter().enumerate() {
            let d = squared_distance(&translated[i], &translated[cluster.center()]);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        assigned[best].push((best_d, i));
    }
    for (cluster, mut members) in clusters.iter_mut().zip(assigned) {
        members.sort_by(|a, b| a.0.total_cmp(&b.0));
        cluster.non_frontiers = members.into_iter().map(|(_, i)| i).collect();
    }
    Ok(clusters)
}

/// Selects up to `n` individuals from `pool` by cascade clustering against
/// the participating vectors `z`.
pub fn cascade_cluster(
    pool: &[Individual],
    z: &[ReferenceVector],
    n: usize,
    ideal: &IdealPoint,
) -> Result<SelectionResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("selection size must be positive".into()));
    }
    let clusters = build_clusters(pool, z, ideal)?;

    let mut queues: Vec<_> = clusters
        .iter()
        .map(|c| c.frontiers.iter().chain(&c.non_frontiers).copied())
        .collect();
    let target = n.min(pool.len());
    let mut population = Vec::with_capacity(target);
    while population.len() < target {
        for q in queues.iter_mut() {
            if population.len() == target {
                break;
            }
            if let Some(i) = q.next() {
                population.push(pool[i].clone());
            }
        }
    }

    Ok(SelectionResult {
        population,
        active_indices: clusters.iter().map(|c| c.ref_index).collect(),
        centers: clusters.iter().map(|c| pool[c.center()].clone()).collect(),
        underfilled: pool.len() < n,
    })
}

/// Participating indices activated by the nondominated members of `pop`.
pub fn frontier_activity(
    pop: &[Individual],
    z: &[ReferenceVector],
    ideal: &IdealPoint,
) -> Result<Vec<usize>> {
    Ok(build_clusters(pop, z, ideal)?
        .into_iter()
        .map(|c| c.ref_index)
        .collect())
}
