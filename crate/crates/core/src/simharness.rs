//! Drives the adaptation engine with synthetic 2-D current fronts made of
//! line segments and circular arcs, and measures how order-dependent the
//! resulting enabled sets are.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptation::{adapt, AdaptationEvent, AdaptationKind, AdaptationParams};
use crate::dominance::frontier_mask;
use crate::error::{Error, Result};
use crate::geometry::associate;
use crate::refgen::ReferenceArchive;

/// Iteration cap for [`run_scenario`].
pub const MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: [f64; 2],
    pub radius: f64,
    /// Start and end angle in degrees, counter-clockwise from the x axis.
    pub a0: f64,
    pub a1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Segment {
    Line { from: [f64; 2], to: [f64; 2] },
    Arc { arc: Arc },
}

impl Segment {
    fn length(&self) -> f64 {
        match self {
            Segment::Line { from, to } => (to[0] - from[0]).hypot(to[1] - from[1]),
            Segment::Arc { arc } => arc.radius * (arc.a1 - arc.a0).to_radians().abs(),
        }
    }

    fn at(&self, t: f64) -> [f64; 2] {
        match self {
            Segment::Line { from, to } => [
                from[0] + t * (to[0] - from[0]),
                from[1] + t * (to[1] - from[1]),
            ],
            Segment::Arc { arc } => {
                let a = (arc.a0 + t * (arc.a1 - arc.a0)).to_radians();
                [arc.center[0] + arc.radius * a.cos(), arc.center[1] + arc.radius * a.sin()]
            }
        }
    }
}

/// A simulated current front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub segments: Vec<Segment>,
    /// Sample points per unit length.
    pub density: f64,
}

impl Scenario {
    /// Samples every segment at `density`, endpoints included, and checks
    /// that the cloud is strictly positive and mutually nondominated.
    pub fn points(&self) -> Result<Vec<[f64; 2]>> {
        let fail = |reason: String| Error::Scenario {
            name: self.name.clone(),
            reason,
        };
        if self.segments.is_empty() {
            return Err(fail("no segments".into()));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(fail(format!("density {} is not positive", self.density)));
        }
        let mut points = Vec::new();
        for seg in &self.segments {
            let steps = ((seg.length() * self.density).ceil() as usize).max(1);
            points.extend((0..=steps).map(|i| seg.at(i as f64 / steps as f64)));
        }
        if let Some(p) = points.iter().find(|p| !(p[0] > 0.0 && p[1] > 0.0)) {
            return Err(fail(format!("point ({}, {}) is not strictly positive", p[0], p[1])));
        }
        if let Some(i) = frontier_mask(&points).iter().position(|&keep| !keep) {
            let p = points[i];
            return Err(fail(format!("point ({}, {}) is dominated", p[0], p[1])));
        }
        Ok(points)
    }
}

/// Reads a JSON file holding one scenario or a list of them.
pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        Many(Vec<Scenario>),
        One(Scenario),
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(match serde_json::from_str(&text)? {
        OneOrMany::Many(v) => v,
        OneOrMany::One(s) => vec![s],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerState {
    #[serde(rename = "H")]
    pub h: u32,
    pub enabled: Vec<bool>,
    pub removed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub population_size: usize,
    pub iterations: usize,
    /// The last call left the archive unchanged before the iteration cap.
    pub converged: bool,
    pub active: usize,
    pub participating: usize,
    /// `|active − N| / N`.
    pub inaccuracy: f64,
    pub events: Vec<AdaptationEvent>,
    pub layers: Vec<LayerState>,
}

/// Participating indices activated by `points`, ascending.
pub fn active_set(points: &[[f64; 2]], archive: &ReferenceArchive) -> Result<Vec<usize>> {
    let z = archive.participating();
    let hit: HashSet<usize> = associate(points, &z)?.into_iter().collect();
    let mut active: Vec<usize> = hit.into_iter().collect();
    active.sort_unstable();
    Ok(active)
}

/// Alternates activation and adaptation until an adaptation call changes
/// nothing or [`MAX_ITERATIONS`] calls have been made.
///
/// Scenario points are taken as already translated by the ideal point.
pub fn run_scenario(
    scenario: &Scenario,
    archive: &mut ReferenceArchive,
    params: &AdaptationParams,
) -> Result<ScenarioReport> {
    if archive.m() != 2 {
        return Err(Error::InvalidArgument("scenarios are two-dimensional".into()));
    }
    let points = scenario.points()?;
    let mut events = Vec::new();
    let mut converged = false;
    let mut active;
    loop {
        active = active_set(&points, archive)?;
        if events.len() == MAX_ITERATIONS {
            break;
        }
        let (_, event) = adapt(archive, &active, params, events.len())?;
        let done = event.kind == AdaptationKind::None;
        events.push(event);
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        log::debug!("scenario {}: no fixed point after {MAX_ITERATIONS} iterations", scenario.name);
    }
    let n = params.population_size;
    Ok(ScenarioReport {
        name: scenario.name.clone(),
        population_size: n,
        iterations: events.len(),
        converged,
        active: active.len(),
        participating: archive.participating_refs().len(),
        inaccuracy: (active.len() as f64 - n as f64).abs() / n as f64,
        events,
        layers: archive
            .layers()
            .iter()
            .map(|l| LayerState {
                h: l.density,
                enabled: l.enabled.clone(),
                removed: l.removed,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArchiveMode {
    /// Every scenario starts from the fresh base archive.
    Reset,
    /// Scenarios of one permutation share a single archive.
    CarryOver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub mode: ArchiveMode,
    pub scenarios: Vec<String>,
    /// Orders in which the scenarios were fed, identity first.
    pub permutations: Vec<Vec<usize>>,
    /// `matrix[s][p]`: percentage similarity of scenario `s`'s enabled set
    /// under permutation `p` to that under the identity order.
    pub matrix: Vec<Vec<f64>>,
    /// Per scenario, mean similarity over all pairs of permutations.
    pub mean_pairwise: Vec<f64>,
    /// Mean of `mean_pairwise`.
    pub mean: f64,
    /// Converged flag of every run, `converged[s][p]`.
    pub converged: Vec<Vec<bool>>,
}

impl SimilarityReport {
    pub fn matrix_csv(&self) -> String {
        let mut out = String::from("scenario");
        for p in &self.permutations {
            let label: Vec<String> = p.iter().map(|i| i.to_string()).collect();
            let _ = write!(out, ",{}", label.join(""));
        }
        out.push('\n');
        for (name, row) in self.scenarios.iter().zip(&self.matrix) {
            out.push_str(name);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// All orderings of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot has a successor");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// Percentage of identically enabled points: `100 · |A ∩ B| / |A ∪ B|`.
pub fn jaccard_percent(a: &HashSet<Vec<u32>>, b: &HashSet<Vec<u32>>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 100.0;
    }
    100.0 * a.intersection(b).count() as f64 / union as f64
}

/// Enabled sets and converged flags per scenario for one permutation.
type PermutationRun = (Vec<HashSet<Vec<u32>>>, Vec<bool>);

/// Feeds the scenarios to the engine in every order and compares the
/// enabled set after each scenario across orders.
pub fn permutation_similarity(
    scenarios: &[Scenario],
    params: &AdaptationParams,
    mode: ArchiveMode,
) -> Result<SimilarityReport> {
    if scenarios.is_empty() {
        return Err(Error::EmptyInput("scenario list"));
    }
    for s in scenarios {
        s.points()?;
    }
    let base = ReferenceArchive::for_population(2, params.population_size)?;
    // Layer densities are base · 2^k with 2^k ≤ cap.
    let denominator = base.base_density() << params.density_cap.ilog2();
    let perms = permutations(scenarios.len());

    // snapshots[p][s]: enabled set of scenario s under permutation p
    let runs: Vec<PermutationRun> = perms
        .par_iter()
        .map(|perm| {
            let mut archive = base.clone();
            let mut sets = vec![HashSet::new(); scenarios.len()];
            let mut converged = vec![false; scenarios.len()];
            for &s in perm {
                if mode == ArchiveMode::Reset {
                    archive = base.clone();
                }
                let report = run_scenario(&scenarios[s], &mut archive, params)?;
                sets[s] = archive.enabled_points(denominator);
                converged[s] = report.converged;
            }
            Ok((sets, converged))
        })
        .collect::<Result<_>>()?;

    let k = scenarios.len();
    let p = perms.len();
    let matrix: Vec<Vec<f64>> = (0..k)
        .map(|s| (0..p).map(|q| jaccard_percent(&runs[0].0[s], &runs[q].0[s])).collect())
        .collect();
    let mean_pairwise: Vec<f64> = (0..k)
        .map(|s| {
            if p == 1 {
                return 100.0;
            }
            let mut total = 0.0;
            let mut pairs = 0usize;
            for a in 0..p {
                for b in a + 1..p {
                    total += jaccard_percent(&runs[a].0[s], &runs[b].0[s]);
                    pairs += 1;
                }
            }
            total / pairs as f64
        })
        .collect();
    let mean = mean_pairwise.iter().sum::<f64>() / k as f64;
    Ok(SimilarityReport {
        mode,
        scenarios: scenarios.iter().map(|s| s.name.clone()).collect(),
        permutations: perms,
        matrix,
        mean_pairwise,
        mean,
        converged: (0..k).map(|s| runs.iter().map(|r| r.1[s]).collect()).collect(),
    })
}
