//! Uniform simplex lattices and the layered reference archive.
//!
//! Every layer holds lattice points of one density `H`. Densities double
//! from one layer to the next, so each coarser lattice is an exact subset of
//! the finer one, and a new layer stores only the points that no lower layer
//! already has. Points are compared by integer coordinates rescaled to a
//! common denominator, never by floating-point equality.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::associate;
use crate::types::ReferenceVector;

/// Hard ceiling on the number of points a single lattice may have.
pub const MAX_LATTICE_POINTS: usize = 4_000_000;

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul(u128::from(n - i))? / u128::from(i + 1);
        if r > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(r).ok()
}

/// Number of points of the lattice with `m` objectives and density `h`:
/// `C(h + m − 1, m − 1)`.
pub fn lattice_size(m: usize, h: u32) -> Option<u64> {
    binomial(u64::from(h) + m as u64 - 1, m as u64 - 1)
}

/// All compositions of `h` into `m` nonnegative parts, in ascending
/// lexicographic order of their coordinates.
pub fn simplex_lattice(m: usize, h: u32) -> Result<Vec<ReferenceVector>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("lattice needs M >= 2, got {m}")));
    }
    if h < 1 {
        return Err(Error::InvalidArgument("lattice needs H >= 1".into()));
    }
    let count = match lattice_size(m, h) {
        Some(c) if c <= MAX_LATTICE_POINTS as u64 => c as usize,
        other => {
            return Err(Error::LatticeTooLarge {
                m,
                h,
                required: other.map_or_else(|| "more than 2^64".to_string(), |c| c.to_string()),
                limit: MAX_LATTICE_POINTS,
            })
        }
    };

    let mut out = Vec::with_capacity(count);
    let mut coords = vec![0u32; m];
    coords[m - 1] = h;
    loop {
        out.push(ReferenceVector::from_coords(coords.clone(), h));
        // Lexicographic successor: move one unit from the rightmost nonzero
        // tail coordinate to its left neighbour and park the rest of that
        // coordinate in the last slot.
        let Some(j) = (1..m).rev().find(|&j| coords[j] > 0) else { break };
        let s = coords[j];
        coords[j] = 0;
        coords[j - 1] += 1;
        coords[m - 1] = s - 1;
    }
    debug_assert_eq!(out.len(), count);
    Ok(out)
}

/// Smallest `H` whose lattice has at least `n` points.
pub fn initial_density(m: usize, n: usize) -> u32 {
    assert!(m >= 2, "M must be at least 2");
    let mut h = 1u32;
    while lattice_size(m, h).is_some_and(|c| c < n as u64) {
        h += 1;
    }
    h
}

/// Position of a vector in the archive: layer index and index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VectorRef {
    pub layer: usize,
    pub index: usize,
}

/// One density level of the archive.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLayer {
    pub density: u32,
    pub vectors: Vec<ReferenceVector>,
    pub enabled: Vec<bool>,
    /// Nearest vector (by angle) among all lower layers; empty for the base.
    pub assoc: Vec<VectorRef>,
    /// Set when an expansion retired this layer. Retired layers are kept so
    /// a later shrink to the same density can reuse them.
    pub removed: bool,
}

impl ReferenceLayer {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn enabled_count(&self) -> usize {
        self.enabled.iter().filter(|&&e| e).count()
    }
}

/// Ordered stack of layers, base first.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceArchive {
    m: usize,
    layers: Vec<ReferenceLayer>,
}

impl ReferenceArchive {
    /// Archive holding only the base lattice of density `h`, fully enabled.
    pub fn new(m: usize, h: u32) -> Result<Self> {
        let vectors = simplex_lattice(m, h)?;
        let n = vectors.len();
        Ok(ReferenceArchive {
            m,
            layers: vec![ReferenceLayer {
                density: h,
                vectors,
                enabled: vec![true; n],
                assoc: Vec::new(),
                removed: false,
            }],
        })
    }

    /// Base layer sized for a population of `n`.
    pub fn for_population(m: usize, n: usize) -> Result<Self> {
        if n < m {
            return Err(Error::InvalidArgument(format!(
                "population size {n} is smaller than the objective count {m}"
            )));
        }
        ReferenceArchive::new(m, initial_density(m, n))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn layers(&self) -> &[ReferenceLayer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut Vec<ReferenceLayer> {
        &mut self.layers
    }

    pub fn base_density(&self) -> u32 {
        self.layers[0].density
    }

    /// Index of the finest layer that has not been retired.
    pub fn top(&self) -> usize {
        self.layers
            .iter()
            .rposition(|l| !l.removed)
            .expect("base layer is never retired")
    }

    /// Layers that currently take part (all non-retired ones).
    pub fn live_layers(&self) -> &[ReferenceLayer] {
        &self.layers[..=self.top()]
    }

    pub fn vector(&self, r: VectorRef) -> &ReferenceVector {
        &self.layers[r.layer].vectors[r.index]
    }

    /// Enabled vectors of live layers, layer by layer in index order.
    pub fn participating_refs(&self) -> Vec<VectorRef> {
        self.live_layers()
            .iter()
            .enumerate()
            .flat_map(|(layer, l)| {
                l.enabled
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e)
                    .map(move |(index, _)| VectorRef { layer, index })
            })
            .collect()
    }

    pub fn participating(&self) -> Vec<ReferenceVector> {
        self.participating_refs()
            .into_iter()
            .map(|r| self.vector(r).clone())
            .collect()
    }

    /// Enabled set in coordinates rescaled to `denominator`, which must be a
    /// multiple of every live layer's density.
    pub fn enabled_points(&self, denominator: u32) -> HashSet<Vec<u32>> {
        self.participating_refs()
            .into_iter()
            .map(|r| rescale(&self.vector(r).coords, self.layers[r.layer].density, denominator))
            .collect()
    }

    pub fn dump(&self) -> ArchiveDump {
        ArchiveDump {
            m: self.m,
            layers: self
                .layers
                .iter()
                .map(|l| LayerDump {
                    h: l.density,
                    coords: l.vectors.iter().map(|v| v.coords.clone()).collect(),
                    enabled: l.enabled.clone(),
                    removed: l.removed,
                })
                .collect(),
        }
    }
}

pub(crate) fn rescale(coords: &[u32], from: u32, to: u32) -> Vec<u32> {
    debug_assert_eq!(to % from, 0);
    let f = to / from;
    coords.iter().map(|&c| c * f).collect()
}

/// Builds the next layer above the current top: the lattice at twice the
/// top density minus every point already present in a live layer, all
/// disabled, each associated to its nearest lower-layer vector.
pub fn new_layer(archive: &ReferenceArchive) -> Result<ReferenceLayer> {
    let lower = archive.live_layers();
    let density = lower
        .last()
        .expect("archive has a base layer")
        .density
        .checked_mul(2)
        .ok_or_else(|| Error::InvalidArgument("lattice density overflow".into()))?;

    let existing: HashSet<Vec<u32>> = lower
        .iter()
        .flat_map(|l| l.vectors.iter().map(move |v| rescale(&v.coords, l.density, density)))
        .collect();
    let vectors: Vec<ReferenceVector> = simplex_lattice(archive.m(), density)?
        .into_iter()
        .filter(|v| !existing.contains(&v.coords))
        .collect();
    assert!(!vectors.is_empty(), "a doubled lattice always adds points");

    let (targets, refs): (Vec<&[f64]>, Vec<VectorRef>) = lower
        .iter()
        .enumerate()
        .flat_map(|(layer, l)| {
            l.vectors
                .iter()
                .enumerate()
                .map(move |(index, v)| (v.direction.as_slice(), VectorRef { layer, index }))
        })
        .unzip();
    let assoc = associate(&vectors, &targets)?
        .into_iter()
        .map(|i| refs[i])
        .collect();

    let n = vectors.len();
    Ok(ReferenceLayer {
        density,
        vectors,
        enabled: vec![false; n],
        assoc,
        removed: false,
    })
}

/// JSON debug dump: `{M, layers: [{H, coords, enabled}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveDump {
    #[serde(rename = "M")]
    pub m: usize,
    pub layers: Vec<LayerDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerDump {
    #[serde(rename = "H")]
    pub h: u32,
    pub coords: Vec<Vec<u32>>,
    pub enabled: Vec<bool>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub removed: bool,
}
