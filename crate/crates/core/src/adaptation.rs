//! Reference-archive adaptation: SHRINK enables a finer layer around the
//! active vectors, EXPAND folds the finest layer's activity back into the
//! coarser layers and retires it.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::associate;
use crate::refgen::{new_layer, ReferenceArchive, VectorRef};
use crate::types::ReferenceVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptationParams {
    /// Population size; the target number of active vectors.
    pub population_size: usize,
    /// Tolerance ratio: no adaptation while `|active|` lies within
    /// `[(1 − θ)N, (1 + θ)N]`.
    pub theta: f64,
    /// Generations of unchanged activity required before adapting.
    pub window: usize,
    /// Layers stop growing once the top density would exceed
    /// `density_cap × base density`.
    pub density_cap: u32,
}

impl AdaptationParams {
    pub fn new(population_size: usize, theta: f64, window: usize) -> Result<Self> {
        let params = AdaptationParams {
            population_size,
            theta,
            window,
            density_cap: 64,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_density_cap(mut self, cap: u32) -> Self {
        self.density_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidArgument(format!("theta must lie in (0, 1), got {}", self.theta)));
        }
        if (1.0 - self.theta) * (self.population_size as f64) < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "(1 - theta) * N must be at least 1 (N = {}, theta = {})",
                self.population_size, self.theta
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidArgument("stability window must be positive".into()));
        }
        if self.density_cap == 0 {
            return Err(Error::InvalidArgument("density cap must be positive".into()));
        }
        Ok(())
    }

    pub fn lower(&self) -> f64 {
        (1.0 - self.theta) * self.population_size as f64
    }

    pub fn upper(&self) -> f64 {
        (1.0 + self.theta) * self.population_size as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdaptationKind {
    Shrink,
    Expand,
    None,
}

/// Telemetry for one call to [`adapt`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptationEvent {
    pub kind: AdaptationKind,
    pub generation: usize,
    pub active_before: usize,
    /// Previously active vectors that still participate afterwards.
    pub active_after: usize,
    pub participating_after: usize,
    /// A shrink was due but the density cap (or lattice size limit) stopped it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub capped: bool,
}

/// Runs at most one of SHRINK / EXPAND on `archive`, depending on where
/// `|active|` falls relative to the tolerance band, and returns the new
/// participating set.
///
/// `active` indexes into the participating set as it was before the call
/// (the order of [`ReferenceArchive::participating_refs`]).
pub fn adapt(
    archive: &mut ReferenceArchive,
    active: &[usize],
    params: &AdaptationParams,
    generation: usize,
) -> Result<(Vec<ReferenceVector>, AdaptationEvent)> {
    let participating = archive.participating_refs();
    let mut active_refs = HashSet::with_capacity(active.len());
    for &i in active {
        let r = participating.get(i).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "active index {i} outside the participating set of {}",
                participating.len()
            ))
        })?;
        active_refs.insert(*r);
    }
    let count = active_refs.len() as f64;

    let mut capped = false;
    let kind = if count < params.lower() {
        if shrink(archive, &active_refs, params)? {
            AdaptationKind::Shrink
        } else {
            capped = true;
            AdaptationKind::None
        }
    } else if count > params.upper() && expand(archive, &active_refs)? {
        AdaptationKind::Expand
    } else {
        AdaptationKind::None
    };

    let after = archive.participating_refs();
    let active_after = if kind == AdaptationKind::None {
        active_refs.len()
    } else {
        after.iter().filter(|r| active_refs.contains(r)).count()
    };
    let event = AdaptationEvent {
        kind,
        generation,
        active_before: active_refs.len(),
        active_after,
        participating_after: after.len(),
        capped,
    };
    let vectors = after.into_iter().map(|r| archive.vector(r).clone()).collect();
    Ok((vectors, event))
}

/// Returns false when the density cap prevents a new layer.
fn shrink(
    archive: &mut ReferenceArchive,
    active: &HashSet<VectorRef>,
    params: &AdaptationParams,
) -> Result<bool> {
    let top = archive.top();
    let target = archive.layers()[top].density.saturating_mul(2);
    if target > archive.base_density().saturating_mul(params.density_cap) {
        log::info!("density cap reached: no layer above H={}", archive.layers()[top].density);
        return Ok(false);
    }

    let next = top + 1;
    if next < archive.layers().len() {
        // A layer of this density was retired by an earlier expansion;
        // its contents and associations are unchanged, so reuse it.
        let layer = &mut archive.layers_mut()[next];
        layer.removed = false;
        layer.enabled.iter_mut().for_each(|e| *e = false);
    } else {
        match new_layer(archive) {
            Ok(layer) => archive.layers_mut().push(layer),
            Err(Error::LatticeTooLarge { m, h, required, .. }) => {
                log::info!("lattice M={m} H={h} would need {required} points; not shrinking");
                return Ok(false);
            }
            Err(e) => return Err(e),
        }
    }

    let layer = &mut archive.layers_mut()[next];
    for (enabled, target) in layer.enabled.iter_mut().zip(&layer.assoc) {
        if active.contains(target) {
            *enabled = true;
        }
    }
    Ok(true)
}

/// Returns false when only the base layer is live.
fn expand(archive: &mut ReferenceArchive, active: &HashSet<VectorRef>) -> Result<bool> {
    let top = archive.top();
    if top == 0 {
        return Ok(false);
    }
    let top_dirs: Vec<&[f64]> = archive.layers()[top]
        .vectors
        .iter()
        .map(|v| v.direction.as_slice())
        .collect();
    let active_top: HashSet<usize> = active
        .iter()
        .filter(|r| r.layer == top)
        .map(|r| r.index)
        .collect();

    let mut to_enable: Vec<(usize, usize)> = Vec::new();
    for (li, layer) in archive.layers()[..top].iter().enumerate() {
        if layer.enabled.iter().all(|&e| e) {
            continue;
        }
        let back = associate(&layer.vectors, &top_dirs)?;
        to_enable.extend(
            back.iter()
                .enumerate()
                .filter(|(_, t)| active_top.contains(t))
                .map(|(i, _)| (li, i)),
        );
    }
    let layers = archive.layers_mut();
    for (li, i) in to_enable {
        layers[li].enabled[i] = true;
    }
    let retired = &mut layers[top];
    retired.enabled.iter_mut().for_each(|e| *e = false);
    retired.removed = true;
    Ok(true)
}

/// True iff `history` holds `window` entries and all are identical.
pub fn stability_check(history: &[Vec<bool>], window: usize) -> bool {
    history.len() == window && history.windows(2).all(|w| w[0] == w[1])
}

/// The last `window` activity bitvectors over the participating set.
#[derive(Debug, Clone)]
pub struct ActivityHistory {
    window: usize,
    entries: VecDeque<Vec<bool>>,
}

impl ActivityHistory {
    pub fn new(window: usize) -> Self {
        ActivityHistory {
            window,
            entries: VecDeque::with_capacity(window),
        }
    }

    /// Records one generation's activity. A bitvector of a different length
    /// means the participating set changed, which invalidates the history.
    pub fn push(&mut self, activity: Vec<bool>) {
        if self.entries.front().is_some_and(|e| e.len() != activity.len()) {
            self.entries.clear();
        }
        if self.entries.len() == self.window {
            self.entries.pop_front();
        }
        self.entries.push_back(activity);
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_stable(&self) -> bool {
        self.entries.len() == self.window && self.entries.iter().all(|e| *e == self.entries[0])
    }
}

/// Activity bitvector over a participating set of `len` vectors.
pub fn activity_bits(active: &[usize], len: usize) -> Vec<bool> {
    let mut bits = vec![false; len];
    for &i in active {
        bits[i] = true;
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::angle;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn stability_examples() {
        assert!(stability_check(&[bits("1010"), bits("1010"), bits("1010")], 3));
        assert!(!stability_check(&[bits("1010"), bits("1010")], 3));
        assert!(!stability_check(&[bits("1010"), bits("1011")], 2));
    }

    #[test]
    fn history_resets_on_length_change() {
        let mut h = ActivityHistory::new(2);
        h.push(bits("10"));
        h.push(bits("10"));
        assert!(h.is_stable());
        h.push(bits("101"));
        assert_eq!(h.len(), 1);
        assert!(!h.is_stable());
        h.push(bits("101"));
        assert!(h.is_stable());
        h.push(bits("100"));
        assert!(!h.is_stable());
    }

    #[test]
    fn shrink_on_five_vector_base() {
        // Five base vectors on M = 2 (H = 4), three of them active, N = 5:
        // 3 < (1 − 0.2)·5 = 4 so the second layer is built and enabled
        // around the active vectors.
        let mut ra = ReferenceArchive::new(2, 4).unwrap();
        let params = AdaptationParams::new(5, 0.2, 1).unwrap();
        let (z, ev) = adapt(&mut ra, &[0, 1, 2], &params, 7).unwrap();
        assert_eq!(ev.kind, AdaptationKind::Shrink);
        assert_eq!(ev.generation, 7);
        assert_eq!(ra.layers().len(), 2);

        // Independent check: nearest base vector of each H = 8 point.
        let base = simplex(2, 4);
        let layer = &ra.layers()[1];
        for (v, &en) in layer.vectors.iter().zip(&layer.enabled) {
            let nearest = (0..base.len())
                .min_by(|&a, &b| {
                    angle(&v.direction, &base[a]).total_cmp(&angle(&v.direction, &base[b]))
                })
                .unwrap();
            assert_eq!(en, nearest <= 2, "{:?}", v.coords);
        }
        assert_eq!(z.len(), 5 + layer.enabled_count());
        assert_eq!(ev.participating_after, z.len());
    }

    fn simplex(m: usize, h: u32) -> Vec<Vec<f64>> {
        crate::refgen::simplex_lattice(m, h)
            .unwrap()
            .into_iter()
            .map(|v| v.direction)
            .collect()
    }

    #[test]
    fn in_band_is_no_change() {
        let mut ra = ReferenceArchive::for_population(3, 240).unwrap();
        let before = ra.clone();
        let params = AdaptationParams::new(240, 0.2, 20).unwrap();
        let active: Vec<usize> = (0..200).collect();
        let (_, ev) = adapt(&mut ra, &active, &params, 0).unwrap();
        assert_eq!(ev.kind, AdaptationKind::None);
        assert_eq!(ev.active_before, ev.active_after);
        assert_eq!(ra, before);
    }

    #[test]
    fn expand_with_only_base_is_noop() {
        let mut ra = ReferenceArchive::new(2, 4).unwrap();
        let params = AdaptationParams::new(3, 0.1, 1).unwrap();
        let (z, ev) = adapt(&mut ra, &[0, 1, 2, 3, 4], &params, 0).unwrap();
        assert_eq!(ev.kind, AdaptationKind::None);
        assert_eq!(z.len(), 5);
        assert_eq!(ra.layers().len(), 1);
    }

    #[test]
    fn expand_retires_top_and_reshrink_reuses_it() {
        let mut ra = ReferenceArchive::new(2, 4).unwrap();
        let shrink_params = AdaptationParams::new(10, 0.2, 1).unwrap();
        adapt(&mut ra, &[1, 2], &shrink_params, 0).unwrap();
        let layer2 = ra.layers()[1].clone();
        assert!(layer2.enabled_count() > 0);

        // everything active → expand
        let all: Vec<usize> = (0..ra.participating_refs().len()).collect();
        let expand_params = AdaptationParams::new(3, 0.2, 1).unwrap();
        let (z, ev) = adapt(&mut ra, &all, &expand_params, 1).unwrap();
        assert_eq!(ev.kind, AdaptationKind::Expand);
        assert!(ra.layers()[1].removed);
        assert_eq!(ra.layers()[1].enabled_count(), 0);
        assert_eq!(z.len(), 5);

        adapt(&mut ra, &[1, 2], &shrink_params, 2).unwrap();
        assert_eq!(ra.layers().len(), 2);
        assert!(!ra.layers()[1].removed);
        assert_eq!(ra.layers()[1].vectors, layer2.vectors);
        assert_eq!(ra.layers()[1].enabled, layer2.enabled);
    }

    #[test]
    fn density_cap_stops_shrinking() {
        let mut ra = ReferenceArchive::new(2, 4).unwrap();
        let params = AdaptationParams::new(100, 0.2, 1).unwrap().with_density_cap(4);
        let mut kinds = Vec::new();
        for g in 0..5 {
            let (_, ev) = adapt(&mut ra, &[0], &params, g).unwrap();
            kinds.push((ev.kind, ev.capped));
        }
        assert_eq!(
            kinds,
            vec![
                (AdaptationKind::Shrink, false),
                (AdaptationKind::Shrink, false),
                (AdaptationKind::None, true),
                (AdaptationKind::None, true),
                (AdaptationKind::None, true),
            ]
        );
        assert_eq!(ra.layers().last().unwrap().density, 16);
    }

    #[test]
    fn out_of_range_active_index_is_rejected() {
        let mut ra = ReferenceArchive::new(2, 4).unwrap();
        let params = AdaptationParams::new(5, 0.2, 1).unwrap();
        assert!(adapt(&mut ra, &[5], &params, 0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(AdaptationParams::new(1, 0.2, 1).is_err());
        assert!(AdaptationParams::new(10, 0.0, 1).is_err());
        assert!(AdaptationParams::new(10, 0.2, 0).is_err());
        assert!(AdaptationParams::new(10, 0.2, 20).is_ok());
    }

    /// Active vectors = those activated by a fixed set of directions.
    fn activated(ra: &ReferenceArchive, dirs: &[Vec<f64>]) -> Vec<usize> {
        let z = ra.participating();
        let mut idx = associate(dirs, &z).unwrap();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    #[test]
    fn repeated_shrink_grows_participation_until_band() {
        // A narrow arc of directions activates few base vectors.
        let dirs: Vec<Vec<f64>> = (0..400)
            .map(|i| {
                let a = 0.6 + 0.2 * f64::from(i) / 399.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let mut ra = ReferenceArchive::for_population(2, 24).unwrap();
        let params = AdaptationParams::new(24, 0.2, 1).unwrap();
        let mut last = ra.participating().len();
        for g in 0..20 {
            let active = activated(&ra, &dirs);
            if active.len() as f64 >= params.lower() {
                break;
            }
            let (z, ev) = adapt(&mut ra, &active, &params, g).unwrap();
            if ev.capped {
                break;
            }
            assert_eq!(ev.kind, AdaptationKind::Shrink);
            assert!(z.len() > last);
            last = z.len();
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adaptation_invariants(
            m in 2usize..4,
            n in 6usize..20,
            steps in prop::collection::vec((any::<u64>(), 0.0f64..1.0), 1..8),
        ) {
            let mut ra = ReferenceArchive::for_population(m, n).unwrap();
            let params = AdaptationParams::new(n, 0.2, 1).unwrap();
            for (g, (mask_seed, density)) in steps.into_iter().enumerate() {
                let before = ra.clone();
                let participating = ra.participating_refs();
                // pseudo-random active subset
                let active: Vec<usize> = (0..participating.len())
                    .filter(|&i| {
                        let h = mask_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(i as u32 % 64) ^ (i as u64);
                        ((h % 1000) as f64) / 1000.0 < density
                    })
                    .collect();
                let active_refs: HashSet<VectorRef> = active.iter().map(|&i| participating[i]).collect();
                let (z, ev) = adapt(&mut ra, &active, &params, g).unwrap();

                prop_assert!(!z.is_empty());
                let top = ra.top();
                for r in ra.participating_refs() {
                    prop_assert!(!ra.layers()[r.layer].removed);
                }
                match ev.kind {
                    AdaptationKind::Shrink => {
                        for (li, layer) in before.layers().iter().enumerate() {
                            if layer.removed { continue; }
                            for (i, &e) in layer.enabled.iter().enumerate() {
                                if e { prop_assert!(ra.layers()[li].enabled[i]); }
                            }
                        }
                        let new_top = &ra.layers()[top];
                        for (i, &e) in new_top.enabled.iter().enumerate() {
                            if e { prop_assert!(active_refs.contains(&new_top.assoc[i])); }
                        }
                    }
                    AdaptationKind::Expand => {
                        let old_top = before.top();
                        prop_assert!(ra.layers()[old_top].removed);
                        prop_assert_eq!(ra.layers()[old_top].enabled_count(), 0);
                        prop_assert_eq!(ra.top(), old_top - 1);
                    }
                    AdaptationKind::None => {
                        prop_assert_eq!(&ra, &before);
                        prop_assert_eq!(ev.active_before, ev.active_after);
                    }
                }
            }
        }
    }
}
