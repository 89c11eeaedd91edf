//! Angles between objective vectors and reference directions, and
//! nearest-direction association.

use kdtree::distance::squared_euclidean;
use kdtree::KdTree;
use rayon::prelude::*;

use crate::error::{Error, Result};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

fn angle_between_units(u: &[f64], v: &[f64]) -> f64 {
    // 2·atan2(|u − v|, |u + v|) stays accurate near 0 and π/2, where the
    // arccos of the clamped cosine loses about half of the digits.
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Angle in radians between `o` and `z`.
///
/// A zero-norm `o` (an individual sitting on the ideal point) is at angle 0
/// from every direction. `z` must be nonzero.
pub fn angle(o: &[f64], z: &[f64]) -> f64 {
    assert_eq!(o.len(), z.len(), "angle between vectors of different length");
    let Some(u) = unit(o) else { return 0.0 };
    let v = unit(z).expect("reference direction with zero norm");
    angle_between_units(&u, &v)
}

/// Pairs below this size are associated by exhaustive comparison.
const BRUTE_FORCE_LIMIT: usize = 1 << 14;

/// For each point, the index of the target at minimal angle. Ties go to the
/// lowest target index.
pub fn associate<P, T>(points: &[P], targets: &[T]) -> Result<Vec<usize>>
where
    P: AsRef<[f64]> + Sync,
    T: AsRef<[f64]>,
{
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    let target_units: Vec<Vec<f64>> = targets
        .iter()
        .map(|t| unit(t.as_ref()).expect("reference direction with zero norm"))
        .collect();

    let work = points.len().saturating_mul(targets.len());
    if work <= BRUTE_FORCE_LIMIT {
        return Ok(points
            .iter()
            .map(|p| unit(p.as_ref()).map_or(0, |u| nearest_exhaustive(&u, &target_units)))
            .collect());
    }
    if targets.len() < 64 {
        return Ok(points
            .par_iter()
            .map(|p| unit(p.as_ref()).map_or(0, |u| nearest_exhaustive(&u, &target_units)))
            .collect());
    }

    let dims = target_units[0].len();
    let mut tree: KdTree<f64, usize, &[f64]> = KdTree::with_capacity(dims, target_units.len());
    for (i, t) in target_units.iter().enumerate() {
        tree.add(t.as_slice(), i).expect("finite reference direction");
    }
    Ok(points
        .par_iter()
        .map(|p| unit(p.as_ref()).map_or(0, |u| nearest_indexed(&tree, &u, &target_units)))
        .collect())
}

fn nearest_exhaustive(u: &[f64], targets: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_angle = f64::INFINITY;
    for (i, t) in targets.iter().enumerate() {
        let a = angle_between_units(u, t);
        if a < best_angle {
            best_angle = a;
            best = i;
        }
    }
    best
}

// On unit vectors the chord length is monotone in the angle, so the
// Euclidean nearest neighbor is the angular one. Everything within a small
// slack of the nearest chord is re-ranked by exact angle so ties resolve to
// the lowest index exactly as the exhaustive path does.
fn nearest_indexed(tree: &KdTree<f64, usize, &[f64]>, u: &[f64], targets: &[Vec<f64>]) -> usize {
    let nearest = tree
        .nearest(u, 1, &squared_euclidean)
        .expect("finite query point");
    let d2 = nearest[0].0;
    let radius = d2 * (1.0 + 1e-9) + 1e-15;
    let mut candidates: Vec<usize> = tree
        .within(u, radius, &squared_euclidean)
        .expect("finite query point")
        .into_iter()
        .map(|(_, &i)| i)
        .collect();
    candidates.sort_unstable();
    let mut best = candidates[0];
    let mut best_angle = f64::INFINITY;
    for i in candidates {
        let a = angle_between_units(u, &targets[i]);
        if a < best_angle {
            best_angle = a;
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn angle_examples() {
        assert!((angle(&[1.0, 0.0], &[0.0, 1.0]) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(angle(&[2.0, 2.0], &[0.5, 0.5]), 0.0);
        assert!((angle(&[1.0, 0.0], &[0.5, 0.5]) - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(angle(&[0.0, 0.0], &[0.3, 0.7]), 0.0);
    }

    #[test]
    fn associate_examples() {
        let axes = [vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(associate(&[vec![1.0, 0.0]], &axes).unwrap(), vec![0]);
        let three = [vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]];
        // angles: atan(0.4/0.6)=0.588, |π/4 − 0.588|=0.197, π/2 − 0.588=0.983
        assert_eq!(associate(&[vec![0.6, 0.4]], &three).unwrap(), vec![1]);
        assert_eq!(associate(&[vec![0.5, 0.5]], &axes).unwrap(), vec![0]);
    }

    #[test]
    fn associate_rejects_empty_targets() {
        let none: [Vec<f64>; 0] = [];
        assert!(matches!(associate(&[vec![1.0, 0.0]], &none), Err(Error::EmptyTargets)));
    }

    fn lattice_dirs(m: usize, h: u32) -> Vec<Vec<f64>> {
        crate::refgen::simplex_lattice(m, h)
            .unwrap()
            .into_iter()
            .map(|z| z.direction)
            .collect()
    }

    #[test]
    fn indexed_association_matches_exhaustive_on_lattices() {
        // Finer lattice points associated onto a coarser one: many exact ties.
        for (m, h) in [(2usize, 100u32), (3, 16), (4, 8)] {
            let targets = lattice_dirs(m, h);
            let points = lattice_dirs(m, 2 * h);
            assert!(points.len() * targets.len() > BRUTE_FORCE_LIMIT && targets.len() >= 64);
            let fast = associate(&points, &targets).unwrap();
            let units: Vec<Vec<f64>> = targets.iter().map(|t| unit(t).unwrap()).collect();
            let slow: Vec<usize> = points
                .iter()
                .map(|p| nearest_exhaustive(&unit(p).unwrap(), &units))
                .collect();
            assert_eq!(fast, slow, "M={m} H={h}");
        }
    }

    proptest! {
        #[test]
        fn angle_is_scale_invariant(
            o in prop::collection::vec(0.01f64..10.0, 3),
            z in prop::collection::vec(0.01f64..1.0, 3),
            c in 0.01f64..100.0,
        ) {
            let scaled: Vec<f64> = o.iter().map(|v| v * c).collect();
            prop_assert!((angle(&o, &z) - angle(&scaled, &z)).abs() < 1e-12);
            let a = angle(&o, &z);
            prop_assert!((0.0..=FRAC_PI_2 + 1e-15).contains(&a));
        }

        #[test]
        fn association_is_scale_invariant(
            pts in prop::collection::vec(prop::collection::vec(0.01f64..10.0, 3), 1..20),
            c in 0.1f64..10.0,
        ) {
            let targets = lattice_dirs(3, 4);
            let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| v * c).collect()).collect();
            prop_assert_eq!(associate(&pts, &targets).unwrap(), associate(&scaled, &targets).unwrap());
        }
    }
}
