//! Pareto dominance and the frontier / non-frontier split.

use std::cmp::Ordering;

use crate::types::Individual;

/// `a` dominates `b`: no worse in every objective and strictly better in at
/// least one. Comparison is exact.
///
/// Panics if the vectors differ in length.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "dominance between vectors of different length");
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Marks each point that no other point dominates.
///
/// Points are visited in lexicographic order: a dominator always precedes
/// what it dominates, so each point only needs checking against the frontier
/// found so far (a dominated dominator implies a frontier dominator by
/// transitivity). Objective-space duplicates never dominate each other.
pub fn frontier_mask<T: AsRef<[f64]>>(points: &[T]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lexicographic(points[i].as_ref(), points[j].as_ref()));

    let mut mask = vec![false; points.len()];
    let mut frontier: Vec<usize> = Vec::new();
    for i in order {
        let p = points[i].as_ref();
        if !frontier.iter().any(|&f| dominates(points[f].as_ref(), p)) {
            frontier.push(i);
            mask[i] = true;
        }
    }
    mask
}

/// Splits a population into its nondominated members and the rest, both in
/// input order.
pub fn nondominated_split(pop: &[Individual]) -> (Vec<Individual>, Vec<Individual>) {
    let objectives: Vec<&[f64]> = pop.iter().map(|ind| ind.objectives.as_slice()).collect();
    let mask = frontier_mask(&objectives);
    let mut frontier = Vec::new();
    let mut rest = Vec::new();
    for (ind, is_front) in pop.iter().zip(mask) {
        if is_front {
            frontier.push(ind.clone());
        } else {
            rest.push(ind.clone());
        }
    }
    (frontier, rest)
}
