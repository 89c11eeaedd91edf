//! Value types shared by every engine.

use serde::{Deserialize, Serialize};

/// Raw objective values of one evaluation, one entry per objective.
pub type ObjectiveVector = Vec<f64>;

/// A decision vector together with its evaluated objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub solution: Vec<f64>,
    pub objectives: ObjectiveVector,
}

impl Individual {
    pub fn new(solution: Vec<f64>, objectives: ObjectiveVector) -> Self {
        Individual {
            solution,
            objectives,
        }
    }

    /// Bit pattern of the decision vector, used to drop exact duplicates
    /// from selection pools.
    pub(crate) fn solution_key(&self) -> Vec<u64> {
        self.solution.iter().map(|v| v.to_bits()).collect()
    }
}

/// A point of the uniform simplex lattice.
///
/// `coords` are the integer numerators over the owning layer's density `H`;
/// `direction` is `coords / H` and therefore has unit L1 norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceVector {
    pub coords: Vec<u32>,
    pub direction: Vec<f64>,
}

impl ReferenceVector {
    pub fn from_coords(coords: Vec<u32>, density: u32) -> Self {
        let h = f64::from(density);
        let direction = coords.iter().map(|&c| f64::from(c) / h).collect();
        ReferenceVector { coords, direction }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl AsRef<[f64]> for ReferenceVector {
    fn as_ref(&self) -> &[f64] {
        &self.direction
    }
}

/// Element-wise minimum over every objective vector observed so far.
///
/// Angles and PDM values are computed on objectives translated by this point,
/// which makes them nonnegative regardless of the problem's raw range.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealPoint {
    values: Vec<f64>,
}

impl IdealPoint {
    /// An ideal point that has not observed anything yet (all `+inf`).
    pub fn new(m: usize) -> Self {
        IdealPoint {
            values: vec![f64::INFINITY; m],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        IdealPoint { values }
    }

    pub fn from_points<'a, I>(m: usize, points: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut ideal = IdealPoint::new(m);
        for p in points {
            ideal.observe(p);
        }
        ideal
    }

    pub fn observe(&mut self, objectives: &[f64]) {
        assert_eq!(objectives.len(), self.values.len(), "objective count mismatch");
        for (v, &o) in self.values.iter_mut().zip(objectives) {
            if o < *v {
                *v = o;
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `objectives - ideal`. Coordinates of an ideal point that has not yet
    /// observed anything are treated as zero.
    pub fn translate(&self, objectives: &[f64]) -> Vec<f64> {
        assert_eq!(objectives.len(), self.values.len(), "objective count mismatch");
        objectives
            .iter()
            .zip(&self.values)
            .map(|(&o, &z)| if z.is_finite() { o - z } else { o })
            .collect()
    }
}

/// Per-variable box constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        assert!(lower.iter().zip(&upper).all(|(l, u)| l <= u), "empty interval");
        Bounds { lower, upper }
    }

    pub fn unit(d: usize) -> Self {
        Bounds::new(vec![0.0; d], vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    pub fn clamp(&self, j: usize, v: f64) -> f64 {
        v.clamp(self.lower[j], self.upper[j])
    }
}
