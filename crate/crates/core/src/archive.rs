//! The individual archive: the cluster centers of the latest selection pass,
//! which track the shape of the current Pareto front.

use std::fmt::Write as _;

use crate::types::Individual;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndividualArchive {
    members: Vec<Individual>,
}

impl IndividualArchive {
    pub fn new() -> Self {
        IndividualArchive::default()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Replaces the members with `centers`.
    ///
    /// The centers come from a selection pass whose pool already contained
    /// the previous members, so they are exactly the survivors.
    pub fn maintain(&mut self, centers: Vec<Individual>) {
        self.members = centers;
    }

    /// One objective vector per row, no header.
    pub fn to_csv(&self) -> String {
        objectives_csv(&self.members)
    }
}

pub(crate) fn objectives_csv(individuals: &[Individual]) -> String {
    let mut out = String::new();
    for ind in individuals {
        let row: Vec<String> = ind.objectives.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maintain_replaces_members() {
        let c1 = Individual::new(vec![0.1], vec![1.0, 0.0]);
        let c2 = Individual::new(vec![0.9], vec![0.0, 1.0]);
        let mut ia = IndividualArchive::new();
        ia.maintain(vec![c1.clone(), c2.clone()]);
        assert_eq!(ia.members(), &[c1.clone(), c2]);
        ia.maintain(vec![c1.clone()]);
        assert_eq!(ia.members(), &[c1]);
        assert_eq!(ia.to_csv(), "1,0\n");
    }
}
