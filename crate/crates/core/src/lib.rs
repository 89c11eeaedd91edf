//! Many-objective evolutionary optimization guided by an adaptive, layered
//! archive of reference vectors.
//!
//! Two engines cooperate during a run:
//!
//! * the selection engine ([`selection::cascade_cluster`]) picks the next
//!   population by angular clustering around the participating reference
//!   vectors, and reports which of them are currently *active*;
//! * the adaptation engine ([`adaptation::adapt`]) grows or shrinks the
//!   participating set by enabling vectors in finer or coarser layers of a
//!   [`refgen::ReferenceArchive`], so the number of active vectors tracks
//!   the population size.
//!
//! An [`archive::IndividualArchive`] holds the cluster centers of the latest
//! selection pass and is what the adaptation engine looks at.
//!
//! The [`runner`] module wires everything into the generational loop and the
//! multi-seed experiment harness used by the `maoea` binary.

pub mod adaptation;
pub mod archive;
pub mod dominance;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod problems;
pub mod refgen;
pub mod runner;
pub mod selection;
pub mod simharness;
pub mod types;
pub mod variation;

pub use error::{Error, Result};
pub use types::{Bounds, IdealPoint, Individual, ObjectiveVector, ReferenceVector};
