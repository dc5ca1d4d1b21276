//! Boundary Lefschetz fibrations on 4-manifolds as combinatorial base
//! diagrams.
//!
//! * [`homology`]: cycles in `H₁(T²; Z)`, Dehn twists and dual pairs.
//! * [`diagram`]: base diagrams, validation, corner sums, self-sums and
//!   singularity trades.
//! * [`catalog`]: building blocks from torus actions and the `X`/`Y`
//!   connected-sum families, cross-checked against Betti numbers.
//! * [`chartforms`]: residues, Pfaffians and stable-GCS conditions for
//!   constant elliptic 2-forms at a `D[2]` point.
//! * [`io`]: canonical JSON documents and SVG rendering.
//! * [`explore`]: random surgery sequences for property testing and batch
//!   exploration.

pub mod catalog;
pub mod chartforms;
pub mod diagram;
pub mod explore;
pub mod homology;
pub mod io;

pub use catalog::{CatalogEntry, CatalogError, EntryName, InvariantReport};
pub use chartforms::{EllipticChartForm, LogChartForm, ResidueSet};
pub use diagram::{
    BoundaryCircle, ComponentKind, CornerRef, DiagramError, DivisorComponent, DualPairEvidence,
    FibrationDiagram, GcsMode, LefschetzPoint, LefschetzRef, Parity,
};
pub use homology::{Cycle, HomologyError, MappingClass};
