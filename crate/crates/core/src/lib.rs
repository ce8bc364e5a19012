//! Sandpile torsors of oriented regular matroids.
//!
//! The crate builds regular matroids from totally unimodular matrices,
//! enumerates signed circuits and cocircuits, decides the triangulating and
//! acyclic conditions on circuit-cocircuit signatures, computes the sandpile
//! group and its canonical action on circuit-cocircuit reversal classes, and
//! transports that action to bases through the BBY bijection. The [`bby`]
//! module checks the resulting torsor against deletion, contraction,
//! connected components and duality.

pub mod bby;
pub mod budget;
pub mod chains;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod matroid;
pub mod planar;
pub mod sandpile;
pub mod signatures;
pub mod snf;
pub mod sweep;

pub use budget::Budget;
pub use chains::{Arc, Chain, ElementSet, FourState, Fourientation, GroundSet, Orientation, Sign, SimpleChain};
pub use error::{Error, Result};
pub use matroid::{Basis, ChainKind, GraphEdge, MinorKind, RegularMatroid, TuCheck};
pub use sandpile::{GroupElement, ReversalClasses, SandpileGroup};
pub use signatures::{Signature, SignaturePair};
