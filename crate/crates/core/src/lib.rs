//! Exact stable commutator length for Baumslag–Solitar groups
//! `BS(m, l) = <a, t | t a^m t^-1 = a^l>`.
//!
//! The pipeline runs through these modules:
//!
//! * [`words`]: parsing, Britton reduction, cyclic reduction and conjugacy
//!   normal forms.
//! * [`turn_graph`]: the weighted turn graph of a cyclically reduced word.
//! * [`circuits`]: embedded circuits and potential disks, the LP basis.
//! * [`ratlp`]: an exact rational simplex solver.
//! * [`engine`]: the polytope program, the lower bound `L(g)`, exact values
//!   for alternating words, and the overall classifier.
//! * [`surface`]: band-surface certificates and the extremal-surface test.
//! * [`tree_qm`]: Bass–Serre tree patterns, counting quasimorphisms and the
//!   zero-or-at-least-1/12 gap decision.

pub mod circuits;
pub mod engine;
mod error;
mod lattice;
pub mod ratlp;
pub mod surface;
pub mod tree_qm;
pub mod turn_graph;
pub mod words;

pub use circuits::{EmbeddedCircuit, PotentialDisk};
pub use engine::{Caps, Classification, SclResult};
pub use error::{Error, Result};
pub use ratlp::{LinearProgram, LpOutcome, LpStatus, Rational};
pub use surface::SurfaceCertificate;
pub use tree_qm::{AxisPattern, GapCertificate, GapOutcome, SegmentPattern, TurnInvariant};
pub use turn_graph::{TurnGraph, TurnKind};
pub use words::{CyclicWord, GroupParams, Word};
