//! Exact computation in the single-vertex rank-2 graph semigroups F_theta^+.
//!
//! * [`semigroup`]: words, refactoring, the induced permutation theta'.
//! * [`lattice`]: sublattices of Z^2, quotient groups and their characters.
//! * [`reps`]: group-construction representations and the constructions producing them.
//! * [`graphs`]: labeled two-colored graphs, dilation, classification.
//! * [`search`]: isomorphism classes, commuting pairs, aperiodicity evidence.

pub mod error;
pub mod fixtures;
pub mod graphs;
pub mod lattice;
pub mod reps;
pub mod search;
pub mod semigroup;
pub mod tails;

pub use error::{Error, Result};
pub use lattice::{Angle, QuotientGroup, Sublattice};
pub use semigroup::{Color, Degree, Letter, Theta, Word};
