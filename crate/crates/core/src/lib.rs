//! Exact computation of the stable, semistable and torus-polystable loci of
//! a linearized action of a classical semisimple group on the projective
//! space of a representation.
//!
//! Given a root system of type A–D and a representation described by an
//! expression over irreducibles, the crate computes the finite sets of
//! maximal non-stable states, maximal unstable states, and polystable
//! strata that determine stability through the Hilbert–Mumford criterion.
//! All arithmetic is exact (arbitrary-precision integers and rationals).

pub mod exact;
pub mod io;
pub mod oracle;
pub mod roots;
pub mod stability;
pub mod weights;

pub use exact::{Int, IntVector, Rational};
pub use roots::{build, RootFamily, RootSystemData, RootSystemSpec, WeylElement};
pub use stability::{Problem, StabilityOptions, State};
pub use weights::{parse_rep_expr, RepExpr, WeightSystem};
