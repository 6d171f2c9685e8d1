//! Finite relational structures with colored pebbles, plus the first-order
//! machinery built on top of them: model checking, separation testing, and
//! bounded synthesis of separating formulas.
//!
//! Everything in this crate is an immutable value; all operations are pure.

pub mod bounds;
pub mod digraph;
pub mod error;
pub mod formula;
pub mod io;
pub mod perm;
pub mod qbf;
pub mod structure;
pub mod synth;

pub use error::CoreError;
pub use structure::{matching_pair, Element, PebbledStructure, Schema, Structure};
