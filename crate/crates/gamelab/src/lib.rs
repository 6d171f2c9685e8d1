//! Exact solvers for multi-structural (MS) and Ehrenfeucht-Fraisse (EF)
//! games on finite relational structures, deterministic builders for the
//! CFI-style reduction gadgets, the DOMSET and Max-Q3SAT reduction
//! compilers, scripted strategy certificates, and the two game-driven
//! approximation algorithms.

pub mod ef;
pub mod gadgets;
pub mod limits;
pub mod ms;
pub mod reductions;
pub mod scripts;

pub use ef::{ef_forced, ef_winner, EfPosition};
pub use limits::{SearchLimits, SearchStats, Winner};
pub use ms::{discard, ms_winner, MsPosition, SpoilerMove};
