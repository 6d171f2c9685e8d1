//! Independent brute-force references: dominating sets, QBF game values, and
//! unmemoized game solvers. These are the trust anchors for the production
//! solvers and never consult them; the only shared code is the structure
//! substrate.

pub mod domset;
pub mod naive_ef;
pub mod naive_ms;
pub mod qbf;

pub use domset::{has_domset, min_domset_bruteforce};
pub use naive_ef::naive_ef;
pub use naive_ms::naive_ms_subset;
pub use qbf::{maxqsat_value, qbf_true};

/// Three-valued verdict shared by the reference solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefWinner {
    Spoiler,
    Duplicator,
    Unknown,
}
