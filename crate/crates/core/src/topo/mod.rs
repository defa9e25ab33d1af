//! Braids, their closures and link invariants.

pub mod bracket;
pub mod braid;
pub mod invariants;
pub mod triple;
pub(crate) mod tl;
