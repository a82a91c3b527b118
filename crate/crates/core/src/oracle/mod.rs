//! Ground truth for the refinement engine: exhaustive link isomorphism and
//! bounded-depth unrolling trees.

mod iso;
mod unroll;

pub use iso::{canonical_code, link_isomorphic, link_isomorphic_bounded, CanonicalCode, DEFAULT_ORACLE_BOUND};
pub use unroll::{tree_equal, unroll, TreeKind, UnrollTree};
