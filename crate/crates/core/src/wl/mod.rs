//! Color refinement over nodes and ordered node pairs.

mod color;
mod engine;
mod interner;
mod kind;
mod session;

pub use color::{ColorMap, Unit};
pub use engine::refinement_checks;
pub use interner::{Interner, PairInit, Prev, Signature, ABSENT};
pub use kind::{Masking, TestKind};
pub use session::{
    cn_from_fwl2_signature, indistinguishable, indistinguishable_with, init_colors,
    init_colors_with, refine_step, refine_to_stable, refine_with, RefinementResult, Verdict,
};

pub(crate) use engine::prepared_graph;
pub(crate) use session::{edge_edge_entries, Member, Session};

use crate::error::{Error, Result};

/// Default limit on `n²` for the dense pair kinds in featurization.
pub const DEFAULT_DENSE_GATE: usize = 40_000;

/// Refuses dense kinds whose `n²` state would exceed `gate` pairs.
pub fn check_dense_gate(kind: TestKind, n: usize, gate: usize) -> Result<()> {
    if kind.is_dense() && n.saturating_mul(n) > gate {
        return Err(Error::DenseGate { kind, n, gate });
    }
    Ok(())
}

#[cfg(test)]
mod tests;
