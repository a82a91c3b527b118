//! Link-level Weisfeiler-Lehman refinement.
//!
//! The crate implements color refinement over nodes (1-WL) and over ordered
//! node pairs (plain and folklore 2-WL, each in a global and an
//! edge-restricted local flavor), ground-truth oracles to validate them, a
//! harness comparing their discriminating power over a corpus, and a small
//! link-prediction pipeline built on their colors.
//!
//! ```
//! use pairwl::{generate, wl::{indistinguishable, TestKind}};
//!
//! let k2 = generate::complete(2);
//! let (two_k2, _) = k2.disjoint_union(&k2);
//! // 1-WL cannot see the size of the graph around a link; 2-WL can.
//! let wl1 = indistinguishable(TestKind::WL1, (0, 1), &k2, (0, 1), &two_k2, None).unwrap();
//! let wl2 = indistinguishable(TestKind::WL2, (0, 1), &k2, (0, 1), &two_k2, None).unwrap();
//! assert_eq!(wl1.distinguished_at, None);
//! assert_eq!(wl2.distinguished_at, Some(1));
//! ```

pub mod error;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod linkpred;
pub mod oracle;
pub mod split;
pub mod wl;

pub use error::{Error, Result};
pub use graph::{load_edgelist, parse_labels, parse_pair, Graph, Pair};
pub use split::{split_links, LinkSplit};
