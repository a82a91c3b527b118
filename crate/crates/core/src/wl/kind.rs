use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The refinement tests.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestKind {
    WL1,
    WL1_Label01,
    WL2,
    FWL2,
    WL2_Local,
    FWL2_Local,
}

impl TestKind {
    pub const ALL: [TestKind; 6] = [
        TestKind::WL1,
        TestKind::WL1_Label01,
        TestKind::WL2,
        TestKind::FWL2,
        TestKind::WL2_Local,
        TestKind::FWL2_Local,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::WL1 => "WL1",
            TestKind::WL1_Label01 => "WL1_Label01",
            TestKind::WL2 => "WL2",
            TestKind::FWL2 => "FWL2",
            TestKind::WL2_Local => "WL2_Local",
            TestKind::FWL2_Local => "FWL2_Local",
        }
    }

    /// Node-colored (1-WL) rather than pair-colored.
    pub fn is_node_kind(self) -> bool {
        matches!(self, TestKind::WL1 | TestKind::WL1_Label01)
    }

    /// Pair state over all `n²` ordered pairs.
    pub fn is_dense(self) -> bool {
        matches!(self, TestKind::WL2 | TestKind::FWL2)
    }

    pub fn is_local(self) -> bool {
        matches!(self, TestKind::WL2_Local | TestKind::FWL2_Local)
    }

    pub fn is_folklore(self) -> bool {
        matches!(self, TestKind::FWL2 | TestKind::FWL2_Local)
    }

    /// Default iteration cap: one more than the number of possible splits.
    pub fn default_cap(self, n: usize) -> usize {
        if self.is_node_kind() {
            n + 2
        } else {
            n * n + 2
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Whether a designated target pair has its edge hidden during refinement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Masking {
    /// The target edge is removed from the graph and its indicator is 0.
    #[default]
    Masked,
    /// The graph is used as given; distinguishes structure, not prediction.
    Unmasked,
}
