//! Empirical comparison of the tests over corpora of links.

mod corpus;
mod magic;
mod power;
mod trees;

pub use corpus::{builtin_fixtures, fixture_manifest, Corpus, Expected, Fixture, Instance, NamedGraph, RandomCorpus};
pub use magic::{magic_square_search, square_graph, two_common_neighbors, MagicSearch, MagicWitness, Square, SquarePool};
pub use power::{
    expected_relations, power_check, run_kind, Implication, KindOutcome, OracleSoundness, PowerOptions,
    PowerReport, Relation, Witness,
};
pub use trees::{tree_correspondence, tree_test, TreeCheck, TreeReport};
