//! Ground-truth checks: exhaustive small-graph oracles, spectra, collision
//! search, avalanche and bit statistics, and operation counts.

pub mod collisions;
pub mod opcount;
pub mod oracle;
pub mod spectrum;
pub mod stats;

pub use collisions::{
    brute_force_collisions, direction_collisions, mirror_blocks, mirror_direction, mirror_message,
    CollisionKind, CollisionPair, CollisionReport,
};
pub use opcount::{count_ops, count_ops_blocks, formula_per_bit, per_bit_with_tag_reduction, OpCountReport};
pub use oracle::{build_oracle, component_labels, measure_girth, structure_checks, GraphOracle, StructureReport};
pub use spectrum::{spectrum, SpectrumReport};
pub use stats::{avalanche, bit_statistics, pack_bits, stream_tests, AvalancheReport, BitStatsReport, StreamReport};
