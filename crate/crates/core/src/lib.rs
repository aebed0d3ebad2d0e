//! Exact combinatorics of perfect pairings on a signed ground set.
//!
//! The library computes the same family of structure constants four ways and
//! cross-checks them:
//!
//! * exhaustive scans over pairings and double cosets ([`hypermaps`]),
//! * a character-theoretic evaluation ([`characters`]),
//! * a closed-form count of permuted forests ([`formula`]),
//! * an explicit bijection between partitioned hypermaps and permuted
//!   forests ([`bijection`]).
//!
//! All arithmetic is exact (big integers and big rationals); tables are keyed
//! by [`partitions::Partition`] in a fixed canonical order so output is
//! byte-deterministic.

pub mod bijection;
pub mod characters;
pub mod degree;
pub mod exec;
pub mod formula;
pub mod forests;
pub mod hypermaps;
pub mod pairings;
pub mod partitions;
pub mod series;

pub use degree::DegreeArray;
pub use exec::Exec;
pub use pairings::{Pairing, Permutation};
pub use partitions::Partition;
