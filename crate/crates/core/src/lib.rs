//! Exact-arithmetic combinatorics of triples of algebra faces: set-partition
//! machinery, face labelings and the interval-bi-noncrossing families they
//! induce, their lattice structure and Möbius functions, cumulants and
//! moment/cumulant transforms, a truncated Fock-space operator model that
//! realizes independent triples, and the associated central limit law.
//!
//! Everything is computed over exact rationals; the verification suites
//! assert identities as exact equalities, never within a tolerance.

pub mod chi;
pub mod climit;
pub mod cumulants;
mod error;
pub mod fock;
pub mod lattice;
pub mod mobius;
pub mod partitions;
pub mod suites;

pub use chi::{
    catalan, chi_order, enumerate_bnc, enumerate_ibnc, enumerate_ibnc_capped, is_chi_interval,
    is_chi_noncrossing, is_ibnc, render_diagram, ChiMap, ChiOrder, Face,
};
pub use error::{Error, Result};
pub use lattice::{c_positions, compose, decompose, ibnc_count_formula, lattice_for, IbncLattice};
pub use partitions::{
    enumerate_partitions, enumerate_partitions_capped, Partition, SubPartition,
    DEFAULT_ENUMERATION_CAP,
};
