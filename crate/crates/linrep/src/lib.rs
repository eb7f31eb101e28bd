//! Exhaustive generation of linearly representable polymatroids subject to
//! linear rank constraints, with applications to network coding rate
//! regions, secret sharing and rank-vector representability.

pub mod ff;
pub mod subspace;
pub mod group;
pub mod perm;
pub mod polymatroid;
pub mod constraints;
pub mod pmap;
pub mod generation;
pub mod engine;
pub mod catalog;
pub mod region;
pub mod transform;
