//! Long Hop networks: Cayley graphs over Z2^d whose generator sets come from
//! binary linear codes, with exact bisection via Walsh-Hadamard analysis.

pub mod bisection;
pub mod compare;
pub mod constructions;
pub mod db;
pub mod designer;
pub mod ecc;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod hoplist;
pub mod walsh;

pub use error::{LhError, Result};
pub use graph::{AvgHops, GeneratorSet};
