//! Blockades, combs, cographs and rainbow (k choose 2)-freeness on finite graphs,
//! together with brute-force oracles and an instrumented comb-extraction procedure.

pub mod blockade;
pub mod cograph;
pub mod comb;
pub mod graph;
pub mod harness;
pub mod k2;
pub mod lemma;
pub mod numeric;
pub mod oracle;
pub mod set;

pub use cograph::{Cotree, SearchLimits, TauParams, TauVerdict};
pub use graph::{Graph, GraphError};
pub use set::VertexSet;
