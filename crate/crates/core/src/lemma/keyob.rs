//! From a comb beside a vertex of a rainbow (k choose 2)-free blockade to a
//! rainbow (k−1 choose 2)-free minor.

use thiserror::Error;

use crate::blockade::Blockade;
use crate::comb::{self, Comb, CombDefect};
use crate::graph::Graph;
use crate::k2::{self, K2Caps, K2Error, RainbowReading, Violation, WitnessOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KeyobError {
    #[error("k must be at least 2, got {0}")]
    SmallK(usize),
    #[error("vertex {0} lies in no block")]
    OutsideBlockade(usize),
    #[error("input blockade is not rainbow (k choose 2)-free: tuple {:?}", .0.tuple)]
    NotRainbowFree(Violation),
    #[error("comb is not a comb in (E_a ∩ A, ¬E_a ∩ A): {0:?}")]
    InvalidComb(CombDefect),
    #[error("tooth {0} meets the block containing the vertex")]
    ToothInHomeBlock(usize),
    #[error("teeth blockade is not a minor of the input blockade")]
    NotMinor,
    #[error("output is not rainbow (k-1 choose 2)-free: tuple {:?}", .0.tuple)]
    PostconditionFailed(Violation),
    #[error(transparent)]
    Oracle(#[from] K2Error),
}

/// Checks every hypothesis, returns the teeth blockade, and confirms by the
/// exhaustive oracle that it is rainbow (k−1 choose 2)-free.
pub fn comb_to_rainbow_minor(
    g: &Graph,
    a_blockade: &Blockade,
    k: usize,
    a: usize,
    c: &Comb,
    opts: WitnessOptions,
    caps: K2Caps,
) -> Result<Blockade, KeyobError> {
    if k < 2 {
        return Err(KeyobError::SmallK(k));
    }
    let home = a_blockade
        .block_of(a)
        .ok_or(KeyobError::OutsideBlockade(a))?;
    let reading = RainbowReading::DistinctBlocks;
    if let Some(v) = k2::is_rainbow_k2_free(g, a_blockade, k, opts, reading, caps)? {
        return Err(KeyobError::NotRainbowFree(v));
    }
    let all = a_blockade.union();
    let cs = g.neighbors(a).intersection(&all);
    let mut ds = all.difference(g.neighbors(a));
    ds.remove(a);
    comb::check_comb_in(g, c, 1, &cs, &ds).map_err(KeyobError::InvalidComb)?;
    if let Some(i) = c
        .teeth
        .iter()
        .position(|t| !t.is_disjoint(a_blockade.block(home)))
    {
        return Err(KeyobError::ToothInHomeBlock(i));
    }
    let teeth = Blockade::from_sets(g.n(), c.teeth.clone()).map_err(|_| KeyobError::NotMinor)?;
    if !teeth.is_minor_of(a_blockade) {
        return Err(KeyobError::NotMinor);
    }
    if k > 2 {
        if let Some(v) = k2::is_rainbow_k2_free(g, &teeth, k - 1, opts, reading, caps)? {
            return Err(KeyobError::PostconditionFailed(v));
        }
    }
    Ok(teeth)
}
