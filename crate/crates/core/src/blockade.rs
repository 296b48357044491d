//! Blockades: ordered sequences of pairwise disjoint nonempty vertex blocks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockadeError {
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("vertex {vertex} appears in blocks {first} and {second}")]
    Overlap {
        vertex: usize,
        first: usize,
        second: usize,
    },
    #[error("vertex {vertex} is outside the host graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("blockade has no blocks")]
    NoBlocks,
    #[error("block index {0} is out of range")]
    BadIndex(usize),
    #[error("block index {0} selected twice")]
    DuplicateIndex(usize),
    #[error("contraction supplies {got} blocks for a blockade of length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("contracted block {0} is not a subset of the original block")]
    NotSubset(usize),
    #[error("the two sides of a pair must be nonempty and disjoint")]
    BadPair,
    #[error("malformed blockade file: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blockade {
    n: usize,
    blocks: Vec<VertexSet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Complete,
    Anticomplete,
}

/// On-disk form: `{"blocks": [[v, ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockadeFile {
    pub blocks: Vec<Vec<usize>>,
}

impl Blockade {
    /// Builds a blockade over a host graph with `n` vertices.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, BlockadeError> {
        let sets = blocks
            .into_iter()
            .map(|b| {
                VertexSet::try_from_iter(n, b)
                    .map_err(|vertex| BlockadeError::OutOfRange { vertex, n })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_sets(n, sets)
    }

    pub fn from_sets(n: usize, blocks: Vec<VertexSet>) -> Result<Self, BlockadeError> {
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for (i, b) in blocks.iter().enumerate() {
            assert_eq!(b.capacity(), n, "block over a different host");
            if b.is_empty() {
                return Err(BlockadeError::EmptyBlock(i));
            }
            for v in b {
                if let Some(first) = owner[v] {
                    return Err(BlockadeError::Overlap {
                        vertex: v,
                        first,
                        second: i,
                    });
                }
                owner[v] = Some(i);
            }
        }
        Ok(Blockade { n, blocks })
    }

    pub fn host_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &VertexSet {
        &self.blocks[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(VertexSet::len).collect()
    }

    /// Smallest block size.
    pub fn width(&self) -> Result<usize, BlockadeError> {
        self.blocks
            .iter()
            .map(VertexSet::len)
            .min()
            .ok_or(BlockadeError::NoBlocks)
    }

    /// All vertices lying in some block.
    pub fn union(&self) -> VertexSet {
        let mut u = VertexSet::empty(self.n);
        self.blocks.iter().for_each(|b| u.union_with(b));
        u
    }

    /// Index of the block containing `v`.
    pub fn block_of(&self, v: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(v))
    }

    pub fn is_equicardinal(&self) -> bool {
        self.blocks.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// The blocks at the given 0-based positions, kept in their original order.
    pub fn sub_blockade(&self, indices: &[usize]) -> Result<Blockade, BlockadeError> {
        if indices.is_empty() {
            return Err(BlockadeError::NoBlocks);
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(BlockadeError::DuplicateIndex(w[0]));
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.len()) {
            return Err(BlockadeError::BadIndex(bad));
        }
        Ok(Blockade {
            n: self.n,
            blocks: sorted.iter().map(|&i| self.blocks[i].clone()).collect(),
        })
    }

    /// Replaces each block by a nonempty subset of itself.
    pub fn contraction(&self, shrunk: Vec<VertexSet>) -> Result<Blockade, BlockadeError> {
        if shrunk.len() != self.len() {
            return Err(BlockadeError::LengthMismatch {
                expected: self.len(),
                got: shrunk.len(),
            });
        }
        for (i, (s, b)) in shrunk.iter().zip(&self.blocks).enumerate() {
            if s.is_empty() {
                return Err(BlockadeError::EmptyBlock(i));
            }
            if !s.is_subset(b) {
                return Err(BlockadeError::NotSubset(i));
            }
        }
        Ok(Blockade {
            n: self.n,
            blocks: shrunk,
        })
    }

    /// Contraction keeping the `w` lowest vertices of every block.
    pub fn truncate_blocks(&self, w: usize) -> Blockade {
        assert!(w >= 1);
        Blockade {
            n: self.n,
            blocks: self.blocks.iter().map(|b| b.take_lowest(w)).collect(),
        }
    }

    /// Whether `self` is a contraction of a sub-blockade of `b`. Blocks of `b`
    /// are disjoint, so each block of `self` fits into at most one of them and a
    /// greedy left-to-right match decides the question.
    pub fn is_minor_of(&self, b: &Blockade) -> bool {
        if self.n != b.n {
            return false;
        }
        let mut j = 0;
        for blk in &self.blocks {
            while j < b.len() && !blk.is_subset(&b.blocks[j]) {
                j += 1;
            }
            if j == b.len() {
                return false;
            }
            j += 1;
        }
        true
    }

    pub fn to_file(&self) -> BlockadeFile {
        BlockadeFile {
            blocks: self.blocks.iter().map(VertexSet::to_vec).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("blockade serializes")
    }

    /// Parses and validates a blockade file against a host on `n` vertices.
    pub fn from_json(text: &str, n: usize) -> Result<Blockade, BlockadeError> {
        let file: BlockadeFile =
            serde_json::from_str(text).map_err(|e| BlockadeError::Parse(e.to_string()))?;
        for (i, b) in file.blocks.iter().enumerate() {
            let mut s = b.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(BlockadeError::Parse(format!(
                    "block {i} lists a vertex twice"
                )));
            }
        }
        Blockade::new(n, file.blocks)
    }
}

impl Serialize for Blockade {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_file().serialize(serializer)
    }
}

/// Classifies the pair `(a, b)` as complete, anticomplete, or mixed (`None`).
pub fn is_pure_pair(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
) -> Result<Option<Purity>, BlockadeError> {
    if a.is_empty() || b.is_empty() || !a.is_disjoint(b) {
        return Err(BlockadeError::BadPair);
    }
    let mut any = false;
    let mut all = true;
    for v in a {
        let hit = g.neighbors(v).intersection_len(b);
        any |= hit > 0;
        all &= hit == b.len();
    }
    Ok(match (any, all) {
        (_, true) => Some(Purity::Complete),
        (false, _) => Some(Purity::Anticomplete),
        _ => None,
    })
}

/// The pattern graph on block indices, when every pair of blocks is pure.
pub fn pattern(g: &Graph, b: &Blockade) -> Option<Graph> {
    let t = b.len();
    let mut edges = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            match is_pure_pair(g, &b.blocks[i], &b.blocks[j])
                .expect("blocks are disjoint and nonempty")?
            {
                Purity::Complete => edges.push((i, j)),
                Purity::Anticomplete => {}
            }
        }
    }
    Some(Graph::new(t, &edges).expect("indices in range"))
}

/// Whether all blocks are pairwise anticomplete.
pub fn is_pairwise_anticomplete(g: &Graph, blocks: &[VertexSet]) -> bool {
    blocks.iter().enumerate().all(|(i, bi)| {
        blocks[i + 1..]
            .iter()
            .all(|bj| bi.iter().all(|v| g.neighbors(v).is_disjoint(bj)))
    })
}
