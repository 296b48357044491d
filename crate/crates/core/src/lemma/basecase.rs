//! Pure blockades with a cograph pattern from rainbow (2 choose 2)-free blockades.

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use super::constants::d_s;
use crate::blockade::{self, Blockade};
use crate::cograph::{self, Cotree};
use crate::graph::Graph;
use crate::k2::{self, K2Caps, K2Error, RainbowReading, Violation, WitnessOptions};
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaseCaseError {
    #[error("s must be at least 1")]
    ZeroS,
    #[error("blockade has length {len}, needs at least {need}")]
    TooShort { len: usize, need: u64 },
    #[error("blockade is not rainbow (2 choose 2)-free: tuple {:?}", .0.tuple)]
    NotRainbowFree(Violation),
    #[error(transparent)]
    Oracle(#[from] K2Error),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PureBlockade {
    pub blockade: Blockade,
    /// Cotree of the pattern, leaves are block indices.
    pub pattern: Cotree,
    /// Width of the input blockade.
    pub input_width: usize,
    pub divisor: u64,
}

impl PureBlockade {
    /// Re-checks purity, the cograph pattern, and the length and width claims.
    pub fn verify(&self, g: &Graph, s: u32) -> bool {
        let Some(p) = blockade::pattern(g, &self.blockade) else {
            return false;
        };
        let Ok(Some(_)) = cograph::is_cograph(&p) else {
            return false;
        };
        let Ok(evaluated) = self.pattern.evaluate(self.blockade.len()) else {
            return false;
        };
        let w = self.blockade.width().unwrap_or(0);
        evaluated == p
            && self.blockade.len() == 1 << s
            && (w as u128) * (self.divisor as u128) >= self.input_width as u128
    }
}

/// Builds a pure blockade of length `2^s` with a cograph pattern and width at
/// least `W / D_s`, using the first `D_s` blocks of `b`. The freeness
/// precondition is checked by the exhaustive oracle first.
pub fn pure_blockade_from_rainbow22(
    g: &Graph,
    b: &Blockade,
    s: u32,
    caps: K2Caps,
) -> Result<PureBlockade, BaseCaseError> {
    if s == 0 {
        return Err(BaseCaseError::ZeroS);
    }
    let need = d_s(s).to_u64().unwrap_or(u64::MAX);
    if (b.len() as u64) < need {
        return Err(BaseCaseError::TooShort { len: b.len(), need });
    }
    let used = &b.blocks()[..need as usize];
    let sub = Blockade::from_sets(g.n(), used.to_vec()).expect("sub-blockade of a blockade");
    if let Some(v) = k2::is_rainbow_k2_free(
        g,
        &sub,
        2,
        WitnessOptions::default(),
        RainbowReading::default(),
        caps,
    )? {
        return Err(BaseCaseError::NotRainbowFree(v));
    }
    let input_width = sub.width().expect("nonempty");
    let (blocks, pattern) = recurse(g, used, s).map_err(BaseCaseError::NotRainbowFree)?;
    Ok(PureBlockade {
        blockade: Blockade::from_sets(g.n(), blocks).expect("output blocks are disjoint"),
        pattern,
        input_width,
        divisor: need,
    })
}

/// `x` in `pool` with neighbours `y ∈ left`, `z ∈ right` is a rainbow pair `(y, z)`
/// witnessed by `x`.
fn split_violation(g: &Graph, x: usize, left: &VertexSet, right: &VertexSet) -> Violation {
    let y = g
        .neighbors(x)
        .intersection(left)
        .first()
        .expect("neighbour on the left");
    let z = g
        .neighbors(x)
        .intersection(right)
        .first()
        .expect("neighbour on the right");
    let (a, b) = if y < z { (y, z) } else { (z, y) };
    Violation {
        tuple: vec![a, b],
        witnesses: k2::WitnessMap {
            k: 2,
            entries: vec![k2::Witness {
                i: 0,
                j: 1,
                vertex: x,
            }],
        },
    }
}

/// Vertices of `pool` anticomplete to `side`, or a violation for a vertex of
/// `pool` with neighbours in both `side_a` and `side_b`.
fn anticomplete_split(
    g: &Graph,
    pool: &VertexSet,
    side_a: &VertexSet,
    side_b: &VertexSet,
) -> Result<(VertexSet, VertexSet), Violation> {
    let mut free_a = VertexSet::empty(g.n());
    let mut free_b = VertexSet::empty(g.n());
    for x in pool {
        let na = g.neighbors(x).is_disjoint(side_a);
        let nb = g.neighbors(x).is_disjoint(side_b);
        if !na && !nb {
            return Err(split_violation(g, x, side_a, side_b));
        }
        if na {
            free_a.insert(x);
        }
        if nb {
            free_b.insert(x);
        }
    }
    Ok((free_a, free_b))
}

fn union_of(n: usize, blocks: &[VertexSet]) -> VertexSet {
    let mut u = VertexSet::empty(n);
    blocks.iter().for_each(|b| u.union_with(b));
    u
}

fn recurse(g: &Graph, blocks: &[VertexSet], s: u32) -> Result<(Vec<VertexSet>, Cotree), Violation> {
    let n = g.n();
    if s == 1 {
        let x = blocks[0].union(&blocks[1]);
        let (a, a2) = anticomplete_split(g, &x, &blocks[2], &blocks[3])?;
        let out = if 2 * a.len() >= x.len() {
            vec![a, blocks[2].clone()]
        } else {
            vec![a2, blocks[3].clone()]
        };
        return Ok((out, Cotree::Union(vec![Cotree::Leaf(0), Cotree::Leaf(1)])));
    }
    let big = d_s(s).to_usize().expect("recursion depth is tiny");
    let small = d_s(s - 1).to_usize().expect("recursion depth is tiny");
    let w = blocks[..big]
        .iter()
        .map(VertexSet::len)
        .min()
        .expect("nonempty");
    let trimmed: Vec<VertexSet> = blocks[..big].iter().map(|b| b.take_lowest(w)).collect();
    let (left, right, rest) = (
        &trimmed[..big / 4],
        &trimmed[big / 4..big / 2],
        &trimmed[big / 2..],
    );
    let m = union_of(n, rest);
    let (l_free, r_free) = anticomplete_split(g, &m, &union_of(n, left), &union_of(n, right))?;
    let (side, good) = if 2 * l_free.len() >= m.len() {
        (left, l_free)
    } else {
        (right, r_free)
    };
    let (mut out, first) = recurse(g, &side[..small], s - 1)?;
    let kept: Vec<VertexSet> = rest
        .iter()
        .map(|b| b.intersection(&good))
        .filter(|b| 4 * b.len() >= w)
        .take(small)
        .collect();
    assert_eq!(
        kept.len(),
        small,
        "counting guarantees enough well-covered blocks"
    );
    let (other, second) = recurse(g, &kept, s - 1)?;
    let shift = out.len();
    out.extend(other);
    Ok((
        out,
        Cotree::Union(vec![first, second.map_leaves(&|v| v + shift)]),
    ))
}
