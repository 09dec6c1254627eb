//! The Gromov–Hausdorff ultrametric.
//!
//! `u_GH(X, Y)` is the least level `t` at which the closed quotients of `X`
//! and `Y` are isometric. Isometry of quotients is monotone in `t`, so the
//! level is found by binary search over the merged spectrum.

use crate::scalar::Scalar;
use crate::space::{FiniteSpace, UltraDissimilaritySpace, UltrametricSpace};
use crate::tree::{LevelSignature, UMTree};

/// How the level search is carried out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Search {
    #[default]
    Binary,
    Linear,
}

/// `u_GH` between the spaces of two trees (ultrametric trees or treegrams).
pub fn ugh_trees(x: &UMTree, y: &UMTree, search: Search) -> Scalar {
    let sig = LevelSignature::new(x, y);
    let top = sig.levels.len() - 1;
    let idx = match search {
        Search::Linear => (0..=top).find(|&l| sig.isometric_at(Some(l))).unwrap_or(top),
        Search::Binary => {
            let (mut lo, mut hi) = (0usize, top);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if sig.isometric_at(Some(mid)) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            lo
        }
    };
    sig.levels[idx].clone()
}

pub fn ugh(x: &UltrametricSpace, y: &UltrametricSpace) -> Scalar {
    ugh_with(x, y, Search::Binary)
}

pub fn ugh_with(x: &UltrametricSpace, y: &UltrametricSpace, search: Search) -> Scalar {
    ugh_trees(&UMTree::from_space(x), &UMTree::from_space(y), search)
}

/// `u_GH` between ultra-dissimilarity spaces, comparing treegram quotients.
pub fn ugh_dissimilarity(x: &UltraDissimilaritySpace, y: &UltraDissimilaritySpace) -> Scalar {
    ugh_dissimilarity_with(x, y, Search::Binary)
}

pub fn ugh_dissimilarity_with(x: &UltraDissimilaritySpace, y: &UltraDissimilaritySpace, search: Search) -> Scalar {
    ugh_trees(&UMTree::from_dissimilarity(x), &UMTree::from_dissimilarity(y), search)
}

/// Closed quotient of an ultra-dissimilarity space at a level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DissimilarityQuotient {
    pub space: UltraDissimilaritySpace,
    pub level: Scalar,
}

impl DissimilarityQuotient {
    pub fn new(space: UltraDissimilaritySpace, level: Scalar) -> Self {
        DissimilarityQuotient { space, level }
    }

    /// Classes as point indices: `{x}` when the birth of `x` exceeds the
    /// level, otherwise the points within the level of `x`.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let n = self.space.len();
        let mut assigned = vec![false; n];
        let mut out = Vec::new();
        for x in 0..n {
            if assigned[x] {
                continue;
            }
            let class: Vec<usize> = if self.space.birth(x) > &self.level {
                vec![x]
            } else {
                (0..n).filter(|&z| !assigned[z] && self.space.dist(x, z) <= &self.level).collect()
            };
            for &z in &class {
                assigned[z] = true;
            }
            out.push(class);
        }
        out
    }

    /// The quotient space, one point per class labelled by its representative.
    pub fn quotient(&self) -> UltraDissimilaritySpace {
        treegram_closed_quotient(&self.space, &self.level)
    }
}

/// Quotient keeping self-values above `t` and zeroing the rest.
pub fn treegram_closed_quotient(x: &UltraDissimilaritySpace, t: &Scalar) -> UltraDissimilaritySpace {
    UMTree::from_dissimilarity(x).closed_quotient(t).to_dissimilarity()
}
