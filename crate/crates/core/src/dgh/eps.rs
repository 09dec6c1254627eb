use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::UltrametricSpace;
use crate::tree::{open_partition, union_of_balls, NodeId, SubspaceRef, UMTree};

use super::DghOptions;

/// The ε-maximal unions of closed balls, ascending by diameter with the whole
/// space last, indexed by ball decomposition.
#[derive(Clone, Debug)]
pub struct EpsBallList {
    pub(crate) entries: Vec<SubspaceRef>,
    pub(crate) index: HashMap<Vec<NodeId>, usize>,
}

impl EpsBallList {
    pub fn entries(&self) -> &[SubspaceRef] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of the entry with the given ball decomposition.
    pub fn position(&self, balls: &[NodeId]) -> Option<usize> {
        self.index.get(balls).copied()
    }

    /// Entries as sorted point sets.
    pub fn point_sets(&self) -> Vec<Vec<usize>> {
        self.entries
            .iter()
            .map(|e| {
                let mut p = e.points();
                p.sort_unstable();
                p
            })
            .collect()
    }
}

pub fn build_eps_ball_list(x: &UltrametricSpace, eps: &Scalar, opts: &DghOptions) -> Result<EpsBallList> {
    build_eps_ball_list_in(&Arc::new(UMTree::from_space(x)), eps, opts.block_cap)
}

/// For every ball `B`, take the open partition of `B` at
/// `max(diam(B) - 2ε, 0)` and keep each union of blocks whose diameter is
/// `diam(B)`.
pub fn build_eps_ball_list_in(tree: &Arc<UMTree>, eps: &Scalar, block_cap: usize) -> Result<EpsBallList> {
    let two_eps = eps + eps;
    let mut found: HashMap<Vec<NodeId>, SubspaceRef> = HashMap::new();
    for v in 0..tree.node_count() {
        let ball = SubspaceRef::ball(tree, v);
        if tree.is_leaf(v) {
            found.insert(ball.balls().to_vec(), ball);
            continue;
        }
        let d = tree.diameter(v);
        let rho = if d > &two_eps { d - &two_eps } else { Scalar::zero() };
        let blocks = open_partition(&ball, &rho).blocks;
        let n = blocks.len();
        if n > block_cap || n >= 64 {
            return Err(Error::GammaBudgetExceeded { blocks: n, cap: block_cap.min(63) });
        }
        for mask in 1u64..(1u64 << n) {
            let members: Vec<NodeId> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .flat_map(|i| blocks[i].balls().iter().copied())
                .collect();
            let u = union_of_balls(tree, members);
            if u.diameter() == d {
                found.entry(u.balls().to_vec()).or_insert(u);
            }
        }
    }
    let root = tree.root();
    let mut entries: Vec<SubspaceRef> = found.into_values().collect();
    entries.sort_by(|a, b| {
        let ka = (a.diameter(), a.balls() == [root], a.balls());
        let kb = (b.diameter(), b.balls() == [root], b.balls());
        ka.cmp(&kb)
    });
    let index = entries.iter().enumerate().map(|(i, e)| (e.balls().to_vec(), i)).collect();
    Ok(EpsBallList { entries, index })
}
