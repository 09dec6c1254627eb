use std::sync::Arc;

use crate::scalar::Scalar;
use crate::space::UltrametricSpace;
use crate::tree::{open_partition, NodeId, SubspaceRef, UMTree};

/// Growth parameter of a space: the least `gamma` satisfying the second growth
/// condition at `epsilon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthReport {
    pub epsilon: Scalar,
    pub gamma: usize,
}

/// Maximal balls of diameter `<= t`, i.e. the closed classes at level `t`.
fn closed_classes(tree: &UMTree, t: &Scalar) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        if tree.diameter(v) <= t {
            out.push(v);
        } else {
            stack.extend(tree.children(v).iter().copied());
        }
    }
    out
}

fn levels(tree: &UMTree, floor: &Scalar) -> Vec<Scalar> {
    let mut out: Vec<Scalar> =
        tree.spectrum().values().iter().map(|s| Scalar::max_of(s, floor).clone()).collect();
    out.dedup();
    out
}

/// Largest number of `(t - 2ε)`-open blocks inside a `t`-closed class, over
/// all `t >= 2ε`.
pub fn gamma_sgc(x: &UltrametricSpace, eps: &Scalar) -> GrowthReport {
    let tree = Arc::new(UMTree::from_space(x));
    let two_eps = eps + eps;
    let mut gamma = 1;
    for t in levels(&tree, &two_eps) {
        let r = &t - &two_eps;
        for c in closed_classes(&tree, &t) {
            let count = if r.is_zero() {
                tree.ball_size(c)
            } else {
                open_partition(&SubspaceRef::ball(&tree, c), &r).len()
            };
            gamma = gamma.max(count);
        }
    }
    GrowthReport { epsilon: eps.clone(), gamma }
}

/// Whether `#[x]_c(t) <= gamma * #[x]_o(t - ε)` for all points and `t >= ε`.
pub fn check_fgc(x: &UltrametricSpace, eps: &Scalar, gamma: usize) -> bool {
    let tree = Arc::new(UMTree::from_space(x));
    for t in levels(&tree, eps) {
        let r = &t - eps;
        for c in closed_classes(&tree, &t) {
            let smallest = if r.is_zero() {
                1
            } else {
                open_partition(&SubspaceRef::ball(&tree, c), &r).blocks.iter().map(|b| b.len()).min().unwrap()
            };
            if tree.ball_size(c) > gamma * smallest {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgh::tests::um;

    #[test]
    fn sgc_examples() {
        let y3 = um(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]);
        let x3 = um(&[vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]]);
        assert_eq!(gamma_sgc(&y3, &Scalar::zero()).gamma, 3);
        assert_eq!(gamma_sgc(&x3, &Scalar::zero()).gamma, 2);
        assert_eq!(gamma_sgc(&um(&[vec![0]]), &Scalar::one()).gamma, 1);
        // A large epsilon lets a closed class split into singletons.
        assert_eq!(gamma_sgc(&x3, &Scalar::one()).gamma, 3);
    }

    #[test]
    fn fgc_examples() {
        // Three points at mutual distance 1 and a fourth point at distance 3.
        let x = um(&[vec![0, 1, 1, 3], vec![1, 0, 1, 3], vec![1, 1, 0, 3], vec![3, 3, 3, 0]]);
        assert!(!check_fgc(&x, &Scalar::one(), 2));
        assert!(check_fgc(&x, &Scalar::one(), 4));
        let balanced = um(&[vec![0, 1, 3, 3], vec![1, 0, 3, 3], vec![3, 3, 0, 1], vec![3, 3, 1, 0]]);
        assert!(check_fgc(&balanced, &Scalar::one(), 2));
    }
}
