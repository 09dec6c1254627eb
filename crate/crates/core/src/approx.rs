//! Single-linkage ultrametrification and the additive approximation of
//! `d_GH` between general finite metric spaces.

use crate::dgh::{dgh_exact, DghOptions, Method};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::space::{FiniteSpace, MetricSpace, UltrametricSpace};
use crate::tree::UMTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxResult {
    /// `d_GH` between the single-linkage ultrametrics.
    pub value: Scalar,
    /// Twice the larger absolute ultrametricity; the true distance lies in
    /// `[value, value + additive_bound]`.
    pub additive_bound: Scalar,
    pub delta: Scalar,
}

/// The maximal ultrametric below `d`: minimax chain cost.
pub fn single_linkage(x: &MetricSpace) -> UltrametricSpace {
    UMTree::single_linkage(x).to_matrix()
}

/// Half the sup-distance between `d` and its single-linkage ultrametric.
pub fn abs_ultrametricity(x: &MetricSpace) -> Scalar {
    let u = single_linkage(x);
    let n = x.len();
    let mut best = Scalar::zero();
    for i in 0..n {
        for j in i + 1..n {
            let gap = x.dist(i, j) - u.dist(i, j);
            if gap > best {
                best = gap;
            }
        }
    }
    best.half()
}

pub fn approx_dgh(x: &MetricSpace, y: &MetricSpace, opts: &DghOptions) -> Result<ApproxResult> {
    let value = dgh_exact(&single_linkage(x), &single_linkage(y), Method::Dp, opts)?.distance;
    let delta = Scalar::max_of(&abs_ultrametricity(x), &abs_ultrametricity(y)).clone();
    Ok(ApproxResult { value, additive_bound: &delta + &delta, delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metric(rows: &[Vec<i64>], labels: &[&str]) -> MetricSpace {
        let rows = rows.iter().map(|r| r.iter().map(|&v| Scalar::from_integer(v)).collect()).collect();
        MetricSpace::new(rows, Some(labels.iter().map(|s| s.to_string()).collect())).unwrap()
    }

    fn m3() -> MetricSpace {
        metric(&[vec![0, 1, 3], vec![1, 0, 2], vec![3, 2, 0]], &["a", "b", "c"])
    }

    fn x3() -> MetricSpace {
        metric(&[vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]], &["a", "b", "c"])
    }

    #[test]
    fn single_linkage_examples() {
        let u = single_linkage(&m3());
        assert_eq!(u.dist(0, 1), &Scalar::one());
        assert_eq!(u.dist(1, 2), &Scalar::from_integer(2));
        assert_eq!(u.dist(0, 2), &Scalar::from_integer(2));
        assert_eq!(u.as_metric(), x3());
        assert_eq!(single_linkage(&x3()).as_metric(), x3());
        let two = metric(&[vec![0, 5], vec![5, 0]], &["a", "b"]);
        assert_eq!(single_linkage(&two).as_metric(), two);
        assert_eq!(u.labels(), m3().labels());
    }

    #[test]
    fn ultramericity_examples() {
        assert_eq!(abs_ultrametricity(&m3()), Scalar::ratio(1, 2));
        assert_eq!(abs_ultrametricity(&x3()), Scalar::zero());
        assert_eq!(abs_ultrametricity(&metric(&[vec![0, 5], vec![5, 0]], &["a", "b"])), Scalar::zero());
    }

    #[test]
    fn approx_examples() {
        let opts = DghOptions::default();
        let r = approx_dgh(&m3(), &x3(), &opts).unwrap();
        assert_eq!((r.value, r.additive_bound), (Scalar::zero(), Scalar::one()));
        let r = approx_dgh(&m3(), &m3(), &opts).unwrap();
        assert_eq!((r.value, r.additive_bound), (Scalar::zero(), Scalar::one()));
        let y3 = metric(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]], &["a", "b", "c"]);
        let r = approx_dgh(&x3(), &y3, &opts).unwrap();
        assert_eq!((r.value, r.additive_bound), (Scalar::ratio(1, 2), Scalar::zero()));
    }
}
