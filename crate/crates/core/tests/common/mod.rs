#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use umgh::tree::NestedTree;
use umgh::{FiniteSpace, MetricSpace, Scalar, UltraDissimilaritySpace, UltrametricSpace};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn s(v: i64) -> Scalar {
    Scalar::from_integer(v)
}

fn split(rng: &mut StdRng, d: &mut [Vec<i64>], points: &[usize], hi: i64) {
    if points.len() < 2 {
        return;
    }
    let h = rng.gen_range(1..=hi);
    let groups: Vec<Vec<usize>> = if h == 1 {
        points.iter().map(|&p| vec![p]).collect()
    } else {
        loop {
            let k = rng.gen_range(2..=points.len());
            let mut g = vec![Vec::new(); k];
            for &p in points {
                g[rng.gen_range(0..k)].push(p);
            }
            g.retain(|b: &Vec<usize>| !b.is_empty());
            if g.len() >= 2 {
                break g;
            }
        }
    };
    for (a, ga) in groups.iter().enumerate() {
        for gb in &groups[a + 1..] {
            for &p in ga {
                for &q in gb {
                    d[p][q] = h;
                    d[q][p] = h;
                }
            }
        }
    }
    for g in &groups {
        split(rng, d, g, h - 1);
    }
}

/// Random ultrametric on `n` points with integer heights in `1..=max_h`.
pub fn random_ultrametric_rows(rng: &mut StdRng, n: usize, max_h: i64) -> Vec<Vec<i64>> {
    let mut d = vec![vec![0i64; n]; n];
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    split(rng, &mut d, &points, max_h);
    d
}

pub fn random_ultrametric(rng: &mut StdRng, n: usize, max_h: i64) -> UltrametricSpace {
    UltrametricSpace::from_integers(&random_ultrametric_rows(rng, n, max_h), None).unwrap()
}

/// Random ultrametric with between 1 and `max_n` points.
pub fn random_small(rng: &mut StdRng, max_n: usize) -> UltrametricSpace {
    let n = rng.gen_range(1..=max_n);
    random_ultrametric(rng, n, 5)
}

/// Random metric: integer weights in `1..=6` closed under shortest paths.
#[allow(clippy::needless_range_loop)]
pub fn random_metric(rng: &mut StdRng, n: usize) -> MetricSpace {
    let mut d = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(1..=6);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    MetricSpace::new(to_scalars(&d), None).unwrap()
}

/// Random ultra-dissimilarity: a random ultrametric with half-integer births
/// strictly below each point's nearest merge.
pub fn random_dissimilarity(rng: &mut StdRng, n: usize) -> UltraDissimilaritySpace {
    let d = random_ultrametric_rows(rng, n, 4);
    let mut rows = to_scalars(&d);
    for i in 0..n {
        let nearest = (0..n).filter(|&j| j != i).map(|j| d[i][j]).min().unwrap_or(3);
        rows[i][i] = Scalar::ratio(rng.gen_range(0..2 * nearest), 2);
    }
    UltraDissimilaritySpace::new(rows, None).unwrap()
}

pub fn to_scalars(d: &[Vec<i64>]) -> Vec<Vec<Scalar>> {
    d.iter().map(|r| r.iter().map(|&v| s(v)).collect()).collect()
}

/// Balanced binary dendrogram on `n` leaves; a node merging at level `k`
/// above the leaves gets a random height in `[10k, 10k + 10)`.
pub fn balanced_dendrogram(rng: &mut StdRng, n: usize) -> NestedTree {
    fn go(rng: &mut StdRng, lo: usize, hi: usize) -> (NestedTree, i64) {
        if hi - lo == 1 {
            return (NestedTree::leaf(format!("x{lo}")), 0);
        }
        let mid = lo + (hi - lo) / 2;
        let (a, ka) = go(rng, lo, mid);
        let (b, kb) = go(rng, mid, hi);
        let k = ka.max(kb) + 1;
        let h = Scalar::from_integer(10 * k + rng.gen_range(0..10));
        (NestedTree::node(h, vec![a, b]), k)
    }
    go(rng, 0, n).0
}

/// Every subset `U` of `x` (as a sorted index list) containing all points
/// within distance `< diam(U) - 2 eps` of `U`.
pub fn brute_eps_subsets(x: &UltrametricSpace, eps: &Scalar) -> Vec<Vec<usize>> {
    let n = x.len();
    let two_eps = eps + eps;
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let u: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut diam = Scalar::zero();
        for &a in &u {
            for &b in &u {
                if x.dist(a, b) > &diam {
                    diam = x.dist(a, b).clone();
                }
            }
        }
        let bound = &diam - &two_eps;
        let closed = (0..n).filter(|i| mask >> i & 1 == 0).all(|p| u.iter().all(|&q| x.dist(p, q) >= &bound));
        if closed {
            out.push(u);
        }
    }
    out.sort();
    out
}
