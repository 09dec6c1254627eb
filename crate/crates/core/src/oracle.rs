//! Brute-force ground truth for small instances.

use crate::dgh::Correspondence;
use crate::error::{Error, Result};
use crate::pgh::{lambda_p, PExponent, RootValue};
use crate::scalar::Scalar;
use crate::space::FiniteSpace;

pub const DEFAULT_SIZE_CAP: usize = 5;

/// Every relation between `[nx]` and `[ny]` with full projections, as a list
/// of index pairs, by plain counting over `nx * ny` bit masks.
#[derive(Clone, Debug)]
pub struct CorrespondenceIterator {
    nx: usize,
    ny: usize,
    next: u64,
    end: u64,
}

impl Iterator for CorrespondenceIterator {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        'scan: while self.next < self.end {
            let mask = self.next;
            self.next += 1;
            let (mut rows, mut cols) = (0u64, 0u64);
            for c in 0..self.nx * self.ny {
                if mask >> c & 1 == 1 {
                    rows |= 1 << (c / self.ny);
                    cols |= 1 << (c % self.ny);
                }
            }
            if rows.count_ones() as usize != self.nx || cols.count_ones() as usize != self.ny {
                continue 'scan;
            }
            return Some(
                (0..self.nx * self.ny).filter(|c| mask >> c & 1 == 1).map(|c| (c / self.ny, c % self.ny)).collect(),
            );
        }
        None
    }
}

pub fn enumerate_correspondences(nx: usize, ny: usize) -> Result<CorrespondenceIterator> {
    enumerate_correspondences_capped(nx, ny, DEFAULT_SIZE_CAP)
}

pub fn enumerate_correspondences_capped(nx: usize, ny: usize, cap: usize) -> Result<CorrespondenceIterator> {
    if nx == 0 || ny == 0 {
        return Err(Error::EmptySpace);
    }
    if nx > cap || ny > cap || nx * ny > 63 {
        return Err(Error::SizeCapExceeded { nx, ny, cap });
    }
    Ok(CorrespondenceIterator { nx, ny, next: 1, end: 1u64 << (nx * ny) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteResult {
    /// `2^(-1/p) min_R dis_p(R)`.
    pub value: RootValue,
    /// A minimizing relation; its `distortion` field is the `p = 1` distortion.
    pub correspondence: Correspondence,
    /// `dis_p` of the witness.
    pub witness_dis_p: RootValue,
}

/// Cost of pairing `(i, j)` with `(k, l)`, in a form comparable across pairs:
/// `|d^p - e^p|` for finite `p`, `Λ_∞` otherwise.
fn pair_cost<X, Y>(x: &X, y: &Y, a: (usize, usize), b: (usize, usize), p: &PExponent) -> Result<Scalar>
where
    X: FiniteSpace + ?Sized,
    Y: FiniteSpace + ?Sized,
{
    Ok(lambda_p(x.dist(a.0, b.0), y.dist(a.1, b.1), p)?.radicand)
}

struct Search<'a> {
    nx: usize,
    ny: usize,
    /// `cost[c1][c2]` as a rank into the sorted distinct costs.
    cost: &'a [Vec<u32>],
}

impl Search<'_> {
    /// A relation with full projections whose pair costs are all `<= tau`.
    fn feasible(&self, tau: u32) -> Option<Vec<usize>> {
        let mut chosen = Vec::new();
        let mut rows = vec![0u32; self.nx];
        let mut cols = vec![0u32; self.ny];
        self.dfs(tau, &mut chosen, &mut rows, &mut cols).then_some(chosen)
    }

    fn dfs(&self, tau: u32, chosen: &mut Vec<usize>, rows: &mut [u32], cols: &mut [u32]) -> bool {
        let candidates: Vec<usize> = if let Some(i) = rows.iter().position(|&r| r == 0) {
            (0..self.ny).map(|j| i * self.ny + j).collect()
        } else if let Some(j) = cols.iter().position(|&c| c == 0) {
            (0..self.nx).map(|i| i * self.ny + j).collect()
        } else {
            return true;
        };
        for c in candidates {
            if self.cost[c][c] > tau || chosen.iter().any(|&o| self.cost[c][o] > tau) {
                continue;
            }
            let (i, j) = (c / self.ny, c % self.ny);
            chosen.push(c);
            rows[i] += 1;
            cols[j] += 1;
            if self.dfs(tau, chosen, rows, cols) {
                return true;
            }
            chosen.pop();
            rows[i] -= 1;
            cols[j] -= 1;
        }
        false
    }
}

/// Exact `d_GH^(p)` by exhaustive search over correspondences. Diagonal
/// entries take part, so ultra-dissimilarity spaces are compared with their
/// birth times.
///
/// The minimum bottleneck cost is found by a binary search over candidate
/// thresholds, each decided by a complete backtracking search over relations.
pub fn brute_dghp<X, Y>(x: &X, y: &Y, p: &PExponent) -> Result<BruteResult>
where
    X: FiniteSpace + ?Sized,
    Y: FiniteSpace + ?Sized,
{
    brute_dghp_capped(x, y, p, DEFAULT_SIZE_CAP)
}

pub fn brute_dghp_capped<X, Y>(x: &X, y: &Y, p: &PExponent, cap: usize) -> Result<BruteResult>
where
    X: FiniteSpace + ?Sized,
    Y: FiniteSpace + ?Sized,
{
    let (nx, ny) = (x.len(), y.len());
    if nx == 0 || ny == 0 {
        return Err(Error::EmptySpace);
    }
    if nx > cap || ny > cap {
        return Err(Error::SizeCapExceeded { nx, ny, cap });
    }
    let cells: Vec<(usize, usize)> = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
    let mut raw = vec![vec![Scalar::zero(); cells.len()]; cells.len()];
    let mut values = Vec::with_capacity(cells.len() * cells.len());
    for (a, &ca) in cells.iter().enumerate() {
        for (b, &cb) in cells.iter().enumerate().skip(a) {
            let v = pair_cost(x, y, ca, cb, p)?;
            raw[a][b] = v.clone();
            raw[b][a] = v.clone();
            values.push(v);
        }
    }
    values.sort();
    values.dedup();
    let cost: Vec<Vec<u32>> = raw
        .iter()
        .map(|row| row.iter().map(|v| values.binary_search(v).unwrap() as u32).collect())
        .collect();
    let search = Search { nx, ny, cost: &cost };
    let (mut lo, mut hi) = (0u32, values.len() as u32 - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if search.feasible(mid).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let chosen = search.feasible(lo).expect("the full product is feasible at the top cost");
    let pairs: Vec<(usize, usize)> = chosen.iter().map(|&c| cells[c]).collect();
    let best = values[lo as usize].clone();
    finish(x, y, p, pairs, best)
}

fn finish<X, Y>(x: &X, y: &Y, p: &PExponent, pairs: Vec<(usize, usize)>, best: Scalar) -> Result<BruteResult>
where
    X: FiniteSpace + ?Sized,
    Y: FiniteSpace + ?Sized,
{
    let (value, witness_dis_p) = match p.integer()? {
        None => (RootValue::exact(best.clone()), RootValue::exact(best)),
        Some(k) => (RootValue::new(best.half(), k), RootValue::new(best, k)),
    };
    let correspondence = Correspondence::new(pairs, x, y);
    Ok(BruteResult { value, correspondence, witness_dis_p })
}

/// Same quantity as [`brute_dghp`] by visiting every correspondence.
pub fn brute_dghp_exhaustive<X, Y>(x: &X, y: &Y, p: &PExponent) -> Result<BruteResult>
where
    X: FiniteSpace + ?Sized,
    Y: FiniteSpace + ?Sized,
{
    let mut best: Option<(Scalar, Vec<(usize, usize)>)> = None;
    for pairs in enumerate_correspondences(x.len(), y.len())? {
        let mut worst = Scalar::zero();
        for (k, &a) in pairs.iter().enumerate() {
            for &b in &pairs[k..] {
                let v = pair_cost(x, y, a, b, p)?;
                if v > worst {
                    worst = v;
                }
            }
        }
        if best.as_ref().is_none_or(|(b, _)| &worst < b) {
            best = Some((worst, pairs));
        }
    }
    let (best, pairs) = best.expect("at least one correspondence exists");
    finish(x, y, p, pairs, best)
}
