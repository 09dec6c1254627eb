//! Exact Gromov–Hausdorff distance between finite ultrametric spaces.
//!
//! The decision problem "is there a correspondence of distortion at most ε"
//! is solved either recursively ([`find_corr_rec`]) or by dynamic programming
//! over ε-maximal unions of balls ([`find_corr_dp`]). [`dgh_exact`] scans the
//! finite candidate set of distortions in ascending order.

mod corr;
mod eps;
mod growth;

use std::cell::Cell;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{spectrum, FiniteSpace, UltrametricSpace};
use crate::tree::{SubspaceRef, UMTree};

pub use corr::{find_corr_dp, find_corr_dp_witness, find_corr_rec, find_corr_small};
pub use eps::{build_eps_ball_list, build_eps_ball_list_in, EpsBallList};
pub use growth::{check_fgc, gamma_sgc, GrowthReport};

/// Default cap on enumerated surjections or injections per decision call.
pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Default cap on the number of blocks whose subsets are enumerated when
/// building ε-maximal unions.
pub const DEFAULT_BLOCK_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DghOptions {
    /// Enumeration cap for each decision call.
    pub budget: u64,
    pub block_cap: usize,
    /// Candidate levels evaluated concurrently by [`dgh_exact`].
    pub threads: usize,
}

impl Default for DghOptions {
    fn default() -> Self {
        DghOptions { budget: DEFAULT_BUDGET, block_cap: DEFAULT_BLOCK_CAP, threads: 1 }
    }
}

impl DghOptions {
    /// Defaults, with the budget taken from `UMGH_BUDGET` when set.
    pub fn from_env() -> Self {
        let mut opts = DghOptions::default();
        if let Some(b) = std::env::var("UMGH_BUDGET").ok().and_then(|v| v.trim().parse().ok()) {
            opts.budget = b;
        }
        opts
    }
}

pub(crate) struct Budget {
    limit: u64,
    surjections: Cell<u64>,
    injections: Cell<u64>,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Budget { limit, surjections: Cell::new(0), injections: Cell::new(0) }
    }

    pub(crate) fn surjection(&self) -> Result<()> {
        let n = self.surjections.get() + 1;
        self.surjections.set(n);
        if n > self.limit {
            return Err(Error::SurjectionBudgetExceeded(self.limit));
        }
        Ok(())
    }

    pub(crate) fn injection(&self) -> Result<()> {
        let n = self.injections.get() + 1;
        self.injections.set(n);
        if n > self.limit {
            return Err(Error::InjectionBudgetExceeded(self.limit));
        }
        Ok(())
    }
}

/// A correspondence given by point indices, with its distortion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
    pub distortion: Scalar,
}

impl Correspondence {
    /// Sorts and deduplicates `pairs` and computes the distortion exactly.
    pub fn new<X, Y>(mut pairs: Vec<(usize, usize)>, x: &X, y: &Y) -> Self
    where
        X: FiniteSpace + ?Sized,
        Y: FiniteSpace + ?Sized,
    {
        pairs.sort_unstable();
        pairs.dedup();
        let distortion = distortion(&pairs, x, y);
        Correspondence { pairs, distortion }
    }

    /// True when both projections are onto.
    pub fn is_full(&self, nx: usize, ny: usize) -> bool {
        let mut rows = vec![false; nx];
        let mut cols = vec![false; ny];
        for &(i, j) in &self.pairs {
            if i >= nx || j >= ny {
                return false;
            }
            rows[i] = true;
            cols[j] = true;
        }
        rows.into_iter().all(|b| b) && cols.into_iter().all(|b| b)
    }

    pub fn labeled<X, Y>(&self, x: &X, y: &Y) -> Vec<(String, String)>
    where
        X: FiniteSpace + ?Sized,
        Y: FiniteSpace + ?Sized,
    {
        self.pairs.iter().map(|&(i, j)| (x.label(i).to_string(), y.label(j).to_string())).collect()
    }
}

/// `max |d_X(x, x') - d_Y(y, y')|` over pairs of pairs.
pub fn distortion<X, Y>(pairs: &[(usize, usize)], x: &X, y: &Y) -> Scalar
where
    X: FiniteSpace + ?Sized,
    Y: FiniteSpace + ?Sized,
{
    let mut best = Scalar::zero();
    for (k, &(a, b)) in pairs.iter().enumerate() {
        for &(c, d) in &pairs[k..] {
            let v = x.dist(a, c).abs_diff(y.dist(b, d));
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Sorted distinct values `|a - b|` for `a` in `spec(X)` and `b` in `spec(Y)`.
pub fn candidate_set(x: &UltrametricSpace, y: &UltrametricSpace) -> Vec<Scalar> {
    let (sx, sy) = (spectrum(x), spectrum(y));
    let mut out: Vec<Scalar> =
        sx.values().iter().flat_map(|a| sy.values().iter().map(move |b| a.abs_diff(b))).collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    #[default]
    Dp,
    Rec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DghResult {
    pub distance: Scalar,
    pub correspondence: Correspondence,
}

fn decide(
    x: &UltrametricSpace,
    y: &UltrametricSpace,
    tx: &Arc<UMTree>,
    ty: &Arc<UMTree>,
    eps: &Scalar,
    method: Method,
    opts: &DghOptions,
) -> Result<Option<Correspondence>> {
    match method {
        Method::Dp => find_corr_dp_witness(x, y, eps, opts),
        Method::Rec => {
            let found = find_corr_rec(&SubspaceRef::whole(tx), &SubspaceRef::whole(ty), eps, opts)?;
            Ok(found.map(|c| Correspondence::new(c.pairs, x, y)))
        }
    }
}

/// `d_GH(X, Y)` with a witness correspondence of distortion `2 d_GH`.
pub fn dgh_exact(x: &UltrametricSpace, y: &UltrametricSpace, method: Method, opts: &DghOptions) -> Result<DghResult> {
    let tx = Arc::new(UMTree::from_space(x));
    let ty = Arc::new(UMTree::from_space(y));
    let candidates = candidate_set(x, y);
    let width = opts.threads.max(1);
    for chunk in candidates.chunks(width) {
        let results: Vec<Result<Option<Correspondence>>> = if chunk.len() == 1 {
            vec![decide(x, y, &tx, &ty, &chunk[0], method, opts)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = chunk
                    .iter()
                    .map(|eps| {
                        let (tx, ty) = (&tx, &ty);
                        s.spawn(move || decide(x, y, tx, ty, eps, method, opts))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("candidate worker panicked")).collect()
            })
        };
        for (eps, r) in chunk.iter().zip(results) {
            if let Some(correspondence) = r? {
                return Ok(DghResult { distance: eps.half(), correspondence });
            }
        }
    }
    unreachable!("the largest candidate always admits the full product")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn um(rows: &[Vec<i64>]) -> UltrametricSpace {
        UltrametricSpace::from_integers(rows, None).unwrap()
    }

    fn s(v: i64) -> Scalar {
        Scalar::from_integer(v)
    }

    #[test]
    fn candidate_sets() {
        let x2a = um(&[vec![0, 1], vec![1, 0]]);
        let x2b = um(&[vec![0, 2], vec![2, 0]]);
        assert_eq!(candidate_set(&x2a, &x2b), vec![s(0), s(1), s(2)]);
        assert!(candidate_set(&x2a, &x2a).contains(&s(0)));
        let x3 = um(&[vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]]);
        let y3 = um(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]);
        assert_eq!(candidate_set(&x3, &y3), vec![s(0), s(1), s(2)]);
    }

    #[test]
    fn exact_distances() {
        let x2a = um(&[vec![0, 1], vec![1, 0]]);
        let x2b = um(&[vec![0, 2], vec![2, 0]]);
        let x3 = um(&[vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]]);
        let y3 = um(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]);
        for method in [Method::Dp, Method::Rec] {
            let opts = DghOptions::default();
            let r = dgh_exact(&x2a, &x2b, method, &opts).unwrap();
            assert_eq!(r.distance, Scalar::ratio(1, 2));
            assert_eq!(r.correspondence.distortion, s(1));
            let r = dgh_exact(&x3, &y3, method, &opts).unwrap();
            assert_eq!(r.distance, Scalar::ratio(1, 2));
            assert!(r.correspondence.is_full(3, 3));
            assert_eq!(r.correspondence.distortion, s(1));
            let r = dgh_exact(&x3, &x3, method, &opts).unwrap();
            assert_eq!(r.distance, Scalar::zero());
            assert_eq!(r.correspondence.pairs.len(), 3);
            let threaded = DghOptions { threads: 3, ..DghOptions::default() };
            assert_eq!(dgh_exact(&x3, &y3, method, &threaded).unwrap().distance, Scalar::ratio(1, 2));
        }
    }

    #[test]
    fn correspondence_helpers() {
        let x2a = um(&[vec![0, 1], vec![1, 0]]);
        let one = um(&[vec![0]]);
        let c = Correspondence::new(vec![(1, 0), (0, 0), (1, 0)], &x2a, &one);
        assert_eq!(c.pairs, vec![(0, 0), (1, 0)]);
        assert_eq!(c.distortion, s(1));
        assert!(c.is_full(2, 1));
        assert!(!Correspondence::new(vec![(0, 0)], &x2a, &one).is_full(2, 1));
        assert_eq!(c.labeled(&x2a, &one)[1], ("p1".to_string(), "p0".to_string()));
    }
}
