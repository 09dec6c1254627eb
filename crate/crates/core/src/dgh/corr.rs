use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::UltrametricSpace;
use crate::tree::{open_partition, union_of_balls, NodeId, SubspaceRef, UMTree};

use super::eps::{build_eps_ball_list_in, EpsBallList};
use super::{Budget, Correspondence, DghOptions};

type Pairs = Vec<(usize, usize)>;
/// Blocks of both sides of a split cell and the block assignment.
type SplitWitness = (Vec<SubspaceRef>, Vec<SubspaceRef>, Vec<usize>);

fn product(x: &SubspaceRef, y: &SubspaceRef) -> Pairs {
    let ys = y.points();
    x.points().into_iter().flat_map(|p| ys.iter().map(move |&q| (p, q))).collect()
}

fn transpose(pairs: Pairs) -> Pairs {
    pairs.into_iter().map(|(a, b)| (b, a)).collect()
}

/// Distortion of index pairs measured in the ambient trees.
fn tree_distortion(pairs: &[(usize, usize)], tx: &UMTree, ty: &UMTree) -> Scalar {
    let mut best = Scalar::zero();
    for (k, &(a, b)) in pairs.iter().enumerate() {
        for &(c, d) in &pairs[k + 1..] {
            let dx = if a == c { Scalar::zero() } else { tx.dist(a, c).clone() };
            let dy = if b == d { Scalar::zero() } else { ty.dist(b, d).clone() };
            let v = dx.abs_diff(&dy);
            if v > best {
                best = v;
            }
        }
    }
    best
}

fn into_correspondence(mut pairs: Pairs, x: &SubspaceRef, y: &SubspaceRef) -> Correspondence {
    pairs.sort_unstable();
    pairs.dedup();
    let distortion = tree_distortion(&pairs, x.ambient(), y.ambient());
    Correspondence { pairs, distortion }
}

/// Enumerates surjections from the blocks of `blocks` onto `targets`
/// positions, pruning assignments whose partial union already exceeds
/// `target_diams[j] + eps`. `visit` returns `true` to stop.
struct Surjections<'a> {
    tree: &'a UMTree,
    blocks: &'a [SubspaceRef],
    caps: Vec<Scalar>,
    budget: &'a Budget,
}

struct Slot {
    count: usize,
    lo: NodeId,
    hi: NodeId,
    diameter: Scalar,
}

impl Surjections<'_> {
    fn run(&self, visit: &mut dyn FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
        let ny = self.caps.len();
        if self.blocks.len() < ny {
            return Ok(false);
        }
        let mut slots: Vec<Slot> =
            (0..ny).map(|_| Slot { count: 0, lo: 0, hi: 0, diameter: Scalar::zero() }).collect();
        let mut assign = vec![0usize; self.blocks.len()];
        self.step(0, &mut assign, &mut slots, ny, visit)
    }

    fn step(
        &self,
        i: usize,
        assign: &mut Vec<usize>,
        slots: &mut Vec<Slot>,
        empty: usize,
        visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        let n = self.blocks.len();
        if n - i < empty {
            return Ok(false);
        }
        if i == n {
            self.budget.surjection()?;
            return visit(assign);
        }
        let block = &self.blocks[i];
        let (b_lo, b_hi) = (block.balls()[0], *block.balls().last().unwrap());
        for j in 0..slots.len() {
            let saved = (slots[j].count, slots[j].lo, slots[j].hi, slots[j].diameter.clone());
            let slot = &mut slots[j];
            if slot.count == 0 {
                slot.lo = b_lo;
                slot.hi = b_hi;
                slot.diameter = block.diameter().clone();
            } else {
                slot.lo = slot.lo.min(b_lo);
                slot.hi = slot.hi.max(b_hi);
                slot.diameter = self.tree.diameter(self.tree.lca(slot.lo, slot.hi)).clone();
            }
            slot.count += 1;
            let ok = slot.diameter <= self.caps[j];
            let now_empty = if saved.0 == 0 { empty - 1 } else { empty };
            if ok {
                assign[i] = j;
                if self.step(i + 1, assign, slots, now_empty, visit)? {
                    return Ok(true);
                }
            }
            let slot = &mut slots[j];
            slot.count = saved.0;
            slot.lo = saved.1;
            slot.hi = saved.2;
            slot.diameter = saved.3;
        }
        Ok(false)
    }
}

fn group_union(tree: &Arc<UMTree>, blocks: &[SubspaceRef], assign: &[usize], j: usize) -> SubspaceRef {
    let balls: Vec<NodeId> = blocks
        .iter()
        .zip(assign)
        .filter(|(_, &a)| a == j)
        .flat_map(|(b, _)| b.balls().iter().copied())
        .collect();
    union_of_balls(tree, balls)
}

/// A correspondence of distortion at most `eps` between two subspaces, if
/// one exists. The pairs are ambient point indices of `x` and `y`.
pub fn find_corr_rec(x: &SubspaceRef, y: &SubspaceRef, eps: &Scalar, opts: &DghOptions) -> Result<Option<Correspondence>> {
    let budget = Budget::new(opts.budget);
    Ok(rec(x, y, eps, &budget)?.map(|p| into_correspondence(p, x, y)))
}

fn rec(x: &SubspaceRef, y: &SubspaceRef, eps: &Scalar, budget: &Budget) -> Result<Option<Pairs>> {
    if x.diameter() > y.diameter() {
        Ok(rec_ordered(y, x, eps, budget)?.map(transpose))
    } else {
        rec_ordered(x, y, eps, budget)
    }
}

/// Same as [`rec`] with `diam(x) <= diam(y)`.
fn rec_ordered(x: &SubspaceRef, y: &SubspaceRef, eps: &Scalar, budget: &Budget) -> Result<Option<Pairs>> {
    let dy = y.diameter();
    if dy <= eps {
        return Ok(Some(product(x, y)));
    }
    if &(dy - x.diameter()) > eps {
        return Ok(None);
    }
    let px = open_partition(x, &(dy - eps)).blocks;
    let py = open_partition(y, dy).blocks;
    let caps: Vec<Scalar> = py.iter().map(|b| b.diameter() + eps).collect();
    let search = Surjections { tree: x.ambient(), blocks: &px, caps, budget };
    let mut cache: HashMap<(Vec<NodeId>, usize), Option<Pairs>> = HashMap::new();
    let mut found: Option<Pairs> = None;
    search.run(&mut |assign| {
        let mut all = Vec::new();
        for (j, yj) in py.iter().enumerate() {
            let xj = group_union(x.ambient(), &px, assign, j);
            let key = (xj.balls().to_vec(), j);
            let r = match cache.get(&key) {
                Some(r) => r.clone(),
                None => {
                    let r = rec(&xj, yj, eps, budget)?;
                    cache.insert(key, r.clone());
                    r
                }
            };
            match r {
                Some(p) => all.extend(p),
                None => return Ok(false),
            }
        }
        found = Some(all);
        Ok(true)
    })?;
    Ok(found)
}

/// Decides whether an ε-correspondence exists when `diam(x) > eps >= diam(y)`,
/// by searching injections of the closed quotient of `x` at `eps` into `y`.
pub fn find_corr_small(x: &SubspaceRef, y: &SubspaceRef, eps: &Scalar, opts: &DghOptions) -> Result<bool> {
    let budget = Budget::new(opts.budget);
    Ok(small(x, y, eps, &budget)?.is_some())
}

fn small(x: &SubspaceRef, y: &SubspaceRef, eps: &Scalar, budget: &Budget) -> Result<Option<Pairs>> {
    if x.diameter() <= eps || y.diameter() > eps {
        return Err(Error::PreconditionViolated(format!(
            "expected diam(X) = {} > {eps} >= diam(Y) = {}",
            x.diameter(),
            y.diameter()
        )));
    }
    if &(x.diameter() - y.diameter()) > eps {
        return Ok(None);
    }
    let tx = x.ambient().as_ref();
    let ty = y.ambient().as_ref();
    // Closed classes of x at eps, keyed by the largest ancestor within eps.
    let mut classes: Vec<(NodeId, Vec<usize>)> = Vec::new();
    let mut slot_of: HashMap<NodeId, usize> = HashMap::new();
    for p in x.points() {
        let mut v = tx.leaf(p);
        while let Some(par) = tx.parent(v) {
            if tx.diameter(par) <= eps {
                v = par;
            } else {
                break;
            }
        }
        let k = *slot_of.entry(v).or_insert_with(|| {
            classes.push((v, Vec::new()));
            classes.len() - 1
        });
        classes[k].1.push(p);
    }
    let ys = y.points();
    let m = classes.len();
    if m > ys.len() {
        return Ok(None);
    }
    let qd: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|l| if i == l { Scalar::zero() } else { tx.dist(classes[i].1[0], classes[l].1[0]).clone() })
                .collect()
        })
        .collect();
    let yd: Vec<Vec<Scalar>> = ys
        .iter()
        .map(|&a| ys.iter().map(|&b| if a == b { Scalar::zero() } else { ty.dist(a, b).clone() }).collect())
        .collect();

    fn place(
        i: usize,
        phi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        qd: &[Vec<Scalar>],
        yd: &[Vec<Scalar>],
        eps: &Scalar,
        budget: &Budget,
    ) -> Result<bool> {
        if i == qd.len() {
            return Ok(true);
        }
        for t in 0..yd.len() {
            if used[t] {
                continue;
            }
            budget.injection()?;
            if (0..i).all(|l| &qd[i][l].abs_diff(&yd[t][phi[l]]) <= eps) {
                used[t] = true;
                phi.push(t);
                if place(i + 1, phi, used, qd, yd, eps, budget)? {
                    return Ok(true);
                }
                phi.pop();
                used[t] = false;
            }
        }
        Ok(false)
    }

    let mut phi = Vec::with_capacity(m);
    let mut used = vec![false; ys.len()];
    if !place(0, &mut phi, &mut used, &qd, &yd, eps, budget)? {
        return Ok(None);
    }
    // Each y goes to the class of its nearest image, ties to the lowest class.
    let mut pairs = Vec::new();
    for t in 0..ys.len() {
        let mut best = 0;
        for j in 1..m {
            if yd[t][phi[j]] < yd[t][phi[best]] {
                best = j;
            }
        }
        for &p in &classes[best].1 {
            pairs.push((p, ys[t]));
        }
    }
    Ok(Some(pairs))
}

/// Dynamic programme over pairs (ε-maximal union of `X`, ball of `Y`).
struct Dp<'a> {
    tx: Arc<UMTree>,
    ty: Arc<UMTree>,
    lx: EpsBallList,
    ly: Vec<NodeId>,
    ly_pos: Vec<usize>,
    table: Vec<bool>,
    eps: &'a Scalar,
    budget: Budget,
    /// Lookups of unions missing from the list, answered recursively instead.
    missing: usize,
}

enum Case {
    No,
    Product,
    Small,
    Split,
}

impl<'a> Dp<'a> {
    fn new(x: &UltrametricSpace, y: &UltrametricSpace, eps: &'a Scalar, opts: &DghOptions) -> Result<Self> {
        let tx = Arc::new(UMTree::from_space(x));
        let ty = Arc::new(UMTree::from_space(y));
        let lx = build_eps_ball_list_in(&tx, eps, opts.block_cap)?;
        let mut ly: Vec<NodeId> = (0..ty.node_count()).collect();
        ly.sort_by(|&a, &b| ty.diameter(a).cmp(ty.diameter(b)).then(b.cmp(&a)));
        let mut ly_pos = vec![0; ly.len()];
        for (i, &v) in ly.iter().enumerate() {
            ly_pos[v] = i;
        }
        let table = vec![false; lx.len() * ly.len()];
        Ok(Dp { tx, ty, lx, ly, ly_pos, table, eps, budget: Budget::new(opts.budget), missing: 0 })
    }

    fn at(&self, k: usize, jy: usize) -> bool {
        self.table[k * self.ly.len() + jy]
    }

    fn case(&self, u: &SubspaceRef, b: NodeId) -> Case {
        let (du, db) = (u.diameter(), self.ty.diameter(b));
        if &du.abs_diff(db) > self.eps {
            Case::No
        } else if Scalar::max_of(du, db) <= self.eps {
            Case::Product
        } else if du > self.eps && db <= self.eps {
            Case::Small
        } else {
            Case::Split
        }
    }

    fn split(&self, u: &SubspaceRef, b: NodeId) -> (Vec<SubspaceRef>, Vec<SubspaceRef>) {
        let db = self.ty.diameter(b);
        let bu = open_partition(u, &(db - self.eps)).blocks;
        let bb = open_partition(&SubspaceRef::ball(&self.ty, b), db).blocks;
        (bu, bb)
    }

    /// Runs the surjection search for a split cell; returns the successful
    /// assignment.
    fn split_search(&mut self, u: &SubspaceRef, b: NodeId) -> Result<Option<SplitWitness>> {
        let (bu, bb) = self.split(u, b);
        let caps: Vec<Scalar> = bb.iter().map(|blk| blk.diameter() + self.eps).collect();
        let tx = Arc::clone(&self.tx);
        let mut cache: HashMap<(Vec<NodeId>, usize), bool> = HashMap::new();
        let mut hit: Option<Vec<usize>> = None;
        let search = Surjections { tree: &tx, blocks: &bu, caps, budget: &self.budget };
        let mut misses = 0usize;
        let lx = &self.lx;
        let table = &self.table;
        let ly_len = self.ly.len();
        let ly_pos = &self.ly_pos;
        let eps = self.eps;
        let outer_budget = &self.budget;
        search.run(&mut |assign| {
            for (j, yj) in bb.iter().enumerate() {
                let xj = group_union(&tx, &bu, assign, j);
                let key = (xj.balls().to_vec(), j);
                let ok = match cache.get(&key) {
                    Some(&v) => v,
                    None => {
                        let v = match lx.position(xj.balls()) {
                            Some(k) => table[k * ly_len + ly_pos[yj.balls()[0]]],
                            None => {
                                misses += 1;
                                rec(&xj, yj, eps, outer_budget)?.is_some()
                            }
                        };
                        cache.insert(key, v);
                        v
                    }
                };
                if !ok {
                    return Ok(false);
                }
            }
            hit = Some(assign.to_vec());
            Ok(true)
        })?;
        self.missing += misses;
        Ok(hit.map(|a| (bu, bb, a)))
    }

    fn fill(&mut self) -> Result<()> {
        for jy in 0..self.ly.len() {
            let b = self.ly[jy];
            for k in 0..self.lx.len() {
                let u = self.lx.entries[k].clone();
                let v = match self.case(&u, b) {
                    Case::No => false,
                    Case::Product => true,
                    Case::Small => small(&u, &SubspaceRef::ball(&self.ty, b), self.eps, &self.budget)?.is_some(),
                    Case::Split => self.split_search(&u, b)?.is_some(),
                };
                let width = self.ly.len();
                self.table[k * width + jy] = v;
            }
        }
        Ok(())
    }

    fn result(&self) -> bool {
        self.at(self.lx.len() - 1, self.ly.len() - 1)
    }

    /// Explicit correspondence for a true cell, rebuilt from the table.
    fn extract(&mut self, u: &SubspaceRef, b: NodeId) -> Result<Pairs> {
        let yb = SubspaceRef::ball(&self.ty, b);
        match self.case(u, b) {
            Case::No => unreachable!("extract called on an infeasible cell"),
            Case::Product => Ok(product(u, &yb)),
            Case::Small => Ok(small(u, &yb, self.eps, &self.budget)?.expect("table and search disagree")),
            Case::Split => {
                let (bu, bb, assign) = self.split_search(u, b)?.expect("table and search disagree");
                let mut pairs = Vec::new();
                for (j, yj) in bb.iter().enumerate() {
                    let xj = group_union(&self.tx, &bu, &assign, j);
                    if self.lx.position(xj.balls()).is_some() {
                        pairs.extend(self.extract(&xj, yj.balls()[0])?);
                    } else {
                        pairs.extend(rec(&xj, yj, self.eps, &self.budget)?.expect("table and search disagree"));
                    }
                }
                Ok(pairs)
            }
        }
    }
}

/// Whether an ε-correspondence between `x` and `y` exists, by dynamic
/// programming.
pub fn find_corr_dp(x: &UltrametricSpace, y: &UltrametricSpace, eps: &Scalar, opts: &DghOptions) -> Result<bool> {
    let mut dp = Dp::new(x, y, eps, opts)?;
    dp.fill()?;
    Ok(dp.result())
}

/// As [`find_corr_dp`], also extracting a witness from the table.
pub fn find_corr_dp_witness(
    x: &UltrametricSpace,
    y: &UltrametricSpace,
    eps: &Scalar,
    opts: &DghOptions,
) -> Result<Option<Correspondence>> {
    let mut dp = Dp::new(x, y, eps, opts)?;
    dp.fill()?;
    if !dp.result() {
        return Ok(None);
    }
    let whole = SubspaceRef::whole(&dp.tx);
    let pairs = dp.extract(&whole, dp.ty.root())?;
    Ok(Some(Correspondence::new(pairs, x, y)))
}

/// Number of union lookups that fell outside the ε-maximal list; used by tests.
#[cfg(test)]
pub(crate) fn dp_missing_lookups(x: &UltrametricSpace, y: &UltrametricSpace, eps: &Scalar) -> usize {
    let mut dp = Dp::new(x, y, eps, &DghOptions::default()).unwrap();
    dp.fill().unwrap();
    dp.missing
}
