//! Rooted weighted trees of closed balls.
//!
//! A [`UMTree`] stores the closed balls of a finite ultrametric space as an
//! arena. Node ids are preorder positions, so a subtree is the contiguous id
//! range `v..end(v)` and the points of a subtree form a contiguous slice of
//! [`UMTree::leaf_order`]. Children are sorted by (diameter, canonical form),
//! ties broken by representative.
//!
//! Treegrams (trees of ultra-dissimilarity spaces) use the same structure with
//! leaf diameters holding birth times.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{FiniteSpace, MetricSpace, Spectrum, UltraDissimilaritySpace, UltrametricSpace};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    /// Point index of the representative (smallest point index below the node).
    pub representative: usize,
    /// Diameter of the ball; for leaves the self-dissimilarity (0 in ultrametric trees).
    pub diameter: Scalar,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    depth: u32,
    end: NodeId,
    leaf_lo: usize,
    leaf_hi: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UMTree {
    labels: Vec<String>,
    nodes: Vec<Node>,
    leaf_of: Vec<NodeId>,
    leaf_order: Vec<usize>,
}

/// Nested description of a tree, used by the JSON reader and by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NestedTree {
    Leaf { label: String, birth: Scalar },
    Node { diameter: Scalar, children: Vec<NestedTree> },
}

impl NestedTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        NestedTree::Leaf { label: label.into(), birth: Scalar::zero() }
    }

    pub fn node(diameter: Scalar, children: Vec<NestedTree>) -> Self {
        NestedTree::Node { diameter, children }
    }
}

struct RawNode {
    diameter: Scalar,
    children: Vec<usize>,
    point: Option<usize>,
}

/// Post-order of a raw tree rooted at `root`, without recursion.
fn raw_postorder(raw: &[RawNode], root: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(raw.len());
    let mut stack = vec![(root, false)];
    while let Some((v, expanded)) = stack.pop() {
        if expanded {
            out.push(v);
        } else {
            stack.push((v, true));
            for &c in raw[v].children.iter().rev() {
                stack.push((c, false));
            }
        }
    }
    out
}

/// Dense canonical ranks: equal rank iff isomorphic weighted subtrees, and the
/// order is by diameter, then by the sorted sequence of child ranks.
fn canonical_ranks(raw: &[RawNode], order: &[usize]) -> Vec<u32> {
    let mut by_diam: Vec<usize> = order.to_vec();
    by_diam.sort_by(|&a, &b| raw[a].diameter.cmp(&raw[b].diameter));
    let mut rank = vec![0u32; raw.len()];
    let mut next = 0u32;
    let mut i = 0;
    while i < by_diam.len() {
        let mut j = i;
        while j < by_diam.len() && raw[by_diam[j]].diameter == raw[by_diam[i]].diameter {
            j += 1;
        }
        let mut group: Vec<(Vec<u32>, usize)> = by_diam[i..j]
            .iter()
            .map(|&v| {
                let mut seq: Vec<u32> = raw[v].children.iter().map(|&c| rank[c]).collect();
                seq.sort_unstable();
                (seq, v)
            })
            .collect();
        group.sort();
        for k in 0..group.len() {
            if k > 0 && group[k].0 != group[k - 1].0 {
                next += 1;
            }
            rank[group[k].1] = next;
        }
        next += 1;
        i = j;
    }
    rank
}

impl UMTree {
    fn finalize(labels: Vec<String>, mut raw: Vec<RawNode>, root: usize) -> UMTree {
        let post = raw_postorder(&raw, root);
        let mut rep = vec![usize::MAX; raw.len()];
        let mut size = vec![1usize; raw.len()];
        let mut leaves = vec![0usize; raw.len()];
        for &v in &post {
            if let Some(p) = raw[v].point {
                rep[v] = p;
                leaves[v] = 1;
            } else {
                for &c in &raw[v].children {
                    rep[v] = rep[v].min(rep[c]);
                    size[v] += size[c];
                    leaves[v] += leaves[c];
                }
            }
        }
        let rank = canonical_ranks(&raw, &post);
        for node in &mut raw {
            node.children.sort_by_key(|&c| (rank[c], rep[c]));
        }

        let n_points = labels.len();
        let mut nodes: Vec<Node> = Vec::with_capacity(post.len());
        let mut new_id = vec![usize::MAX; raw.len()];
        let mut leaf_of = vec![usize::MAX; n_points];
        let mut leaf_order = Vec::with_capacity(n_points);
        let mut stack = vec![(root, None::<NodeId>, 0u32)];
        while let Some((v, parent, depth)) = stack.pop() {
            let id = nodes.len();
            new_id[v] = id;
            let leaf_lo = leaf_order.len();
            if let Some(p) = raw[v].point {
                leaf_of[p] = id;
                leaf_order.push(p);
            }
            nodes.push(Node {
                representative: rep[v],
                diameter: raw[v].diameter.clone(),
                children: Vec::with_capacity(raw[v].children.len()),
                parent,
                depth,
                end: id + size[v],
                leaf_lo,
                leaf_hi: leaf_lo + leaves[v],
            });
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
            for &c in raw[v].children.iter().rev() {
                stack.push((c, Some(id), depth + 1));
            }
        }
        UMTree { labels, nodes, leaf_of, leaf_order }
    }

    /// Single-linkage dendrogram of a finite metric given by `dist`, computed
    /// from a minimum spanning tree. For an ultrametric `dist` the result
    /// reproduces `dist` exactly.
    fn from_distance_fn(labels: Vec<String>, dist: impl Fn(usize, usize) -> Scalar) -> UMTree {
        let n = labels.len();
        let mut raw: Vec<RawNode> =
            (0..n).map(|p| RawNode { diameter: Scalar::zero(), children: Vec::new(), point: Some(p) }).collect();
        if n == 1 {
            return UMTree::finalize(labels, raw, 0);
        }
        // Prim on the complete graph.
        let mut in_tree = vec![false; n];
        let mut best: Vec<Option<(Scalar, usize)>> = vec![None; n];
        let mut edges: Vec<(Scalar, usize, usize)> = Vec::with_capacity(n - 1);
        in_tree[0] = true;
        for (q, b) in best.iter_mut().enumerate().skip(1) {
            *b = Some((dist(0, q), 0));
        }
        for _ in 1..n {
            let mut pick: Option<usize> = None;
            for q in 0..n {
                if in_tree[q] {
                    continue;
                }
                if pick.is_none_or(|p| best[q].as_ref().unwrap().0 < best[p].as_ref().unwrap().0) {
                    pick = Some(q);
                }
            }
            let q = pick.unwrap();
            in_tree[q] = true;
            let (w, from) = best[q].take().unwrap();
            edges.push((w, from, q));
            for r in 0..n {
                if !in_tree[r] {
                    let d = dist(q, r);
                    if best[r].as_ref().is_none_or(|(bw, _)| &d < bw) {
                        best[r] = Some((d, q));
                    }
                }
            }
        }
        edges.sort_by(|a, b| a.0.cmp(&b.0));

        // Union-find over points; each component remembers its current raw node.
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        let mut cluster: Vec<usize> = (0..n).collect();
        let mut i = 0;
        while i < edges.len() {
            let w = edges[i].0.clone();
            let mut j = i;
            while j < edges.len() && edges[j].0 == w {
                j += 1;
            }
            // Components touched by this weight class, merged locally.
            let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
            let mut touched: Vec<usize> = Vec::new();
            for e in &edges[i..j] {
                let (a, b) = (find(&mut uf, e.1), find(&mut uf, e.2));
                touched.push(a);
                touched.push(b);
                if a != b {
                    uf[a] = b;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for &old_root in &touched {
                let new_root = find(&mut uf, old_root);
                groups.entry(new_root).or_default().push(cluster[old_root]);
            }
            let mut roots: Vec<usize> = groups.keys().copied().collect();
            roots.sort_unstable();
            for r in roots {
                let children = groups.remove(&r).unwrap();
                let id = raw.len();
                raw.push(RawNode { diameter: w.clone(), children, point: None });
                cluster[r] = id;
            }
            i = j;
        }
        let root = cluster[find(&mut uf, 0)];
        UMTree::finalize(labels, raw, root)
    }

    /// Tree of an ultrametric space. The tree's matrix equals the input.
    pub fn from_space(x: &UltrametricSpace) -> UMTree {
        UMTree::from_distance_fn(x.labels().to_vec(), |i, j| x.dist(i, j).clone())
    }

    /// Single-linkage dendrogram of a metric space.
    pub fn single_linkage(x: &MetricSpace) -> UMTree {
        UMTree::from_distance_fn(x.labels().to_vec(), |i, j| x.dist(i, j).clone())
    }

    /// Treegram of an ultra-dissimilarity space: leaves carry birth times.
    pub fn from_dissimilarity(x: &UltraDissimilaritySpace) -> UMTree {
        let mut t = UMTree::from_distance_fn(x.labels().to_vec(), |i, j| {
            if i == j {
                Scalar::zero()
            } else {
                x.dist(i, j).clone()
            }
        });
        for p in 0..x.len() {
            let leaf = t.leaf_of[p];
            t.nodes[leaf].diameter = x.birth(p).clone();
        }
        t
    }

    /// Build from a nested description, checking the tree axioms.
    pub fn from_nested(tree: &NestedTree) -> Result<UMTree> {
        let mut labels = Vec::new();
        let mut seen = HashSet::new();
        let mut raw: Vec<RawNode> = Vec::new();
        let mut stack: Vec<(&NestedTree, Option<usize>)> = vec![(tree, None)];
        while let Some((t, parent)) = stack.pop() {
            let id = raw.len();
            match t {
                NestedTree::Leaf { label, birth } => {
                    if birth.is_negative() {
                        return Err(Error::InvalidTree(format!("negative birth at leaf {label}")));
                    }
                    if !seen.insert(label.clone()) {
                        return Err(Error::DuplicateLabel(label.clone()));
                    }
                    raw.push(RawNode { diameter: birth.clone(), children: Vec::new(), point: Some(labels.len()) });
                    labels.push(label.clone());
                }
                NestedTree::Node { diameter, children } => {
                    if children.len() < 2 {
                        return Err(Error::InvalidTree(format!(
                            "internal node at {diameter} has {} children",
                            children.len()
                        )));
                    }
                    raw.push(RawNode { diameter: diameter.clone(), children: Vec::new(), point: None });
                    for c in children.iter().rev() {
                        stack.push((c, Some(id)));
                    }
                }
            }
            if let Some(p) = parent {
                if raw[id].diameter >= raw[p].diameter {
                    return Err(Error::InvalidTree(format!(
                        "child diameter {} not below parent diameter {}",
                        raw[id].diameter, raw[p].diameter
                    )));
                }
                raw[p].children.push(id);
            }
        }
        Ok(UMTree::finalize(labels, raw, 0))
    }

    /// Nested description of this tree.
    pub fn to_nested(&self) -> NestedTree {
        let mut built: Vec<Option<NestedTree>> = vec![None; self.nodes.len()];
        for v in (0..self.nodes.len()).rev() {
            let node = &self.nodes[v];
            built[v] = Some(if node.children.is_empty() {
                NestedTree::Leaf { label: self.labels[node.representative].clone(), birth: node.diameter.clone() }
            } else {
                NestedTree::Node {
                    diameter: node.diameter.clone(),
                    children: node.children.iter().map(|&c| built[c].take().unwrap()).collect(),
                }
            });
        }
        built[0].take().unwrap()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of points (leaves).
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn diameter(&self, v: NodeId) -> &Scalar {
        &self.nodes[v].diameter
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v].children
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v].parent
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v].children.is_empty()
    }

    pub fn representative_label(&self, v: NodeId) -> &str {
        &self.labels[self.nodes[v].representative]
    }

    /// Leaf node of point `p`.
    pub fn leaf(&self, p: usize) -> NodeId {
        self.leaf_of[p]
    }

    /// Points in preorder of their leaves.
    pub fn leaf_order(&self) -> &[usize] {
        &self.leaf_order
    }

    /// Points of the ball at `v`.
    pub fn points(&self, v: NodeId) -> &[usize] {
        let n = &self.nodes[v];
        &self.leaf_order[n.leaf_lo..n.leaf_hi]
    }

    /// Number of points of the ball at `v`.
    pub fn ball_size(&self, v: NodeId) -> usize {
        self.nodes[v].leaf_hi - self.nodes[v].leaf_lo
    }

    /// One past the last id of the subtree at `v`.
    pub fn subtree_end(&self, v: NodeId) -> NodeId {
        self.nodes[v].end
    }

    /// True when `d` lies in the subtree of `a` (including `a` itself).
    pub fn is_ancestor(&self, a: NodeId, d: NodeId) -> bool {
        a <= d && d < self.nodes[a].end
    }

    pub fn lca(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent.unwrap();
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent.unwrap();
        }
        while a != b {
            a = self.nodes[a].parent.unwrap();
            b = self.nodes[b].parent.unwrap();
        }
        a
    }

    /// Distance between points; the birth time when `p == q`.
    pub fn dist(&self, p: usize, q: usize) -> &Scalar {
        &self.nodes[self.lca(self.leaf_of[p], self.leaf_of[q])].diameter
    }

    /// True when some leaf carries a positive birth time.
    pub fn has_births(&self) -> bool {
        self.leaf_of.iter().any(|&l| !self.nodes[l].diameter.is_zero())
    }

    /// Distinct node diameters, which coincide with the spectrum of the space.
    pub fn spectrum(&self) -> Spectrum {
        let mut values: Vec<Scalar> = self.nodes.iter().map(|n| n.diameter.clone()).collect();
        if !self.has_births() {
            values.push(Scalar::zero());
        }
        Spectrum::from_values(values)
    }

    fn matrix_data(&self) -> Vec<Scalar> {
        let n = self.len();
        let mut data = vec![Scalar::zero(); n * n];
        for p in 0..n {
            data[p * n + p] = self.nodes[self.leaf_of[p]].diameter.clone();
        }
        for (v, node) in self.nodes.iter().enumerate() {
            let ch = &node.children;
            for a in 0..ch.len() {
                for b in a + 1..ch.len() {
                    for &p in self.points(ch[a]) {
                        for &q in self.points(ch[b]) {
                            data[p * n + q] = self.nodes[v].diameter.clone();
                            data[q * n + p] = self.nodes[v].diameter.clone();
                        }
                    }
                }
            }
        }
        data
    }

    /// The ultrametric read off the tree: `u(x, x')` is the diameter of the
    /// lowest common ancestor. Birth times are dropped.
    pub fn to_matrix(&self) -> UltrametricSpace {
        let n = self.len();
        let mut data = self.matrix_data();
        for p in 0..n {
            data[p * n + p] = Scalar::zero();
        }
        UltrametricSpace::from_trusted(self.labels.clone(), data)
    }

    /// The ultra-dissimilarity read off a treegram, births on the diagonal.
    pub fn to_dissimilarity(&self) -> UltraDissimilaritySpace {
        UltraDissimilaritySpace::from_trusted(self.labels.clone(), self.matrix_data())
    }

    /// Collapse every ball of diameter `<= t` to a leaf labelled by its
    /// representative. Leaves with birth above `t` keep their birth.
    pub fn closed_quotient(&self, t: &Scalar) -> UMTree {
        let mut labels = Vec::new();
        let mut raw: Vec<RawNode> = Vec::new();
        let mut stack: Vec<(NodeId, Option<usize>)> = vec![(0, None)];
        while let Some((v, parent)) = stack.pop() {
            let id = raw.len();
            let node = &self.nodes[v];
            if node.children.is_empty() || &node.diameter <= t {
                let birth = if &node.diameter > t { node.diameter.clone() } else { Scalar::zero() };
                raw.push(RawNode { diameter: birth, children: Vec::new(), point: Some(labels.len()) });
                labels.push(node.representative);
            } else {
                raw.push(RawNode { diameter: node.diameter.clone(), children: Vec::new(), point: None });
                for &c in node.children.iter().rev() {
                    stack.push((c, Some(id)));
                }
            }
            if let Some(p) = parent {
                raw[p].children.push(id);
            }
        }
        // Keep the ambient order of the surviving representatives.
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&k| labels[k]);
        let mut pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        for r in &mut raw {
            if let Some(p) = r.point.as_mut() {
                *p = pos[*p];
            }
        }
        let labels = order.iter().map(|&k| self.labels[labels[k]].clone()).collect();
        UMTree::finalize(labels, raw, 0)
    }

    /// Canonical byte string: each node writes `(diameter` followed by the
    /// codes of its children in canonical order and `)`. Two trees have equal
    /// codes iff their spaces are isometric.
    pub fn canonical_code(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut stack: Vec<(NodeId, bool)> = vec![(0, false)];
        while let Some((v, close)) = stack.pop() {
            if close {
                out.push(b')');
                continue;
            }
            out.push(b'(');
            out.extend_from_slice(self.nodes[v].diameter.to_string().as_bytes());
            stack.push((v, true));
            for &c in self.nodes[v].children.iter().rev() {
                stack.push((c, false));
            }
        }
        out
    }
}

/// Isometry test by a shared AHU labelling of both trees.
pub fn is_isometric(a: &UMTree, b: &UMTree) -> bool {
    if a.len() != b.len() || a.node_count() != b.node_count() {
        return false;
    }
    LevelSignature::new(a, b).isometric_at(None)
}

/// AHU labellings of two trees at a common quotient level. Diameters are
/// replaced by their rank in the merged spectrum so that keys are integers.
pub(crate) struct LevelSignature<'a> {
    trees: [&'a UMTree; 2],
    ranks: [Vec<u32>; 2],
    /// Merged sorted spectrum of both trees.
    pub(crate) levels: Vec<Scalar>,
}

#[derive(Hash, PartialEq, Eq)]
enum SigKey {
    Collapsed,
    Leaf(u32),
    Inner(u32, Vec<u32>),
}

impl<'a> LevelSignature<'a> {
    pub(crate) fn new(a: &'a UMTree, b: &'a UMTree) -> Self {
        let mut levels: Vec<Scalar> = a
            .nodes
            .iter()
            .chain(b.nodes.iter())
            .map(|n| n.diameter.clone())
            .collect();
        levels.push(Scalar::zero());
        levels.sort();
        levels.dedup();
        let rank_of = |t: &UMTree| -> Vec<u32> {
            t.nodes.iter().map(|n| levels.binary_search(&n.diameter).unwrap() as u32).collect()
        };
        let ranks = [rank_of(a), rank_of(b)];
        LevelSignature { trees: [a, b], ranks, levels }
    }

    /// Whether the closed quotients at `levels[level]` are isometric; `None`
    /// compares the trees themselves.
    pub(crate) fn isometric_at(&self, level: Option<usize>) -> bool {
        let mut table: HashMap<SigKey, u32> = HashMap::new();
        let mut roots = [0u32; 2];
        for (side, root) in roots.iter_mut().enumerate() {
            let t = self.trees[side];
            let ranks = &self.ranks[side];
            let mut id = vec![0u32; t.nodes.len()];
            for v in (0..t.nodes.len()).rev() {
                let node = &t.nodes[v];
                let collapsed = level.is_some_and(|l| ranks[v] as usize <= l);
                let key = if collapsed {
                    SigKey::Collapsed
                } else if node.children.is_empty() {
                    SigKey::Leaf(ranks[v])
                } else {
                    let mut ch: Vec<u32> = node.children.iter().map(|&c| id[c]).collect();
                    ch.sort_unstable();
                    SigKey::Inner(ranks[v], ch)
                };
                let next = table.len() as u32;
                id[v] = *table.entry(key).or_insert(next);
            }
            *root = id[0];
        }
        roots[0] == roots[1]
    }
}

/// A union of disjoint closed balls of an ambient tree, stored as its unique
/// maximal ball decomposition in ascending node order.
#[derive(Clone, Debug)]
pub struct SubspaceRef {
    ambient: Arc<UMTree>,
    balls: Vec<NodeId>,
    diameter: Scalar,
}

impl PartialEq for SubspaceRef {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ambient, &other.ambient) && self.balls == other.balls
    }
}

impl Eq for SubspaceRef {}

impl SubspaceRef {
    pub fn whole(ambient: &Arc<UMTree>) -> Self {
        SubspaceRef::ball(ambient, ambient.root())
    }

    pub fn ball(ambient: &Arc<UMTree>, v: NodeId) -> Self {
        SubspaceRef { ambient: Arc::clone(ambient), balls: vec![v], diameter: ambient.diameter(v).clone() }
    }

    /// Canonicalize a set of disjoint balls: whenever all children of a node
    /// are present they are replaced by the node.
    fn tame(ambient: &Arc<UMTree>, mut balls: Vec<NodeId>) -> Self {
        balls.sort_unstable();
        balls.dedup();
        if balls.len() > 1 {
            let t = ambient.as_ref();
            let mut present: HashSet<NodeId> = balls.iter().copied().collect();
            let mut work: Vec<NodeId> = balls.clone();
            while let Some(v) = work.pop() {
                if !present.contains(&v) {
                    continue;
                }
                let Some(p) = t.parent(v) else { continue };
                if present.contains(&p) {
                    continue;
                }
                if t.children(p).iter().all(|c| present.contains(c)) {
                    for c in t.children(p) {
                        present.remove(c);
                    }
                    present.insert(p);
                    work.push(p);
                }
            }
            balls = present.into_iter().collect();
            balls.sort_unstable();
        }
        let diameter = if balls.len() == 1 {
            ambient.diameter(balls[0]).clone()
        } else {
            ambient.diameter(ambient.lca(balls[0], *balls.last().unwrap())).clone()
        };
        SubspaceRef { ambient: Arc::clone(ambient), balls, diameter }
    }

    /// The subspace on the given points (indices of the ambient space).
    pub fn from_points(ambient: &Arc<UMTree>, points: &[usize]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySpace);
        }
        let leaves: Vec<NodeId> = points.iter().map(|&p| ambient.leaf(p)).collect();
        Ok(SubspaceRef::tame(ambient, leaves))
    }

    pub fn ambient(&self) -> &Arc<UMTree> {
        &self.ambient
    }

    /// The ball decomposition, ascending by node id.
    pub fn balls(&self) -> &[NodeId] {
        &self.balls
    }

    pub fn diameter(&self) -> &Scalar {
        &self.diameter
    }

    /// True when the subspace is a single ambient ball.
    pub fn is_ball(&self) -> bool {
        self.balls.len() == 1
    }

    pub fn len(&self) -> usize {
        self.balls.iter().map(|&b| self.ambient.ball_size(b)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Member points (ambient indices), in leaf order.
    pub fn points(&self) -> Vec<usize> {
        self.balls.iter().flat_map(|&b| self.ambient.points(b).iter().copied()).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.points().into_iter().map(|p| self.ambient.labels()[p].as_str()).collect()
    }

    /// Highest ancestor of `v` (or `v` itself) with diameter `< t`; assumes
    /// `diam(v) < t`.
    fn top_below(&self, mut v: NodeId, t: &Scalar) -> NodeId {
        let tree = self.ambient.as_ref();
        while let Some(p) = tree.parent(v) {
            if tree.diameter(p) < t {
                v = p;
            } else {
                break;
            }
        }
        v
    }
}

/// Blocks of a partition of a subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<SubspaceRef>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Classes of the relation `u < t` on `s`; singletons when `t = 0`.
pub fn open_partition(s: &SubspaceRef, t: &Scalar) -> Partition {
    let tree = s.ambient.as_ref();
    let ambient = &s.ambient;
    if t.is_zero() {
        let blocks = s.points().into_iter().map(|p| SubspaceRef::ball(ambient, tree.leaf(p))).collect();
        return sorted_partition(blocks);
    }
    let mut grouped: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    let mut blocks = Vec::new();
    for &d in &s.balls {
        if tree.diameter(d) < t {
            grouped.entry(s.top_below(d, t)).or_default().push(d);
        } else {
            let mut stack = vec![d];
            while let Some(v) = stack.pop() {
                if tree.diameter(v) < t {
                    blocks.push(SubspaceRef::ball(ambient, v));
                } else {
                    stack.extend(tree.children(v).iter().copied());
                }
            }
        }
    }
    for (_, members) in grouped {
        blocks.push(SubspaceRef::tame(ambient, members));
    }
    sorted_partition(blocks)
}

fn sorted_partition(mut blocks: Vec<SubspaceRef>) -> Partition {
    blocks.sort_by_key(|b| b.balls[0]);
    Partition { blocks }
}

/// Union of disjoint subspaces of the same ambient tree.
pub fn subspace_union(blocks: &[SubspaceRef]) -> Result<SubspaceRef> {
    let first = blocks.first().ok_or(Error::EmptySpace)?;
    if blocks.iter().any(|b| !Arc::ptr_eq(&b.ambient, &first.ambient)) {
        return Err(Error::MixedAmbient);
    }
    let tree = first.ambient.as_ref();
    let mut all: Vec<NodeId> = blocks.iter().flat_map(|b| b.balls.iter().copied()).collect();
    all.sort_unstable();
    for w in all.windows(2) {
        if tree.is_ancestor(w[0], w[1]) {
            return Err(Error::OverlappingBlocks);
        }
    }
    Ok(SubspaceRef::tame(&first.ambient, all))
}

/// Union of balls already known to be pairwise disjoint.
pub(crate) fn union_of_balls(ambient: &Arc<UMTree>, balls: Vec<NodeId>) -> SubspaceRef {
    SubspaceRef::tame(ambient, balls)
}

pub fn ball_decomposition(s: &SubspaceRef) -> Vec<NodeId> {
    s.balls.clone()
}

pub fn build_tree(x: &UltrametricSpace) -> UMTree {
    UMTree::from_space(x)
}

pub fn tree_to_matrix(t: &UMTree) -> UltrametricSpace {
    t.to_matrix()
}

pub fn closed_quotient(t: &UMTree, level: &Scalar) -> UMTree {
    t.closed_quotient(level)
}

pub fn canonical_code(t: &UMTree) -> Vec<u8> {
    t.canonical_code()
}

/// Lexicographic comparison helper for codes (exposed for tests).
pub fn compare_codes(a: &UMTree, b: &UMTree) -> Ordering {
    a.canonical_code().cmp(&b.canonical_code())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_integer(v)
    }

    fn x3() -> UltrametricSpace {
        UltrametricSpace::from_integers(&[vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]], Some(&["a", "b", "c"]))
            .unwrap()
    }

    fn y3() -> UltrametricSpace {
        UltrametricSpace::from_integers(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]], Some(&["a", "b", "c"]))
            .unwrap()
    }

    fn sample() -> UltrametricSpace {
        UltrametricSpace::from_integers(&[vec![0, 1, 3], vec![1, 0, 3], vec![3, 3, 0]], Some(&["a", "b", "c"]))
            .unwrap()
    }

    fn set(sub: &SubspaceRef) -> Vec<&str> {
        let mut l = sub.labels();
        l.sort();
        l
    }

    #[test]
    fn builds_x3() {
        let t = build_tree(&x3());
        assert_eq!(t.node_count(), 5);
        assert_eq!(t.diameter(0), &s(2));
        let ch = t.children(0);
        assert_eq!(ch.len(), 2);
        assert!(t.is_leaf(ch[0]));
        assert_eq!(t.representative_label(ch[0]), "c");
        assert_eq!(t.diameter(ch[1]), &s(1));
        let mut pts: Vec<&str> = t.points(ch[1]).iter().map(|&p| t.labels()[p].as_str()).collect();
        pts.sort();
        assert_eq!(pts, ["a", "b"]);
        assert_eq!(tree_to_matrix(&t), x3());
    }

    #[test]
    fn builds_degenerate_and_flat() {
        let one = UltrametricSpace::from_integers(&[vec![0]], None).unwrap();
        let t = build_tree(&one);
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.diameter(0), &Scalar::zero());
        assert_eq!(tree_to_matrix(&t), one);
        let t = build_tree(&y3());
        assert_eq!(t.node_count(), 4);
        assert_eq!(t.children(0).len(), 3);
    }

    #[test]
    fn matrix_from_nested() {
        let nested = NestedTree::node(
            s(3),
            vec![NestedTree::node(s(1), vec![NestedTree::leaf("a"), NestedTree::leaf("b")]), NestedTree::leaf("c")],
        );
        let t = UMTree::from_nested(&nested).unwrap();
        let m = t.to_matrix();
        assert_eq!(m, sample());
        let back = UMTree::from_nested(&t.to_nested()).unwrap();
        assert!(is_isometric(&back, &t));
        assert_eq!(back.to_nested(), t.to_nested());
        let bad = NestedTree::node(s(1), vec![NestedTree::node(s(1), vec![NestedTree::leaf("a"), NestedTree::leaf("b")])]);
        assert!(matches!(UMTree::from_nested(&bad), Err(Error::InvalidTree(_))));
        let bad = NestedTree::node(s(1), vec![NestedTree::node(s(2), vec![NestedTree::leaf("a"), NestedTree::leaf("b")]), NestedTree::leaf("c")]);
        assert!(matches!(UMTree::from_nested(&bad), Err(Error::InvalidTree(_))));
    }

    #[test]
    fn closed_quotients_of_x3() {
        let t = build_tree(&x3());
        let q1 = closed_quotient(&t, &s(1));
        assert_eq!(q1.len(), 2);
        assert_eq!(q1.diameter(0), &s(2));
        let mut l = q1.labels().to_vec();
        l.sort();
        assert_eq!(l, ["a", "c"]);
        assert_eq!(closed_quotient(&t, &Scalar::zero()), t);
        assert_eq!(closed_quotient(&t, &s(2)).len(), 1);
        assert_eq!(closed_quotient(&q1, &s(1)), q1);
    }

    #[test]
    fn open_partitions_of_x3() {
        let t = Arc::new(build_tree(&x3()));
        let whole = SubspaceRef::whole(&t);
        let p = open_partition(&whole, &s(2));
        let blocks: Vec<Vec<&str>> = p.blocks.iter().map(set).collect();
        assert_eq!(p.len(), 2);
        assert!(blocks.contains(&vec!["a", "b"]) && blocks.contains(&vec!["c"]));
        assert_eq!(open_partition(&whole, &s(3)).len(), 1);
        assert_eq!(open_partition(&whole, &Scalar::zero()).len(), 3);
        assert_eq!(open_partition(&whole, &Scalar::ratio(1, 2)).len(), 3);
        assert!(open_partition(&whole, &s(2)).blocks.iter().all(|b| b.is_ball()));
    }

    #[test]
    fn open_partition_of_union_groups_by_ancestor() {
        let t = Arc::new(build_tree(&sample()));
        let a = SubspaceRef::from_points(&t, &[0]).unwrap();
        let c = SubspaceRef::from_points(&t, &[2]).unwrap();
        let ac = subspace_union(&[a, c]).unwrap();
        assert_eq!(ac.balls().len(), 2);
        assert_eq!(open_partition(&ac, &s(4)).len(), 1);
        assert_eq!(open_partition(&ac, &s(3)).len(), 2);
        assert_eq!(open_partition(&ac, &s(2)).len(), 2);
    }

    #[test]
    fn unions_and_decompositions() {
        let t = Arc::new(build_tree(&x3()));
        let a = SubspaceRef::from_points(&t, &[0]).unwrap();
        let b = SubspaceRef::from_points(&t, &[1]).unwrap();
        let c = SubspaceRef::from_points(&t, &[2]).unwrap();
        let ac = subspace_union(&[a.clone(), c.clone()]).unwrap();
        assert_eq!(ac.diameter(), &s(2));
        assert_eq!(set(&ac), ["a", "c"]);
        assert_eq!(subspace_union(std::slice::from_ref(&a)).unwrap(), a);
        let ab = subspace_union(&[a.clone(), b.clone()]).unwrap();
        assert!(ab.is_ball());
        assert_eq!(ab.diameter(), &s(1));
        assert_eq!(ball_decomposition(&ab).len(), 1);
        assert_eq!(ball_decomposition(&SubspaceRef::whole(&t)), vec![0]);
        assert_eq!(subspace_union(&[ab.clone(), a.clone()]).unwrap_err(), Error::OverlappingBlocks);
        let other = Arc::new(build_tree(&x3()));
        let foreign = SubspaceRef::whole(&other);
        assert_eq!(subspace_union(&[a, foreign]).unwrap_err(), Error::MixedAmbient);
        let all = subspace_union(&[ab, c]).unwrap();
        assert_eq!(all.balls(), &[0]);
    }

    #[test]
    fn sample_decomposition() {
        let t = Arc::new(build_tree(&sample()));
        let ac = SubspaceRef::from_points(&t, &[0, 2]).unwrap();
        assert_eq!(ac.balls().len(), 2);
        assert!(ac.balls().iter().all(|&v| t.is_leaf(v)));
    }

    #[test]
    fn isometry() {
        let x = x3();
        let perm = UltrametricSpace::from_integers(&[vec![0, 2, 2], vec![2, 0, 1], vec![2, 1, 0]], Some(&["c", "a", "b"]))
            .unwrap();
        let (tx, tp, ty) = (build_tree(&x), build_tree(&perm), build_tree(&y3()));
        assert!(is_isometric(&tx, &tp));
        assert_eq!(canonical_code(&tx), canonical_code(&tp));
        assert!(!is_isometric(&tx, &ty));
        assert_ne!(canonical_code(&tx), canonical_code(&ty));
        let a = build_tree(&UltrametricSpace::from_integers(&[vec![0, 1], vec![1, 0]], None).unwrap());
        let b = build_tree(&UltrametricSpace::from_integers(&[vec![0, 2], vec![2, 0]], None).unwrap());
        assert!(!is_isometric(&a, &b));
        assert_eq!(compare_codes(&a, &a), Ordering::Equal);
    }

    #[test]
    fn treegram_round_trip() {
        let x = UltraDissimilaritySpace::from_integers(&[vec![0, 2, 3], vec![2, 1, 3], vec![3, 3, 2]], None).unwrap();
        let t = UMTree::from_dissimilarity(&x);
        assert!(t.has_births());
        assert_eq!(t.to_dissimilarity(), x);
        let q = t.closed_quotient(&s(1));
        let m = q.to_dissimilarity();
        assert_eq!(m.len(), 3);
        assert_eq!(m.birth(m.index_of("p2").unwrap()), &s(2));
    }
}
