//! Back arcs, head sets and the tree decomposition induced by a 1-optimal
//! out-branching.

use crate::arborescence::{find_improving_change, OutTree};
use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

/// `Back(z) = {(u, v) : v ≺_T z ⪯_T u}`, in input arc order.
pub fn back_arcs(d: &Digraph, t: &OutTree, z: VertexId) -> Result<Vec<Arc>> {
    if z >= d.n() || !t.contains(z) {
        return Err(Error::NotInTree(z));
    }
    let iv = t.intervals();
    Ok(d
        .arcs()
        .iter()
        .copied()
        .filter(|&(u, v)| {
            t.contains(u) && t.contains(v) && v != z && iv.is_ancestor(v, z) && iv.is_ancestor(z, u)
        })
        .collect())
}

/// `Back(z)` and `Head(Back(z))` for every tree vertex, materialized.
///
/// Quadratic in the worst case; meant for inspection and tests. The solver
/// only needs [`head_sets`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackArcIndex {
    back: Vec<Vec<Arc>>,
    heads: Vec<Vec<VertexId>>,
}

impl BackArcIndex {
    pub fn new(d: &Digraph, t: &OutTree) -> Self {
        let n = d.n();
        let iv = t.intervals();
        let mut back = vec![Vec::new(); n];
        for &(u, v) in d.arcs() {
            if !t.contains(u) || !t.contains(v) || u == v || !iv.is_ancestor(v, u) {
                continue;
            }
            let mut z = u;
            while z != v {
                back[z].push((u, v));
                z = t.parent(z).expect("v is a proper ancestor");
            }
        }
        let heads = back
            .iter()
            .map(|arcs| {
                let mut h: Vec<VertexId> = arcs.iter().map(|&(_, v)| v).collect();
                h.sort_unstable();
                h.dedup();
                h
            })
            .collect();
        BackArcIndex { back, heads }
    }

    pub fn back(&self, z: VertexId) -> &[Arc] {
        &self.back[z]
    }

    pub fn heads(&self, z: VertexId) -> &[VertexId] {
        &self.heads[z]
    }
}

/// `Head(Back(z))` for every tree vertex `z` (sorted), computed bottom-up by
/// merging the smaller head set into the larger one.
pub fn head_sets(d: &Digraph, t: &OutTree) -> Vec<Vec<VertexId>> {
    let mut out = vec![Vec::new(); d.n()];
    fold_head_sets(d, t, |z, set, by_tin| {
        out[z] = set.iter().map(|&i| by_tin[i]).collect();
        out[z].sort_unstable();
    });
    out
}

/// The vertex maximizing `|Head(Back(z))|` with that count. Ties go to the
/// smallest id; when no back arc exists the root is returned with 0.
pub fn max_back_head_count(d: &Digraph, t: &OutTree) -> (VertexId, usize) {
    let mut best = (t.root(), 0);
    fold_head_sets(d, t, |z, set, _| {
        let c = set.len();
        if c > best.1 || (c == best.1 && c > 0 && z < best.0) {
            best = (z, c);
        }
    });
    best
}

/// Post-order walk handing each vertex its head set, keyed by preorder rank.
///
/// Every head that enters the set of `z` is an ancestor of some descendant
/// of `z`, so it is either a proper ancestor of `z` or inside the subtree of
/// `z`; the latter have rank `≥ tin(z)` and sit at the top of the set, and
/// stay irrelevant further up.
fn fold_head_sets(
    d: &Digraph,
    t: &OutTree,
    mut visit: impl FnMut(VertexId, &BTreeSet<usize>, &[VertexId]),
) {
    let order = t.preorder();
    let mut rank = vec![usize::MAX; d.n()];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    // Subtree of v occupies ranks rank[v] .. rank[v] + size[v].
    let mut size = vec![1usize; d.n()];
    for &v in order.iter().rev() {
        if let Some(p) = t.parent(v) {
            size[p] += size[v];
        }
    }
    let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); d.n()];
    for &z in order.iter().rev() {
        let mut set = BTreeSet::new();
        for &c in t.children(z) {
            let mut child = std::mem::take(&mut sets[c]);
            if child.len() > set.len() {
                std::mem::swap(&mut child, &mut set);
            }
            set.extend(child);
        }
        for (_, h) in d.out_arcs(z).iter().map(|&a| d.arc(a)) {
            if rank[h] < rank[z] && rank[z] < rank[h] + size[h] {
                set.insert(rank[h]);
            }
        }
        while set.last().is_some_and(|&top| top >= rank[z]) {
            set.pop_last();
        }
        visit(z, &set, &order);
        sets[z] = set;
    }
}

/// A tree decomposition: bags on nodes `0..N`, undirected skeleton edges and
/// a designated root node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<VertexId>>,
    edges: Vec<(usize, usize)>,
    root: usize,
    width: usize,
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated; the skeleton is not checked here.
    pub fn new(mut bags: Vec<Vec<VertexId>>, edges: Vec<(usize, usize)>, root: usize) -> Self {
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        let width = bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1);
        TreeDecomposition { bags, edges, root, width }
    }

    pub fn bags(&self) -> &[Vec<VertexId>] {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> &[VertexId] {
        &self.bags[node]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Parent of every node when the skeleton is hung from the root; `None`
    /// unless the skeleton is a tree on all nodes.
    pub fn rooted_parents(&self) -> Option<Vec<Option<usize>>> {
        let n = self.bags.len();
        if self.root >= n || self.edges.len() + 1 != n {
            return None;
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            if a >= n || b >= n || a == b {
                return None;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[self.root] = true;
        let mut queue = VecDeque::from([self.root]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        seen.iter().all(|&s| s).then_some(parent)
    }

    /// `root <r>`, then `node <i>: <bag>` per node, then `arc <a> <b>` per edge.
    pub fn to_dump_string(&self) -> String {
        let mut s = format!("root {}\n", self.root);
        for (i, bag) in self.bags.iter().enumerate() {
            let items: Vec<String> = bag.iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("node {i}: {}\n", items.join(" ")).replace(": \n", ":\n"));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("arc {a} {b}\n"));
        }
        s
    }

    /// Inverse of [`to_dump_string`](Self::to_dump_string). Node ids must be
    /// exactly `0..N` in some order; the root defaults to node 0.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let bad = |line: usize, what: &str| {
            Error::InvalidDecomposition(format!("line {line}: {what}"))
        };
        let mut root = None;
        let mut nodes: Vec<(usize, Vec<VertexId>)> = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let num = |tok: &str| tok.parse::<usize>().map_err(|_| bad(line_no, "expected an integer"));
            if let Some(rest) = line.strip_prefix("node ") {
                let (id, bag) = rest.split_once(':').ok_or_else(|| bad(line_no, "missing ':'"))?;
                let bag = bag.split_whitespace().map(num).collect::<Result<Vec<_>>>()?;
                nodes.push((num(id.trim())?, bag));
            } else if let Some(rest) = line.strip_prefix("arc ") {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let [a, b] = toks[..] else {
                    return Err(bad(line_no, "arc needs two node ids"));
                };
                edges.push((num(a)?, num(b)?));
            } else if let Some(rest) = line.strip_prefix("root ") {
                root = Some(num(rest.trim())?);
            } else {
                return Err(bad(line_no, "unrecognized line"));
            }
        }
        let mut bags = vec![None; nodes.len()];
        for (id, bag) in nodes {
            let slot = bags
                .get_mut(id)
                .ok_or_else(|| Error::InvalidDecomposition(format!("node id {id} out of range")))?;
            if slot.replace(bag).is_some() {
                return Err(Error::InvalidDecomposition(format!("node {id} listed twice")));
            }
        }
        let bags: Vec<Vec<VertexId>> = bags.into_iter().map(|b| b.expect("ids are a permutation")).collect();
        Ok(TreeDecomposition::new(bags, edges, root.unwrap_or(0)))
    }
}

/// First failed requirement found by [`validate_tree_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TdViolation {
    /// The skeleton is not a tree over the nodes, or a bag names a vertex
    /// outside the digraph.
    Skeleton(String),
    /// Axiom 1: the vertex occurs in no bag.
    MissingVertex(VertexId),
    /// Axiom 2: no bag holds both ends of the arc.
    UncoveredArc(Arc),
    /// Axiom 3: the bags holding the vertex are not connected.
    DisconnectedVertex(VertexId),
}

impl TdViolation {
    /// Axiom number, or 0 for a malformed skeleton.
    pub fn axiom(&self) -> u8 {
        match self {
            TdViolation::Skeleton(_) => 0,
            TdViolation::MissingVertex(_) => 1,
            TdViolation::UncoveredArc(_) => 2,
            TdViolation::DisconnectedVertex(_) => 3,
        }
    }
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::Skeleton(msg) => write!(f, "malformed skeleton: {msg}"),
            TdViolation::MissingVertex(v) => write!(f, "axiom 1: vertex {v} is in no bag"),
            TdViolation::UncoveredArc((u, v)) => {
                write!(f, "axiom 2: no bag contains both ends of arc ({u}, {v})")
            }
            TdViolation::DisconnectedVertex(v) => {
                write!(f, "axiom 3: bags containing vertex {v} are not connected")
            }
        }
    }
}

/// Check the three decomposition axioms; `Err` names the first failure.
pub fn validate_tree_decomposition(
    d: &Digraph,
    td: &TreeDecomposition,
) -> std::result::Result<(), TdViolation> {
    let parent = td
        .rooted_parents()
        .ok_or_else(|| TdViolation::Skeleton("skeleton is not a tree on the nodes".into()))?;
    let n = d.n();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(TdViolation::Skeleton(format!("node {i} holds vertex {v} ≥ {n}")));
            }
            holders[v].push(i);
        }
    }
    if let Some(v) = (0..n).find(|&v| holders[v].is_empty()) {
        return Err(TdViolation::MissingVertex(v));
    }
    for &(u, v) in d.arcs() {
        if !sorted_intersect(&holders[u], &holders[v]) {
            return Err(TdViolation::UncoveredArc((u, v)));
        }
    }
    for (v, held) in holders.iter().enumerate() {
        let tops = held
            .iter()
            .filter(|&&i| parent[i].is_none_or(|p| held.binary_search(&p).is_err()))
            .count();
        if tops != 1 {
            return Err(TdViolation::DisconnectedVertex(v));
        }
    }
    Ok(())
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// The decomposition with skeleton `T` and bag
/// `X_v = {parent(v), v} ∪ BrSucc(T) ∪ Leaf(T) ∪ Head(Back(v))` on node `v`.
///
/// `T` must be a 1-optimal out-branching of `D`; this is verified.
pub fn build_tree_decomposition(d: &Digraph, t: &OutTree) -> Result<TreeDecomposition> {
    t.validate_in(d)?;
    if !t.is_spanning() {
        return Err(Error::InvalidTree("not spanning".into()));
    }
    if let Some((u, v)) = find_improving_change(d, t) {
        return Err(Error::NotOneOptimal(u, v));
    }
    let roles = t.role_sets();
    let mut common = roles.leaves;
    common.extend_from_slice(&roles.br_succ);
    let heads = head_sets(d, t);
    let bags = d
        .vertices()
        .zip(heads)
        .map(|(v, mut bag)| {
            bag.extend_from_slice(&common);
            bag.push(v);
            bag.extend(t.parent(v));
            bag
        })
        .collect();
    let mut edges = t.arcs();
    edges.sort_unstable();
    Ok(TreeDecomposition::new(bags, edges, t.root()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_with_back_arcs() -> (Digraph, OutTree) {
        let d = Digraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)]).unwrap();
        let t = OutTree::from_arcs(4, 0, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        (d, t)
    }

    #[test]
    fn back_arc_examples() {
        let (d, t) = path_with_back_arcs();
        assert_eq!(back_arcs(&d, &t, 2).unwrap(), vec![(3, 0), (2, 1)]);
        assert_eq!(back_arcs(&d, &t, 1).unwrap(), vec![(3, 0)]);
        assert!(back_arcs(&d, &t, 0).unwrap().is_empty());
        let idx = BackArcIndex::new(&d, &t);
        for z in 0..4 {
            let mut direct = back_arcs(&d, &t, z).unwrap();
            let mut indexed = idx.back(z).to_vec();
            direct.sort_unstable();
            indexed.sort_unstable();
            assert_eq!(direct, indexed);
        }
        assert_eq!(idx.heads(2), &[0, 1]);
    }

    #[test]
    fn head_count_examples() {
        let (d, t) = path_with_back_arcs();
        assert_eq!(max_back_head_count(&d, &t), (2, 2));
        assert_eq!(head_sets(&d, &t), vec![vec![], vec![0], vec![0, 1], vec![0]]);

        let d = Digraph::new(3, [(2, 0), (2, 1)]).unwrap();
        let t = OutTree::from_arcs(3, 2, &[(2, 0), (2, 1)]).unwrap();
        assert_eq!(max_back_head_count(&d, &t), (2, 0));

        let n = 6;
        let c = Digraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
        let p = OutTree::from_arcs(n, 0, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        assert_eq!(max_back_head_count(&c, &p), (1, 1));
    }

    #[test]
    fn bag_examples() {
        let (d, t) = path_with_back_arcs();
        let td = build_tree_decomposition(&d, &t).unwrap();
        assert_eq!(td.bag(2), &[0, 1, 2, 3]);
        assert_eq!(validate_tree_decomposition(&d, &td), Ok(()));

        let d = Digraph::new(3, [(0, 1), (0, 2)]).unwrap();
        let t = OutTree::from_arcs(3, 0, &[(0, 1), (0, 2)]).unwrap();
        let td = build_tree_decomposition(&d, &t).unwrap();
        assert_eq!(td.bag(1), &[0, 1, 2]);
        assert_eq!(td.bag(0), &[0, 1, 2]);
    }

    #[test]
    fn non_optimal_tree_is_rejected() {
        let d = Digraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = OutTree::from_arcs(3, 0, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(build_tree_decomposition(&d, &t), Err(Error::NotOneOptimal(0, 2)));
    }

    #[test]
    fn validation_reports_first_axiom() {
        let (d, t) = path_with_back_arcs();
        let td = build_tree_decomposition(&d, &t).unwrap();
        let stripped: Vec<Vec<VertexId>> = td
            .bags()
            .iter()
            .map(|b| b.iter().copied().filter(|&v| v != 2).collect())
            .collect();
        let broken = TreeDecomposition::new(stripped, td.edges().to_vec(), td.root());
        assert_eq!(validate_tree_decomposition(&d, &broken), Err(TdViolation::MissingVertex(2)));

        // Vertex 0 sits in the two ends of the path skeleton only.
        let d = Digraph::new(3, [(1, 2)]).unwrap();
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            vec![(0, 1), (1, 2)],
            0,
        );
        let err = validate_tree_decomposition(&d, &td).unwrap_err();
        assert_eq!(err, TdViolation::DisconnectedVertex(0));
        assert_eq!(err.axiom(), 3);

        let td = TreeDecomposition::new(vec![vec![0, 1], vec![2]], vec![(0, 1)], 0);
        assert_eq!(validate_tree_decomposition(&d, &td), Err(TdViolation::UncoveredArc((1, 2))));

        let td = TreeDecomposition::new(vec![vec![0, 1, 2], vec![2]], vec![], 0);
        assert_eq!(validate_tree_decomposition(&d, &td).unwrap_err().axiom(), 0);
    }

    #[test]
    fn dump_round_trip() {
        let (d, t) = path_with_back_arcs();
        let td = build_tree_decomposition(&d, &t).unwrap();
        let text = td.to_dump_string();
        assert!(text.contains("node 2: 0 1 2 3\n"));
        assert_eq!(TreeDecomposition::parse_dump(&text).unwrap(), td);
        assert!(TreeDecomposition::parse_dump("node 1: 0\n").is_err());
        assert!(TreeDecomposition::parse_dump("bag 0: 1\n").is_err());
    }
}
