use super::{bfs_out_branching, OutTree, TreeIntervals};
use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};

fn check_change(d: &Digraph, t: &OutTree, (u, v): Arc) -> Result<()> {
    if !d.has_arc(u, v) {
        return Err(Error::NotAnArc(u, v));
    }
    for x in [u, v] {
        if !t.contains(x) {
            return Err(Error::NotInTree(x));
        }
    }
    if v == t.root() {
        return Err(Error::RootReparent(v));
    }
    if t.has_tree_arc(u, v) {
        return Err(Error::AlreadyTreeArc(u, v));
    }
    Ok(())
}

impl OutTree {
    /// In-place 1-change `T + (u, v) - (w, v)`; refuses when `v ⪯_T u`.
    pub fn apply_one_change(&mut self, d: &Digraph, arc: Arc) -> Result<()> {
        check_change(d, self, arc)?;
        let (u, v) = arc;
        if self.is_ancestor(v, u) {
            return Err(Error::WouldCreateCycle(u, v));
        }
        self.reparent(u, v);
        Ok(())
    }
}

/// The 1-change for `arc`, as a new tree.
pub fn one_change(d: &Digraph, t: &OutTree, arc: Arc) -> Result<OutTree> {
    let mut next = t.clone();
    next.apply_one_change(d, arc)?;
    Ok(next)
}

/// Whether the 1-change for `(u, v)` gains a leaf: `u ∉ Leaf(T)` and
/// `v ∉ BrSucc(T)`.
pub fn is_improving(d: &Digraph, t: &OutTree, arc: Arc) -> Result<bool> {
    check_change(d, t, arc)?;
    let (u, v) = arc;
    Ok(!t.is_leaf(u) && !t.is_br_succ(v))
}

/// A legal improving 1-change for `t`, if one exists (lexicographic order).
pub fn find_improving_change(d: &Digraph, t: &OutTree) -> Option<Arc> {
    let iv = t.intervals();
    lex_arcs(d).into_iter().map(|a| d.arc(a)).find(|&arc| {
        improving_and_legal(t, &iv, arc)
    })
}

fn lex_arcs(d: &Digraph) -> Vec<usize> {
    d.vertices().flat_map(|u| d.out_arcs(u).iter().copied()).collect()
}

fn improving_and_legal(t: &OutTree, iv: &TreeIntervals, (u, v): Arc) -> bool {
    t.contains(u)
        && t.contains(v)
        && v != t.root()
        && !t.has_tree_arc(u, v)
        && !t.is_leaf(u)
        && !t.is_br_succ(v)
        && !iv.is_ancestor(v, u)
}

/// Local search from `start`: scan arcs cyclically in `(tail, head)` order,
/// applying each legal improving 1-change as it is met, until a whole round
/// finds none. With `stop_at = Some(k)` the search also halts as soon as the
/// tree has `k` leaves.
pub fn one_optimal_from(d: &Digraph, start: OutTree, stop_at: Option<usize>) -> OutTree {
    let mut tree = start;
    let order = lex_arcs(d);
    if order.is_empty() {
        return tree;
    }
    let mut leaves = tree.leaf_count();
    let mut intervals = tree.intervals();
    let mut stale = false;
    let mut idle = 0;
    let mut pos = 0;
    while idle < order.len() {
        if stop_at.is_some_and(|k| leaves >= k) {
            break;
        }
        let (u, v) = d.arc(order[pos]);
        pos = (pos + 1) % order.len();
        idle += 1;
        // Cheap role tests first; the ancestor test needs fresh intervals.
        if v == tree.root() || tree.has_tree_arc(u, v) || tree.is_leaf(u) || tree.is_br_succ(v) {
            continue;
        }
        if stale {
            intervals = tree.intervals();
            stale = false;
        }
        if intervals.is_ancestor(v, u) {
            continue;
        }
        tree.reparent(u, v);
        leaves += 1;
        stale = true;
        idle = 0;
    }
    tree
}

/// A 1-optimal out-branching rooted at `r`, grown from the BFS branching.
pub fn one_optimal_out_branching(d: &Digraph, r: VertexId) -> Result<OutTree> {
    let start = bfs_out_branching(d, r)?;
    Ok(one_optimal_from(d, start, None))
}

/// Grow `t` into an out-branching, attaching absent vertices layer by layer
/// to their smallest-id in-neighbour already in the tree.
pub fn extend_to_out_branching(d: &Digraph, t: &OutTree) -> Result<OutTree> {
    t.validate_in(d)?;
    if !d.reach_mask(t.root()).iter().all(|&b| b) {
        return Err(Error::NotExtendable(t.root()));
    }
    let mut tree = t.clone();
    while !tree.is_spanning() {
        let layer: Vec<(VertexId, VertexId)> = d
            .vertices()
            .filter(|&v| !tree.contains(v))
            .filter_map(|v| d.in_neighbors(v).find(|&u| tree.contains(u)).map(|u| (u, v)))
            .collect();
        debug_assert!(!layer.is_empty(), "root reaches all, so a layer exists");
        for (u, v) in layer {
            tree.attach(u, v);
        }
    }
    Ok(tree)
}

/// Apply the 1-change for every arc of the root dipath `q` that is not
/// already a tree arc, in path order. The result contains `q`.
pub fn apply_path_changes(d: &Digraph, t: &OutTree, q: &[VertexId]) -> Result<OutTree> {
    let Some(&first) = q.first() else {
        return Err(Error::NotADipath("empty vertex sequence".into()));
    };
    if first != t.root() {
        return Err(Error::QNotFromRoot(t.root()));
    }
    check_dipath(d, q)?;
    let mut tree = t.clone();
    for w in q.windows(2) {
        let arc = (w[0], w[1]);
        if !tree.has_tree_arc(arc.0, arc.1) {
            tree.apply_one_change(d, arc)?;
        }
    }
    Ok(tree)
}

pub(crate) fn check_dipath(d: &Digraph, q: &[VertexId]) -> Result<()> {
    let mut seen = vec![false; d.n()];
    for &v in q {
        d.check_vertex(v)?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::NotADipath(format!("vertex {v} repeats")));
        }
    }
    for w in q.windows(2) {
        if !d.has_arc(w[0], w[1]) {
            return Err(Error::NotAnArc(w[0], w[1]));
        }
    }
    Ok(())
}
