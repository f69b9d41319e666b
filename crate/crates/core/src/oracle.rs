//! Exhaustive reference solvers for small digraphs.
//!
//! `ℓ(D)` and `ℓ_s(D)` are computed by enumerating the set `N` of non-leaf
//! vertices: an out-tree with internal vertex set `N` exists iff some vertex
//! of `N` reaches all of `N` inside `D[N]`, and then every out-neighbour of
//! `N` outside `N` can hang from `N` as a leaf. This is independent of the
//! local-search and decomposition machinery it is used to check.

use crate::arborescence::OutTree;
use crate::digraph::{Digraph, VertexId};
use crate::error::{Error, Result};

/// Guard for [`exact_max_leaf_out_tree`] and [`exact_max_leaf_out_branching`].
pub const EXACT_LIMIT: usize = 10;
/// Guard for [`enumerate_out_branchings`].
pub const ENUMERATE_LIMIT: usize = 8;

fn guard(d: &Digraph, limit: usize) -> Result<()> {
    if d.n() > limit {
        return Err(Error::TooLarge { n: d.n(), limit });
    }
    Ok(())
}

/// Smallest `r ∈ N` reaching all of `N` within `D[N]`, and that BFS tree.
fn spanning_root(d: &Digraph, mask: u32) -> Option<OutTree> {
    let inside = |v: VertexId| mask >> v & 1 == 1;
    for r in (0..d.n()).filter(|&r| inside(r)) {
        let mut tree = OutTree::singleton(d.n(), r);
        let mut queue = std::collections::VecDeque::from([r]);
        while let Some(x) = queue.pop_front() {
            for y in d.out_neighbors(x) {
                if inside(y) && !tree.contains(y) {
                    tree.attach(x, y);
                    queue.push_back(y);
                }
            }
        }
        if tree.size() == mask.count_ones() as usize {
            return Some(tree);
        }
    }
    None
}

/// Hang every out-neighbour of the tree that is not yet in it, as a leaf
/// below its smallest-id in-neighbour inside the core.
fn attach_fringe(d: &Digraph, core: &OutTree) -> OutTree {
    let mut tree = core.clone();
    for v in d.vertices().filter(|&v| !core.contains(v)) {
        if let Some(u) = d.in_neighbors(v).find(|&u| core.contains(u)) {
            tree.attach(u, v);
        }
    }
    tree
}

/// `ℓ(D)` with a witness; a single vertex counts as one leaf.
pub fn exact_max_leaf_out_tree(d: &Digraph) -> Result<(usize, OutTree)> {
    guard(d, EXACT_LIMIT)?;
    if d.n() == 0 {
        return Err(Error::NoOutBranching);
    }
    let mut best = (1, OutTree::singleton(d.n(), 0));
    for mask in 1u32..(1 << d.n()) {
        let Some(core) = spanning_root(d, mask) else {
            continue;
        };
        let fringe = d
            .vertices()
            .filter(|&v| mask >> v & 1 == 0 && d.in_neighbors(v).any(|u| mask >> u & 1 == 1))
            .count();
        if fringe > best.0 {
            let tree = attach_fringe(d, &core);
            debug_assert_eq!(tree.leaf_count(), fringe);
            best = (fringe, tree);
        }
    }
    Ok(best)
}

/// `ℓ_s(D)` with a spanning witness.
pub fn exact_max_leaf_out_branching(d: &Digraph) -> Result<(usize, OutTree)> {
    guard(d, EXACT_LIMIT)?;
    let n = d.n();
    if n == 0 {
        return Err(Error::NoOutBranching);
    }
    if n == 1 {
        return Ok((1, OutTree::singleton(1, 0)));
    }
    let mut best: Option<(usize, OutTree)> = None;
    for mask in 1u32..(1 << n) {
        let value = n - mask.count_ones() as usize;
        if best.as_ref().is_some_and(|(b, _)| *b >= value) {
            continue;
        }
        let dominated = d
            .vertices()
            .all(|v| mask >> v & 1 == 1 || d.in_neighbors(v).any(|u| mask >> u & 1 == 1));
        if !dominated {
            continue;
        }
        if let Some(core) = spanning_root(d, mask) {
            let tree = attach_fringe(d, &core);
            debug_assert!(tree.is_spanning());
            debug_assert_eq!(tree.leaf_count(), value);
            best = Some((value, tree));
        }
    }
    best.ok_or(Error::NoOutBranching)
}

/// Every out-branching of `D`, ordered by root, then by the parent choices
/// of vertices `0, 1, …` (in-neighbours in increasing order).
pub fn enumerate_out_branchings(d: &Digraph) -> Result<Vec<OutTree>> {
    guard(d, ENUMERATE_LIMIT)?;
    let n = d.n();
    let mut out = Vec::new();
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    for root in 0..n {
        let order: Vec<VertexId> = (0..n).filter(|&v| v != root).collect();
        assign(d, root, &order, 0, &mut parent, &mut out);
    }
    Ok(out)
}

fn assign(
    d: &Digraph,
    root: VertexId,
    order: &[VertexId],
    depth: usize,
    parent: &mut Vec<Option<VertexId>>,
    out: &mut Vec<OutTree>,
) {
    if depth == order.len() {
        let arcs: Vec<_> = order.iter().map(|&v| (parent[v].unwrap(), v)).collect();
        // Every vertex has a parent, so the structure is a tree iff it is acyclic.
        if let Ok(tree) = OutTree::from_arcs(d.n(), root, &arcs) {
            out.push(tree);
        }
        return;
    }
    let v = order[depth];
    for u in d.in_neighbors(v) {
        // Prune: following assigned parents from u must not return to v.
        let mut cur = Some(u);
        let mut cycle = false;
        while let Some(x) = cur {
            if x == v {
                cycle = true;
                break;
            }
            cur = if x == root { None } else { parent[x] };
        }
        if cycle {
            continue;
        }
        parent[v] = Some(u);
        assign(d, root, order, depth + 1, parent, out);
        parent[v] = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        Digraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete(n: usize) -> Digraph {
        Digraph::new(n, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))))
            .unwrap()
    }

    #[test]
    fn branching_values() {
        assert_eq!(exact_max_leaf_out_branching(&cycle(4)).unwrap().0, 1);
        assert_eq!(exact_max_leaf_out_branching(&complete(4)).unwrap().0, 3);
        let d = Digraph::new(3, [(0, 1), (1, 2), (2, 1)]).unwrap();
        let (v, t) = exact_max_leaf_out_branching(&d).unwrap();
        assert_eq!(v, 1);
        assert_eq!(t.arcs(), vec![(0, 1), (1, 2)]);
        let d = Digraph::new(3, [(0, 1)]).unwrap();
        assert_eq!(exact_max_leaf_out_branching(&d), Err(Error::NoOutBranching));
    }

    #[test]
    fn out_tree_values() {
        assert_eq!(exact_max_leaf_out_tree(&Digraph::empty(1)).unwrap().0, 1);
        assert_eq!(exact_max_leaf_out_tree(&cycle(5)).unwrap().0, 1);
        let star = Digraph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let (v, t) = exact_max_leaf_out_tree(&star).unwrap();
        assert_eq!(v, 3);
        assert!(t.is_out_tree_of(&star));
    }

    #[test]
    fn guards_are_hard_errors() {
        assert_eq!(
            exact_max_leaf_out_tree(&Digraph::empty(11)).unwrap_err(),
            Error::TooLarge { n: 11, limit: 10 }
        );
        assert_eq!(
            enumerate_out_branchings(&Digraph::empty(9)).unwrap_err(),
            Error::TooLarge { n: 9, limit: 8 }
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_out_branchings(&cycle(3)).unwrap().len(), 3);
        let d = Digraph::new(3, [(0, 1), (1, 2), (2, 1)]).unwrap();
        let all = enumerate_out_branchings(&d).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].arcs(), vec![(0, 1), (1, 2)]);
        assert_eq!(enumerate_out_branchings(&complete(3)).unwrap().len(), 9);
    }
}
