//! Constructive leaf bounds: out-trees from back-arc heads, out-tree to
//! out-branching conversion, the staged path procedure and the `√n / 4`
//! bound for digraphs of large minimum in-degree.

mod convert;
mod path;

pub use convert::{
    out_branching_from_out_tree, out_branching_from_out_tree_traced, ConversionCase, ConversionTrace,
    LeafType, LeafTypeClassification, TypeTwoRecord,
};
pub use path::{
    check_path_hypotheses, leafy_out_tree_from_path, leafy_out_tree_from_path_traced, Color, PathTrace,
    StageRecord,
};

use crate::arborescence::{extend_to_out_branching, one_optimal_out_branching, OutTree};
use crate::decomposition::back_arcs;
use crate::digraph::find_useless_arcs;
use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};

/// The subtree of `t` at `z` plus one back arc into every head of
/// `Back(z)`. Each head ends up a leaf.
pub fn out_tree_from_back_heads(d: &Digraph, t: &OutTree, z: VertexId) -> Result<OutTree> {
    t.validate_in(d)?;
    let back = back_arcs(d, t, z)?;
    let mut arcs = t.subtree(z).arcs();
    let mut taken = vec![false; d.n()];
    for (u, h) in back {
        if !std::mem::replace(&mut taken[h], true) {
            arcs.push((u, h));
        }
    }
    OutTree::from_arcs(d.n(), z, &arcs)
}

/// The maximal dipaths of `t` that avoid branch vertices, each listed from
/// the vertex nearest the root. They partition the non-branch vertices.
pub fn branch_free_paths(t: &OutTree) -> Vec<Vec<VertexId>> {
    let mut paths = Vec::new();
    for v in t.preorder() {
        if t.is_branch(v) {
            continue;
        }
        let starts = t.parent(v).is_none_or(|p| t.is_branch(p));
        if !starts {
            continue;
        }
        let mut path = vec![v];
        let mut x = v;
        while let [c] = t.children(x) {
            if t.is_branch(*c) {
                break;
            }
            path.push(*c);
            x = *c;
        }
        paths.push(path);
    }
    paths
}

/// Smallest `k` with `16 k² ≥ n`, that is `⌈√n / 4⌉`.
pub fn sqrt_bound(n: usize) -> usize {
    let mut k = 0;
    while 16 * k * k < n {
        k += 1;
    }
    k
}

/// Smallest `k` with `144 k² ≥ n`, that is `⌈√n / 12⌉`.
pub fn sqrt_bound_twelfth(n: usize) -> usize {
    let mut k = 0;
    while 144 * k * k < n {
        k += 1;
    }
    k
}

/// Check that `d` has minimum in-degree 3, or is oriented with minimum
/// in-degree 2.
pub fn check_degree_hypothesis(d: &Digraph) -> Result<()> {
    let min = d.min_in_degree().unwrap_or(0);
    if min >= 3 || (min >= 2 && d.is_oriented()) {
        return Ok(());
    }
    let v = d.vertices().min_by_key(|&v| d.in_degree(v)).unwrap_or(0);
    let what = if d.is_oriented() { "oriented graph needs 2" } else { "digraph needs 3" };
    Err(Error::DegreeHypothesisViolated(format!(
        "vertex {v} has in-degree {min}; a {what}"
    )))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinInDegreeTrace {
    pub target: usize,
    pub one_optimal_leaves: usize,
    /// Number of maximal branch-free dipaths of the 1-optimal out-branching.
    pub path_count: usize,
    pub longest_path: Vec<VertexId>,
    /// Present when the path procedure ran.
    pub path_trace: Option<PathTrace>,
    pub output_leaves: usize,
}

/// An out-tree with at least `⌈√n / 4⌉` leaves in a digraph meeting the
/// degree hypothesis.
pub fn leafy_out_tree_min_indegree(d: &Digraph) -> Result<OutTree> {
    leafy_out_tree_min_indegree_traced(d).map(|(t, _)| t)
}

pub fn leafy_out_tree_min_indegree_traced(d: &Digraph) -> Result<(OutTree, MinInDegreeTrace)> {
    check_degree_hypothesis(d)?;
    let r = d.out_branching_root().ok_or(Error::NoOutBranching)?;
    let t = one_optimal_out_branching(d, r)?;
    let target = sqrt_bound(d.n());
    let paths = branch_free_paths(&t);
    let longest = paths.iter().max_by_key(|p| p.len()).cloned().unwrap_or_default();
    let mut trace = MinInDegreeTrace {
        target,
        one_optimal_leaves: t.leaf_count(),
        path_count: paths.len(),
        longest_path: longest.clone(),
        path_trace: None,
        output_leaves: t.leaf_count(),
    };
    if t.leaf_count() >= target || longest.is_empty() {
        return Ok((t, trace));
    }
    let (tree, pt) = leafy_out_tree_from_path_traced(d, &t, &longest)?;
    trace.path_trace = Some(pt);
    let best = if tree.leaf_count() > t.leaf_count() { tree } else { t };
    trace.output_leaves = best.leaf_count();
    Ok((best, trace))
}

/// A spanning out-branching with at least `⌈√n / 4⌉` leaves when `d` is
/// strongly connected, or at least `⌈√n / 12⌉` when `d` has no useless arcs.
pub fn leafy_out_branching_bounds(d: &Digraph) -> Result<OutTree> {
    check_degree_hypothesis(d)?;
    if !d.has_out_branching() {
        return Err(Error::NoOutBranching);
    }
    if !d.is_strongly_connected() {
        if let Some(&a) = find_useless_arcs(d)?.first() {
            let (u, v): Arc = d.arc(a);
            return Err(Error::UselessArcsPresent(u, v));
        }
    }
    let t = leafy_out_tree_min_indegree(d)?;
    if d.is_strongly_connected() {
        extend_to_out_branching(d, &t)
    } else {
        out_branching_from_out_tree(d, &t)
    }
}
