//! Staged construction of an out-tree with many leaves on a long dipath of
//! an out-branching.

use crate::arborescence::{apply_path_changes, one_change, OutTree};
use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, PathHypothesis, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Black,
    Green,
    White,
}

/// What happened in one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: usize,
    /// `false` when `v_{i-1}` was already a leaf or a back-arc tail.
    pub changed: bool,
    /// `x, v_{σ(q)}, …, v_{σ(1)}`.
    pub q: Vec<VertexId>,
    /// `σ(1), …, σ(q)`.
    pub sigma: Vec<usize>,
    pub became_white: Option<VertexId>,
    pub became_green: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTrace {
    pub p: usize,
    /// The arc `(r, v_p)` when it had to be added to the digraph.
    pub virtual_arc: Option<Arc>,
    pub stages: Vec<StageRecord>,
    /// Final colors, per vertex of the digraph.
    pub colors: Vec<Color>,
    /// Largest number of colored vertices mapped to one leaf.
    pub max_preimages: usize,
    /// Path leaves of the final out-branching, before any split.
    pub path_leaves_before_split: usize,
    pub path_leaves: usize,
    /// Broken expectations of the construction; empty on a sound run.
    pub violations: Vec<String>,
}

/// Check the three hypotheses on `path = v_0, …, v_{p-1}`, a dipath of the
/// out-branching `t`: no arc `(v_i, v_j)` with `j > i + 1`, no branch vertex
/// on the path, and an in-neighbour other than `v_{i-1}, v_{i+1}` for every
/// `v_i`.
pub fn check_path_hypotheses(d: &Digraph, t: &OutTree, path: &[VertexId]) -> Result<()> {
    t.validate_in(d)?;
    if !t.is_spanning() {
        return Err(Error::InvalidTree("not spanning".into()));
    }
    if path.is_empty() {
        return Err(Error::NotADipath("empty vertex sequence".into()));
    }
    let mut idx = vec![usize::MAX; d.n()];
    for (i, &v) in path.iter().enumerate() {
        d.check_vertex(v)?;
        if idx[v] != usize::MAX {
            return Err(Error::NotADipath(format!("vertex {v} repeats")));
        }
        idx[v] = i;
    }
    for w in path.windows(2) {
        if t.parent(w[1]) != Some(w[0]) {
            return Err(Error::NotADipath(format!("({}, {}) is not a tree arc", w[0], w[1])));
        }
    }
    for &(u, v) in d.arcs() {
        if idx[u] != usize::MAX && idx[v] != usize::MAX && idx[v] > idx[u] + 1 {
            return Err(Error::HypothesisViolated(PathHypothesis::ForwardArc { tail: u, head: v }));
        }
    }
    if let Some(&v) = path.iter().find(|&&v| t.is_branch(v)) {
        return Err(Error::HypothesisViolated(PathHypothesis::BranchVertex(v)));
    }
    for (i, &v) in path.iter().enumerate() {
        if spare_in_neighbour(d, path, i).is_none() {
            return Err(Error::HypothesisViolated(PathHypothesis::NoSpareInNeighbour(v)));
        }
    }
    Ok(())
}

fn spare_in_neighbour(d: &Digraph, path: &[VertexId], i: usize) -> Option<VertexId> {
    let before = i.checked_sub(1).map(|j| path[j]);
    let after = path.get(i + 1).copied();
    d.in_neighbors(path[i]).find(|&u| Some(u) != before && Some(u) != after)
}

/// Out-tree of `D` with at least `⌈p/8⌉` leaves on `path`.
pub fn leafy_out_tree_from_path(d: &Digraph, t: &OutTree, path: &[VertexId]) -> Result<OutTree> {
    leafy_out_tree_from_path_traced(d, t, path).map(|(tree, _)| tree)
}

/// The current out-branching of `D`, possibly using a synthetic arc.
struct Work<'a> {
    path: &'a [VertexId],
    idx: Vec<usize>,
    tree: OutTree,
    /// The arc `(r, v_p)`, real or synthetic.
    cut: Option<Arc>,
}

impl Work<'_> {
    fn real_children(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let skip = self.cut.filter(|&(r, _)| r == v).map(|(_, h)| h);
        self.tree.children(v).iter().copied().filter(move |&c| Some(c) != skip)
    }

    fn is_real_leaf(&self, v: VertexId) -> bool {
        self.real_children(v).next().is_none()
    }

    fn on_path(&self, v: VertexId) -> Option<usize> {
        (self.idx[v] != usize::MAX).then_some(self.idx[v])
    }

    fn is_back_tail(&self, i: usize) -> bool {
        self.real_children(self.path[i]).any(|c| self.on_path(c).is_some_and(|j| j < i))
    }

    /// Members of `R_T(v)` without crossing the cut arc.
    fn real_reach(&self, v: VertexId) -> Vec<bool> {
        let mut mask = vec![false; self.idx.len()];
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            mask[x] = true;
            stack.extend(self.real_children(x));
        }
        mask
    }

    fn path_leaves(&self) -> usize {
        self.path.iter().filter(|&&v| self.is_real_leaf(v)).count()
    }
}

pub fn leafy_out_tree_from_path_traced(
    d: &Digraph,
    t: &OutTree,
    path: &[VertexId],
) -> Result<(OutTree, PathTrace)> {
    check_path_hypotheses(d, t, path)?;
    let p = path.len();
    let mut trace = PathTrace {
        p,
        virtual_arc: None,
        stages: Vec::new(),
        colors: vec![Color::Black; d.n()],
        max_preimages: 0,
        path_leaves_before_split: 1,
        path_leaves: 1,
        violations: Vec::new(),
    };
    if p == 1 {
        return Ok((OutTree::singleton(d.n(), path[0]), trace));
    }

    let mut idx = vec![usize::MAX; d.n()];
    for (i, &v) in path.iter().enumerate() {
        idx[v] = i;
    }
    let r = t.root();
    let last = path[p - 1];
    let mut tree = t.clone();
    let mut cut = None;
    let mut work_digraph = None;
    if let Some(&vp) = t.children(last).first() {
        // Hang the rest of the subtree of v_{p-1} from the root. The arc is
        // ignored by every leaf and invariant check, since r may be v_0.
        let dw = if d.has_arc(r, vp) {
            d.clone()
        } else {
            trace.virtual_arc = Some((r, vp));
            d.with_arc(r, vp)?
        };
        tree = one_change(&dw, &tree, (r, vp))?;
        cut = Some((r, vp));
        work_digraph = Some(dw);
    }
    let dw = work_digraph.as_ref().unwrap_or(d);
    let mut w = Work { path, idx, tree, cut };

    let mut white_stage = vec![0usize; d.n()];
    let mut green_stage = vec![0usize; d.n()];
    for i in 1..p {
        let record = run_stage(d, dw, &mut w, i, &mut trace, &mut white_stage, &mut green_stage);
        trace.stages.push(record);
        check_stage_invariants(&w, i, &trace.colors, &mut trace.violations);
    }

    map_to_leaves(&w, &mut trace, &white_stage, &green_stage);
    trace.path_leaves_before_split = w.path_leaves();
    if trace.path_leaves_before_split * 4 < p {
        trace.violations.push(format!(
            "{} path leaves before the split, fewer than p/4 = {p}/4",
            trace.path_leaves_before_split
        ));
    }

    let mut in_path = vec![false; d.n()];
    for &v in path {
        in_path[v] = true;
    }
    // Deleting the cut arc leaves two out-trees of D; a real cut arc also
    // allows keeping the whole out-branching.
    let mut candidates = Vec::new();
    if let Some((_, vp)) = cut {
        let below = w.tree.subtree_mask(vp);
        let upper_arcs: Vec<Arc> = w.tree.arcs().into_iter().filter(|&(_, b)| !below[b]).collect();
        candidates.push(OutTree::from_arcs(d.n(), r, &upper_arcs)?);
        candidates.push(w.tree.subtree(vp));
    }
    if trace.virtual_arc.is_none() {
        candidates.insert(0, w.tree);
    }
    let out = candidates
        .into_iter()
        .rev()
        .max_by_key(|c| c.leaf_count_in(&in_path))
        .expect("at least one candidate");
    trace.path_leaves = out.leaf_count_in(&in_path);
    if trace.path_leaves * 8 < p {
        trace.violations.push(format!("{} path leaves, fewer than p/8", trace.path_leaves));
    }
    debug_assert!(out.is_out_tree_of(d));
    Ok((out, trace))
}

fn run_stage(
    d: &Digraph,
    dw: &Digraph,
    w: &mut Work<'_>,
    i: usize,
    trace: &mut PathTrace,
    white_stage: &mut [usize],
    green_stage: &mut [usize],
) -> StageRecord {
    let path = w.path;
    let mut record = StageRecord {
        stage: i,
        changed: false,
        q: Vec::new(),
        sigma: Vec::new(),
        became_white: None,
        became_green: Vec::new(),
    };
    let prev = path[i - 1];
    if w.is_real_leaf(prev) || w.is_back_tail(i - 1) {
        return record;
    }
    let kids: Vec<VertexId> = w.real_children(prev).collect();
    if kids != [path[i]] {
        trace.violations.push(format!("stage {i}: v_{} has children {kids:?}", i - 1));
        return record;
    }

    // Q_i: follow spare in-neighbours backwards until leaving R_T(v_i).
    let reach = w.real_reach(path[i]);
    let mut sigma = vec![i];
    let x = loop {
        let j = *sigma.last().unwrap();
        let Some(u) = spare_in_neighbour(d, path, j) else {
            trace.violations.push(format!("stage {i}: v_{j} has no spare in-neighbour"));
            return record;
        };
        if !reach[u] {
            break u;
        }
        match w.on_path(u) {
            Some(l) if l >= j + 2 => sigma.push(l),
            _ => {
                trace.violations.push(format!("stage {i}: in-neighbour {u} of v_{j} breaks the σ rule"));
                return record;
            }
        }
    };
    let mut q = vec![x];
    q.extend(sigma.iter().rev().map(|&s| path[s]));

    // Green vertex property 2, checked against T_i before the changes.
    let inner: Vec<usize> = sigma[1..].to_vec();
    for &s in &inner {
        if trace.colors[path[s]] == Color::Black
            && !(i..s).all(|m| w.tree.parent(path[m + 1]) == Some(path[m]))
        {
            trace.violations.push(format!("stage {i}: v_{s} turns green without the path v_{i}..v_{s}"));
        }
    }

    let mut full = w.tree.root_path(x);
    full.extend_from_slice(&q[1..]);
    match apply_path_changes(dw, &w.tree, &full) {
        Ok(next) => w.tree = next,
        Err(e) => {
            trace.violations.push(format!("stage {i}: path changes failed: {e}"));
            return record;
        }
    }
    if !w.is_real_leaf(prev) {
        trace.violations.push(format!("stage {i}: v_{} is still not a leaf", i - 1));
    }

    if trace.colors[x] != Color::White {
        trace.colors[x] = Color::White;
        white_stage[x] = i;
        record.became_white = Some(x);
    }
    for &s in &inner {
        let v = path[s];
        if trace.colors[v] == Color::Black {
            trace.colors[v] = Color::Green;
            green_stage[v] = i;
            record.became_green.push(v);
        }
    }
    record.changed = true;
    record.q = q;
    record.sigma = sigma;
    record
}

fn check_stage_invariants(w: &Work<'_>, i: usize, colors: &[Color], violations: &mut Vec<String>) {
    let path = w.path;
    if !w.is_real_leaf(path[i - 1]) && !w.is_back_tail(i - 1) {
        violations.push(format!("after stage {i}: v_{} is neither a leaf nor a back-arc tail", i - 1));
    }
    for (m, &v) in path.iter().enumerate() {
        if w.real_children(v).any(|c| w.on_path(c).is_none_or(|j| j == 0 || j > m + 1)) {
            violations.push(format!("after stage {i}: v_{m} has a child outside v_1..v_{}", m + 1));
        }
        if m > 0 && colors[v] == Color::Green && w.tree.parent(v) == Some(path[m - 1]) {
            violations.push(format!("after stage {i}: green v_{m} still hangs below v_{}", m - 1));
        }
    }
    if let Some(v) = w.real_children(path[i]).find(|&c| w.on_path(c).is_none()) {
        violations.push(format!("after stage {i}: R_T(v_{i}) leaves the path at {v}"));
    }
}

/// Map every colored vertex to a path leaf and record the largest fibre.
fn map_to_leaves(w: &Work<'_>, trace: &mut PathTrace, white_stage: &[usize], green_stage: &[usize]) {
    let path = w.path;
    let mut hits = vec![0usize; trace.colors.len()];
    for (v, &color) in trace.colors.iter().enumerate() {
        let image = match color {
            Color::Black => {
                if let Some(m) = w.on_path(v) {
                    if !w.is_real_leaf(v) {
                        trace.violations.push(format!("v_{m} ends black and is not a leaf"));
                    }
                }
                continue;
            }
            Color::White => path[white_stage[v] - 1],
            Color::Green => {
                let m = w.on_path(v).expect("only path vertices turn green");
                let before = path[m - 1];
                if w.is_real_leaf(before) {
                    before
                } else {
                    match trace.colors[before] {
                        Color::White => path[white_stage[before] - 1],
                        Color::Green => path[green_stage[before] - 1],
                        Color::Black => {
                            trace.violations.push(format!("green v_{m} follows a black non-leaf"));
                            continue;
                        }
                    }
                }
            }
        };
        if !w.is_real_leaf(image) {
            trace.violations.push(format!("vertex {v} maps to {image}, which is not a leaf"));
        }
        hits[image] += 1;
    }
    trace.max_preimages = hits.iter().copied().max().unwrap_or(0);
    if trace.max_preimages > 3 {
        trace.violations.push(format!("a leaf has {} preimages", trace.max_preimages));
    }
}
