//! Turning an out-tree with `ℓ` leaves into an out-branching with at least
//! `⌈ℓ/3⌉` leaves, in a digraph without useless arcs.

use crate::arborescence::{extend_to_out_branching, OutTree};
use crate::digraph::find_useless_arcs;
use crate::digraph::{Digraph, VertexId};
use crate::error::{Error, Result};
use std::collections::VecDeque;

/// How an on-path leaf can be bypassed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafType {
    /// Some `x ≺_P l ≺_P y` are joined by a dipath in `D - l` whose inner
    /// vertices avoid `P`; `(x, y)` is one such pair.
    One { x: VertexId, y: VertexId },
    Two,
}

/// The minimizing path and the classification of the leaves on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafTypeClassification {
    /// From the full-reach vertex `r'` to the tree root `r`.
    pub path: Vec<VertexId>,
    /// `l_1, …, l_m`: tree leaves on the path, `l_1` closest to `r`.
    pub on_path: Vec<VertexId>,
    pub types: Vec<LeafType>,
    /// Minimum number of tree leaves on a dipath to `r`, per `l_i`.
    pub dist_l: Vec<usize>,
    pub off_path: Vec<VertexId>,
}

impl LeafTypeClassification {
    pub fn type_one_count(&self) -> usize {
        self.types.iter().filter(|t| matches!(t, LeafType::One { .. })).count()
    }

    pub fn type_two_count(&self) -> usize {
        self.types.len() - self.type_one_count()
    }
}

/// Detour data for one type-2 leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeTwoRecord {
    pub leaf: VertexId,
    /// Last arc of the tree path to the leaf that is not a path arc.
    pub t: VertexId,
    pub h: VertexId,
    /// Subpath `x, y, …, z` of a dipath from `r'` ending with `(t, h)`.
    pub q: Vec<VertexId>,
}

impl TypeTwoRecord {
    pub fn x(&self) -> VertexId {
        self.q[0]
    }

    pub fn y(&self) -> VertexId {
        self.q[1]
    }

    pub fn z(&self) -> VertexId {
        *self.q.last().expect("q has at least two vertices")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConversionCase {
    /// The tree root already reaches every vertex.
    Extend,
    /// Enough tree leaves lie off the path.
    OffPath,
    /// Enough type-1 leaves but too few off-path leaves. Each type-1 leaf
    /// forces a distinct off-path leaf, so this only shows up together with
    /// a recorded violation.
    TypeOne,
    /// Enough type-2 leaves; each gains a leaf on the rebuilt path tree.
    TypeTwo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionTrace {
    pub input_leaves: usize,
    pub target: usize,
    pub case: ConversionCase,
    pub classification: Option<LeafTypeClassification>,
    pub type_two: Vec<TypeTwoRecord>,
    /// Broken expectations of the construction; empty on a sound run.
    pub violations: Vec<String>,
    pub output_leaves: usize,
}

/// Out-branching with at least `⌈ℓ/3⌉` leaves from an out-tree with `ℓ`
/// leaves. `D` must have no useless arcs.
pub fn out_branching_from_out_tree(d: &Digraph, t: &OutTree) -> Result<OutTree> {
    out_branching_from_out_tree_traced(d, t).map(|(tree, _)| tree)
}

pub fn out_branching_from_out_tree_traced(
    d: &Digraph,
    t: &OutTree,
) -> Result<(OutTree, ConversionTrace)> {
    t.validate_in(d)?;
    let full = d.full_reach_mask().ok_or(Error::NoOutBranching)?;
    if let Some(&a) = find_useless_arcs(d)?.first() {
        let (u, v) = d.arc(a);
        return Err(Error::UselessArcsPresent(u, v));
    }
    let input_leaves = t.leaf_count();
    let target = input_leaves.div_ceil(3);
    let mut trace = ConversionTrace {
        input_leaves,
        target,
        case: ConversionCase::Extend,
        classification: None,
        type_two: Vec::new(),
        violations: Vec::new(),
        output_leaves: 0,
    };
    if full[t.root()] {
        let out = extend_to_out_branching(d, t)?;
        trace.output_leaves = out.leaf_count();
        return Ok((out, trace));
    }

    let r = t.root();
    let r_prime = full.iter().position(|&b| b).expect("mask is non-empty");
    let path = min_leaf_path(d, t, r_prime, r);
    let mut pos = vec![usize::MAX; d.n()];
    for (i, &v) in path.iter().enumerate() {
        pos[v] = i;
    }
    let on_p = |v: VertexId| pos[v] != usize::MAX;

    let on_path: Vec<VertexId> = path.iter().rev().copied().filter(|&v| t.is_leaf(v)).collect();
    let off_path: Vec<VertexId> = t.leaves().into_iter().filter(|&v| !on_p(v)).collect();
    let dist = leaf_distance_to(d, t, r);
    let dist_l: Vec<usize> = on_path.iter().map(|&l| dist[l].expect("l reaches r along P")).collect();
    for (i, &dl) in dist_l.iter().enumerate() {
        if dl != i + 1 {
            trace.violations.push(format!("leaf distance of l_{} is {dl}", i + 1));
        }
    }
    let types: Vec<LeafType> = on_path.iter().map(|&l| classify(d, &path, &pos, pos[l])).collect();
    for (i, ty) in types.iter().enumerate() {
        if matches!(ty, LeafType::One { .. }) && !off_path.iter().any(|&z| dist[z] == Some(i + 1)) {
            trace.violations.push(format!(
                "type-1 leaf l_{} has no off-path leaf at the same leaf distance",
                i + 1
            ));
        }
    }
    let class = LeafTypeClassification { path, on_path, types, dist_l, off_path };
    let (off, one, two) = (class.off_path.len(), class.type_one_count(), class.type_two_count());
    if off + one + two < input_leaves {
        trace.violations.push("case counts do not cover every leaf".into());
    }

    let built = if off >= target || one >= target {
        trace.case = if off >= target { ConversionCase::OffPath } else { ConversionCase::TypeOne };
        if trace.case == ConversionCase::TypeOne && off < one {
            trace.violations.push(format!("{one} type-1 leaves but only {off} off-path leaves"));
        }
        merge_path_into_tree(d, t, &class.path)?
    } else {
        trace.case = ConversionCase::TypeTwo;
        trace.type_two = type_two_records(d, t, &class, &pos, &mut trace.violations);
        rebuild_from_path(d, &class.path, &trace.type_two, &mut trace.violations)?
    };
    let out = extend_to_out_branching(d, &built)?;
    trace.output_leaves = out.leaf_count();
    if trace.output_leaves < target {
        trace.violations.push(format!("{} leaves, fewer than {target}", trace.output_leaves));
    }
    trace.classification = Some(class);
    Ok((out, trace))
}

/// `(from, to)`-dipath with the fewest tree leaves on it (0/1 BFS over
/// vertex weights). `to` must be reachable.
fn min_leaf_path(d: &Digraph, t: &OutTree, from: VertexId, to: VertexId) -> Vec<VertexId> {
    let weight = |v: VertexId| usize::from(t.contains(v) && t.is_leaf(v));
    let mut dist = vec![usize::MAX; d.n()];
    let mut pred = vec![usize::MAX; d.n()];
    dist[from] = weight(from);
    let mut deque = VecDeque::from([from]);
    let mut done = vec![false; d.n()];
    while let Some(x) = deque.pop_front() {
        if std::mem::replace(&mut done[x], true) {
            continue;
        }
        for y in d.out_neighbors(x) {
            let w = weight(y);
            if dist[x] + w < dist[y] {
                dist[y] = dist[x] + w;
                pred[y] = x;
                if w == 0 {
                    deque.push_front(y);
                } else {
                    deque.push_back(y);
                }
            }
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(pred[*path.last().unwrap()]);
    }
    path.reverse();
    path
}

/// For every vertex, the fewest tree leaves (itself included) on a dipath
/// to `target`; `None` when `target` is unreachable.
fn leaf_distance_to(d: &Digraph, t: &OutTree, target: VertexId) -> Vec<Option<usize>> {
    let weight = |v: VertexId| usize::from(t.contains(v) && t.is_leaf(v));
    let mut dist = vec![usize::MAX; d.n()];
    dist[target] = weight(target);
    let mut deque = VecDeque::from([target]);
    let mut done = vec![false; d.n()];
    while let Some(y) = deque.pop_front() {
        if std::mem::replace(&mut done[y], true) {
            continue;
        }
        for x in d.in_neighbors(y) {
            let w = weight(x);
            if dist[y] + w < dist[x] {
                dist[x] = dist[y] + w;
                if w == 0 {
                    deque.push_front(x);
                } else {
                    deque.push_back(x);
                }
            }
        }
    }
    dist.into_iter().map(|x| (x != usize::MAX).then_some(x)).collect()
}

/// Search from every path vertex before position `at` through off-path
/// vertices for a path vertex after `at`.
fn classify(d: &Digraph, path: &[VertexId], pos: &[usize], at: usize) -> LeafType {
    let mut origin = vec![usize::MAX; d.n()];
    let mut queue = VecDeque::new();
    for &x in &path[..at] {
        origin[x] = x;
        queue.push_back(x);
    }
    while let Some(a) = queue.pop_front() {
        for b in d.out_neighbors(a) {
            if pos[b] != usize::MAX {
                if pos[b] > at {
                    return LeafType::One { x: origin[a], y: b };
                }
            } else if origin[b] == usize::MAX {
                origin[b] = origin[a];
                queue.push_back(b);
            }
        }
    }
    LeafType::Two
}

/// Tree arcs off the path are kept, every path vertex other than its start
/// takes its path predecessor as parent. Off-path leaves stay leaves.
fn merge_path_into_tree(d: &Digraph, t: &OutTree, path: &[VertexId]) -> Result<OutTree> {
    let mut parent: Vec<Option<VertexId>> = (0..d.n()).map(|v| t.parent(v)).collect();
    for w in path.windows(2) {
        parent[w[1]] = Some(w[0]);
    }
    let in_tree = |v: VertexId| t.contains(v) || path.contains(&v);
    let arcs: Vec<_> = (0..d.n())
        .filter(|&v| in_tree(v) && v != path[0])
        .map(|v| (parent[v].expect("members other than the start have parents"), v))
        .collect();
    OutTree::from_arcs(d.n(), path[0], &arcs)
}

fn type_two_records(
    d: &Digraph,
    t: &OutTree,
    class: &LeafTypeClassification,
    pos: &[usize],
    violations: &mut Vec<String>,
) -> Vec<TypeTwoRecord> {
    let path = &class.path;
    let r_prime = path[0];
    let on_arc = |a: VertexId, b: VertexId| pos[a] != usize::MAX && pos[a] + 1 < path.len() && path[pos[a] + 1] == b;
    let mut records = Vec::new();
    for (i, (&leaf, ty)) in class.on_path.iter().zip(&class.types).enumerate() {
        if *ty != LeafType::Two {
            continue;
        }
        let tree_path = t.root_path(leaf);
        let Some(w) = tree_path.windows(2).rev().find(|w| !on_arc(w[0], w[1])) else {
            // Only the lone root of a one-vertex tree has no such arc; the
            // path end is then a leaf of the rebuilt tree on its own.
            continue;
        };
        let (ti, hi) = (w[0], w[1]);
        let lower = class.on_path.get(i + 1).map_or(0, |&l| pos[l] + 1);
        if pos[hi] == usize::MAX || pos[hi] < lower || pos[hi] > pos[leaf] {
            violations.push(format!("h = {hi} is not between l_{} and l_{} on the path", i + 2, i + 1));
            continue;
        }
        let Some(mut detour) = d.bfs_path(r_prime, ti, Some(hi)) else {
            violations.push(format!("arc ({ti}, {hi}) is useless"));
            continue;
        };
        detour.push(hi);
        let ix = detour.iter().rposition(|&v| pos[v] < pos[hi]).expect("r' precedes h on the path");
        let iz = ix + 1
            + detour[ix + 1..].iter().position(|&v| pos[v] != usize::MAX && pos[v] >= pos[hi]).expect("h ends the detour");
        let q = detour[ix..=iz].to_vec();
        let (x, z) = (q[0], q[q.len() - 1]);
        if let Some(&next) = class.on_path.get(i + 1) {
            if pos[next] >= pos[z] {
                violations.push(format!("z = {z} does not follow l_{} on the path", i + 2));
            }
        }
        if pos[x] >= pos[leaf] {
            violations.push(format!("x = {x} does not precede l_{} on the path", i + 1));
        }
        records.push(TypeTwoRecord { leaf, t: ti, h: hi, q });
    }
    for (a, ra) in records.iter().enumerate() {
        for rb in &records[a + 1..] {
            if ra.y() == rb.y() {
                violations.push(format!("leaves {} and {} share y = {}", ra.leaf, rb.leaf, ra.y()));
            }
        }
        if ra.y() == ra.z() {
            if let Some(rb) = records.iter().find(|rb| on_arc(rb.x(), ra.z())) {
                violations.push(format!(
                    "path arc ({}, {}) leaves x of leaf {} into z of leaf {}",
                    rb.x(),
                    ra.z(),
                    rb.leaf,
                    ra.leaf
                ));
            }
        }
    }
    records
}

/// Start from the path itself; per record, hang `y` below `x` (a new leaf
/// off the path, or a 1-change that turns the path predecessor of `y` into
/// a leaf).
fn rebuild_from_path(
    d: &Digraph,
    path: &[VertexId],
    records: &[TypeTwoRecord],
    violations: &mut Vec<String>,
) -> Result<OutTree> {
    let mut parent: Vec<Option<VertexId>> = vec![None; d.n()];
    for w in path.windows(2) {
        parent[w[1]] = Some(w[0]);
    }
    let mut claimed = vec![false; d.n()];
    for rec in records {
        let y = rec.y();
        if std::mem::replace(&mut claimed[y], true) {
            violations.push(format!("y = {y} claimed twice; keeping the first"));
            continue;
        }
        parent[y] = Some(rec.x());
    }
    let arcs: Vec<_> = (0..d.n()).filter_map(|v| parent[v].map(|p| (p, v))).collect();
    OutTree::from_arcs(d.n(), path[0], &arcs)
}
