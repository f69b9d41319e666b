//! Simple digraphs on dense vertex ids, with reachability helpers.

mod parse;
mod scc;
mod useless;

pub use parse::parse_digraph;
pub use scc::{strong_components, StrongComponentPartition};
pub use useless::{find_useless_arcs, remove_useless_arcs};

use crate::error::{Error, Result};
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

/// Dense vertex index in `0..n`.
pub type VertexId = usize;

/// An arc `(tail, head)`.
pub type Arc = (VertexId, VertexId);

/// A digraph without self-loops or parallel arcs.
///
/// Arcs keep the order in which they were given, so arc indices are stable
/// and can be reported back to the caller. Adjacency lists are sorted by the
/// opposite endpoint, which makes every traversal in the crate deterministic
/// and "smallest id first".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<Arc>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    index: HashMap<Arc, usize>,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = Arc>) -> Result<Self> {
        let mut graph = Digraph {
            n,
            arcs: Vec::new(),
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            index: HashMap::new(),
        };
        for (u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if graph.index.contains_key(&(u, v)) {
                return Err(Error::DuplicateArc(u, v));
            }
            let id = graph.arcs.len();
            graph.arcs.push((u, v));
            graph.index.insert((u, v), id);
            graph.out_adj[u].push(id);
            graph.in_adj[v].push(id);
        }
        let arcs = &graph.arcs;
        for list in &mut graph.out_adj {
            list.sort_by_key(|&a| arcs[a].1);
        }
        for list in &mut graph.in_adj {
            list.sort_by_key(|&a| arcs[a].0);
        }
        Ok(graph)
    }

    pub fn empty(n: usize) -> Self {
        Digraph::new(n, std::iter::empty()).expect("empty digraph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> Arc {
        self.arcs[id]
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n
    }

    pub fn arc_index(&self, tail: VertexId, head: VertexId) -> Option<usize> {
        self.index.get(&(tail, head)).copied()
    }

    pub fn has_arc(&self, tail: VertexId, head: VertexId) -> bool {
        self.index.contains_key(&(tail, head))
    }

    /// Indices of arcs leaving `v`, sorted by head.
    pub fn out_arcs(&self, v: VertexId) -> &[usize] {
        &self.out_adj[v]
    }

    /// Indices of arcs entering `v`, sorted by tail.
    pub fn in_arcs(&self, v: VertexId) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out_adj[v].iter().map(move |&a| self.arcs[a].1)
    }

    pub fn in_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.in_adj[v].iter().map(move |&a| self.arcs[a].0)
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_adj[v].len()
    }

    pub fn min_in_degree(&self) -> Option<usize> {
        self.in_adj.iter().map(Vec::len).min()
    }

    /// `(u, v) ∈ A` implies `(v, u) ∉ A`.
    pub fn is_oriented(&self) -> bool {
        self.arcs.iter().all(|&(u, v)| !self.has_arc(v, u))
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Membership mask of `R_D(source)`, optionally with one vertex deleted
    /// from the digraph.
    pub fn reach_mask_avoiding(&self, source: VertexId, banned: Option<VertexId>) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        if Some(source) == banned {
            return seen;
        }
        if let Some(b) = banned {
            seen[b] = true;
        }
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(x) = stack.pop() {
            for y in self.out_neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if let Some(b) = banned {
            seen[b] = false;
        }
        seen
    }

    pub fn reach_mask(&self, source: VertexId) -> Vec<bool> {
        self.reach_mask_avoiding(source, None)
    }

    /// Vertices that can reach `target`.
    pub fn reverse_reach_mask(&self, target: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[target] = true;
        let mut stack = vec![target];
        while let Some(x) = stack.pop() {
            for y in self.in_neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// `R_D(u)`: every vertex reachable from `u`, including `u`, sorted.
    pub fn reachable_set(&self, u: VertexId) -> Result<Vec<VertexId>> {
        self.check_vertex(u)?;
        Ok(mask_to_vec(&self.reach_mask(u)))
    }

    /// Shortest dipath (fewest arcs) from `source` to `target`, avoiding
    /// `banned`. Ties go to the smallest-id predecessor discovered first.
    pub fn bfs_path(
        &self,
        source: VertexId,
        target: VertexId,
        banned: Option<VertexId>,
    ) -> Option<Vec<VertexId>> {
        if Some(source) == banned || Some(target) == banned {
            return None;
        }
        let mut pred = vec![usize::MAX; self.n];
        let mut seen = vec![false; self.n];
        seen[source] = true;
        if let Some(b) = banned {
            seen[b] = true;
        }
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            if x == target {
                break;
            }
            for y in self.out_neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    pred[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if target != source && pred[target] == usize::MAX {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while cur != source {
            cur = pred[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Smallest-id vertex `r` with `R_D(r) = V(D)`, if any.
    pub fn out_branching_root(&self) -> Option<VertexId> {
        self.full_reach_mask()
            .and_then(|mask| mask.iter().position(|&b| b))
    }

    /// Mask of the vertices `v` with `R_D(v) = V(D)`; `None` when there are none.
    pub fn full_reach_mask(&self) -> Option<Vec<bool>> {
        if self.n == 0 {
            return None;
        }
        let partition = strong_components(self);
        let initial: Vec<usize> = (0..partition.components.len())
            .filter(|&c| partition.initial[c])
            .collect();
        if initial.len() != 1 {
            return None;
        }
        let candidate = partition.components[initial[0]][0];
        if !self.reach_mask(candidate).iter().all(|&b| b) {
            return None;
        }
        Some(self.reverse_reach_mask(candidate))
    }

    pub fn has_out_branching(&self) -> bool {
        self.out_branching_root().is_some()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n > 0 && strong_components(self).components.len() == 1
    }

    /// Induced subgraph on the vertices flagged in `keep`, renumbered in
    /// increasing order. Returns the subgraph and the new-to-old id map.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Digraph, Vec<VertexId>) {
        let old_of: Vec<VertexId> = (0..self.n).filter(|&v| keep[v]).collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &v) in old_of.iter().enumerate() {
            new_of[v] = i;
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|&&(u, v)| keep[u] && keep[v])
            .map(|&(u, v)| (new_of[u], new_of[v]));
        let sub = Digraph::new(old_of.len(), arcs).expect("subgraph of a valid digraph");
        (sub, old_of)
    }

    /// Same vertex set, dropping the arcs whose indices are flagged.
    pub fn without_arcs(&self, drop: &[bool]) -> Digraph {
        let arcs = self
            .arcs
            .iter()
            .enumerate()
            .filter(|&(i, _)| !drop[i])
            .map(|(_, &a)| a);
        Digraph::new(self.n, arcs).expect("arc subset of a valid digraph")
    }

    /// Copy with one extra arc appended.
    pub fn with_arc(&self, tail: VertexId, head: VertexId) -> Result<Digraph> {
        Digraph::new(self.n, self.arcs.iter().copied().chain([(tail, head)]))
    }

    /// Serialise in the edge-list format, arcs in stored order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(8 + 12 * self.arcs.len());
        let _ = writeln!(out, "{} {}", self.n, self.arcs.len());
        for &(u, v) in &self.arcs {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

pub(crate) fn mask_to_vec(mask: &[bool]) -> Vec<VertexId> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}
