//! Out-trees, out-branchings and 1-changes.

mod local_search;

pub use local_search::{
    apply_path_changes, extend_to_out_branching, find_improving_change, is_improving,
    one_change, one_optimal_from, one_optimal_out_branching,
};

use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};
use std::collections::VecDeque;
use std::fmt::Write as _;

/// A rooted out-tree living inside a host digraph on `n` vertices.
///
/// Parent and child lists are both kept, so role queries (leaf, branch,
/// branch successor) are O(1).
#[derive(Debug, Clone)]
pub struct OutTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    member: Vec<bool>,
    children: Vec<Vec<VertexId>>,
    size: usize,
}

impl PartialEq for OutTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.member == other.member && self.parent == other.parent
    }
}

impl Eq for OutTree {}

/// `Leaf(T)`, `Branch(T)` and `BrSucc(T)`, each sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleSets {
    pub leaves: Vec<VertexId>,
    pub branch: Vec<VertexId>,
    pub br_succ: Vec<VertexId>,
}

/// Pre/post-order numbers for O(1) ancestor queries on a fixed tree.
#[derive(Debug, Clone)]
pub struct TreeIntervals {
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl TreeIntervals {
    /// `a ⪯_T b`, for members `a` and `b`.
    pub fn is_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    pub fn tin(&self, v: VertexId) -> usize {
        self.tin[v]
    }

    pub fn tout(&self, v: VertexId) -> usize {
        self.tout[v]
    }
}

impl OutTree {
    pub fn singleton(host_n: usize, root: VertexId) -> Self {
        assert!(root < host_n, "root {root} outside host of size {host_n}");
        let mut member = vec![false; host_n];
        member[root] = true;
        OutTree {
            root,
            parent: vec![None; host_n],
            member,
            children: vec![Vec::new(); host_n],
            size: 1,
        }
    }

    /// Build from a root and an arc list; fails unless the arcs form an
    /// out-tree rooted at `root`.
    pub fn from_arcs(host_n: usize, root: VertexId, arcs: &[Arc]) -> Result<Self> {
        if root >= host_n {
            return Err(Error::VertexOutOfRange { vertex: root, n: host_n });
        }
        let mut tree = OutTree::singleton(host_n, root);
        let mut parent = vec![None; host_n];
        for &(u, v) in arcs {
            for x in [u, v] {
                if x >= host_n {
                    return Err(Error::VertexOutOfRange { vertex: x, n: host_n });
                }
            }
            if v == root {
                return Err(Error::InvalidTree(format!("root {root} has parent {u}")));
            }
            if parent[v].replace(u).is_some() {
                return Err(Error::InvalidTree(format!("vertex {v} has two parents")));
            }
        }
        let mut children = vec![Vec::new(); host_n];
        for &(u, v) in arcs {
            children[u].push(v);
        }
        let mut queue = VecDeque::from([root]);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &c in &children[x] {
                tree.member[c] = true;
                reached += 1;
                queue.push_back(c);
            }
        }
        if reached != arcs.len() + 1 {
            return Err(Error::InvalidTree(
                "arcs are not connected to the root or contain a cycle".into(),
            ));
        }
        for list in &mut children {
            list.sort_unstable();
        }
        tree.parent = parent;
        tree.children = children;
        tree.size = reached;
        Ok(tree)
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn host_n(&self) -> usize {
        self.member.len()
    }

    /// Number of vertices in the tree.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.member.len() && self.member[v]
    }

    pub fn member_mask(&self) -> &[bool] {
        &self.member
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent.get(v).copied().flatten()
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn has_tree_arc(&self, u: VertexId, v: VertexId) -> bool {
        self.parent(v) == Some(u)
    }

    pub fn is_spanning(&self) -> bool {
        self.size == self.member.len()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.contains(v) && self.children[v].is_empty()
    }

    pub fn is_branch(&self, v: VertexId) -> bool {
        self.contains(v) && self.children[v].len() >= 2
    }

    pub fn is_br_succ(&self, v: VertexId) -> bool {
        self.parent(v).is_some_and(|p| self.is_branch(p))
    }

    pub fn leaf_count(&self) -> usize {
        self.vertex_iter().filter(|&v| self.children[v].is_empty()).count()
    }

    fn vertex_iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.member.len()).filter(|&v| self.member[v])
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        self.vertex_iter().filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn role_sets(&self) -> RoleSets {
        RoleSets {
            leaves: self.leaves(),
            branch: self.vertex_iter().filter(|&v| self.is_branch(v)).collect(),
            br_succ: self.vertex_iter().filter(|&v| self.is_br_succ(v)).collect(),
        }
    }

    /// Members in BFS order from the root, children visited by id.
    pub fn bfs_order(&self) -> Vec<VertexId> {
        let mut order = Vec::with_capacity(self.size);
        order.push(self.root);
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            let mut kids = self.children[x].clone();
            kids.sort_unstable();
            order.extend(kids);
            i += 1;
        }
        order
    }

    /// Tree arcs in BFS order of their heads.
    pub fn arcs(&self) -> Vec<Arc> {
        self.bfs_order()
            .into_iter()
            .skip(1)
            .map(|v| (self.parent[v].expect("non-root member has a parent"), v))
            .collect()
    }

    /// Members in DFS preorder, children visited by id.
    pub fn preorder(&self) -> Vec<VertexId> {
        let mut order = Vec::with_capacity(self.size);
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            order.push(x);
            let mut kids = self.children[x].clone();
            kids.sort_unstable_by(|a, b| b.cmp(a));
            stack.extend(kids);
        }
        order
    }

    pub fn intervals(&self) -> TreeIntervals {
        let n = self.member.len();
        let mut tin = vec![usize::MAX; n];
        let mut tout = vec![0; n];
        let mut clock = 0;
        let mut stack = vec![(self.root, false)];
        while let Some((x, done)) = stack.pop() {
            if done {
                tout[x] = clock;
                clock += 1;
                continue;
            }
            tin[x] = clock;
            clock += 1;
            stack.push((x, true));
            for &c in self.children[x].iter().rev() {
                stack.push((c, false));
            }
        }
        TreeIntervals { tin, tout }
    }

    /// `u ⪯_T v`: `v` lies in the subtree rooted at `u`.
    pub fn tree_leq(&self, u: VertexId, v: VertexId) -> Result<bool> {
        for x in [u, v] {
            if !self.contains(x) {
                return Err(Error::NotInTree(x));
            }
        }
        Ok(self.is_ancestor(u, v))
    }

    /// Unchecked ancestor walk from `v` towards the root.
    pub(crate) fn is_ancestor(&self, u: VertexId, v: VertexId) -> bool {
        let mut cur = Some(v);
        while let Some(x) = cur {
            if x == u {
                return true;
            }
            cur = self.parent[x];
        }
        false
    }

    /// Path of vertices from the root down to `v`.
    pub fn root_path(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Membership mask of `R_T(z)`.
    pub fn subtree_mask(&self, z: VertexId) -> Vec<bool> {
        let mut mask = vec![false; self.member.len()];
        let mut stack = vec![z];
        while let Some(x) = stack.pop() {
            mask[x] = true;
            stack.extend_from_slice(&self.children[x]);
        }
        mask
    }

    /// `T[R_T(z)]`, rooted at `z`.
    pub fn subtree(&self, z: VertexId) -> OutTree {
        let mask = self.subtree_mask(z);
        let mut tree = self.clone();
        tree.root = z;
        tree.parent[z] = None;
        tree.size = 0;
        for (v, &inside) in mask.iter().enumerate() {
            if !inside {
                tree.member[v] = false;
                tree.parent[v] = None;
                tree.children[v].clear();
            } else {
                tree.size += 1;
            }
        }
        tree
    }

    /// Number of leaves among the flagged vertices.
    pub fn leaf_count_in(&self, mask: &[bool]) -> usize {
        self.vertex_iter().filter(|&v| mask[v] && self.is_leaf(v)).count()
    }

    /// Add a new member `child` below the member `parent`.
    pub(crate) fn attach(&mut self, parent: VertexId, child: VertexId) {
        debug_assert!(self.member[parent] && !self.member[child]);
        self.member[child] = true;
        self.parent[child] = Some(parent);
        self.children[parent].push(child);
        self.size += 1;
    }

    /// Replace the parent of member `v` by member `u`, with no checks.
    pub(crate) fn reparent(&mut self, u: VertexId, v: VertexId) {
        if let Some(w) = self.parent[v] {
            let kids = &mut self.children[w];
            let pos = kids.iter().position(|&c| c == v).expect("child list out of sync");
            kids.swap_remove(pos);
        }
        self.parent[v] = Some(u);
        self.children[u].push(v);
    }

    /// Every tree arc is an arc of `d` and the host sizes agree.
    pub fn validate_in(&self, d: &Digraph) -> Result<()> {
        if self.member.len() != d.n() {
            return Err(Error::InvalidTree(format!(
                "tree host has {} vertices, digraph has {}",
                self.member.len(),
                d.n()
            )));
        }
        for v in self.vertex_iter() {
            if let Some(p) = self.parent[v] {
                if !d.has_arc(p, v) {
                    return Err(Error::NotAnArc(p, v));
                }
            }
        }
        Ok(())
    }

    pub fn is_out_tree_of(&self, d: &Digraph) -> bool {
        self.validate_in(d).is_ok()
    }

    pub fn is_out_branching_of(&self, d: &Digraph) -> bool {
        self.is_spanning() && self.validate_in(d).is_ok()
    }

    /// `root r` followed by one `parent child` line per arc, BFS order.
    pub fn to_witness_string(&self) -> String {
        let mut out = format!("root {}\n", self.root);
        for (u, v) in self.arcs() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_witness(host_n: usize, text: &str) -> Result<OutTree> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let bad = |l: &str| Error::InvalidTree(format!("malformed witness line {l:?}"));
        let first = lines.next().ok_or_else(|| bad(""))?;
        let root = first
            .strip_prefix("root ")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| bad(first))?;
        let mut arcs = Vec::new();
        for line in lines {
            let mut it = line.split_ascii_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => arcs.push((u, v)),
                _ => return Err(bad(line)),
            }
        }
        OutTree::from_arcs(host_n, root, &arcs)
    }
}

/// BFS out-branching rooted at `r`, smallest-id parents first.
pub fn bfs_out_branching(d: &Digraph, r: VertexId) -> Result<OutTree> {
    d.check_vertex(r)?;
    let mut tree = OutTree::singleton(d.n(), r);
    let mut queue = VecDeque::from([r]);
    while let Some(x) = queue.pop_front() {
        for y in d.out_neighbors(x) {
            if !tree.contains(y) {
                tree.attach(x, y);
                queue.push_back(y);
            }
        }
    }
    if !tree.is_spanning() {
        return Err(Error::RootCannotReachAll(r));
    }
    Ok(tree)
}
