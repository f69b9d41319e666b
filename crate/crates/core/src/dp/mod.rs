//! Exact max-leaf out-trees and out-branchings by dynamic programming over a
//! nice tree decomposition.
//!
//! A partial solution below a node is an out-forest on the processed
//! vertices that are chosen to be present. Every arc is decided at the
//! forget node of whichever endpoint is forgotten first; the other endpoint
//! is then still in the bag. A state records, for each bag vertex, whether it
//! is present, whether it already has a parent and a child, and which
//! partial tree it belongs to. Each partial tree has exactly one parentless
//! vertex, its root; trees whose root has been forgotten can no longer be
//! attached below anything, so at most one of them may exist. When the last
//! bag vertex of a tree is forgotten the tree is complete and the state is
//! marked finished; no present vertex may follow.

mod nice;

pub use nice::{to_nice_decomposition, NiceDecomposition, NiceKind, NiceNode};

use crate::arborescence::OutTree;
use crate::decomposition::validate_tree_decomposition;
use crate::digraph::{Digraph, VertexId};
use crate::error::{Error, Result};
use std::collections::HashMap;

const PRESENT: u16 = 1;
const HAS_PARENT: u16 = 2;
const HAS_CHILD: u16 = 4;
const LABEL_SHIFT: u16 = 3;
const MAX_BAG: usize = 64;
/// Labels stay below this bound, also mid-join before renormalizing.
const LABEL_SPACE: usize = 4 * MAX_BAG;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    OutTree,
    Branching,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct State {
    cells: Vec<u16>,
    finished: bool,
}

fn label(cell: u16) -> u16 {
    cell >> LABEL_SHIFT
}

fn present(cell: u16) -> bool {
    cell & PRESENT != 0
}

impl State {
    /// Relabel trees by first appearance.
    fn normalize(&mut self) {
        let mut map = [u16::MAX; LABEL_SPACE];
        let mut next = 0;
        for cell in self.cells.iter_mut().filter(|c| present(**c)) {
            let l = label(*cell) as usize;
            if map[l] == u16::MAX {
                map[l] = next;
                next += 1;
            }
            *cell = (*cell & 7) | (map[l] << LABEL_SHIFT);
        }
    }

    /// At most one tree may have lost its root.
    fn viable(&self) -> bool {
        let mut has_root = [false; LABEL_SPACE];
        let mut seen = [false; LABEL_SPACE];
        for &c in self.cells.iter().filter(|c| present(**c)) {
            seen[label(c) as usize] = true;
            if c & HAS_PARENT == 0 {
                has_root[label(c) as usize] = true;
            }
        }
        seen.iter().zip(&has_root).filter(|(&s, &r)| s && !r).count() <= 1
    }

    fn present_mask(&self) -> u64 {
        self.cells.iter().enumerate().filter(|(_, c)| present(**c)).fold(0, |m, (i, _)| m | 1 << i)
    }

    fn parent_mask(&self) -> u64 {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| **c & HAS_PARENT != 0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

#[derive(Debug, Clone)]
enum Back {
    Leaf,
    Introduce(u32),
    /// Chosen parent and children, as positions in the child's bag.
    Forget { child: u32, parent: Option<u8>, kids: u64 },
    Join(u32, u32),
}

#[derive(Debug, Clone)]
struct Entry {
    value: u32,
    back: Back,
}

type Table = Vec<(State, Entry)>;

fn offer(map: &mut HashMap<State, Entry>, state: State, value: u32, back: Back) {
    match map.get_mut(&state) {
        Some(e) if e.value >= value => {}
        Some(e) => *e = Entry { value, back },
        None => {
            map.insert(state, Entry { value, back });
        }
    }
}

fn freeze(map: HashMap<State, Entry>) -> Table {
    let mut table: Table = map.into_iter().collect();
    table.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    table
}

fn introduce(mode: Mode, child: &Table, pos: usize) -> Table {
    let mut map = HashMap::new();
    for (idx, (s, e)) in child.iter().enumerate() {
        let back = || Back::Introduce(idx as u32);
        if mode == Mode::OutTree {
            let mut cells = s.cells.clone();
            cells.insert(pos, 0);
            offer(&mut map, State { cells, finished: s.finished }, e.value, back());
        }
        if !s.finished {
            let mut cells = s.cells.clone();
            cells.insert(pos, PRESENT | ((MAX_BAG as u16) << LABEL_SHIFT));
            let mut next = State { cells, finished: false };
            next.normalize();
            offer(&mut map, next, e.value, back());
        }
    }
    freeze(map)
}

fn forget(d: &Digraph, child: &Table, bag: &[VertexId], pos: usize) -> Table {
    let v = bag[pos];
    let mut map = HashMap::new();
    for (idx, (s, e)) in child.iter().enumerate() {
        let cell = s.cells[pos];
        if !present(cell) {
            let mut cells = s.cells.clone();
            cells.remove(pos);
            let back = Back::Forget { child: idx as u32, parent: None, kids: 0 };
            offer(&mut map, State { cells, finished: s.finished }, e.value, back);
            continue;
        }
        let own = label(cell);
        let others = || (0..bag.len()).filter(move |&j| j != pos && present(s.cells[j]));
        let mut parents: Vec<Option<usize>> = vec![None];
        if cell & HAS_PARENT == 0 {
            parents.extend(
                others()
                    .filter(|&j| label(s.cells[j]) != own && d.has_arc(bag[j], v))
                    .map(Some),
            );
        }
        let kid_pool: Vec<usize> = others()
            .filter(|&j| {
                s.cells[j] & HAS_PARENT == 0 && label(s.cells[j]) != own && d.has_arc(v, bag[j])
            })
            .collect();
        for &p in &parents {
            let p_label = p.map(|j| label(s.cells[j]));
            let pool: Vec<usize> =
                kid_pool.iter().copied().filter(|&j| Some(label(s.cells[j])) != p_label).collect();
            for sub in 0u64..(1 << pool.len()) {
                let kids: Vec<usize> =
                    (0..pool.len()).filter(|&b| sub >> b & 1 == 1).map(|b| pool[b]).collect();
                let mut cells = s.cells.clone();
                let mut merged = vec![own];
                if let Some(j) = p {
                    cells[j] |= HAS_CHILD;
                    merged.push(label(cells[j]));
                }
                for &w in &kids {
                    cells[w] |= HAS_PARENT;
                    merged.push(label(cells[w]));
                }
                for c in cells.iter_mut().filter(|c| present(**c)) {
                    if merged.contains(&label(*c)) {
                        *c = (*c & 7) | (own << LABEL_SHIFT);
                    }
                }
                let gain = u32::from(cell & HAS_CHILD == 0 && kids.is_empty());
                cells.remove(pos);
                let mut finished = s.finished;
                if !cells.iter().any(|&c| present(c) && label(c) == own) {
                    // The tree of v is complete; it must be the only one.
                    if finished || cells.iter().any(|&c| present(c)) {
                        continue;
                    }
                    finished = true;
                }
                let mut next = State { cells, finished };
                if !next.viable() {
                    continue;
                }
                next.normalize();
                let kid_mask = kids.iter().fold(0u64, |m, &w| m | 1 << w);
                let back = Back::Forget { child: idx as u32, parent: p.map(|j| j as u8), kids: kid_mask };
                offer(&mut map, next, e.value + gain, back);
            }
        }
    }
    freeze(map)
}

fn join(left: &Table, right: &Table) -> Table {
    let mut groups: HashMap<u64, Vec<usize>> = HashMap::new();
    for (idx, (s, _)) in right.iter().enumerate() {
        groups.entry(s.present_mask()).or_default().push(idx);
    }
    let mut map = HashMap::new();
    let mut uf = [0usize; LABEL_SPACE];
    for (li, (ls, le)) in left.iter().enumerate() {
        let Some(group) = groups.get(&ls.present_mask()) else {
            continue;
        };
        let l_parents = ls.parent_mask();
        'pair: for &ri in group {
            let (rs, re) = &right[ri];
            if (ls.finished && rs.finished) || l_parents & rs.parent_mask() != 0 {
                continue;
            }
            for (i, slot) in uf.iter_mut().enumerate() {
                *slot = i;
            }
            let mut cells = ls.cells.clone();
            for (j, cell) in cells.iter_mut().enumerate().filter(|(_, c)| present(**c)) {
                let a = find(&mut uf, label(*cell) as usize);
                let b = find(&mut uf, 2 * MAX_BAG + label(rs.cells[j]) as usize);
                if a == b {
                    continue 'pair;
                }
                uf[b] = a;
                *cell |= rs.cells[j] & (HAS_PARENT | HAS_CHILD);
            }
            for cell in cells.iter_mut().filter(|c| present(**c)) {
                let root = find(&mut uf, label(*cell) as usize) as u16;
                *cell = (*cell & 7) | (root << LABEL_SHIFT);
            }
            let mut next = State { cells, finished: ls.finished || rs.finished };
            if !next.viable() {
                continue;
            }
            next.normalize();
            offer(&mut map, next, le.value + re.value, Back::Join(li as u32, ri as u32));
        }
    }
    freeze(map)
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

fn run(d: &Digraph, nd: &NiceDecomposition, mode: Mode) -> Result<(usize, OutTree)> {
    nd.check_shape()?;
    validate_tree_decomposition(d, &nd.to_tree_decomposition())
        .map_err(|v| Error::InvalidDecomposition(v.to_string()))?;
    if nd.width() + 1 > MAX_BAG {
        return Err(Error::WidthTooLarge { width: nd.width(), limit: MAX_BAG - 1 });
    }

    let mut tables: Vec<Table> = Vec::with_capacity(nd.nodes().len());
    for node in nd.nodes() {
        let table = match node.kind {
            NiceKind::Leaf => vec![(
                State { cells: Vec::new(), finished: false },
                Entry { value: 0, back: Back::Leaf },
            )],
            NiceKind::Introduce(v) => {
                let pos = node.bag.binary_search(&v).expect("checked shape");
                introduce(mode, &tables[node.children[0]], pos)
            }
            NiceKind::Forget(v) => {
                let child_bag = &nd.node(node.children[0]).bag;
                let pos = child_bag.binary_search(&v).expect("checked shape");
                forget(d, &tables[node.children[0]], child_bag, pos)
            }
            NiceKind::Join => join(&tables[node.children[0]], &tables[node.children[1]]),
        };
        tables.push(table);
    }

    let root = nd.root();
    let best = tables[root]
        .iter()
        .enumerate()
        .filter(|(_, (s, _))| s.finished)
        .fold(None, |best: Option<(usize, u32)>, (i, (_, e))| match best {
            Some((_, v)) if v >= e.value => best,
            _ => Some((i, e.value)),
        });
    let Some((idx, value)) = best else {
        return Err(Error::NoOutBranching);
    };
    let tree = reconstruct(d, nd, &tables, idx);
    debug_assert_eq!(tree.leaf_count(), value as usize);
    Ok((value as usize, tree))
}

fn reconstruct(d: &Digraph, nd: &NiceDecomposition, tables: &[Table], idx: usize) -> OutTree {
    let mut arcs = Vec::new();
    let mut chosen = Vec::new();
    let mut stack = vec![(nd.root(), idx)];
    while let Some((node, i)) = stack.pop() {
        let n = nd.node(node);
        match tables[node][i].1.back {
            Back::Leaf => {}
            Back::Introduce(c) => stack.push((n.children[0], c as usize)),
            Back::Join(l, r) => {
                stack.push((n.children[0], l as usize));
                stack.push((n.children[1], r as usize));
            }
            Back::Forget { child, parent, kids } => {
                let NiceKind::Forget(v) = n.kind else { unreachable!() };
                let child_node = n.children[0];
                let bag = &nd.node(child_node).bag;
                let pos = bag.binary_search(&v).expect("checked shape");
                if present(tables[child_node][child as usize].0.cells[pos]) {
                    chosen.push(v);
                    arcs.extend(parent.map(|j| (bag[j as usize], v)));
                    arcs.extend((0..bag.len()).filter(|&w| kids >> w & 1 == 1).map(|w| (v, bag[w])));
                }
                stack.push((child_node, child as usize));
            }
        }
    }
    let mut has_parent = vec![false; d.n()];
    for &(_, v) in &arcs {
        has_parent[v] = true;
    }
    let root = chosen.iter().copied().find(|&v| !has_parent[v]).expect("a finished tree has a root");
    OutTree::from_arcs(d.n(), root, &arcs).expect("DP states describe a single out-tree")
}

/// `ℓ(D)` and a witness out-tree; a lone vertex counts as one leaf.
/// Fails with `NoOutBranching` only when `D` has no vertices.
pub fn max_leaf_out_tree_dp(d: &Digraph, nd: &NiceDecomposition) -> Result<(usize, OutTree)> {
    run(d, nd, Mode::OutTree)
}

/// `ℓ_s(D)` and a witness out-branching.
pub fn max_leaf_out_branching_dp(d: &Digraph, nd: &NiceDecomposition) -> Result<(usize, OutTree)> {
    run(d, nd, Mode::Branching)
}
