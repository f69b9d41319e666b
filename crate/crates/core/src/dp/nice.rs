use crate::decomposition::TreeDecomposition;
use crate::digraph::VertexId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceKind {
    /// Empty bag, no children.
    Leaf,
    /// Bag of the single child plus the vertex.
    Introduce(VertexId),
    /// Bag of the single child minus the vertex.
    Forget(VertexId),
    /// Two children with the same bag.
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<VertexId>,
    pub children: Vec<usize>,
}

/// A rooted nice decomposition. Children always precede their parent in
/// `nodes`, and the root bag is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    width: usize,
}

impl NiceDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &NiceNode {
        &self.nodes[i]
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Check that every node's bag and children match its tag.
    pub fn check_shape(&self) -> Result<()> {
        let bad = |i: usize, msg: &str| Err(Error::InvalidDecomposition(format!("nice node {i}: {msg}")));
        let mut has_parent = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return bad(i, "bag not sorted");
            }
            for &c in &node.children {
                if c >= i || std::mem::replace(&mut has_parent[c], true) {
                    return bad(i, "children must be earlier nodes with a single parent");
                }
            }
            let child_bag = |j: usize| &self.nodes[node.children[j]].bag;
            let ok = match (node.kind, node.children.len()) {
                (NiceKind::Leaf, 0) => node.bag.is_empty(),
                (NiceKind::Introduce(v), 1) => {
                    child_bag(0).binary_search(&v).is_err() && with(child_bag(0), v) == node.bag
                }
                (NiceKind::Forget(v), 1) => {
                    node.bag.binary_search(&v).is_err() && with(&node.bag, v) == *child_bag(0)
                }
                (NiceKind::Join, 2) => *child_bag(0) == node.bag && *child_bag(1) == node.bag,
                _ => false,
            };
            if !ok {
                return bad(i, "bag does not match tag");
            }
        }
        if self.nodes.is_empty() || has_parent.iter().filter(|&&p| !p).count() != 1 {
            return Err(Error::InvalidDecomposition("nice form is not a single rooted tree".into()));
        }
        if !self.nodes[self.root()].bag.is_empty() {
            return bad(self.root(), "root bag must be empty");
        }
        Ok(())
    }

    /// The same nodes viewed as a plain tree decomposition.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.children.iter().map(move |&c| (i, c)))
            .collect();
        TreeDecomposition::new(bags, edges, self.root())
    }
}

fn with(bag: &[VertexId], v: VertexId) -> Vec<VertexId> {
    let mut out = bag.to_vec();
    let pos = out.binary_search(&v).unwrap_or_else(|p| p);
    out.insert(pos, v);
    out
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NiceKind, bag: Vec<VertexId>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Walk from node `top` (bag `from`) to bag `to`: forget first, then
    /// introduce, one vertex per node.
    fn morph(&mut self, mut top: usize, to: &[VertexId]) -> usize {
        let from = self.nodes[top].bag.clone();
        let mut bag = from.clone();
        for &v in from.iter().filter(|v| to.binary_search(v).is_err()) {
            bag.retain(|&x| x != v);
            top = self.push(NiceKind::Forget(v), bag.clone(), vec![top]);
        }
        for &v in to.iter().filter(|v| from.binary_search(v).is_err()) {
            bag = with(&bag, v);
            top = self.push(NiceKind::Introduce(v), bag.clone(), vec![top]);
        }
        top
    }
}

/// Nice form of a decomposition with a valid tree skeleton.
pub fn to_nice_decomposition(td: &TreeDecomposition) -> Result<NiceDecomposition> {
    let parent = td
        .rooted_parents()
        .ok_or_else(|| Error::InvalidDecomposition("skeleton is not a tree on the nodes".into()))?;
    let n = td.node_count();
    let mut children = vec![Vec::new(); n];
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(i);
        }
    }
    // Post-order, iteratively.
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![(td.root(), false)];
    while let Some((x, done)) = stack.pop() {
        if done {
            order.push(x);
        } else {
            stack.push((x, true));
            stack.extend(children[x].iter().rev().map(|&c| (c, false)));
        }
    }

    let mut b = Builder { nodes: Vec::new() };
    let mut top = vec![usize::MAX; n];
    for &x in &order {
        let bag = td.bag(x);
        let mut joined: Option<usize> = None;
        for &c in &children[x] {
            let sub = b.morph(top[c], bag);
            joined = Some(match joined {
                None => sub,
                Some(acc) => b.push(NiceKind::Join, bag.to_vec(), vec![acc, sub]),
            });
        }
        top[x] = match joined {
            Some(j) => j,
            None => {
                let leaf = b.push(NiceKind::Leaf, Vec::new(), Vec::new());
                b.morph(leaf, bag)
            }
        };
    }
    let root = b.morph(top[td.root()], &[]);
    debug_assert_eq!(root, b.nodes.len() - 1);
    let width = b.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0).saturating_sub(1);
    Ok(NiceDecomposition { nodes: b.nodes, width })
}
