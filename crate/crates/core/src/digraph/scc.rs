use super::{Digraph, VertexId};

/// Strong components, numbered by their smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongComponentPartition {
    pub component_of: Vec<usize>,
    /// Each component's vertices in increasing order.
    pub components: Vec<Vec<VertexId>>,
    /// `initial[c]` iff no arc enters component `c` from outside.
    pub initial: Vec<bool>,
}

impl StrongComponentPartition {
    pub fn initial_components(&self) -> impl Iterator<Item = &[VertexId]> + '_ {
        self.components
            .iter()
            .zip(&self.initial)
            .filter(|(_, &init)| init)
            .map(|(c, _)| c.as_slice())
    }
}

/// Iterative Tarjan.
pub fn strong_components(d: &Digraph) -> StrongComponentPartition {
    const UNVISITED: usize = usize::MAX;
    let n = d.n();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<VertexId> = Vec::new();
    let mut raw_comp = vec![UNVISITED; n];
    let mut n_comps = 0;
    let mut counter = 0;
    // (vertex, next out-arc position)
    let mut call: Vec<(VertexId, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != UNVISITED {
            continue;
        }
        call.push((start, 0));
        index[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let out = d.out_arcs(v);
            if *pos < out.len() {
                let w = d.arc(out[*pos]).1;
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    raw_comp[w] = n_comps;
                    if w == v {
                        break;
                    }
                }
                n_comps += 1;
            }
        }
    }

    // Renumber by smallest member.
    let mut relabel = vec![UNVISITED; n_comps];
    let mut components: Vec<Vec<VertexId>> = Vec::new();
    let mut component_of = vec![0; n];
    for v in 0..n {
        let raw = raw_comp[v];
        if relabel[raw] == UNVISITED {
            relabel[raw] = components.len();
            components.push(Vec::new());
        }
        component_of[v] = relabel[raw];
        components[relabel[raw]].push(v);
    }
    let mut initial = vec![true; components.len()];
    for &(u, v) in d.arcs() {
        if component_of[u] != component_of[v] {
            initial[component_of[v]] = false;
        }
    }
    StrongComponentPartition {
        component_of,
        components,
        initial,
    }
}
