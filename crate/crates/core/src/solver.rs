//! Decision procedures for k-Leaf Out-Tree and k-Leaf Out-Branching.
//!
//! Both start from a 1-optimal out-branching `T`. Enough leaves in `T`, or
//! a vertex whose back arcs reach many distinct heads, answers YES with a
//! witness at once. Otherwise `T` induces a tree decomposition of width at
//! most `4k - 5` (resp. `6k - 5`) and the exact dynamic program decides.

use crate::arborescence::{bfs_out_branching, one_optimal_from, OutTree};
use crate::bounds::{out_branching_from_out_tree, out_tree_from_back_heads};
use crate::decomposition::{build_tree_decomposition, max_back_head_count};
use crate::digraph::{remove_useless_arcs, strong_components, Arc, Digraph, VertexId};
use crate::dp::{max_leaf_out_branching_dp, max_leaf_out_tree_dp, to_nice_decomposition};
use crate::error::{Error, Result};
use crate::oracle::{exact_max_leaf_out_branching, exact_max_leaf_out_tree};
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Problem {
    #[serde(rename = "out-tree")]
    OutTree,
    #[serde(rename = "out-branching")]
    OutBranching,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

/// The step that settled the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Route {
    /// The 1-optimal out-branching already had `k` leaves.
    #[serde(rename = "step-enoughleaves")]
    EnoughLeaves,
    /// A vertex with many back-arc heads gave the witness.
    #[serde(rename = "step-manybackarcs")]
    ManyBackArcs,
    /// The dynamic program over the induced decomposition.
    #[serde(rename = "step-dp")]
    Dp,
    #[serde(rename = "no")]
    No,
    /// Exhaustive search on a small instance.
    #[serde(rename = "oracle")]
    Oracle,
}

/// Largest values seen over the components that were examined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Width of the decomposition handed to the DP, if one ran.
    pub width: Option<usize>,
    pub max_back_heads: usize,
    pub n: usize,
    pub m: usize,
    pub components: usize,
}

impl Stats {
    fn merge(&mut self, other: &Stats) {
        self.width = self.width.max(other.width);
        self.max_back_heads = self.max_back_heads.max(other.max_back_heads);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub problem: Problem,
    pub k: usize,
    pub decision: Decision,
    pub route: Route,
    pub stats: Stats,
    /// Present exactly when the decision is YES.
    pub witness: Option<OutTree>,
}

impl SolveReport {
    fn no(problem: Problem, k: usize, stats: Stats) -> Self {
        SolveReport { problem, k, decision: Decision::No, route: Route::No, stats, witness: None }
    }

    pub fn is_yes(&self) -> bool {
        self.decision == Decision::Yes
    }

    /// Re-check the witness against `d`: a valid out-tree (spanning for the
    /// branching problem) with at least `k` leaves.
    pub fn witness_is_valid(&self, d: &Digraph) -> bool {
        match (&self.witness, self.decision) {
            (Some(t), Decision::Yes) => {
                let shape = match self.problem {
                    Problem::OutTree => t.is_out_tree_of(d),
                    Problem::OutBranching => t.is_out_branching_of(d),
                };
                shape && t.leaf_count() >= self.k
            }
            (None, Decision::No) => true,
            _ => false,
        }
    }
}

impl Serialize for SolveReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SolveReport", 7)?;
        st.serialize_field("problem", &self.problem)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("decision", &self.decision)?;
        st.serialize_field("route", &self.route)?;
        st.serialize_field("stats", &self.stats)?;
        st.serialize_field("witness", &self.witness.as_ref().map(|t| t.arcs()))?;
        st.serialize_field("witness_root", &self.witness.as_ref().map(|t| t.root()))?;
        st.end()
    }
}

/// Lift a tree on a renumbered subgraph back to the host numbering.
fn lift(t: &OutTree, old_of: &[VertexId], host_n: usize) -> OutTree {
    let arcs: Vec<Arc> = t.arcs().into_iter().map(|(u, v)| (old_of[u], old_of[v])).collect();
    OutTree::from_arcs(host_n, old_of[t.root()], &arcs).expect("image of an out-tree")
}

/// Largest `k` for which a YES is possible on `n` vertices.
fn leaf_ceiling(n: usize) -> usize {
    n.saturating_sub(1).max(1)
}

enum Outcome {
    Yes(Route, OutTree),
    No,
}

/// Decide whether `d` has an out-tree with at least `k` leaves.
pub fn solve_k_leaf_out_tree(d: &Digraph, k: usize) -> Result<SolveReport> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let partition = strong_components(d);
    let initial: Vec<&[VertexId]> = partition.initial_components().collect();
    let mut stats = Stats { n: d.n(), m: d.m(), components: initial.len(), ..Stats::default() };
    if d.n() == 0 || k > leaf_ceiling(d.n()) {
        return Ok(SolveReport::no(Problem::OutTree, k, stats));
    }
    let seen = Mutex::new(Vec::new());
    let found = initial.par_iter().enumerate().find_map_first(|(i, comp)| {
        let r = *comp.iter().min().expect("components are non-empty");
        let (sub, old_of) = d.induced_subgraph(&d.reach_mask(r));
        let local_root = old_of.binary_search(&r).expect("r reaches itself");
        let result = decide_tree(&sub, local_root, k);
        match result {
            Ok((Outcome::Yes(route, t), st)) => Some(Ok((i, route, lift(&t, &old_of, d.n()), st))),
            Ok((Outcome::No, st)) => {
                seen.lock().expect("no panics while held").push(st);
                None
            }
            Err(e) => Some(Err(e)),
        }
    });
    match found.transpose()? {
        Some((_, route, witness, st)) => {
            stats.merge(&st);
            Ok(SolveReport { problem: Problem::OutTree, k, decision: Decision::Yes, route, stats, witness: Some(witness) })
        }
        None => {
            for st in seen.into_inner().expect("no panics while held") {
                stats.merge(&st);
            }
            Ok(SolveReport::no(Problem::OutTree, k, stats))
        }
    }
}

/// Steps 3 to 6 on `D[R_D(r)]`, where `r` reaches every vertex.
fn decide_tree(d: &Digraph, r: VertexId, k: usize) -> Result<(Outcome, Stats)> {
    let mut st = Stats::default();
    let t = one_optimal_from(d, bfs_out_branching(d, r)?, Some(k));
    if t.leaf_count() >= k {
        return Ok((Outcome::Yes(Route::EnoughLeaves, t), st));
    }
    let (z, heads) = max_back_head_count(d, &t);
    st.max_back_heads = heads;
    if heads >= k {
        return Ok((Outcome::Yes(Route::ManyBackArcs, out_tree_from_back_heads(d, &t, z)?), st));
    }
    let nd = to_nice_decomposition(&build_tree_decomposition(d, &t)?)?;
    st.width = Some(nd.width());
    let (value, witness) = max_leaf_out_tree_dp(d, &nd)?;
    Ok((if value >= k { Outcome::Yes(Route::Dp, witness) } else { Outcome::No }, st))
}

/// Decide whether `d` has a spanning out-branching with at least `k` leaves.
pub fn solve_k_leaf_out_branching(d: &Digraph, k: usize) -> Result<SolveReport> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let mut stats = Stats { n: d.n(), m: d.m(), components: 1, ..Stats::default() };
    let Some(r) = d.out_branching_root() else {
        stats.components = strong_components(d).initial_components().count();
        return Ok(SolveReport::no(Problem::OutBranching, k, stats));
    };
    if k > leaf_ceiling(d.n()) {
        return Ok(SolveReport::no(Problem::OutBranching, k, stats));
    }
    let clean = remove_useless_arcs(d)?;
    let t = one_optimal_from(&clean, bfs_out_branching(&clean, r)?, Some(k));
    let yes = |route, witness, stats| SolveReport {
        problem: Problem::OutBranching,
        k,
        decision: Decision::Yes,
        route,
        stats,
        witness: Some(witness),
    };
    if t.leaf_count() >= k {
        return Ok(yes(Route::EnoughLeaves, t, stats));
    }
    let (z, heads) = max_back_head_count(&clean, &t);
    stats.max_back_heads = heads;
    if heads >= 3 * k {
        let tree = out_tree_from_back_heads(&clean, &t, z)?;
        let b = out_branching_from_out_tree(&clean, &tree)?;
        if b.leaf_count() >= k {
            return Ok(yes(Route::ManyBackArcs, b, stats));
        }
    }
    let nd = to_nice_decomposition(&build_tree_decomposition(&clean, &t)?)?;
    stats.width = Some(nd.width());
    let (value, witness) = max_leaf_out_branching_dp(&clean, &nd)?;
    if value >= k {
        Ok(yes(Route::Dp, witness, stats))
    } else {
        Ok(SolveReport::no(Problem::OutBranching, k, stats))
    }
}

pub fn solve(d: &Digraph, problem: Problem, k: usize) -> Result<SolveReport> {
    match problem {
        Problem::OutTree => solve_k_leaf_out_tree(d, k),
        Problem::OutBranching => solve_k_leaf_out_branching(d, k),
    }
}

/// The exact optimum by exhaustive search, as a report with route
/// `oracle` and `k` set to the optimum. A digraph without an out-branching
/// gives NO with `k = 0` in branching mode.
pub fn oracle_report(d: &Digraph, problem: Problem) -> Result<SolveReport> {
    let stats = Stats { n: d.n(), m: d.m(), ..Stats::default() };
    let found = match problem {
        Problem::OutTree => exact_max_leaf_out_tree(d),
        Problem::OutBranching => exact_max_leaf_out_branching(d),
    };
    match found {
        Ok((value, witness)) => Ok(SolveReport {
            problem,
            k: value,
            decision: Decision::Yes,
            route: Route::Oracle,
            stats,
            witness: Some(witness),
        }),
        Err(Error::NoOutBranching) => {
            Ok(SolveReport { problem, k: 0, decision: Decision::No, route: Route::Oracle, stats, witness: None })
        }
        Err(e) => Err(e),
    }
}
