//! Seeded digraph generators.
//!
//! All randomness comes from ChaCha8 seeded with the spec's `seed`, so the
//! same spec always yields the same digraph on every platform. Structural
//! guarantees of a family are checked on the output, never assumed.

use crate::arborescence::OutTree;
use crate::digraph::{find_useless_arcs, Arc, Digraph, VertexId};
use crate::error::{Error, Result};
use crate::oracle::{exact_max_leaf_out_branching, exact_max_leaf_out_tree};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Every ordered pair is an arc with probability `p`.
    Random,
    /// Strongly connected, minimum in-degree 3.
    SccIndeg3,
    /// Oriented, strongly connected, minimum in-degree 2.
    OrientedIndeg2,
    /// Minimum in-degree 3, no useless arcs, not strongly connected.
    LayeredIndeg3,
    Cycle,
    Complete,
    Path,
    /// Hill climbing for a useless-arc-free digraph with a large `ℓ / ℓ_s`.
    RatioGapSearch,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Random,
        Family::SccIndeg3,
        Family::OrientedIndeg2,
        Family::LayeredIndeg3,
        Family::Cycle,
        Family::Complete,
        Family::Path,
        Family::RatioGapSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::SccIndeg3 => "scc-indeg3",
            Family::OrientedIndeg2 => "oriented-indeg2",
            Family::LayeredIndeg3 => "layered-indeg3",
            Family::Cycle => "cycle",
            Family::Complete => "complete",
            Family::Path => "path",
            Family::RatioGapSearch => "ratio-gap-search",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
            format!("unknown family {s:?}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    /// Arc probability for `random`; density of extra arcs elsewhere.
    pub p: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        GeneratorSpec { family, n, p: default_p(family), seed }
    }
}

fn default_p(family: Family) -> f64 {
    match family {
        Family::Random => 0.3,
        _ => 0.0,
    }
}

const ATTEMPTS: usize = 64;
/// Restarts of the ratio search.
pub const RATIO_SEARCH_RESTARTS: usize = 8;
/// Mutations tried per restart.
pub const RATIO_SEARCH_STEPS: usize = 400;
/// Largest `n` accepted by the ratio search.
pub const RATIO_SEARCH_LIMIT: usize = 8;

pub fn generate(spec: &GeneratorSpec) -> Result<Digraph> {
    let GeneratorSpec { family, n, p, seed } = *spec;
    if !(0.0..=1.0).contains(&p) {
        return Err(unsat(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = match family {
        Family::Random => random(&mut rng, n, p),
        Family::Cycle => {
            need(n >= 2, "a cycle needs at least 2 vertices")?;
            Digraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))?
        }
        Family::Complete => {
            Digraph::new(n, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))))?
        }
        Family::Path => Digraph::new(n, (1..n).map(|i| (i - 1, i)))?,
        Family::SccIndeg3 => {
            need(n >= 4, "minimum in-degree 3 needs at least 4 vertices")?;
            scc_indeg3(&mut rng, n, p)
        }
        Family::OrientedIndeg2 => {
            need(n >= 5, "an oriented graph with minimum in-degree 2 needs at least 5 vertices")?;
            oriented_indeg2(&mut rng, n, p)
        }
        Family::LayeredIndeg3 => {
            need(n >= 5, "layered-indeg3 needs at least 5 vertices")?;
            retry(|| layered_indeg3(&mut rng, n, p), "no useless-arc-free layering found")?
        }
        Family::RatioGapSearch => ratio_gap_search(n, seed)?.digraph,
    };
    verify(family, &d)?;
    Ok(d)
}

fn unsat(msg: impl Into<String>) -> Error {
    Error::UnsatisfiableSpec(msg.into())
}

fn need(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(unsat(msg))
    }
}

fn retry(mut f: impl FnMut() -> Option<Digraph>, msg: &str) -> Result<Digraph> {
    (0..ATTEMPTS).find_map(|_| f()).ok_or_else(|| unsat(msg))
}

/// The family's structural guarantee, checked on the output.
pub fn verify(family: Family, d: &Digraph) -> Result<()> {
    let indeg = d.min_in_degree().unwrap_or(0);
    let ok = match family {
        Family::SccIndeg3 => d.is_strongly_connected() && indeg >= 3,
        Family::OrientedIndeg2 => d.is_oriented() && d.is_strongly_connected() && indeg >= 2,
        Family::LayeredIndeg3 => {
            indeg >= 3
                && !d.is_strongly_connected()
                && d.has_out_branching()
                && find_useless_arcs(d)?.is_empty()
        }
        Family::RatioGapSearch => d.has_out_branching() && find_useless_arcs(d)?.is_empty(),
        Family::Cycle => d.is_strongly_connected() && d.m() == d.n(),
        _ => true,
    };
    need(ok, &format!("{family} output failed its structural check"))
}

fn random(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Digraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    Digraph::new(n, arcs).expect("pairs are distinct")
}

/// A random Hamiltonian cycle, then random in-arcs until every in-degree is
/// at least 3, then extra arcs with probability `p`.
fn scc_indeg3(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Digraph {
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs: BTreeSet<Arc> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
    for v in 0..n {
        let mut indeg = 1;
        while indeg < 3 {
            let u = rng.gen_range(0..n);
            if u != v && arcs.insert((u, v)) {
                indeg += 1;
            }
        }
    }
    add_extra(rng, n, p, &mut arcs, false);
    Digraph::new(n, arcs).expect("set of non-loop pairs")
}

/// The circulant with offsets 1 and 2 on a random vertex order, plus extra
/// arcs that keep it oriented.
fn oriented_indeg2(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Digraph {
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs: BTreeSet<Arc> = (0..n)
        .flat_map(|i| [(order[i], order[(i + 1) % n]), (order[i], order[(i + 2) % n])])
        .collect();
    add_extra(rng, n, p, &mut arcs, true);
    Digraph::new(n, arcs).expect("set of non-loop pairs")
}

fn add_extra(rng: &mut ChaCha8Rng, n: usize, p: f64, arcs: &mut BTreeSet<Arc>, oriented: bool) {
    if p == 0.0 {
        return;
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) && !(oriented && arcs.contains(&(v, u))) {
                arcs.insert((u, v));
            }
        }
    }
}

/// A strongly connected base of minimum in-degree 3, followed by vertices
/// whose in-arcs come from earlier vertices only. `None` if the sample has
/// useless arcs.
fn layered_indeg3(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Option<Digraph> {
    let base = (n / 4).max(4).min(n - 1);
    let mut arcs: BTreeSet<Arc> = scc_indeg3(rng, base, p.max(0.3)).arcs().iter().copied().collect();
    for v in base..n {
        let mut indeg = 0;
        while indeg < 3 {
            if arcs.insert((rng.gen_range(0..v), v)) {
                indeg += 1;
            }
        }
        for u in 0..v {
            if rng.gen_bool(p) {
                arcs.insert((u, v));
            }
        }
    }
    let d = Digraph::new(n, arcs).expect("set of non-loop pairs");
    find_useless_arcs(&d).ok()?.is_empty().then_some(d)
}

/// Result of [`ratio_gap_search`]: the best digraph and its two optima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioSearch {
    pub digraph: Digraph,
    pub max_leaf_out_tree: usize,
    pub max_leaf_out_branching: usize,
}

impl RatioSearch {
    pub fn ratio(&self) -> f64 {
        self.max_leaf_out_tree as f64 / self.max_leaf_out_branching as f64
    }
}

fn measure(d: &Digraph) -> Option<(usize, usize)> {
    if !d.has_out_branching() || !find_useless_arcs(d).ok()?.is_empty() {
        return None;
    }
    let l = exact_max_leaf_out_tree(d).ok()?.0;
    let ls = exact_max_leaf_out_branching(d).ok()?.0;
    Some((l, ls))
}

/// Hill climbing over useless-arc-free digraphs on `n` vertices, toggling
/// one arc at a time and keeping changes that do not lower `ℓ / ℓ_s`.
/// Each restart begins at a random useless-arc-free digraph; the best
/// digraph seen over all restarts is returned.
pub fn ratio_gap_search(n: usize, seed: u64) -> Result<RatioSearch> {
    need(n >= 2, "ratio search needs at least 2 vertices")?;
    if n > RATIO_SEARCH_LIMIT {
        return Err(Error::TooLarge { n, limit: RATIO_SEARCH_LIMIT });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<Arc> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    // a/b ≥ c/d without floating point.
    let at_least = |x: (usize, usize), y: (usize, usize)| x.0 * y.1 >= y.0 * x.1;
    let cycle: BTreeSet<Arc> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let mut best = (cycle.clone(), measure(&Digraph::new(n, cycle.iter().copied())?).expect("no useless arcs"));
    for _ in 0..RATIO_SEARCH_RESTARTS {
        let mut arcs = cycle.clone();
        let density = rng.gen_range(0.15..0.6);
        for &a in &pairs {
            if rng.gen_bool(density) {
                arcs.insert(a);
            }
        }
        let Some(mut current) = measure(&Digraph::new(n, arcs.iter().copied())?) else {
            continue;
        };
        for _ in 0..RATIO_SEARCH_STEPS {
            let a = *pairs.choose(&mut rng).expect("n ≥ 2");
            let mut next = arcs.clone();
            if !next.remove(&a) {
                next.insert(a);
            }
            let Some(score) = measure(&Digraph::new(n, next.iter().copied())?) else {
                continue;
            };
            if at_least(score, current) {
                arcs = next;
                current = score;
            }
        }
        if !at_least(best.1, current) {
            best = (arcs, current);
        }
    }
    let (arcs, (l, ls)) = best;
    Ok(RatioSearch {
        digraph: Digraph::new(n, arcs)?,
        max_leaf_out_tree: l,
        max_leaf_out_branching: ls,
    })
}

/// A digraph, an out-branching of it and a dipath of that out-branching
/// meeting the hypotheses of the staged path procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathInstance {
    pub digraph: Digraph,
    pub tree: OutTree,
    pub path: Vec<VertexId>,
}

/// Shape knobs for [`path_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathShape {
    /// The tree root is `v_0` instead of a separate vertex above it.
    pub root_on_path: bool,
    /// `v_{p-1}` has a child off the path.
    pub tail: bool,
    /// Off-path vertices besides the root and the tail child.
    pub extra: usize,
}

/// A seeded instance for the staged path procedure with `p` path vertices.
///
/// Path vertices are `0..p`. Every path vertex gets an in-neighbour other
/// than its path neighbours, either a later path vertex or an off-path
/// vertex; no arc skips forward along the path.
pub fn path_instance(p: usize, shape: PathShape, seed: u64) -> Result<PathInstance> {
    need(p >= 1, "the path needs at least one vertex")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = p;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    let mut tree_arcs: Vec<Arc> = (1..p).map(|i| (i - 1, i)).collect();
    let root = if shape.root_on_path {
        0
    } else {
        let r = fresh();
        tree_arcs.push((r, 0));
        r
    };
    let mut hosts: Vec<VertexId> = if shape.root_on_path { Vec::new() } else { vec![root] };
    if shape.tail {
        let w = fresh();
        tree_arcs.push((p - 1, w));
        hosts.push(w);
    }
    for _ in 0..shape.extra {
        // With no host yet, the vertex becomes the single off-path child of
        // the last path vertex.
        let parent = hosts.choose(&mut rng).copied().unwrap_or(p - 1);
        let x = fresh();
        tree_arcs.push((parent, x));
        hosts.push(x);
    }
    let n = next;
    let off: Vec<VertexId> = (p..n).collect();
    let mut arcs: BTreeSet<Arc> = tree_arcs.iter().copied().collect();
    for i in 0..p {
        let later: Vec<VertexId> = (i + 2..p).collect();
        let from_later = !later.is_empty() && (off.is_empty() || rng.gen_bool(0.7));
        let u = if from_later {
            *later.choose(&mut rng).expect("non-empty")
        } else {
            *off.choose(&mut rng).ok_or_else(|| unsat("no vertex can feed the end of the path"))?
        };
        arcs.insert((u, i));
        if i + 1 < p && rng.gen_bool(0.3) {
            arcs.insert((i + 1, i));
        }
    }
    // Noise that keeps the hypotheses: arcs among off-path vertices, from
    // off-path vertices into the path, and from the path to off-path ones.
    for _ in 0..n {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || (u < p && v < p) {
            continue;
        }
        arcs.insert((u, v));
    }
    let digraph = Digraph::new(n, arcs)?;
    let tree = OutTree::from_arcs(n, root, &tree_arcs)?;
    let path: Vec<VertexId> = (0..p).collect();
    crate::bounds::check_path_hypotheses(&digraph, &tree, &path)?;
    Ok(PathInstance { digraph, tree, path })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>(), Ok(f));
        }
        assert!("tournament".parse::<Family>().is_err());
    }

    #[test]
    fn fixed_families() {
        let c = generate(&GeneratorSpec::new(Family::Cycle, 5, 0)).unwrap();
        assert_eq!(c.arcs(), &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let k = generate(&GeneratorSpec::new(Family::Complete, 4, 0)).unwrap();
        assert_eq!(k.m(), 12);
        let p = generate(&GeneratorSpec::new(Family::Path, 3, 0)).unwrap();
        assert_eq!(p.arcs(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn structured_families_meet_their_guarantees() {
        let d = generate(&GeneratorSpec::new(Family::SccIndeg3, 20, 7)).unwrap();
        assert!(d.is_strongly_connected());
        assert!(d.min_in_degree().unwrap() >= 3);
        let d = generate(&GeneratorSpec::new(Family::OrientedIndeg2, 12, 3)).unwrap();
        assert!(d.is_oriented() && d.min_in_degree().unwrap() >= 2);
        let d = generate(&GeneratorSpec::new(Family::LayeredIndeg3, 30, 5)).unwrap();
        assert!(!d.is_strongly_connected());
        assert!(find_useless_arcs(&d).unwrap().is_empty());
    }

    #[test]
    fn same_seed_same_bytes() {
        for f in [Family::Random, Family::SccIndeg3, Family::OrientedIndeg2, Family::LayeredIndeg3] {
            let spec = GeneratorSpec { family: f, n: 15, p: 0.1, seed: 42 };
            let a = generate(&spec).unwrap().to_edge_list();
            assert_eq!(a, generate(&spec).unwrap().to_edge_list());
        }
    }

    #[test]
    fn unsatisfiable_specs() {
        for (f, n) in [(Family::SccIndeg3, 3), (Family::OrientedIndeg2, 4), (Family::Cycle, 1)] {
            assert!(matches!(
                generate(&GeneratorSpec::new(f, n, 0)),
                Err(Error::UnsatisfiableSpec(_))
            ));
        }
        let bad_p = GeneratorSpec { family: Family::Random, n: 4, p: 1.5, seed: 0 };
        assert!(matches!(generate(&bad_p), Err(Error::UnsatisfiableSpec(_))));
    }

    #[test]
    fn ratio_search_reaches_two_on_six_vertices() {
        let r = ratio_gap_search(6, 1).unwrap();
        assert_eq!((r.max_leaf_out_tree, r.max_leaf_out_branching), (4, 2));
        assert!(find_useless_arcs(&r.digraph).unwrap().is_empty());
        assert_eq!(exact_max_leaf_out_tree(&r.digraph).unwrap().0, 4);
        assert_eq!(exact_max_leaf_out_branching(&r.digraph).unwrap().0, 2);
        assert!(matches!(ratio_gap_search(9, 0), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn path_instances_meet_the_hypotheses() {
        for (i, p) in [1, 2, 8, 16].into_iter().enumerate() {
            for root_on_path in [false, true] {
                for tail in [false, true] {
                    let shape = PathShape { root_on_path, tail, extra: 5 };
                    let inst = path_instance(p, shape, i as u64);
                    assert!(inst.is_ok() || (p <= 2 && root_on_path && !tail), "{p} {shape:?}");
                    if let Ok(inst) = inst {
                        assert!(inst.tree.is_out_branching_of(&inst.digraph));
                    }
                }
            }
        }
    }
}
