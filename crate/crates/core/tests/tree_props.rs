mod common;

use common::random_tree_digraph;
use leafbranch::arborescence::{
    apply_path_changes, is_improving, one_change, one_optimal_out_branching,
};
use leafbranch::{Digraph, Error, OutTree};
use proptest::prelude::*;
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance() -> impl Strategy<Value = (Digraph, OutTree)> {
    (1usize..=12, any::<u64>(), 0.0f64..0.5).prop_map(|(n, seed, p)| random_tree_digraph(seed, n, p))
}

/// A dipath from the root of `t`, by a seeded random walk without repeats.
fn random_root_path(d: &Digraph, t: &OutTree, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = vec![t.root()];
    loop {
        let last = *q.last().unwrap();
        match d.out_neighbors(last).filter(|v| !q.contains(v)).choose(&mut rng) {
            Some(v) if rng.gen_bool(0.85) => q.push(v),
            _ => return q,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn role_counts_are_bounded_by_leaves((_d, t) in instance()) {
        let roles = t.role_sets();
        let l = roles.leaves.len();
        prop_assert!(l >= 1);
        prop_assert!(roles.branch.len() < l);
        prop_assert!(roles.br_succ.len() <= 2 * l - 2);
    }

    #[test]
    fn tree_order_is_a_partial_order((_d, t) in instance()) {
        let n = t.host_n();
        let leq = |a, b| t.tree_leq(a, b).unwrap();
        for a in 0..n {
            prop_assert!(leq(a, a));
            for b in 0..n {
                if a != b && leq(a, b) {
                    prop_assert!(!leq(b, a));
                }
                for c in 0..n {
                    if leq(a, b) && leq(b, c) {
                        prop_assert!(leq(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn one_changes_match_the_tree_order((d, t) in instance()) {
        for &(u, v) in d.arcs() {
            if t.has_tree_arc(u, v) {
                continue;
            }
            let result = one_change(&d, &t, (u, v));
            if v == t.root() {
                prop_assert_eq!(result, Err(Error::RootReparent(v)));
                continue;
            }
            let legal = !t.tree_leq(v, u).unwrap();
            prop_assert_eq!(result.is_ok(), legal);
            match result {
                Ok(s) => {
                    prop_assert!(s.is_out_branching_of(&d));
                    prop_assert!(s.has_tree_arc(u, v));
                    let improving = is_improving(&d, &t, (u, v)).unwrap();
                    prop_assert_eq!(s.leaf_count() > t.leaf_count(), improving);
                }
                Err(e) => prop_assert_eq!(e, Error::WouldCreateCycle(u, v)),
            }
        }
    }

    #[test]
    fn one_optimal_trees_admit_no_improving_change((d, t) in instance()) {
        let s = one_optimal_out_branching(&d, t.root()).unwrap();
        prop_assert!(s.is_out_branching_of(&d));
        prop_assert!(s.leaf_count() >= 1);
        for &(u, v) in d.arcs() {
            if s.has_tree_arc(u, v) || v == s.root() {
                continue;
            }
            prop_assert!(s.tree_leq(v, u).unwrap() || s.is_leaf(u) || s.is_br_succ(v));
        }
    }

    #[test]
    fn path_changes_keep_the_path((d, t) in instance(), seed in any::<u64>()) {
        let q = random_root_path(&d, &t, seed);
        let s = apply_path_changes(&d, &t, &q).unwrap();
        prop_assert!(s.is_out_branching_of(&d));
        for w in q.windows(2) {
            prop_assert!(s.has_tree_arc(w[0], w[1]));
        }
    }
}
