#![allow(dead_code)]

use leafbranch::Digraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every ordered pair `(u, v)` with `u ≠ v`, in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect()
}

/// All digraphs on `n` vertices, one per arc subset.
pub fn all_digraphs(n: usize) -> impl Iterator<Item = Digraph> {
    let pairs = pairs(n);
    (0u64..1 << pairs.len()).map(move |mask| {
        Digraph::new(
            n,
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a),
        )
        .unwrap()
    })
}

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Digraph {
    Digraph::new(n, pairs(n).into_iter().filter(|_| rng.gen_bool(p))).unwrap()
}

/// A random spanning out-tree on `n` vertices and a digraph containing it
/// plus every other pair with probability `p`.
pub fn random_tree_digraph(seed: u64, n: usize, p: f64) -> (Digraph, leafbranch::OutTree) {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let tree_arcs: Vec<(usize, usize)> =
        (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    let arcs = pairs(n).into_iter().filter(|a| tree_arcs.contains(a) || rng.gen_bool(p));
    let d = Digraph::new(n, arcs).unwrap();
    let t = leafbranch::OutTree::from_arcs(n, order[0], &tree_arcs).unwrap();
    (d, t)
}
