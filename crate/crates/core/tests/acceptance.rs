//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the report; the test fails if any criterion fails.

mod common;

use common::{all_digraphs, random_digraph, random_tree_digraph};
use leafbranch::arborescence::{is_improving, one_change, one_optimal_out_branching};
use leafbranch::bounds::{
    leafy_out_branching_bounds, leafy_out_tree_from_path_traced, out_branching_from_out_tree_traced,
    sqrt_bound, sqrt_bound_twelfth,
};
use leafbranch::decomposition::{build_tree_decomposition, max_back_head_count, validate_tree_decomposition};
use leafbranch::digraph::{find_useless_arcs, remove_useless_arcs};
use leafbranch::generate::{generate, path_instance, Family, GeneratorSpec, PathShape};
use leafbranch::oracle::{exact_max_leaf_out_branching, exact_max_leaf_out_tree};
use leafbranch::solver::{solve_k_leaf_out_branching, solve_k_leaf_out_tree};
use leafbranch::Digraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

const RANDOM_ORACLE_INSTANCES: usize = 2000;
const DECOMPOSITION_INSTANCES: usize = 500;
const CONVERSION_INSTANCES: usize = 5000;
const PATH_INSTANCES: usize = 200;
const DEGREE_INSTANCES: usize = 100;
const CHANGE_CHECKS: usize = 10_000;
/// Single-threaded budget for `k = 4` at `n = 10^4`.
const LARGE_SOLVE_BUDGET: Duration = Duration::from_secs(60);
/// Growth allowed from `n = 10^3` to `n = 10^4`: quadratic is 100x, plus
/// 50% slack for timer noise.
const SCALING_LIMIT: f64 = 150.0;
/// Times below this are clamped before taking the ratio.
const TIMER_FLOOR: Duration = Duration::from_millis(2);

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_agreement(d: &Digraph) -> Result<(), String> {
    let tree_opt = exact_max_leaf_out_tree(d).map_err(|e| e.to_string())?.0;
    let branch_opt = exact_max_leaf_out_branching(d).map(|x| x.0).unwrap_or(0);
    for k in 1..=d.n() {
        let t = solve_k_leaf_out_tree(d, k).map_err(|e| e.to_string())?;
        let b = solve_k_leaf_out_branching(d, k).map_err(|e| e.to_string())?;
        ensure(t.is_yes() == (tree_opt >= k) && t.witness_is_valid(d), || {
            format!("out-tree k = {k} on {:?}", d.arcs())
        })?;
        ensure(b.is_yes() == (branch_opt >= k) && b.witness_is_valid(d), || {
            format!("out-branching k = {k} on {:?}", d.arcs())
        })?;
    }
    Ok(())
}

fn criterion_1() -> Verdict {
    let mut count = 0;
    for n in 1..=4 {
        for d in all_digraphs(n) {
            oracle_agreement(&d)?;
            count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..RANDOM_ORACLE_INSTANCES {
        let n = rng.gen_range(5..=8);
        let p = rng.gen_range(0.1..0.5);
        oracle_agreement(&random_digraph(&mut rng, n, p))?;
    }
    Ok(format!("{count} exhaustive (n <= 4) + {RANDOM_ORACLE_INSTANCES} random (n in 5..=8), every k, exact match"))
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut max_slack = (i64::MIN, i64::MIN);
    for _ in 0..DECOMPOSITION_INSTANCES {
        let n = rng.gen_range(2..=40);
        let p = rng.gen_range(0.0..(4.0 / n as f64).min(0.5));
        let (d, t) = random_tree_digraph(rng.gen(), n, p);
        let d = remove_useless_arcs(&d).map_err(|e| e.to_string())?;
        let t = one_optimal_out_branching(&d, t.root()).map_err(|e| e.to_string())?;
        let td = build_tree_decomposition(&d, &t).map_err(|e| e.to_string())?;
        validate_tree_decomposition(&d, &td).map_err(|v| format!("{v} on {:?}", d.arcs()))?;
        let (_, heads) = max_back_head_count(&d, &t);
        let w = td.width() as i64;
        // Smallest k with |Leaf(T)| <= k - 1 and heads < k (resp. < 3k).
        let k4 = (t.leaf_count() + 1).max(heads + 1) as i64;
        let k6 = (t.leaf_count() + 1).max(heads / 3 + 1) as i64;
        ensure(w <= 4 * k4 - 5, || format!("width {w} > 4k - 5 with k = {k4}"))?;
        ensure(w <= 6 * k6 - 5, || format!("width {w} > 6k - 5 with k = {k6}"))?;
        max_slack = (max_slack.0.max(w - (4 * k4 - 5)), max_slack.1.max(w - (6 * k6 - 5)));
    }
    Ok(format!(
        "{DECOMPOSITION_INSTANCES} useless-arc-free digraphs (n <= 40): axioms hold, width - bound <= {} and {}",
        max_slack.0, max_slack.1
    ))
}

fn conversion_check(d: &Digraph) -> Result<(), String> {
    let (l, t) = exact_max_leaf_out_tree(d).map_err(|e| e.to_string())?;
    let (b, trace) = out_branching_from_out_tree_traced(d, &t).map_err(|e| e.to_string())?;
    ensure(b.is_out_branching_of(d) && b.leaf_count() >= l.div_ceil(3) && trace.violations.is_empty(), || {
        format!("conversion gave {} leaves from {l} on {:?}", b.leaf_count(), d.arcs())
    })?;
    let ls = exact_max_leaf_out_branching(d).map_err(|e| e.to_string())?.0;
    ensure(ls >= l.div_ceil(3), || format!("l_s = {ls} < ceil({l}/3) on {:?}", d.arcs()))
}

fn useless_free(d: &Digraph) -> bool {
    d.has_out_branching() && find_useless_arcs(d).map(|u| u.is_empty()).unwrap_or(false)
}

fn criterion_3() -> Verdict {
    let mut count = 0;
    for n in 1..=4 {
        for d in all_digraphs(n).filter(useless_free) {
            conversion_check(&d)?;
            count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    while count < CONVERSION_INSTANCES {
        let n = rng.gen_range(5..=6);
        let p = rng.gen_range(0.15..0.6);
        let d = random_digraph(&mut rng, n, p);
        if useless_free(&d) {
            conversion_check(&d)?;
            count += 1;
        }
    }
    Ok(format!("{count} useless-arc-free digraphs (n <= 6): >= ceil(L/3) leaves and l_s >= ceil(l/3)"))
}

fn criterion_4() -> Verdict {
    let mut count = 0;
    let mut seed = 0;
    while count < PATH_INSTANCES {
        for p in [8, 16, 24, 32, 64] {
            for root_on_path in [false, true] {
                for tail in [false, true] {
                    seed += 1;
                    let shape = PathShape { root_on_path, tail, extra: (seed % 13) as usize };
                    let Ok(inst) = path_instance(p, shape, seed) else { continue };
                    let (out, trace) = leafy_out_tree_from_path_traced(&inst.digraph, &inst.tree, &inst.path)
                        .map_err(|e| e.to_string())?;
                    ensure(out.is_out_tree_of(&inst.digraph), || format!("invalid out-tree, seed {seed}"))?;
                    ensure(trace.violations.is_empty(), || format!("seed {seed}: {:?}", trace.violations))?;
                    ensure(trace.max_preimages <= 3, || format!("seed {seed}: {} preimages", trace.max_preimages))?;
                    ensure(trace.path_leaves >= p.div_ceil(8), || {
                        format!("seed {seed}: {} path leaves for p = {p}", trace.path_leaves)
                    })?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} instances, p in {{8, 16, 24, 32, 64}}: >= ceil(p/8) path leaves, stage checks clean"))
}

fn criterion_5() -> Verdict {
    let sizes = [50, 200, 800];
    let mut seed = 0;
    for (family, bound) in [
        (Family::SccIndeg3, sqrt_bound as fn(usize) -> usize),
        (Family::LayeredIndeg3, sqrt_bound_twelfth),
    ] {
        for i in 0..DEGREE_INSTANCES {
            let n = sizes[i % sizes.len()];
            seed += 1;
            let d = generate(&GeneratorSpec::new(family, n, seed)).map_err(|e| e.to_string())?;
            let b = leafy_out_branching_bounds(&d).map_err(|e| e.to_string())?;
            ensure(b.is_out_branching_of(&d) && b.leaf_count() >= bound(n), || {
                format!("{family} n = {n} seed {seed}: {} leaves", b.leaf_count())
            })?;
        }
    }
    Ok(format!(
        "{DEGREE_INSTANCES} scc-indeg3 >= ceil(sqrt(n)/4), {DEGREE_INSTANCES} layered-indeg3 >= ceil(sqrt(n)/12), n in {sizes:?}"
    ))
}

fn criterion_6() -> Verdict {
    let (mut trees, mut changes) = (0, 0);
    let mut seed = 0;
    while changes < CHANGE_CHECKS {
        seed += 1;
        let n = 1 + (seed % 12) as usize;
        let (d, t) = random_tree_digraph(seed, n, 0.3);
        trees += 1;
        let roles = t.role_sets();
        let l = roles.leaves.len();
        ensure(roles.branch.len() < l && roles.br_succ.len() + 2 <= 2 * l.max(1), || format!("role counts, seed {seed}"))?;
        let leq = |a, b| t.tree_leq(a, b).unwrap();
        for a in 0..n {
            for b in 0..n {
                ensure(a == b || !(leq(a, b) && leq(b, a)), || format!("antisymmetry, seed {seed}"))?;
                for c in 0..n {
                    ensure(!(leq(a, b) && leq(b, c)) || leq(a, c), || format!("transitivity, seed {seed}"))?;
                }
            }
        }
        for &(u, v) in d.arcs() {
            if t.has_tree_arc(u, v) || v == t.root() {
                continue;
            }
            changes += 1;
            let result = one_change(&d, &t, (u, v));
            ensure(result.is_ok() == !leq(v, u), || format!("1-change legality ({u}, {v}), seed {seed}"))?;
            if let Ok(s) = result {
                let improving = is_improving(&d, &t, (u, v)).unwrap();
                ensure(s.is_out_branching_of(&d) && (s.leaf_count() > t.leaf_count()) == improving, || {
                    format!("1-change effect ({u}, {v}), seed {seed}")
                })?;
            }
        }
    }
    Ok(format!("{trees} random trees, {changes} 1-changes: role counts, tree order, legality, improvement"))
}

fn sparse(n: usize, seed: u64) -> Digraph {
    let spec = GeneratorSpec { family: Family::Random, n, p: 3.0 / n as f64, seed };
    generate(&spec).expect("random family always succeeds")
}

fn timed_solves(d: &Digraph) -> Result<Duration, String> {
    let start = Instant::now();
    let t = solve_k_leaf_out_tree(d, 4).map_err(|e| e.to_string())?;
    let b = solve_k_leaf_out_branching(d, 4).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(t.witness_is_valid(d) && b.witness_is_valid(d), || "invalid report".into())?;
    Ok(elapsed)
}

fn criterion_7() -> Verdict {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    pool.install(|| {
        let small = timed_solves(&sparse(1_000, 7))?;
        let large = timed_solves(&sparse(10_000, 7))?;
        ensure(large <= LARGE_SOLVE_BUDGET, || format!("n = 10^4 took {large:?}"))?;
        let ratio = large.max(TIMER_FLOOR).as_secs_f64() / small.max(TIMER_FLOOR).as_secs_f64();
        ensure(ratio <= SCALING_LIMIT, || format!("growth {ratio:.1}x from 10^3 to 10^4"))?;
        Ok(format!("k = 4, one thread: n = 10^3 in {small:?}, n = 10^4 in {large:?} (growth {ratio:.1}x)"))
    })
}

type Criterion = (&'static str, fn() -> Verdict);

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("oracle equivalence of both solvers", criterion_1),
        ("decomposition axioms and width bounds", criterion_2),
        ("out-tree to out-branching conversion", criterion_3),
        ("staged path procedure", criterion_4),
        ("sqrt(n) leaf bounds", criterion_5),
        ("structural propositions", criterion_6),
        ("performance smoke", criterion_7),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
