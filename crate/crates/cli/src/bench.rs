//! Fixed timing suites. Instances are seeded, so only the times vary.

use anyhow::Result;
use clap::ValueEnum;
use leafbranch::bounds::{leafy_out_branching_bounds, sqrt_bound};
use leafbranch::generate::{generate, Family, GeneratorSpec};
use leafbranch::oracle::exact_max_leaf_out_tree;
use leafbranch::solver::{solve, Problem};
use leafbranch::Digraph;
use std::io::Write;
use std::time::Instant;

#[derive(Clone, Copy, ValueEnum)]
pub enum Suite {
    /// Sparse random digraphs with 10^3 and 10^4 vertices.
    Solve,
    /// The `√n / 4` construction on strongly connected in-degree-3 digraphs.
    Bounds,
    /// Small dense instances right at the optimum, where the DP decides.
    Dp,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn instance(family: Family, n: usize, p: Option<f64>, seed: u64) -> Result<Digraph> {
    let mut spec = GeneratorSpec::new(family, n, seed);
    if let Some(p) = p {
        spec.p = p;
    }
    Ok(generate(&spec)?)
}

fn problem_name(p: Problem) -> &'static str {
    match p {
        Problem::OutTree => "tree",
        Problem::OutBranching => "branching",
    }
}

pub fn run(suite: Suite, out: &mut impl Write) -> Result<()> {
    match suite {
        Suite::Solve => {
            writeln!(out, "{:>6} {:>9} {:>3} {:>4} {:>18} {:>10}", "n", "mode", "k", "dec", "route", "ms")?;
            for n in [1_000, 10_000] {
                let d = instance(Family::Random, n, Some(3.0 / n as f64), 1)?;
                for problem in [Problem::OutTree, Problem::OutBranching] {
                    for k in [4, 16] {
                        let t = Instant::now();
                        let r = solve(&d, problem, k)?;
                        let route = serde_json::to_value(r.route)?;
                        let dec = if r.is_yes() { "YES" } else { "NO" };
                        writeln!(
                            out,
                            "{n:>6} {:>9} {k:>3} {dec:>4} {:>18} {:>10.3}",
                            problem_name(problem),
                            route.as_str().unwrap_or_default(),
                            ms(t)
                        )?;
                    }
                }
            }
        }
        Suite::Bounds => {
            writeln!(out, "{:>6} {:>7} {:>7} {:>10}", "n", "leaves", "bound", "ms")?;
            for n in [200, 800, 3_200] {
                let d = instance(Family::SccIndeg3, n, None, 1)?;
                let t = Instant::now();
                let b = leafy_out_branching_bounds(&d)?;
                writeln!(out, "{n:>6} {:>7} {:>7} {:>10.3}", b.leaf_count(), sqrt_bound(n), ms(t))?;
            }
        }
        Suite::Dp => {
            writeln!(out, "{:>4} {:>5} {:>3} {:>4} {:>18} {:>6} {:>10}", "n", "seed", "k", "dec", "route", "width", "ms")?;
            for seed in 0..6 {
                let d = instance(Family::Random, 10, Some(0.2), seed)?;
                let (opt, _) = exact_max_leaf_out_tree(&d)?;
                for k in [opt, opt + 1] {
                    let t = Instant::now();
                    let r = solve(&d, Problem::OutTree, k)?;
                    let route = serde_json::to_value(r.route)?;
                    let width = r.stats.width.map_or_else(|| "-".to_owned(), |w| w.to_string());
                    let dec = if r.is_yes() { "YES" } else { "NO" };
                    writeln!(
                        out,
                        "{:>4} {seed:>5} {k:>3} {dec:>4} {:>18} {width:>6} {:>10.3}",
                        d.n(),
                        route.as_str().unwrap_or_default(),
                        ms(t)
                    )?;
                }
            }
        }
    }
    Ok(())
}
