use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use leafbranch::arborescence::one_optimal_out_branching;
use leafbranch::bounds::{
    branch_free_paths, leafy_out_branching_bounds, leafy_out_tree_from_path_traced,
    leafy_out_tree_min_indegree_traced, out_branching_from_out_tree_traced, out_tree_from_back_heads,
};
use leafbranch::decomposition::{
    build_tree_decomposition, max_back_head_count, validate_tree_decomposition, TreeDecomposition,
};
use leafbranch::digraph::remove_useless_arcs;
use leafbranch::generate::{generate, Family, GeneratorSpec};
use leafbranch::solver::{oracle_report, solve, Problem, SolveReport};
use leafbranch::{parse_digraph, Digraph, OutTree, VertexId};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

mod bench;

#[derive(Parser)]
#[command(name = "leafbranch", version, about = "Leafy out-trees and out-branchings of digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Tree,
    Branching,
}

impl From<Mode> for Problem {
    fn from(m: Mode) -> Problem {
        match m {
            Mode::Tree => Problem::OutTree,
            Mode::Branching => Problem::OutBranching,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    /// Subtree at the vertex with most back-arc heads, plus those heads.
    Backheads,
    /// Out-tree to out-branching conversion keeping a third of the leaves.
    #[value(name = "thm3")]
    Convert,
    /// Staged path procedure on a long branch-free path.
    Path,
    /// Out-branching with `√n / 4` leaves under the in-degree hypothesis.
    Sqrt,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether FILE has an out-tree or out-branching with at least k leaves.
    Solve {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        json: bool,
        /// Write the witness tree here.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        file: String,
    },
    /// Exact maximum leaf count by exhaustive search (small inputs only).
    Exact {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        witness: Option<PathBuf>,
        file: String,
    },
    /// Write a seeded random digraph in edge-list format.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Arc probability; the family default when omitted.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: u64,
    },
    /// Rewrite FILE without its useless arcs.
    Preprocess {
        #[arg(long, required = true)]
        remove_useless: bool,
        file: String,
    },
    /// Check a tree decomposition dump against a digraph.
    CheckTd { tdfile: String, dgfile: String },
    /// Dump the decomposition induced by a 1-optimal out-branching of FILE.
    Decompose { file: String },
    /// Run one of the constructive leaf bounds and print its witness.
    Bound {
        #[arg(long, value_enum)]
        which: Which,
        /// Starting tree in witness format; a 1-optimal out-branching by default.
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Comma-separated path for `--which path`; the longest branch-free path by default.
        #[arg(long, value_delimiter = ',')]
        path: Option<Vec<VertexId>>,
        /// Write the procedure's trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        file: String,
    },
    /// Time a fixed benchmark suite.
    Bench {
        #[arg(long, value_enum)]
        suite: bench::Suite,
    },
}

fn read_input(name: &str) -> Result<String> {
    let mut text = String::new();
    if name == "-" {
        std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
    } else {
        text = std::fs::read_to_string(name).with_context(|| format!("reading {name}"))?;
    }
    Ok(text)
}

fn read_digraph(name: &str) -> Result<Digraph> {
    parse_digraph(&read_input(name)?).with_context(|| format!("parsing {name}"))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn report(r: &SolveReport, json: bool, witness: Option<&Path>) -> Result<ExitCode> {
    if let (Some(path), Some(t)) = (witness, &r.witness) {
        write_file(path, &t.to_witness_string())?;
    }
    if json {
        println!("{}", serde_json::to_string(r)?);
    } else {
        println!("{}", if r.is_yes() { "YES" } else { "NO" });
        println!("route {}", serde_json::to_value(r.route)?.as_str().unwrap_or_default());
        if let Some(t) = &r.witness {
            println!("leaves {}", t.leaf_count());
        }
        if let Some(w) = r.stats.width {
            println!("width {w}");
        }
    }
    Ok(if r.is_yes() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn start_tree(d: &Digraph, tree: Option<&Path>) -> Result<OutTree> {
    match tree {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(OutTree::parse_witness(d.n(), &text)?)
        }
        None => {
            let r = d.out_branching_root().context("the digraph has no out-branching")?;
            Ok(one_optimal_out_branching(d, r)?)
        }
    }
}

fn backheads(d: &Digraph, t: &OutTree) -> Result<(OutTree, String)> {
    let (z, heads) = max_back_head_count(d, t);
    let out = out_tree_from_back_heads(d, t, z)?;
    let trace = format!(
        "input_leaves: {}\nvertex: {z}\nback_heads: {heads}\noutput_leaves: {}\n",
        t.leaf_count(),
        out.leaf_count()
    );
    Ok((out, trace))
}

fn bound(d: &Digraph, which: Which, tree: Option<&Path>, path: Option<Vec<VertexId>>) -> Result<(OutTree, String)> {
    match which {
        Which::Backheads => backheads(d, &start_tree(d, tree)?),
        Which::Convert => {
            let t = match tree {
                Some(_) => start_tree(d, tree)?,
                None => backheads(d, &start_tree(d, None)?)?.0,
            };
            let (out, trace) = out_branching_from_out_tree_traced(d, &t)?;
            Ok((out, format!("{trace:#?}\n")))
        }
        Which::Path => {
            let t = start_tree(d, tree)?;
            let path = match path {
                Some(p) => p,
                None => branch_free_paths(&t).into_iter().max_by_key(Vec::len).unwrap_or_default(),
            };
            let (out, trace) = leafy_out_tree_from_path_traced(d, &t, &path)?;
            Ok((out, format!("{trace:#?}\n")))
        }
        Which::Sqrt => {
            let (_, trace) = leafy_out_tree_min_indegree_traced(d)?;
            let out = leafy_out_branching_bounds(d)?;
            Ok((out, format!("{trace:#?}\n")))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { mode, k, json, witness, threads, file } => {
            let d = read_digraph(&file)?;
            let started = Instant::now();
            let r = match threads {
                Some(0) => bail!("--threads must be at least 1"),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .context("building the thread pool")?
                    .install(|| solve(&d, mode.into(), k))?,
                None => solve(&d, mode.into(), k)?,
            };
            eprintln!("time {:.3} ms", started.elapsed().as_secs_f64() * 1e3);
            report(&r, json, witness.as_deref())
        }
        Command::Exact { mode, json, witness, file } => {
            let d = read_digraph(&file)?;
            let r = oracle_report(&d, mode.into())?;
            if json {
                return report(&r, true, witness.as_deref());
            }
            if let (Some(path), Some(t)) = (witness.as_deref(), &r.witness) {
                write_file(path, &t.to_witness_string())?;
            }
            match &r.witness {
                Some(_) => println!("max leaves {}", r.k),
                None => println!("no out-branching"),
            }
            Ok(if r.is_yes() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Gen { family, n, p, seed } => {
            let mut spec = GeneratorSpec::new(family, n, seed);
            if let Some(p) = p {
                spec.p = p;
            }
            print!("{}", generate(&spec)?.to_edge_list());
            Ok(ExitCode::SUCCESS)
        }
        Command::Preprocess { remove_useless: _, file } => {
            let d = read_digraph(&file)?;
            let cleaned = remove_useless_arcs(&d)?;
            eprintln!("removed {} useless arcs", d.m() - cleaned.m());
            print!("{}", cleaned.to_edge_list());
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckTd { tdfile, dgfile } => {
            let td = TreeDecomposition::parse_dump(&read_input(&tdfile)?)
                .with_context(|| format!("parsing {tdfile}"))?;
            let d = read_digraph(&dgfile)?;
            match validate_tree_decomposition(&d, &td) {
                Ok(()) => {
                    println!("valid, width {}", td.width());
                    Ok(ExitCode::SUCCESS)
                }
                Err(v) => {
                    println!("invalid: {v}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Decompose { file } => {
            let d = read_digraph(&file)?;
            let t = start_tree(&d, None)?;
            let td = build_tree_decomposition(&d, &t)?;
            eprintln!("width {}", td.width());
            print!("{}", td.to_dump_string());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound { which, tree, path, trace, json, file } => {
            let d = read_digraph(&file)?;
            let (out, trace_text) = bound(&d, which, tree.as_deref(), path)?;
            if let Some(p) = trace {
                write_file(&p, &trace_text)?;
            }
            if json {
                let v = serde_json::json!({
                    "which": which.to_possible_value().map(|p| p.get_name().to_owned()),
                    "leaves": out.leaf_count(),
                    "spanning": out.is_spanning(),
                    "witness": out.arcs(),
                    "witness_root": out.root(),
                });
                println!("{v}");
            } else {
                println!("# leaves {}", out.leaf_count());
                print!("{}", out.to_witness_string());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { suite } => {
            let mut out = std::io::stdout().lock();
            bench::run(suite, &mut out)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
