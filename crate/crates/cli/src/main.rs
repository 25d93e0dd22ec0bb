//! Command-line front end for dilatree.
//!
//! Exit codes: 0 success / YES, 1 certified NO, 2 usage or I/O error,
//! 3 precision exhausted.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dilatree::formats::{
    gadget_from_json, gadget_to_json, instance_from_json, instance_to_json, points_from_json, points_to_json,
    tree_from_json, tree_to_json,
};
use dilatree::gadget::{default_k, scan_family};
use dilatree::solver::WitnessSearch;
use dilatree::{
    build_gadget, decide_partition, integerize, mdst_exact, partition_oracle, verify_gadget, CertConfig,
    DilationEngine, DilationReport, Error, Gadget, Mode, PartitionInstance, PointSet, ReductionInstance,
    SolverOptions, ThresholdVerdict, Tree,
};
use serde_json::json;

mod svg;

#[derive(Parser, Debug)]
#[command(name = "dilatree", version, about = "Exact minimum-dilation trees and PARTITION gadgets")]
struct Cli {
    /// Precision cap in bits (overrides DILATREE_MAX_BITS).
    #[arg(long, global = true)]
    max_bits: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the gadget for a PARTITION instance and write the integer instance.
    Gen {
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<u64>,
        /// Fractional bits kept for the d points (default: smallest valid k).
        #[arg(long)]
        k: Option<u32>,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the exact gadget (rational coordinates).
        #[arg(long)]
        gadget_out: Option<PathBuf>,
        /// Also write the standard tree for this subset (1-based, comma separated; empty for none).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        standard: Option<Vec<usize>>,
        #[arg(long, requires = "standard")]
        tree_out: Option<PathBuf>,
    },
    /// Check the gadget's geometric properties.
    Verify {
        input: PathBuf,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Decide PARTITION through the gadget's tree family.
    Decide {
        input: PathBuf,
        #[arg(long)]
        tree_out: Option<PathBuf>,
        #[arg(long)]
        solution_out: Option<PathBuf>,
        /// Count verdicts over the whole family instead of stopping at the first tree.
        #[arg(long)]
        scan: bool,
    },
    /// Dilation of a tree, optionally against a threshold P/Q.
    Dilation {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        /// Threshold as "P/Q".
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<(String, String)>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Exact minimum-dilation tree, path or tour.
    Mdst {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Tree)]
        mode: ModeArg,
        #[arg(long)]
        crossing_free: bool,
        /// Required edges as "u-v", comma separated.
        #[arg(long, value_delimiter = ',')]
        require: Vec<String>,
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Dynamic-programming PARTITION verdict.
    Oracle {
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<u64>,
    },
    /// Search for a five-point set whose optimal tree must cross.
    Witness5 {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        tree_out: Option<PathBuf>,
    },
    /// Render points (and optionally a tree) as SVG.
    Svg {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Tree,
    Path,
    Tour,
}

/// Failure that maps to a non-zero exit code.
#[derive(Debug)]
enum Fail {
    Usage(String),
    Io(String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Core(Error::PrecisionExhausted { .. }) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Fail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fail::Usage(m) | Fail::Io(m) => f.write_str(m),
            Fail::Core(e) => write!(f, "{e}"),
        }
    }
}

type Outcome = Result<u8, Fail>;

fn parse_threshold(s: &str) -> Result<(String, String), String> {
    let (p, q) = s.split_once('/').ok_or("threshold must be written P/Q")?;
    let ok = |t: &str| !t.is_empty() && t.chars().all(|c| c.is_ascii_digit());
    if !ok(p) || !ok(q) {
        return Err("P and Q must be non-negative integers".into());
    }
    Ok((p.to_string(), q.to_string()))
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, content: &str) -> Result<(), Fail> {
    fs::write(path, content).map_err(|e| Fail::Io(format!("cannot write {}: {e}", path.display())))
}

fn check_input(path: &Path) -> Result<(), Fail> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Fail::Io(format!("no such file: {}", path.display())))
    }
}

fn check_output(path: &Option<PathBuf>) -> Result<(), Fail> {
    if let Some(p) = path {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(Fail::Io(format!("output directory does not exist: {}", dir.display())));
        }
    }
    Ok(())
}

/// Instance or gadget file, told apart by their keys.
fn load_reduction(path: &Path) -> Result<ReductionInstance, Fail> {
    let text = read(path)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    if v.get("scale").is_some() {
        Ok(instance_from_json(&text)?.into())
    } else if v.get("d_bits").is_some() {
        Ok(gadget_from_json(&text)?.into())
    } else {
        Err(Fail::Usage(format!("{} is neither an instance nor a gadget file", path.display())))
    }
}

/// Points from a points, instance or gadget file.
fn load_points(path: &Path) -> Result<PointSet, Fail> {
    let text = read(path)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    if v.get("scale").is_some() {
        Ok(instance_from_json(&text)?.points)
    } else if v.get("d_bits").is_some() {
        Ok(gadget_from_json(&text)?.points)
    } else {
        Ok(points_from_json(&text)?)
    }
}

fn labels(ps: &PointSet, e: (usize, usize)) -> [String; 2] {
    [ps.label(e.0), ps.label(e.1)]
}

fn report_json(ps: &PointSet, r: &DilationReport) -> serde_json::Value {
    json!({
        "value": { "lo": r.value.lo.to_string(), "hi": r.value.hi.to_string(), "approx": r.value.midpoint_f64() },
        "witness_pair": [r.witness_pair.0, r.witness_pair.1],
        "witness_labels": labels(ps, r.witness_pair),
        "threshold_verdict": r.threshold_verdict.map(|v| format!("{v:?}")),
        "precision_used": r.precision_used,
        "tied": r.tied,
        "symbolic": r.symbolic.as_ref().map(|s| s.to_string()),
    })
}

fn print_report(ps: &PointSet, r: &DilationReport) {
    let [u, v] = labels(ps, r.witness_pair);
    println!("dilation {:.12} in {}", r.value.midpoint_f64(), r.value);
    println!("witness pair ({u}, {v}){}", if r.tied { " [tied]" } else { "" });
    if let Some(s) = &r.symbolic {
        println!("exact form {s}");
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn cmd_gen(
    alphas: Vec<u64>,
    k: Option<u32>,
    output: PathBuf,
    gadget_out: Option<PathBuf>,
    standard: Option<Vec<usize>>,
    tree_out: Option<PathBuf>,
) -> Outcome {
    check_output(&Some(output.clone()))?;
    check_output(&gadget_out)?;
    check_output(&tree_out)?;
    let inst = PartitionInstance::new(alphas)?;
    let k = k.unwrap_or_else(|| default_k(inst.n(), inst.sigma_dot()));
    let g = build_gadget(&inst, k + 8)?;
    let ii = integerize(&g, Some(k))?;
    write(&output, &instance_to_json(&ii))?;
    if let Some(p) = gadget_out {
        write(&p, &gadget_to_json(&g)?)?;
    }
    if let (Some(a), Some(p)) = (standard, tree_out) {
        let t = g.layout.standard_tree(&a.into_iter().collect::<BTreeSet<_>>())?;
        write(&p, &tree_to_json(&t))?;
    }
    println!("n = {}, k = {}, P/Q = {}/{}, {} points, {} coordinate bits", ii.n(), ii.k, ii.p, ii.q, ii.points.len(), ii.coordinate_bits());
    Ok(0)
}

fn cmd_verify(cfg: CertConfig, input: PathBuf, json_out: Option<PathBuf>) -> Outcome {
    check_input(&input)?;
    check_output(&json_out)?;
    let inst = load_reduction(&input)?;
    let g = inst.gadget()?;
    let report = verify_gadget(&g, cfg);
    for c in &report.checks {
        if c.passed {
            println!("PASS {}", c.name);
        } else {
            println!("FAIL {}: {}", c.name, c.detail);
        }
    }
    if let Some(p) = json_out {
        write(&p, &pretty(&serde_json::to_value(&report).expect("json")))?;
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn cmd_decide(cfg: CertConfig, input: PathBuf, tree_out: Option<PathBuf>, solution_out: Option<PathBuf>, scan: bool) -> Outcome {
    check_input(&input)?;
    check_output(&tree_out)?;
    check_output(&solution_out)?;
    let inst = load_reduction(&input)?;
    if scan {
        let g: Gadget = inst.gadget()?.into_owned();
        let s = scan_family(&g, cfg)?;
        println!("{} trees: {} at most P/Q, {} greater", s.trees, s.at_most, s.greater);
        return Ok(if s.at_most > 0 { 0 } else { 1 });
    }
    match decide_partition(&inst, cfg)? {
        Some(d) => {
            println!("YES A = {:?} A' = {:?} ({} trees examined)", d.solution.a, d.solution.a_prime, d.examined);
            if let Some(p) = tree_out {
                write(&p, &tree_to_json(&d.tree))?;
            }
            if let Some(p) = solution_out {
                write(&p, &pretty(&serde_json::to_value(&d.solution).expect("json")))?;
            }
            Ok(0)
        }
        None => {
            println!("NO");
            Ok(1)
        }
    }
}

fn cmd_dilation(cfg: CertConfig, points: PathBuf, tree: PathBuf, threshold: Option<(String, String)>, json_out: Option<PathBuf>) -> Outcome {
    check_input(&points)?;
    check_input(&tree)?;
    check_output(&json_out)?;
    let ps = load_points(&points)?;
    let t = tree_from_json(&read(&tree)?)?;
    if t.n() != ps.len() {
        return Err(Fail::Usage(format!("tree spans {} vertices, point set has {}", t.n(), ps.len())));
    }
    let engine = DilationEngine::new(&ps, cfg);
    let report = match &threshold {
        Some((p, q)) => {
            let thr = dilatree::threshold(&p.parse().expect("digits"), &q.parse().expect("digits"))?;
            engine.tree_dilation_with_threshold(&t, &thr)?
        }
        None => engine.tree_dilation(&t)?,
    };
    print_report(&ps, &report);
    if let Some(v) = report.threshold_verdict {
        let (p, q) = threshold.as_ref().expect("threshold given");
        println!("{} {p}/{q}", if v == ThresholdVerdict::AtMost { "AT MOST" } else { "GREATER THAN" });
    }
    if let Some(p) = json_out {
        write(&p, &pretty(&report_json(&ps, &report)))?;
    }
    Ok(if report.threshold_verdict == Some(ThresholdVerdict::Greater) { 1 } else { 0 })
}

fn parse_edge(s: &str) -> Result<(usize, usize), Fail> {
    let (u, v) = s.split_once('-').ok_or_else(|| Fail::Usage(format!("edge must be written u-v: {s}")))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|_| Fail::Usage(format!("bad vertex in {s}")));
    Ok(dilatree::edge(p(u)?, p(v)?))
}

#[allow(clippy::too_many_arguments)]
fn cmd_mdst(
    cfg: CertConfig,
    points: PathBuf,
    mode: ModeArg,
    crossing_free: bool,
    require: Vec<String>,
    no_prune: bool,
    cap: Option<u64>,
    output: Option<PathBuf>,
    json_out: Option<PathBuf>,
) -> Outcome {
    check_input(&points)?;
    check_output(&output)?;
    check_output(&json_out)?;
    let ps = load_points(&points)?;
    let mode = match mode {
        ModeArg::Tree => Mode::Tree,
        ModeArg::Path => Mode::Path,
        ModeArg::Tour => Mode::Tour,
    };
    let required_edges = require.iter().filter(|s| !s.is_empty()).map(|s| parse_edge(s)).collect::<Result<BTreeSet<_>, _>>()?;
    let opts = SolverOptions { crossing_free, required_edges, cert: cfg, enumeration_cap: cap, prune: !no_prune, ..SolverOptions::with_mode(mode) };
    let r = match mdst_exact(&ps, &opts) {
        Err(Error::Infeasible(m)) => {
            println!("INFEASIBLE {m}");
            return Ok(1);
        }
        other => other?,
    };
    let names: Vec<String> = r.edges.iter().map(|&e| labels(&ps, e).join("-")).collect();
    println!("edges {}", names.join(" "));
    if let Some(o) = &r.order {
        println!("order {o:?}");
    }
    print_report(&ps, &r.report);
    println!("{} structures examined, {} pruned", r.trees_examined, r.pruned);
    if !r.tied_with.is_empty() {
        println!("{} other optima could not be separated", r.tied_with.len());
    }
    if let Some(p) = output {
        let body = match r.tree() {
            Some(t) => tree_to_json(&t),
            None => pretty(&json!({ "n": ps.len(), "edges": r.edges.iter().map(|e| [e.0, e.1]).collect::<Vec<_>>() })),
        };
        write(&p, &body)?;
    }
    if let Some(p) = json_out {
        let v = json!({
            "mode": format!("{:?}", r.mode),
            "edges": r.edges.iter().map(|e| [e.0, e.1]).collect::<Vec<_>>(),
            "order": r.order,
            "report": report_json(&ps, &r.report),
            "trees_examined": r.trees_examined,
            "pruned": r.pruned,
            "tied_with": r.tied_with.iter().map(|t| t.iter().map(|e| [e.0, e.1]).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        write(&p, &pretty(&v))?;
    }
    Ok(0)
}

fn cmd_oracle(alphas: Vec<u64>) -> Outcome {
    let inst = PartitionInstance::new(alphas)?;
    match partition_oracle(&inst)? {
        Some(s) => {
            println!("YES A = {:?} A' = {:?}", s.a, s.a_prime);
            Ok(0)
        }
        None => {
            println!("NO");
            Ok(1)
        }
    }
}

fn cmd_witness5(cfg: CertConfig, seed: u64, budget: u64, output: Option<PathBuf>, tree_out: Option<PathBuf>) -> Outcome {
    check_output(&output)?;
    check_output(&tree_out)?;
    if budget == 0 {
        return Err(Fail::Usage("budget must be at least 1".into()));
    }
    let search = WitnessSearch { cert: cfg, ..WitnessSearch::new(seed, budget) };
    let Some(w) = search.run() else {
        println!("none");
        return Ok(1);
    };
    let pts: Vec<String> = w.points.points().iter().map(|p| format!("({}, {})", p.x, p.y)).collect();
    println!("points {}", pts.join(" "));
    println!("optimal tree {:?}, dilation {:.12}", w.tree.edges(), w.report.value.midpoint_f64());
    println!("best crossing-free {:?}, dilation {:.12}", w.crossing_free_tree.edges(), w.crossing_free_best.value.midpoint_f64());
    println!("crossing {:?} x {:?}, critical {:?}", w.crossing.0, w.crossing.1, w.critical);
    println!("found after {} candidates", w.evaluated);
    if let Some(p) = output {
        write(&p, &points_to_json(&w.points))?;
    }
    if let Some(p) = tree_out {
        write(&p, &tree_to_json(&w.tree))?;
    }
    Ok(0)
}

fn cmd_svg(points: PathBuf, tree: Option<PathBuf>, output: PathBuf) -> Outcome {
    check_input(&points)?;
    if let Some(t) = &tree {
        check_input(t)?;
    }
    check_output(&Some(output.clone()))?;
    let ps = load_points(&points)?;
    let t: Option<Tree> = tree.map(|p| read(&p).and_then(|s| Ok(tree_from_json(&s)?))).transpose()?;
    if t.as_ref().is_some_and(|t| t.n() != ps.len()) {
        return Err(Fail::Usage("tree and point set sizes differ".into()));
    }
    write(&output, &svg::render(&ps, t.as_ref()))?;
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    let mut cfg = CertConfig::from_env();
    if let Some(b) = cli.max_bits {
        if b < cfg.start_bits {
            return Err(Fail::Usage(format!("--max-bits must be at least {}", cfg.start_bits)));
        }
        cfg.max_bits = b;
    }
    match cli.command {
        Command::Gen { alphas, k, output, gadget_out, standard, tree_out } => cmd_gen(alphas, k, output, gadget_out, standard, tree_out),
        Command::Verify { input, json } => cmd_verify(cfg, input, json),
        Command::Decide { input, tree_out, solution_out, scan } => cmd_decide(cfg, input, tree_out, solution_out, scan),
        Command::Dilation { points, tree, threshold, json } => cmd_dilation(cfg, points, tree, threshold, json),
        Command::Mdst { points, mode, crossing_free, require, no_prune, cap, output, json } => {
            cmd_mdst(cfg, points, mode, crossing_free, require, no_prune, cap, output, json)
        }
        Command::Oracle { alphas } => cmd_oracle(alphas),
        Command::Witness5 { seed, budget, output, tree_out } => cmd_witness5(cfg, seed, budget, output, tree_out),
        Command::Svg { points, tree, output } => cmd_svg(points, tree, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
