use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use treekern::checker::{
    check_with_kernel, kernel_thresholds, Budget, KernelCheck, KernelOptions, Logic, MAX_SET_DOMAIN,
};
use treekern::formula::{parse_sentence, Formula, Signature};
use treekern::interpret::{
    check_graph, tree_depth_exact, EliminationForest, FrontEnd, Graph, GraphCheck, ShrubLabels,
    TreeModel,
};
use treekern::kernelize::{
    kernel_size_bound, reduce_with_report, threshold_table, ThresholdFn, DEFAULT_BIT_BUDGET,
};
use treekern::tree::{scan_labels, LabelledTree};

#[derive(Parser)]
#[command(
    name = "treekern",
    version,
    about = "MSO/CMSO model checking on trees of bounded height by kernelization"
)]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Mso,
    Cmso,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelMode {
    Adjacency,
    Signature,
}

#[derive(Args)]
struct CheckOpts {
    /// Logic for threshold selection (default: cmso iff the sentence has mod atoms).
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Largest domain over which set quantifiers are expanded.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_SET_DOMAIN as u64))]
    budget_n0: Option<u64>,
    /// Maximum number of evaluator node visits.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    budget_visits: Option<u64>,
    /// Explicit thresholds, one value per level starting at level 0.
    #[arg(long)]
    thresholds_file: Option<PathBuf>,
    /// Extra label names for the signature (comma separated).
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a sentence on a labelled tree.
    CheckTree {
        tree: PathBuf,
        formula: String,
        #[command(flatten)]
        opts: CheckOpts,
    },
    /// Write the kernel of a tree for a sentence's quantifier class.
    Kernelize {
        tree: PathBuf,
        formula: String,
        #[command(flatten)]
        opts: CheckOpts,
        /// Output tree file (default: standard output).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the N_i / R_i table.
    Thresholds {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        k: u64,
        /// Last level printed.
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Values at or above the cap are reported as saturated.
        #[arg(long, default_value_t = 1_000_000_000_000)]
        cap: u64,
        /// lcm of the moduli; the CMSO table uses q + modulus element quantifiers.
        #[arg(long)]
        modulus: Option<u64>,
    },
    /// Print the kernel size bound tow_h((2^(h+5) - 12)(t+q+s)(q+s)).
    Bound {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        s: u64,
        #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
        bit_budget: u64,
    },
    /// Decide a sentence on a graph through its tree-depth decomposition.
    CheckGraph {
        graph: PathBuf,
        formula: String,
        /// Elimination forest to use instead of computing one.
        #[arg(long)]
        forest: Option<PathBuf>,
        #[command(flatten)]
        opts: CheckOpts,
    },
    /// Compute the exact tree-depth of a graph.
    TreeDepth {
        graph: PathBuf,
        /// Write the witnessing elimination forest here.
        #[arg(long)]
        forest_out: Option<PathBuf>,
    },
    /// Decide a sentence on the graph represented by a tree-model.
    ShrubCheck {
        model: PathBuf,
        formula: String,
        #[arg(long, value_enum, default_value_t = LabelMode::Adjacency)]
        shrub_labels: LabelMode,
        #[command(flatten)]
        opts: CheckOpts,
    },
}

/// Outcome of a command: a verdict (exit 0 or 1) or plain success (exit 0).
enum Outcome {
    Verdict(bool),
    Done,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Verdict(true)) | Ok(Outcome::Done) => ExitCode::from(0),
        Ok(Outcome::Verdict(false)) => ExitCode::from(1),
        Err(e) => {
            if cli.format == Format::Jsonl {
                println!("{}", json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Label names used by `lab_NAME(` atoms in formula text.
fn formula_labels(text: &str) -> BTreeSet<String> {
    let bytes = text.as_bytes();
    let ident = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    let mut out = BTreeSet::new();
    let mut i = 0;
    while let Some(off) = text[i..].find("lab_") {
        let start = i + off;
        let end = start + 4 + bytes[start + 4..].iter().take_while(|&&b| ident(b)).count();
        if (start == 0 || !ident(bytes[start - 1])) && end > start + 4 {
            out.insert(text[start + 4..end].to_string());
        }
        i = end.max(start + 4);
    }
    out
}

impl CheckOpts {
    fn budget(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(n0) = self.budget_n0 {
            b.max_set_domain = n0 as usize;
        }
        if let Some(v) = self.budget_visits {
            b.max_visits = v;
        }
        b
    }

    fn logic(&self) -> Option<Logic> {
        self.mode.map(|m| match m {
            Mode::Mso => Logic::Mso,
            Mode::Cmso => Logic::Cmso,
        })
    }

    fn explicit_thresholds(&self) -> Result<Option<ThresholdFn>> {
        let Some(path) = &self.thresholds_file else {
            return Ok(None);
        };
        let text = read(path)?;
        let mut values = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line.parse().map_err(|_| {
                anyhow!(
                    "{}:{}: expected a natural number, found `{line}`",
                    path.display(),
                    n + 1
                )
            })?;
            values.push(v);
        }
        let f = ThresholdFn::explicit(values).with_context(|| format!("{}", path.display()))?;
        Ok(Some(f))
    }

    fn kernel_options(&self) -> Result<KernelOptions> {
        Ok(KernelOptions {
            logic: self.logic(),
            budget: self.budget(),
            thresholds: self.explicit_thresholds()?,
        })
    }
}

fn tree_and_sentence(
    path: &Path,
    formula: &str,
    extra: &[String],
) -> Result<(LabelledTree, Formula)> {
    let text = read(path)?;
    let labels: BTreeSet<String> = scan_labels(&text)
        .into_iter()
        .chain(formula_labels(formula))
        .chain(extra.iter().cloned())
        .collect();
    let signature = Signature::trees(labels)?;
    let tree =
        LabelledTree::parse(&text, &signature).with_context(|| format!("{}", path.display()))?;
    let sentence = parse_sentence(formula, &signature).context("formula")?;
    Ok((tree, sentence))
}

fn graph_sentence(graph: &Graph, formula: &str, extra: &[String]) -> Result<Formula> {
    let labels: BTreeSet<String> = graph
        .label_names()
        .into_iter()
        .chain(formula_labels(formula))
        .chain(extra.iter().cloned())
        .collect();
    let signature = Signature::graphs(labels)?;
    parse_sentence(formula, &signature).context("formula")
}

fn logic_name(l: Logic) -> &'static str {
    match l {
        Logic::Mso => "mso",
        Logic::Cmso => "cmso",
    }
}

fn kernel_fields(k: &KernelCheck) -> Value {
    let per_level: serde_json::Map<String, Value> = k
        .report
        .limbs_deleted_per_level
        .iter()
        .map(|(l, c)| (l.to_string(), json!(c)))
        .collect();
    json!({
        "logic": logic_name(k.logic),
        "q": k.q,
        "s": k.s,
        "t": k.t,
        "modulus": k.modulus,
        "original_size": k.report.original_size,
        "kernel_size": k.report.kernel_size,
        "limbs_deleted_per_level": per_level,
    })
}

fn kernel_text(k: &KernelCheck) -> String {
    let mut out = format!(
        "logic: {}\nq = {}, s = {}, t = {}, modulus = {}\noriginal size: {}\nkernel size: {}\n",
        logic_name(k.logic),
        k.q,
        k.s,
        k.t,
        k.modulus,
        k.report.original_size,
        k.report.kernel_size
    );
    for (level, count) in &k.report.limbs_deleted_per_level {
        out.push_str(&format!("limbs deleted below level {level}: {count}\n"));
    }
    out
}

fn verdict_word(v: bool) -> &'static str {
    if v {
        "TRUE"
    } else {
        "FALSE"
    }
}

fn emit(format: Format, record: Value, text: String) {
    match format {
        Format::Text => print!("{text}"),
        Format::Jsonl => println!("{record}"),
    }
}

fn report_graph(format: Format, command: &str, g: &GraphCheck) -> Outcome {
    let mut record = kernel_fields(&g.kernel);
    record["command"] = json!(command);
    record["verdict"] = json!(g.verdict);
    record["tree_size"] = json!(g.tree.len());
    let mut text = format!("{}\n", verdict_word(g.verdict));
    if let Some(td) = g.tree_depth {
        record["td"] = json!(td);
        text.push_str(&format!("td = {td}\n"));
    }
    text.push_str(&format!("interpreted tree size: {}\n", g.tree.len()));
    text.push_str(&kernel_text(&g.kernel));
    emit(format, record, text);
    Outcome::Verdict(g.verdict)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::CheckTree {
            tree,
            formula,
            opts,
        } => {
            let (tree, sentence) = tree_and_sentence(tree, formula, &opts.labels)?;
            let options = opts.kernel_options()?;
            let k = check_with_kernel(&tree, &sentence, &options)?;
            let mut record = kernel_fields(&k);
            record["command"] = json!("check-tree");
            record["verdict"] = json!(k.verdict);
            emit(
                format,
                record,
                format!("{}\n{}", verdict_word(k.verdict), kernel_text(&k)),
            );
            Ok(Outcome::Verdict(k.verdict))
        }
        Command::Kernelize {
            tree,
            formula,
            opts,
            output,
        } => {
            let (tree, sentence) = tree_and_sentence(tree, formula, &opts.labels)?;
            let t = tree.signature().len();
            let options = opts.kernel_options()?;
            let (derived, logic, _, _, modulus) = kernel_thresholds(&sentence, t, options.logic)?;
            let f = match options.thresholds {
                Some(f) if logic == Logic::Cmso && f.step() == 1 => f.with_step(modulus)?,
                Some(f) => f,
                None => derived,
            };
            let (kernel, report) = reduce_with_report(&tree, &f);
            let sexpr = kernel.compacted().to_sexpr();
            match output {
                Some(path) => {
                    fs::write(path, &sexpr)
                        .with_context(|| format!("cannot write {}", path.display()))?;
                    let record = json!({
                        "command": "kernelize",
                        "original_size": report.original_size,
                        "kernel_size": report.kernel_size,
                        "output": path.display().to_string(),
                    });
                    let text = format!(
                        "original size: {}\nkernel size: {}\nwritten to {}\n",
                        report.original_size,
                        report.kernel_size,
                        path.display()
                    );
                    emit(format, record, text);
                }
                None => print!("{sexpr}"),
            }
            Ok(Outcome::Done)
        }
        Command::Thresholds {
            q,
            s,
            k,
            levels,
            cap,
            modulus,
        } => {
            let q = q + modulus.unwrap_or(0);
            let cap = BigUint::from(*cap);
            for row in threshold_table(*levels, q, *s, *k, &cap) {
                let saturated = row.n.is_saturated() || row.r.is_saturated();
                let show = |c: &treekern::kernelize::Capped| {
                    if c.is_saturated() {
                        format!(">={cap}")
                    } else {
                        c.value().to_string()
                    }
                };
                let record = json!({
                    "i": row.i,
                    "n": show(&row.n),
                    "r": show(&row.r),
                    "saturated": saturated,
                });
                let text = format!(
                    "{}\t{}\t{}\t{}\n",
                    row.i,
                    show(&row.n),
                    show(&row.r),
                    if saturated { "saturated" } else { "exact" }
                );
                emit(format, record, text);
            }
            Ok(Outcome::Done)
        }
        Command::Bound {
            h,
            t,
            q,
            s,
            bit_budget,
        } => {
            let b = kernel_size_bound(*h, *t, *q, *s, *bit_budget)?;
            emit(format, json!({ "bound": b.to_string() }), format!("{b}\n"));
            Ok(Outcome::Done)
        }
        Command::CheckGraph {
            graph,
            formula,
            forest,
            opts,
        } => {
            let g = Graph::parse(&read(graph)?).with_context(|| format!("{}", graph.display()))?;
            let sentence = graph_sentence(&g, formula, &opts.labels)?;
            let forest = match forest {
                Some(path) => Some(
                    EliminationForest::parse(&read(path)?, g.vertex_count())
                        .with_context(|| format!("{}", path.display()))?,
                ),
                None => None,
            };
            let front = match &forest {
                Some(f) => FrontEnd::TreeDepthWithForest(f),
                None => FrontEnd::TreeDepth,
            };
            let options = opts.kernel_options()?;
            let result = check_graph(&g, &sentence, front, &options)?;
            Ok(report_graph(format, "check-graph", &result))
        }
        Command::TreeDepth { graph, forest_out } => {
            let g = Graph::parse(&read(graph)?).with_context(|| format!("{}", graph.display()))?;
            let (td, forest) = tree_depth_exact(&g)?;
            if let Some(path) = forest_out {
                fs::write(path, forest.to_text())
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            let parents: Vec<usize> = forest
                .parents()
                .iter()
                .map(|p| p.map_or(0, |p| p + 1))
                .collect();
            emit(
                format,
                json!({ "td": td, "forest": parents }),
                format!("td = {td}\n"),
            );
            Ok(Outcome::Done)
        }
        Command::ShrubCheck {
            model,
            formula,
            shrub_labels,
            opts,
        } => {
            let tm =
                TreeModel::parse(&read(model)?).with_context(|| format!("{}", model.display()))?;
            let g = tm.represented_graph();
            let sentence = graph_sentence(&g, formula, &opts.labels)?;
            let mode = match shrub_labels {
                LabelMode::Adjacency => ShrubLabels::Adjacency,
                LabelMode::Signature => ShrubLabels::Signature,
            };
            let options = opts.kernel_options()?;
            let result = check_graph(&g, &sentence, FrontEnd::Shrub(&tm, mode), &options)?;
            Ok(report_graph(format, "shrub-check", &result))
        }
    }
}
