//! The `densest` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 when an instance could not
//! be loaded or an algorithm failed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{
    read_manifest, run_bench, write_records, Algorithms, BenchOptions, BenchRecord, Cell,
    OutputFormat,
};
use crate::error::{Error, Result};
use crate::exact::{densest_exact, ExactOptions};
use crate::graph::{DenseSet, Graph};
use crate::hybrid::{run_hybrid, HybridOptions, DEFAULT_SKIP_RATIO};
use crate::instances::{gen_random, gen_worstcase, WeightSpec};
use crate::io::{load_path, write_edge_list, Format, LoadOptions};
use crate::lp::emit_charikar_lp;
use crate::peel::peel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "densest", version, about = "Densest subgraph extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Greedy peeling (2-approximation, linear time when unweighted)
    Peel(SolveArgs),
    /// Exact optimum via max-flow and binary search
    Exact(ExactArgs),
    /// Peel, expand to the neighborhood, solve exactly on the core
    Hybrid(HybridArgs),
    /// Generate an instance as an edge list
    #[command(subcommand)]
    Gen(GenCommand),
    /// Write the LP relaxation in LP file format
    LpExport(LpArgs),
    /// Run the algorithms over a manifest of instances
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Graph file (`-` for stdin)
    input: PathBuf,
    /// Read edge weights instead of treating the graph as unweighted
    #[arg(long)]
    weighted: bool,
    /// Input format; guessed from the extension when omitted
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// Memory budget in bytes (suffixes K, M, G accepted)
    #[arg(long, value_parser = parse_bytes)]
    memory_budget: Option<usize>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, default_value = "text", value_parser = parse_output)]
    out: OutputFormat,
    /// Also print the vertices of the returned set (by label)
    #[arg(long)]
    report_set: bool,
    /// Write to this file instead of stdout
    #[arg(long)]
    out_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Stopping width for real-weighted graphs
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args, Debug)]
struct HybridArgs {
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Skip the exact phase when the core exceeds this fraction of |V|
    #[arg(long, default_value_t = DEFAULT_SKIP_RATIO)]
    skip_ratio: f64,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Star with t spokes plus p disjoint edges
    Worstcase {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
    /// Uniform random graph with exactly m edges
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `none`, `int:LO:HI` or `real:LO:HI`
        #[arg(long, default_value = "none", value_parser = parse_weights)]
        weights: WeightSpec,
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct LpArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// One instance path per line, optionally followed by `weighted`
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value = "csv", value_parser = parse_output)]
    out: OutputFormat,
    #[arg(long)]
    out_file: Option<PathBuf>,
    /// Comma-separated subset of greedy, hybrid, exact
    #[arg(long, default_value = "all", value_parser = parse_algorithms)]
    algorithms: Algorithms,
    #[arg(long, default_value_t = DEFAULT_SKIP_RATIO)]
    skip_ratio: f64,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Per-instance memory budget in bytes (suffixes K, M, G accepted)
    #[arg(long, value_parser = parse_bytes)]
    memory_budget: Option<usize>,
    /// Worker threads; instances run in parallel, algorithms within one do not
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_output(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_algorithms(s: &str) -> std::result::Result<Algorithms, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_bytes(s: &str) -> std::result::Result<usize, String> {
    let s = s.trim();
    let (digits, scale) = match s.char_indices().last() {
        Some((i, c)) if c.is_ascii_alphabetic() => {
            let scale = match c.to_ascii_uppercase() {
                'K' => 1usize << 10,
                'M' => 1 << 20,
                'G' => 1 << 30,
                _ => return Err(format!("unknown size suffix in {s:?}")),
            };
            (&s[..i], scale)
        }
        _ => (s, 1),
    };
    let v: usize = digits
        .parse()
        .map_err(|_| format!("bad byte count {s:?}"))?;
    v.checked_mul(scale)
        .ok_or_else(|| format!("byte count {s:?} overflows"))
}

fn parse_weights(s: &str) -> std::result::Result<WeightSpec, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(WeightSpec::None);
    }
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("expected none, int:LO:HI or real:LO:HI, got {s:?}");
    match parts.as_slice() {
        ["int", lo, hi] => Ok(WeightSpec::Integer {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
        }),
        ["real", lo, hi] => Ok(WeightSpec::Uniform {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// Errors that mean the invocation itself was wrong.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidArgument(_) | Error::InfeasibleEdgeCount { .. }
    )
}

fn open_sink<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn load(input: &InputArgs) -> Result<(Graph, f64)> {
    let start = std::time::Instant::now();
    let loaded = load_path(
        &input.input,
        input.format,
        LoadOptions {
            weighted: input.weighted,
            memory_budget: input.memory_budget,
        },
    )?;
    Ok((loaded.graph, start.elapsed().as_secs_f64() * 1e3))
}

fn problem_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stdin".into())
}

fn labels_of(graph: &Graph, set: &DenseSet) -> Vec<u64> {
    set.members.iter().map(|&v| graph.label(v)).collect()
}

struct Report<'a> {
    record: BenchRecord,
    /// Text lines for `--out text`, before the optional set.
    lines: Vec<String>,
    set: Option<Vec<u64>>,
    graph: &'a Graph,
}

fn emit(report: Report<'_>, output: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut sink = open_sink(&output.out_file, stdout)?;
    let set = if output.report_set { report.set } else { None };
    match output.out {
        OutputFormat::Text => {
            for line in &report.lines {
                writeln!(sink, "{line}")?;
            }
            if let Some(set) = &set {
                let parts: Vec<String> = set.iter().map(u64::to_string).collect();
                writeln!(sink, "S = {}", parts.join(" "))?;
            }
        }
        OutputFormat::Csv => {
            write_records(
                std::slice::from_ref(&report.record),
                OutputFormat::Csv,
                &mut sink,
            )?;
            if let Some(set) = &set {
                writeln!(sink)?;
                writeln!(sink, "vertex")?;
                for v in set {
                    writeln!(sink, "{v}")?;
                }
            }
        }
        OutputFormat::Json => {
            let mut value = serde_json::json!({ "record": report.record, "n": report.graph.n() });
            if let Some(set) = set {
                value["set"] = serde_json::json!(set);
            }
            serde_json::to_writer_pretty(&mut sink, &value)
                .map_err(|e| Error::InvalidArgument(format!("json: {e}")))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

fn fmt_cell(c: Cell, decimals: usize) -> String {
    match c {
        Cell::Value(v) => format!("{v:.decimals$}"),
        _ => "--".into(),
    }
}

fn cmd_peel(args: &SolveArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (graph, load_ms) = load(&args.input)?;
    let r = peel(&graph)?;
    let mut record = BenchRecord::new(problem_name(&args.input.input));
    record.n = Some(graph.n());
    record.m = Some(graph.m());
    record.t_g = Cell::Value(r.elapsed_ms);
    record.f_g = Cell::Value(r.best_set.density.value());
    record.load_ms = Some(load_ms);
    let lines = vec![
        format!(
            "f_G = {:.4}, |S| = {}",
            r.best_set.density.value(),
            r.best_set.len()
        ),
        format!("T_G = {:.3} ms (load {:.3} ms)", r.elapsed_ms, load_ms),
    ];
    let set = Some(labels_of(&graph, &r.best_set));
    emit(
        Report {
            record,
            lines,
            set,
            graph: &graph,
        },
        &args.output,
        stdout,
    )?;
    Ok(EXIT_OK)
}

fn cmd_exact(args: &ExactArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (graph, load_ms) = load(&args.solve.input)?;
    let opts = ExactOptions {
        tolerance: args.tolerance,
        memory_budget: args.solve.input.memory_budget,
        ..Default::default()
    };
    let mut record = BenchRecord::new(problem_name(&args.solve.input.input));
    record.n = Some(graph.n());
    record.m = Some(graph.m());
    record.load_ms = Some(load_ms);
    let (lines, set, code) = match densest_exact(&graph, &opts) {
        Ok(r) => {
            record.t_e = Cell::Value(r.elapsed_ms);
            record.f_star = Cell::Value(r.best_set.density.value());
            let lines = vec![
                format!(
                    "f* = {:.4}, |S| = {}",
                    r.best_set.density.value(),
                    r.best_set.len()
                ),
                format!(
                    "T_E = {:.3} ms (load {:.3} ms, {} flow solves{})",
                    r.elapsed_ms,
                    load_ms,
                    r.iterations,
                    if r.certified { ", certified" } else { "" }
                ),
            ];
            (lines, Some(labels_of(&graph, &r.best_set)), EXIT_OK)
        }
        Err(e @ Error::MemoryBudget { .. }) => {
            record.t_e = Cell::Failed;
            record.f_star = Cell::Failed;
            record.errors.push(e.to_string());
            (
                vec!["f* = --".into(), format!("exact failed: {e}")],
                None,
                EXIT_FAILURE,
            )
        }
        Err(e) => return Err(e),
    };
    emit(
        Report {
            record,
            lines,
            set,
            graph: &graph,
        },
        &args.solve.output,
        stdout,
    )?;
    Ok(code)
}

fn cmd_hybrid(args: &HybridArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (graph, load_ms) = load(&args.solve.input)?;
    let opts = HybridOptions {
        skip_ratio: args.skip_ratio,
        tolerance: args.tolerance,
        memory_budget: args.solve.input.memory_budget,
    };
    let h = run_hybrid(&graph, &opts)?;
    let mut record = BenchRecord::new(problem_name(&args.solve.input.input));
    record.n = Some(graph.n());
    record.m = Some(graph.m());
    record.load_ms = Some(load_ms);
    record.t_g = Cell::Value(h.times.peel_ms);
    record.f_g = Cell::Value(h.greedy_set.density.value());
    record.t_2 = Cell::Value(h.times.expand_ms);
    if h.failed {
        record.t_3 = Cell::Failed;
        record.t_h = Cell::Failed;
        record.f_h = Cell::Failed;
        record.errors.push(h.failure.clone().unwrap_or_default());
    } else {
        record.t_3 = Cell::Value(h.times.exact_ms);
        record.t_h = Cell::Value(h.times.total_ms);
        record.f_h = Cell::Value(h.best_set.density.value());
    }
    let mut lines = vec![
        if h.failed {
            "f_H = --".to_string()
        } else {
            format!(
                "f_H = {:.4}, |S| = {}",
                h.best_set.density.value(),
                h.best_set.len()
            )
        },
        format!(
            "f_G = {:.4}, |S1| = {}",
            h.greedy_set.density.value(),
            h.greedy_set.len()
        ),
        format!(
            "core: {} vertices, {} edges{}",
            h.core_size,
            h.core_edges.map_or("--".to_string(), |m| m.to_string()),
            if h.skipped {
                " (exact phase skipped)"
            } else {
                ""
            }
        ),
        format!(
            "T_G = {:.3} ms, T_2 = {:.3} ms, T_3 = {} ms, T_H = {} ms (load {:.3} ms)",
            h.times.peel_ms,
            h.times.expand_ms,
            fmt_cell(record.t_3, 3),
            fmt_cell(record.t_h, 3),
            load_ms
        ),
    ];
    if let Some(f) = &h.failure {
        lines.push(format!("exact phase failed: {f}"));
    }
    // the greedy answer is still reported when the exact phase failed
    let set = Some(labels_of(&graph, &h.best_set));
    emit(
        Report {
            record,
            lines,
            set,
            graph: &graph,
        },
        &args.solve.output,
        stdout,
    )?;
    Ok(if h.failed { EXIT_FAILURE } else { EXIT_OK })
}

fn cmd_gen(cmd: &GenCommand, stdout: &mut dyn Write) -> Result<i32> {
    let (graph, out_file) = match cmd {
        GenCommand::Worstcase { t, p, out_file } => (gen_worstcase(*t, *p)?, out_file),
        GenCommand::Random {
            n,
            m,
            seed,
            weights,
            out_file,
        } => (gen_random(*n, *m, *seed, *weights)?, out_file),
    };
    let mut sink = open_sink(out_file, stdout)?;
    write_edge_list(&graph, &mut sink)?;
    sink.flush()?;
    Ok(EXIT_OK)
}

fn cmd_lp(args: &LpArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (graph, _) = load(&args.input)?;
    let mut sink = open_sink(&args.out_file, stdout)?;
    let summary = emit_charikar_lp(&graph, &mut sink)?;
    drop(sink);
    writeln!(
        stderr,
        "{} variables, {} constraints",
        summary.variables, summary.constraints
    )?;
    Ok(EXIT_OK)
}

fn cmd_bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<i32> {
    if !(args.skip_ratio > 0.0 && args.skip_ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "skip ratio {} not in (0, 1]",
            args.skip_ratio
        )));
    }
    let entries = read_manifest(&args.manifest)?;
    let opts = BenchOptions {
        algorithms: args.algorithms,
        skip_ratio: args.skip_ratio,
        tolerance: args.tolerance,
        memory_budget: args.memory_budget,
        jobs: args.jobs,
    };
    let records = run_bench(&entries, &opts);
    let mut sink = open_sink(&args.out_file, stdout)?;
    write_records(&records, args.out, &mut sink)?;
    sink.flush()?;
    Ok(if records.iter().any(BenchRecord::has_failure) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Peel(a) => cmd_peel(a, stdout),
        Command::Exact(a) => cmd_exact(a, stdout),
        Command::Hybrid(a) => cmd_hybrid(a, stdout),
        Command::Gen(g) => cmd_gen(g, stdout),
        Command::LpExport(a) => cmd_lp(a, stdout, stderr),
        Command::Bench(a) => cmd_bench(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "densest: {e}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAILURE
            }
        }
    }
}

/// Entry point for the binary.
pub fn main_with_std() -> i32 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let stderr = io::stderr();
    let mut err = stderr.lock();
    run(std::env::args_os(), &mut out, &mut err)
}
