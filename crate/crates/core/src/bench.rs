//! Benchmark harness: runs greedy, hybrid and exact over a list of instances
//! and renders one row per instance.
//!
//! Densities are rendered with 4 decimals and times in milliseconds. A cell
//! whose algorithm failed renders as `--`; a cell whose algorithm was not
//! selected is left empty.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{densest_exact, ExactOptions};
use crate::graph::Graph;
use crate::hybrid::{run_hybrid, HybridOptions, DEFAULT_SKIP_RATIO};
use crate::io::{load_path, LoadOptions};
use crate::peel::peel;

pub const CSV_HEADER: [&str; 11] = [
    "problem", "|V|", "|E|", "T_G", "f_G", "T_2", "T_3", "T_H", "f_H", "T_E", "f*",
];

pub const FAILURE_MARK: &str = "--";

/// Percentage gap of `f_approx` below `f_star`, clamped at 0.
pub fn compute_gap(f_approx: f64, f_star: f64) -> Result<f64> {
    if f_star.is_nan() || f_star <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gap needs a positive optimum, got {f_star}"
        )));
    }
    Ok((100.0 * (f_star - f_approx) / f_star).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Cell {
    Value(f64),
    #[default]
    NotRun,
    Failed,
}

impl Cell {
    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_failed(self) -> bool {
        self == Cell::Failed
    }

    fn render(self, decimals: usize) -> String {
        match self {
            Cell::Value(v) => format!("{v:.decimals$}"),
            Cell::NotRun => String::new(),
            Cell::Failed => FAILURE_MARK.into(),
        }
    }

    fn parse(s: &str) -> Result<Cell> {
        match s.trim() {
            "" => Ok(Cell::NotRun),
            FAILURE_MARK => Ok(Cell::Failed),
            t => t
                .parse()
                .map(Cell::Value)
                .map_err(|_| Error::InvalidArgument(format!("bad table cell {t:?}"))),
        }
    }

    fn rounded(self, decimals: i32) -> Cell {
        match self {
            Cell::Value(v) => {
                let scale = 10f64.powi(decimals);
                Cell::Value((v * scale).round() / scale)
            }
            c => c,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Value(v) => s.serialize_f64(*v),
            Cell::NotRun => s.serialize_none(),
            Cell::Failed => s.serialize_str(FAILURE_MARK),
        }
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Option::<Raw>::deserialize(d)? {
            None => Ok(Cell::NotRun),
            Some(Raw::Num(v)) => Ok(Cell::Value(v)),
            Some(Raw::Text(t)) if t == FAILURE_MARK => Ok(Cell::Failed),
            Some(Raw::Text(t)) => Err(serde::de::Error::custom(format!("bad cell {t:?}"))),
        }
    }
}

/// Decimals used for times in table output.
pub const TIME_DECIMALS: usize = 3;
/// Decimals used for densities in table output.
pub const DENSITY_DECIMALS: usize = 4;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchRecord {
    pub problem: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub t_g: Cell,
    pub f_g: Cell,
    pub t_2: Cell,
    pub t_3: Cell,
    pub t_h: Cell,
    pub f_h: Cell,
    pub t_e: Cell,
    pub f_star: Cell,
    /// Parse time, kept out of the algorithm columns.
    #[serde(default)]
    pub load_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl BenchRecord {
    pub fn new(problem: impl Into<String>) -> Self {
        BenchRecord {
            problem: problem.into(),
            ..Default::default()
        }
    }

    pub fn has_failure(&self) -> bool {
        self.n.is_none()
            || [
                self.t_g,
                self.f_g,
                self.t_2,
                self.t_3,
                self.t_h,
                self.f_h,
                self.t_e,
                self.f_star,
            ]
            .iter()
            .any(|c| c.is_failed())
    }

    /// Table cells in [`CSV_HEADER`] order.
    pub fn cells(&self) -> Vec<String> {
        let size = |x: Option<usize>| x.map_or(FAILURE_MARK.to_string(), |v| v.to_string());
        vec![
            self.problem.clone(),
            size(self.n),
            size(self.m),
            self.t_g.render(TIME_DECIMALS),
            self.f_g.render(DENSITY_DECIMALS),
            self.t_2.render(TIME_DECIMALS),
            self.t_3.render(TIME_DECIMALS),
            self.t_h.render(TIME_DECIMALS),
            self.f_h.render(DENSITY_DECIMALS),
            self.t_e.render(TIME_DECIMALS),
            self.f_star.render(DENSITY_DECIMALS),
        ]
    }

    /// The record as it reads back from a table: values rounded to the
    /// printed precision, no load time, no error text.
    pub fn table_precision(&self) -> BenchRecord {
        let (t, f) = (TIME_DECIMALS as i32, DENSITY_DECIMALS as i32);
        BenchRecord {
            problem: self.problem.clone(),
            n: self.n,
            m: self.m,
            t_g: self.t_g.rounded(t),
            f_g: self.f_g.rounded(f),
            t_2: self.t_2.rounded(t),
            t_3: self.t_3.rounded(t),
            t_h: self.t_h.rounded(t),
            f_h: self.f_h.rounded(f),
            t_e: self.t_e.rounded(t),
            f_star: self.f_star.rounded(f),
            load_ms: None,
            errors: Vec::new(),
        }
    }

    fn from_cells(row: &csv::StringRecord) -> Result<BenchRecord> {
        if row.len() != CSV_HEADER.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} columns, found {}",
                CSV_HEADER.len(),
                row.len()
            )));
        }
        let size = |s: &str| -> Result<Option<usize>> {
            match s.trim() {
                FAILURE_MARK => Ok(None),
                t => t
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::InvalidArgument(format!("bad size {t:?}"))),
            }
        };
        Ok(BenchRecord {
            problem: row[0].to_string(),
            n: size(&row[1])?,
            m: size(&row[2])?,
            t_g: Cell::parse(&row[3])?,
            f_g: Cell::parse(&row[4])?,
            t_2: Cell::parse(&row[5])?,
            t_3: Cell::parse(&row[6])?,
            t_h: Cell::parse(&row[7])?,
            f_h: Cell::parse(&row[8])?,
            t_e: Cell::parse(&row[9])?,
            f_star: Cell::parse(&row[10])?,
            load_ms: None,
            errors: Vec::new(),
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record(r.cells()).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidArgument(format!(
            "unexpected header {header:?}"
        )));
    }
    r.records()
        .map(|row| BenchRecord::from_cells(&row.map_err(csv_error)?))
        .collect()
}

pub fn write_json<W: Write>(records: &[BenchRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)
        .map_err(|e| Error::InvalidArgument(format!("json: {e}")))?;
    writeln!(out)?;
    Ok(())
}

/// Fixed-width table for terminals.
pub fn write_text<W: Write>(records: &[BenchRecord], mut out: W) -> Result<()> {
    let rows: Vec<Vec<String>> =
        std::iter::once(CSV_HEADER.iter().map(|s| s.to_string()).collect())
            .chain(records.iter().map(|r| r.cells()))
            .collect();
    let widths: Vec<usize> = (0..CSV_HEADER.len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, &w))| {
                if i == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown output format {other:?}"
            ))),
        }
    }
}

pub fn write_records<W: Write>(
    records: &[BenchRecord],
    format: OutputFormat,
    out: W,
) -> Result<()> {
    match format {
        OutputFormat::Text => write_text(records, out),
        OutputFormat::Csv => write_csv(records, out),
        OutputFormat::Json => write_json(records, out),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub weighted: bool,
}

impl ManifestEntry {
    pub fn problem(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.path.display().to_string())
    }
}

/// One path per line, optionally followed by `weighted`. Blank lines and
/// `#` comments are skipped; relative paths resolve against `base`.
pub fn parse_manifest<R: BufRead>(reader: R, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let path = PathBuf::from(tokens.next().expect("nonempty line"));
        let weighted = match tokens.next() {
            None => false,
            Some(t) if t.eq_ignore_ascii_case("weighted") => true,
            Some(t) => return Err(Error::parse(i + 1, format!("unexpected token {t:?}"))),
        };
        if let Some(t) = tokens.next() {
            return Err(Error::parse(i + 1, format!("unexpected token {t:?}")));
        }
        let path = if path.is_relative() {
            base.join(path)
        } else {
            path
        };
        entries.push(ManifestEntry { path, weighted });
    }
    Ok(entries)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let file = std::fs::File::open(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(std::io::BufReader::new(file), base)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Algorithms {
    pub greedy: bool,
    pub hybrid: bool,
    pub exact: bool,
}

impl Default for Algorithms {
    fn default() -> Self {
        Algorithms {
            greedy: true,
            hybrid: true,
            exact: true,
        }
    }
}

impl std::str::FromStr for Algorithms {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut a = Algorithms {
            greedy: false,
            hybrid: false,
            exact: false,
        };
        for name in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match name.to_ascii_lowercase().as_str() {
                "greedy" | "peel" => a.greedy = true,
                "hybrid" => a.hybrid = true,
                "exact" => a.exact = true,
                "all" => a = Algorithms::default(),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown algorithm {other:?}"
                    )))
                }
            }
        }
        if a == (Algorithms {
            greedy: false,
            hybrid: false,
            exact: false,
        }) {
            return Err(Error::InvalidArgument("no algorithm selected".into()));
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub algorithms: Algorithms,
    pub skip_ratio: f64,
    pub tolerance: Option<f64>,
    /// Applied to loading and to each flow network.
    pub memory_budget: Option<usize>,
    pub jobs: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            algorithms: Algorithms::default(),
            skip_ratio: DEFAULT_SKIP_RATIO,
            tolerance: None,
            memory_budget: None,
            jobs: 1,
        }
    }
}

/// Runs the selected algorithms on an already loaded graph. Failures become
/// `--` cells; nothing here returns early.
pub fn bench_graph(problem: &str, graph: &Graph, opts: &BenchOptions) -> BenchRecord {
    let mut rec = BenchRecord::new(problem);
    rec.n = Some(graph.n());
    rec.m = Some(graph.m());
    let algos = opts.algorithms;

    if algos.greedy {
        match peel(graph) {
            Ok(r) => {
                rec.t_g = Cell::Value(r.elapsed_ms);
                rec.f_g = Cell::Value(r.best_set.density.value());
            }
            Err(e) => {
                rec.t_g = Cell::Failed;
                rec.f_g = Cell::Failed;
                rec.errors.push(format!("greedy: {e}"));
            }
        }
    }

    if algos.hybrid {
        let hopts = HybridOptions {
            skip_ratio: opts.skip_ratio,
            tolerance: opts.tolerance,
            memory_budget: opts.memory_budget,
        };
        match run_hybrid(graph, &hopts) {
            Ok(h) => {
                if !algos.greedy {
                    rec.t_g = Cell::Value(h.times.peel_ms);
                    rec.f_g = Cell::Value(h.greedy_set.density.value());
                }
                rec.t_2 = Cell::Value(h.times.expand_ms);
                if h.failed {
                    rec.t_3 = Cell::Failed;
                    rec.t_h = Cell::Failed;
                    rec.f_h = Cell::Failed;
                    rec.errors
                        .push(format!("hybrid: {}", h.failure.unwrap_or_default()));
                } else {
                    rec.t_3 = Cell::Value(h.times.exact_ms);
                    rec.t_h = Cell::Value(h.times.total_ms);
                    rec.f_h = Cell::Value(h.best_set.density.value());
                }
            }
            Err(e) => {
                for c in [&mut rec.t_2, &mut rec.t_3, &mut rec.t_h, &mut rec.f_h] {
                    *c = Cell::Failed;
                }
                rec.errors.push(format!("hybrid: {e}"));
            }
        }
    }

    if algos.exact {
        let eopts = ExactOptions {
            tolerance: opts.tolerance,
            memory_budget: opts.memory_budget,
            ..Default::default()
        };
        match densest_exact(graph, &eopts) {
            Ok(r) => {
                rec.t_e = Cell::Value(r.elapsed_ms);
                rec.f_star = Cell::Value(r.best_set.density.value());
            }
            Err(e) => {
                rec.t_e = Cell::Failed;
                rec.f_star = Cell::Failed;
                rec.errors.push(format!("exact: {e}"));
            }
        }
    }
    rec
}

fn failed_row(problem: String, e: &Error, algos: Algorithms) -> BenchRecord {
    let mark = |on: bool| if on { Cell::Failed } else { Cell::NotRun };
    BenchRecord {
        problem,
        n: None,
        m: None,
        t_g: mark(algos.greedy || algos.hybrid),
        f_g: mark(algos.greedy || algos.hybrid),
        t_2: mark(algos.hybrid),
        t_3: mark(algos.hybrid),
        t_h: mark(algos.hybrid),
        f_h: mark(algos.hybrid),
        t_e: mark(algos.exact),
        f_star: mark(algos.exact),
        load_ms: None,
        errors: vec![format!("load: {e}")],
    }
}

pub fn bench_entry(entry: &ManifestEntry, opts: &BenchOptions) -> BenchRecord {
    let start = Instant::now();
    let load = load_path(
        &entry.path,
        None,
        LoadOptions {
            weighted: entry.weighted,
            memory_budget: opts.memory_budget,
        },
    );
    match load {
        Ok(loaded) => {
            let load_ms = start.elapsed().as_secs_f64() * 1e3;
            let mut rec = bench_graph(&entry.problem(), &loaded.graph, opts);
            rec.load_ms = Some(load_ms);
            rec
        }
        Err(e) => failed_row(entry.problem(), &e, opts.algorithms),
    }
}

/// Benchmarks every entry, in manifest order. Instances are distributed over
/// `opts.jobs` worker threads; each instance runs its algorithms in sequence.
pub fn run_bench(entries: &[ManifestEntry], opts: &BenchOptions) -> Vec<BenchRecord> {
    let jobs = opts.jobs.clamp(1, entries.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<BenchRecord>>> = Mutex::new(vec![None; entries.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(entry) = entries.get(i) else { break };
                let rec =
                    std::panic::catch_unwind(|| bench_entry(entry, opts)).unwrap_or_else(|_| {
                        failed_row(
                            entry.problem(),
                            &Error::InvalidArgument("worker panicked".into()),
                            opts.algorithms,
                        )
                    });
                slots.lock().expect("no poisoned slots")[i] = Some(rec);
            });
        }
    });
    slots
        .into_inner()
        .expect("no poisoned slots")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

impl fmt::Display for BenchRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cells().join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_values() {
        assert!((compute_gap(12.5, 13.3667).unwrap() - 6.484).abs() < 1e-3);
        assert_eq!(compute_gap(3.0, 3.0).unwrap(), 0.0);
        assert_eq!(compute_gap(3.0000001, 3.0).unwrap(), 0.0);
        assert!((compute_gap(19.423, 19.9423).unwrap() - 2.604).abs() < 1e-3);
        assert!(compute_gap(1.0, 0.0).is_err());
        assert!(compute_gap(1.0, -1.0).is_err());
    }

    fn sample() -> BenchRecord {
        BenchRecord {
            problem: "toy".into(),
            n: Some(4),
            m: Some(4),
            t_g: Cell::Value(0.0123),
            f_g: Cell::Value(1.0),
            t_2: Cell::Value(0.002),
            t_3: Cell::Failed,
            t_h: Cell::Failed,
            f_h: Cell::Failed,
            t_e: Cell::Value(1.5),
            f_star: Cell::Value(4.0 / 3.0),
            load_ms: Some(0.1),
            errors: vec!["hybrid: budget".into()],
        }
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![sample(), BenchRecord::new("empty")];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("problem,|V|,|E|,T_G,f_G,T_2,T_3,T_H,f_H,T_E,f*\n"));
        assert!(text.contains("toy,4,4,0.012,1.0000,0.002,--,--,--,1.500,1.3333"));
        let back = read_csv(buf.as_slice()).unwrap();
        let expected: Vec<_> = recs.iter().map(|r| r.table_precision()).collect();
        assert_eq!(back, expected);
    }

    #[test]
    fn json_round_trip_keeps_marks() {
        let recs = vec![sample()];
        let mut buf = Vec::new();
        write_json(&recs, &mut buf).unwrap();
        let back: Vec<BenchRecord> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, recs);
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["f_h"], "--");
        assert!(v[0]["t_3"].is_string());
    }

    #[test]
    fn manifest_parsing() {
        let text = "# instances\na.mtx\n\n/abs/b.mtx weighted  # comment\n";
        let entries = parse_manifest(text.as_bytes(), Path::new("/data")).unwrap();
        assert_eq!(
            entries,
            vec![
                ManifestEntry {
                    path: "/data/a.mtx".into(),
                    weighted: false
                },
                ManifestEntry {
                    path: "/abs/b.mtx".into(),
                    weighted: true
                },
            ]
        );
        assert_eq!(entries[0].problem(), "a");
        assert!(parse_manifest("a.mtx heavy\n".as_bytes(), Path::new(".")).is_err());
    }

    #[test]
    fn missing_file_becomes_marks() {
        let entries = vec![ManifestEntry {
            path: "/nonexistent/x.mtx".into(),
            weighted: false,
        }];
        let recs = run_bench(&entries, &BenchOptions::default());
        assert_eq!(recs.len(), 1);
        assert!(recs[0].has_failure());
        assert!(recs[0].cells()[1..].iter().all(|c| c == FAILURE_MARK));
    }

    #[test]
    fn algorithms_parse() {
        let a: Algorithms = "greedy,exact".parse().unwrap();
        assert!(a.greedy && a.exact && !a.hybrid);
        assert!("".parse::<Algorithms>().is_err());
        assert!("simplex".parse::<Algorithms>().is_err());
    }

    #[test]
    fn bench_graph_orders_densities() {
        let g = crate::instances::gen_worstcase(4, 6).unwrap();
        let r = bench_graph("wc", &g, &BenchOptions::default());
        let (fg, fh, fs) = (
            r.f_g.value().unwrap(),
            r.f_h.value().unwrap(),
            r.f_star.value().unwrap(),
        );
        assert!(fg <= fh + 1e-12 && fh <= fs + 1e-12);
        assert!(!r.has_failure());
    }
}
