//! MatrixMarket and edge-list readers, and an edge-list writer.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, LoadReport, Symmetry, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    MatrixMarket,
    EdgeList,
}

impl Format {
    /// `.mtx` (optionally followed by nothing else) selects MatrixMarket; anything else is an edge list.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") || ext.eq_ignore_ascii_case("mm") => {
                Format::MatrixMarket
            }
            _ => Format::EdgeList,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mm" | "mtx" | "matrix-market" => Ok(Format::MatrixMarket),
            "edgelist" | "el" | "edge-list" => Ok(Format::EdgeList),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Keep edge weights from the file.
    pub weighted: bool,
    /// Refuse inputs whose estimated in-memory size exceeds this many bytes.
    pub memory_budget: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub graph: Graph,
    pub report: LoadReport,
}

/// Approximate bytes needed to load `n` vertices and `entries` stored entries.
pub fn estimate_load_bytes(n: usize, entries: usize, weighted: bool) -> usize {
    let staging = entries * 24;
    let csr = (n + 1) * 16 + 2 * entries * if weighted { 12 } else { 4 };
    staging + csr + entries * if weighted { 16 } else { 8 }
}

fn check_budget(required: usize, budget: Option<usize>) -> Result<()> {
    match budget {
        Some(budget) if required > budget => Err(Error::MemoryBudget { required, budget }),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Pattern,
    Integer,
    Real,
}

/// Reads a MatrixMarket coordinate file (`pattern`, `integer` or `real`;
/// `symmetric` or `general`). File indices are 1-based and become the
/// vertex labels.
pub fn read_matrix_market<R: BufRead>(reader: R, opts: LoadOptions) -> Result<Loaded> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::MalformedHeader("empty input".into()))?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::MalformedHeader(header));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Unsupported(format!("{} storage", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "pattern" => Field::Pattern,
        "integer" => Field::Integer,
        "real" | "double" => Field::Real,
        "complex" => return Err(Error::Unsupported("complex field".into())),
        other => return Err(Error::MalformedHeader(format!("unknown field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "symmetric" => Symmetry::Symmetric,
        "general" => Symmetry::General,
        other => return Err(Error::Unsupported(format!("{other} symmetry"))),
    };
    let weighted = opts.weighted && field != Field::Pattern;

    let mut size: Option<(usize, usize)> = None;
    let mut builder: Option<GraphBuilder> = None;
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        match size {
            None => {
                let nums: Vec<usize> = it
                    .map(|x| x.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::MalformedHeader(format!("bad size line '{t}'")))?;
                if nums.len() != 3 {
                    return Err(Error::MalformedHeader(format!("bad size line '{t}'")));
                }
                if nums[0] != nums[1] {
                    return Err(Error::MalformedHeader(format!(
                        "adjacency matrix must be square, got {}x{}",
                        nums[0], nums[1]
                    )));
                }
                let (n, nnz) = (nums[0], nums[2]);
                if n > VertexId::MAX as usize {
                    return Err(Error::Unsupported(format!("{n} vertices")));
                }
                check_budget(estimate_load_bytes(n, nnz, weighted), opts.memory_budget)?;
                size = Some((n, nnz));
                // report vertices by their 1-based file index
                builder = Some(
                    GraphBuilder::new(n, weighted, symmetry)
                        .with_capacity(nnz)
                        .labels((1..=n as u64).collect()),
                );
            }
            Some((n, _)) => {
                let b = builder.as_mut().expect("builder exists once size is known");
                let i = parse_index(it.next(), lineno, n)?;
                let j = parse_index(it.next(), lineno, n)?;
                let w = if field == Field::Pattern {
                    1.0
                } else {
                    let tok = it
                        .next()
                        .ok_or_else(|| Error::parse(lineno, "missing value"))?;
                    let w: f64 = tok
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad value '{tok}'")))?;
                    if weighted && !(w > 0.0 && w.is_finite()) {
                        return Err(Error::NonPositiveWeight {
                            line: lineno,
                            weight: w,
                        });
                    }
                    w
                };
                b.add(i, j, w)?;
                seen += 1;
            }
        }
    }
    let (_, nnz) = size.ok_or_else(|| Error::MalformedHeader("missing size line".into()))?;
    if seen != nnz {
        return Err(Error::MalformedHeader(format!(
            "size line declares {nnz} entries, found {seen}"
        )));
    }
    let (graph, report) = builder.expect("size known").build();
    Ok(Loaded { graph, report })
}

fn parse_index(tok: Option<&str>, line: usize, n: usize) -> Result<VertexId> {
    let tok = tok.ok_or_else(|| Error::parse(line, "missing index"))?;
    let i: u64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad index '{tok}'")))?;
    if i == 0 || i > n as u64 {
        return Err(Error::IndexOutOfBounds { line, index: i, n });
    }
    Ok((i - 1) as VertexId)
}

/// Reads whitespace-separated `u v [w]` lines. Lines starting with `#` or `%`
/// are comments; a line with a single label declares an isolated vertex.
/// Labels are compacted to `0..n` in order of first appearance.
pub fn read_edge_list<R: BufRead>(reader: R, opts: LoadOptions) -> Result<Loaded> {
    let mut ids: HashMap<u64, VertexId> = HashMap::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut raw: Vec<(VertexId, VertexId, f64)> = Vec::new();
    let mut intern = |label: u64, labels: &mut Vec<u64>| -> VertexId {
        *ids.entry(label).or_insert_with(|| {
            labels.push(label);
            (labels.len() - 1) as VertexId
        })
    };
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = t.split_whitespace().collect();
        let label = |tok: &str| -> Result<u64> {
            tok.parse::<u64>()
                .map_err(|_| Error::parse(lineno, format!("non-numeric token '{tok}'")))
        };
        match tokens.as_slice() {
            [v] => {
                intern(label(v)?, &mut labels);
            }
            [u, v, rest @ ..] => {
                let (lu, lv) = (label(u)?, label(v)?);
                let w = match (opts.weighted, rest.first()) {
                    (true, None) => return Err(Error::parse(lineno, "missing weight")),
                    (true, Some(tok)) => {
                        let w: f64 = tok.parse().map_err(|_| {
                            Error::parse(lineno, format!("non-numeric token '{tok}'"))
                        })?;
                        if !(w > 0.0 && w.is_finite()) {
                            return Err(Error::NonPositiveWeight {
                                line: lineno,
                                weight: w,
                            });
                        }
                        w
                    }
                    (false, _) => 1.0,
                };
                let a = intern(lu, &mut labels);
                let b = intern(lv, &mut labels);
                raw.push((a, b, w));
            }
            [] => unreachable!("blank lines skipped"),
        }
        if raw.len().is_multiple_of(1_000_000) && !raw.is_empty() {
            check_budget(
                estimate_load_bytes(labels.len(), raw.len(), opts.weighted),
                opts.memory_budget,
            )?;
        }
    }
    let n = labels.len();
    check_budget(
        estimate_load_bytes(n, raw.len(), opts.weighted),
        opts.memory_budget,
    )?;
    let mut builder = GraphBuilder::new(n, opts.weighted, Symmetry::General)
        .with_capacity(raw.len())
        .labels(labels);
    for (u, v, w) in raw {
        builder.add(u, v, w)?;
    }
    let (graph, report) = builder.build();
    Ok(Loaded { graph, report })
}

/// Writes one `u v [w]` line per edge using external labels. Isolated
/// vertices get a single-label line so that reloading preserves `n`.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> io::Result<()> {
    writeln!(out, "# vertices {} edges {}", graph.n(), graph.m())?;
    let weighted = graph.is_weighted();
    for v in 0..graph.n() as VertexId {
        if graph.degree(v) == 0 {
            writeln!(out, "{}", graph.label(v))?;
        }
    }
    for (u, v, w) in graph.edges() {
        if weighted {
            writeln!(out, "{} {} {}", graph.label(u), graph.label(v), w)?;
        } else {
            writeln!(out, "{} {}", graph.label(u), graph.label(v))?;
        }
    }
    out.flush()
}

/// Loads from `path`, or from standard input when `path` is `-`.
pub fn load_path(path: &Path, format: Option<Format>, opts: LoadOptions) -> Result<Loaded> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    if path.as_os_str() == "-" {
        let stdin = io::stdin();
        return load_reader(stdin.lock(), format, opts);
    }
    let file = File::open(path)?;
    load_reader(BufReader::with_capacity(1 << 20, file), format, opts)
}

pub fn load_reader<R: BufRead>(reader: R, format: Format, opts: LoadOptions) -> Result<Loaded> {
    match format {
        Format::MatrixMarket => read_matrix_market(reader, opts),
        Format::EdgeList => read_edge_list(reader, opts),
    }
}
