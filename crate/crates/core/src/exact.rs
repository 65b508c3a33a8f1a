//! Exact densest subgraph by binary search over density guesses, each guess
//! decided by a minimum cut of the augmented network (see [`crate::flow`]).
//!
//! Unit and integer weights run on integer capacities: a guess `num / den`
//! scales every capacity by `den`, so each decision is exact. Guesses live
//! on a dyadic grid fine enough that once the search interval is narrower
//! than the density granularity `gcd / (n (n - 1))` the incumbent is
//! optimal. Whenever a cut produces a denser set, the next probe is placed
//! at that set's exact density; an empty cut there certifies it directly.
//!
//! Real weights use `f64` capacities and stop at a caller tolerance; those
//! results are not certified.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{build_augmented, estimate_network_bytes, max_flow_push_relabel, Capacity};
use crate::graph::{DenseSet, Density, Graph, Source, VertexId, WeightKind};

/// Default stopping width for real-weighted searches.
pub const DEFAULT_REAL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Default)]
pub struct ExactOptions {
    /// A density known to be achievable (at most the optimum).
    pub lower: Option<f64>,
    /// A density known to be at least the optimum.
    pub upper: Option<f64>,
    /// Stopping width for real weights; ignored for exact arithmetic.
    pub tolerance: Option<f64>,
    /// Starting incumbent; defaults to the whole vertex set.
    pub initial: Option<Vec<VertexId>>,
    /// Refuse to allocate a flow network above this many bytes.
    pub memory_budget: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactResult {
    pub best_set: DenseSet,
    /// Number of max-flow computations.
    pub iterations: usize,
    pub elapsed_ms: f64,
    /// The returned density is provably optimal.
    pub certified: bool,
}

/// Solves densest subgraph exactly (or to tolerance for real weights).
pub fn densest_exact(graph: &Graph, opts: &ExactOptions) -> Result<ExactResult> {
    let start = Instant::now();
    let n = graph.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if let (Some(lo), Some(hi)) = (opts.lower, opts.upper) {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "lower bound {lo} exceeds upper bound {hi}"
            )));
        }
    }
    if opts.lower.is_some_and(|l| l < 0.0) {
        return Err(Error::InvalidArgument("lower bound must be >= 0".into()));
    }
    if graph.m() == 0 || n == 1 {
        let best_set = DenseSet::evaluate(graph, vec![0], Source::Exact)?;
        return Ok(ExactResult {
            best_set,
            iterations: 0,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            certified: true,
        });
    }
    let initial = match &opts.initial {
        Some(s) if !s.is_empty() => s.clone(),
        _ => (0..n as VertexId).collect(),
    };
    let incumbent = DenseSet::evaluate(graph, initial, Source::Exact)?;
    let (best_set, iterations, certified) = match graph.weight_kind() {
        WeightKind::Unit | WeightKind::Integer { .. } => integer_search(graph, incumbent, opts)?,
        WeightKind::Real => real_search(graph, incumbent, opts)?,
    };
    Ok(ExactResult {
        best_set,
        iterations,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        certified,
    })
}

/// Largest weighted degree, an upper bound on twice any density.
fn max_weighted_degree(graph: &Graph) -> f64 {
    (0..graph.n() as VertexId)
        .map(|v| graph.weighted_degree(v))
        .fold(0.0, f64::max)
}

fn check_budget<C>(graph: &Graph, budget: Option<usize>) -> Result<()> {
    let required = estimate_network_bytes::<C>(graph);
    match budget {
        Some(budget) if required > budget => Err(Error::MemoryBudget { required, budget }),
        _ => Ok(()),
    }
}

/// Minimum-cut source side for the guess `num / den` on integer weights.
fn integer_cut(
    graph: &Graph,
    degrees: &[i128],
    total: i128,
    num: i128,
    den: i128,
    budget: Option<usize>,
) -> Result<Vec<VertexId>> {
    let n = graph.n() as i128;
    let arc_max = total
        .checked_mul(den)
        .and_then(|x| x.checked_add(2 * num))
        .ok_or_else(|| Error::InvalidArgument("capacity overflow".into()))?;
    let flow_max = arc_max
        .checked_mul(n + 2)
        .ok_or_else(|| Error::InvalidArgument("capacity overflow".into()))?;
    if flow_max < (i64::MAX / 4) as i128 {
        check_budget::<i64>(graph, budget)?;
        Ok(solve_cut::<i64>(
            graph,
            |x| x as i64,
            degrees,
            total,
            num,
            den,
        ))
    } else if flow_max < i128::MAX / 4 {
        check_budget::<i128>(graph, budget)?;
        Ok(solve_cut::<i128>(graph, |x| x, degrees, total, num, den))
    } else {
        Err(Error::InvalidArgument(
            "edge weights too large for exact capacities".into(),
        ))
    }
}

fn solve_cut<C: Capacity>(
    graph: &Graph,
    conv: impl Fn(i128) -> C,
    degrees: &[i128],
    total: i128,
    num: i128,
    den: i128,
) -> Vec<VertexId> {
    let source_cap = conv(total * den);
    let mut net = build_augmented(
        graph,
        source_cap,
        |w| conv(w as i128 * den),
        |v| conv(total * den + 2 * num - degrees[v as usize] * den),
    );
    max_flow_push_relabel(&mut net).source_side
}

/// `a / b > num / den` for nonnegative values.
fn ratio_exceeds(a: u64, b: u64, num: i128, den: i128) -> bool {
    a as i128 * den > num * b as i128
}

fn integer_search(
    graph: &Graph,
    mut incumbent: DenseSet,
    opts: &ExactOptions,
) -> Result<(DenseSet, usize, bool)> {
    let n = graph.n() as i128;
    let gcd = match graph.weight_kind() {
        WeightKind::Integer { gcd } => gcd as i128,
        _ => 1,
    };
    let total = graph.total_weight_exact().expect("integer weights") as i128;
    let degrees: Vec<i128> = (0..graph.n() as VertexId)
        .map(|v| graph.weighted_degree(v).round() as i128)
        .collect();
    // Grid step 1/grid is at most half the granularity gcd / (n (n - 1)).
    let pairs = n * (n - 1);
    let grid = (2 * pairs / gcd).max(2) as u128;
    let grid = grid.next_power_of_two() as i128;

    let ratio = |d: &Density| match *d {
        Density::Ratio { weight, vertices } => (weight, vertices),
        Density::Real { .. } => unreachable!("integer weights give exact densities"),
    };
    let (a, b) = ratio(&incumbent.density);
    let mut lo = a as i128 * grid / b as i128;
    if let Some(lower) = opts.lower {
        lo = lo.max((lower * grid as f64).floor() as i128 - 1);
    }
    let upper_default = (max_weighted_degree(graph) / 2.0).min(total as f64);
    let upper = opts.upper.unwrap_or(upper_default).min(total as f64);
    let mut hi = ((upper * grid as f64).ceil() as i128 + 1).max(lo);

    let mut iterations = 0usize;
    let mut probe_incumbent = false;
    loop {
        let (a, b) = ratio(&incumbent.density);
        let incumbent_reaches_lo = a as i128 * grid >= lo * b as i128;
        let narrow = (hi - lo) * pairs < gcd * grid;
        if narrow && incumbent_reaches_lo {
            return Ok((incumbent, iterations, true));
        }
        let (num, den, at_incumbent) = if probe_incumbent || narrow {
            (a as i128, b as i128, true)
        } else {
            ((lo + hi) / 2, grid, false)
        };
        iterations += 1;
        let side = integer_cut(graph, &degrees, total, num, den, opts.memory_budget)?;
        let found = if side.is_empty() {
            None
        } else {
            let set = DenseSet::evaluate(graph, side, Source::Exact)?;
            let (c, d) = ratio(&set.density);
            ratio_exceeds(c, d, num, den).then_some(set)
        };
        match found {
            Some(set) => {
                let (c, d) = ratio(&set.density);
                lo = lo.max(c as i128 * grid / d as i128);
                hi = hi.max(lo);
                incumbent = set;
                probe_incumbent = true;
            }
            None if at_incumbent => return Ok((incumbent, iterations, true)),
            None => {
                hi = num;
                probe_incumbent = false;
            }
        }
    }
}

fn real_cut(graph: &Graph, g: f64, budget: Option<usize>) -> Result<Vec<VertexId>> {
    check_budget::<f64>(graph, budget)?;
    let total = graph.total_weight();
    let mut net = build_augmented(
        graph,
        total,
        |w| w,
        |v| (total + 2.0 * g - graph.weighted_degree(v)).max(0.0),
    );
    net.set_epsilon(1e-9 * total.max(1.0));
    Ok(max_flow_push_relabel(&mut net).source_side)
}

fn real_search(
    graph: &Graph,
    mut incumbent: DenseSet,
    opts: &ExactOptions,
) -> Result<(DenseSet, usize, bool)> {
    let tol = opts.tolerance.unwrap_or(DEFAULT_REAL_TOLERANCE);
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let total = graph.total_weight();
    let slack = 1e-12 * total.max(1.0);
    let mut lo = incumbent.density.value().max(opts.lower.unwrap_or(0.0));
    let upper_default = (max_weighted_degree(graph) / 2.0).min(total);
    let mut hi = opts.upper.unwrap_or(upper_default).max(lo);
    let mut iterations = 0;
    let mut probe_incumbent = false;
    loop {
        let narrow = hi - lo < tol;
        let current = incumbent.density.value();
        if narrow && current >= lo - slack {
            return Ok((incumbent, iterations, false));
        }
        let (g, at_incumbent) = if probe_incumbent || narrow {
            (current, true)
        } else {
            (0.5 * (lo + hi), false)
        };
        iterations += 1;
        let side = real_cut(graph, g, opts.memory_budget)?;
        let found = if side.is_empty() {
            None
        } else {
            let set = DenseSet::evaluate(graph, side, Source::Exact)?;
            (set.density.value() > g + slack).then_some(set)
        };
        match found {
            Some(set) => {
                lo = lo.max(set.density.value());
                hi = hi.max(lo);
                incumbent = set;
                probe_incumbent = true;
            }
            None if at_incumbent => return Ok((incumbent, iterations, false)),
            None => {
                hi = g;
                probe_incumbent = false;
            }
        }
    }
}
