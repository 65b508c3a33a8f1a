//! Peel, expand the greedy set to its closed neighborhood, then solve exactly
//! on that core.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{densest_exact, ExactOptions};
use crate::graph::{DenseSet, Graph, InducedSubgraph, Source, VertexId};
use crate::peel::peel;

/// Default skip threshold on `|core| / |V|`.
pub const DEFAULT_SKIP_RATIO: f64 = 0.85;

#[derive(Debug, Clone)]
pub struct ExpansionResult {
    /// Sorted ids of the core, in the original graph.
    pub core_members: Vec<VertexId>,
    pub core: InducedSubgraph,
    pub elapsed_ms: f64,
}

impl ExpansionResult {
    pub fn core_graph(&self) -> &Graph {
        &self.core.graph
    }
}

fn seed_mask(graph: &Graph, s1: &[VertexId]) -> Result<Vec<bool>> {
    if s1.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    graph.membership(s1)
}

/// Marks `s1` and every neighbor of a vertex in `s1`.
fn closed_neighborhood(graph: &Graph, s1: &[VertexId], mask: &mut [bool]) -> usize {
    let mut size = mask.iter().filter(|&&b| b).count();
    for &u in s1 {
        for &v in graph.neighbors(u) {
            if !mask[v as usize] {
                mask[v as usize] = true;
                size += 1;
            }
        }
    }
    size
}

/// Size of `s1 ∪ N(s1)` without building the core.
pub fn predict_expansion_size(graph: &Graph, s1: &[VertexId]) -> Result<usize> {
    let mut mask = seed_mask(graph, s1)?;
    Ok(closed_neighborhood(graph, s1, &mut mask))
}

/// Builds the core: the subgraph induced by `s1` and all its neighbors.
pub fn expand(graph: &Graph, s1: &[VertexId]) -> Result<ExpansionResult> {
    let start = Instant::now();
    let mut mask = seed_mask(graph, s1)?;
    closed_neighborhood(graph, s1, &mut mask);
    let core = graph.induced_by_mask(&mask);
    Ok(ExpansionResult {
        core_members: core.original.clone(),
        core,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct HybridOptions {
    pub skip_ratio: f64,
    pub tolerance: Option<f64>,
    pub memory_budget: Option<usize>,
}

impl Default for HybridOptions {
    fn default() -> Self {
        HybridOptions {
            skip_ratio: DEFAULT_SKIP_RATIO,
            tolerance: None,
            memory_budget: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub peel_ms: f64,
    pub expand_ms: f64,
    pub exact_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HybridResult {
    pub best_set: DenseSet,
    /// Greedy answer from the peeling phase.
    pub greedy_set: DenseSet,
    pub times: PhaseTimes,
    /// Core size, known even when the later phases are skipped.
    pub core_size: usize,
    pub core_edges: Option<usize>,
    /// The core was too large; the greedy answer is returned.
    pub skipped: bool,
    /// The exact phase failed (memory budget); the greedy answer is returned.
    pub failed: bool,
    pub failure: Option<String>,
}

fn check_skip_ratio(opts: &HybridOptions) -> Result<()> {
    if !(opts.skip_ratio > 0.0 && opts.skip_ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "skip ratio {} not in (0, 1]",
            opts.skip_ratio
        )));
    }
    Ok(())
}

pub fn run_hybrid(graph: &Graph, opts: &HybridOptions) -> Result<HybridResult> {
    check_skip_ratio(opts)?;
    let start = Instant::now();
    let peeled = peel(graph)?;
    finish(graph, peeled.best_set, peeled.elapsed_ms, start, opts)
}

/// Expansion and exact phases starting from a given `seed` instead of the
/// peeling result. `greedy_set` then reports the seed itself.
pub fn run_hybrid_from(
    graph: &Graph,
    seed: &[VertexId],
    opts: &HybridOptions,
) -> Result<HybridResult> {
    check_skip_ratio(opts)?;
    if seed.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let start = Instant::now();
    let s1 = DenseSet::evaluate(graph, seed.to_vec(), Source::Greedy)?;
    finish(graph, s1, 0.0, start, opts)
}

fn finish(
    graph: &Graph,
    greedy: DenseSet,
    peel_ms: f64,
    start: Instant,
    opts: &HybridOptions,
) -> Result<HybridResult> {
    let predicted = predict_expansion_size(graph, &greedy.members)?;
    let mut result = HybridResult {
        best_set: greedy.clone().with_source(Source::Hybrid),
        greedy_set: greedy.clone(),
        times: PhaseTimes {
            peel_ms,
            expand_ms: 0.0,
            exact_ms: 0.0,
            total_ms: 0.0,
        },
        core_size: predicted,
        core_edges: None,
        skipped: false,
        failed: false,
        failure: None,
    };
    if predicted as f64 / graph.n() as f64 > opts.skip_ratio {
        result.skipped = true;
        result.times.total_ms = start.elapsed().as_secs_f64() * 1e3;
        return Ok(result);
    }

    let expansion = expand(graph, &greedy.members)?;
    result.times.expand_ms = expansion.elapsed_ms;
    result.core_edges = Some(expansion.core.graph.m());

    let core = &expansion.core;
    let seed: Vec<VertexId> = greedy
        .members
        .iter()
        .map(|&v| {
            core.to_local(v)
                .expect("greedy set lies inside its expansion")
        })
        .collect();
    let f_g = greedy.density.value();
    let exact_opts = ExactOptions {
        lower: Some(f_g),
        upper: Some(2.0 * f_g),
        tolerance: opts.tolerance,
        initial: Some(seed),
        memory_budget: opts.memory_budget,
    };
    let exact_start = Instant::now();
    match densest_exact(&core.graph, &exact_opts) {
        Ok(solved) => {
            let members = solved
                .best_set
                .members
                .iter()
                .map(|&v| core.to_parent(v))
                .collect();
            let lifted = DenseSet::evaluate(graph, members, Source::Hybrid)?;
            if lifted.density > result.best_set.density {
                result.best_set = lifted;
            }
        }
        Err(Error::MemoryBudget { required, budget }) => {
            result.failed = true;
            result.failure = Some(format!(
                "exact phase needs ~{required} bytes, budget {budget}"
            ));
        }
        Err(e) => return Err(e),
    }
    result.times.exact_ms = exact_start.elapsed().as_secs_f64() * 1e3;
    result.times.total_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(result)
}
