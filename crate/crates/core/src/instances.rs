//! Instance generators and an exhaustive oracle for small graphs.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::graph::{
    DenseSet, Density, Graph, GraphBuilder, Source, Symmetry, VertexId, WeightKind,
};

/// Largest graph [`brute_force_densest`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Hub `0` joined to spokes `1..=t`, plus `p` disjoint edges
/// `(t+2i-1, t+2i)` for `i = 1..=p`. Greedy peeling keeps the whole graph
/// here while the star alone is optimal.
pub fn gen_worstcase(t: usize, p: usize) -> Result<Graph> {
    if t < 1 || p < 1 {
        return Err(Error::InvalidArgument(format!(
            "worst-case family needs t >= 1 and p >= 1, got t={t}, p={p}"
        )));
    }
    let n = 1 + t + 2 * p;
    let mut edges = Vec::with_capacity(t + p);
    edges.extend((1..=t).map(|v| (0, v as VertexId)));
    edges.extend((1..=p).map(|i| ((t + 2 * i - 1) as VertexId, (t + 2 * i) as VertexId)));
    Graph::from_edges(n, &edges)
}

/// `f(star) / f(V) = t (1 + t + 2p) / ((t + p)(t + 1))`.
pub fn worstcase_ratio(t: usize, p: usize) -> f64 {
    let (t, p) = (t as f64, p as f64);
    t * (1.0 + t + 2.0 * p) / ((t + p) * (t + 1.0))
}

/// Edge weights for [`gen_random`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    None,
    /// Uniform real in `[lo, hi)`.
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Uniform integer in `[lo, hi]`.
    Integer {
        lo: u32,
        hi: u32,
    },
}

/// Uniform simple graph with exactly `m` edges.
///
/// Edges are drawn by rejection with a PCG-64 generator seeded from `seed`
/// (`rand_pcg::Pcg64::seed_from_u64`), so output depends only on the
/// arguments, not on the platform.
pub fn gen_random(n: usize, m: usize, seed: u64, weights: WeightSpec) -> Result<Graph> {
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_edges {
        return Err(Error::InfeasibleEdgeCount { n, m });
    }
    match weights {
        WeightSpec::Uniform { lo, hi } if !(lo > 0.0 && hi > lo && hi.is_finite()) => {
            return Err(Error::InvalidArgument(format!(
                "bad weight range [{lo}, {hi})"
            )));
        }
        WeightSpec::Integer { lo, hi } if lo == 0 || hi < lo => {
            return Err(Error::InvalidArgument(format!(
                "bad weight range [{lo}, {hi}]"
            )));
        }
        _ => {}
    }
    let mut rng = Pcg64::seed_from_u64(seed);
    let weighted = weights != WeightSpec::None;
    let mut builder = GraphBuilder::new(n, weighted, Symmetry::General).with_capacity(m);
    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(m);
    while seen.len() < m {
        let u = rng.random_range(0..n as u32);
        let v = rng.random_range(0..n as u32);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            continue;
        }
        let w = match weights {
            WeightSpec::None => 1.0,
            WeightSpec::Uniform { lo, hi } => rng.random_range(lo..hi),
            WeightSpec::Integer { lo, hi } => rng.random_range(lo..=hi) as f64,
        };
        builder.add(key.0, key.1, w)?;
    }
    Ok(builder.build().0)
}

/// The 12-vertex, 17-edge graph used to illustrate expansion, labeled 1..=12
/// (vertex id = label - 1). Its K4 is `{5, 6, 7, 8}`.
pub fn expansion_example() -> Graph {
    const EDGES: [(u64, u64); 17] = [
        (1, 2),
        (2, 5),
        (2, 3),
        (3, 6),
        (3, 4),
        (4, 7),
        (5, 8),
        (7, 8),
        (6, 7),
        (5, 6),
        (6, 8),
        (5, 7),
        (7, 9),
        (9, 10),
        (8, 10),
        (9, 11),
        (11, 12),
    ];
    let mut b = GraphBuilder::new(12, false, Symmetry::General).labels((1..=12).collect());
    for (u, v) in EDGES {
        b.add((u - 1) as VertexId, (v - 1) as VertexId, 1.0)
            .expect("labels are in range");
    }
    b.build().0
}

/// Exhaustive maximizer over all nonempty subsets (`n <= 20`). Ties go to
/// the smaller set, then to the lexicographically smaller member list.
pub fn brute_force_densest(graph: &Graph) -> Result<DenseSet> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let exact = graph.weight_kind() != WeightKind::Real;
    let adj: Vec<u32> = (0..n as VertexId)
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .fold(0u32, |acc, &u| acc | (1 << u))
        })
        .collect();
    // incident weights as (neighbor bit, weight) per vertex
    let incident: Vec<Vec<(u32, f64)>> = (0..n as VertexId)
        .map(|v| graph.incident(v).map(|(u, w)| (1u32 << u, w)).collect())
        .collect();

    let density_of = |mask: u32| -> Density {
        let k = mask.count_ones() as u64;
        if !graph.is_weighted() {
            let mut twice = 0u64;
            let mut rest = mask;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                twice += (adj[v] & mask).count_ones() as u64;
                rest &= rest - 1;
            }
            return Density::ratio(twice / 2, k);
        }
        let mut twice = 0.0;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            for &(bit, w) in &incident[v] {
                if mask & bit != 0 {
                    twice += w;
                }
            }
            rest &= rest - 1;
        }
        if exact {
            Density::ratio((twice / 2.0).round() as u64, k)
        } else {
            Density::Real {
                value: twice / 2.0 / k as f64,
            }
        }
    };

    let mut best_mask = 1u32;
    let mut best = density_of(best_mask);
    for mask in 2..(1u64 << n) as u32 {
        let d = density_of(mask);
        let better = if d > best {
            true
        } else if d == best {
            let (a, b) = (mask.count_ones(), best_mask.count_ones());
            // lexicographically smaller sorted list owns the lowest differing bit
            let diff = mask ^ best_mask;
            a < b || (a == b && mask & diff & diff.wrapping_neg() != 0)
        } else {
            false
        };
        if better {
            best = d;
            best_mask = mask;
        }
    }
    let members = (0..n as u32)
        .filter(|v| best_mask & (1 << v) != 0)
        .collect();
    DenseSet::evaluate(graph, members, Source::Oracle)
}
