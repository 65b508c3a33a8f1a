//! Compressed undirected graph, vertex subsets and density evaluation.
//!
//! A [`Graph`] is immutable once built. Every undirected edge `{u, v}` is
//! stored twice, once in each endpoint's neighbor slice, and neighbor slices
//! are sorted by id. Graphs are simple: loops and duplicate edges are removed
//! by [`GraphBuilder`], which records what it removed in a [`LoadReport`].

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense 0-based vertex index.
pub type VertexId = u32;

/// Integer weights above this bound are treated as general reals so that
/// exact sums stay inside 64 bits.
const MAX_EXACT_WEIGHT: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// No weights; every edge counts 1.
    Unit,
    /// Every weight is a positive integer; `gcd` divides all of them.
    Integer {
        gcd: u64,
    },
    Real,
}

/// Density of a vertex set.
///
/// Unweighted and integer-weighted sets carry the exact ratio
/// `weight / vertices`, so ties compare without rounding.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    Ratio { weight: u64, vertices: u64 },
    Real { value: f64 },
}

impl Density {
    pub fn ratio(weight: u64, vertices: u64) -> Self {
        Density::Ratio { weight, vertices }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Density::Ratio { weight, vertices } => {
                if vertices == 0 {
                    0.0
                } else {
                    weight as f64 / vertices as f64
                }
            }
            Density::Real { value } => value,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Density::Ratio { .. })
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (*self, *other) {
            (
                Density::Ratio {
                    weight: a,
                    vertices: b,
                },
                Density::Ratio {
                    weight: c,
                    vertices: d,
                },
            ) => Some((a as u128 * d as u128).cmp(&(c as u128 * b as u128))),
            _ => self.value().partial_cmp(&other.value()),
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.value())
    }
}

/// Which algorithm produced a [`DenseSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Greedy,
    Hybrid,
    Exact,
    Oracle,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Source::Greedy => "greedy",
            Source::Hybrid => "hybrid",
            Source::Exact => "exact",
            Source::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

/// A nonempty vertex subset together with its recomputed density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseSet {
    /// Sorted, distinct vertex ids.
    pub members: Vec<VertexId>,
    pub density: Density,
    pub source: Source,
}

impl DenseSet {
    /// Builds a set and evaluates its density on `graph`. Duplicate ids are collapsed.
    pub fn evaluate(graph: &Graph, mut members: Vec<VertexId>, source: Source) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        let density = graph.set_density(&members)?;
        Ok(DenseSet {
            members,
            density,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }
}

/// Counts of what simplification removed while building a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub entries_read: usize,
    pub dropped_loops: usize,
    /// Repeated entries with the same orientation (pattern: deduplicated; weighted: summed).
    pub merged_duplicates: usize,
    /// Mirrored `(u,v)`/`(v,u)` pairs united into one undirected edge.
    pub symmetrized_pairs: usize,
}

/// How mirrored entries are interpreted while building.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// Each stored entry stands for the undirected edge; a mirrored entry is a duplicate.
    Symmetric,
    /// `(u,v)` and `(v,u)` are two arcs of the same undirected edge and get united.
    General,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    lo: VertexId,
    hi: VertexId,
    forward: bool,
    weight: f64,
}

/// Accumulates raw entries and produces a simple [`Graph`].
#[derive(Debug)]
pub struct GraphBuilder {
    n: usize,
    weighted: bool,
    symmetry: Symmetry,
    entries: Vec<Entry>,
    labels: Option<Vec<u64>>,
    report: LoadReport,
}

impl GraphBuilder {
    pub fn new(n: usize, weighted: bool, symmetry: Symmetry) -> Self {
        GraphBuilder {
            n,
            weighted,
            symmetry,
            entries: Vec::new(),
            labels: None,
            report: LoadReport::default(),
        }
    }

    pub fn with_capacity(mut self, entries: usize) -> Self {
        self.entries.reserve(entries);
        self
    }

    pub fn labels(mut self, labels: Vec<u64>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn set_labels(&mut self, labels: Vec<u64>) {
        self.labels = Some(labels);
    }

    /// Grows the vertex count; used by loaders that discover vertices as they go.
    pub fn ensure_vertices(&mut self, n: usize) {
        self.n = self.n.max(n);
    }

    /// Adds one entry. `weight` is ignored for unweighted builders.
    pub fn add(&mut self, u: VertexId, v: VertexId, weight: f64) -> Result<()> {
        for x in [u, v] {
            if x as usize >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: x as u64,
                    n: self.n,
                });
            }
        }
        if self.weighted && !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "edge ({u},{v}) has nonpositive weight {weight}"
            )));
        }
        self.report.entries_read += 1;
        if u == v {
            self.report.dropped_loops += 1;
            return Ok(());
        }
        let (lo, hi, forward) = if u < v { (u, v, true) } else { (v, u, false) };
        self.entries.push(Entry {
            lo,
            hi,
            forward,
            weight: if self.weighted { weight } else { 1.0 },
        });
        Ok(())
    }

    pub fn build(self) -> (Graph, LoadReport) {
        let GraphBuilder {
            n,
            weighted,
            symmetry,
            mut entries,
            labels,
            mut report,
        } = self;
        entries.sort_unstable_by(|a, b| {
            (a.lo, a.hi, a.forward)
                .cmp(&(b.lo, b.hi, b.forward))
                .then(a.weight.total_cmp(&b.weight))
        });

        let mut edges: Vec<(VertexId, VertexId)> = Vec::with_capacity(entries.len());
        let mut edge_weights: Vec<f64> = Vec::new();
        let mut i = 0;
        while i < entries.len() {
            let (lo, hi) = (entries[i].lo, entries[i].hi);
            let (mut fwd_count, mut bwd_count) = (0usize, 0usize);
            let (mut fwd_sum, mut bwd_sum) = (0.0f64, 0.0f64);
            while i < entries.len() && entries[i].lo == lo && entries[i].hi == hi {
                if entries[i].forward {
                    fwd_count += 1;
                    fwd_sum += entries[i].weight;
                } else {
                    bwd_count += 1;
                    bwd_sum += entries[i].weight;
                }
                i += 1;
            }
            let weight = match symmetry {
                Symmetry::Symmetric => {
                    report.merged_duplicates += fwd_count + bwd_count - 1;
                    fwd_sum + bwd_sum
                }
                Symmetry::General => {
                    report.merged_duplicates +=
                        fwd_count.saturating_sub(1) + bwd_count.saturating_sub(1);
                    if fwd_count > 0 && bwd_count > 0 {
                        report.symmetrized_pairs += 1;
                    }
                    fwd_sum.max(bwd_sum)
                }
            };
            edges.push((lo, hi));
            if weighted {
                edge_weights.push(weight);
            }
        }
        drop(entries);
        let weights = weighted.then_some(edge_weights);
        let graph = Graph::from_sorted_edges(n, &edges, weights.as_deref(), labels);
        (graph, report)
    }
}

/// Immutable simple undirected graph in compressed adjacency form.
#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    weights: Option<Vec<f64>>,
    total_weight: f64,
    m: usize,
    weight_kind: WeightKind,
    labels: Option<Vec<u64>>,
}

impl Graph {
    /// Builds from distinct `(lo, hi)` pairs with `lo < hi`, sorted lexicographically.
    fn from_sorted_edges(
        n: usize,
        edges: &[(VertexId, VertexId)],
        weights: Option<&[f64]>,
        labels: Option<Vec<u64>>,
    ) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0 as VertexId; 2 * edges.len()];
        let mut adj_weights = weights.map(|_| vec![0.0f64; 2 * edges.len()]);
        // Edges sorted by (lo, hi) fill every slice in increasing neighbor order.
        for (e, &(u, v)) in edges.iter().enumerate() {
            let (cu, cv) = (cursor[u as usize], cursor[v as usize]);
            neighbors[cu] = v;
            neighbors[cv] = u;
            if let (Some(aw), Some(w)) = (adj_weights.as_mut(), weights) {
                aw[cu] = w[e];
                aw[cv] = w[e];
            }
            cursor[u as usize] += 1;
            cursor[v as usize] += 1;
        }
        let (total_weight, weight_kind) = match weights {
            None => (edges.len() as f64, WeightKind::Unit),
            Some(w) => (w.iter().sum(), classify_weights(w)),
        };
        Graph {
            offsets,
            neighbors,
            weights: adj_weights,
            total_weight,
            m: edges.len(),
            weight_kind,
            labels,
        }
    }

    /// Unweighted graph from an edge list; loops and duplicates are removed.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n, false, Symmetry::General).with_capacity(edges.len());
        for &(u, v) in edges {
            b.add(u, v, 1.0)?;
        }
        Ok(b.build().0)
    }

    /// Weighted graph from an edge list; duplicate orientations are united.
    pub fn from_weighted_edges(n: usize, edges: &[(VertexId, VertexId, f64)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n, true, Symmetry::General).with_capacity(edges.len());
        for &(u, v, w) in edges {
            b.add(u, v, w)?;
        }
        Ok(b.build().0)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    /// Sum of edge weights (edge count when unweighted).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Exact integer total weight for unit or integer weights.
    pub fn total_weight_exact(&self) -> Option<u64> {
        match self.weight_kind {
            WeightKind::Unit => Some(self.m as u64),
            WeightKind::Integer { .. } => Some(self.total_weight as u64),
            WeightKind::Real => None,
        }
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Weights aligned with [`Graph::neighbors`], or `None` for unweighted graphs.
    #[inline]
    pub fn neighbor_weights(&self, v: VertexId) -> Option<&[f64]> {
        let v = v as usize;
        self.weights
            .as_ref()
            .map(|w| &w[self.offsets[v]..self.offsets[v + 1]])
    }

    /// `(neighbor, weight)` pairs of `v`.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        let ws = self.neighbor_weights(v);
        self.neighbors(v)
            .iter()
            .enumerate()
            .map(move |(i, &u)| (u, ws.map_or(1.0, |w| w[i])))
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn weighted_degree(&self, v: VertexId) -> f64 {
        match self.neighbor_weights(v) {
            Some(w) => w.iter().sum(),
            None => self.degree(v) as f64,
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n() as VertexId)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Every undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        (0..self.n() as VertexId).flat_map(move |u| {
            self.incident(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// External label of `v`: the file label it was loaded from, else its id.
    pub fn label(&self, v: VertexId) -> u64 {
        match &self.labels {
            Some(l) => l[v as usize],
            None => v as u64,
        }
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Density of the whole graph: `m / n`, or `total_weight / n`.
    pub fn density(&self) -> Result<Density> {
        let n = self.n();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(match self.total_weight_exact() {
            Some(w) => Density::ratio(w, n as u64),
            None => Density::Real {
                value: self.total_weight / n as f64,
            },
        })
    }

    /// Density of the subgraph induced by `members`, without materializing it.
    ///
    /// Repeated ids count once.
    pub fn set_density(&self, members: &[VertexId]) -> Result<Density> {
        if members.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mask = self.membership(members)?;
        let mut size = 0u64;
        let mut twice_int = 0u64;
        let mut twice_real = 0.0f64;
        for (v, _) in mask.iter().enumerate().filter(|(_, &b)| b) {
            size += 1;
            let v = v as VertexId;
            match self.neighbor_weights(v) {
                None => {
                    twice_int += self
                        .neighbors(v)
                        .iter()
                        .filter(|&&u| mask[u as usize])
                        .count() as u64;
                }
                Some(ws) => {
                    for (&u, &w) in self.neighbors(v).iter().zip(ws) {
                        if mask[u as usize] {
                            twice_real += w;
                        }
                    }
                }
            }
        }
        Ok(match self.weight_kind {
            WeightKind::Unit => Density::ratio(twice_int / 2, size),
            WeightKind::Integer { .. } => Density::ratio((twice_real / 2.0) as u64, size),
            WeightKind::Real => Density::Real {
                value: twice_real / 2.0 / size as f64,
            },
        })
    }

    /// Boolean membership array; rejects out-of-range ids.
    pub fn membership(&self, members: &[VertexId]) -> Result<Vec<bool>> {
        let n = self.n();
        let mut mask = vec![false; n];
        for &v in members {
            if v as usize >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: v as u64,
                    n,
                });
            }
            mask[v as usize] = true;
        }
        Ok(mask)
    }

    /// Subgraph induced by `members`. New ids follow increasing old id.
    pub fn induced_subgraph(&self, members: &[VertexId]) -> Result<InducedSubgraph> {
        if members.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mask = self.membership(members)?;
        Ok(self.induced_by_mask(&mask))
    }

    pub(crate) fn induced_by_mask(&self, mask: &[bool]) -> InducedSubgraph {
        let original: Vec<VertexId> = mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(v, _)| v as VertexId)
            .collect();
        let mut local = vec![VertexId::MAX; self.n()];
        for (i, &v) in original.iter().enumerate() {
            local[v as usize] = i as VertexId;
        }
        let mut edges = Vec::new();
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        for (i, &v) in original.iter().enumerate() {
            for (u, w) in self.incident(v) {
                let j = local[u as usize];
                if j != VertexId::MAX && (i as VertexId) < j {
                    edges.push((i as VertexId, j));
                    if let Some(ws) = weights.as_mut() {
                        ws.push(w);
                    }
                }
            }
        }
        let labels = original.iter().map(|&v| self.label(v)).collect();
        let graph =
            Graph::from_sorted_edges(original.len(), &edges, weights.as_deref(), Some(labels));
        InducedSubgraph { graph, original }
    }

    /// Checks symmetry, simplicity, sorted slices and positive weights.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.n();
        if self.offsets[n] != 2 * self.m {
            return Err(format!(
                "offsets[n] = {} != 2m = {}",
                self.offsets[n],
                2 * self.m
            ));
        }
        for v in 0..n as VertexId {
            let nb = self.neighbors(v);
            for (i, &u) in nb.iter().enumerate() {
                if u as usize >= n {
                    return Err(format!("neighbor {u} of {v} out of range"));
                }
                if u == v {
                    return Err(format!("self-loop at {v}"));
                }
                if i > 0 && nb[i - 1] >= u {
                    return Err(format!("neighbors of {v} not strictly increasing"));
                }
                let back = self.neighbors(u).binary_search(&v);
                let Ok(j) = back else {
                    return Err(format!("edge {v}->{u} has no mirror"));
                };
                if let (Some(wv), Some(wu)) = (self.neighbor_weights(v), self.neighbor_weights(u)) {
                    if wv[i] != wu[j] {
                        return Err(format!("weight mismatch on {{{v},{u}}}"));
                    }
                    if wv[i].is_nan() || wv[i] <= 0.0 {
                        return Err(format!("nonpositive weight on {{{v},{u}}}"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn classify_weights(weights: &[f64]) -> WeightKind {
    let mut gcd = 0u64;
    for &w in weights {
        if w.fract() != 0.0 || w > MAX_EXACT_WEIGHT {
            return WeightKind::Real;
        }
        gcd = gcd_u64(gcd, w as u64);
    }
    if weights.len() as f64 * MAX_EXACT_WEIGHT >= (1u64 << 62) as f64 {
        return WeightKind::Real;
    }
    WeightKind::Integer { gcd: gcd.max(1) }
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Result of [`Graph::induced_subgraph`].
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[new_id]` is the id in the parent graph; increasing.
    pub original: Vec<VertexId>,
}

impl InducedSubgraph {
    pub fn to_parent(&self, local: VertexId) -> VertexId {
        self.original[local as usize]
    }

    pub fn to_local(&self, parent: VertexId) -> Option<VertexId> {
        self.original
            .binary_search(&parent)
            .ok()
            .map(|i| i as VertexId)
    }
}
