//! Greedy peeling: repeatedly delete a minimum-degree vertex and keep the
//! densest suffix of the deletion order.
//!
//! Unweighted graphs use [`DegreeLists`], which makes the whole peel
//! `O(n + m)`. Weighted graphs use a binary heap with lazy deletion.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DenseSet, Density, Graph, Source, VertexId, WeightKind};

const NIL: u32 = u32::MAX;

/// Live vertices bucketed by current degree.
///
/// Each bucket is a FIFO doubly linked list, so removal and re-insertion are
/// `O(1)`. Vertices enter in increasing id order and a vertex whose degree
/// drops is appended to the tail of its new bucket.
#[derive(Debug, Clone)]
pub struct DegreeLists {
    head: Vec<u32>,
    tail: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    degree: Vec<u32>,
    min_bucket: usize,
    live: usize,
    moves: u64,
}

impl DegreeLists {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.n();
        let buckets = graph.max_degree() + 1;
        let mut lists = DegreeLists {
            head: vec![NIL; buckets],
            tail: vec![NIL; buckets],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            degree: (0..n as VertexId).map(|v| graph.degree(v) as u32).collect(),
            min_bucket: 0,
            live: n,
            moves: 0,
        };
        for v in 0..n as u32 {
            lists.push_back(v);
        }
        lists
    }

    fn push_back(&mut self, v: u32) {
        let d = self.degree[v as usize] as usize;
        let t = self.tail[d];
        self.prev[v as usize] = t;
        self.next[v as usize] = NIL;
        if t == NIL {
            self.head[d] = v;
        } else {
            self.next[t as usize] = v;
        }
        self.tail[d] = v;
        self.moves += 1;
    }

    fn unlink(&mut self, v: u32) {
        let d = self.degree[v as usize] as usize;
        let (p, nx) = (self.prev[v as usize], self.next[v as usize]);
        if p == NIL {
            self.head[d] = nx;
        } else {
            self.next[p as usize] = nx;
        }
        if nx == NIL {
            self.tail[d] = p;
        } else {
            self.prev[nx as usize] = p;
        }
    }

    /// Removes and returns the head of the lowest nonempty bucket.
    pub fn pop_min(&mut self) -> Option<VertexId> {
        if self.live == 0 {
            return None;
        }
        while self.head[self.min_bucket] == NIL {
            self.min_bucket += 1;
        }
        let v = self.head[self.min_bucket];
        self.unlink(v);
        self.live -= 1;
        Some(v)
    }

    /// Moves a live vertex one bucket down.
    pub fn decrement(&mut self, v: VertexId) {
        self.unlink(v);
        self.degree[v as usize] -= 1;
        self.min_bucket = self.min_bucket.min(self.degree[v as usize] as usize);
        self.push_back(v);
    }

    pub fn degree(&self, v: VertexId) -> u32 {
        self.degree[v as usize]
    }

    pub fn live(&self) -> usize {
        self.live
    }

    /// Bucket insertions so far, including the initial fill.
    pub fn moves(&self) -> u64 {
        self.moves
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeelResult {
    /// Removal order; a permutation of all vertex ids.
    pub order: Vec<VertexId>,
    /// `best_set` is `order[best_suffix_start..]`.
    pub best_suffix_start: usize,
    pub best_set: DenseSet,
    pub elapsed_ms: f64,
    /// Degree-list insertions (unweighted) or heap pushes (weighted).
    pub moves: u64,
}

impl PeelResult {
    pub fn best_density(&self) -> Density {
        self.best_set.density
    }
}

/// Peels with degree lists (unweighted) or a heap (weighted).
pub fn peel(graph: &Graph) -> Result<PeelResult> {
    if graph.is_weighted() {
        peel_weighted(graph)
    } else {
        peel_unweighted(graph)
    }
}

/// Linear-time greedy peeling on an unweighted graph; weights, if any, are ignored.
pub fn peel_unweighted(graph: &Graph) -> Result<PeelResult> {
    let start = Instant::now();
    let n = graph.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut lists = DegreeLists::new(graph);
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut edges_left = graph.m() as u64;
    let mut best = Density::ratio(edges_left, n as u64);
    let mut best_start = 0usize;

    while let Some(u) = lists.pop_min() {
        let live_before = (n - order.len()) as u64;
        let here = Density::ratio(edges_left, live_before);
        if here > best {
            best = here;
            best_start = order.len();
        }
        removed[u as usize] = true;
        edges_left -= lists.degree(u) as u64;
        for &w in graph.neighbors(u) {
            if !removed[w as usize] {
                lists.decrement(w);
            }
        }
        order.push(u);
    }
    if graph.m() == 0 {
        best_start = n - 1;
        best = Density::ratio(0, 1);
    }
    let mut members = order[best_start..].to_vec();
    members.sort_unstable();
    Ok(PeelResult {
        best_set: DenseSet {
            members,
            density: best,
            source: Source::Greedy,
        },
        order,
        best_suffix_start: best_start,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        moves: lists.moves(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapKey {
    degree: f64,
    stamp: u64,
    vertex: VertexId,
}

impl Eq for HeapKey {}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .total_cmp(&other.degree)
            .then(self.stamp.cmp(&other.stamp))
    }
}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy peeling by minimum weighted degree.
///
/// Ties go to the vertex whose degree last changed earliest (initially the
/// lower id), which matches the FIFO buckets of [`peel_unweighted`]; unit
/// weights therefore reproduce the unweighted order exactly.
pub fn peel_weighted(graph: &Graph) -> Result<PeelResult> {
    let start = Instant::now();
    let n = graph.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let exact = !matches!(graph.weight_kind(), WeightKind::Real);
    let mut degree: Vec<f64> = (0..n as VertexId)
        .map(|v| graph.weighted_degree(v))
        .collect();
    let mut stamp: Vec<u64> = (0..n as u64).collect();
    let mut clock = n as u64;
    let mut heap: BinaryHeap<Reverse<HeapKey>> = (0..n)
        .map(|v| {
            Reverse(HeapKey {
                degree: degree[v],
                stamp: v as u64,
                vertex: v as VertexId,
            })
        })
        .collect();
    let mut pushes = n as u64;
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut weight_left = graph.total_weight();
    let suffix = |w: f64, live: usize| {
        if exact {
            Density::ratio(w.round() as u64, live as u64)
        } else {
            Density::Real {
                value: w / live as f64,
            }
        }
    };
    let mut best = suffix(weight_left, n);
    let mut best_start = 0usize;

    while let Some(Reverse(key)) = heap.pop() {
        let u = key.vertex;
        if removed[u as usize] || stamp[u as usize] != key.stamp {
            continue;
        }
        let here = suffix(weight_left, n - order.len());
        if here > best {
            best = here;
            best_start = order.len();
        }
        removed[u as usize] = true;
        weight_left -= degree[u as usize];
        for (w, wt) in graph.incident(u) {
            let wi = w as usize;
            if !removed[wi] {
                degree[wi] -= wt;
                stamp[wi] = clock;
                heap.push(Reverse(HeapKey {
                    degree: degree[wi],
                    stamp: clock,
                    vertex: w,
                }));
                clock += 1;
                pushes += 1;
            }
        }
        order.push(u);
    }
    if graph.m() == 0 {
        best_start = n - 1;
    }
    let best_set = DenseSet::evaluate(graph, order[best_start..].to_vec(), Source::Greedy)?;
    Ok(PeelResult {
        best_set,
        order,
        best_suffix_start: best_start,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        moves: pushes,
    })
}
