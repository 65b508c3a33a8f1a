//! Goldberg's augmented network and a push-relabel max-flow / min-cut solver.
//!
//! For a density guess `g` the network has a source `s`, a sink `t` and one
//! node per vertex. With `W` the total edge weight and `d(v)` the weighted
//! degree, arcs are `s -> v` (capacity `W`), `u <-> v` for every edge
//! (capacity `w_e` each way) and `v -> t` (capacity `W + 2g - d(v)`). A cut
//! whose source side holds the vertex set `S` costs
//! `n W + 2 (g |S| - w(E(S)))`, so a nonempty minimum cut exists exactly
//! when some set is denser than `g`.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Arc capacity arithmetic used by the solver.
pub trait Capacity:
    Copy
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    const ZERO: Self;
    fn min_of(self, other: Self) -> Self;
    fn to_f64(self) -> f64;
}

macro_rules! int_capacity {
    ($($t:ty),*) => {$(
        impl Capacity for $t {
            const ZERO: Self = 0;
            #[inline]
            fn min_of(self, other: Self) -> Self { self.min(other) }
            #[inline]
            fn to_f64(self) -> f64 { self as f64 }
        }
    )*};
}
int_capacity!(i64, i128);

impl Capacity for f64 {
    const ZERO: Self = 0.0;
    #[inline]
    fn min_of(self, other: Self) -> Self {
        self.min(other)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

/// Residual network in compressed form; every arc is paired with its reverse.
#[derive(Debug, Clone)]
pub struct FlowNetwork<C> {
    first: Vec<u32>,
    head: Vec<u32>,
    rev: Vec<u32>,
    cap: Vec<C>,
    source: usize,
    sink: usize,
    /// Residuals at or below this value count as saturated (zero for integers).
    eps: C,
}

/// Minimum cut read off a maximum flow.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult<C> {
    pub flow_value: C,
    /// Vertices reachable from the source in the final residual network.
    pub source_side: Vec<VertexId>,
}

impl<C: Capacity> FlowNetwork<C> {
    /// Arbitrary network from `(from, to, capacity)` arcs; each gets a
    /// zero-capacity reverse.
    pub fn from_arcs(nodes: usize, source: usize, sink: usize, arcs: &[(usize, usize, C)]) -> Self {
        let mut deg = vec![0u32; nodes + 1];
        for &(u, v, _) in arcs {
            deg[u + 1] += 1;
            deg[v + 1] += 1;
        }
        for i in 0..nodes {
            deg[i + 1] += deg[i];
        }
        let total = deg[nodes] as usize;
        let mut cursor = deg[..nodes].to_vec();
        let mut head = vec![0u32; total];
        let mut rev = vec![0u32; total];
        let mut cap = vec![C::ZERO; total];
        for &(u, v, c) in arcs {
            let a = cursor[u] as usize;
            cursor[u] += 1;
            let b = cursor[v] as usize;
            cursor[v] += 1;
            head[a] = v as u32;
            head[b] = u as u32;
            rev[a] = b as u32;
            rev[b] = a as u32;
            cap[a] = c;
        }
        FlowNetwork {
            first: deg,
            head,
            rev,
            cap,
            source,
            sink,
            eps: C::ZERO,
        }
    }

    pub fn node_count(&self) -> usize {
        self.first.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.head.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn set_epsilon(&mut self, eps: C) {
        self.eps = eps;
    }

    /// `(to, residual capacity)` of every arc leaving `node`.
    pub fn arcs(&self, node: usize) -> impl Iterator<Item = (usize, C)> + '_ {
        let (a, b) = (self.first[node] as usize, self.first[node + 1] as usize);
        (a..b).map(move |i| (self.head[i] as usize, self.cap[i]))
    }

    /// Residual capacity summed over parallel arcs `from -> to`.
    pub fn capacity_between(&self, from: usize, to: usize) -> C {
        let mut c = C::ZERO;
        for (h, cap) in self.arcs(from) {
            if h == to {
                c += cap;
            }
        }
        c
    }

    /// Every arc's residual plus its partner's residual; constant under pushes.
    pub fn pair_sums(&self) -> Vec<C> {
        (0..self.head.len())
            .map(|a| self.cap[a] + self.cap[self.rev[a] as usize])
            .collect()
    }

    /// Nodes reachable from the source through arcs with positive residual.
    fn reachable_from_source(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::new();
        seen[self.source] = true;
        queue.push_back(self.source);
        while let Some(u) = queue.pop_front() {
            for a in self.first[u] as usize..self.first[u + 1] as usize {
                let v = self.head[a] as usize;
                if !seen[v] && self.cap[a] > self.eps {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

/// Bytes the augmented network for `graph` needs with capacity type `C`.
pub fn estimate_network_bytes<C>(graph: &Graph) -> usize {
    let nodes = graph.n() + 2;
    let arcs = 2 * graph.m() + 4 * graph.n();
    arcs * (8 + std::mem::size_of::<C>()) + nodes * (4 * 8 + std::mem::size_of::<C>())
}

/// Builds the augmented network with caller-scaled capacities.
///
/// `source_cap` goes on every `s -> v`, `edge_cap(w)` on both directions of
/// each edge, and `sink_cap(v)` on `v -> t`. Vertex `v` is node `v`; the
/// source is node `n` and the sink node `n + 1`.
pub fn build_augmented<C: Capacity>(
    graph: &Graph,
    source_cap: C,
    edge_cap: impl Fn(f64) -> C,
    sink_cap: impl Fn(VertexId) -> C,
) -> FlowNetwork<C> {
    let n = graph.n();
    let m = graph.m();
    let (source, sink) = (n, n + 1);
    // vertex v owns [back-to-source, edge arcs..., to-sink]
    let mut first = Vec::with_capacity(n + 3);
    let mut off = 0u32;
    for v in 0..n as VertexId {
        first.push(off);
        off += graph.degree(v) as u32 + 2;
    }
    first.push(off);
    off += n as u32;
    first.push(off);
    off += n as u32;
    first.push(off);
    let total = off as usize;
    debug_assert_eq!(total, 2 * m + 4 * n);

    let mut head = vec![0u32; total];
    let mut rev = vec![0u32; total];
    let mut cap = vec![C::ZERO; total];
    let s_base = first[n] as usize;
    let t_base = first[n + 1] as usize;
    // Position of u inside v's slice for v > u, consumed in increasing u.
    let mut low_cursor = vec![0u32; n];
    for v in 0..n as VertexId {
        let vi = v as usize;
        let base = first[vi] as usize;
        let deg = graph.degree(v);
        // back-to-source arc and its forward partner
        head[base] = source as u32;
        rev[base] = (s_base + vi) as u32;
        head[s_base + vi] = v;
        rev[s_base + vi] = base as u32;
        cap[s_base + vi] = source_cap;
        // to-sink arc and its reverse
        let to_t = base + deg + 1;
        head[to_t] = sink as u32;
        rev[to_t] = (t_base + vi) as u32;
        cap[to_t] = sink_cap(v);
        head[t_base + vi] = v;
        rev[t_base + vi] = to_t as u32;

        for (i, (u, w)) in graph.incident(v).enumerate() {
            let a = base + 1 + i;
            head[a] = u;
            cap[a] = edge_cap(w);
            if u > v {
                let ui = u as usize;
                let j = low_cursor[ui] as usize;
                low_cursor[ui] += 1;
                debug_assert_eq!(graph.neighbors(u)[j], v);
                let b = first[ui] as usize + 1 + j;
                rev[a] = b as u32;
                rev[b] = a as u32;
            }
        }
    }
    FlowNetwork {
        first,
        head,
        rev,
        cap,
        source,
        sink,
        eps: C::ZERO,
    }
}

/// Augmented network for a real density guess `g`.
pub fn build_goldberg_network(graph: &Graph, g: f64) -> Result<FlowNetwork<f64>> {
    if g.is_nan() || g < 0.0 || g.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "density guess {g} must be >= 0"
        )));
    }
    let total = graph.total_weight();
    let mut net = build_augmented(
        graph,
        total,
        |w| w,
        |v| (total + 2.0 * g - graph.weighted_degree(v)).max(0.0),
    );
    net.set_epsilon(1e-9 * total.max(1.0));
    Ok(net)
}

const NONE: u32 = u32::MAX;

struct PushRelabel<'a, C: Capacity> {
    net: &'a mut FlowNetwork<C>,
    nodes: usize,
    height: Vec<u32>,
    excess: Vec<C>,
    current: Vec<u32>,
    // active nodes per height (stacks), heights below `nodes` only
    active_head: Vec<u32>,
    active_next: Vec<u32>,
    // all nodes per height below `nodes`, doubly linked, for the gap test
    layer_head: Vec<u32>,
    layer_next: Vec<u32>,
    layer_prev: Vec<u32>,
    max_active: usize,
    max_layer: usize,
    relabels: usize,
}

impl<'a, C: Capacity> PushRelabel<'a, C> {
    fn new(net: &'a mut FlowNetwork<C>) -> Self {
        let nodes = net.node_count();
        PushRelabel {
            nodes,
            height: vec![0; nodes],
            excess: vec![C::ZERO; nodes],
            current: net.first[..nodes].to_vec(),
            active_head: vec![NONE; nodes],
            active_next: vec![NONE; nodes],
            layer_head: vec![NONE; nodes],
            layer_next: vec![NONE; nodes],
            layer_prev: vec![NONE; nodes],
            max_active: 0,
            max_layer: 0,
            relabels: 0,
            net,
        }
    }

    #[inline]
    fn is_active(&self, v: usize) -> bool {
        v != self.net.source && v != self.net.sink && self.excess[v] > self.net.eps
    }

    fn push_active(&mut self, v: usize) {
        let h = self.height[v] as usize;
        self.active_next[v] = self.active_head[h];
        self.active_head[h] = v as u32;
        self.max_active = self.max_active.max(h);
    }

    fn layer_insert(&mut self, v: usize) {
        let h = self.height[v] as usize;
        let old = self.layer_head[h];
        self.layer_prev[v] = NONE;
        self.layer_next[v] = old;
        if old != NONE {
            self.layer_prev[old as usize] = v as u32;
        }
        self.layer_head[h] = v as u32;
        self.max_layer = self.max_layer.max(h);
    }

    fn layer_remove(&mut self, v: usize) {
        let h = self.height[v] as usize;
        let (p, nx) = (self.layer_prev[v], self.layer_next[v]);
        if p == NONE {
            self.layer_head[h] = nx;
        } else {
            self.layer_next[p as usize] = nx;
        }
        if nx != NONE {
            self.layer_prev[nx as usize] = p;
        }
    }

    /// Exact distances to the sink; nodes that cannot reach it go above the source.
    fn global_relabel(&mut self) {
        let n = self.nodes;
        let (s, t) = (self.net.source, self.net.sink);
        let above = n as u32 + 1;
        self.height.iter_mut().for_each(|h| *h = u32::MAX);
        self.height[t] = 0;
        self.height[s] = n as u32;
        let mut queue = VecDeque::new();
        queue.push_back(t);
        while let Some(x) = queue.pop_front() {
            let hx = self.height[x];
            for a in self.net.first[x] as usize..self.net.first[x + 1] as usize {
                let y = self.net.head[a] as usize;
                let back = self.net.rev[a] as usize;
                if self.height[y] == u32::MAX && self.net.cap[back] > self.net.eps {
                    self.height[y] = hx + 1;
                    queue.push_back(y);
                }
            }
        }
        self.active_head.iter_mut().for_each(|h| *h = NONE);
        self.layer_head.iter_mut().for_each(|h| *h = NONE);
        self.max_active = 0;
        self.max_layer = 0;
        for v in 0..n {
            if self.height[v] == u32::MAX {
                self.height[v] = above;
            }
            self.current[v] = self.net.first[v];
            if v == s || v == t || self.height[v] as usize >= n {
                continue;
            }
            self.layer_insert(v);
            if self.is_active(v) {
                self.push_active(v);
            }
        }
        self.relabels = 0;
    }

    /// Pushes along arc `a`; returns the head if it just became active.
    fn push(&mut self, u: usize, a: usize) -> Option<usize> {
        let v = self.net.head[a] as usize;
        let delta = self.excess[u].min_of(self.net.cap[a]);
        let was_active = self.is_active(v);
        self.net.cap[a] -= delta;
        let back = self.net.rev[a] as usize;
        self.net.cap[back] += delta;
        self.excess[u] -= delta;
        self.excess[v] += delta;
        (!was_active && self.is_active(v)).then_some(v)
    }

    /// First phase: move as much excess as possible to the sink.
    fn discharge_to_sink(&mut self, u: usize) {
        let n = self.nodes;
        loop {
            let end = self.net.first[u + 1] as usize;
            let mut a = self.current[u] as usize;
            let hu = self.height[u];
            while a < end {
                let v = self.net.head[a] as usize;
                if self.net.cap[a] > self.net.eps && hu == self.height[v] + 1 {
                    if let Some(v) = self.push(u, a) {
                        if (self.height[v] as usize) < n {
                            self.push_active(v);
                        }
                    }
                    if self.excess[u] <= self.net.eps {
                        self.current[u] = a as u32;
                        return;
                    }
                }
                a += 1;
            }
            // relabel, with the gap heuristic
            let old = hu as usize;
            self.layer_remove(u);
            if self.layer_head[old] == NONE {
                for k in old + 1..=self.max_layer {
                    let mut x = self.layer_head[k];
                    while x != NONE {
                        self.height[x as usize] = n as u32 + 1;
                        x = self.layer_next[x as usize];
                    }
                    self.layer_head[k] = NONE;
                    self.active_head[k] = NONE;
                }
                self.max_layer = old.saturating_sub(1);
                self.height[u] = n as u32 + 1;
                return;
            }
            let mut best = u32::MAX;
            for b in self.net.first[u] as usize..end {
                if self.net.cap[b] > self.net.eps {
                    best = best.min(self.height[self.net.head[b] as usize]);
                }
            }
            self.relabels += 1;
            self.current[u] = self.net.first[u];
            if best == u32::MAX || best as usize + 1 >= n {
                self.height[u] = best.saturating_add(1);
                return;
            }
            self.height[u] = best + 1;
            self.layer_insert(u);
        }
    }

    fn run_to_sink(&mut self) {
        self.global_relabel();
        loop {
            if self.relabels >= self.nodes {
                self.global_relabel();
            }
            while self.max_active > 0 && self.active_head[self.max_active] == NONE {
                self.max_active -= 1;
            }
            let h = self.max_active;
            let u = self.active_head[h];
            if u == NONE {
                break;
            }
            let u = u as usize;
            self.active_head[h] = self.active_next[u];
            if self.height[u] as usize != h || !self.is_active(u) {
                continue;
            }
            self.discharge_to_sink(u);
        }
    }

    /// Second phase: excess stranded above the source flows back to it.
    fn return_to_source(&mut self) {
        let n = self.nodes;
        let (s, t) = (self.net.source, self.net.sink);
        // distances to the source among nodes that cannot reach the sink
        let mut queue = VecDeque::new();
        for v in 0..n {
            if v != s && v != t && self.height[v] as usize >= n {
                self.height[v] = u32::MAX;
            }
        }
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            let hx = self.height[x];
            for a in self.net.first[x] as usize..self.net.first[x + 1] as usize {
                let y = self.net.head[a] as usize;
                let back = self.net.rev[a] as usize;
                if self.height[y] == u32::MAX && self.net.cap[back] > self.net.eps {
                    self.height[y] = hx + 1;
                    queue.push_back(y);
                }
            }
        }
        let mut fifo: VecDeque<usize> = VecDeque::new();
        for v in 0..n {
            if self.height[v] == u32::MAX {
                self.height[v] = 2 * n as u32;
            }
            self.current[v] = self.net.first[v];
            if self.is_active(v) {
                fifo.push_back(v);
            }
        }
        while let Some(u) = fifo.pop_front() {
            while self.is_active(u) {
                let end = self.net.first[u + 1] as usize;
                let mut a = self.current[u] as usize;
                let hu = self.height[u];
                let mut pushed_out = false;
                while a < end {
                    let v = self.net.head[a] as usize;
                    if self.net.cap[a] > self.net.eps && hu == self.height[v].saturating_add(1) {
                        if let Some(v) = self.push(u, a) {
                            fifo.push_back(v);
                        }
                        if !self.is_active(u) {
                            pushed_out = true;
                            break;
                        }
                    }
                    a += 1;
                }
                if pushed_out {
                    self.current[u] = a as u32;
                    break;
                }
                let mut best = u32::MAX;
                for b in self.net.first[u] as usize..end {
                    if self.net.cap[b] > self.net.eps {
                        best = best.min(self.height[self.net.head[b] as usize]);
                    }
                }
                debug_assert!(best != u32::MAX, "excess node without residual arcs");
                self.height[u] = best.saturating_add(1);
                self.current[u] = self.net.first[u];
            }
        }
    }
}

/// Maximum flow from source to sink; the cut is read from residual
/// reachability, so `source_side` is the inclusion-minimal minimum cut.
/// The network is left holding the final residual capacities.
pub fn max_flow_push_relabel<C: Capacity>(net: &mut FlowNetwork<C>) -> CutResult<C> {
    let (s, t) = (net.source, net.sink);
    let vertex_nodes = net.node_count().saturating_sub(2);
    {
        let mut pr = PushRelabel::new(net);
        for a in pr.net.first[s] as usize..pr.net.first[s + 1] as usize {
            let c = pr.net.cap[a];
            if c > C::ZERO {
                let v = pr.net.head[a] as usize;
                pr.net.cap[a] = C::ZERO;
                let back = pr.net.rev[a] as usize;
                pr.net.cap[back] += c;
                pr.excess[v] += c;
                pr.excess[s] -= c;
            }
        }
        pr.run_to_sink();
        pr.return_to_source();
        let flow_value = pr.excess[t];
        let seen = pr.net.reachable_from_source();
        let source_side = (0..pr.nodes)
            .filter(|&v| v != s && v != t && seen[v] && v < vertex_nodes)
            .map(|v| v as VertexId)
            .collect();
        CutResult {
            flow_value,
            source_side,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::from_arcs(2, 0, 1, &[(0, 1, 7i64)]);
        let cut = max_flow_push_relabel(&mut net);
        assert_eq!(cut.flow_value, 7);
        assert!(cut.source_side.is_empty());
    }

    #[test]
    fn classic_network() {
        // s=0, t=5; textbook CLRS instance with max flow 23
        let arcs = [
            (0, 1, 16i64),
            (0, 2, 13),
            (1, 2, 10),
            (2, 1, 4),
            (1, 3, 12),
            (3, 2, 9),
            (2, 4, 14),
            (4, 3, 7),
            (3, 5, 20),
            (4, 5, 4),
        ];
        let mut net = FlowNetwork::from_arcs(6, 0, 5, &arcs);
        let before = net.pair_sums();
        let cut = max_flow_push_relabel(&mut net);
        assert_eq!(cut.flow_value, 23);
        assert_eq!(net.pair_sums(), before);
    }

    #[test]
    fn triangle_network_capacities() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let net = build_goldberg_network(&g, 0.0).unwrap();
        assert_eq!(net.node_count(), 5);
        let (s, t) = (net.source(), net.sink());
        for v in 0..3 {
            assert_eq!(net.capacity_between(s, v), 3.0);
            assert_eq!(net.capacity_between(v, t), 1.0);
        }
        assert_eq!(net.capacity_between(0, 1), 1.0);
        assert_eq!(net.capacity_between(1, 0), 1.0);
        assert_eq!(net.arc_count(), 2 * 3 + 4 * 3);
    }

    #[test]
    fn single_edge_network_capacities() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let net = build_goldberg_network(&g, 1.0).unwrap();
        assert_eq!(net.capacity_between(net.source(), 0), 1.0);
        assert_eq!(net.capacity_between(0, net.sink()), 2.0);
        assert_eq!(net.capacity_between(1, net.sink()), 2.0);
    }

    #[test]
    fn weighted_edge_network_capacities() {
        let g = Graph::from_weighted_edges(2, &[(0, 1, 5.0)]).unwrap();
        let net = build_goldberg_network(&g, 2.0).unwrap();
        assert_eq!(net.capacity_between(net.source(), 1), 5.0);
        assert_eq!(net.capacity_between(1, net.sink()), 4.0);
        assert_eq!(net.capacity_between(0, 1), 5.0);
    }

    #[test]
    fn negative_guess_rejected() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(build_goldberg_network(&g, -1.0).is_err());
        assert!(build_goldberg_network(&g, f64::NAN).is_err());
    }

    #[test]
    fn triangle_at_optimum_is_degenerate() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut net = build_goldberg_network(&g, 1.0).unwrap();
        let cut = max_flow_push_relabel(&mut net);
        assert_eq!(cut.flow_value, 9.0);
        assert!(cut.source_side.is_empty());
    }

    #[test]
    fn triangle_below_optimum_cuts_everything() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut net = build_goldberg_network(&g, 0.5).unwrap();
        let cut = max_flow_push_relabel(&mut net);
        assert_eq!(cut.source_side, vec![0, 1, 2]);
        // n W + 2 (g |S| - |E(S)|) = 9 + 2 (1.5 - 3)
        assert!((cut.flow_value - 6.0).abs() < 1e-9);
    }
}
