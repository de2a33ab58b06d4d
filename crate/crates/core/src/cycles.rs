//! Weighted girth, shortest cycles through an edge, systolic-basis detection
//! and a brute-force closed-walk oracle for the stable norm.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedMultigraph;
use crate::linalg;
use crate::scalar::Scalar;

/// Partial-path cap for the per-vertex systolic-cycle enumeration.
pub const BASIS_SEARCH_CAP: usize = 1_000_000;

/// One traversal of an edge; `forward` follows the reference orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Traversal {
    pub edge: usize,
    pub forward: bool,
}

impl Traversal {
    fn tail<T>(&self, g: &WeightedMultigraph<T>) -> usize {
        let e = &g.edges()[self.edge];
        if self.forward {
            e.u
        } else {
            e.v
        }
    }

    fn head<T>(&self, g: &WeightedMultigraph<T>) -> usize {
        let e = &g.edges()[self.edge];
        if self.forward {
            e.v
        } else {
            e.u
        }
    }
}

/// A closed edge walk with its length and integral homology class.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleWitness<T> {
    pub traversals: Vec<Traversal>,
    pub length: T,
    /// Signed traversal count per edge.
    pub class: Vec<i64>,
}

impl<T: Scalar> CycleWitness<T> {
    pub fn from_traversals(g: &WeightedMultigraph<T>, weights: &[T], traversals: Vec<Traversal>) -> Self {
        let mut class = vec![0i64; g.edge_count()];
        let mut length = T::zero();
        for t in &traversals {
            class[t.edge] += if t.forward { 1 } else { -1 };
            length = length + weights[t.edge];
        }
        Self {
            traversals,
            length,
            class,
        }
    }

    /// Edge ids in traversal order, `-` prefixed when traversed against orientation.
    pub fn edge_ids(&self, g: &WeightedMultigraph<T>) -> Vec<String> {
        self.traversals
            .iter()
            .map(|t| {
                let id = &g.edge(t.edge).id;
                if t.forward {
                    id.clone()
                } else {
                    format!("-{id}")
                }
            })
            .collect()
    }

    /// Number of times each edge is used, ignoring direction.
    pub fn incidence(&self, edge_count: usize) -> Vec<u32> {
        let mut out = vec![0u32; edge_count];
        for t in &self.traversals {
            out[t.edge] += 1;
        }
        out
    }

    pub fn is_closed(&self, g: &WeightedMultigraph<T>) -> bool {
        match (self.traversals.first(), self.traversals.last()) {
            (Some(first), Some(last)) => {
                first.tail(g) == last.head(g)
                    && self.traversals.windows(2).all(|w| w[0].head(g) == w[1].tail(g))
            }
            _ => false,
        }
    }

    /// No immediate reversal, including across the closing point.
    pub fn is_reduced(&self) -> bool {
        let n = self.traversals.len();
        if n == 1 {
            return true;
        }
        (0..n).all(|i| {
            let a = self.traversals[i];
            let b = self.traversals[(i + 1) % n];
            !(a.edge == b.edge && a.forward != b.forward)
        })
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem<T> {
    dist: T,
    vertex: usize,
}

impl<T: Scalar> Eq for HeapItem<T> {}

impl<T: Scalar> Ord for HeapItem<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl<T: Scalar> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `src` to `dst` ignoring edge `skip`. Ties keep the
/// predecessor edge with the smaller index.
fn shortest_path<T: Scalar>(
    g: &WeightedMultigraph<T>,
    weights: &[T],
    src: usize,
    dst: usize,
    skip: usize,
) -> Option<(T, Vec<Traversal>)> {
    let n = g.vertex_count();
    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut pred: Vec<Option<Traversal>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = Some(T::zero());
    heap.push(HeapItem {
        dist: T::zero(),
        vertex: src,
    });
    while let Some(HeapItem { dist: d, vertex: x }) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        if x == dst {
            break;
        }
        for inc in g.incidences(x) {
            if inc.edge == skip || done[inc.to] {
                continue;
            }
            let cand = d + weights[inc.edge];
            let better = match (dist[inc.to], pred[inc.to]) {
                (None, _) => true,
                (Some(old), Some(p)) => cand < old || (cand == old && inc.edge < p.edge),
                (Some(old), None) => cand < old,
            };
            if better {
                dist[inc.to] = Some(cand);
                pred[inc.to] = Some(Traversal {
                    edge: inc.edge,
                    forward: inc.forward,
                });
                heap.push(HeapItem {
                    dist: cand,
                    vertex: inc.to,
                });
            }
        }
    }
    let total = dist[dst]?;
    let mut path = Vec::new();
    let mut at = dst;
    while at != src {
        let t = pred[at]?;
        path.push(t);
        at = t.tail(g);
    }
    path.reverse();
    Some((total, path))
}

fn check_weights<T: Scalar>(g: &WeightedMultigraph<T>, weights: &[T]) -> Result<()> {
    if weights.len() != g.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: g.edge_count(),
            got: weights.len(),
        });
    }
    if let Some(i) = weights.iter().position(|&w| !(w >= T::zero() && w.is_finite())) {
        return Err(Error::NonPositiveWeight(g.edge(i).id.clone()));
    }
    Ok(())
}

/// Shortest reduced cycle containing edge `edge` under `weights` (which may be zero).
pub fn shortest_cycle_through_edge<T: Scalar>(
    g: &WeightedMultigraph<T>,
    weights: &[T],
    edge: usize,
) -> Result<CycleWitness<T>> {
    check_weights(g, weights)?;
    let e = g
        .edges()
        .get(edge)
        .ok_or_else(|| Error::UnknownEdge(format!("#{edge}")))?;
    let first = Traversal { edge, forward: true };
    if e.is_loop() {
        return Ok(CycleWitness::from_traversals(g, weights, vec![first]));
    }
    let (_, path) =
        shortest_path(g, weights, e.v, e.u, edge).ok_or_else(|| Error::NoCycleThroughEdge(e.id.clone()))?;
    let mut traversals = vec![first];
    traversals.extend(path);
    Ok(CycleWitness::from_traversals(g, weights, traversals))
}

/// Weighted girth under `weights` (zeros allowed): minimum over edges of the
/// shortest cycle through that edge. Earlier edges win ties.
pub fn systole_under<T: Scalar>(g: &WeightedMultigraph<T>, weights: &[T]) -> Result<CycleWitness<T>> {
    check_weights(g, weights)?;
    let mut best: Option<CycleWitness<T>> = None;
    for e in 0..g.edge_count() {
        match shortest_cycle_through_edge(g, weights, e) {
            Ok(c) => {
                if best.as_ref().is_none_or(|b| c.length < b.length) {
                    best = Some(c);
                }
            }
            Err(Error::NoCycleThroughEdge(_)) => {}
            Err(other) => return Err(other),
        }
    }
    best.ok_or(Error::NoCycle)
}

/// Length of the shortest nontrivial reduced cycle, with a witness.
pub fn systole<T: Scalar>(g: &WeightedMultigraph<T>) -> Result<CycleWitness<T>> {
    g.require_connected()?;
    if g.betti_number() == 0 {
        return Err(Error::NoCycle);
    }
    systole_under(g, &g.weights())
}

/// Result of searching for `b` systolic cycles through a common vertex whose
/// homology classes have full rank.
#[derive(Debug, Clone, PartialEq)]
pub enum SystolicBasis<T> {
    /// Certified by homology rank only.
    Found { base: usize, cycles: Vec<CycleWitness<T>> },
    NotFound,
    /// Some vertex hit the enumeration cap; no negative claim is made.
    Inconclusive,
}

impl<T> SystolicBasis<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, SystolicBasis::Found { .. })
    }
}

/// Simple cycles through `base` whose length is `target` within `tol`.
/// `None` if the partial-path cap is exceeded.
fn systolic_cycles_at<T: Scalar>(
    g: &WeightedMultigraph<T>,
    base: usize,
    target: T,
    tol: T,
    cap: usize,
) -> Option<Vec<CycleWitness<T>>> {
    struct Search<'a, T> {
        g: &'a WeightedMultigraph<T>,
        weights: Vec<T>,
        base: usize,
        limit: T,
        target: T,
        tol: T,
        on_path: Vec<bool>,
        used: Vec<bool>,
        path: Vec<Traversal>,
        expanded: usize,
        cap: usize,
        found: Vec<CycleWitness<T>>,
        seen: HashSet<Vec<i64>>,
    }

    impl<T: Scalar> Search<'_, T> {
        fn run(&mut self, at: usize, len: T) -> bool {
            self.expanded += 1;
            if self.expanded > self.cap {
                return false;
            }
            for inc in self.g.incidences(at) {
                if self.used[inc.edge] {
                    continue;
                }
                let next = len + self.weights[inc.edge];
                if next > self.limit {
                    continue;
                }
                let step = Traversal {
                    edge: inc.edge,
                    forward: inc.forward,
                };
                if inc.to == self.base {
                    if (next - self.target).abs() <= self.tol {
                        self.path.push(step);
                        let w = CycleWitness::from_traversals(self.g, &self.weights, self.path.clone());
                        self.path.pop();
                        let neg: Vec<i64> = w.class.iter().map(|c| -c).collect();
                        if !self.seen.contains(&w.class) && !self.seen.contains(&neg) {
                            self.seen.insert(w.class.clone());
                            self.found.push(w);
                        }
                    }
                    continue;
                }
                if self.on_path[inc.to] {
                    continue;
                }
                self.on_path[inc.to] = true;
                self.used[inc.edge] = true;
                self.path.push(step);
                let ok = self.run(inc.to, next);
                self.path.pop();
                self.used[inc.edge] = false;
                self.on_path[inc.to] = false;
                if !ok {
                    return false;
                }
            }
            true
        }
    }

    let mut s = Search {
        g,
        weights: g.weights(),
        base,
        limit: target + tol,
        target,
        tol,
        on_path: vec![false; g.vertex_count()],
        used: vec![false; g.edge_count()],
        path: Vec::new(),
        expanded: 0,
        cap,
        found: Vec::new(),
        seen: HashSet::new(),
    };
    s.on_path[base] = true;
    if s.run(base, T::zero()) {
        Some(s.found)
    } else {
        None
    }
}

/// Looks for a vertex carrying `b` cycles of systolic length whose classes
/// span the first homology over the rationals. Vertices are tried in index
/// order and the first success is returned.
pub fn detect_systolic_basis<T: Scalar>(g: &WeightedMultigraph<T>) -> Result<SystolicBasis<T>> {
    detect_systolic_basis_with_cap(g, BASIS_SEARCH_CAP)
}

pub fn detect_systolic_basis_with_cap<T: Scalar>(
    g: &WeightedMultigraph<T>,
    cap: usize,
) -> Result<SystolicBasis<T>> {
    g.require_connected()?;
    let b = g.betti_number();
    if b == 0 {
        return Ok(SystolicBasis::NotFound);
    }
    let sys = systole(g)?.length;
    let tol = T::lit(1e-9) * T::one().max(sys);
    let mut inconclusive = false;
    for base in 0..g.vertex_count() {
        let Some(cycles) = systolic_cycles_at(g, base, sys, tol, cap) else {
            inconclusive = true;
            continue;
        };
        if cycles.len() < b {
            continue;
        }
        let classes: Vec<Vec<i64>> = cycles.iter().map(|c| c.class.clone()).collect();
        let pick = linalg::independent_rows(&classes, b);
        if pick.len() == b {
            let chosen = pick.into_iter().map(|i| cycles[i].clone()).collect();
            return Ok(SystolicBasis::Found {
                base,
                cycles: chosen,
            });
        }
    }
    Ok(if inconclusive {
        SystolicBasis::Inconclusive
    } else {
        SystolicBasis::NotFound
    })
}

/// Largest number of candidate connecting edges the walk oracle will enumerate.
const WALK_ORACLE_MAX_FREE_EDGES: usize = 16;

/// Minimum length of a closed walk whose signed traversal counts equal
/// `n * target`, divided by `n`.
///
/// A closed walk exists exactly when the traversed edge multiset is balanced
/// and connected. Balanced is automatic for a cycle class; the search is over
/// which extra edges to traverse once in each direction to connect the
/// support. Exponential in the number of edges outside the support.
pub fn min_closed_walk_in_class<T: Scalar>(g: &WeightedMultigraph<T>, target: &[i64], n: usize) -> Result<T> {
    if target.len() != g.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: g.edge_count(),
            got: target.len(),
        });
    }
    if n == 0 {
        return Err(Error::BadParameter("multiplier must be at least 1".into()));
    }
    let mut residual = vec![0i64; g.vertex_count()];
    for (e, &c) in g.edges().iter().zip(target) {
        residual[e.v] += c;
        residual[e.u] -= c;
    }
    if let Some(r) = residual.iter().find(|&&r| r != 0) {
        return Err(Error::NotACycle(*r as f64));
    }
    let support: Vec<usize> = (0..g.edge_count()).filter(|&e| target[e] != 0).collect();
    if support.is_empty() {
        return Ok(T::zero());
    }
    let free: Vec<usize> = (0..g.edge_count()).filter(|&e| target[e] == 0).collect();
    if free.len() > WALK_ORACLE_MAX_FREE_EDGES {
        return Err(Error::OracleBudgetExceeded);
    }
    let multiplier = T::from_count(n);
    let base_cost: T = support
        .iter()
        .map(|&e| g.edge(e).weight * T::from_count(target[e].unsigned_abs() as usize) * multiplier)
        .sum();

    let mut best: Option<T> = None;
    for mask in 0u32..(1u32 << free.len()) {
        let mut edges = support.clone();
        let mut extra = T::zero();
        for (bit, &e) in free.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                edges.push(e);
                extra = extra + g.edge(e).weight + g.edge(e).weight;
            }
        }
        let cost = base_cost + extra;
        if best.is_some_and(|b| cost >= b) {
            continue;
        }
        if edges_connected(g, &edges) {
            best = Some(cost);
        }
    }
    // The full edge set of a connected graph always connects the support.
    let best = best.ok_or(Error::NotConnected)?;
    Ok(best / multiplier)
}

fn edges_connected<T>(g: &WeightedMultigraph<T>, edges: &[usize]) -> bool {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &e in edges {
        let (a, b) = (find(&mut parent, g.edges()[e].u), find(&mut parent, g.edges()[e].v));
        parent[a] = b;
    }
    let root = find(&mut parent, g.edges()[edges[0]].u);
    edges.iter().all(|&e| find(&mut parent, g.edges()[e].u) == root)
}
