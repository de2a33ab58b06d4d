//! Weighted multigraphs (metric graphs) and their elementary invariants.
//!
//! Vertices and edges are addressed by dense indices in input order; string
//! ids are kept for I/O and stay stable under [`WeightedMultigraph::scale`]
//! and [`WeightedMultigraph::subdivide`]. Every edge carries the orientation
//! `u -> v` it was built with, which fixes the sign convention of cycle
//! vectors.

mod chains;
pub mod generate;

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use chains::Chain;

/// Input record for one edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec<T> {
    pub id: String,
    pub u: String,
    pub v: String,
    pub w: T,
}

impl<T> EdgeSpec<T> {
    pub fn new(id: impl Into<String>, u: impl Into<String>, v: impl Into<String>, w: T) -> Self {
        Self {
            id: id.into(),
            u: u.into(),
            v: v.into(),
            w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub id: String,
    /// Tail in the reference orientation.
    pub u: usize,
    /// Head in the reference orientation.
    pub v: usize,
    pub weight: T,
}

impl<T> Edge<T> {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `x` (for a loop, `x` itself).
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// One incidence of an edge at a vertex. Loops appear twice at their vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: usize,
    pub to: usize,
    /// `true` when leaving through this incidence follows the reference orientation.
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMultigraph<T> {
    vertex_ids: Vec<String>,
    edges: Vec<Edge<T>>,
    adjacency: Vec<Vec<Incidence>>,
    vertex_lookup: HashMap<String, usize>,
    edge_lookup: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceProfile {
    pub valence: Vec<usize>,
    pub min: usize,
    pub max: usize,
}

impl ValenceProfile {
    pub fn is_regular(&self) -> bool {
        self.min == self.max
    }
}

impl<T> WeightedMultigraph<T> {
    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge<T> {
        &self.edges[index]
    }

    pub fn incidences(&self, vertex: usize) -> &[Incidence] {
        &self.adjacency[vertex]
    }
}

impl<T: Scalar> WeightedMultigraph<T> {
    /// Builds a graph, keeping the input order of vertices and edges.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[EdgeSpec<T>]) -> Result<Self> {
        let mut vertex_lookup = HashMap::with_capacity(vertices.len());
        let mut vertex_ids = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            let v = v.as_ref();
            if vertex_lookup.insert(v.to_string(), i).is_some() {
                return Err(Error::DuplicateVertexId(v.to_string()));
            }
            vertex_ids.push(v.to_string());
        }
        let mut built = Vec::with_capacity(edges.len());
        let mut edge_lookup = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if !(e.w > T::zero() && e.w.is_finite()) {
                return Err(Error::NonPositiveWeight(e.id.clone()));
            }
            let endpoint = |name: &str| {
                vertex_lookup
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::DanglingEndpoint {
                        edge: e.id.clone(),
                        vertex: name.to_string(),
                    })
            };
            let u = endpoint(&e.u)?;
            let v = endpoint(&e.v)?;
            if edge_lookup.insert(e.id.clone(), i).is_some() {
                return Err(Error::DuplicateEdgeId(e.id.clone()));
            }
            built.push(Edge {
                id: e.id.clone(),
                u,
                v,
                weight: e.w,
            });
        }
        Ok(Self::assemble(vertex_ids, built, vertex_lookup, edge_lookup))
    }

    fn assemble(
        vertex_ids: Vec<String>,
        edges: Vec<Edge<T>>,
        vertex_lookup: HashMap<String, usize>,
        edge_lookup: HashMap<String, usize>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); vertex_ids.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.u].push(Incidence {
                edge: i,
                to: e.v,
                forward: true,
            });
            adjacency[e.v].push(Incidence {
                edge: i,
                to: e.u,
                forward: false,
            });
        }
        Self {
            vertex_ids,
            edges,
            adjacency,
            vertex_lookup,
            edge_lookup,
        }
    }

    pub fn weights(&self) -> Vec<T> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edge_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// Records in input order, suitable for rebuilding or serialising.
    pub fn edge_specs(&self) -> Vec<EdgeSpec<T>> {
        self.edges
            .iter()
            .map(|e| {
                EdgeSpec::new(
                    e.id.clone(),
                    self.vertex_ids[e.u].clone(),
                    self.vertex_ids[e.v].clone(),
                    e.weight,
                )
            })
            .collect()
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for inc in &self.adjacency[x] {
                    if label[inc.to] == usize::MAX {
                        label[inc.to] = count;
                        queue.push_back(inc.to);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 == 1
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::NotConnected)
        }
    }

    /// `|E| - |V| + #components`.
    pub fn betti_number(&self) -> usize {
        let (_, c) = self.components();
        self.edge_count() + c - self.vertex_count()
    }

    pub fn volume(&self) -> T {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn min_weight(&self) -> Option<T> {
        self.edges.iter().map(|e| e.weight).reduce(T::min)
    }

    pub fn max_weight(&self) -> Option<T> {
        self.edges.iter().map(|e| e.weight).reduce(T::max)
    }

    /// Valence per vertex; a loop counts twice at its vertex.
    pub fn valence_profile(&self) -> ValenceProfile {
        let valence: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        let min = valence.iter().copied().min().unwrap_or(0);
        let max = valence.iter().copied().max().unwrap_or(0);
        ValenceProfile { valence, min, max }
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight == T::one())
    }

    /// Same combinatorics with every weight multiplied by `factor`.
    pub fn scale(&self, factor: T) -> Result<Self> {
        if !(factor > T::zero() && factor.is_finite()) {
            return Err(Error::NonPositiveScale);
        }
        let mut out = self.clone();
        for e in &mut out.edges {
            e.weight = e.weight * factor;
            if !(e.weight > T::zero() && e.weight.is_finite()) {
                return Err(Error::NonPositiveWeight(e.id.clone()));
            }
        }
        Ok(out)
    }

    /// Replaces the weights (same order as [`Self::edges`]).
    pub fn with_weights(&self, weights: &[T]) -> Result<Self> {
        if weights.len() != self.edge_count() {
            return Err(Error::DimensionMismatch {
                expected: self.edge_count(),
                got: weights.len(),
            });
        }
        let mut out = self.clone();
        for (e, &w) in out.edges.iter_mut().zip(weights) {
            if !(w > T::zero() && w.is_finite()) {
                return Err(Error::NonPositiveWeight(e.id.clone()));
            }
            e.weight = w;
        }
        Ok(out)
    }

    /// Replaces edge `id` by a path of `parts` edges of weight `w / parts`.
    ///
    /// The first piece keeps the original id and position; the remaining
    /// pieces and the fresh vertices are appended with ids derived from the
    /// original edge id (made unique if they collide).
    pub fn subdivide(&self, id: &str, parts: usize) -> Result<Self> {
        let index = self.edge_index(id)?;
        if parts == 0 {
            return Err(Error::BadPartCount);
        }
        if parts == 1 {
            return Ok(self.clone());
        }
        let original = &self.edges[index];
        let piece = original.weight / T::from_count(parts);
        if !(piece > T::zero()) {
            return Err(Error::NonPositiveWeight(original.id.clone()));
        }
        let taken_v: HashSet<&str> = self.vertex_ids.iter().map(String::as_str).collect();
        let taken_e: HashSet<&str> = self.edges.iter().map(|e| e.id.as_str()).collect();
        let fresh = |base: String, taken: &HashSet<&str>| {
            let mut name = base.clone();
            let mut k = 0usize;
            while taken.contains(name.as_str()) {
                k += 1;
                name = format!("{base}~{k}");
            }
            name
        };

        let mut vertex_ids = self.vertex_ids.clone();
        let mut chain_vertices = Vec::with_capacity(parts + 1);
        chain_vertices.push(original.u);
        for j in 1..parts {
            vertex_ids.push(fresh(format!("{}#v{j}", original.id), &taken_v));
            chain_vertices.push(vertex_ids.len() - 1);
        }
        chain_vertices.push(original.v);

        let mut edges = self.edges.clone();
        edges[index] = Edge {
            id: original.id.clone(),
            u: chain_vertices[0],
            v: chain_vertices[1],
            weight: piece,
        };
        for j in 1..parts {
            edges.push(Edge {
                id: fresh(format!("{}#{j}", original.id), &taken_e),
                u: chain_vertices[j],
                v: chain_vertices[j + 1],
                weight: piece,
            });
        }
        let vertex_lookup = vertex_ids
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let edge_lookup = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        Ok(Self::assemble(vertex_ids, edges, vertex_lookup, edge_lookup))
    }

    /// Subdivides every edge into `parts` pieces.
    pub fn subdivide_all(&self, parts: usize) -> Result<Self> {
        let ids: Vec<String> = self.edges.iter().map(|e| e.id.clone()).collect();
        ids.iter().try_fold(self.clone(), |g, id| g.subdivide(id, parts))
    }

    /// Edges of the 2-core: what remains after repeatedly deleting vertices of
    /// valence at most one. Returned as a mask over edge indices.
    pub fn core_edge_mask(&self) -> Vec<bool> {
        let mut alive = vec![true; self.edge_count()];
        let mut degree: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..self.vertex_count()).filter(|&x| degree[x] == 1).collect();
        while let Some(x) = queue.pop_front() {
            if degree[x] != 1 {
                continue;
            }
            for inc in &self.adjacency[x] {
                if alive[inc.edge] {
                    alive[inc.edge] = false;
                    degree[x] -= 1;
                    degree[inc.to] -= 1;
                    if degree[inc.to] == 1 {
                        queue.push_back(inc.to);
                    }
                }
            }
        }
        alive
    }

    /// The 2-core as a graph (ids preserved, input order kept).
    pub fn core_subgraph(&self) -> Self {
        let mask = self.core_edge_mask();
        let mut keep_vertex = vec![false; self.vertex_count()];
        for (e, &alive) in self.edges.iter().zip(&mask) {
            if alive {
                keep_vertex[e.u] = true;
                keep_vertex[e.v] = true;
            }
        }
        let vertices: Vec<&str> = self
            .vertex_ids
            .iter()
            .zip(&keep_vertex)
            .filter(|(_, &k)| k)
            .map(|(v, _)| v.as_str())
            .collect();
        let specs: Vec<EdgeSpec<T>> = self
            .edge_specs()
            .into_iter()
            .zip(&mask)
            .filter(|(_, &alive)| alive)
            .map(|(s, _)| s)
            .collect();
        Self::new(&vertices, &specs).expect("subgraph of a valid graph is valid")
    }

    /// Endpoint-boundary of an edge chain: `sum_e c_e (head(e) - tail(e))`.
    pub fn boundary(&self, coeffs: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.vertex_count()];
        for (e, &c) in self.edges.iter().zip(coeffs) {
            out[e.v] = out[e.v] + c;
            out[e.u] = out[e.u] - c;
        }
        out
    }
}
