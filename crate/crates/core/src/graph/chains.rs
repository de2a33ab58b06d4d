use super::WeightedMultigraph;
use crate::scalar::Scalar;

/// A maximal chain: a path whose interior vertices all have valence 2.
///
/// `closed` chains are whole components in which every vertex has valence 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain<T> {
    /// Edge indices in walking order.
    pub edges: Vec<usize>,
    /// Vertex sequence; one longer than `edges` (first == last when closed).
    pub vertices: Vec<usize>,
    pub length: T,
    pub closed: bool,
}

impl<T: Scalar> WeightedMultigraph<T> {
    /// Maximal chains. They partition the edge set.
    pub fn maximal_chains(&self) -> Vec<Chain<T>> {
        let valence = self.valence_profile().valence;
        let mut used = vec![false; self.edge_count()];
        let mut chains = Vec::new();

        let walk = |start: usize, first: super::Incidence, used: &mut Vec<bool>| {
            let mut edges = vec![first.edge];
            let mut vertices = vec![start, first.to];
            used[first.edge] = true;
            let mut at = first.to;
            let mut via = first.edge;
            while valence[at] == 2 && at != start {
                let next = self.incidences(at).iter().find(|inc| inc.edge != via && !used[inc.edge]);
                match next {
                    Some(inc) => {
                        used[inc.edge] = true;
                        edges.push(inc.edge);
                        vertices.push(inc.to);
                        via = inc.edge;
                        at = inc.to;
                    }
                    None => break,
                }
            }
            (edges, vertices)
        };

        for x in 0..self.vertex_count() {
            if valence[x] == 2 {
                continue;
            }
            for &inc in self.incidences(x) {
                if used[inc.edge] {
                    continue;
                }
                let (edges, vertices) = walk(x, inc, &mut used);
                let length = edges.iter().map(|&e| self.edge(e).weight).sum();
                chains.push(Chain {
                    edges,
                    vertices,
                    length,
                    closed: false,
                });
            }
        }
        // Whatever is left lives in components made only of valence-2 vertices.
        for x in 0..self.vertex_count() {
            if let Some(&inc) = self.incidences(x).iter().find(|inc| !used[inc.edge]) {
                let (edges, vertices) = walk(x, inc, &mut used);
                let length = edges.iter().map(|&e| self.edge(e).weight).sum();
                chains.push(Chain {
                    edges,
                    vertices,
                    length,
                    closed: true,
                });
            }
        }
        chains
    }

    /// Minimum chain length when every single edge counts as a chain: the
    /// smallest edge weight.
    pub fn c_min_literal(&self) -> Option<T> {
        self.min_weight()
    }

    /// Minimum length over maximal chains.
    pub fn c_min_maximal(&self) -> Option<T> {
        self.maximal_chains().into_iter().map(|c| c.length).reduce(T::min)
    }

    /// Maximum length over maximal chains (every chain extends to a maximal one).
    pub fn c_max(&self) -> Option<T> {
        self.maximal_chains().into_iter().map(|c| c.length).reduce(T::max)
    }
}
