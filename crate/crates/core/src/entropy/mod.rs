//! Volume entropy of metric graphs.
//!
//! Non-backtracking paths from a vertex lift to geodesics in the universal
//! cover, so ball growth in the cover is governed by the transfer matrix on
//! directed edges
//!
//! ```text
//! T(h)[d, d'] = exp(-h * w(d'))   if head(d) = tail(d') and d' != reverse(d)
//! ```
//!
//! The entropy is the unique `h > 0` with `rho(T(h)) = 1` (for Betti number at
//! least 2). [`cover_ball_volume`] grows the ball directly and serves as the
//! independent check.

mod checks;
mod cover;

pub use checks::{check_entropy_inequalities, EntropyFacts};
pub use cover::{cover_ball_volume, cover_ball_volume_with_budget, entropy_estimate, entropy_estimate_with_budget, EntropyEstimate, FRONTIER_BUDGET};

use crate::error::Result;
use crate::graph::WeightedMultigraph;
use crate::scalar::Scalar;
use crate::spectral::{PerronSolver, SparseMatrix};

/// The `2|E|` oriented edges of a graph. Directed edge `2e` runs along the
/// reference orientation of edge `e`, `2e + 1` against it.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedEdgeSystem<T> {
    tail: Vec<usize>,
    head: Vec<usize>,
    weight: Vec<T>,
    /// Successor lists: directed edges leaving `head(d)` other than `reverse(d)`.
    successors: Vec<Vec<usize>>,
}

impl<T: Scalar> DirectedEdgeSystem<T> {
    pub fn new(g: &WeightedMultigraph<T>) -> Self {
        let m = g.edge_count();
        let mut tail = Vec::with_capacity(2 * m);
        let mut head = Vec::with_capacity(2 * m);
        let mut weight = Vec::with_capacity(2 * m);
        for e in g.edges() {
            tail.extend([e.u, e.v]);
            head.extend([e.v, e.u]);
            weight.extend([e.weight, e.weight]);
        }
        let mut leaving = vec![Vec::new(); g.vertex_count()];
        for (d, &t) in tail.iter().enumerate() {
            leaving[t].push(d);
        }
        let successors = (0..2 * m)
            .map(|d| {
                leaving[head[d]]
                    .iter()
                    .copied()
                    .filter(|&d2| d2 != Self::reverse(d))
                    .collect()
            })
            .collect();
        Self {
            tail,
            head,
            weight,
            successors,
        }
    }

    pub fn len(&self) -> usize {
        self.tail.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tail.is_empty()
    }

    pub fn reverse(d: usize) -> usize {
        d ^ 1
    }

    pub fn edge_of(d: usize) -> usize {
        d / 2
    }

    pub fn tail(&self, d: usize) -> usize {
        self.tail[d]
    }

    pub fn head(&self, d: usize) -> usize {
        self.head[d]
    }

    pub fn weight(&self, d: usize) -> T {
        self.weight[d]
    }

    pub fn successors(&self, d: usize) -> &[usize] {
        &self.successors[d]
    }

    /// Directed edges leaving `vertex`.
    pub fn leaving(&self, vertex: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&d| self.tail[d] == vertex)
    }

    pub fn transfer_matrix(&self, h: T) -> SparseMatrix<T> {
        let mut triplets = Vec::new();
        for d in 0..self.len() {
            let mut row: Vec<usize> = self.successors[d].clone();
            row.sort_unstable();
            for d2 in row {
                triplets.push((d, d2, (-h * self.weight[d2]).exp()));
            }
        }
        SparseMatrix::from_sorted_triplets(self.len(), &triplets)
    }

    fn refill(&self, m: &mut SparseMatrix<T>, h: T) {
        let weights: Vec<T> = m.cols().iter().map(|&d2| self.weight[d2]).collect();
        for (v, w) in m.values_mut().iter_mut().zip(weights) {
            *v = (-h * w).exp();
        }
    }
}

/// Free-group growth constant for a free basis of `b` generators: `2b - 1`.
pub fn free_group_growth(b: usize) -> usize {
    (2 * b).saturating_sub(1)
}

/// Volume entropy. Zero when the Betti number is at most one.
///
/// Bisection on `h` over `[0, ln(2 Delta) / w_min]`: at the upper end every row
/// sum of `T(h)` is at most `(Delta - 1) / (2 Delta) < 1`, so `rho < 1` there,
/// while `rho(T(0)) > 1` once `b >= 2`. The computation runs on the 2-core,
/// which has the same entropy and an irreducible transfer matrix.
pub fn volume_entropy<T: Scalar>(g: &WeightedMultigraph<T>) -> Result<T> {
    g.require_connected()?;
    if g.betti_number() <= 1 {
        return Ok(T::zero());
    }
    let core = g.core_subgraph();
    let system = DirectedEdgeSystem::new(&core);
    let max_valence = core.valence_profile().max;
    let w_min = core.min_weight().expect("core of a graph with b >= 2 has edges");

    let mut matrix = system.transfer_matrix(T::zero());
    let mut solver = PerronSolver::new(&matrix);
    let width = T::lit(1e-15).max(T::epsilon() * T::lit(8.0));
    let one = T::one();
    let at_zero = solver.solve(&matrix, width, |lo, _| lo > one)?;
    assert!(at_zero.lower > one, "rho(T(0)) must exceed 1 when b >= 2");

    let mut lo = T::zero();
    let mut hi = (T::lit(2.0) * T::from_count(max_valence)).ln() / w_min;
    let stop = T::lit(1e-13).max(T::epsilon() * T::lit(16.0));
    while hi - lo > stop * T::one().max(hi) {
        let mid = (lo + hi) / T::lit(2.0);
        system.refill(&mut matrix, mid);
        let est = solver.solve(&matrix, width, |l, u| l > one || u < one)?;
        if est.lower > one {
            lo = mid;
        } else if est.upper < one {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}
