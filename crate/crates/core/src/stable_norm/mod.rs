//! Real first homology of a graph as the cycle space inside edge chains, the
//! stable norm on it, and the measure of its unit ball.
//!
//! The stable norm of a cycle `u` is the weighted l1 norm `sum_e w_e |u_e|`;
//! its unit ball is the section of a weighted cross-polytope by the cycle
//! space. Volumes are taken for the Haar measure induced by the weighted
//! scalar product `<e_i, e_j> = w_i delta_ij`, i.e. coordinate volume in a
//! lattice basis times `sqrt(det Gram)`.

mod checks;
mod volume;

pub use checks::{check_stable_inequalities, check_stable_inequalities_with, StableOptions};
pub use volume::{
    circuits, stable_ball_volume, stable_ball_volume_exact, stable_ball_volume_mc, StableBallVolume, VolumeMethod,
    EXACT_MAX_BETTI, EXACT_MAX_HYPERPLANES,
};

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::WeightedMultigraph;
use crate::scalar::Scalar;

/// Boundary residual allowed for a vector to count as a cycle.
pub const CYCLE_TOL: f64 = 1e-9;

/// A real edge chain, coordinates in the fixed edge orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleVector<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> CycleVector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| T::lit(c as f64)).collect())
    }

    /// Largest absolute vertex boundary.
    pub fn boundary_residual(&self, g: &WeightedMultigraph<T>) -> T {
        g.boundary(&self.coords)
            .into_iter()
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn is_cycle(&self, g: &WeightedMultigraph<T>) -> bool {
        let scale = self.coords.iter().fold(T::one(), |m, x| m.max(x.abs()));
        self.coords.len() == g.edge_count() && self.boundary_residual(g) <= T::lit(CYCLE_TOL) * scale
    }
}

/// Fundamental cycles of a BFS spanning tree rooted at the first vertex.
///
/// Vector `j` has coefficient `+1` on its chord `chords[j]` and `0` on every
/// other chord, so the coordinates of a cycle `z` in this basis are simply
/// `z[chords[j]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    pub vectors: Vec<Vec<i64>>,
    pub tree_edges: Vec<usize>,
    pub chords: Vec<usize>,
}

impl CycleBasis {
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn coordinates<T: Copy>(&self, z: &[T]) -> Vec<T> {
        self.chords.iter().map(|&e| z[e]).collect()
    }

    /// Edge coordinates of `sum_j x_j c_j`.
    pub fn combine<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let m = self.vectors.first().map_or(0, Vec::len);
        let mut out = vec![T::zero(); m];
        for (c, &xj) in self.vectors.iter().zip(x) {
            for (o, &ce) in out.iter_mut().zip(c) {
                if ce != 0 {
                    *o = *o + xj * T::lit(ce as f64);
                }
            }
        }
        out
    }
}

pub fn cycle_basis<T: Scalar>(g: &WeightedMultigraph<T>) -> Result<CycleBasis> {
    g.require_connected()?;
    let n = g.vertex_count();
    let m = g.edge_count();
    // parent[x] = (parent vertex, tree edge)
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; m];
    let mut queue = VecDeque::new();
    if n > 0 {
        seen[0] = true;
        queue.push_back(0);
    }
    while let Some(x) = queue.pop_front() {
        for inc in g.incidences(x) {
            if !seen[inc.to] {
                seen[inc.to] = true;
                parent[inc.to] = Some((x, inc.edge));
                depth[inc.to] = depth[x] + 1;
                in_tree[inc.edge] = true;
                queue.push_back(inc.to);
            }
        }
    }

    let mut vectors = Vec::new();
    let mut chords = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        if in_tree[e] {
            continue;
        }
        let mut c = vec![0i64; m];
        c[e] = 1;
        // Close the chord u -> v by the tree path v -> u.
        let (mut a, mut b) = (edge.v, edge.u);
        let mut down = Vec::new();
        while a != b {
            if depth[a] >= depth[b] {
                let (p, f) = parent[a].expect("non-root has a parent");
                c[f] += if g.edge(f).u == a { 1 } else { -1 };
                a = p;
            } else {
                let (p, f) = parent[b].expect("non-root has a parent");
                down.push((p, f));
                b = p;
            }
        }
        for (p, f) in down {
            c[f] += if g.edge(f).u == p { 1 } else { -1 };
        }
        vectors.push(c);
        chords.push(e);
    }
    Ok(CycleBasis {
        vectors,
        tree_edges: (0..m).filter(|&e| in_tree[e]).collect(),
        chords,
    })
}

/// `sum_e w_e |u_e|`; rejects vectors outside the cycle space.
pub fn stable_norm<T: Scalar>(g: &WeightedMultigraph<T>, u: &CycleVector<T>) -> Result<T> {
    if u.coords.len() != g.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: g.edge_count(),
            got: u.coords.len(),
        });
    }
    if !u.is_cycle(g) {
        return Err(Error::NotACycle(u.boundary_residual(g).to_f64_lossy()));
    }
    Ok(g.edges()
        .iter()
        .zip(&u.coords)
        .map(|(e, &x)| e.weight * x.abs())
        .sum())
}

/// `G[i][j] = sum_e w_e c_i[e] c_j[e]`.
pub fn gram_matrix<T: Scalar>(g: &WeightedMultigraph<T>, basis: &CycleBasis) -> Vec<Vec<T>> {
    let b = basis.rank();
    let mut out = vec![vec![T::zero(); b]; b];
    for i in 0..b {
        for j in i..b {
            let s: T = g
                .edges()
                .iter()
                .enumerate()
                .filter(|&(e, _)| basis.vectors[i][e] != 0 && basis.vectors[j][e] != 0)
                .map(|(e, edge)| edge.weight * T::lit((basis.vectors[i][e] * basis.vectors[j][e]) as f64))
                .sum();
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    out
}

/// Volume of the Euclidean unit ball in dimension `b`.
pub fn euclidean_ball_volume<T: Scalar>(b: usize) -> T {
    // omega_b = omega_{b-2} * 2 pi / b with omega_0 = 1, omega_1 = 2.
    let mut v = if b % 2 == 0 { T::one() } else { T::lit(2.0) };
    let mut k = if b % 2 == 0 { 2 } else { 3 };
    while k <= b {
        v = v * T::lit(2.0) * T::PI() / T::from_count(k);
        k += 2;
    }
    v
}

/// `2^b / b!`, the measure of the unit cross-polytope of dimension `b`.
pub fn cross_polytope_volume<T: Scalar>(b: usize) -> T {
    (1..=b).fold(T::one(), |v, k| v * T::lit(2.0) / T::from_count(k))
}
