//! Perron root of nonnegative matrices.
//!
//! The matrix is split into strongly connected components; on each
//! irreducible block, `M + I` is primitive, so power iteration from a positive
//! vector converges and the Collatz–Wielandt ratios `min (Mx)_i / x_i` and
//! `max (Mx)_i / x_i` bracket the block's spectral radius. The radius of `M`
//! is the largest block radius.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_ITERATIONS: usize = 1_000_000;

/// Compressed sparse rows with nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn from_dense(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NonSquare);
        }
        let mut triplets = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if !(v >= T::zero() && v.is_finite()) {
                    return Err(Error::NegativeEntry);
                }
                if v > T::zero() {
                    triplets.push((i, j, v));
                }
            }
        }
        Ok(Self::from_sorted_triplets(n, &triplets))
    }

    /// `triplets` must be sorted by row.
    pub(crate) fn from_sorted_triplets(n: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut row_ptr = vec![0; n + 1];
        for &(i, _, _) in triplets {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols: triplets.iter().map(|t| t.1).collect(),
            vals: triplets.iter().map(|t| t.2).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub(crate) fn values_mut(&mut self) -> &mut [T] {
        &mut self.vals
    }

    pub(crate) fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }

    pub fn max_row_sum(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

/// Spectral radius with a Collatz–Wielandt certificate `lower <= value <= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerronEstimate<T> {
    pub value: T,
    pub lower: T,
    pub upper: T,
    pub iterations: usize,
}

/// Reusable solver for matrices sharing one sparsity pattern; keeps the last
/// eigenvector of each block as a warm start.
#[derive(Debug, Clone)]
pub struct PerronSolver<T> {
    blocks: Vec<Vec<usize>>,
    position: Vec<usize>,
    warm: Vec<Vec<T>>,
}

impl<T: Scalar> PerronSolver<T> {
    pub fn new(pattern: &SparseMatrix<T>) -> Self {
        let n = pattern.dim();
        let mut g = DiGraph::<(), ()>::with_capacity(n, pattern.cols().len());
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for i in 0..n {
            for (j, _) in pattern.row(i) {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
        let mut blocks: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut ix: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
                ix.sort_unstable();
                ix
            })
            .filter(|c| c.len() > 1 || pattern.row(c[0]).any(|(j, _)| j == c[0]))
            .collect();
        blocks.sort_by_key(|c| c[0]);
        let mut position = vec![usize::MAX; n];
        for c in &blocks {
            for (k, &i) in c.iter().enumerate() {
                position[i] = k;
            }
        }
        let warm = blocks.iter().map(|c| vec![T::one(); c.len()]).collect();
        Self {
            blocks,
            position,
            warm,
        }
    }

    /// True when the pattern has no directed cycle (nilpotent matrix).
    pub fn is_acyclic(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Iterates every block until its bracket is narrower than `tol` (relative
    /// to max(1, upper)) or `decided(lower, upper)` returns true for it.
    pub fn solve(
        &mut self,
        m: &SparseMatrix<T>,
        tol: T,
        decided: impl Fn(T, T) -> bool,
    ) -> Result<PerronEstimate<T>> {
        let mut best = PerronEstimate {
            value: T::zero(),
            lower: T::zero(),
            upper: T::zero(),
            iterations: 0,
        };
        for (b, block) in self.blocks.iter().enumerate() {
            let est = power_iterate(m, block, &self.position, &mut self.warm[b], tol, &decided)?;
            best.lower = best.lower.max(est.lower);
            best.upper = best.upper.max(est.upper);
            best.value = best.value.max(est.value);
            best.iterations += est.iterations;
        }
        Ok(best)
    }
}

/// `(M x)` restricted to `block`, with the Collatz–Wielandt ratio range.
fn block_product<T: Scalar>(m: &SparseMatrix<T>, block: &[usize], position: &[usize], x: &[T], y: &mut [T]) -> (T, T) {
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for (a, &i) in block.iter().enumerate() {
        let mut acc = T::zero();
        for (j, v) in m.row(i) {
            let p = position[j];
            if p != usize::MAX && block.get(p) == Some(&j) {
                acc = acc + v * x[p];
            }
        }
        let r = acc / x[a];
        lo = lo.min(r);
        hi = hi.max(r);
        y[a] = acc;
    }
    (lo.max(T::zero()), hi)
}

fn normalize<T: Scalar>(x: &mut [T]) {
    let scale = x.iter().copied().fold(T::zero(), T::max);
    for v in x.iter_mut() {
        // Keep entries strictly positive so the ratios stay defined.
        *v = (*v / scale).max(T::min_positive_value());
    }
}

/// Blocks up to this size get the squaring step when iteration stalls.
const DENSE_LIMIT: usize = 256;
/// Plain iterations before the first squaring step, and between later ones.
const STALL_FIRST: usize = 500;
const STALL_EVERY: usize = 20_000;
/// `(M + s I)^(2^SQUARINGS)` damps any ratio `|lambda_2 + s| / (rho + s)`
/// short of `1 - 1e-11` to round-off.
const SQUARINGS: usize = 40;

/// Applies a high power of `M + shift I` (by repeated squaring) to `x`.
/// Nearly decoupled blocks have `lambda_2` within `1e-5` of `rho`, where plain
/// iteration needs millions of steps.
fn accelerate<T: Scalar>(m: &SparseMatrix<T>, block: &[usize], position: &[usize], shift: T, x: &mut [T]) {
    let k = block.len();
    let mut p = vec![T::zero(); k * k];
    for (a, &i) in block.iter().enumerate() {
        for (j, v) in m.row(i) {
            let q = position[j];
            if q != usize::MAX && block.get(q) == Some(&j) {
                p[a * k + q] = v;
            }
        }
        p[a * k + a] = p[a * k + a] + shift;
    }
    let mut next = vec![T::zero(); k * k];
    for _ in 0..SQUARINGS {
        for a in 0..k {
            let row = &p[a * k..(a + 1) * k];
            let out = &mut next[a * k..(a + 1) * k];
            out.iter_mut().for_each(|v| *v = T::zero());
            for (c, &pac) in row.iter().enumerate() {
                if pac != T::zero() {
                    for (o, &pcb) in out.iter_mut().zip(&p[c * k..(c + 1) * k]) {
                        *o = *o + pac * pcb;
                    }
                }
            }
        }
        let scale = next.iter().copied().fold(T::zero(), T::max);
        for v in next.iter_mut() {
            *v = *v / scale;
        }
        std::mem::swap(&mut p, &mut next);
    }
    let y: Vec<T> = (0..k)
        .map(|a| p[a * k..(a + 1) * k].iter().zip(x.iter()).map(|(&u, &v)| u * v).sum())
        .collect();
    x.copy_from_slice(&y);
    normalize(x);
}

fn power_iterate<T: Scalar>(
    m: &SparseMatrix<T>,
    block: &[usize],
    position: &[usize],
    x: &mut Vec<T>,
    tol: T,
    decided: &impl Fn(T, T) -> bool,
) -> Result<PerronEstimate<T>> {
    let k = block.len();
    let mut y = vec![T::zero(); k];
    let done = |lower: T, upper: T| upper - lower <= tol * T::one().max(upper) || decided(lower, upper) || upper == T::zero();
    let estimate = |lower: T, upper: T, iterations: usize| PerronEstimate {
        value: (lower + upper) / T::lit(2.0),
        lower,
        upper,
        iterations,
    };
    // Shift by the running upper bound: large enough to make the block
    // primitive, small enough that periodic blocks still separate quickly.
    let mut shift = T::one();
    for it in 1..=MAX_ITERATIONS {
        let (lower, upper) = block_product(m, block, position, x, &mut y);
        if done(lower, upper) {
            return Ok(estimate(lower, upper, it));
        }
        shift = if upper > T::zero() { upper } else { shift };
        if k <= DENSE_LIMIT && (it == STALL_FIRST || it % STALL_EVERY == 0) {
            let mut z = x.clone();
            accelerate(m, block, position, shift, &mut z);
            let (l2, u2) = block_product(m, block, position, &z, &mut y);
            if done(l2, u2) {
                *x = z;
                return Ok(estimate(l2, u2, it));
            }
            if u2 - l2 < upper - lower {
                *x = z;
                continue;
            }
            block_product(m, block, position, x, &mut y);
        }
        for (ya, &xa) in y.iter_mut().zip(x.iter()) {
            *ya = *ya + shift * xa;
        }
        x.copy_from_slice(&y);
        normalize(x);
    }
    Err(Error::NoConvergence(MAX_ITERATIONS))
}

/// Default bracket width for [`spectral_radius`].
pub fn default_tolerance<T: Scalar>() -> T {
    T::lit(1e-13).max(T::epsilon() * T::lit(16.0))
}

/// Spectral radius of a dense nonnegative square matrix.
pub fn spectral_radius<T: Scalar>(m: &[Vec<T>]) -> Result<PerronEstimate<T>> {
    let sparse = SparseMatrix::from_dense(m)?;
    spectral_radius_sparse(&sparse)
}

pub fn spectral_radius_sparse<T: Scalar>(m: &SparseMatrix<T>) -> Result<PerronEstimate<T>> {
    PerronSolver::new(m).solve(m, default_tolerance(), |_, _| false)
}
