//! Measure of the stable unit ball `{x : sum_e w_e |(C x)_e| <= 1}`.
//!
//! Exact method: the norm is linear on each cell of the arrangement cut out by
//! the hyperplanes `(C x)_e = 0`. Each cell is a pointed cone whose rays are
//! circuits (simple cycles with +-1 coefficients), and a circuit of length
//! `l` meets the unit sphere at `r / l`. Triangulating every cone from its
//! rays gives the volume as `sum |det R| / (b! prod l(r_i))`, with the
//! determinants computed exactly over the integers.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{cycle_basis, gram_matrix, CycleBasis};
use crate::error::{Error, Result};
use crate::graph::WeightedMultigraph;
use crate::linalg::{determinant, integer_determinant, integer_rank};
use crate::lp::maximize;
use crate::scalar::Scalar;

pub const EXACT_MAX_BETTI: usize = 8;
/// Distinct hyperplanes `{x : <c_e, x> = 0}` over the non-bridge edges.
pub const EXACT_MAX_HYPERPLANES: usize = 20;

/// Two-sided 99% normal quantile.
const Z99: f64 = 2.575_829_303_548_9;
const SHARD_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VolumeMethod {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StableBallVolume<T> {
    pub value: T,
    pub method: VolumeMethod,
    /// Monte-Carlo sample count; zero for exact results.
    pub samples: usize,
    /// Half-width of the 99% confidence interval; zero for exact results.
    pub half_width: T,
    pub ci99: Option<(T, T)>,
    /// Set for `b = 0`, where the measure of a point is taken to be 1.
    pub degenerate: bool,
}

impl<T: Scalar> StableBallVolume<T> {
    fn exact(value: T) -> Self {
        Self {
            value,
            method: VolumeMethod::Exact,
            samples: 0,
            half_width: T::zero(),
            ci99: None,
            degenerate: false,
        }
    }

    /// The `b = 0` convention.
    pub fn point() -> Self {
        Self {
            degenerate: true,
            ..Self::exact(T::one())
        }
    }
}

/// The norm in basis coordinates: one term per distinct hyperplane, with the
/// weights of edges sharing that hyperplane (edges in series) added up.
struct Arrangement<T> {
    normals: Vec<Vec<i64>>,
    weights: Vec<T>,
}

impl<T: Scalar> Arrangement<T> {
    fn new(g: &WeightedMultigraph<T>, basis: &CycleBasis) -> Self {
        let b = basis.rank();
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut normals = Vec::new();
        let mut weights: Vec<T> = Vec::new();
        for (e, edge) in g.edges().iter().enumerate() {
            let mut row: Vec<i64> = (0..b).map(|j| basis.vectors[j][e]).collect();
            let Some(&lead) = row.iter().find(|&&x| x != 0) else {
                continue; // bridge
            };
            let div = row.iter().fold(0i64, |acc, &x| gcd(acc, x.abs())) * lead.signum();
            for x in row.iter_mut() {
                *x /= div;
            }
            let w = edge.weight * T::from_count(div.unsigned_abs() as usize);
            match index.get(&row) {
                Some(&h) => weights[h] = weights[h] + w,
                None => {
                    index.insert(row.clone(), normals.len());
                    normals.push(row);
                    weights.push(w);
                }
            }
        }
        Self { normals, weights }
    }

    fn norm(&self, x: &[T]) -> T {
        self.normals
            .iter()
            .zip(&self.weights)
            .map(|(h, &w)| {
                let dot = h
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&hj, &xj)| acc + T::lit(hj as f64) * xj);
                w * dot.abs()
            })
            .sum()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn dot(h: &[i64], x: &[i64]) -> i64 {
    h.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Simple cycles of `g` as +-1 edge vectors, one per pair `{c, -c}`, found as
/// the connected 2-regular members of the mod-2 cycle space.
pub fn circuits<T: Scalar>(g: &WeightedMultigraph<T>, basis: &CycleBasis) -> Vec<Vec<i64>> {
    let b = basis.rank();
    let m = g.edge_count();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << b) {
        let mut support = vec![false; m];
        for (j, c) in basis.vectors.iter().enumerate() {
            if mask & (1 << j) != 0 {
                for (s, &x) in support.iter_mut().zip(c) {
                    *s ^= x % 2 != 0;
                }
            }
        }
        if let Some(c) = orient_circuit(g, &support) {
            out.push(c);
        }
    }
    out
}

/// Signs for a 2-regular connected edge set, walking from its first edge in
/// the forward direction; `None` if the set is not a single simple cycle.
fn orient_circuit<T: Scalar>(g: &WeightedMultigraph<T>, support: &[bool]) -> Option<Vec<i64>> {
    let mut degree = vec![0usize; g.vertex_count()];
    let mut count = 0;
    for (e, edge) in g.edges().iter().enumerate() {
        if support[e] {
            degree[edge.u] += 1;
            degree[edge.v] += 1;
            count += 1;
        }
    }
    if degree.iter().any(|&d| d != 0 && d != 2) {
        return None;
    }
    let first = support.iter().position(|&s| s)?;
    let mut c = vec![0i64; support.len()];
    c[first] = 1;
    let start = g.edge(first).u;
    let mut at = g.edge(first).v;
    let mut walked = 1;
    while at != start {
        let inc = g
            .incidences(at)
            .iter()
            .find(|inc| support[inc.edge] && c[inc.edge] == 0)?;
        c[inc.edge] = if inc.forward { 1 } else { -1 };
        at = inc.to;
        walked += 1;
    }
    (walked == count).then_some(c)
}

/// Exact volume; errors outside `b <= 8` or past 20 hyperplanes. Edges in
/// series share a hyperplane and bridges have none, so subdividing never
/// pushes a graph past the limit.
pub fn stable_ball_volume_exact<T: Scalar>(g: &WeightedMultigraph<T>) -> Result<StableBallVolume<T>> {
    g.require_connected()?;
    let b = g.betti_number();
    if b == 0 {
        return Err(Error::ZeroBetti);
    }
    let basis = cycle_basis(g)?;
    let arr = Arrangement::new(g, &basis);
    if b > EXACT_MAX_BETTI || arr.normals.len() > EXACT_MAX_HYPERPLANES {
        return Err(Error::SizeLimitExceeded {
            betti: b,
            hyperplanes: arr.normals.len(),
        });
    }

    // Rays in basis coordinates, both orientations, with their lengths.
    let mut rays: Vec<Vec<i64>> = Vec::new();
    for c in circuits(g, &basis) {
        let x = basis.coordinates(&c);
        rays.push(x.iter().map(|v| -v).collect());
        rays.push(x);
    }
    let ray_len: Vec<T> = rays
        .iter()
        .map(|r| arr.norm(&r.iter().map(|&v| T::lit(v as f64)).collect::<Vec<_>>()))
        .collect();
    let side: Vec<Vec<i64>> = rays
        .iter()
        .map(|r| arr.normals.iter().map(|h| dot(h, r).signum()).collect())
        .collect();

    let cells = enumerate_cells(&arr.normals, &rays, &side, b);
    let denom: T = (1..=b).fold(T::one(), |f, k| f * T::from_count(k));
    let cell_volumes: Vec<T> = cells
        .par_iter()
        .map(|members| {
            triangulate(members, b, &arr.normals, &rays)
                .into_iter()
                .map(|simplex| {
                    let mat: Vec<Vec<i64>> = simplex.iter().map(|&r| rays[r].clone()).collect();
                    let det = T::lit(integer_determinant(&mat).unsigned_abs() as f64);
                    let lengths = simplex.iter().fold(T::one(), |p, &r| p * ray_len[r]);
                    det / (denom * lengths)
                })
                .fold(T::zero(), |a, v| a + v)
        })
        .collect();
    let coordinate_volume = cell_volumes.into_iter().fold(T::zero(), |a, v| a + v);
    let scale = determinant(&gram_matrix(g, &basis)).sqrt();
    Ok(StableBallVolume::exact(coordinate_volume * scale))
}

/// Rays of each full-dimensional cell, found by walking across walls from
/// the cell containing a generic point. A hyperplane is a wall of a cell when
/// the cell's rays on it span dimension `b - 1`.
fn enumerate_cells(normals: &[Vec<i64>], rays: &[Vec<i64>], side: &[Vec<i64>], b: usize) -> Vec<Vec<usize>> {
    // ln of distinct primes: no +-1 combination of them vanishes.
    const PRIMES: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    let generic: Vec<f64> = PRIMES[..b].iter().map(|p| p.ln()).collect();
    let start: Vec<i64> = normals
        .iter()
        .map(|h| {
            let s: f64 = h.iter().zip(&generic).map(|(&a, x)| a as f64 * x).sum();
            if s > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();

    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut cells = Vec::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(sign) = queue.pop_front() {
        let members: Vec<usize> = (0..side.len())
            .filter(|&r| side[r].iter().zip(&sign).all(|(&s, &t)| s == 0 || s == t))
            .collect();
        for h in 0..normals.len() {
            let on_wall: Vec<Vec<i64>> = members
                .iter()
                .filter(|&&r| side[r][h] == 0)
                .map(|&r| rays[r].clone())
                .collect();
            if on_wall.len() + 1 >= b && integer_rank(&on_wall) == b - 1 {
                let mut next = sign.clone();
                next[h] = -next[h];
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        cells.push(members);
    }
    cells
}

/// Pulling triangulation of the cone spanned by `members` (dimension `dim`):
/// cone from the first ray over every facet that avoids it.
fn triangulate(members: &[usize], dim: usize, normals: &[Vec<i64>], rays: &[Vec<i64>]) -> Vec<Vec<usize>> {
    if members.len() == dim {
        return vec![members.to_vec()];
    }
    let apex = members[0];
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for h in normals {
        if dot(h, &rays[apex]) == 0 {
            continue;
        }
        let facet: Vec<usize> = members.iter().copied().filter(|&r| dot(h, &rays[r]) == 0).collect();
        if facet.len() + 1 < dim || facets.contains(&facet) {
            continue;
        }
        let vectors: Vec<Vec<i64>> = facet.iter().map(|&r| rays[r].clone()).collect();
        if integer_rank(&vectors) == dim - 1 {
            facets.push(facet);
        }
    }
    let mut out = Vec::new();
    for facet in facets {
        for mut simplex in triangulate(&facet, dim - 1, normals, rays) {
            simplex.push(apex);
            out.push(simplex);
        }
    }
    out
}

/// Rejection-sampling estimate inside the tight bounding box of the ball.
///
/// The box half-widths are `max x_i` over the ball, each found by a linear
/// program. Samples are split into fixed shards seeded by `(seed, shard)`, so
/// the estimate is identical for any thread count. The interval is the
/// Wilson score interval, which stays informative when few samples hit.
pub fn stable_ball_volume_mc<T: Scalar>(
    g: &WeightedMultigraph<T>,
    samples: usize,
    seed: u64,
) -> Result<StableBallVolume<T>> {
    g.require_connected()?;
    let b = g.betti_number();
    if b == 0 {
        return Err(Error::ZeroBetti);
    }
    if samples == 0 {
        return Err(Error::BadParameter("samples must be positive".into()));
    }
    let basis = cycle_basis(g)?;
    let arr = Arrangement::new(g, &basis);
    let half = bounding_box(&arr, b)?;
    let half64: Vec<f64> = half.iter().map(|h| h.to_f64_lossy()).collect();

    let shards = samples.div_ceil(SHARD_SIZE);
    let hits: u64 = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let n = SHARD_SIZE.min(samples - s * SHARD_SIZE);
            let mut x = vec![T::zero(); b];
            let mut hits = 0u64;
            for _ in 0..n {
                for (xi, &h) in x.iter_mut().zip(&half64) {
                    *xi = T::lit(rng.random_range(-h..=h));
                }
                if arr.norm(&x) <= T::one() {
                    hits += 1;
                }
            }
            hits
        })
        .sum();

    let scale = determinant(&gram_matrix(g, &basis)).sqrt().to_f64_lossy();
    let box_volume: f64 = half64.iter().map(|h| 2.0 * h).product::<f64>() * scale;
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = Z99 * Z99;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let spread = Z99 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    let (lo, hi) = ((centre - spread).max(0.0), (centre + spread).min(1.0));
    let value = p * box_volume;
    Ok(StableBallVolume {
        value: T::lit(value),
        method: VolumeMethod::MonteCarlo,
        samples,
        half_width: T::lit((value - lo * box_volume).max(hi * box_volume - value)),
        ci99: Some((T::lit(lo * box_volume), T::lit(hi * box_volume))),
        degenerate: false,
    })
}

/// `max x_i` over the ball for each coordinate (the ball is symmetric).
///
/// Variables `x+ , x- >= 0` and one `t_h >= |h.x|` per hyperplane:
/// `h.x - t_h <= 0`, `-h.x - t_h <= 0`, `sum W_h t_h <= 1`.
fn bounding_box<T: Scalar>(arr: &Arrangement<T>, b: usize) -> Result<Vec<T>> {
    let k = arr.normals.len();
    let width = 2 * b + k;
    let mut a = Vec::with_capacity(2 * k + 1);
    let mut rhs = Vec::with_capacity(2 * k + 1);
    for (i, h) in arr.normals.iter().enumerate() {
        for sign in [1.0, -1.0] {
            let mut row = vec![T::zero(); width];
            for (j, &hj) in h.iter().enumerate() {
                row[j] = T::lit(sign * hj as f64);
                row[b + j] = T::lit(-sign * hj as f64);
            }
            row[2 * b + i] = -T::one();
            a.push(row);
            rhs.push(T::zero());
        }
    }
    let mut row = vec![T::zero(); width];
    for (i, &w) in arr.weights.iter().enumerate() {
        row[2 * b + i] = w;
    }
    a.push(row);
    rhs.push(T::one());

    (0..b)
        .map(|i| {
            let mut c = vec![T::zero(); width];
            c[i] = T::one();
            c[b + i] = -T::one();
            let sol = maximize(&c, &a, &rhs)?;
            let v = sol.objective;
            if v > T::zero() && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::DegenerateBox)
            }
        })
        .collect()
}

/// Exact volume when within the size limits, otherwise Monte-Carlo (unless
/// `exact_only`, in which case the size error is returned). `b = 0` gives the
/// flagged point measure 1.
pub fn stable_ball_volume<T: Scalar>(
    g: &WeightedMultigraph<T>,
    samples: usize,
    seed: u64,
    exact_only: bool,
) -> Result<StableBallVolume<T>> {
    g.require_connected()?;
    match stable_ball_volume_exact(g) {
        Err(Error::ZeroBetti) => Ok(StableBallVolume::point()),
        Err(Error::SizeLimitExceeded { .. }) if !exact_only => stable_ball_volume_mc(g, samples, seed),
        other => other,
    }
}
