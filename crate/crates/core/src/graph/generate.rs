//! Graph families used as extremal examples and as randomized test corpora.
//!
//! Vertex ids are `v0, v1, ...` and edge ids `e0, e1, ...` in creation order.
//! Random generators are deterministic for a given seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EdgeSpec, WeightedMultigraph};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Generator selection, mirroring the CLI `--kind` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Bouquet { weights: Vec<f64> },
    Theta { weights: Vec<f64> },
    Complete { n: usize },
    Cycle { n: usize },
    RandomRegular { n: usize, valence: usize },
    RandomWeighted { betti: (usize, usize), weight: (f64, f64) },
}

/// Builds a graph of the requested kind; `seed` only matters for random kinds.
pub fn generate<T: Scalar>(kind: &GraphKind, seed: u64) -> Result<WeightedMultigraph<T>> {
    let cast = |w: &[f64]| w.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
    match kind {
        GraphKind::Bouquet { weights } => bouquet(&cast(weights)),
        GraphKind::Theta { weights } => theta(&cast(weights)),
        GraphKind::Complete { n } => complete(*n),
        GraphKind::Cycle { n } => cycle(*n),
        GraphKind::RandomRegular { n, valence } => random_regular(*n, *valence, seed),
        GraphKind::RandomWeighted { betti, weight } => random_weighted(*betti, *weight, seed),
    }
}

fn vertex_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn build<T: Scalar>(n: usize, pairs: &[(usize, usize)], weights: &[T]) -> Result<WeightedMultigraph<T>> {
    let specs: Vec<EdgeSpec<T>> = pairs
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (&(u, v), &w))| EdgeSpec::new(format!("e{i}"), format!("v{u}"), format!("v{v}"), w))
        .collect();
    WeightedMultigraph::new(&vertex_names(n), &specs)
}

/// One vertex carrying one loop per weight.
pub fn bouquet<T: Scalar>(weights: &[T]) -> Result<WeightedMultigraph<T>> {
    if weights.is_empty() {
        return Err(Error::InfeasibleParameters("bouquet needs at least one loop".into()));
    }
    build(1, &vec![(0, 0); weights.len()], weights)
}

pub fn unit_bouquet<T: Scalar>(b: usize) -> Result<WeightedMultigraph<T>> {
    bouquet(&vec![T::one(); b])
}

/// Two vertices joined by one parallel edge per weight, all oriented `v0 -> v1`.
pub fn theta<T: Scalar>(weights: &[T]) -> Result<WeightedMultigraph<T>> {
    if weights.is_empty() {
        return Err(Error::InfeasibleParameters("theta needs at least one edge".into()));
    }
    build(2, &vec![(0, 1); weights.len()], weights)
}

/// Unit-weight complete graph.
pub fn complete<T: Scalar>(n: usize) -> Result<WeightedMultigraph<T>> {
    if n == 0 {
        return Err(Error::InfeasibleParameters("complete graph needs n >= 1".into()));
    }
    let pairs: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    build(n, &pairs, &vec![T::one(); pairs.len()])
}

/// Unit-weight cycle on `n` vertices (`n = 1` is a single loop).
pub fn cycle<T: Scalar>(n: usize) -> Result<WeightedMultigraph<T>> {
    if n == 0 {
        return Err(Error::InfeasibleParameters("cycle needs n >= 1".into()));
    }
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(n, &pairs, &vec![T::one(); n])
}

/// Two loops of weight `loop_weight` joined by a bridge of weight `bridge_weight`.
pub fn dumbbell<T: Scalar>(loop_weight: T, bridge_weight: T) -> Result<WeightedMultigraph<T>> {
    build(
        2,
        &[(0, 0), (0, 1), (1, 1)],
        &[loop_weight, bridge_weight, loop_weight],
    )
}

/// Connected simple `valence`-regular unit graph on `n` vertices, sampled by
/// the pairing model with rejection.
pub fn random_regular<T: Scalar>(n: usize, valence: usize, seed: u64) -> Result<WeightedMultigraph<T>> {
    if n == 0 || valence == 0 || valence >= n || (n * valence) % 2 != 0 {
        return Err(Error::InfeasibleParameters(format!(
            "no connected simple {valence}-regular graph on {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: usize = 100_000;
    for _ in 0..ATTEMPTS {
        let mut stubs: Vec<usize> = (0..n).flat_map(|x| std::iter::repeat_n(x, valence)).collect();
        stubs.shuffle(&mut rng);
        let mut pairs: Vec<(usize, usize)> = stubs
            .chunks(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        if pairs.iter().any(|&(a, b)| a == b) {
            continue;
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let g = build(n, &pairs, &vec![T::one(); pairs.len()])?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::InfeasibleParameters(format!(
        "pairing model failed {ATTEMPTS} times for n={n}, valence={valence}"
    )))
}

/// Random connected multigraph: Betti number uniform in `betti` (inclusive),
/// between 1 and `b + 2` vertices on a random tree, plus `b` extra edges
/// (loops and parallel edges allowed), weights uniform in `weight`.
pub fn random_weighted<T: Scalar>(
    betti: (usize, usize),
    weight: (f64, f64),
    seed: u64,
) -> Result<WeightedMultigraph<T>> {
    let (b_lo, b_hi) = betti;
    let (w_lo, w_hi) = weight;
    if b_lo > b_hi {
        return Err(Error::InfeasibleParameters("empty Betti range".into()));
    }
    if !(w_lo > 0.0 && w_lo <= w_hi && w_hi.is_finite()) {
        return Err(Error::InfeasibleParameters("weight range must satisfy 0 < lo <= hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = rng.random_range(b_lo..=b_hi);
    let n = rng.random_range(1..=b + 2);
    let mut pairs = Vec::with_capacity(n - 1 + b);
    for x in 1..n {
        pairs.push((rng.random_range(0..x), x));
    }
    for _ in 0..b {
        pairs.push((rng.random_range(0..n), rng.random_range(0..n)));
    }
    let weights: Vec<T> = pairs
        .iter()
        .map(|_| {
            if w_lo == w_hi {
                T::lit(w_lo)
            } else {
                T::lit(rng.random_range(w_lo..=w_hi))
            }
        })
        .collect();
    build(n, &pairs, &weights)
}
