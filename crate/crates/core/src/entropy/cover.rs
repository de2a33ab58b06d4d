use std::collections::HashMap;

use super::DirectedEdgeSystem;
use crate::error::{Error, Result};
use crate::graph::WeightedMultigraph;
use crate::scalar::Scalar;

/// Default cap on distinct expansion states for [`cover_ball_volume`].
pub const FRONTIER_BUDGET: usize = 100_000_000;

/// Ball volume in the universal cover, memoised on `(directed edge, how many
/// edges of each distinct weight were already used)`. Two paths with the same
/// counts have the same remaining radius, so their subtrees are identical.
struct Expansion<'a, T> {
    system: &'a DirectedEdgeSystem<T>,
    class: Vec<usize>,
    class_weight: Vec<T>,
    radius: T,
    memo: HashMap<(usize, Vec<u32>), T>,
    budget: usize,
}

impl<T: Scalar> Expansion<'_, T> {
    fn remaining(&self, counts: &[u32]) -> T {
        let used: T = counts
            .iter()
            .zip(&self.class_weight)
            .map(|(&c, &w)| T::from_count(c as usize) * w)
            .sum();
        self.radius - used
    }

    fn value(&mut self, root: (usize, Vec<u32>)) -> Result<T> {
        if let Some(&v) = self.memo.get(&root) {
            return Ok(v);
        }
        // Explicit post-order so deep radii do not exhaust the call stack.
        let mut stack: Vec<((usize, Vec<u32>), bool)> = vec![(root.clone(), false)];
        while let Some((state, expanded)) = stack.pop() {
            if self.memo.contains_key(&state) {
                continue;
            }
            let (d, ref counts) = state;
            let budget = self.remaining(counts);
            let w = self.system.weight(d);
            let mut child_counts = counts.clone();
            child_counts[self.class[d]] += 1;
            let passes = budget > w;
            if !expanded && passes {
                stack.push((state.clone(), true));
                for &d2 in self.system.successors(d).iter().rev() {
                    let key = (d2, child_counts.clone());
                    if !self.memo.contains_key(&key) {
                        stack.push((key, false));
                    }
                }
                continue;
            }
            let mut total = w.min(budget);
            if passes {
                for &d2 in self.system.successors(d) {
                    total = total + self.memo[&(d2, child_counts.clone())];
                }
            }
            self.memo.insert(state, total);
            if self.memo.len() > self.budget {
                return Err(Error::FrontierBudgetExceeded(self.budget));
            }
        }
        Ok(self.memo[&root])
    }
}

/// Total length of the radius-`radius` ball around a lift of `base` in the
/// universal cover, with partial edges counted fractionally.
pub fn cover_ball_volume<T: Scalar>(g: &WeightedMultigraph<T>, base: usize, radius: T) -> Result<T> {
    cover_ball_volume_with_budget(g, base, radius, FRONTIER_BUDGET)
}

pub fn cover_ball_volume_with_budget<T: Scalar>(
    g: &WeightedMultigraph<T>,
    base: usize,
    radius: T,
    budget: usize,
) -> Result<T> {
    g.require_connected()?;
    if base >= g.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{base}")));
    }
    if !(radius >= T::zero()) {
        return Err(Error::BadParameter("radius must be nonnegative".into()));
    }
    let system = DirectedEdgeSystem::new(g);
    let mut distinct: Vec<T> = Vec::new();
    for e in g.edges() {
        if !distinct.contains(&e.weight) {
            distinct.push(e.weight);
        }
    }
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let class = (0..system.len())
        .map(|d| distinct.iter().position(|&w| w == system.weight(d)).unwrap())
        .collect();
    let mut exp = Expansion {
        system: &system,
        class,
        class_weight: distinct.clone(),
        radius,
        memo: HashMap::new(),
        budget,
    };
    let zero = vec![0u32; distinct.len()];
    let mut total = T::zero();
    if radius > T::zero() {
        for d in system.leaving(base).collect::<Vec<_>>() {
            total = total + exp.value((d, zero.clone()))?;
        }
    }
    Ok(total)
}

/// Least-squares growth rate of `ln Vol B(R)` over 20 radii evenly spread on
/// `[R_max / 2, R_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual of the fit.
    pub residual: T,
    pub samples: Vec<(T, T)>,
    /// Set when the Betti number is below 2 and no exponential growth exists.
    pub degenerate: bool,
}

pub fn entropy_estimate<T: Scalar>(g: &WeightedMultigraph<T>, base: usize, r_max: T) -> Result<EntropyEstimate<T>> {
    entropy_estimate_with_budget(g, base, r_max, FRONTIER_BUDGET)
}

pub fn entropy_estimate_with_budget<T: Scalar>(
    g: &WeightedMultigraph<T>,
    base: usize,
    r_max: T,
    budget: usize,
) -> Result<EntropyEstimate<T>> {
    const POINTS: usize = 20;
    if !(r_max > T::zero() && r_max.is_finite()) {
        return Err(Error::BadParameter("r_max must be positive".into()));
    }
    let half = r_max / T::lit(2.0);
    let step = half / T::from_count(POINTS - 1);
    let mut samples = Vec::with_capacity(POINTS);
    for i in 0..POINTS {
        let r = half + step * T::from_count(i);
        samples.push((r, cover_ball_volume_with_budget(g, base, r, budget)?));
    }
    let pts: Vec<(T, T)> = samples.iter().map(|&(r, v)| (r, v.max(T::min_positive_value()).ln())).collect();
    let n = T::from_count(POINTS);
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: T = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<T>()
        / n)
        .sqrt();
    Ok(EntropyEstimate {
        slope,
        intercept,
        residual,
        samples,
        degenerate: g.betti_number() < 2,
    })
}
