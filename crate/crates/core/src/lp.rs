//! Dense tableau simplex for `max c.x` subject to `A x <= b`, `x >= 0`, with
//! `b >= 0` so the origin is a feasible starting vertex.
//!
//! Pivoting uses the largest reduced cost and falls back to Bland's rule once
//! a run of degenerate pivots suggests cycling.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const PIVOT_BUDGET: usize = 200_000;
const DEGENERATE_STREAK: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    /// Shadow price of each row; feasible for the dual `min b.y, A^T y >= c, y >= 0`.
    pub duals: Vec<T>,
    pub objective: T,
    pub pivots: usize,
}

/// Pivot and feasibility tolerance: about `eps^0.6` (4e-10 for `f64`).
pub fn lp_tolerance<T: Scalar>() -> T {
    T::epsilon().powf(T::lit(0.6))
}

pub fn maximize<T: Scalar>(c: &[T], a: &[Vec<T>], b: &[T]) -> Result<LpSolution<T>> {
    let n = c.len();
    let m = b.len();
    if a.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.iter().map(Vec::len).find(|&l| l != n).unwrap_or(a.len()),
        });
    }
    if b.iter().any(|&v| !(v >= T::zero())) {
        return Err(Error::BadParameter("right-hand side must be nonnegative".into()));
    }
    let tol = lp_tolerance::<T>();
    let width = n + m;
    let mut rows: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut r = a[i].clone();
            r.extend((0..m).map(|j| if i == j { T::one() } else { T::zero() }));
            r.push(b[i]);
            r
        })
        .collect();
    // Reduced costs; the last entry holds minus the objective value.
    let mut cost: Vec<T> = c.to_vec();
    cost.extend(std::iter::repeat_n(T::zero(), m + 1));
    let mut basis: Vec<usize> = (n..width).collect();

    let mut streak = 0;
    for pivots in 0..PIVOT_BUDGET {
        let bland = streak >= DEGENERATE_STREAK;
        let entering = if bland {
            (0..width).find(|&j| cost[j] > tol)
        } else {
            (0..width)
                .filter(|&j| cost[j] > tol)
                .max_by(|&i, &j| cost[i].partial_cmp(&cost[j]).unwrap().then(j.cmp(&i)))
        };
        let Some(q) = entering else {
            let mut x = vec![T::zero(); width];
            for (i, &v) in basis.iter().enumerate() {
                x[v] = rows[i][width];
            }
            x.truncate(n);
            let duals = (0..m).map(|i| (-cost[n + i]).max(T::zero())).collect();
            return Ok(LpSolution {
                x,
                duals,
                objective: -cost[width],
                pivots,
            });
        };

        let mut leave: Option<(usize, T)> = None;
        for (i, row) in rows.iter().enumerate() {
            if row[q] > tol {
                let ratio = row[width] / row[q];
                let better = match leave {
                    None => true,
                    Some((k, best)) => {
                        if bland {
                            ratio < best - tol || (ratio <= best + tol && basis[i] < basis[k])
                        } else {
                            ratio < best - tol || (ratio <= best + tol && row[q] > rows[k][q])
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, ratio)) = leave else {
            return Err(Error::Unbounded);
        };
        streak = if ratio <= tol { streak + 1 } else { 0 };

        let pivot = rows[p][q];
        for v in rows[p].iter_mut() {
            *v = *v / pivot;
        }
        let prow = rows[p].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != p {
                let f = row[q];
                if f != T::zero() {
                    for (v, &pv) in row.iter_mut().zip(&prow) {
                        *v = *v - f * pv;
                    }
                }
            }
        }
        let f = cost[q];
        for (v, &pv) in cost.iter_mut().zip(&prow) {
            *v = *v - f * pv;
        }
        basis[p] = q;
    }
    Err(Error::NoConvergence(PIVOT_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18: optimum 36 at (2, 6).
        let s = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((s.objective - 36.0_f64).abs() < 1e-12);
        assert!((s.x[0] - 2.0_f64).abs() < 1e-12 && (s.x[1] - 6.0_f64).abs() < 1e-12);
        // Strong duality: b.y equals the optimum.
        let dual: f64 = [4.0, 12.0, 18.0].iter().zip(&s.duals).map(|(b, y)| b * y).sum();
        assert!((dual - 36.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_and_bad_rhs() {
        assert_eq!(maximize(&[1.0, 0.0], &[vec![0.0, 1.0]], &[1.0]).unwrap_err(), Error::Unbounded);
        assert!(matches!(
            maximize(&[1.0], &[vec![1.0]], &[-1.0]).unwrap_err(),
            Error::BadParameter(_)
        ));
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Many constraints tight at the origin.
        let a = vec![
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 1.0, 0.0],
            vec![1.0, 1.0, -1.0],
            vec![0.0, 0.0, 1.0],
        ];
        let s = maximize(&[1.0, 1.0, 1.0], &a, &[0.0, 0.0, 0.0, 2.0]).unwrap();
        assert!((s.objective - 4.0_f64).abs() < 1e-12, "{}", s.objective);
    }

    #[test]
    fn single_precision() {
        let s = maximize(&[1.0f32, 1.0], &[vec![1.0, 2.0], vec![2.0, 1.0]], &[3.0, 3.0]).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-5);
    }
}
