//! Subshifts of finite type given by a 0/1 transition matrix `A`, studied
//! through the digraph `G_A` with an arc `i -> j` whenever `A[i][j] = 1`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{InequalityReport, Provenance, Sense};
use crate::scalar::Scalar;
use crate::spectral::spectral_radius;

/// Largest matrix size and word length for [`count_admissible_words`].
pub const WORD_COUNT_MAX_SIZE: usize = 12;
pub const WORD_COUNT_MAX_LENGTH: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct TransitionMatrix {
    rows: Vec<Vec<u8>>,
}

/// On-disk form: `{"n": int, "rows": [[0/1, ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    n: usize,
    rows: Vec<Vec<u8>>,
}

impl TryFrom<MatrixFile> for TransitionMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        if f.rows.len() != f.n {
            return Err(Error::NonSquare);
        }
        Self::new(f.rows)
    }
}

impl From<TransitionMatrix> for MatrixFile {
    fn from(m: TransitionMatrix) -> Self {
        Self {
            n: m.size(),
            rows: m.rows,
        }
    }
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::BadParameter("transition matrix must have at least one state".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NonSquare);
        }
        if rows.iter().flatten().any(|&x| x > 1) {
            return Err(Error::BadParameter("transition matrix entries must be 0 or 1".into()));
        }
        Ok(Self { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j] == 1
    }

    pub fn arc_count(&self) -> usize {
        self.rows.iter().flatten().filter(|&&x| x == 1).count()
    }

    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.size()).filter(move |&j| self.get(i, j))
    }

    /// Whether `G_A` is connected once arcs are taken as undirected edges.
    pub fn is_weakly_connected(&self) -> bool {
        let n = self.size();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if (self.get(i, j) || self.get(j, i)) && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Length of the shortest directed cycle, by a BFS from every state.
pub fn minimal_period(a: &TransitionMatrix) -> Result<usize> {
    let n = a.size();
    let mut best: Option<usize> = None;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(i) = queue.pop_front() {
            for j in a.successors(i) {
                if j == s {
                    let len = dist[i] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                    break 'bfs;
                }
                if dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
    }
    best.ok_or(Error::EmptySubshift)
}

/// `ln rho(A)`. A matrix without directed cycles defines an empty shift.
pub fn topological_entropy<T: Scalar>(a: &TransitionMatrix) -> Result<T> {
    minimal_period(a)?;
    let dense: Vec<Vec<T>> = a
        .rows
        .iter()
        .map(|r| r.iter().map(|&x| T::from_count(x as usize)).collect())
        .collect();
    // With a cycle rho >= 1; clamp round-off below 1.
    Ok(spectral_radius(&dense)?.value.max(T::one()).ln())
}

/// Number of admissible words of length `k`: `sum_ij (A^(k-1))_ij`.
pub fn count_admissible_words(a: &TransitionMatrix, k: usize) -> Result<u128> {
    if k == 0 {
        return Err(Error::BadParameter("word length must be at least 1".into()));
    }
    if a.size() > WORD_COUNT_MAX_SIZE || k > WORD_COUNT_MAX_LENGTH {
        return Err(Error::OracleBudgetExceeded);
    }
    let n = a.size();
    // Words ending in each state.
    let mut ending = vec![1u128; n];
    for _ in 1..k {
        let mut next = vec![0u128; n];
        for (i, &c) in ending.iter().enumerate() {
            for j in a.successors(i) {
                next[j] += c;
            }
        }
        ending = next;
    }
    Ok(ending.into_iter().sum())
}

/// `sum_ij A_ij - n + 1`, taken literally; it is the first Betti number of
/// `G_A` only when `G_A` is weakly connected.
pub fn betti_b_a(a: &TransitionMatrix) -> i64 {
    a.arc_count() as i64 - a.size() as i64 + 1
}

/// The star on `b + 1` states: state 0 exchanges with every other state.
pub fn equality_family(b: usize) -> Result<TransitionMatrix> {
    if b == 0 {
        return Err(Error::BadParameter("equality family needs b >= 1".into()));
    }
    let n = b + 1;
    let rows = (0..n)
        .map(|i| (0..n).map(|j| u8::from((i == 0) != (j == 0))).collect())
        .collect();
    TransitionMatrix::new(rows)
}

/// `h_top * T_min <= ln b_A`.
///
/// Skipped (not applicable) when `b_A <= 0` or `G_A` is disconnected, since
/// then `b_A` is not a Betti number.
pub fn check_prop6(a: &TransitionMatrix) -> Result<InequalityReport> {
    let statement = "h_top * T_min <= ln b_A";
    let h: f64 = topological_entropy(a)?;
    let period = minimal_period(a)?;
    let b_a = betti_b_a(a);
    let witnesses = json!({
        "h_top": h,
        "minimal_period": period,
        "b_a": b_a,
        "weakly_connected": a.is_weakly_connected(),
    });
    if b_a <= 0 {
        return Ok(InequalityReport::not_applicable(
            "prop6",
            statement,
            Sense::Upper,
            format!("b_A = {b_a} <= 0: formula is not a Betti number here"),
        )
        .with_witnesses(witnesses));
    }
    if !a.is_weakly_connected() {
        return Ok(InequalityReport::not_applicable(
            "prop6",
            statement,
            Sense::Upper,
            "G_A is disconnected: sum A - n + 1 is not its Betti number",
        )
        .with_witnesses(witnesses));
    }
    Ok(InequalityReport::evaluate(
        "prop6",
        statement,
        Sense::Upper,
        h * period as f64,
        (b_a as f64).ln(),
        Provenance::Exact,
    )
    .with_witnesses(witnesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ones(n: usize) -> TransitionMatrix {
        TransitionMatrix::new(vec![vec![1; n]; n]).unwrap()
    }

    fn cycle(n: usize) -> TransitionMatrix {
        TransitionMatrix::new((0..n).map(|i| (0..n).map(|j| u8::from(j == (i + 1) % n)).collect()).collect()).unwrap()
    }

    /// Brute-force word count: enumerate every word over the alphabet.
    fn words_by_enumeration(a: &TransitionMatrix, k: usize) -> u128 {
        let n = a.size();
        let mut count = 0;
        let total = n.pow(k as u32);
        for code in 0..total {
            let word: Vec<usize> = (0..k).map(|p| code / n.pow(p as u32) % n).collect();
            if word.windows(2).all(|w| a.get(w[0], w[1])) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn validation() {
        assert_eq!(TransitionMatrix::new(vec![vec![1, 0]]).unwrap_err(), Error::NonSquare);
        assert!(TransitionMatrix::new(vec![vec![2]]).is_err());
        assert!(TransitionMatrix::new(vec![]).is_err());
        let parsed: TransitionMatrix = serde_json::from_str(r#"{"n":2,"rows":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(parsed, equality_family(1).unwrap());
        assert!(serde_json::from_str::<TransitionMatrix>(r#"{"n":3,"rows":[[0,1],[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<TransitionMatrix>(r#"{"n":1,"rows":[[1]],"x":0}"#).is_err());
        assert_eq!(serde_json::to_string(&ones(1)).unwrap(), r#"{"n":1,"rows":[[1]]}"#);
    }

    #[test]
    fn entropy_examples() {
        for n in 1..=5 {
            let h: f64 = topological_entropy(&ones(n)).unwrap();
            assert!((h - (n as f64).ln()).abs() < 1e-12);
            assert!(topological_entropy::<f64>(&cycle(n)).unwrap().abs() < 1e-12);
        }
        let h: f64 = topological_entropy(&equality_family(2).unwrap()).unwrap();
        assert!((h - 0.5 * 2f64.ln()).abs() < 1e-12);
        let acyclic = TransitionMatrix::new(vec![vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(topological_entropy::<f64>(&acyclic).unwrap_err(), Error::EmptySubshift);
        assert_eq!(minimal_period(&acyclic).unwrap_err(), Error::EmptySubshift);
    }

    #[test]
    fn word_counts() {
        assert_eq!(count_admissible_words(&ones(2), 3).unwrap(), 8);
        assert_eq!(count_admissible_words(&cycle(3), 4).unwrap(), 3);
        let star = equality_family(2).unwrap();
        assert_eq!(count_admissible_words(&star, 3).unwrap(), words_by_enumeration(&star, 3));
        assert_eq!(count_admissible_words(&star, 1).unwrap(), 3);
        assert_eq!(count_admissible_words(&ones(13), 2).unwrap_err(), Error::OracleBudgetExceeded);
        assert_eq!(count_admissible_words(&ones(2), 31).unwrap_err(), Error::OracleBudgetExceeded);
        assert_eq!(count_admissible_words(&ones(12), 30).unwrap(), 12u128.pow(30));
    }

    #[test]
    fn periods_and_betti() {
        let diag = TransitionMatrix::new(vec![vec![0, 1, 0], vec![0, 1, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(minimal_period(&diag).unwrap(), 1);
        for b in 1..=6 {
            let star = equality_family(b).unwrap();
            assert_eq!(minimal_period(&star).unwrap(), 2);
            assert_eq!(betti_b_a(&star), b as i64);
        }
        for n in 1..=6 {
            assert_eq!(minimal_period(&cycle(n)).unwrap(), n);
            assert_eq!(betti_b_a(&cycle(n)), 1);
            assert_eq!(betti_b_a(&ones(n)), (n * n - n + 1) as i64);
        }
        assert!(equality_family(0).is_err());
        assert_eq!(equality_family(1).unwrap().rows(), &[vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn period_bound_examples() {
        for b in 1..=8 {
            let r = check_prop6(&equality_family(b).unwrap()).unwrap();
            assert!(r.equality, "b={b}: {r:?}");
        }
        let r = check_prop6(&ones(3)).unwrap();
        assert!((r.left.unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!((r.right.unwrap() - 7f64.ln()).abs() < 1e-12);
        let r = check_prop6(&cycle(5)).unwrap();
        assert!(r.equality && r.holds == Some(true));
        // Two states with a full shift plus an isolated state.
        let split = TransitionMatrix::new(vec![vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 0, 0], vec![0; 4]]).unwrap();
        assert!(!check_prop6(&split).unwrap().applicable);
        let sparse = TransitionMatrix::new(vec![vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 0]]).unwrap();
        assert!(!check_prop6(&sparse).unwrap().applicable);
    }

    #[test]
    fn word_growth_tracks_entropy() {
        // Primitive matrices: ln N(k) / k converges at rate O(1/k).
        let golden = TransitionMatrix::new(vec![vec![1, 1], vec![1, 0]]).unwrap();
        for a in [ones(2), ones(3), golden] {
            let h: f64 = topological_entropy(&a).unwrap();
            let est = (count_admissible_words(&a, 25).unwrap() as f64).ln() / 25.0;
            assert!((est - h).abs() <= 0.05, "{est} vs {h}");
        }
    }

    fn random_matrix(n: usize, density: f64, rng: &mut ChaCha8Rng) -> TransitionMatrix {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| u8::from(rng.random_bool(density))).collect())
            .collect();
        TransitionMatrix::new(rows).unwrap()
    }

    proptest! {
        #[test]
        fn random_matrices_satisfy_period_bound(seed in any::<u64>(), n in 1usize..=8, density in 0.1f64..0.9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(n, density, &mut rng);
            if let Ok(r) = check_prop6(&a) {
                prop_assert!(!r.violated(), "{:?} {:?}", a, r);
                let rho = topological_entropy::<f64>(&a).unwrap().exp();
                prop_assert!(rho >= 1.0);
                prop_assert!(minimal_period(&a).unwrap() <= n);
            }
        }

        #[test]
        fn word_counts_match_enumeration(seed in any::<u64>(), n in 1usize..=4, k in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(n, 0.5, &mut rng);
            prop_assert_eq!(count_admissible_words(&a, k).unwrap(), words_by_enumeration(&a, k));
        }
    }
}
