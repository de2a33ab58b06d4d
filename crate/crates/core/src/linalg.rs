//! Small dense linear algebra: exact integer elimination (Bareiss) and a
//! partial-pivot LU determinant for real matrices.

use crate::scalar::Scalar;

/// Rank over the rationals of a set of integer row vectors.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    bareiss_echelon(&mut m).0
}

/// Determinant of a square integer matrix, computed exactly.
pub fn integer_determinant(matrix: &[Vec<i64>]) -> i128 {
    let n = matrix.len();
    assert!(matrix.iter().all(|r| r.len() == n), "square matrix required");
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let (rank, sign) = bareiss_echelon(&mut m);
    if rank < n {
        0
    } else {
        sign * m[n - 1][n - 1]
    }
}

/// Fraction-free Gaussian elimination in place. Returns the rank and the sign
/// of the row permutation applied. After a full-rank square run, the last
/// pivot equals the determinant up to that sign.
fn bareiss_echelon(m: &mut [Vec<i128>]) -> (usize, i128) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut sign = 1i128;
    let mut prev = 1i128;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
    }
    (r, sign)
}

/// Greedily picks rows that increase the rank, in order. Stops once `target`
/// rows have been chosen.
pub fn independent_rows(rows: &[Vec<i64>], target: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if chosen.len() == target {
            break;
        }
        basis.push(r.clone());
        if integer_rank(&basis) == basis.len() {
            chosen.push(i);
        } else {
            basis.pop();
        }
    }
    chosen
}

/// Determinant by LU decomposition with partial pivoting.
pub fn determinant<T: Scalar>(matrix: &[Vec<T>]) -> T {
    let n = matrix.len();
    let mut a: Vec<Vec<T>> = matrix.to_vec();
    let mut det = T::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
            .unwrap();
        if a[p][c] == T::zero() {
            return T::zero();
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = det * a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                let v = a[c][j];
                a[i][j] = a[i][j] - f * v;
            }
        }
    }
    det
}
