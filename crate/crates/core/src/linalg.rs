//! Exact integer elimination on small dense matrices.
//!
//! Entries of the matrices handled here are bounded by 1 in absolute value and
//! dimensions by [`crate::chains::MAX_ELEMENTS`], so every Bareiss
//! intermediate is a minor of at most 20 rows: |minor| <= 20^10 by Hadamard,
//! and products of two such values stay below `i128::MAX`.

pub type IntMatrix = Vec<Vec<i64>>;

/// Determinant of a square matrix by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Submatrix on the given rows and columns.
pub fn submatrix(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> IntMatrix {
    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect()
}

/// Indices of a maximal linearly independent set of rows, chosen greedily in
/// row order.
pub fn independent_rows(m: &[Vec<i64>], ncols: usize) -> Vec<usize> {
    // Echelon basis kept fraction-free: each stored row has a leading column.
    let mut echelon: Vec<(usize, Vec<i128>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, row) in m.iter().enumerate() {
        let mut v: Vec<i128> = row.iter().map(|&x| x as i128).collect();
        for (lead, e) in &echelon {
            if v[*lead] != 0 {
                let (a, b) = (e[*lead], v[*lead]);
                for j in 0..ncols {
                    v[j] = v[j] * a - e[j] * b;
                }
                normalize(&mut v);
            }
        }
        if let Some(lead) = v.iter().position(|&x| x != 0) {
            echelon.push((lead, v));
            chosen.push(idx);
        }
    }
    chosen
}

pub fn rank(m: &[Vec<i64>], ncols: usize) -> usize {
    independent_rows(m, ncols).len()
}

fn normalize(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Row-reduces `m` so that the columns `basis` form an identity matrix, with
/// row `k` carrying the unit entry of `basis[k]`. Pivots must be units, which
/// holds for totally unimodular input; returns `None` when the columns are
/// singular or a non-unit pivot shows up.
pub fn standard_form(m: &[Vec<i64>], basis: &[usize]) -> Option<IntMatrix> {
    let mut a: IntMatrix = m.to_vec();
    let r = a.len();
    if basis.len() != r {
        return None;
    }
    for (k, &col) in basis.iter().enumerate() {
        let p = (k..r).find(|&i| a[i][col] != 0)?;
        a.swap(k, p);
        let pivot = a[k][col];
        if pivot.abs() != 1 {
            return None;
        }
        if pivot == -1 {
            a[k].iter_mut().for_each(|x| *x = -*x);
        }
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != k && row[col] != 0 {
                let factor = row[col];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= factor * p;
                }
            }
        }
    }
    Some(a)
}

/// Pivots on entry `(row, col)` (which must be `±1`) and clears the rest of
/// the column.
pub fn pivot(m: &mut [Vec<i64>], row: usize, col: usize) {
    let p = m[row][col];
    debug_assert!(p.abs() == 1);
    if p == -1 {
        m[row].iter_mut().for_each(|x| *x = -*x);
    }
    let pivot_row = m[row].clone();
    for (i, r) in m.iter_mut().enumerate() {
        if i != row && r[col] != 0 {
            let factor = r[col];
            for (x, p) in r.iter_mut().zip(&pivot_row) {
                *x -= factor * p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cofactor expansion, independent of the elimination above.
    fn det_by_expansion(m: &[Vec<i64>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: IntMatrix = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] as i128 * det_by_expansion(&minor)
            })
            .sum()
    }

    #[test]
    fn bareiss_matches_expansion() {
        let cases: Vec<IntMatrix> = vec![
            vec![vec![1, 0, -1], vec![-1, -1, 0], vec![0, 1, 1]],
            vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
            vec![vec![0, 1], vec![1, 0]],
            vec![
                vec![1, 1, 1, 0],
                vec![1, -1, 0, 1],
                vec![0, 1, -1, 1],
                vec![1, 0, 1, -1],
            ],
            vec![vec![2, 3], vec![4, 5]],
        ];
        for m in cases {
            assert_eq!(determinant(&m), det_by_expansion(&m), "{m:?}");
        }
        assert_eq!(determinant(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]), 2);
    }

    #[test]
    fn rank_of_incidence_matrix() {
        let fig1 = vec![vec![1, 0, -1, -1], vec![-1, -1, 0, 0], vec![0, 1, 1, 1]];
        assert_eq!(rank(&fig1, 4), 2);
        assert_eq!(independent_rows(&fig1, 4), vec![0, 1]);
        assert_eq!(rank(&[vec![0, 0]], 2), 0);
    }

    #[test]
    fn standard_form_on_basis() {
        let a = vec![vec![1, 0, -1, -1], vec![-1, -1, 0, 0]];
        let s = standard_form(&a, &[0, 2]).unwrap();
        assert_eq!(s[0][0], 1);
        assert_eq!(s[0][2], 0);
        assert_eq!(s[1][2], 1);
        assert_eq!(s[1][0], 0);
        assert!(standard_form(&a, &[2, 3]).is_none());
    }
}
