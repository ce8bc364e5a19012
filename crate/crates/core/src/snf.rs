//! Smith normal form over the integers, keeping the column transform.
//!
//! For a matrix `A` whose rows span a lattice `L ⊆ Z^n`, [`smith_normal_form`]
//! finds unimodular `U`, `V` with `U A V = D` diagonal. Only `V` and `V^{-1}`
//! are kept: `x ∈ L` exactly when `(x V)_i ≡ 0 (mod d_i)` for every `i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    /// Nonnegative diagonal entries `d_0 | d_1 | ...`, one per column.
    pub diagonal: Vec<BigInt>,
    pub v: Vec<Vec<BigInt>>,
    pub v_inv: Vec<Vec<BigInt>>,
}

pub fn smith_normal_form(rows: &[Vec<i64>], ncols: usize) -> Smith {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut v = identity(ncols);
    let mut v_inv = identity(ncols);
    let nrows = a.len();
    let mut diagonal = vec![BigInt::zero(); ncols];

    for t in 0..nrows.min(ncols) {
        loop {
            let Some((pi, pj)) = min_entry(&a, t) else {
                return finish(diagonal, v, v_inv);
            };
            a.swap(t, pi);
            swap_columns(&mut a, &mut v, &mut v_inv, t, pj);

            let mut dirty = false;
            for i in t + 1..nrows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    let pivot_row = a[t].clone();
                    for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * p;
                    }
                    dirty |= !a[i][t].is_zero();
                }
            }
            for j in t + 1..ncols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    add_column_multiple(&mut a, &mut v, &mut v_inv, j, t, &q);
                    dirty |= !a[t][j].is_zero();
                }
            }
            if dirty {
                continue;
            }
            let pivot = a[t][t].clone();
            let offender = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let row = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&row) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        diagonal[t] = a[t][t].abs();
    }
    finish(diagonal, v, v_inv)
}

fn finish(diagonal: Vec<BigInt>, v: Vec<Vec<BigInt>>, v_inv: Vec<Vec<BigInt>>) -> Smith {
    Smith { diagonal, v, v_inv }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Position of a nonzero entry of least absolute value in the trailing block.
fn min_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_columns(a: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], v_inv: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut().chain(v.iter_mut()) {
        row.swap(i, j);
    }
    v_inv.swap(i, j);
}

/// Column `j -= q * column t`, with `V <- V E` and `V^{-1} <- E^{-1} V^{-1}`.
fn add_column_multiple(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    j: usize,
    t: usize,
    q: &BigInt,
) {
    for row in a.iter_mut().chain(v.iter_mut()) {
        let delta = q * &row[t];
        row[j] -= delta;
    }
    let row_j = v_inv[j].clone();
    for (x, y) in v_inv[t].iter_mut().zip(&row_j) {
        *x += q * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        a.iter()
            .map(|r| {
                (0..b[0].len())
                    .map(|j| r.iter().zip(b).map(|(x, row)| x * &row[j]).sum())
                    .collect()
            })
            .collect()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn textbook_example() {
        let s = smith_normal_form(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        assert_eq!(s.diagonal, ints(&[2, 6, 12]));
        assert_eq!(mul(&s.v, &s.v_inv), identity(3));
    }

    #[test]
    fn transformed_rows_vanish_modulo_the_diagonal() {
        let rows = vec![
            vec![1, 0, -1, -1],
            vec![-1, -1, 0, 0],
            vec![1, -1, 1, 0],
            vec![0, 0, -1, 1],
        ];
        let s = smith_normal_form(&rows, 4);
        assert_eq!(s.diagonal.iter().product::<BigInt>(), BigInt::from(5));
        let a: Vec<Vec<BigInt>> = rows.iter().map(|r| ints(r)).collect();
        for row in mul(&a, &s.v) {
            for (x, d) in row.iter().zip(&s.diagonal) {
                assert!(d.is_zero() && x.is_zero() || !d.is_zero() && x.is_multiple_of(d));
            }
        }
        assert_eq!(mul(&s.v_inv, &s.v), identity(4));
    }

    #[test]
    fn divisibility_chain_and_rank_deficiency() {
        let s = smith_normal_form(&[vec![4, 0], vec![0, 6]], 2);
        assert_eq!(s.diagonal, ints(&[2, 12]));
        let s = smith_normal_form(&[vec![1, 1]], 2);
        assert_eq!(s.diagonal, ints(&[1, 0]));
        let s = smith_normal_form(&[], 0);
        assert!(s.diagonal.is_empty());
    }
}
