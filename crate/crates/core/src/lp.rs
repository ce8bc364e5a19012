//! Exact feasibility for `A x = b, x >= 0` by phase-one simplex over the
//! rationals with Bland's rule.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A point of `{x >= 0 : a x = b}`, or `None` when the system is infeasible.
pub fn nonnegative_solution(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let n = a.first().map(Vec::len).unwrap_or(0);
    let width = n + rows;
    // tableau rows: [original | artificial | rhs]
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut r: Vec<BigRational> = row.iter().map(|x| if flip { -x.clone() } else { x.clone() }).collect();
        r.extend((0..rows).map(|k| {
            if k == i {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        }));
        r.push(if flip { -rhs.clone() } else { rhs.clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..width).collect();
    // reduced costs of "minimize the sum of artificials"
    let mut cost: Vec<BigRational> = vec![BigRational::zero(); width + 1];
    for r in &t {
        for j in 0..n {
            cost[j] -= &r[j];
        }
        cost[width] -= &r[width];
    }
    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, r) in t.iter().enumerate() {
            if r[enter].is_positive() {
                let ratio = &r[width] / &r[enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // phase one is bounded below by zero
        let (p, _) = leave.expect("phase-one objective is bounded");
        let pivot = t[p][enter].clone();
        for x in t[p].iter_mut() {
            *x /= &pivot;
        }
        let pivot_row = t[p].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != p && !r[enter].is_zero() {
                let factor = r[enter].clone();
                for (x, y) in r.iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
        let factor = cost[enter].clone();
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            *x -= &factor * y;
        }
        basis[p] = enter;
    }
    if !cost[width].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][width].clone();
        }
    }
    Some(x)
}

/// The primitive integer vector on the ray of a rational vector.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        scaled
    } else {
        scaled.into_iter().map(|x| x / &g).collect()
    }
}

pub(crate) fn rational(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| rational(x)).collect()).collect()
    }

    fn check(a: &[Vec<BigRational>], b: &[BigRational], x: &[BigRational]) {
        assert!(x.iter().all(|v| !v.is_negative()));
        for (row, rhs) in a.iter().zip(b) {
            let lhs: BigRational = row.iter().zip(x).map(|(p, q)| p * q).sum();
            assert_eq!(&lhs, rhs);
        }
    }

    #[test]
    fn feasible_system() {
        let a = q(&[&[1, 1, 0], &[0, 1, 1]]);
        let b = vec![rational(2), rational(3)];
        let x = nonnegative_solution(&a, &b).unwrap();
        check(&a, &b, &x);
    }

    #[test]
    fn negative_right_hand_side() {
        let a = q(&[&[1, -1], &[1, 1]]);
        let b = vec![rational(-1), rational(3)];
        let x = nonnegative_solution(&a, &b).unwrap();
        check(&a, &b, &x);
        assert_eq!(x, vec![rational(1), rational(2)]);
    }

    #[test]
    fn infeasible_system() {
        let a = q(&[&[1, 1], &[1, 1]]);
        assert!(nonnegative_solution(&a, &[rational(1), rational(2)]).is_none());
        let a = q(&[&[1, 1]]);
        assert!(nonnegative_solution(&a, &[rational(-1)]).is_none());
    }

    #[test]
    fn degenerate_cycle_example_terminates() {
        // Beale-style degenerate system; Bland's rule must not cycle.
        let a = q(&[&[1, 0, 0, 1, -2, -1], &[0, 1, 0, 3, 1, 0], &[0, 0, 1, 0, 0, 1]]);
        let b = vec![rational(0), rational(0), rational(1)];
        let x = nonnegative_solution(&a, &b).unwrap();
        check(&a, &b, &x);
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::new(BigInt::from(3), BigInt::from(4)),
            rational(0),
        ];
        assert_eq!(
            primitive_integer(&v),
            vec![BigInt::from(2), BigInt::from(3), BigInt::from(0)]
        );
    }
}
