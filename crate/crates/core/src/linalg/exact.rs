use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::symbolic::Poly;

pub type RatMatrix = Vec<Vec<BigRational>>;

/// Scales every row to integer entries; row scaling preserves rank.
fn integer_rows(m: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) elimination to row echelon form.
///
/// Returns the rank, the number of row swaps and the last pivot, which for a
/// full-rank square input is the determinant up to the swap sign.
fn bareiss(mut a: Vec<Vec<BigInt>>) -> (usize, usize, BigInt) {
    let m = a.len();
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut swaps = 0;
    for c in 0..n {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            swaps += 1;
        }
        for i in rank + 1..m {
            for j in c + 1..n {
                let v = &a[i][j] * &a[rank][c] - &a[i][c] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    (rank, swaps, prev)
}

pub fn rank_exact_rational(m: &[Vec<BigRational>]) -> usize {
    bareiss(integer_rows(m)).0
}

pub fn det_exact(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return BigRational::one();
    }
    let scale = m.iter().fold(BigInt::one(), |acc, row| {
        acc * row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
    });
    let (rank, swaps, pivot) = bareiss(integer_rows(m));
    if rank < n {
        return BigRational::zero();
    }
    let det = BigRational::new(pivot, scale);
    if swaps % 2 == 1 {
        -det
    } else {
        det
    }
}

/// Rank of a polynomial matrix over the rational-function field by
/// fraction-free elimination with exact polynomial division.
///
/// Returns `None` if an intermediate division fails to be exact, which only
/// happens on malformed input; callers fall back to generic-point sampling.
pub fn rank_fraction_free_poly(m: &[Vec<Poly>]) -> Option<usize> {
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut prev = Poly::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = a[i][j].mul(&a[rank][c]).sub(&a[i][c].mul(&a[rank][j]));
                a[i][j] = v.div_exact(&prev)?;
            }
            a[i][c] = Poly::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    Some(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = vec![
            vec![q(2, 1), q(1, 3), q(0, 1)],
            vec![q(-1, 2), q(4, 1), q(5, 7)],
            vec![q(3, 1), q(0, 1), q(1, 1)],
        ];
        // 2*(4*1 - 5/7*0) - 1/3*(-1/2*1 - 5/7*3) + 0
        let expected = q(2, 1) * q(4, 1) - q(1, 3) * (q(-1, 2) - q(15, 7));
        assert_eq!(det_exact(&m), expected);
    }

    #[test]
    fn determinant_sign_under_swap() {
        let m = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(det_exact(&m), q(-1, 1));
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = vec![
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(2, 1), q(4, 1), q(6, 1)],
            vec![q(0, 1), q(1, 5), q(1, 1)],
        ];
        assert_eq!(rank_exact_rational(&m), 2);
    }
}
