//! Generalized eigenproblems `A z = lambda B z` for possibly singular
//! pencils, solved through the exact determinantal polynomial at a rational
//! point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{shared, to_f64_matrix, OperatorError};
use crate::linalg::{det_exact, rank_exact_rational, smallest_singular_vectors, RatMatrix, UPoly};
use crate::symbolic::PointState;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilKind {
    Regular,
    /// `det(A - lambda B)` vanishes identically.
    Singular { normal_rank: usize },
}

#[derive(Clone, Debug)]
pub struct PencilPair {
    pub lambda: Complex64,
    /// Unit eigenvector outside the common kernel of `A` and `B`; absent for
    /// complex eigenvalues or when none exists.
    pub vector: Option<DVector<f64>>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct PencilSolution {
    pub kind: PencilKind,
    pub rank_a: usize,
    pub rank_b: usize,
    pub normal_rank: usize,
    pub common_kernel_dim: usize,
    /// Monic gcd of the maximal nonvanishing minors of `A - lambda B`.
    pub characteristic: UPoly,
    pub finite: Vec<PencilPair>,
}

impl PencilSolution {
    /// Finite eigenpairs with a real eigenvector off the common kernel.
    pub fn regular_pairs(&self) -> Vec<&PencilPair> {
        self.finite.iter().filter(|p| p.vector.is_some()).collect()
    }

    pub fn real_eigenvalues(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.finite.iter().filter(|p| p.lambda.im == 0.0).map(|p| p.lambda.re).collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

fn shifted(a: &RatMatrix, b: &RatMatrix, lambda: &BigRational) -> RatMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - lambda * y).collect())
        .collect()
}

fn sample_lambdas(count: usize) -> Vec<BigRational> {
    (0..count as i64)
        .map(|j| BigRational::new((3 * j + 1).into(), 7.into()))
        .collect()
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

fn minor(m: &RatMatrix, rows: &[usize], cols: &[usize]) -> RatMatrix {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

/// Finite spectrum of the pencil `(A, B)` of square rational matrices.
pub fn pencil_solve(a: &RatMatrix, b: &RatMatrix) -> PencilSolution {
    let n = a.len();
    let xs = sample_lambdas(n + 1);
    let shifts: Vec<RatMatrix> = xs.iter().map(|l| shifted(a, b, l)).collect();
    let normal_rank = shifts.iter().map(|m| rank_exact_rational(m)).max().unwrap_or(0);

    let characteristic = if normal_rank == n {
        let ys: Vec<BigRational> = shifts.iter().map(|m| det_exact(m)).collect();
        UPoly::interpolate(&xs, &ys).monic()
    } else if normal_rank == 0 {
        UPoly::zero()
    } else {
        let r = normal_rank;
        let idx = subsets(n, r);
        let mut g = UPoly::zero();
        for rows in &idx {
            for cols in &idx {
                let ys: Vec<BigRational> = shifts[..=r]
                    .iter()
                    .map(|m| det_exact(&minor(m, rows, cols)))
                    .collect();
                let p = UPoly::interpolate(&xs[..=r], &ys);
                if !p.is_zero() {
                    g = if g.is_zero() { p.monic() } else { g.gcd(&p) };
                }
            }
        }
        g
    };

    let stacked: RatMatrix = a.iter().chain(b.iter()).cloned().collect();
    let common_kernel_dim = n - rank_exact_rational(&stacked);
    let af = to_f64_matrix(a);
    let bf = to_f64_matrix(b);
    let sf = to_f64_matrix(&stacked);
    let kernel = smallest_singular_vectors(&sf, common_kernel_dim);

    let finite = if characteristic.is_zero() {
        Vec::new()
    } else {
        characteristic
            .roots()
            .into_iter()
            .map(|lambda| {
                let scale = lambda.norm().max(1.0);
                if lambda.im.abs() > 1e-9 * scale {
                    return PencilPair { lambda, vector: None, residual: f64::NAN };
                }
                let lambda = Complex64::new(lambda.re, 0.0);
                let m = &af - &bf * lambda.re;
                let vector = regular_vector(&m, n - normal_rank + 1, &kernel);
                let residual = vector.as_ref().map(|v| (&m * v).norm()).unwrap_or(f64::NAN);
                PencilPair { lambda, vector, residual }
            })
            .collect()
    };

    PencilSolution {
        kind: if normal_rank == n {
            PencilKind::Regular
        } else {
            PencilKind::Singular { normal_rank }
        },
        rank_a: rank_exact_rational(a),
        rank_b: rank_exact_rational(b),
        normal_rank,
        common_kernel_dim,
        characteristic,
        finite,
    }
}

/// Null vector of `m` with the largest component off `kernel`, normalized.
fn regular_vector(m: &DMatrix<f64>, dim: usize, kernel: &[DVector<f64>]) -> Option<DVector<f64>> {
    smallest_singular_vectors(m, dim.min(m.ncols()))
        .into_iter()
        .map(|mut v| {
            for k in kernel {
                let c = k.dot(&v);
                v -= k * c;
            }
            v
        })
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .filter(|v| v.norm() > 1e-6)
        .map(|v| v.normalize())
}

/// `5 u2 u3 v1 v3 / (u3 v1 v3 u2' + u3' u2 v1 v3 - v1' u2 u3 v3 - v3' u2 u3 v1)`.
pub fn lambda_formula(p: &PointState<BigRational>) -> Option<BigRational> {
    let v = p.values();
    let d = p.jet(1)?;
    let (u2, u3, v1, v3) = (&v[1], &v[2], &v[3], &v[5]);
    let num = BigRational::from_integer(5.into()) * u2 * u3 * v1 * v3;
    let den = u3 * v1 * v3 * &d[1] + &d[2] * u2 * v1 * v3 - &d[3] * u2 * u3 * v3 - &d[5] * u2 * u3 * v1;
    (!den.is_zero()).then(|| num / den)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SignReport {
    pub formula: f64,
    pub eigenvalues: Vec<f64>,
    pub plus_matches: bool,
    pub minus_matches: bool,
}

pub fn sign_report(sol: &PencilSolution, formula: &BigRational) -> SignReport {
    let f = formula.to_f64().unwrap_or(f64::NAN);
    let eig = sol.real_eigenvalues();
    let near = |x: f64| eig.iter().any(|e| (e - x).abs() <= 1e-9 * x.abs().max(1.0));
    SignReport {
        formula: f,
        plus_matches: near(f),
        minus_matches: near(-f),
        eigenvalues: eig,
    }
}

/// The `(H^2, H')` pencil at a point with first-order jets.
pub fn h_squared_h_prime(p: &PointState<BigRational>) -> Result<PencilSolution, OperatorError> {
    let ops = shared().at_exact(p)?;
    let b = ops.h_prime.ok_or(OperatorError::MissingJet(1))?;
    Ok(pencil_solve(&ops.h_squared, &b))
}

/// The `((H^2)', H'')` pencil right-multiplied by `H^power`.
pub fn higher_pencil(p: &PointState<BigRational>, power: usize) -> Result<PencilSolution, OperatorError> {
    let ops = shared().at_exact(p)?;
    let a = ops.h_squared_prime.ok_or(OperatorError::MissingJet(1))?;
    let b = ops.h_second.ok_or(OperatorError::MissingJet(2))?;
    let mut hp = identity(a.len());
    for _ in 0..power {
        hp = mat_mul(&hp, &ops.h);
    }
    Ok(pencil_solve(&mat_mul(&a, &hp), &mat_mul(&b, &hp)))
}

#[derive(Clone, Debug)]
pub struct HigherScan {
    pub power: usize,
    pub characteristic_matches_base: bool,
    pub regular_pairs: usize,
    pub common_eigenvector: bool,
}

/// For each `p = 1..=max_power`, compares the determinantal polynomial with
/// the `p = 0` pencil and tests regular pairs for being common eigenvectors.
pub fn higher_pencil_scan(
    point: &PointState<BigRational>,
    max_power: usize,
) -> Result<(PencilSolution, Vec<HigherScan>), OperatorError> {
    let base = higher_pencil(point, 0)?;
    let ops = shared().at_exact(point)?;
    let a = to_f64_matrix(ops.h_squared_prime.as_ref().expect("checked by higher_pencil"));
    let b = to_f64_matrix(ops.h_second.as_ref().expect("checked by higher_pencil"));
    let mut scans = Vec::new();
    for power in 1..=max_power {
        let sol = higher_pencil(point, power)?;
        scans.push(HigherScan {
            power,
            characteristic_matches_base: sol.characteristic == base.characteristic,
            regular_pairs: sol.regular_pairs().len(),
            common_eigenvector: false,
        });
    }
    let common = base
        .regular_pairs()
        .iter()
        .any(|pair| is_common_eigenvector(&a, &b, pair.vector.as_ref().expect("regular")));
    for s in &mut scans {
        s.common_eigenvector = common;
    }
    Ok((base, scans))
}

/// `x` is an eigenvector of both `a` and `b` to relative tolerance `1e-8`.
pub fn is_common_eigenvector(a: &DMatrix<f64>, b: &DMatrix<f64>, x: &DVector<f64>) -> bool {
    let along = |m: &DMatrix<f64>| {
        let y = m * x;
        let r = &y - x * (x.dot(&y) / x.dot(x));
        r.norm() <= 1e-8 * m.norm().max(1.0) * x.norm()
    };
    along(a) && along(b)
}

fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(((i == j) as i64).into()))
                .collect()
        })
        .collect()
}

fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(BigRational::zero(), |acc, (x, br)| acc + x * &br[j])
                })
                .collect()
        })
        .collect()
}
