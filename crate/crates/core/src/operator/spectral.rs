//! Eigendecompositions of `H` and `H^2`, singular values of `H` with the
//! closed-form extremes, and residual checks of the displayed eigenvectors.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{display, OperatorError};
use crate::linalg::{singular_values, smallest_singular_vectors};
use crate::symbolic::{parse_expr, PointState, RationalExpr};

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: DVector<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SpectralResult {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// One orthonormal basis vector per real eigenvalue copy.
    pub pairs: Vec<EigenPair>,
}

impl SpectralResult {
    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// Eigenvalues equal `expected` (ascending) within `tol`.
    pub fn matches(&self, expected: &[f64], tol: f64) -> bool {
        self.eigenvalues.len() == expected.len()
            && self
                .eigenvalues
                .iter()
                .zip(expected)
                .all(|(z, e)| z.im.abs() <= tol && (z.re - e).abs() <= tol)
    }

    /// Eigenvectors belonging to eigenvalues within `tol` of `lambda`.
    pub fn eigenspace(&self, lambda: f64, tol: f64) -> Vec<&DVector<f64>> {
        self.pairs
            .iter()
            .filter(|p| (p.value - lambda).abs() <= tol)
            .map(|p| &p.vector)
            .collect()
    }
}

pub fn expected_h_eigenvalues() -> [f64; 6] {
    let s = 5f64.sqrt();
    [-s, -1.0, -1.0, 1.0, 1.0, s]
}

pub const EXPECTED_H_SQUARED_EIGENVALUES: [f64; 6] = [1.0, 1.0, 1.0, 1.0, 5.0, 5.0];

pub fn eigen(m: &DMatrix<f64>) -> Result<SpectralResult, OperatorError> {
    let n = m.nrows();
    let schur = [1.0, 4.0, 16.0, 64.0]
        .iter()
        .find_map(|k| Schur::try_new(m.clone(), k * f64::EPSILON, 10_000))
        .ok_or(OperatorError::NonConvergence)?;
    let mut eigenvalues: Vec<Complex64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect();
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let scale = m.amax().max(1.0);
    let real: Vec<f64> = eigenvalues
        .iter()
        .filter(|z| z.im.abs() <= 1e-9 * scale)
        .map(|z| z.re)
        .collect();
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < real.len() {
        let mut j = i + 1;
        while j < real.len() && (real[j] - real[i]).abs() <= 1e-6 * scale {
            j += 1;
        }
        let value = real[i..j].iter().sum::<f64>() / (j - i) as f64;
        let shifted = m - DMatrix::identity(n, n) * value;
        for v in smallest_singular_vectors(&shifted, j - i) {
            let residual = (m * &v - &v * value).norm() / v.norm();
            pairs.push(EigenPair { value, vector: v, residual });
        }
        i = j;
    }
    Ok(SpectralResult { eigenvalues, pairs })
}

/// `|m x - lambda x| / |x|`.
pub fn eigen_residual(m: &DMatrix<f64>, lambda: f64, x: &DVector<f64>) -> f64 {
    (m * x - x * lambda).norm() / x.norm()
}

/// Residual of each displayed eigenvector of `H` at a point, paired with its
/// eigenvalue.
pub fn display_eigenvector_residuals(h: &DMatrix<f64>, u: [f64; 3], v: [f64; 3]) -> Vec<(f64, f64)> {
    display::v_h_columns(u, v)
        .into_iter()
        .map(|(lam, col)| (lam, eigen_residual(h, lam, &DVector::from_column_slice(&col))))
        .collect()
}

struct SvdExprs {
    b: RationalExpr,
    q_radicand: RationalExpr,
}

fn svd_exprs() -> &'static SvdExprs {
    static E: OnceLock<SvdExprs> = OnceLock::new();
    E.get_or_init(|| SvdExprs {
        b: parse_expr(display::SVD_B).expect("b parses"),
        q_radicand: parse_expr(display::SVD_Q_RADICAND).expect("q parses"),
    })
}

#[derive(Clone, Debug)]
pub struct SingularValues {
    /// Numeric singular values, descending.
    pub sigma: [f64; 6],
    pub b: f64,
    pub q: f64,
    pub closed_max: f64,
    pub closed_min: f64,
    /// `b / (u2 u3 v1 v3)^2 = |H|_F^2 - 4` exactly.
    pub b_reconciles: bool,
    /// The typeset `q` reading satisfies `b^2 - q^2 = 100 (u2 u3 v1 v3)^4`.
    pub q_reconciles: bool,
    pub frobenius_sq: f64,
}

impl SingularValues {
    pub fn product(&self) -> f64 {
        self.sigma[0] * self.sigma[5]
    }

    pub fn unit_middle(&self, tol: f64) -> bool {
        self.sigma[1..5].iter().all(|s| (s - 1.0).abs() <= tol)
    }

    pub fn frobenius_gap(&self) -> f64 {
        let (a, c) = (self.sigma[0], self.sigma[5]);
        (self.frobenius_sq - (a * a + c * c + 4.0)).abs()
    }
}

pub fn svd_numeric(h: &DMatrix<f64>) -> [f64; 6] {
    let s = singular_values(h);
    std::array::from_fn(|i| s[i])
}

/// Closed-form extremes from `b` and `q` at an exact point, beside the
/// numeric singular values of `h`.
pub fn svd_closed_form(
    p: &PointState<BigRational>,
    h_exact: &[Vec<BigRational>],
) -> Result<SingularValues, OperatorError> {
    let e = svd_exprs();
    let b = e.b.evaluate_exact(p)?;
    let q2_printed = e.q_radicand.evaluate_exact(p)?;
    let vals = p.values();
    let f = &vals[1] * &vals[2] * &vals[3] * &vals[5];
    let f2 = &f * &f;
    let hundred_f4 = BigRational::from_integer(100.into()) * &f2 * &f2;
    let q_reconciles = &b * &b - &q2_printed == hundred_f4;
    let q2 = if q_reconciles { q2_printed } else { &b * &b - &hundred_f4 };
    if q2.is_negative() {
        return Err(OperatorError::NonFinite);
    }
    let frob: BigRational = h_exact.iter().flatten().map(|x| x * x).sum();
    let four = BigRational::from_integer(4.into());
    let b_reconciles = b == (&frob - four) * &f2;

    let to = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
    let (bf, qf, f2f) = (to(&b), to(&q2).sqrt(), to(&f2));
    let closed_max = ((bf + qf) / (2.0 * f2f)).sqrt();
    // b - q = (b^2 - q^2) / (b + q) avoids cancellation
    let diff = &b * &b - &q2;
    let closed_min = if diff.is_zero() {
        0.0
    } else {
        (to(&diff) / ((bf + qf) * 2.0 * f2f)).sqrt()
    };
    let h = super::to_f64_matrix(&h_exact.to_vec());
    Ok(SingularValues {
        sigma: svd_numeric(&h),
        b: bf,
        q: qf,
        closed_max,
        closed_min,
        b_reconciles,
        q_reconciles,
        frobenius_sq: to(&frob),
    })
}
