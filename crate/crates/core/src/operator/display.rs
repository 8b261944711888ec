//! Reference transcriptions of the closed-form operator matrices, written in
//! the expression surface grammar so they can be checked against the
//! constructed operators with exact equality.

use crate::symbolic::{ExprMatrix, RationalExpr, SymbolicError};

/// `H`, rows and columns ordered `(u1, u2, u3, v1, v2, v3)`.
pub const H: [[&str; 6]; 6] = [
    ["1", "u1/u2", "u1/u3", "u1/v1", "0", "u1/v3"],
    ["0", "2", "u2/u3", "u2/v1", "0", "u2/v3"],
    ["0", "u3/u2", "2", "u3/v1", "0", "u3/v3"],
    ["0", "-v1/u2", "-v1/u3", "-2", "0", "-v1/v3"],
    ["0", "-v2/u2", "-v2/u3", "-v2/v1", "-1", "-v2/v3"],
    ["0", "-v3/u2", "-v3/u3", "-v3/v1", "0", "-2"],
];

pub const H_SQUARED: [[&str; 6]; 6] = [
    ["1", "2*u1/u2", "2*u1/u3", "0", "0", "0"],
    ["0", "3", "2*u2/u3", "0", "0", "0"],
    ["0", "2*u3/u2", "3", "0", "0", "0"],
    ["0", "0", "0", "3", "0", "2*v1/v3"],
    ["0", "0", "0", "2*v2/v1", "1", "2*v2/v3"],
    ["0", "0", "0", "2*v3/v1", "0", "3"],
];

/// `dH/dt`. Entry (5, 2) (1-based) is the corrected form; the printed
/// variant is [`H_PRIME_PRINTED_5_2`].
pub const H_PRIME: [[&str; 6]; 6] = [
    [
        "0",
        "u1'/u2 - u1*u2'/u2^2",
        "u1'/u3 - u1*u3'/u3^2",
        "u1'/v1 - u1*v1'/v1^2",
        "0",
        "u1'/v3 - u1*v3'/v3^2",
    ],
    [
        "0",
        "0",
        "u2'/u3 - u2*u3'/u3^2",
        "u2'/v1 - u2*v1'/v1^2",
        "0",
        "u2'/v3 - u2*v3'/v3^2",
    ],
    [
        "0",
        "u3'/u2 - u3*u2'/u2^2",
        "0",
        "u3'/v1 - u3*v1'/v1^2",
        "0",
        "u3'/v3 - u3*v3'/v3^2",
    ],
    [
        "0",
        "-v1'/u2 + v1*u2'/u2^2",
        "-v1'/u3 + v1*u3'/u3^2",
        "0",
        "0",
        "-v1'/v3 + v1*v3'/v3^2",
    ],
    [
        "0",
        "-v2'/u2 + v2*u2'/u2^2",
        "-v2'/u3 + v2*u3'/u3^2",
        "-v2'/v1 + v2*v1'/v1^2",
        "0",
        "-v2'/v3 + v2*v3'/v3^2",
    ],
    [
        "0",
        "-v3'/u2 + v3*u2'/u2^2",
        "-v3'/u3 + v3*u3'/u3^2",
        "-v3'/v1 + v3*v1'/v1^2",
        "0",
        "0",
    ],
];

/// Entry (5, 2) of `dH/dt` exactly as typeset; its leading sign is wrong.
pub const H_PRIME_PRINTED_5_2: &str = "v2'/u2 + v2*u2'/u2^2";

/// The vector-valued external-product determinant.
pub const DET_D: [&str; 6] = [
    "u1*u2*u3*v1*v3",
    "u2^2*u3*v1*v3",
    "u2*u3^2*v1*v3",
    "-u2*u3*v1^2*v3",
    "-u2*u3*v1*v2*v3",
    "-u2*u3*v1*v3^2",
];

/// The star-product Jacobian, columns `(u1, u2, u3, v1, v2, v3)`.
pub const STAR_JACOBIAN: [[&str; 6]; 6] = [
    ["v2", "0", "0", "0", "u1", "0"],
    ["0", "0", "v2", "0", "u3", "0"],
    ["0", "0", "v1", "u3", "0", "0"],
    ["0", "v1", "0", "u2", "0", "0"],
    ["0", "v3", "0", "0", "0", "u2"],
    ["v3", "0", "0", "0", "0", "u1"],
];

/// Sum of squared singular values scaled by `(u2 u3 v1 v3)^2`.
pub const SVD_B: &str = "((v1^2 + v3^2)*u3^2 + v1^2*v3^2)*u2^4 + u3^4*v1^2*v3^2 \
    + (v3^2*v1^4 + (v3^4 + (u1^2 + v2^2)*v3^2)*v1^2)*u3^2 \
    + ((v1^2 + v3^2)*u3^4 + (v1^4 + (u1^2 + v2^2 + 14*v3^2)*v1^2 + v3^4 + (u1^2 + v2^2)*v3^2)*u3^2 \
    + v3^2*v1^4 + (v3^4 + (u1^2 + v2^2)*v3^2)*v1^2)*u2^2";

/// Radicand of `q`, read as the product `S * P * Q3` of its three groupings.
pub const SVD_Q_RADICAND: &str = "(u1^2 + u2^2 + u3^2 + v1^2 + v2^2 + v3^2) \
    * (((v1^2 + v3^2)*u3^2 + v1^2*v3^2)*u2^2 + u3^2*v1^2*v3^2) \
    * (((v1^2 + v3^2)*u3^2 + v1^2*v3^2)*u2^4 \
    + ((v1^2 + v3^2)*u3^4 + (v1^4 + (u1^2 + v2^2 + 24*v3^2)*v1^2 + v3^2*(u1^2 + v2^2 + v3^2))*u3^2 \
    + v1^2*v3^2*(u1^2 + v1^2 + v2^2 + v3^2))*u2^2 \
    + u3^2*v1^2*v3^2*(u1^2 + u3^2 + v1^2 + v2^2 + v3^2))";

/// Eigenvectors of `H^2`: columns for eigenvalues `5, 5, 1, 1, 1, 1`.
pub const V_H_SQUARED: [[&str; 6]; 6] = [
    ["u1/u3", "0", "0", "0", "0", "1"],
    ["u2/u3", "0", "0", "0", "-u2/u3", "0"],
    ["1", "0", "0", "0", "1", "0"],
    ["0", "v1/v3", "-v1/v3", "0", "0", "0"],
    ["0", "v2/v3", "0", "1", "0", "0"],
    ["0", "1", "1", "0", "0", "0"],
];

pub const V_H_SQUARED_EIGENVALUES: [i64; 6] = [5, 5, 1, 1, 1, 1];

/// Circular-section basis of the hyperellipsoid of `H`.
pub const SECTION_N: [[&str; 5]; 6] = [
    ["u1", "u1", "u1", "-u1", "u1"],
    ["-u2", "u2", "-u2", "-u2", "-u2"],
    ["u3", "u3", "u3", "u3", "u3"],
    ["v1", "-v1", "-v1", "-v1", "-v1"],
    ["-v2", "-v2", "v2", "v2", "-v2"],
    ["-v3", "-v3", "v3", "v3", "v3"],
];

fn rows<'a, const C: usize>(m: &'a [[&'a str; C]]) -> Vec<&'a [&'a str]> {
    m.iter().map(|r| r.as_slice()).collect()
}

pub fn matrix<const C: usize>(m: &[[&str; C]]) -> Result<ExprMatrix, SymbolicError> {
    ExprMatrix::parse_rows(&rows(m))
}

pub fn vector(v: &[&str]) -> Result<Vec<RationalExpr>, SymbolicError> {
    v.iter().map(|s| crate::symbolic::parse_expr(s)).collect()
}

/// Eigenvectors of `H` as typeset, paired with their eigenvalues, evaluated
/// at a point. Several printed entries are garbled; see
/// `spectral::validate_display_eigenvectors`.
pub fn v_h_columns(u: [f64; 3], v: [f64; 3]) -> Vec<(f64, [f64; 6])> {
    let s = 5f64.sqrt();
    let [u1, u2, u3] = u;
    let [v1, v2, v3] = v;
    vec![
        (
            s,
            [
                0.5 * u1 * (s - 1.0) / (s - 2.0),
                -0.5 * u2 * (s - 1.0) / (s - 2.0),
                -0.5 * u3 * (3.0 + s),
                v1,
                v2,
                v3,
            ],
        ),
        (
            -s,
            [
                -0.5 * u1 * (-s - 1.0) / (-s - 2.0),
                -0.5 * u2 * (-s - 1.0) / (-s - 2.0),
                -0.5 * u3 * (3.0 - s),
                v1,
                v2,
                v3,
            ],
        ),
        (1.0, [0.0, -u2, u3, 0.0, 0.0, 0.0]),
        (1.0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        (-1.0, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        (-1.0, [0.0, 0.0, 0.0, -v1, 0.0, v3]),
    ]
}
