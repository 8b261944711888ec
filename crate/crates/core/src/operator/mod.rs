//! The operator family built from the external-product determinant: `H`,
//! `H^2`, `H'`, `H''`, `(H^2)'` in exact symbolic form, with compiled numeric
//! and exact rational instantiation at a point.

pub mod display;
pub mod identities;
pub mod pencil;
pub mod spectral;

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_rational::BigRational;
use thiserror::Error;

use crate::linalg::RatMatrix;
use crate::symbolic::{
    CompiledMatrix, ExprMatrix, KernelConfig, PointState, RationalExpr, SymbolicError,
};
use crate::tuple_ops::{external_det, plain_symbols, ExternalDet, TupleFamily};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("coordinate `{0}` is zero")]
    ZeroCoordinate(&'static str),
    #[error("point lacks derivative order {0}")]
    MissingJet(usize),
    #[error("non-finite value in the point")]
    NonFinite,
    #[error("eigensolver did not converge")]
    NonConvergence,
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// The symbolic operator family with compiled evaluators.
#[derive(Clone, Debug)]
pub struct SymbolicOperators {
    pub h: ExprMatrix,
    pub h_squared: ExprMatrix,
    pub h_prime: ExprMatrix,
    pub h_second: ExprMatrix,
    pub h_squared_prime: ExprMatrix,
    compiled: [CompiledMatrix; 5],
    partials: Vec<CompiledMatrix>,
}

/// Operators evaluated at a floating-point point. Derivative operators are
/// present only when the point carries the needed jets.
#[derive(Clone, Debug)]
pub struct NumericOperators {
    pub h: DMatrix<f64>,
    pub h_squared: DMatrix<f64>,
    pub h_prime: Option<DMatrix<f64>>,
    pub h_second: Option<DMatrix<f64>>,
    pub h_squared_prime: Option<DMatrix<f64>>,
}

#[derive(Clone, Debug)]
pub struct ExactOperators {
    pub h: RatMatrix,
    pub h_squared: RatMatrix,
    pub h_prime: Option<RatMatrix>,
    pub h_second: Option<RatMatrix>,
    pub h_squared_prime: Option<RatMatrix>,
}

impl SymbolicOperators {
    /// Builds `H` as the gradient of the external determinant divided by
    /// `u2 u3 v1 v3`, then derives the rest.
    pub fn build() -> Result<Self, OperatorError> {
        let d = external_det(&TupleFamily::symbolic_pair(), 1)
            .expect("two symbolic triples")
            .vector;
        let grad = ExprMatrix::jacobian(&d, &plain_symbols());
        let f = ExternalDet::factor();
        let h = grad.try_map(|e| e.checked_div(&f))?;
        Self::from_h(h)
    }

    pub fn from_h(h: ExprMatrix) -> Result<Self, OperatorError> {
        let cfg = KernelConfig::default();
        let h_squared = h.mul(&h);
        let h_prime = h.differentiate_t(&cfg)?;
        let h_second = h_prime.differentiate_t(&cfg)?;
        let h_squared_prime = h_squared.differentiate_t(&cfg)?;
        let compiled = [
            h.compile(),
            h_squared.compile(),
            h_prime.compile(),
            h_second.compile(),
            h_squared_prime.compile(),
        ];
        let partials = plain_symbols()
            .into_iter()
            .map(|s| h.map(|e| e.partial(s)).compile())
            .collect();
        Ok(SymbolicOperators {
            h,
            h_squared,
            h_prime,
            h_second,
            h_squared_prime,
            compiled,
            partials,
        })
    }

    /// Copy with one entry of `H` replaced; everything else is rederived.
    pub fn tampered(&self, row: usize, col: usize, value: RationalExpr) -> Result<Self, OperatorError> {
        let mut h = self.h.clone();
        h.set(row, col, value);
        Self::from_h(h)
    }

    /// `H` at flattened jet values, `None` if too few values are supplied.
    pub fn h_numeric(&self, flat: &[f64]) -> Option<DMatrix<f64>> {
        self.compiled[0].eval(flat)
    }

    /// `dH/dx_k` for `x = (u1, u2, u3, v1, v2, v3)`.
    pub fn h_partial_numeric(&self, k: usize, flat: &[f64]) -> Option<DMatrix<f64>> {
        self.partials[k].eval(flat)
    }

    pub fn at(&self, p: &PointState<f64>) -> Result<NumericOperators, OperatorError> {
        if p.jets().iter().flatten().any(|x| !x.is_finite()) {
            return Err(OperatorError::NonFinite);
        }
        check_nonzero(p)?;
        let flat = p.flat();
        let eval = |c: &CompiledMatrix| c.eval(&flat);
        Ok(NumericOperators {
            h: eval(&self.compiled[0]).expect("order-0 values present"),
            h_squared: eval(&self.compiled[1]).expect("order-0 values present"),
            h_prime: eval(&self.compiled[2]),
            h_second: eval(&self.compiled[3]),
            h_squared_prime: eval(&self.compiled[4]),
        })
    }

    pub fn at_exact(&self, p: &PointState<BigRational>) -> Result<ExactOperators, OperatorError> {
        check_nonzero(p)?;
        let orders = p.orders();
        let opt = |m: &ExprMatrix, need: usize| -> Result<Option<RatMatrix>, OperatorError> {
            if orders > need {
                Ok(Some(m.evaluate_exact(p)?))
            } else {
                Ok(None)
            }
        };
        Ok(ExactOperators {
            h: self.h.evaluate_exact(p)?,
            h_squared: self.h_squared.evaluate_exact(p)?,
            h_prime: opt(&self.h_prime, 1)?,
            h_second: opt(&self.h_second, 2)?,
            h_squared_prime: opt(&self.h_squared_prime, 1)?,
        })
    }
}

fn check_nonzero<T: Clone + num_traits::Zero>(p: &PointState<T>) -> Result<(), OperatorError> {
    match p.zero_coordinate() {
        Some(b) => Err(OperatorError::ZeroCoordinate(b.name())),
        None => Ok(()),
    }
}

/// The operator family built once per process.
pub fn shared() -> &'static SymbolicOperators {
    static OPS: OnceLock<SymbolicOperators> = OnceLock::new();
    OPS.get_or_init(|| SymbolicOperators::build().expect("operator construction"))
}

/// `H` written out directly from its entries.
pub fn h_direct(u: [f64; 3], v: [f64; 3]) -> DMatrix<f64> {
    let [u1, u2, u3] = u;
    let [v1, v2, v3] = v;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(6, 6, &[
        1.0, u1 / u2, u1 / u3, u1 / v1, 0.0, u1 / v3,
        0.0, 2.0, u2 / u3, u2 / v1, 0.0, u2 / v3,
        0.0, u3 / u2, 2.0, u3 / v1, 0.0, u3 / v3,
        0.0, -v1 / u2, -v1 / u3, -2.0, 0.0, -v1 / v3,
        0.0, -v2 / u2, -v2 / u3, -v2 / v1, -1.0, -v2 / v3,
        0.0, -v3 / u2, -v3 / u3, -v3 / v1, 0.0, -2.0,
    ]);
    m
}

pub fn to_f64_matrix(m: &RatMatrix) -> DMatrix<f64> {
    use num_traits::ToPrimitive;
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    DMatrix::from_fn(rows, cols, |i, j| m[i][j].to_f64().unwrap_or(f64::NAN))
}
