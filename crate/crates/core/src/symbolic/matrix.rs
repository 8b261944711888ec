use nalgebra::DMatrix;
use num_rational::BigRational;

use super::compiled::CompiledExpr;
use super::eval::PointState;
use super::parse::parse_expr;
use super::rational::RationalExpr;
use super::symbol::{KernelConfig, Symbol};
use super::SymbolicError;

/// Dense row-major matrix of rational expressions.
#[derive(Clone, Debug)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    data: Vec<RationalExpr>,
}

impl ExprMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExprMatrix {
            rows,
            cols,
            data: vec![RationalExpr::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RationalExpr) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExprMatrix { rows, cols, data }
    }

    /// Builds a matrix from expression strings, one slice per row.
    pub fn parse_rows(rows: &[&[&str]]) -> Result<Self, SymbolicError> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix literal");
            for s in *r {
                data.push(parse_expr(s)?);
            }
        }
        Ok(ExprMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn column(entries: Vec<RationalExpr>) -> Self {
        ExprMatrix {
            rows: entries.len(),
            cols: 1,
            data: entries,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalExpr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: RationalExpr) {
        self.data[i * self.cols + j] = e;
    }

    pub fn entries(&self) -> &[RationalExpr] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<RationalExpr> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn map(&self, f: impl Fn(&RationalExpr) -> RationalExpr) -> Self {
        ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map(
        &self,
        f: impl Fn(&RationalExpr) -> Result<RationalExpr, SymbolicError>,
    ) -> Result<Self, SymbolicError> {
        Ok(ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn mul(&self, rhs: &ExprMatrix) -> ExprMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        ExprMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = RationalExpr::zero();
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), rhs.get(k, j));
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = &acc + &(a * b);
            }
            acc
        })
    }

    pub fn add(&self, rhs: &ExprMatrix) -> ExprMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ExprMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn scale(&self, c: &RationalExpr) -> ExprMatrix {
        self.map(|e| e * c)
    }

    pub fn differentiate_t(&self, cfg: &KernelConfig) -> Result<ExprMatrix, SymbolicError> {
        self.try_map(|e| e.differentiate_t(cfg))
    }

    pub fn trace(&self) -> RationalExpr {
        (0..self.rows.min(self.cols)).fold(RationalExpr::zero(), |acc, i| &acc + self.get(i, i))
    }

    /// Entries `(i, j)` where the two matrices differ.
    pub fn mismatches(&self, other: &ExprMatrix) -> Vec<(usize, usize)> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).equals(other.get(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn equals(&self, other: &ExprMatrix) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.mismatches(other).is_empty()
    }

    /// Jacobian of a column vector with respect to the given symbols.
    pub fn jacobian(entries: &[RationalExpr], wrt: &[Symbol]) -> ExprMatrix {
        ExprMatrix::from_fn(entries.len(), wrt.len(), |i, j| entries[i].partial(wrt[j]))
    }

    /// Determinant by cofactor expansion; intended for small matrices.
    pub fn determinant(&self) -> RationalExpr {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.cols).collect();
        laplace(self, 0, &idx)
    }

    pub fn evaluate_f64(&self, p: &PointState<f64>) -> Result<DMatrix<f64>, SymbolicError> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).evaluate_f64(p)?;
            }
        }
        Ok(m)
    }

    pub fn evaluate_exact(
        &self,
        p: &PointState<BigRational>,
    ) -> Result<Vec<Vec<BigRational>>, SymbolicError> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).evaluate_exact(p))
                    .collect()
            })
            .collect()
    }

    pub fn compile(&self) -> CompiledMatrix {
        CompiledMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(CompiledExpr::new).collect(),
        }
    }
}

fn laplace(m: &ExprMatrix, row: usize, cols: &[usize]) -> RationalExpr {
    if cols.len() == 1 {
        return m.get(row, cols[0]).clone();
    }
    let mut acc = RationalExpr::zero();
    for (k, &c) in cols.iter().enumerate() {
        let e = m.get(row, c);
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = e * &laplace(m, row + 1, &rest);
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// [`ExprMatrix`] lowered for fast repeated `f64` evaluation.
#[derive(Clone, Debug)]
pub struct CompiledMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CompiledExpr>,
}

impl CompiledMatrix {
    pub fn arity(&self) -> usize {
        self.data.iter().map(CompiledExpr::arity).max().unwrap_or(0)
    }

    /// Evaluates at flat variables; `None` when the jet is too short.
    pub fn eval(&self, vars: &[f64]) -> Option<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.data[i * self.cols + j].eval(vars)?;
            }
        }
        Some(m)
    }
}
