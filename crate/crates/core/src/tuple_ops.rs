//! Star product of `k` tuples of length `n`, its Jacobian and rank law, and
//! the vector-valued external-product determinant for `(k, n) = (2, 3)`.

use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{numeric_rank, rank_exact_rational, rank_fraction_free_poly, singular_values};
use crate::operator;
use crate::sampling::{self, SampleRng};
use crate::symbolic::{sym, Base, ExprMatrix, PointState, Poly, RationalExpr, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TupleError {
    #[error("need at least two tuples, got {0}")]
    TooFewTuples(usize),
    #[error("tuple length must be at least 2, got {0}")]
    TupleTooShort(usize),
    #[error("k = {k} exceeds n = {n}")]
    KExceedsN { k: usize, n: usize },
    #[error("tuple {tuple} has {len} entries, expected {n}")]
    Ragged { tuple: usize, len: usize, n: usize },
    #[error("entry {index} of tuple {tuple} is zero")]
    ZeroEntry { tuple: usize, index: usize },
    #[error("the external product is defined only for two 3-tuples")]
    NotTwoTriples,
    #[error("row index {0} outside 1..=6")]
    RowOutOfRange(usize),
    #[error("point has a zero coordinate `{0}`")]
    DegeneratePoint(&'static str),
    #[error("H w0 vanishes; no direction cosines")]
    ZeroDirection,
}

/// `k` tuples of length `n` with nonzero entries.
#[derive(Clone, Debug)]
pub struct TupleFamily<T> {
    k: usize,
    n: usize,
    entries: Vec<Vec<T>>,
}

impl<T: Clone + Zero> TupleFamily<T> {
    pub fn new(entries: Vec<Vec<T>>) -> Result<Self, TupleError> {
        let k = entries.len();
        let n = entries.first().map(|r| r.len()).unwrap_or(0);
        if k < 2 {
            return Err(TupleError::TooFewTuples(k));
        }
        if n < 2 {
            return Err(TupleError::TupleTooShort(n));
        }
        if k > n {
            return Err(TupleError::KExceedsN { k, n });
        }
        for (a, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(TupleError::Ragged { tuple: a, len: row.len(), n });
            }
            if let Some(j) = row.iter().position(Zero::is_zero) {
                return Err(TupleError::ZeroEntry { tuple: a, index: j });
            }
        }
        Ok(TupleFamily { k, n, entries })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Vec<T>] {
        &self.entries
    }
}

impl TupleFamily<RationalExpr> {
    /// The pair `(u, v)` of symbolic 3-tuples.
    pub fn symbolic_pair() -> Self {
        let row = |bs: [Base; 3]| bs.iter().map(|&b| sym(b)).collect();
        TupleFamily::new(vec![
            row([Base::U1, Base::U2, Base::U3]),
            row([Base::V1, Base::V2, Base::V3]),
        ])
        .expect("symbols are nonzero")
    }
}

impl TupleFamily<BigRational> {
    pub fn random(rng: &mut SampleRng, k: usize, n: usize) -> Result<Self, TupleError> {
        let entries = (0..k)
            .map(|_| (0..n).map(|_| sampling::rational(rng)).collect())
            .collect();
        TupleFamily::new(entries)
    }

    pub fn from_point(p: &PointState<BigRational>) -> Result<Self, TupleError> {
        TupleFamily::new(vec![p.u().to_vec(), p.v().to_vec()])
    }
}

/// Star product components with the index tuple defining each.
#[derive(Clone, Debug)]
pub struct StarProduct<T> {
    pub components: Vec<T>,
    pub index_map: Vec<Vec<usize>>,
}

/// Component order for two 3-tuples: `u1v2, u3v2, u3v1, u2v1, u2v3, u1v3`.
const PAIR_ORDER: [[usize; 2]; 6] = [[0, 1], [2, 1], [2, 0], [1, 0], [1, 2], [0, 2]];

/// Index tuples of the star product: one coordinate per tuple, all distinct.
pub fn index_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    if (k, n) == (2, 3) {
        return PAIR_ORDER.iter().map(|t| t.to_vec()).collect();
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    permutations(k, n, &mut cur, &mut out);
    out
}

fn permutations(k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in 0..n {
        if !cur.contains(&i) {
            cur.push(i);
            permutations(k, n, cur, out);
            cur.pop();
        }
    }
}

pub fn star_product<T>(f: &TupleFamily<T>) -> StarProduct<T>
where
    T: Clone + Zero + One + Mul<Output = T>,
{
    let index_map = index_tuples(f.k, f.n);
    let components = index_map
        .iter()
        .map(|idx| {
            idx.iter()
                .enumerate()
                .fold(T::one(), |acc, (a, &j)| acc * f.entries[a][j].clone())
        })
        .collect();
    StarProduct { components, index_map }
}

/// Jacobian of the star product; column `a * n + j` is entry `j` of tuple `a`.
pub fn star_jacobian<T>(f: &TupleFamily<T>) -> Vec<Vec<T>>
where
    T: Clone + Zero + One + Mul<Output = T>,
{
    let (k, n) = (f.k, f.n);
    index_tuples(k, n)
        .iter()
        .map(|idx| {
            let mut row = vec![T::zero(); k * n];
            for b in 0..k {
                row[b * n + idx[b]] = (0..k)
                    .filter(|&a| a != b)
                    .fold(T::one(), |acc, a| acc * f.entries[a][idx[a]].clone());
            }
            row
        })
        .collect()
}

pub fn symbolic_star_jacobian() -> ExprMatrix {
    let rows = star_jacobian(&TupleFamily::symbolic_pair());
    ExprMatrix::from_fn(6, 6, |i, j| rows[i][j].clone())
}

fn check_point(p: &PointState<BigRational>) -> Result<(), TupleError> {
    match p.zero_coordinate() {
        Some(b) => Err(TupleError::DegeneratePoint(b.name())),
        None => Ok(()),
    }
}

/// Exact rank of a symbolic matrix instantiated at a rational point.
pub fn rank_exact(m: &ExprMatrix, p: &PointState<BigRational>) -> Result<usize, TupleError> {
    check_point(p)?;
    let vals = m
        .evaluate_exact(p)
        .map_err(|_| TupleError::DegeneratePoint("denominator"))?;
    Ok(rank_exact_rational(&vals))
}

/// Rank over the rational-function field, clearing row denominators first.
pub fn rank_symbolic(m: &ExprMatrix) -> Option<usize> {
    let rows: Vec<Vec<Poly>> = (0..m.nrows())
        .map(|i| {
            let row = m.row(i);
            (0..row.len())
                .map(|j| {
                    row.iter()
                        .enumerate()
                        .filter(|&(l, _)| l != j)
                        .fold(row[j].numerator().clone(), |acc, (_, e)| acc.mul(e.denominator()))
                })
                .collect()
        })
        .collect();
    rank_fraction_free_poly(&rows)
}

/// Predicted Jacobian rank: `k(n-1) + 1` for `k < n`, and the `k = n - 1`
/// value when `k = n`.
pub fn rank_law(k: usize, n: usize) -> usize {
    if k < n {
        k * (n - 1) + 1
    } else {
        rank_law(n - 1, n)
    }
}

#[derive(Clone, Debug)]
pub struct RankLawReport {
    pub k: usize,
    pub n: usize,
    pub predicted: usize,
    pub observed: Vec<usize>,
}

impl RankLawReport {
    pub fn holds(&self) -> bool {
        self.observed.iter().all(|&r| r == self.predicted)
    }
}

/// Exact Jacobian ranks of the star product at `samples` random families.
pub fn rank_law_check(
    k: usize,
    n: usize,
    rng: &mut SampleRng,
    samples: usize,
) -> Result<RankLawReport, TupleError> {
    let mut observed = Vec::with_capacity(samples);
    for _ in 0..samples {
        let f = TupleFamily::random(rng, k, n)?;
        observed.push(rank_exact_rational(&star_jacobian(&f)));
    }
    Ok(RankLawReport { k, n, predicted: rank_law(k, n), observed })
}

/// Vector-valued determinant with one Jacobian row replaced by unit vectors.
#[derive(Clone, Debug)]
pub struct ExternalDet {
    pub removed_row: usize,
    pub vector: Vec<RationalExpr>,
}

impl ExternalDet {
    /// The common factor `u2 u3 v1 v3`.
    pub fn factor() -> RationalExpr {
        [Base::U2, Base::U3, Base::V1, Base::V3]
            .iter()
            .fold(RationalExpr::one(), |acc, &b| &acc * &sym(b))
    }

    /// `(u1, u2, u3, -v1, -v2, -v3)`.
    pub fn omega1() -> Vec<RationalExpr> {
        Base::ALL
            .iter()
            .enumerate()
            .map(|(i, &b)| if i < 3 { sym(b) } else { -sym(b) })
            .collect()
    }

    /// `g` with `self = g * other` entrywise, if such a scalar exists.
    pub fn ratio_to(&self, other: &[RationalExpr]) -> Option<RationalExpr> {
        let i = other.iter().position(|e| !e.is_zero())?;
        let g = self.vector[i].checked_div(&other[i]).ok()?;
        self.vector
            .iter()
            .zip(other)
            .all(|(a, b)| a.equals(&(&g * b)))
            .then_some(g)
    }
}

/// Deletes Jacobian row `removed_row` (1-based), appends the basis row last
/// and expands along it. `removed_row = 1` gives `u2 u3 v1 v3 * omega1`.
pub fn external_det(f: &TupleFamily<RationalExpr>, removed_row: usize) -> Result<ExternalDet, TupleError> {
    if (f.k, f.n) != (2, 3) {
        return Err(TupleError::NotTwoTriples);
    }
    if !(1..=6).contains(&removed_row) {
        return Err(TupleError::RowOutOfRange(removed_row));
    }
    let jac = star_jacobian(f);
    let kept: Vec<&Vec<RationalExpr>> = jac
        .iter()
        .enumerate()
        .filter(|&(i, _)| i + 1 != removed_row)
        .map(|(_, r)| r)
        .collect();
    let vector = (0..6)
        .map(|m| {
            let minor = ExprMatrix::from_fn(5, 5, |i, j| {
                let c = if j < m { j } else { j + 1 };
                kept[i][c].clone()
            });
            let d = minor.determinant();
            // cofactor sign of entry (6, m + 1)
            if (5 + m) % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    Ok(ExternalDet { removed_row, vector })
}

/// Numeric ranks of the Jacobians of `H w0` and of `H w0 / |H w0|` with
/// respect to `(u, v)`, thresholded at `1e-9 * sigma_max`.
pub fn hw0_rank_check(p: &PointState<f64>, w0: &[f64; 6]) -> Result<(usize, usize), TupleError> {
    if let Some(b) = p.zero_coordinate() {
        return Err(TupleError::DegeneratePoint(b.name()));
    }
    let ops = operator::shared();
    let flat = p.flat();
    let w = DVector::from_column_slice(w0);
    let h = ops.h_numeric(&flat).ok_or(TupleError::DegeneratePoint("jet"))?;
    let hw = &h * &w;
    let norm = hw.norm();
    if norm == 0.0 || !w.iter().any(|x| *x != 0.0) {
        return Err(TupleError::ZeroDirection);
    }
    let mut jac = DMatrix::zeros(6, 6);
    for k in 0..6 {
        let dh = ops.h_partial_numeric(k, &flat).ok_or(TupleError::DegeneratePoint("jet"))?;
        jac.set_column(k, &(dh * &w));
    }
    let mu = &hw / norm;
    let proj = DMatrix::identity(6, 6) - &mu * mu.transpose();
    let mu_jac = proj * &jac / norm;
    Ok((rank_at(&jac), rank_at(&mu_jac)))
}

fn rank_at(m: &DMatrix<f64>) -> usize {
    if singular_values(m).first().copied().unwrap_or(0.0) == 0.0 {
        return 0;
    }
    numeric_rank(m, 1e-9)
}

/// Plain symbol order used for all Jacobians: `u1, u2, u3, v1, v2, v3`.
pub fn plain_symbols() -> Vec<Symbol> {
    Base::ALL.iter().map(|&b| Symbol::plain(b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_exact;
    use crate::operator::display;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn family(u: [i64; 3], v: [i64; 3]) -> TupleFamily<BigRational> {
        TupleFamily::new(vec![u.map(q).to_vec(), v.map(q).to_vec()]).unwrap()
    }

    #[test]
    fn pair_star_product_order() {
        let x = star_product(&family([1, 2, 3], [4, 5, 6]));
        assert_eq!(x.components, [5, 15, 12, 8, 12, 6].map(q).to_vec());
        let ones = star_product(&family([1, 1, 1], [1, 1, 1]));
        assert!(ones.components.iter().all(|c| *c == q(1)));
    }

    #[test]
    fn component_count_is_falling_factorial() {
        assert_eq!(index_tuples(2, 4).len(), 12);
        assert_eq!(index_tuples(3, 4).len(), 24);
        assert_eq!(index_tuples(3, 3).len(), 6);
    }

    #[test]
    fn family_validation() {
        assert_eq!(
            TupleFamily::new(vec![vec![1.0, 2.0]; 3]).unwrap_err(),
            TupleError::KExceedsN { k: 3, n: 2 }
        );
        assert_eq!(
            TupleFamily::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap_err(),
            TupleError::ZeroEntry { tuple: 0, index: 1 }
        );
    }

    #[test]
    fn symbolic_jacobian_matches_display() {
        let shown = display::matrix(&display::STAR_JACOBIAN).unwrap();
        assert!(symbolic_star_jacobian().equals(&shown));
    }

    #[test]
    fn jacobian_agrees_with_kernel_partials() {
        let x = star_product(&TupleFamily::symbolic_pair()).components;
        let via_kernel = ExprMatrix::jacobian(&x, &plain_symbols());
        assert!(via_kernel.equals(&symbolic_star_jacobian()));
    }

    #[test]
    fn symbolic_rank_is_five() {
        assert_eq!(rank_symbolic(&symbolic_star_jacobian()), Some(5));
    }

    #[test]
    fn every_five_rows_are_independent() {
        let jac = symbolic_star_jacobian();
        let mut rng = sampling::rng(11);
        for _ in 0..10 {
            let p = sampling::point(&mut rng, 1);
            let vals = jac.evaluate_exact(&p).unwrap();
            for drop in 0..6 {
                let rows: Vec<_> = vals
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, r)| r.clone())
                    .collect();
                assert_eq!(rank_exact_rational(&rows), 5);
            }
        }
    }

    #[test]
    fn rank_exact_rejects_zero_coordinate() {
        let p = PointState::from_i64([1, 0, 1], [1, 1, 1]);
        assert_eq!(
            rank_exact(&symbolic_star_jacobian(), &p),
            Err(TupleError::DegeneratePoint("u2"))
        );
    }

    #[test]
    fn law_values() {
        assert_eq!(rank_law(2, 3), 5);
        assert_eq!(rank_law(2, 4), 7);
        assert_eq!(rank_law(3, 3), 5);
        assert_eq!(rank_law(3, 4), 10);
    }

    #[test]
    fn rank_law_holds_on_sampled_families() {
        let mut rng = sampling::rng(13);
        for (k, n) in [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4)] {
            let r = rank_law_check(k, n, &mut rng, 10).unwrap();
            assert!(r.holds(), "({k},{n}): {:?} vs {}", r.observed, r.predicted);
        }
    }

    #[test]
    fn first_row_external_det_matches_display() {
        let d = external_det(&TupleFamily::symbolic_pair(), 1).unwrap();
        let shown = display::vector(&display::DET_D).unwrap();
        assert!(d.vector.iter().zip(&shown).all(|(a, b)| a.equals(b)));
        let g = d.ratio_to(&ExternalDet::omega1()).unwrap();
        assert!(g.equals(&ExternalDet::factor()));
    }

    #[test]
    fn other_rows_differ_by_a_scalar_factor() {
        let f = TupleFamily::symbolic_pair();
        let base = external_det(&f, 1).unwrap().vector;
        for r in 2..=6 {
            let d = external_det(&f, r).unwrap();
            assert!(d.ratio_to(&base).is_some(), "row {r}");
        }
    }

    #[test]
    fn all_ones_external_det() {
        let d = external_det(&TupleFamily::symbolic_pair(), 1).unwrap();
        let p = PointState::from_i64([1, 1, 1], [1, 1, 1]);
        let vals: Vec<_> = d.vector.iter().map(|e| e.evaluate_exact(&p).unwrap()).collect();
        assert_eq!(vals, [1, 1, 1, -1, -1, -1].map(q).to_vec());
    }

    #[test]
    fn cofactors_are_linear_in_the_replacement_row() {
        // oracle: full 6x6 determinant with the row replaced by y
        let f = TupleFamily::symbolic_pair();
        let mut rng = sampling::rng(5);
        for r in 1..=6 {
            let d = external_det(&f, r).unwrap();
            let p = sampling::point(&mut rng, 1);
            let jac = symbolic_star_jacobian().evaluate_exact(&p).unwrap();
            let y: Vec<BigRational> = sampling::rational_array::<6>(&mut rng).to_vec();
            let mut m: Vec<Vec<BigRational>> = jac
                .iter()
                .enumerate()
                .filter(|&(i, _)| i + 1 != r)
                .map(|(_, row)| row.clone())
                .collect();
            m.push(y.clone());
            let dot = d
                .vector
                .iter()
                .zip(&y)
                .fold(q(0), |acc, (e, yi)| acc + e.evaluate_exact(&p).unwrap() * yi);
            assert_eq!(det_exact(&m), dot);
        }
    }

    #[test]
    fn hw0_ranks() {
        // oracle: exact sympy rank of the Jacobian of H w0
        let ones = PointState::new([1.0; 3], [1.0; 3]);
        assert_eq!(hw0_rank_check(&ones, &[1.0; 6]), Ok((5, 5)));
        assert_eq!(hw0_rank_check(&ones, &[1.0, 1.0, 1.0, -1.0, -1.0, -1.0]).unwrap().0, 1);
        assert_eq!(hw0_rank_check(&ones, &[0.0; 6]), Err(TupleError::ZeroDirection));
        let mut rng = sampling::rng(21);
        for _ in 0..10 {
            let p = sampling::point(&mut rng, 1).to_f64();
            let w0 = sampling::point(&mut rng, 1).to_f64().flat();
            let w0: [f64; 6] = w0.try_into().unwrap();
            assert_eq!(hw0_rank_check(&p, &w0), Ok((5, 5)));
        }
    }
}
