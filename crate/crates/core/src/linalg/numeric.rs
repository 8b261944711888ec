use nalgebra::{ComplexField, DMatrix, DVector, RealField};

/// Singular values in descending order.
pub fn singular_values<T: ComplexField>(m: &DMatrix<T>) -> Vec<T::RealField> {
    let mut s: Vec<T::RealField> = m.clone().singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numeric_rank<T: ComplexField>(m: &DMatrix<T>, rel_tol: f64) -> usize
where
    T::RealField: Into<f64>,
{
    let s: Vec<f64> = singular_values(m).into_iter().map(Into::into).collect();
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis of the numerical null space (right singular vectors
/// whose singular value is at most `rel_tol * sigma_max`).
pub fn null_space<T: ComplexField>(m: &DMatrix<T>, rel_tol: f64) -> Vec<DVector<T>>
where
    T::RealField: Into<f64> + RealField,
{
    let (rows, cols) = m.shape();
    // pad to square so the thin SVD exposes every right singular vector
    let n = rows.max(cols);
    let mut sq = DMatrix::<T>::zeros(n, cols);
    sq.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let top: f64 = svd
        .singular_values
        .iter()
        .cloned()
        .map(Into::into)
        .fold(0.0, f64::max);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let s: f64 = (*s).clone().into();
            s <= rel_tol * top.max(f64::MIN_POSITIVE)
        })
        .map(|(i, _)| v_t.row(i).adjoint().into_owned())
        .collect()
}

/// Right singular vectors of the `k` smallest singular values of a square
/// real matrix, smallest first.
pub fn smallest_singular_vectors(m: &DMatrix<f64>, k: usize) -> Vec<DVector<f64>> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    idx.into_iter()
        .take(k)
        .map(|i| v_t.row(i).transpose())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_null_space_of_projector() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(numeric_rank(&m, 1e-9), 2);
        let ns: Vec<nalgebra::DVector<f64>> = null_space(&m, 1e-9);
        assert_eq!(ns.len(), 1);
        assert!((ns[0][2].abs() - 1.0).abs() < 1e-12);
    }
}
