use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::PathError;
use crate::linalg::numeric_rank;
use crate::operator::{h_direct, OperatorError};
use crate::symbolic::PointState;

#[derive(Clone, Debug, Serialize)]
pub struct SectionGeometry {
    #[serde(skip)]
    pub n: DMatrix<f64>,
    pub rank_n: usize,
    pub varpi: [f64; 5],
    pub e: [f64; 6],
    pub p: [f64; 6],
    /// `| |e| - |p| |`.
    pub norm_gap: f64,
    #[serde(skip)]
    pub e_matrix: DMatrix<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    pub theta: f64,
    pub det_e: f64,
    /// `-32 (g2 u3 + g1 v3) v2 v1 u2 u1`.
    pub det_e_closed: f64,
    /// `det E` with `g1 = theta u3`, `g2 = -theta v3`.
    pub det_e_degenerate: f64,
    /// `theta (u, -v)`.
    pub delta: [f64; 6],
    /// `|H^2 delta - 5 delta| / |delta|`.
    pub eigen_residual: f64,
}

impl SectionGeometry {
    pub fn det_relative_error(&self) -> f64 {
        (self.det_e - self.det_e_closed).abs() / self.det_e_closed.abs().max(f64::MIN_POSITIVE)
    }

    /// `det E` at the degenerate gammas, relative to the product of the
    /// column norms.
    pub fn degenerate_relative(&self) -> f64 {
        let mut m = self.e_matrix.clone();
        m.set_column(5, &DVector::from_column_slice(&self.delta));
        let scale: f64 = m.column_iter().map(|c| c.norm()).product();
        self.det_e_degenerate.abs() / scale.max(f64::MIN_POSITIVE)
    }
}

fn section_n(u: [f64; 3], v: [f64; 3]) -> DMatrix<f64> {
    const SIGNS: [[i8; 5]; 6] = [
        [1, 1, 1, -1, 1],
        [-1, 1, -1, -1, -1],
        [1, 1, 1, 1, 1],
        [1, -1, -1, -1, -1],
        [-1, -1, 1, 1, -1],
        [-1, -1, 1, 1, 1],
    ];
    let coord = [u[0], u[1], u[2], v[0], v[1], v[2]];
    DMatrix::from_fn(6, 5, |r, c| SIGNS[r][c] as f64 * coord[r])
}

fn delta_column(u: [f64; 3], v: [f64; 3], g1: f64, g2: f64) -> DVector<f64> {
    DVector::from_column_slice(&[g1 * u[0] / u[2], g1 * u[1] / u[2], g1, g2 * v[0] / v[2], g2 * v[1] / v[2], g2])
}

fn with_delta(n: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let mut e = n.clone().insert_column(5, 0.0);
    e.set_column(5, d);
    e
}

pub fn section_geometry(
    point: &PointState<f64>,
    varpi: [f64; 5],
    gamma1: f64,
    gamma2: f64,
    theta: f64,
) -> Result<SectionGeometry, PathError> {
    for (i, x) in point.values().iter().enumerate() {
        if *x == 0.0 {
            return Err(OperatorError::ZeroCoordinate(["u1", "u2", "u3", "v1", "v2", "v3"][i]).into());
        }
        if !x.is_finite() {
            return Err(OperatorError::NonFinite.into());
        }
    }
    let (u, v) = (point.u(), point.v());
    let h = h_direct(u, v);
    let n = section_n(u, v);
    let e = &n * DVector::from_column_slice(&varpi);
    let p = &h * &e;
    let e_matrix = with_delta(&n, &delta_column(u, v, gamma1, gamma2));
    let det_e = e_matrix.determinant();
    let det_e_closed = -32.0 * (gamma2 * u[2] + gamma1 * v[2]) * v[1] * v[0] * u[1] * u[0];
    let det_e_degenerate = with_delta(&n, &delta_column(u, v, theta * u[2], -theta * v[2])).determinant();
    let delta: [f64; 6] = [u[0], u[1], u[2], -v[0], -v[1], -v[2]].map(|x| theta * x);
    let dv = DVector::from_column_slice(&delta);
    let eigen_residual = (&h * &h * &dv - &dv * 5.0).norm() / dv.norm();
    Ok(SectionGeometry {
        rank_n: numeric_rank(&n, 1e-10),
        n,
        varpi,
        e: std::array::from_fn(|k| e[k]),
        p: std::array::from_fn(|k| p[k]),
        norm_gap: (e.norm() - p.norm()).abs(),
        e_matrix,
        gamma1,
        gamma2,
        theta,
        det_e,
        det_e_closed,
        det_e_degenerate,
        delta,
        eigen_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::display;
    use crate::sampling;

    #[test]
    fn all_ones_det() {
        let p = PointState::new([1.0; 3], [1.0; 3]);
        let g = section_geometry(&p, [1.0; 5], 1.0, 1.0, 1.0).unwrap();
        assert!((g.det_e + 64.0).abs() < 1e-9);
        assert!((g.det_e_closed + 64.0).abs() < 1e-12);
        assert!(g.det_e_degenerate.abs() < 1e-9);
        assert_eq!(g.rank_n, 5);
        assert!(g.eigen_residual < 1e-12);
    }

    #[test]
    fn matrix_matches_display() {
        let shown = display::matrix(&display::SECTION_N).unwrap();
        let mut rng = sampling::rng(5);
        let pt = sampling::point(&mut rng, 0);
        let f = pt.to_f64();
        let n = section_n(f.u(), f.v());
        let shown = shown.evaluate_f64(&f).unwrap();
        for r in 0..6 {
            for c in 0..5 {
                assert!((shown[(r, c)] - n[(r, c)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_points_satisfy_geometry() {
        let mut rng = sampling::rng(11);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 0).to_f64();
            let w: [f64; 5] = std::array::from_fn(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0));
            let g = section_geometry(&p, w, 0.7, -1.3, 0.4).unwrap();
            assert_eq!(g.rank_n, 5);
            assert!(g.norm_gap < 1e-10 * g.e.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0), "{}", g.norm_gap);
            assert!(g.det_relative_error() < 1e-9);
            assert!(g.degenerate_relative() < 1e-12);
            assert!(g.eigen_residual < 1e-8);
        }
    }

    #[test]
    fn zero_coordinate_rejected() {
        let p = PointState::new([1.0, 0.0, 1.0], [1.0; 3]);
        assert!(section_geometry(&p, [1.0; 5], 1.0, 1.0, 1.0).is_err());
    }
}
