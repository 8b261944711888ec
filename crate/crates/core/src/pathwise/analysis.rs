use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::integrate::area_rate;
use super::{PathError, PathSolution, Trajectory};
use crate::linalg::numeric_rank;
use crate::operator::{h_direct, shared};

#[derive(Clone, Debug, Serialize)]
pub struct CatenaryFit {
    pub c_norm: Option<f64>,
    pub l_norm: Option<f64>,
    pub csq: f64,
    pub a: f64,
    pub max_residual: f64,
    /// `csq` and `a` come from a least-squares fit rather than the
    /// trajectory parameters.
    pub fitted: bool,
}

fn dot(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64; 6]) -> f64 {
    dot(a, a).sqrt()
}

/// Total swept double area; zero marks a Goldschmidt path.
fn total_sweep(sol: &PathSolution) -> f64 {
    let first = sol.samples.first().map(|s| s.double_area).unwrap_or(0.0);
    let last = sol.samples.last().map(|s| s.double_area).unwrap_or(0.0);
    last - first
}

fn is_goldschmidt(sol: &PathSolution) -> bool {
    let w_max = sol.samples.iter().map(|s| norm(&s.w)).fold(0.0, f64::max);
    let span = match (sol.samples.first(), sol.samples.last()) {
        (Some(a), Some(b)) => b.t - a.t,
        _ => 0.0,
    };
    total_sweep(sol).abs() <= 1e-12 * w_max * w_max * span.max(1.0)
}

fn catenary(csq: f64, a: f64, u: f64) -> f64 {
    csq * (u / csq + a).cosh()
}

/// Compares `s(u) = |w|^2 / 2` with `csq cosh(u / csq + a)`.
pub fn catenary_check(tr: &Trajectory, sol: &PathSolution) -> Result<CatenaryFit, PathError> {
    if is_goldschmidt(sol) {
        return Err(PathError::NoSweepArea);
    }
    let pts: Vec<(f64, f64)> = sol
        .samples
        .iter()
        .map(|s| (s.double_area, 0.5 * dot(&s.w, &s.w)))
        .collect();
    let (c_norm, l_norm, csq, a, fitted) = match tr.scale_norms() {
        Some((c, l)) => (Some(c), Some(l), c * l, (c / l).ln(), false),
        None => {
            let (csq, a) = fit_catenary(&pts);
            (None, None, csq, a, true)
        }
    };
    let max_residual = pts
        .iter()
        .map(|&(u, s)| (s - catenary(csq, a, u)).abs())
        .fold(0.0, f64::max);
    Ok(CatenaryFit { c_norm, l_norm, csq, a, max_residual, fitted })
}

/// Levenberg-Marquardt fit of `(csq, a)`.
fn fit_catenary(pts: &[(f64, f64)]) -> (f64, f64) {
    let &(u_min, s_min) = pts
        .iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty path");
    let mut p = [s_min.max(1e-12), -u_min / s_min.max(1e-12)];
    let cost = |p: &[f64; 2]| -> f64 {
        pts.iter().map(|&(u, s)| (s - catenary(p[0], p[1], u)).powi(2)).sum()
    };
    let mut mu = 1e-3;
    let mut c = cost(&p);
    for _ in 0..500 {
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(u, s) in pts {
            let x = u / p[0] + p[1];
            let r = s - p[0] * x.cosh();
            let j = [-(x.cosh() - (u / p[0]) * x.sinh()), -p[0] * x.sinh()];
            for a in 0..2 {
                jtr[a] += j[a] * r;
                for b in 0..2 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let m = [[jtj[0][0] * (1.0 + mu), jtj[0][1]], [jtj[1][0], jtj[1][1] * (1.0 + mu)]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < f64::MIN_POSITIVE {
            break;
        }
        let step = [
            -(m[1][1] * jtr[0] - m[0][1] * jtr[1]) / det,
            -(m[0][0] * jtr[1] - m[1][0] * jtr[0]) / det,
        ];
        let trial = [p[0] + step[0], p[1] + step[1]];
        let tc = if trial[0] > 0.0 { cost(&trial) } else { f64::INFINITY };
        if tc < c {
            let done = (c - tc) <= 1e-15 * c.max(f64::MIN_POSITIVE);
            p = trial;
            c = tc;
            mu = (mu * 0.3).max(1e-12);
            if done {
                break;
            }
        } else {
            mu *= 10.0;
            if mu > 1e12 {
                break;
            }
        }
    }
    (p[0], p[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    NonDissipativeCatenary,
    NonDissipativeLine,
    Dissipative,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::NonDissipativeCatenary => "NonDissipativeCatenary",
            Classification::NonDissipativeLine => "NonDissipativeLine",
            Classification::Dissipative => "Dissipative",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DissipationReport {
    pub classification: Classification,
    /// `D = integral of delta dt`.
    pub integrated: f64,
    pub max_delta: f64,
}

/// `(t''_u w'_t, t'_u^2 H' w, t'_u^2 H^2 w)` at each sample.
fn split_terms(tr: &Trajectory, sol: &PathSolution) -> Result<Vec<[[f64; 6]; 3]>, PathError> {
    let n = sol.samples.len();
    let mut tp = Vec::with_capacity(n);
    for s in &sol.samples {
        let rate = area_rate(&s.w, &s.dw);
        if rate.is_nan() || rate <= 0.0 {
            return Err(PathError::NonMonotone(s.t));
        }
        tp.push(1.0 / (2.0 * rate));
    }
    let u: Vec<f64> = sol.samples.iter().map(|s| s.double_area).collect();
    let ops = shared();
    (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            let tpp = (tp[b] - tp[a]) / (u[b] - u[a]);
            let s = &sol.samples[i];
            let at = ops.at(&tr.state(s.t))?;
            let hp = at.h_prime.expect("trajectory supplies first jets");
            let w = DVector::from_column_slice(&s.w);
            let t1 = &hp * &w * (tp[i] * tp[i]);
            let t2 = &at.h_squared * &w * (tp[i] * tp[i]);
            let arr = |v: DVector<f64>| -> [f64; 6] { std::array::from_fn(|k| v[k]) };
            Ok([s.dw.map(|x| tpp * x), arr(t1), arr(t2)])
        })
        .collect()
}

fn perp_norm(t: &[f64; 6], w: &[f64; 6]) -> f64 {
    let c = dot(t, w) / dot(w, w);
    let r: [f64; 6] = std::array::from_fn(|k| t[k] - c * w[k]);
    norm(&r)
}

/// Dissipation density `delta = sum |P_perp T_k| / |w|`, stored in the
/// samples, with its integral and classification.
pub fn dissipation(tr: &Trajectory, sol: &mut PathSolution, tol: f64) -> Result<DissipationReport, PathError> {
    if is_goldschmidt(sol) {
        for s in &mut sol.samples {
            s.delta = 0.0;
        }
        return Ok(DissipationReport {
            classification: Classification::NonDissipativeLine,
            integrated: 0.0,
            max_delta: 0.0,
        });
    }
    let terms = split_terms(tr, sol)?;
    for (s, t) in sol.samples.iter_mut().zip(&terms) {
        s.delta = t.iter().map(|tk| perp_norm(tk, &s.w)).sum::<f64>() / norm(&s.w);
    }
    let integrated = sol
        .samples
        .windows(2)
        .map(|p| 0.5 * (p[0].delta + p[1].delta) * (p[1].t - p[0].t))
        .sum();
    let max_delta = sol.samples.iter().map(|s| s.delta).fold(0.0, f64::max);
    let classification = if max_delta < tol {
        Classification::NonDissipativeCatenary
    } else {
        Classification::Dissipative
    };
    Ok(DissipationReport { classification, integrated, max_delta })
}

/// Angle in radians between `w''_u` and `w` at each sample.
pub fn collinearity_angles(tr: &Trajectory, sol: &PathSolution) -> Result<Vec<f64>, PathError> {
    let terms = split_terms(tr, sol)?;
    Ok(sol
        .samples
        .iter()
        .zip(&terms)
        .map(|(s, t)| {
            let sum: [f64; 6] = std::array::from_fn(|k| t[0][k] + t[1][k] + t[2][k]);
            let cos = dot(&sum, &s.w) / (norm(&sum) * norm(&s.w));
            let sin = perp_norm(&sum, &s.w) / norm(&sum);
            sin.atan2(cos.abs())
        })
        .collect())
}

/// Rank of `{w'_t, H' w, H^2 w}` at each sample.
pub fn gram_ranks(tr: &Trajectory, sol: &PathSolution) -> Result<Vec<usize>, PathError> {
    let ops = shared();
    sol.samples
        .iter()
        .map(|s| {
            let at = ops.at(&tr.state(s.t))?;
            let w = DVector::from_column_slice(&s.w);
            let hp = at.h_prime.expect("trajectory supplies first jets");
            let m = DMatrix::from_columns(&[DVector::from_column_slice(&s.dw), &hp * &w, &at.h_squared * &w]);
            Ok(numeric_rank(&m, 1e-9))
        })
        .collect()
}

/// Largest relative residual of `w' - H w` for `w = g(t) * closed_form(t)`
/// over the interior of the domain, with centered differences.
pub fn uniqueness_check(tr: &Trajectory, g: &dyn Fn(f64) -> f64, samples: usize) -> Result<f64, PathError> {
    tr.closed_form_start().ok_or(PathError::NoClosedForm)?;
    let w = |t: f64| tr.closed_form(t).expect("closed form").map(|x| g(t) * x);
    let h = 1e-5;
    let span = tr.t1 - tr.t0;
    let mut worst = 0.0f64;
    for i in 1..samples {
        let t = tr.t0 + span * i as f64 / samples as f64;
        let (a, b, x) = (w(t - h), w(t + h), w(t));
        let dw: [f64; 6] = std::array::from_fn(|k| (b[k] - a[k]) / (2.0 * h));
        let s = tr.state(t);
        let hm = h_direct(s.u(), s.v());
        let hw: [f64; 6] = std::array::from_fn(|r| (0..6).map(|c| hm[(r, c)] * x[c]).sum());
        let r: [f64; 6] = std::array::from_fn(|k| dw[k] - hw[k]);
        worst = worst.max(norm(&r) / norm(&x));
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct ArclengthReport {
    /// `max |ds/dL - d|w|/dl|` with `L` the arc length of `s(u)`.
    pub max_mismatch: f64,
    /// `integral of pi |w|^2 dl`.
    pub volume: f64,
    /// `integral of 2 pi s dL`.
    pub surface: f64,
    /// `(l, |w|)` along the hodograph.
    pub radius_profile: Vec<(f64, f64)>,
    /// `(L, s)`.
    pub s_profile: Vec<(f64, f64)>,
}

pub fn arclength_relation(sol: &PathSolution) -> ArclengthReport {
    let n = sol.samples.len();
    let r: Vec<f64> = sol.samples.iter().map(|s| norm(&s.w)).collect();
    let speed: Vec<f64> = sol.samples.iter().map(|s| norm(&s.dw)).collect();
    let s: Vec<f64> = r.iter().map(|x| 0.5 * x * x).collect();
    let (mut l, mut big_l) = (vec![0.0; n], vec![0.0; n]);
    let (mut volume, mut surface) = (0.0, 0.0);
    for i in 1..n {
        let dt = sol.samples[i].t - sol.samples[i - 1].t;
        let dl = 0.5 * (speed[i] + speed[i - 1]) * dt;
        let d_big = 0.5 * (r[i] * speed[i] + r[i - 1] * speed[i - 1]) * dt;
        l[i] = l[i - 1] + dl;
        big_l[i] = big_l[i - 1] + d_big;
        volume += std::f64::consts::PI * 0.5 * (r[i] * r[i] + r[i - 1] * r[i - 1]) * dl;
        surface += 2.0 * std::f64::consts::PI * 0.5 * (s[i] + s[i - 1]) * d_big;
    }
    let mut max_mismatch = 0.0f64;
    for i in 1..n.saturating_sub(1) {
        let (dl, d_big) = (l[i + 1] - l[i - 1], big_l[i + 1] - big_l[i - 1]);
        if dl <= 0.0 || d_big <= 0.0 {
            continue;
        }
        let lhs = (s[i + 1] - s[i - 1]) / d_big;
        let rhs = (r[i + 1] - r[i - 1]) / dl;
        max_mismatch = max_mismatch.max((lhs - rhs).abs());
    }
    ArclengthReport {
        max_mismatch,
        volume,
        surface,
        radius_profile: l.iter().copied().zip(r.iter().copied()).collect(),
        s_profile: big_l.iter().copied().zip(s.iter().copied()).collect(),
    }
}
