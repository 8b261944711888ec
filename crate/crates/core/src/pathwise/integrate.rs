use serde::Serialize;

use super::{PathError, Trajectory};
use crate::operator::h_direct;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntegratorOptions {
    /// Output grid intervals; also the first integration attempt.
    pub steps: usize,
    /// Relative bound on the difference between successive refinements.
    pub tol: f64,
    pub max_refinements: u32,
    /// Parameter value where the sweep area is zero, clamped to the domain.
    pub anchor: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { steps: 1000, tol: 1e-10, max_refinements: 6, anchor: 0.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub w: [f64; 6],
    /// `w'_t = H w`.
    pub dw: [f64; 6],
    pub area: f64,
    /// `u = 2 A`.
    pub double_area: f64,
    /// Dissipation density; zero until computed.
    pub delta: f64,
}

#[derive(Clone, Debug)]
pub struct PathSolution {
    pub samples: Vec<PathSample>,
    pub steps: usize,
    pub substeps: usize,
    pub tol: f64,
    pub refinement_error: f64,
}

fn mat_vec(h: &nalgebra::DMatrix<f64>, w: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| (0..6).map(|j| h[(i, j)] * w[j]).sum())
}

fn rhs(tr: &Trajectory, t: f64, w: &[f64; 6], reference: &[f64; 6]) -> Result<[f64; 6], PathError> {
    if let Some(name) = tr.sign_violation(t, reference) {
        return Err(PathError::ZeroCrossing { name, t });
    }
    let s = tr.state(t);
    Ok(mat_vec(&h_direct(s.u(), s.v()), w))
}

fn axpy(a: &[f64; 6], k: f64, b: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| a[i] + k * b[i])
}

/// Classical fourth-order Runge-Kutta on a uniform grid of `steps`
/// intervals, returning `steps + 1` states.
pub fn integrate_fixed(tr: &Trajectory, w0: &[f64; 6], steps: usize) -> Result<Vec<(f64, [f64; 6])>, PathError> {
    if w0.iter().all(|x| *x == 0.0) {
        return Err(PathError::ZeroInitial);
    }
    let steps = steps.max(1);
    let h = (tr.t1 - tr.t0) / steps as f64;
    if h.is_nan() || h <= 1e-12 * (tr.t1 - tr.t0).abs().max(1.0) {
        return Err(PathError::StepUnderflow(tr.t0));
    }
    let reference = *tr.state(tr.t0).values();
    let mut out = Vec::with_capacity(steps + 1);
    let mut w = *w0;
    out.push((tr.t0, w));
    for i in 0..steps {
        let t = tr.t0 + i as f64 * h;
        let k1 = rhs(tr, t, &w, &reference)?;
        let k2 = rhs(tr, t + h / 2.0, &axpy(&w, h / 2.0, &k1), &reference)?;
        let k3 = rhs(tr, t + h / 2.0, &axpy(&w, h / 2.0, &k2), &reference)?;
        let k4 = rhs(tr, t + h, &axpy(&w, h, &k3), &reference)?;
        w = std::array::from_fn(|j| w[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        let t_next = if i + 1 == steps { tr.t1 } else { tr.t0 + (i + 1) as f64 * h };
        out.push((t_next, w));
    }
    Ok(out)
}

/// Integrates `w' = H w`, halving the step until successive refinements
/// agree to `tol`, then fills in the sweep area.
pub fn integrate(tr: &Trajectory, w0: &[f64; 6], opts: &IntegratorOptions) -> Result<PathSolution, PathError> {
    let steps = opts.steps.max(1);
    let mut n = steps;
    let mut coarse = integrate_fixed(tr, w0, n)?;
    let mut err = f64::INFINITY;
    for _ in 0..opts.max_refinements {
        let fine = integrate_fixed(tr, w0, 2 * n)?;
        let scale = fine.iter().flat_map(|(_, w)| w.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        err = coarse
            .iter()
            .zip(fine.iter().step_by(2))
            .flat_map(|((_, a), (_, b))| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
            / scale.max(f64::MIN_POSITIVE);
        coarse = fine;
        n *= 2;
        if err < opts.tol {
            break;
        }
    }
    let stride = n / steps;
    let mut samples: Vec<PathSample> = coarse
        .iter()
        .step_by(stride)
        .map(|&(t, w)| {
            let s = tr.state(t);
            PathSample {
                t,
                w,
                dw: mat_vec(&h_direct(s.u(), s.v()), &w),
                area: 0.0,
                double_area: 0.0,
                delta: 0.0,
            }
        })
        .collect();
    sweep_area(&mut samples, opts.anchor);
    Ok(PathSolution { samples, steps, substeps: n, tol: opts.tol, refinement_error: err })
}

/// `dA/dt = |w| |w'_perp| / 2`.
pub fn area_rate(w: &[f64; 6], dw: &[f64; 6]) -> f64 {
    let ww: f64 = w.iter().map(|x| x * x).sum();
    let dd: f64 = dw.iter().map(|x| x * x).sum();
    let wd: f64 = w.iter().zip(dw).map(|(a, b)| a * b).sum();
    0.5 * (ww * dd - wd * wd).max(0.0).sqrt()
}

/// Trapezoid accumulation of the sweep area, zero at `anchor`.
pub fn sweep_area(samples: &mut [PathSample], anchor: f64) {
    if samples.is_empty() {
        return;
    }
    let rates: Vec<f64> = samples.iter().map(|s| area_rate(&s.w, &s.dw)).collect();
    let mut acc = 0.0;
    samples[0].area = 0.0;
    for i in 1..samples.len() {
        acc += 0.5 * (rates[i] + rates[i - 1]) * (samples[i].t - samples[i - 1].t);
        samples[i].area = acc;
    }
    let (first, last) = (samples[0].t, samples[samples.len() - 1].t);
    let a = anchor.clamp(first, last);
    let j = samples.partition_point(|s| s.t <= a).clamp(1, samples.len() - 1);
    let (s0, s1) = (&samples[j - 1], &samples[j]);
    let offset = s0.area + (a - s0.t) / (s1.t - s0.t) * (s1.area - s0.area);
    for s in samples.iter_mut() {
        s.area -= offset;
        s.double_area = 2.0 * s.area;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega1_matches_closed_form() {
        let tr = Trajectory::omega1([1.0; 3], [1.0; 3], 0.0, 1.0).unwrap();
        let w0 = tr.closed_form_start().unwrap();
        let sol = integrate(&tr, &w0, &IntegratorOptions { steps: 200, ..Default::default() }).unwrap();
        let last = sol.samples.last().unwrap();
        let e = std::f64::consts::E;
        let want = [e, e, e, -1.0 / e, -1.0 / e, -1.0 / e];
        assert!(last.w.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-9));
        assert!((last.area - 3.0).abs() < 1e-9);
    }

    #[test]
    fn zero_crossing_is_an_error() {
        let tr = Trajectory::closure(
            |t| crate::symbolic::PointState::new([1.0 - t, 1.0, 1.0], [1.0; 3]),
            0.0,
            2.0,
        )
        .unwrap();
        let err = integrate_fixed(&tr, &[1.0; 6], 10).unwrap_err();
        assert!(matches!(err, PathError::ZeroCrossing { name: "u1", .. }));
    }

    #[test]
    fn scaling_is_linear() {
        let tr = Trajectory::omega1([1.0, 2.0, 0.5], [0.7, 1.0, 1.5], -0.5, 0.5).unwrap();
        let w0 = tr.closed_form_start().unwrap();
        let a = integrate_fixed(&tr, &w0, 100).unwrap();
        let b = integrate_fixed(&tr, &w0.map(|x| 2.0 * x), 100).unwrap();
        for ((_, x), (_, y)) in a.iter().zip(&b) {
            assert!(x.iter().zip(y).all(|(p, q)| (2.0 * p - q).abs() < 1e-12 * q.abs().max(1.0)));
        }
    }
}
