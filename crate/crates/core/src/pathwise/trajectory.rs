use std::fmt;
use std::io::Read;
use std::sync::Arc;

use super::PathError;
use crate::symbolic::{Base, PointState};

type StateFn = dyn Fn(f64) -> PointState<f64> + Send + Sync;

#[derive(Clone)]
pub enum TrajectoryKind {
    /// `u = c e^t`, `v = l e^-t`.
    ExponentialOmega1 { c: [f64; 3], l: [f64; 3] },
    /// `u = C e^5t`, `v = K e^-5t`.
    ExponentialOmega2 { c: [f64; 3], k: [f64; 3] },
    Sampled(SampledPath),
    /// Programmatic path returning values and two derivative jets.
    Closure(Arc<StateFn>),
}

impl fmt::Debug for TrajectoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrajectoryKind::ExponentialOmega1 { c, l } => {
                write!(f, "ExponentialOmega1 {{ c: {c:?}, l: {l:?} }}")
            }
            TrajectoryKind::ExponentialOmega2 { c, k } => {
                write!(f, "ExponentialOmega2 {{ c: {c:?}, k: {k:?} }}")
            }
            TrajectoryKind::Sampled(s) => write!(f, "Sampled({} rows)", s.t.len()),
            TrajectoryKind::Closure(_) => f.write_str("Closure"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub t0: f64,
    pub t1: f64,
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    a.map(|x| x * s)
}

fn norm3(a: &[f64; 3]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl Trajectory {
    pub fn new(kind: TrajectoryKind, t0: f64, t1: f64) -> Result<Self, PathError> {
        if !t0.is_finite() || !t1.is_finite() || t0 >= t1 {
            return Err(PathError::BadDomain(t0, t1));
        }
        if let TrajectoryKind::Sampled(s) = &kind {
            let (a, b) = (s.t[0], s.t[s.t.len() - 1]);
            if t0 < a || t1 > b {
                return Err(PathError::BadDomain(t0, t1));
            }
        }
        Ok(Trajectory { kind, t0, t1 })
    }

    pub fn omega1(c: [f64; 3], l: [f64; 3], t0: f64, t1: f64) -> Result<Self, PathError> {
        Self::new(TrajectoryKind::ExponentialOmega1 { c, l }, t0, t1)
    }

    pub fn omega2(c: [f64; 3], k: [f64; 3], t0: f64, t1: f64) -> Result<Self, PathError> {
        Self::new(TrajectoryKind::ExponentialOmega2 { c, k }, t0, t1)
    }

    /// `u = e^t (1 + eps sin t) (1, 1, 1)`, `v = e^-t (1, 1, 1)`.
    pub fn perturbed(eps: f64, t0: f64, t1: f64) -> Result<Self, PathError> {
        let f = move |t: f64| {
            let (e, s, c) = (t.exp(), t.sin(), t.cos());
            let u = e * (1.0 + eps * s);
            let du = e * (1.0 + eps * s + eps * c);
            let ddu = e * (1.0 + 2.0 * eps * c);
            let v = (-t).exp();
            PointState::new([u; 3], [v; 3])
                .with_jet(1, [du; 3], [-v; 3])
                .with_jet(2, [ddu; 3], [v; 3])
        };
        Self::new(TrajectoryKind::Closure(Arc::new(f)), t0, t1)
    }

    /// Constant `u = v = (1, 1, 1)`; paired with `w0 = e1` it yields a ray.
    pub fn constant(u: [f64; 3], v: [f64; 3], t0: f64, t1: f64) -> Result<Self, PathError> {
        let f = move |_t: f64| {
            PointState::new(u, v)
                .with_jet(1, [0.0; 3], [0.0; 3])
                .with_jet(2, [0.0; 3], [0.0; 3])
        };
        Self::new(TrajectoryKind::Closure(Arc::new(f)), t0, t1)
    }

    pub fn closure(
        f: impl Fn(f64) -> PointState<f64> + Send + Sync + 'static,
        t0: f64,
        t1: f64,
    ) -> Result<Self, PathError> {
        Self::new(TrajectoryKind::Closure(Arc::new(f)), t0, t1)
    }

    pub fn sampled(path: SampledPath, t0: Option<f64>, t1: Option<f64>) -> Result<Self, PathError> {
        let a = t0.unwrap_or(path.t[0]);
        let b = t1.unwrap_or(path.t[path.t.len() - 1]);
        Self::new(TrajectoryKind::Sampled(path), a, b)
    }

    /// Values and first two derivative jets at `t`.
    pub fn state(&self, t: f64) -> PointState<f64> {
        match &self.kind {
            TrajectoryKind::ExponentialOmega1 { c, l } => {
                let (e, f) = (t.exp(), (-t).exp());
                let (u, v) = (scale(*c, e), scale(*l, f));
                PointState::new(u, v)
                    .with_jet(1, u, v.map(|x| -x))
                    .with_jet(2, u, v)
            }
            TrajectoryKind::ExponentialOmega2 { c, k } => {
                let (e, f) = ((5.0 * t).exp(), (-5.0 * t).exp());
                let (u, v) = (scale(*c, e), scale(*k, f));
                PointState::new(u, v)
                    .with_jet(1, scale(u, 5.0), scale(v, -5.0))
                    .with_jet(2, scale(u, 25.0), scale(v, 25.0))
            }
            TrajectoryKind::Sampled(s) => s.state(t),
            TrajectoryKind::Closure(f) => f(t),
        }
    }

    /// Closed-form solution of `w' = H w` for the exponential families,
    /// `(u, -v)` and `(u, v)` respectively.
    pub fn closed_form(&self, t: f64) -> Option<[f64; 6]> {
        let s = self.state(t);
        let (u, v) = (s.u(), s.v());
        match self.kind {
            TrajectoryKind::ExponentialOmega1 { .. } => Some([u[0], u[1], u[2], -v[0], -v[1], -v[2]]),
            TrajectoryKind::ExponentialOmega2 { .. } => Some([u[0], u[1], u[2], v[0], v[1], v[2]]),
            _ => None,
        }
    }

    /// `(|c|, |l|)` for the exponential families.
    pub fn scale_norms(&self) -> Option<(f64, f64)> {
        match &self.kind {
            TrajectoryKind::ExponentialOmega1 { c, l } => Some((norm3(c), norm3(l))),
            TrajectoryKind::ExponentialOmega2 { c, k } => Some((norm3(c), norm3(k))),
            _ => None,
        }
    }

    /// Initial vector of the closed-form solution, or `None` off the
    /// exponential families.
    pub fn closed_form_start(&self) -> Option<[f64; 6]> {
        self.closed_form(self.t0)
    }

    /// First coordinate whose sign differs from its sign at `t0`, or is zero.
    pub fn sign_violation(&self, t: f64, reference: &[f64; 6]) -> Option<&'static str> {
        let s = self.state(t);
        s.values()
            .iter()
            .zip(reference)
            .position(|(x, r)| *x == 0.0 || x.signum() != r.signum() || !x.is_finite())
            .and_then(Base::from_index)
            .map(Base::name)
    }
}

/// Tabulated trajectory with cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct SampledPath {
    pub t: Vec<f64>,
    pub values: Vec<[f64; 6]>,
    pub first: Vec<[f64; 6]>,
    /// Explicit second derivatives, interpolated linearly when present.
    pub second: Option<Vec<[f64; 6]>>,
}

impl SampledPath {
    /// Builds from rows; missing first derivatives are filled by centered
    /// differences (one-sided at the ends).
    pub fn new(
        t: Vec<f64>,
        values: Vec<[f64; 6]>,
        first: Option<Vec<[f64; 6]>>,
        second: Option<Vec<[f64; 6]>>,
    ) -> Result<Self, PathError> {
        if t.len() < 3 {
            return Err(PathError::Csv { line: 1, message: "need at least three rows".into() });
        }
        if let Some(i) = t.windows(2).position(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(PathError::Csv {
                line: i as u64 + 3,
                message: "t must be strictly increasing".into(),
            });
        }
        let first = first.unwrap_or_else(|| differences(&t, &values));
        Ok(SampledPath { t, values, first, second })
    }

    /// Reads `t,u1,u2,u3,v1,v2,v3[,du1..dv3[,ddu1..ddv3]]` with a header.
    pub fn from_csv(reader: impl Read) -> Result<Self, PathError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header_len = rdr
            .headers()
            .map_err(|e| PathError::Csv { line: 1, message: e.to_string() })?
            .len();
        if ![7, 13, 19].contains(&header_len) {
            return Err(PathError::Csv {
                line: 1,
                message: format!("expected 7, 13 or 19 columns, found {header_len}"),
            });
        }
        let (mut t, mut values, mut first, mut second) = (vec![], vec![], vec![], vec![]);
        for rec in rdr.records() {
            let rec = rec.map_err(|e| PathError::Csv {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let nums: Vec<f64> = rec
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| PathError::Csv { line, message: e.to_string() })?;
            if nums.iter().any(|x| !x.is_finite()) {
                return Err(PathError::Csv { line, message: "non-finite value".into() });
            }
            let block = |k: usize| -> [f64; 6] { std::array::from_fn(|i| nums[1 + 6 * k + i]) };
            t.push(nums[0]);
            values.push(block(0));
            if header_len >= 13 {
                first.push(block(1));
            }
            if header_len == 19 {
                second.push(block(2));
            }
        }
        SampledPath::new(
            t,
            values,
            (header_len >= 13).then_some(first),
            (header_len == 19).then_some(second),
        )
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.t.len();
        match self.t.partition_point(|&x| x <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    pub fn state(&self, t: f64) -> PointState<f64> {
        let i = self.segment(t);
        let (ta, tb) = (self.t[i], self.t[i + 1]);
        let h = tb - ta;
        let s = (t - ta) / h;
        let (s2, s3) = (s * s, s * s * s);
        let (h00, h10, h01, h11) = (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2);
        let (d00, d10, d01, d11) = (6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s);
        let (e00, e10, e01, e11) = (12.0 * s - 6.0, 6.0 * s - 4.0, -12.0 * s + 6.0, 6.0 * s - 2.0);
        let (pa, pb, ma, mb) = (&self.values[i], &self.values[i + 1], &self.first[i], &self.first[i + 1]);
        let val: [f64; 6] = std::array::from_fn(|k| h00 * pa[k] + h10 * h * ma[k] + h01 * pb[k] + h11 * h * mb[k]);
        let d1: [f64; 6] =
            std::array::from_fn(|k| (d00 * pa[k] + d01 * pb[k]) / h + d10 * ma[k] + d11 * mb[k]);
        let d2: [f64; 6] = match &self.second {
            Some(sec) => std::array::from_fn(|k| (1.0 - s) * sec[i][k] + s * sec[i + 1][k]),
            None => std::array::from_fn(|k| {
                (e00 * pa[k] + e01 * pb[k]) / (h * h) + (e10 * ma[k] + e11 * mb[k]) / h
            }),
        };
        let split = |a: [f64; 6]| ([a[0], a[1], a[2]], [a[3], a[4], a[5]]);
        let (u, v) = split(val);
        let (du, dv) = split(d1);
        let (ddu, ddv) = split(d2);
        PointState::new(u, v).with_jet(1, du, dv).with_jet(2, ddu, ddv)
    }
}

fn differences(t: &[f64], x: &[[f64; 6]]) -> Vec<[f64; 6]> {
    let n = t.len();
    (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            std::array::from_fn(|k| (x[b][k] - x[a][k]) / (t[b] - t[a]))
        })
        .collect()
}
