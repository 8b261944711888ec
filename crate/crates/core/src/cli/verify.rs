use nalgebra::DVector;
use num_rational::BigRational;
use serde::Serialize;

use super::output::{emit, to_json, SCHEMA_VERSION};
use super::{CliError, Format, RunConfig};
use crate::operator::identities::{
    external_det_factorization, h_squared_eigenvector_columns, jet_identities, printed_h_prime_erratum,
    symbolic_suite, IdentityCheck,
};
use crate::operator::pencil::{h_squared_h_prime, higher_pencil_scan, is_common_eigenvector, lambda_formula, sign_report};
use crate::operator::spectral::{
    display_eigenvector_residuals, eigen, expected_h_eigenvalues, svd_closed_form, EXPECTED_H_SQUARED_EIGENVALUES,
};
use crate::operator::{shared, to_f64_matrix, SymbolicOperators};
use crate::pathwise::section_geometry;
use crate::sampling;
use crate::symbolic::{PointState, RationalExpr};

/// Points used for the higher-order pencil, which is the costly check.
const HIGHER_PENCIL_POINTS: usize = 20;
const MAX_LISTED_FAILURES: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct NumericCheck {
    pub name: String,
    pub passed: bool,
    pub points: usize,
    /// Sample indices that failed, at most ten.
    pub failing_points: Vec<usize>,
    pub failures: usize,
    /// Largest deviation seen, in the units of the check.
    pub worst: f64,
    pub tolerance: f64,
}

struct Accum {
    check: NumericCheck,
}

impl Accum {
    fn new(name: &str, tolerance: f64) -> Self {
        Accum {
            check: NumericCheck {
                name: name.into(),
                passed: true,
                points: 0,
                failing_points: vec![],
                failures: 0,
                worst: 0.0,
                tolerance,
            },
        }
    }

    /// Records a deviation; `ok` may add conditions beyond `dev <= tol`.
    fn record(&mut self, index: usize, dev: f64, ok: bool) {
        let c = &mut self.check;
        c.points += 1;
        if dev.is_nan() || dev > c.worst {
            c.worst = if dev.is_nan() { f64::INFINITY } else { dev };
        }
        if !(ok && dev <= c.tolerance) {
            c.passed = false;
            c.failures += 1;
            if c.failing_points.len() < MAX_LISTED_FAILURES {
                c.failing_points.push(index);
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaSignFinding {
    /// Formula value at `u = v = 1`, `u' = u`, `v' = -v`.
    pub formula_at_exponential_jet: f64,
    pub eigenvalues_at_exponential_jet: Vec<f64>,
    /// Pencil eigenvalue whose eigenvector is `(u, -v)` there.
    pub omega1_eigenvalue: Option<f64>,
    pub points: usize,
    pub plus_matches: usize,
    pub minus_matches: usize,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisplayColumn {
    pub eigenvalue: f64,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HigherPencilFinding {
    pub points: usize,
    /// Regular finite eigenpairs of `((H^2)', H'')` per point.
    pub regular_pairs: Vec<usize>,
    /// Points where some regular eigenvector is an eigenvector of both.
    pub common_eigenvector_points: usize,
    /// Right multiplication by `H^p`, `p = 1, 2`, leaves the determinantal
    /// polynomial of the first point unchanged.
    pub powers_share_polynomial: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Findings {
    pub external_det_factorization: IdentityCheck,
    pub printed_h_prime_erratum: IdentityCheck,
    pub lambda_sign: LambdaSignFinding,
    /// Typeset eigenvectors of `H` at the first sample point.
    pub v_h_columns: Vec<DisplayColumn>,
    pub v_h_squared_columns: Vec<bool>,
    pub higher_pencil: HigherPencilFinding,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub points: usize,
    pub tampered: Option<String>,
    pub symbolic: Vec<IdentityCheck>,
    pub jet_identities: Vec<IdentityCheck>,
    pub numeric: Vec<NumericCheck>,
    pub findings: Findings,
    pub passed: bool,
}

fn parse_tamper(spec: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("--tamper expects R,C with 1 <= R,C <= 6, got `{spec}`"));
    let (r, c) = spec.split_once(',').ok_or_else(bad)?;
    let (r, c): (usize, usize) = (r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?);
    if !(1..=6).contains(&r) || !(1..=6).contains(&c) {
        return Err(bad());
    }
    Ok((r - 1, c - 1))
}

fn tampered_ops(spec: Option<&str>) -> Result<SymbolicOperators, CliError> {
    let base = shared();
    match spec {
        None => Ok(base.clone()),
        Some(s) => {
            let (r, c) = parse_tamper(s)?;
            let value = base.h.get(r, c) + &RationalExpr::one();
            base.tampered(r, c, value).map_err(|e| CliError::Failure(e.to_string()))
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn spectrum_deviation(values: &[num_complex::Complex64], expected: &[f64]) -> f64 {
    if values.len() != expected.len() {
        return f64::INFINITY;
    }
    values
        .iter()
        .zip(expected)
        .map(|(z, e)| (z.re - e).abs().max(z.im.abs()))
        .fold(0.0, f64::max)
}

fn exponential_jet() -> PointState<BigRational> {
    let p = PointState::from_i64([1; 3], [1; 3]);
    let d = PointState::from_i64([1; 3], [-1; 3]);
    p.with_jet(1, d.u(), d.v())
}

fn lambda_finding(points: &[PointState<BigRational>]) -> Result<LambdaSignFinding, CliError> {
    let fail = |e: crate::operator::OperatorError| CliError::Failure(e.to_string());
    let jet = exponential_jet();
    let sol = h_squared_h_prime(&jet).map_err(fail)?;
    let formula = lambda_formula(&jet).expect("nonzero denominator at the exponential jet");
    let rep = sign_report(&sol, &formula);
    let omega1 = DVector::from_column_slice(&[1.0, 1.0, 1.0, -1.0, -1.0, -1.0]).normalize();
    let omega1_eigenvalue = sol.regular_pairs().iter().find_map(|p| {
        let v = p.vector.as_ref()?;
        (v.dot(&omega1).abs() > 1.0 - 1e-9).then_some(p.lambda.re)
    });
    let (mut plus, mut minus, mut n) = (0, 0, 0);
    for p in points {
        let (Ok(s), Some(f)) = (h_squared_h_prime(p), lambda_formula(p)) else { continue };
        let r = sign_report(&s, &f);
        n += 1;
        plus += r.plus_matches as usize;
        minus += r.minus_matches as usize;
    }
    Ok(LambdaSignFinding {
        formula_at_exponential_jet: rep.formula,
        eigenvalues_at_exponential_jet: rep.eigenvalues,
        omega1_eigenvalue,
        points: n,
        plus_matches: plus,
        minus_matches: minus,
        note: "the two finite eigenvalues are +L and -L for the printed magnitude L; \
               the (u,-v) eigenvector on the exponential jet pairs with -L"
            .into(),
    })
}

/// Runs every suite and assembles the report without writing anything.
pub fn run_verify(cfg: &RunConfig, tamper: Option<&str>) -> Result<VerifyReport, CliError> {
    if cfg.num_points == 0 {
        return Err(CliError::Config("--points must be at least 1".into()));
    }
    let ops = tampered_ops(tamper)?;
    let symbolic = symbolic_suite(&ops);
    let jets = jet_identities(&ops);

    let points = sampling::points(cfg.seed, cfg.num_points, 3);
    let mut rng = sampling::rng(cfg.seed ^ 0x5eed);
    let mut eig_h = Accum::new("eigenvalues of H are {-sqrt5, -1, -1, 1, 1, sqrt5}", cfg.tol("eigen"));
    let mut eig_h2 = Accum::new("eigenvalues of H^2 are {1, 1, 1, 1, 5, 5}", cfg.tol("eigen"));
    let mut det = Accum::new("|det H| = 5", cfg.tol("det"));
    let mut sv = Accum::new("singular values (s_max, 1, 1, 1, 1, s_min) with s_max s_min = 5", cfg.tol("svd"));
    let mut frob = Accum::new("|H|_F^2 = s_max^2 + s_min^2 + 4", cfg.tol("svd"));
    let mut closed = Accum::new("closed-form s_max, s_min from b and q match the SVD", cfg.tol("svd"));
    let mut pencil = Accum::new("(H^2, H') has two finite eigenpairs", cfg.tol("pencil"));
    let mut higher = Accum::new("((H^2)', H'') has no common eigenvector", 0.0);
    let mut geom = Accum::new("section geometry: rank N = 5, |e| = |p|, det E, 5-eigenspace", cfg.tol("norm"));

    let mut higher_pairs = Vec::new();
    let mut common_points = 0;
    for (i, p) in points.iter().enumerate() {
        let f = p.to_f64();
        let num = ops.at(&f).map_err(|e| CliError::Failure(e.to_string()))?;
        let dev = eigen(&num.h).map(|s| spectrum_deviation(&s.eigenvalues, &expected_h_eigenvalues()));
        eig_h.record(i, dev.unwrap_or(f64::INFINITY), true);
        let dev = eigen(&num.h_squared).map(|s| spectrum_deviation(&s.eigenvalues, &EXPECTED_H_SQUARED_EIGENVALUES));
        eig_h2.record(i, dev.unwrap_or(f64::INFINITY), true);
        det.record(i, (num.h.determinant().abs() - 5.0).abs(), true);

        let exact = shared().at_exact(p).map_err(|e| CliError::Failure(e.to_string()))?;
        let h_exact = match tamper {
            None => exact.h.clone(),
            Some(_) => ops.at_exact(p).map_err(|e| CliError::Failure(e.to_string()))?.h,
        };
        match svd_closed_form(p, &h_exact) {
            Ok(s) => {
                let middle = s.sigma[1..5].iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
                let ordered = s.sigma[0] > 1.0 && s.sigma[5] < 1.0;
                sv.record(i, (s.product() - 5.0).abs().max(middle), ordered);
                frob.record(i, s.frobenius_gap(), true);
                let d = rel(s.closed_max, s.sigma[0]).max(rel(s.closed_min, s.sigma[5]));
                closed.record(i, d, s.b_reconciles);
            }
            Err(_) => {
                sv.record(i, f64::INFINITY, false);
                frob.record(i, f64::INFINITY, false);
                closed.record(i, f64::INFINITY, false);
            }
        }

        match h_squared_h_prime(p) {
            Ok(sol) => {
                let pairs = sol.regular_pairs();
                let worst = pairs.iter().map(|q| q.residual).fold(0.0, f64::max);
                pencil.record(i, worst, pairs.len() == 2 && sol.finite.len() == 2);
            }
            Err(_) => pencil.record(i, f64::INFINITY, false),
        }

        if i < HIGHER_PENCIL_POINTS {
            let sol = crate::operator::pencil::higher_pencil(p, 0).map_err(|e| CliError::Failure(e.to_string()))?;
            let a = to_f64_matrix(exact.h_squared_prime.as_ref().expect("second-order jets"));
            let b = to_f64_matrix(exact.h_second.as_ref().expect("second-order jets"));
            let pairs = sol.regular_pairs();
            let common = pairs
                .iter()
                .any(|q| is_common_eigenvector(&a, &b, q.vector.as_ref().expect("regular pair")));
            higher_pairs.push(pairs.len());
            common_points += common as usize;
            higher.record(i, 0.0, !common);
        }

        let varpi: [f64; 5] = std::array::from_fn(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0));
        let (g1, g2, theta) = (
            rand::Rng::gen_range(&mut rng, 0.5..2.0),
            rand::Rng::gen_range(&mut rng, -2.0..-0.5),
            rand::Rng::gen_range(&mut rng, 0.5..2.0),
        );
        match section_geometry(&f, varpi, g1, g2, theta) {
            Ok(g) => {
                let e_norm = g.e.iter().map(|x| x * x).sum::<f64>().sqrt();
                let ok = g.rank_n == 5
                    && g.det_relative_error() <= cfg.tol("det")
                    && g.degenerate_relative() <= cfg.tol("det")
                    && g.eigen_residual <= cfg.tol("geometry");
                geom.record(i, g.norm_gap / e_norm.max(1.0), ok);
            }
            Err(_) => geom.record(i, f64::INFINITY, false),
        }
    }

    let powers_share_polynomial = higher_pencil_scan(&points[0], 2)
        .map(|(_, scans)| scans.iter().all(|s| s.characteristic_matches_base))
        .unwrap_or(false);
    let first = points[0].to_f64();
    let h_first = ops.at(&first).map_err(|e| CliError::Failure(e.to_string()))?.h;
    let v_h_columns = display_eigenvector_residuals(&h_first, first.u(), first.v())
        .into_iter()
        .map(|(eigenvalue, residual)| DisplayColumn { eigenvalue, residual, passed: residual <= cfg.tol("geometry") })
        .collect();
    let findings = Findings {
        external_det_factorization: external_det_factorization(),
        printed_h_prime_erratum: printed_h_prime_erratum(&ops),
        lambda_sign: lambda_finding(&points)?,
        v_h_columns,
        v_h_squared_columns: h_squared_eigenvector_columns(&ops),
        higher_pencil: HigherPencilFinding {
            points: higher_pairs.len(),
            regular_pairs: higher_pairs,
            common_eigenvector_points: common_points,
            powers_share_polynomial,
        },
    };

    let numeric: Vec<NumericCheck> =
        [eig_h, eig_h2, det, sv, frob, closed, pencil, higher, geom].into_iter().map(|a| a.check).collect();
    let passed =
        symbolic.iter().all(|c| c.passed) && jets.iter().all(|c| c.passed) && numeric.iter().all(|c| c.passed);
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        points: cfg.num_points,
        tampered: tamper.map(str::to_string),
        symbolic,
        jet_identities: jets,
        numeric,
        findings,
        passed,
    })
}

fn summary_csv(r: &VerifyReport) -> String {
    let mut out = String::from("suite,name,passed,detail\n");
    let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
    for (suite, checks) in [("symbolic", &r.symbolic), ("jet", &r.jet_identities)] {
        for c in checks {
            out.push_str(&format!("{suite},{},{},{}\n", quote(&c.name), c.passed, quote(&c.offending.join(" "))));
        }
    }
    for c in &r.numeric {
        out.push_str(&format!("numeric,{},{},{}\n", quote(&c.name), c.passed, quote(&format!("worst={:e}", c.worst))));
    }
    out
}

pub fn cmd_verify(cfg: &RunConfig, tamper: Option<&str>) -> Result<(), CliError> {
    let report = run_verify(cfg, tamper)?;
    let json = to_json(&report);
    let csv = summary_csv(&report);
    let stdout = match cfg.format {
        Some(Format::Csv) => 1,
        _ => 0,
    };
    emit(cfg.output_dir.as_deref(), &[("verify_report.json", json), ("verify_summary.csv", csv)], stdout)?;
    if report.passed {
        return Ok(());
    }
    let mut failed: Vec<String> = report
        .symbolic
        .iter()
        .chain(&report.jet_identities)
        .filter(|c| !c.passed)
        .map(|c| format!("{} at {}", c.name, c.offending.join(" ")))
        .collect();
    failed.extend(report.numeric.iter().filter(|c| !c.passed).map(|c| c.name.clone()));
    Err(CliError::Failure(format!("verification failed: {}", failed.join("; "))))
}
