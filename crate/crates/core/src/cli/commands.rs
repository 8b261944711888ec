use num_rational::BigRational;
use serde::Serialize;

use super::config::{parse_f64_list, parse_triple};
use super::output::{emit, svg_plot, to_json, Series, SCHEMA_VERSION};
use super::{CliError, Format, PathArgs, PointArgs, RunConfig, SectionArgs};
use crate::operator::pencil::{h_squared_h_prime, lambda_formula, sign_report, SignReport};
use crate::operator::spectral::{eigen, svd_closed_form};
use crate::operator::{shared, OperatorError};
use crate::pathwise::{
    arclength_relation, catenary_check, dissipation, integrate, ArclengthReport, CatenaryFit, DissipationReport,
    IntegratorOptions, PathError, PathSolution, SampledPath, Trajectory,
};
use crate::sampling;
use crate::symbolic::PointState;

fn operator_error(e: OperatorError) -> CliError {
    match e {
        OperatorError::ZeroCoordinate(_) | OperatorError::NonFinite | OperatorError::MissingJet(_) => {
            CliError::Config(e.to_string())
        }
        _ => CliError::Failure(e.to_string()),
    }
}

fn parse_point(a: &PointArgs) -> Result<PointState<BigRational>, CliError> {
    let mut p = PointState::new(parse_triple(&a.u)?, parse_triple(&a.v)?);
    if let Some(b) = p.zero_coordinate() {
        return Err(CliError::Config(format!("coordinate `{}` is zero", b.name())));
    }
    match (&a.du, &a.dv) {
        (Some(du), Some(dv)) => p = p.with_jet(1, parse_triple(du)?, parse_triple(dv)?),
        (None, None) => {}
        _ => return Err(CliError::Config("--du and --dv must be given together".into())),
    }
    Ok(p)
}

fn fmt(x: f64) -> String {
    format!("{x:.10}")
}

#[derive(Serialize)]
struct EigenReport {
    schema_version: u32,
    point: [f64; 6],
    h: Vec<[f64; 2]>,
    h_squared: Vec<[f64; 2]>,
    pencil: Option<PencilReport>,
}

#[derive(Serialize)]
struct PencilReport {
    finite: Vec<[f64; 2]>,
    residuals: Vec<f64>,
    lambda_sign: Option<SignReport>,
}

pub fn cmd_eigen(cfg: &RunConfig, a: &PointArgs) -> Result<(), CliError> {
    let p = parse_point(a)?;
    let f = p.to_f64();
    let num = shared().at(&f).map_err(operator_error)?;
    let parts = |m| -> Result<Vec<[f64; 2]>, CliError> {
        Ok(eigen(m).map_err(operator_error)?.eigenvalues.iter().map(|z| [z.re, z.im]).collect())
    };
    let pencil = if p.orders() > 1 {
        let sol = h_squared_h_prime(&p).map_err(operator_error)?;
        Some(PencilReport {
            finite: sol.finite.iter().map(|q| [q.lambda.re, q.lambda.im]).collect(),
            residuals: sol.finite.iter().map(|q| q.residual).collect(),
            lambda_sign: lambda_formula(&p).map(|l| sign_report(&sol, &l)),
        })
    } else {
        None
    };
    let report = EigenReport {
        schema_version: SCHEMA_VERSION,
        point: *f.values(),
        h: parts(&num.h)?,
        h_squared: parts(&num.h_squared)?,
        pencil,
    };
    let mut csv = String::from("operator,index,re,im\n");
    let mut rows = |name: &str, vals: &[[f64; 2]]| {
        for (i, z) in vals.iter().enumerate() {
            csv.push_str(&format!("{name},{},{},{}\n", i + 1, fmt(z[0]), fmt(z[1])));
        }
    };
    rows("H", &report.h);
    rows("H^2", &report.h_squared);
    if let Some(pr) = &report.pencil {
        rows("pencil", &pr.finite);
        if let Some(s) = &pr.lambda_sign {
            rows("lambda_formula", &[[s.formula, 0.0]]);
        }
    }
    let json = to_json(&report);
    let stdout = if cfg.format == Some(Format::Json) { 1 } else { 0 };
    emit(cfg.output_dir.as_deref(), &[("eigen.csv", csv), ("eigen.json", json)], stdout)
}

#[derive(Serialize)]
struct SvdReport {
    schema_version: u32,
    point: [f64; 6],
    sigma: [f64; 6],
    product: f64,
    b: f64,
    q: f64,
    closed_max: f64,
    closed_min: f64,
    b_reconciles: bool,
    q_printed_reconciles: bool,
    frobenius_gap: f64,
}

pub fn cmd_svd(cfg: &RunConfig, a: &PointArgs) -> Result<(), CliError> {
    let p = parse_point(a)?;
    let exact = shared().at_exact(&p).map_err(operator_error)?;
    let s = svd_closed_form(&p, &exact.h).map_err(operator_error)?;
    let report = SvdReport {
        schema_version: SCHEMA_VERSION,
        point: *p.to_f64().values(),
        sigma: s.sigma,
        product: s.product(),
        b: s.b,
        q: s.q,
        closed_max: s.closed_max,
        closed_min: s.closed_min,
        b_reconciles: s.b_reconciles,
        q_printed_reconciles: s.q_reconciles,
        frobenius_gap: s.frobenius_gap(),
    };
    let mut csv = String::from("name,value\n");
    for (i, x) in s.sigma.iter().enumerate() {
        csv.push_str(&format!("sigma{},{}\n", i + 1, fmt(*x)));
    }
    for (name, x) in [
        ("product", report.product),
        ("b", report.b),
        ("q", report.q),
        ("closed_max", report.closed_max),
        ("closed_min", report.closed_min),
        ("frobenius_gap", report.frobenius_gap),
    ] {
        csv.push_str(&format!("{name},{}\n", fmt(x)));
    }
    csv.push_str(&format!("b_reconciles,{}\nq_printed_reconciles,{}\n", s.b_reconciles, s.q_reconciles));
    let json = to_json(&report);
    let stdout = if cfg.format == Some(Format::Json) { 1 } else { 0 };
    emit(cfg.output_dir.as_deref(), &[("svd.csv", csv), ("svd.json", json)], stdout)
}

fn triple_f64(s: &Option<String>) -> Result<[f64; 3], CliError> {
    match s {
        Some(s) => parse_f64_list::<3>(s),
        None => Ok([1.0; 3]),
    }
}

/// Trajectory and default initial vector for `--path`.
fn build_path(a: &PathArgs) -> Result<(Trajectory, [f64; 6]), CliError> {
    let dom = |t0: f64, t1: f64| (a.t0.unwrap_or(t0), a.t1.unwrap_or(t1));
    let tr = match a.path.as_str() {
        "exp1" => {
            let (t0, t1) = dom(-1.0, 1.0);
            Trajectory::omega1(triple_f64(&a.c)?, triple_f64(&a.l)?, t0, t1)?
        }
        "exp5" => {
            let (t0, t1) = dom(-0.2, 0.2);
            Trajectory::omega2(triple_f64(&a.big_c)?, triple_f64(&a.big_k)?, t0, t1)?
        }
        "perturbed" => {
            let (t0, t1) = dom(0.0, 1.0);
            Trajectory::perturbed(a.eps.unwrap_or(0.1), t0, t1)?
        }
        "radial" => {
            let (t0, t1) = dom(0.0, 1.0);
            Trajectory::constant([1.0; 3], [1.0; 3], t0, t1)?
        }
        file => {
            let reader = std::fs::File::open(file)
                .map_err(|e| CliError::Config(format!("cannot open trajectory `{file}`: {e}")))?;
            Trajectory::sampled(SampledPath::from_csv(reader)?, a.t0, a.t1)?
        }
    };
    for (i, x) in tr.state(tr.t0).values().iter().enumerate() {
        if *x == 0.0 {
            let name = ["u1", "u2", "u3", "v1", "v2", "v3"][i];
            return Err(CliError::Config(format!("coordinate `{name}` is zero at t0")));
        }
    }
    let w0 = match (&a.w0, a.path.as_str()) {
        (Some(s), _) => parse_f64_list::<6>(s)?,
        (None, "radial") => [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        (None, _) => tr.closed_form_start().unwrap_or_else(|| {
            let s = tr.state(tr.t0);
            let (u, v) = (s.u(), s.v());
            [u[0], u[1], u[2], -v[0], -v[1], -v[2]]
        }),
    };
    Ok((tr, w0))
}

#[derive(Serialize)]
struct IntegratorInfo {
    steps: usize,
    tol: f64,
    substeps: usize,
    refinement_error: f64,
}

#[derive(Serialize)]
struct PathReport {
    schema_version: u32,
    path: String,
    classification: &'static str,
    #[serde(rename = "D")]
    d: f64,
    max_delta: f64,
    max_residual_catenary: Option<f64>,
    catenary: Option<CatenaryFit>,
    integrator: IntegratorInfo,
    domain: [f64; 2],
    final_area: f64,
    arclength: ArclengthSummary,
}

#[derive(Serialize)]
struct ArclengthSummary {
    max_mismatch: f64,
    volume: f64,
    surface: f64,
    /// The two integrals are reported side by side; they are not expected
    /// to agree.
    volume_minus_surface: f64,
}

impl From<&ArclengthReport> for ArclengthSummary {
    fn from(r: &ArclengthReport) -> Self {
        ArclengthSummary {
            max_mismatch: r.max_mismatch,
            volume: r.volume,
            surface: r.surface,
            volume_minus_surface: r.volume - r.surface,
        }
    }
}

fn solution_csv(sol: &PathSolution) -> String {
    let mut out = String::from("t,w1,w2,w3,w4,w5,w6,A,u,delta\n");
    for s in &sol.samples {
        let mut row = vec![format!("{:.12e}", s.t)];
        row.extend(s.w.iter().map(|x| format!("{x:.12e}")));
        row.extend([s.area, s.double_area, s.delta].iter().map(|x| format!("{x:.12e}")));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn path_svg(sol: &PathSolution, fit: Option<&CatenaryFit>) -> String {
    let measured: Vec<(f64, f64)> = sol
        .samples
        .iter()
        .map(|s| (s.double_area, 0.5 * s.w.iter().map(|x| x * x).sum::<f64>()))
        .collect();
    match fit {
        Some(f) => {
            let curve: Vec<(f64, f64)> =
                measured.iter().map(|&(u, _)| (u, f.csq * (u / f.csq + f.a).cosh())).collect();
            svg_plot("s(u) and fitted catenary", "u = 2A", "s = |w|^2 / 2", &[
                Series { label: "s(u)", color: "#1f4e9c", points: &measured },
                Series { label: "catenary", color: "#c0392b", points: &curve },
            ])
        }
        None => {
            let r: Vec<(f64, f64)> = sol.samples.iter().map(|s| (s.t, s.w.iter().map(|x| x * x).sum::<f64>().sqrt())).collect();
            svg_plot("|w| along a path with no sweep area", "t", "|w|", &[Series {
                label: "|w|",
                color: "#1f4e9c",
                points: &r,
            }])
        }
    }
}

pub fn cmd_path(cfg: &RunConfig, a: &PathArgs, report_first: bool) -> Result<(), CliError> {
    if a.steps == 0 {
        return Err(CliError::Config("--steps must be at least 1".into()));
    }
    let (tr, w0) = build_path(a)?;
    let opts = IntegratorOptions { steps: a.steps, tol: cfg.tol("integrator"), anchor: a.anchor, ..Default::default() };
    let mut sol = integrate(&tr, &w0, &opts)?;
    let d: DissipationReport = dissipation(&tr, &mut sol, cfg.tol("dissipation"))?;
    let fit = match catenary_check(&tr, &sol) {
        Ok(f) => Some(f),
        Err(PathError::NoSweepArea) => None,
        Err(e) => return Err(e.into()),
    };
    let arc = arclength_relation(&sol);
    let report = PathReport {
        schema_version: SCHEMA_VERSION,
        path: a.path.clone(),
        classification: d.classification.as_str(),
        d: d.integrated,
        max_delta: d.max_delta,
        max_residual_catenary: fit.as_ref().map(|f| f.max_residual),
        catenary: fit.clone(),
        integrator: IntegratorInfo {
            steps: sol.steps,
            tol: sol.tol,
            substeps: sol.substeps,
            refinement_error: sol.refinement_error,
        },
        domain: [tr.t0, tr.t1],
        final_area: sol.samples.last().map(|s| s.area).unwrap_or(0.0),
        arclength: (&arc).into(),
    };
    let csv = solution_csv(&sol);
    let json = to_json(&report);
    let mut files = vec![("solution.csv", csv), ("report.json", json)];
    if cfg.format == Some(Format::Svg) {
        files.push(("plot.svg", path_svg(&sol, fit.as_ref())));
    }
    let stdout = match cfg.format {
        Some(Format::Csv) => 0,
        Some(Format::Json) => 1,
        Some(Format::Svg) => 2,
        None if report_first => 1,
        None => 0,
    };
    emit(cfg.output_dir.as_deref(), &files, stdout)?;
    if cfg.output_dir.is_some() || stdout == 0 {
        eprintln!("classification: {}", report.classification);
    }
    Ok(())
}

#[derive(Serialize)]
struct SectionRow {
    index: usize,
    point: [f64; 6],
    #[serde(flatten)]
    geometry: crate::pathwise::SectionGeometry,
    passed: bool,
}

#[derive(Serialize)]
struct SectionReport {
    schema_version: u32,
    seed: u64,
    rows: Vec<SectionRow>,
    passed: bool,
}

pub fn cmd_section(cfg: &RunConfig, a: &SectionArgs) -> Result<(), CliError> {
    let mut rng = sampling::rng(cfg.seed);
    let points: Vec<PointState<f64>> = match (&a.u, &a.v) {
        (Some(u), Some(v)) => {
            let p = PointState::new(parse_triple(u)?, parse_triple(v)?);
            if let Some(b) = p.zero_coordinate() {
                return Err(CliError::Config(format!("coordinate `{}` is zero", b.name())));
            }
            vec![p.to_f64()]
        }
        (None, None) => {
            if cfg.num_points == 0 {
                return Err(CliError::Config("--points must be at least 1".into()));
            }
            (0..cfg.num_points).map(|_| sampling::point(&mut rng, 0).to_f64()).collect()
        }
        _ => return Err(CliError::Config("--u and --v must be given together".into())),
    };
    if [a.gamma1, a.gamma2, a.theta].contains(&0.0) {
        return Err(CliError::Config("gamma1, gamma2 and theta must be nonzero".into()));
    }
    let varpi = match &a.varpi {
        Some(s) => parse_f64_list::<5>(s)?,
        None => [1.0; 5],
    };
    let mut rows = Vec::new();
    for (index, p) in points.iter().enumerate() {
        let g = crate::pathwise::section_geometry(p, varpi, a.gamma1, a.gamma2, a.theta)?;
        let e_norm = g.e.iter().map(|x| x * x).sum::<f64>().sqrt();
        let passed = g.rank_n == 5
            && g.norm_gap <= cfg.tol("norm") * e_norm.max(1.0)
            && g.det_relative_error() <= cfg.tol("det")
            && g.degenerate_relative() <= cfg.tol("det")
            && g.eigen_residual <= cfg.tol("geometry");
        rows.push(SectionRow { index, point: *p.values(), geometry: g, passed });
    }
    let passed = rows.iter().all(|r| r.passed);
    let mut csv = String::from("index,rank_n,norm_gap,det_e,det_e_closed,det_relative_error,det_e_degenerate,eigen_residual,passed\n");
    for r in &rows {
        let g = &r.geometry;
        csv.push_str(&format!(
            "{},{},{:.6e},{:.12e},{:.12e},{:.6e},{:.6e},{:.6e},{}\n",
            r.index,
            g.rank_n,
            g.norm_gap,
            g.det_e,
            g.det_e_closed,
            g.det_relative_error(),
            g.det_e_degenerate,
            g.eigen_residual,
            r.passed
        ));
    }
    let report = SectionReport { schema_version: SCHEMA_VERSION, seed: cfg.seed, rows, passed };
    let json = to_json(&report);
    let stdout = if cfg.format == Some(Format::Json) { 1 } else { 0 };
    emit(cfg.output_dir.as_deref(), &[("section.csv", csv), ("section.json", json)], stdout)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failure("section geometry check failed".into()))
    }
}
