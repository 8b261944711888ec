use epme_core::pathwise::{
    catenary_check, collinearity_angles, dissipation, integrate, integrate_fixed, Classification, IntegratorOptions,
    PathError, SampledPath, Trajectory,
};

fn opts(steps: usize) -> IntegratorOptions {
    IntegratorOptions { steps, ..Default::default() }
}

fn max_error(tr: &Trajectory, steps: usize) -> f64 {
    let w0 = tr.closed_form_start().unwrap();
    integrate_fixed(tr, &w0, steps)
        .unwrap()
        .iter()
        .flat_map(|(t, w)| {
            let exact = tr.closed_form(*t).unwrap();
            w.iter().zip(exact).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

#[test]
fn fourth_order_convergence() {
    let tr = Trajectory::omega1([1.0; 3], [1.0; 3], -1.0, 1.0).unwrap();
    let ratio = max_error(&tr, 50) / max_error(&tr, 100);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn omega1_catenary_over_u_range() {
    let tr = Trajectory::omega1([1.0; 3], [1.0; 3], -1.0, 1.0).unwrap();
    let mut sol = integrate(&tr, &tr.closed_form_start().unwrap(), &opts(2000)).unwrap();
    let (u0, u1) = (sol.samples[0].double_area, sol.samples.last().unwrap().double_area);
    assert!((u0 + 6.0).abs() < 1e-7 && (u1 - 6.0).abs() < 1e-7);
    for s in &sol.samples {
        let sv = 0.5 * s.w.iter().map(|x| x * x).sum::<f64>();
        assert!((sv - 3.0 * (s.double_area / 3.0).cosh()).abs() < 1e-8);
    }
    assert!(catenary_check(&tr, &sol).unwrap().max_residual < 1e-8);
    assert!(dissipation(&tr, &mut sol, 1e-6).unwrap().max_delta < 1e-6);
    assert!(collinearity_angles(&tr, &sol).unwrap().iter().all(|a| *a < 1e-6));
}

#[test]
fn perturbed_golden_dissipation() {
    let tr = Trajectory::perturbed(0.1, 0.0, 1.0).unwrap();
    let s = tr.state(0.0);
    let (u, v) = (s.u(), s.v());
    let w0 = [u[0], u[1], u[2], -v[0], -v[1], -v[2]];
    let mut sol = integrate(&tr, &w0, &opts(1000)).unwrap();
    let d = dissipation(&tr, &mut sol, 1e-6).unwrap();
    assert_eq!(d.classification, Classification::Dissipative);
    assert!((d.integrated - 6.482555e-3).abs() < 1e-8, "{}", d.integrated);
}

#[test]
fn sampled_path_reproduces_analytic_one() {
    let tr = Trajectory::omega1([1.0, 2.0, 0.5], [1.5, 1.0, 2.0], 0.0, 1.0).unwrap();
    let mut csv = String::from("t,u1,u2,u3,v1,v2,v3\n");
    for i in 0..=400 {
        let t = i as f64 / 400.0;
        let s = tr.state(t);
        let row: Vec<String> = std::iter::once(t).chain(s.values().iter().copied()).map(|x| format!("{x:e}")).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let sampled = Trajectory::sampled(SampledPath::from_csv(csv.as_bytes()).unwrap(), None, None).unwrap();
    let w0 = tr.closed_form_start().unwrap();
    let a = integrate(&tr, &w0, &opts(200)).unwrap();
    let b = integrate(&sampled, &w0, &opts(200)).unwrap();
    let last = |s: &epme_core::pathwise::PathSolution| s.samples.last().unwrap().w;
    for (x, y) in last(&a).iter().zip(last(&b)) {
        assert!((x - y).abs() < 1e-5 * x.abs().max(1.0), "{x} {y}");
    }
}

#[test]
fn malformed_csv_reports_line() {
    let csv = "t,u1,u2,u3,v1,v2,v3\n0,1,1,1,1,1,1\n0.1,1,1,x,1,1,1\n";
    match SampledPath::from_csv(csv.as_bytes()) {
        Err(PathError::Csv { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}
