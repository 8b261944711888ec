//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits 0 so the rest of the test run still executes; set
//! `ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

use std::process::Command;

use epme_core::linalg::{det_exact, numeric_rank};
use epme_core::operator::identities::{jet_identities, symbolic_suite};
use epme_core::operator::pencil::{h_squared_h_prime, higher_pencil, lambda_formula, sign_report};
use epme_core::operator::shared;
use epme_core::operator::spectral::{eigen, svd_numeric};
use epme_core::pathwise::{
    catenary_check, dissipation, integrate, integrate_fixed, section_geometry, Classification, IntegratorOptions,
    PathError, Trajectory,
};
use epme_core::sampling;
use epme_core::symbolic::PointState;
use epme_core::tuple_ops::rank_law_check;
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

const SEED: u64 = 42;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let ops = shared();
    let checks: Vec<_> = symbolic_suite(ops).into_iter().chain(jet_identities(ops)).collect();
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    outcome(failed.is_empty(), format!("{} exact identities, failing: {:?}", checks.len(), failed))
}

fn sorted_abs_dev(values: &[f64], expected: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn criterion_2() -> Outcome {
    let s5 = 5f64.sqrt();
    let mut worst = [0.0f64; 6];
    let mut ok = true;
    for p in sampling::points(SEED, 100, 1) {
        let h = shared().at(&p.to_f64()).unwrap().h;
        let spec = eigen(&h).unwrap();
        let im = spec.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let re: Vec<f64> = spec.eigenvalues.iter().map(|z| z.re).collect();
        let d_h = sorted_abs_dev(&re, &[-s5, -1.0, -1.0, 1.0, 1.0, s5]).max(im);
        let h2 = &h * &h;
        let re2: Vec<f64> = eigen(&h2).unwrap().eigenvalues.iter().map(|z| z.re).collect();
        let d_h2 = sorted_abs_dev(&re2, &[1.0, 1.0, 1.0, 1.0, 5.0, 5.0]);
        let d_det = (h.determinant().abs() - 5.0).abs();
        let s = svd_numeric(&h);
        let d_prod = (s[0] * s[5] - 5.0).abs();
        let d_mid = s[1..5].iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
        let frob: f64 = h.iter().map(|x| x * x).sum();
        let d_frob = (frob - (s[0] * s[0] + s[5] * s[5] + 4.0)).abs();
        ok &= d_h < 1e-9 && d_h2 < 1e-9 && d_det < 1e-9 && d_prod < 1e-8 && d_mid < 1e-8 && d_frob < 1e-8;
        ok &= s[0] > 1.0 && s[5] < 1.0;
        for (w, d) in worst.iter_mut().zip([d_h, d_h2, d_det, d_prod, d_mid, d_frob]) {
            *w = w.max(d);
        }
    }
    // all-ones oracle: sigma^2 roots of x^2 - 34 x + 25 with b = |H|_F^2 - 4
    let ones = shared().at(&PointState::new([1.0; 3], [1.0; 3])).unwrap().h;
    let b = ones.iter().map(|x| x * x).sum::<f64>() - 4.0;
    let disc = (b * b - 100.0).sqrt();
    let (smax, smin) = (((b + disc) / 2.0).sqrt(), ((b - disc) / 2.0).sqrt());
    let s = svd_numeric(&ones);
    let all_ones = (b - 34.0).abs() < 1e-3
        && (smax - 5.7661).abs() < 1e-3
        && (smin - 0.8671).abs() < 1e-3
        && (s[0] - smax).abs() < 1e-3
        && (s[5] - smin).abs() < 1e-3;
    outcome(
        ok && all_ones,
        format!(
            "100 points; worst eig(H) {:.1e}, eig(H^2) {:.1e}, |det| {:.1e}, product {:.1e}, unit {:.1e}, Frobenius {:.1e}; \
             all-ones b = {b:.4}, sigma = ({:.4}, {:.4})",
            worst[0], worst[1], worst[2], worst[3], worst[4], worst[5], s[0], s[5]
        ),
    )
}

fn to_f64(m: &[Vec<BigRational>]) -> DMatrix<f64> {
    DMatrix::from_fn(m.len(), m[0].len(), |i, j| m[i][j].to_f64().unwrap())
}

fn criterion_3() -> (Outcome, String) {
    // (H^2, H'): eigenvalues compared with the nonzero spectrum of (H^2)^-1 H'
    let mut part_a = true;
    let mut worst_res = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for p in sampling::points(SEED, 100, 2) {
        let sol = h_squared_h_prime(&p).unwrap();
        let pairs = sol.regular_pairs();
        let res = pairs.iter().map(|q| q.residual).fold(0.0, f64::max);
        worst_res = worst_res.max(res);
        let ex = shared().at_exact(&p).unwrap();
        let a = to_f64(&ex.h_squared);
        let b = to_f64(ex.h_prime.as_ref().unwrap());
        let m = a.try_inverse().unwrap() * b;
        let mut oracle: Vec<f64> = m
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.norm() > 1e-8 * m.norm())
            .map(|z| 1.0 / z.re)
            .collect();
        oracle.sort_by(f64::total_cmp);
        let got = sol.real_eigenvalues();
        let dev = if got.len() == oracle.len() {
            got.iter().zip(&oracle).map(|(x, y)| (x - y).abs() / y.abs().max(1.0)).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        worst_oracle = worst_oracle.max(dev);
        part_a &= sol.finite.len() == 2 && pairs.len() == 2 && res < 1e-8 && dev < 1e-6;
    }
    // ((H^2)', H''): count regular finite eigenpairs
    let counts: Vec<usize> = sampling::points(SEED, 20, 3)
        .iter()
        .map(|p| higher_pencil(p, 0).unwrap().regular_pairs().len())
        .collect();
    let part_b = counts.iter().all(|&c| c == 0);
    let jet = PointState::from_i64([1; 3], [1; 3]);
    let d = PointState::from_i64([1; 3], [-1; 3]);
    let jet = jet.with_jet(1, d.u(), d.v());
    let sol = h_squared_h_prime(&jet).unwrap();
    let formula = lambda_formula(&jet).unwrap();
    let rep = sign_report(&sol, &formula);
    let info = format!(
        "lambda formula at the exponential jet gives {}, pencil eigenvalues {:?}; (u,-v) pairs with the negative root",
        rep.formula, rep.eigenvalues
    );
    (
        outcome(
            part_a && part_b,
            format!(
                "(H^2,H') two finite eigenpairs at 100 points: {} (residual {worst_res:.1e}, oracle {worst_oracle:.1e}); \
                 ((H^2)',H'') without regular finite eigenpair at 20 points: {} (regular pairs per point {:?})",
                part_a, part_b, counts
            ),
        ),
        info,
    )
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, pass: bool, value: f64| {
        ok &= pass;
        notes.push(format!("{name} {value:.1e}{}", if pass { "" } else { " (fail)" }));
    };
    let opts = IntegratorOptions { steps: 2000, ..Default::default() };

    let tr = Trajectory::omega1([1.0; 3], [1.0; 3], -1.0, 1.0).unwrap();
    let mut sol = integrate(&tr, &tr.closed_form_start().unwrap(), &opts).unwrap();
    let e = std::f64::consts::E;
    let closed = |t: f64| [e.powf(t), e.powf(t), e.powf(t), -e.powf(-t), -e.powf(-t), -e.powf(-t)];
    let err = sol
        .samples
        .iter()
        .flat_map(|s| s.w.iter().zip(closed(s.t)).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    check("omega1 closed form", err < 1e-7, err);
    let area = sol.samples.iter().map(|s| (s.area - 3.0 * s.t).abs()).fold(0.0, f64::max);
    check("A = 3t", area < 1e-7, area);
    let cat = sol
        .samples
        .iter()
        .map(|s| (0.5 * s.w.iter().map(|x| x * x).sum::<f64>() - 3.0 * (s.double_area / 3.0).cosh()).abs())
        .fold(0.0, f64::max);
    check("catenary 3cosh(u/3)", cat < 1e-8, cat);
    let fit = catenary_check(&tr, &sol).unwrap();
    check("catenary check", fit.max_residual < 1e-8, fit.max_residual);
    let d = dissipation(&tr, &mut sol, 1e-6).unwrap();
    check("omega1 delta", d.max_delta < 1e-6, d.max_delta);

    let tr = Trajectory::omega2([1.0; 3], [1.0; 3], -0.2, 0.2).unwrap();
    let mut sol = integrate(&tr, &tr.closed_form_start().unwrap(), &opts).unwrap();
    let area = sol.samples.iter().map(|s| (s.area - 15.0 * s.t).abs()).fold(0.0, f64::max);
    check("A = 15t", area < 1e-7, area);
    let d = dissipation(&tr, &mut sol, 1e-6).unwrap();
    check("omega2 delta", d.max_delta < 1e-6, d.max_delta);

    let tr = Trajectory::perturbed(0.1, 0.0, 1.0).unwrap();
    let s = tr.state(0.0);
    let (u, v) = (s.u(), s.v());
    let mut sol = integrate(&tr, &[u[0], u[1], u[2], -v[0], -v[1], -v[2]], &opts).unwrap();
    let d = dissipation(&tr, &mut sol, 1e-6).unwrap();
    check("perturbed D", d.integrated > 1e-3 && d.classification == Classification::Dissipative, d.integrated);

    let tr = Trajectory::constant([1.0; 3], [1.0; 3], 0.0, 1.0).unwrap();
    let mut sol = integrate(&tr, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], &opts).unwrap();
    let d = dissipation(&tr, &mut sol, 1e-6).unwrap();
    let gold = d.classification == Classification::NonDissipativeLine
        && catenary_check(&tr, &sol).unwrap_err() == PathError::NoSweepArea;
    check("radial Goldschmidt", gold, 0.0);

    let tr = Trajectory::omega1([1.0; 3], [1.0; 3], -1.0, 1.0).unwrap();
    let w0 = tr.closed_form_start().unwrap();
    let max_err = |n: usize| {
        integrate_fixed(&tr, &w0, n)
            .unwrap()
            .iter()
            .flat_map(|(t, w)| w.iter().zip(closed(*t)).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    };
    let ratio = max_err(50) / max_err(100);
    check("step-halving ratio", (12.0..=20.0).contains(&ratio), ratio);
    outcome(ok, notes.join("; "))
}

fn rat(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = sampling::rng(SEED + 5);
    let mut ok = true;
    let mut worst = [0.0f64; 4];
    for p in sampling::points(SEED, 100, 1) {
        let f = p.to_f64();
        let varpi: [f64; 5] = std::array::from_fn(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0));
        let g1 = rand::Rng::gen_range(&mut rng, 0.5..2.0);
        let g2 = rand::Rng::gen_range(&mut rng, 0.5..2.0);
        let theta = sampling::rational(&mut rng);
        let g = section_geometry(&f, varpi, g1, g2, rat(&theta)).unwrap();
        let gap = g.norm_gap;
        let det_rel = g.det_relative_error();
        ok &= g.rank_n == 5 && gap < 1e-10 && det_rel < 1e-9 && g.eigen_residual < 1e-8;

        // exact oracle: det E = 0 with gamma1 = theta u3, gamma2 = -theta v3
        let vals = p.values();
        let (u3, v3) = (&vals[2], &vals[5]);
        let signs: [[i64; 5]; 6] = [
            [1, 1, 1, -1, 1],
            [-1, 1, -1, -1, -1],
            [1, 1, 1, 1, 1],
            [1, -1, -1, -1, -1],
            [-1, -1, 1, 1, -1],
            [-1, -1, 1, 1, 1],
        ];
        let (ga, gb) = (&theta * u3, -(&theta * v3));
        let delta = [
            &ga * &vals[0] / u3,
            &ga * &vals[1] / u3,
            ga.clone(),
            &gb * &vals[3] / v3,
            &gb * &vals[4] / v3,
            gb.clone(),
        ];
        let e: Vec<Vec<BigRational>> = (0..6)
            .map(|r| {
                let mut row: Vec<BigRational> =
                    (0..5).map(|c| BigRational::from_integer(signs[r][c].into()) * &vals[r]).collect();
                row.push(delta[r].clone());
                row
            })
            .collect();
        let exact_zero = det_exact(&e).is_zero();
        ok &= exact_zero && g.degenerate_relative() < 1e-12;
        let n = DMatrix::from_fn(6, 5, |r, c| signs[r][c] as f64 * rat(&vals[r]));
        ok &= numeric_rank(&n, 1e-10) == 5;
        for (w, d) in worst.iter_mut().zip([gap, det_rel, g.degenerate_relative(), g.eigen_residual]) {
            *w = w.max(d);
        }
    }
    let ones = section_geometry(&PointState::new([1.0; 3], [1.0; 3]), [1.0; 5], 1.0, 1.0, 1.0).unwrap();
    ok &= (ones.det_e + 64.0).abs() < 1e-9;
    outcome(
        ok,
        format!(
            "100 points; worst ||e|-|p|| {:.1e}, det E relative {:.1e}, degenerate det {:.1e}, 5-eigenspace residual {:.1e}; all-ones det E = {:.6}",
            worst[0], worst[1], worst[2], worst[3], ones.det_e
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = sampling::rng(SEED + 6);
    let want = [((2, 2), 3), ((2, 3), 5), ((2, 4), 7), ((3, 3), 5), ((3, 4), 10)];
    let mut ok = true;
    let mut notes = Vec::new();
    for ((k, n), expected) in want {
        let rep = rank_law_check(k, n, &mut rng, 10).unwrap();
        let pass = rep.observed.iter().all(|&r| r == expected);
        ok &= pass;
        notes.push(format!("({k},{n}) observed {:?} expected {expected}", dedup(&rep.observed)));
    }
    outcome(ok, notes.join("; "))
}

fn dedup(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort();
    v.dedup();
    v
}

fn criterion_7() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_epme");
    let run = |args: &[&str]| Command::new(bin).args(args).env_remove("EPME_SEED").output().unwrap();
    let a = run(&["verify", "--seed", "42"]);
    let b = run(&["verify", "--seed", "42"]);
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let codes = [
        (a.status.code(), Some(0)),
        (run(&["verify", "--points", "0"]).status.code(), Some(2)),
        (run(&["eigen", "--u", "1,0,1", "--v", "1,1,1"]).status.code(), Some(2)),
        (run(&["verify", "--points", "1", "--tamper", "2,3"]).status.code(), Some(1)),
        (run(&["dissipation", "--path", "radial"]).status.code(), Some(0)),
    ];
    let contract = codes.iter().all(|(got, want)| got == want);
    outcome(
        identical && contract,
        format!(
            "byte-identical reports: {identical}; exit codes {:?}",
            codes.iter().map(|(g, _)| g.unwrap_or(-1)).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let (c3, info3) = criterion_3();
    let results = [
        ("1 symbolic suite", criterion_1()),
        ("2 spectral suite", criterion_2()),
        ("3 pencil suite", c3),
        ("4 pathwise suite", criterion_4()),
        ("5 geometry suite", criterion_5()),
        ("6 rank-law suite", criterion_6()),
        ("7 determinism and exit codes", criterion_7()),
    ];
    for (name, o) in &results {
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("INFO 3 lambda sign: {info3}");
    let failed = results.iter().filter(|(_, o)| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
