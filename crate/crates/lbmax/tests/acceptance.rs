//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.
//!
//! LBMAX_ACCEPTANCE=1,4,10 restricts the run to the listed criteria.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lbmax::eigen::Method;
use lbmax::fem::{icosphere, torus_mesh, MeshConformalFactor, MeshProblem, TriMesh};
use lbmax::gradients::{grad_moduli_mesh, grid_gradient, is_simple, mesh_gradient, SIMPLICITY_GAP};
use lbmax::io::commands::kissing_mesh;
use lbmax::io::parse_spectrum_csv;
use lbmax::lattice::{best_flat_torus_closed_form, landscape, normalized_spectrum, TorusParams};
use lbmax::optim::{init, maximize_conformal, maximize_moduli, multistart, OptimConfig, OptimRun, Surface};
use lbmax::spectral::{GridConformalFactor, GridProblem, PeriodicGrid};
use lbmax::{moduli, reference};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// A computed value agrees with a printed table entry if rounding or
/// truncating it to the printed number of decimals reproduces the entry.
fn matches_printed(value: f64, printed: &str) -> bool {
    let d = printed.split_once('.').map_or(0, |(_, f)| f.len());
    let scale = 10f64.powi(d as i32);
    let truncated = format!("{:.*}", d, (value * scale).trunc() / scale);
    format!("{:.*}", d, value) == printed || truncated == printed
}

/// Half a unit in the third significant digit of `published`.
fn within_three_digits(value: f64, published: f64) -> bool {
    let unit = 10f64.powi(published.abs().log10().floor() as i32 - 2);
    (value - published).abs() <= 0.5 * unit + 1e-12
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn flat_torus_cli(a: &str, b: &str, k: usize) -> Vec<f64> {
    let out = Command::new(env!("CARGO_BIN_EXE_lbmax"))
        .args(["spectrum", "flat-torus", "--a", a, "--b", b, "--k", &k.to_string()])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "spectrum command failed");
    parse_spectrum_csv(&String::from_utf8(out.stdout).unwrap()).unwrap().iter().map(|r| r.normalized).collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let square = flat_torus_cli("0", "1", 8);
    let equilateral = flat_torus_cli("0.5", "0.8660254037844386", 8);
    let elapsed = t.elapsed();
    let want_sq = ["39.47", "39.47", "39.47", "39.47", "78.95", "78.95", "78.95", "78.95"];
    let want_eq = ["45.58", "45.58", "45.58", "45.58", "45.58", "45.58", "136.7", "136.7"];
    let ok_sq = square[1..].iter().zip(want_sq).all(|(v, w)| matches_printed(*v, w));
    let ok_eq = equilateral[1..].iter().zip(want_eq).all(|(v, w)| matches_printed(*v, w));
    let fast = elapsed < Duration::from_secs(1);
    Outcome::new(
        ok_sq && ok_eq && fast,
        format!("square Lambda_1..8 {:.4?}; equilateral {:.4?}; {}", &square[1..], &equilateral[1..], secs(elapsed)),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let published = ["45.58", "45.58", "81.55", "81.55", "120.1", "120.1", "159.2", "159.2"];
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, want) in (1..=8).zip(published) {
        let (v, p) = best_flat_torus_closed_form(k).unwrap();
        let table = matches_printed(v, want);
        // brute-force maximization over the restricted admissible set
        let m = (k.div_ceil(2) as f64 - 1.0).max(0.0);
        let grid = landscape(k, 200, 200, 5.0, m).unwrap();
        let (gmax, ga, gb, idx) = grid.argmax().unwrap();
        let resolution = grid.local_variation(idx);
        let close = (gmax - v).abs() <= resolution && gmax <= v + 1e-9 * v;
        let near = (ga.abs() - p.a).abs() <= 1.0 / 199.0 + 1e-12 && (gb - p.b).abs() <= (5.0 - 0.75f64.sqrt()) / 199.0 + 1e-12;
        ok &= table && close && near;
        parts.push(format!("k={k} {v:.4} grid {gmax:.4} (+-{resolution:.3}) at ({ga:.3},{gb:.3})"));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    Outcome::new(ok, format!("{}; {}", parts.join("; "), secs(elapsed)))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let exact = reference::sphere_spectrum(12).normalized;
    let levels = [2usize, 3, 4, 5];
    let mut errors = vec![Vec::new(); 13];
    let mut above = true;
    let mut t5 = Duration::ZERO;
    for &s in &levels {
        let ts = Instant::now();
        let problem = MeshProblem::new(icosphere(s, 1.0).unwrap()).unwrap().with_method(Method::Lanczos);
        let res = problem.solve(&MeshConformalFactor::constant(problem.lumped.len(), 1.0), 12).unwrap();
        if s == 5 {
            t5 = ts.elapsed();
        }
        for k in 1..=12 {
            let lam = res.eigenvalues[k];
            let ex = exact[k] / (4.0 * PI);
            above &= lam >= ex;
            errors[k].push((lam - ex) / ex);
        }
    }
    // least-squares slope of log(error) against log(h), h halving per level
    let xs: Vec<f64> = levels.iter().map(|&s| -(s as f64) * 2f64.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let orders: Vec<f64> = (1..=12)
        .map(|k| {
            let ys: Vec<f64> = errors[k].iter().map(|e| e.abs().ln()).collect();
            let ym = ys.iter().sum::<f64>() / ys.len() as f64;
            let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
            let den: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
            num / den
        })
        .collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = min_order >= 1.8 && above && t5 < Duration::from_secs(120);
    Outcome::new(
        ok,
        format!("observed orders {:.2?} (min {min_order:.2}); all above exact: {above}; s=5 solve {}; total {}", orders, secs(t5), secs(t.elapsed())),
    )
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let p = TorusParams::equilateral();
    let solve = |n: usize| {
        let grid = PeriodicGrid::new(n).unwrap();
        let omega = GridConformalFactor::from_fn(&grid, |x, y| (x.cos() + y.cos()).exp()).unwrap();
        GridProblem::new(p, n).unwrap().solve(&omega, 16).unwrap().eigenvalues
    };
    let (l48, l64) = (solve(48), solve(64));
    let worst = (1..=16).map(|k| (l48[k] - l64[k]).abs() / l64[k]).fold(0.0, f64::max);
    let elapsed = t.elapsed();
    Outcome::new(worst < 1e-7 && elapsed < Duration::from_secs(60), format!("max relative change n=48 to n=64 over k<=16: {worst:.2e}; {}", secs(elapsed)))
}

const FD_STEP: f64 = 1e-5;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}

/// Normwise relative error of a moduli gradient; a per-component ratio is
/// meaningless when one component nearly vanishes.
fn rel_pair(fd: (f64, f64), an: (f64, f64)) -> f64 {
    (fd.0 - an.0).hypot(fd.1 - an.1) / an.0.hypot(an.1).max(1e-3)
}

fn smooth_grid_field(grid: &PeriodicGrid, rng: &mut ChaCha8Rng, amp: f64) -> Vec<f64> {
    let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (0..grid.len())
        .map(|i| {
            let (x, y) = grid.node(i);
            (amp * (c[0] * x.cos() + c[1] * y.sin() + c[2] * (x + y).cos() + c[3] * (x - 2.0 * y).sin() + c[4] * (2.0 * x).cos() + c[5])).exp()
        })
        .collect()
}

/// Worst relative disagreement over the omega and moduli derivatives of
/// one random flat-torus configuration, or None if lambda_k is not simple.
fn grid_check(rng: &mut ChaCha8Rng) -> Option<f64> {
    let n = 12;
    let grid = PeriodicGrid::new(n).unwrap();
    let p = TorusParams::new(rng.gen_range(-0.45..0.45), rng.gen_range(0.9..1.4)).unwrap();
    let omega = smooth_grid_field(&grid, rng, 0.3);
    let k = rng.gen_range(1..=4);
    let lam = |p: TorusParams, w: &[f64]| {
        let pr = GridProblem::new(p, n).unwrap().with_method(Method::Dense);
        pr.solve(&GridConformalFactor::new(n, w.to_vec()).unwrap(), k + 1).unwrap().normalized[k]
    };
    let pr = GridProblem::new(p, n).unwrap().with_method(Method::Dense);
    let res = pr.solve(&GridConformalFactor::new(n, omega.clone()).unwrap(), k + 1).unwrap();
    if !is_simple(&res, k, SIMPLICITY_GAP * 1e3) {
        return None;
    }
    let g = grid_gradient(&pr, &res, k, true).unwrap();
    let dir = smooth_grid_field(&grid, rng, 0.5);
    let shifted = |s: f64| omega.iter().zip(&dir).map(|(o, d)| o + s * d).collect::<Vec<_>>();
    let fd = (lam(p, &shifted(FD_STEP)) - lam(p, &shifted(-FD_STEP))) / (2.0 * FD_STEP);
    let w = grid.node_weight(&p);
    let an: f64 = g.d_omega_normalized.iter().zip(&dir).map(|(g, d)| w * g * d).sum();
    let pa = |d: f64| TorusParams::new(p.a + d, p.b).unwrap();
    let pb = |d: f64| TorusParams::new(p.a, p.b + d).unwrap();
    let fa = (lam(pa(FD_STEP), &omega) - lam(pa(-FD_STEP), &omega)) / (2.0 * FD_STEP);
    let fb = (lam(pb(FD_STEP), &omega) - lam(pb(-FD_STEP), &omega)) / (2.0 * FD_STEP);
    Some(rel(fd, an).max(rel_pair((fa, fb), (g.d_a_normalized.unwrap(), g.d_b_normalized.unwrap()))))
}

fn sphere_check(rng: &mut ChaCha8Rng) -> Option<f64> {
    let mesh = icosphere(2, 1.0).unwrap();
    let pr = MeshProblem::new(mesh.clone()).unwrap().with_method(Method::Dense);
    let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let omega: Vec<f64> = mesh.vertices.iter().map(|v| (c[0] * v[0] + c[1] * v[1] * v[2] + c[2] * v[2] + c[3] * v[0] * v[1]).exp()).collect();
    let k = rng.gen_range(1..=6);
    let res = pr.solve(&MeshConformalFactor::new(omega.clone()).unwrap(), k + 1).unwrap();
    if !is_simple(&res, k, SIMPLICITY_GAP * 1e3) {
        return None;
    }
    let g = mesh_gradient(&pr, &res, k).unwrap();
    let d: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dir: Vec<f64> = mesh.vertices.iter().map(|v| d[0] * v[0] * v[1] + d[1] * v[2] + d[2]).collect();
    let lam = |s: f64| {
        let w: Vec<f64> = omega.iter().zip(&dir).map(|(o, d)| o + s * d).collect();
        pr.solve(&MeshConformalFactor::new(w).unwrap(), k + 1).unwrap().normalized[k]
    };
    let fd = (lam(FD_STEP) - lam(-FD_STEP)) / (2.0 * FD_STEP);
    let an: f64 = g.d_omega_normalized.iter().zip(&dir).zip(&pr.lumped).map(|((g, d), m)| g * d * m).sum();
    Some(rel(fd, an))
}

fn torus_mesh_check(rng: &mut ChaCha8Rng) -> Option<f64> {
    let (nu, nv) = (12, 10);
    let p = TorusParams::new(rng.gen_range(-0.4..0.4), rng.gen_range(0.95..1.4)).unwrap();
    let k = rng.gen_range(1..=3);
    let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let uv = torus_mesh(p, nu, nv).unwrap().uv.unwrap();
    let tau = 2.0 * PI;
    let omega: Vec<f64> = uv.iter().map(|q| (c[0] * (tau * q[0]).sin() + c[1] * (tau * q[1]).cos() + c[2] * (tau * (q[0] + q[1]) + 0.7).sin()).exp()).collect();
    let solve = |p: TorusParams| {
        let m: TriMesh = torus_mesh(p, nu, nv).unwrap();
        MeshProblem::new(m).unwrap().with_method(Method::Dense).solve(&MeshConformalFactor::new(omega.clone()).unwrap(), k + 1).unwrap()
    };
    let res = solve(p);
    if !is_simple(&res, k, SIMPLICITY_GAP * 1e3) {
        return None;
    }
    let (da, db) = grad_moduli_mesh(&torus_mesh(p, nu, nv).unwrap(), p, &res, k).unwrap();
    let at = |a: f64, b: f64| solve(TorusParams::new(a, b).unwrap()).eigenvalues[k];
    let fa = (at(p.a + FD_STEP, p.b) - at(p.a - FD_STEP, p.b)) / (2.0 * FD_STEP);
    let fb = (at(p.a, p.b + FD_STEP) - at(p.a, p.b - FD_STEP)) / (2.0 * FD_STEP);
    Some(rel_pair((fa, fb), (da, db)))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let kinds: [(&str, fn(&mut ChaCha8Rng) -> Option<f64>, usize); 3] = [("grid", grid_check, 8), ("sphere", sphere_check, 6), ("torus mesh", torus_mesh_check, 6)];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    let mut total = 0;
    for (name, check, want) in kinds {
        let (mut done, mut tries, mut w) = (0, 0, 0.0f64);
        while done < want && tries < 10 * want {
            tries += 1;
            if let Some(e) = check(&mut rng) {
                done += 1;
                w = w.max(e);
            }
        }
        total += done;
        worst = worst.max(w);
        parts.push(format!("{name}: {done} configs, worst {w:.1e}"));
    }
    let elapsed = t.elapsed();
    let ok = total == 20 && worst < 1e-5 && elapsed < Duration::from_secs(120);
    Outcome::new(ok, format!("{} ({total} configurations); {}", parts.join("; "), secs(elapsed)))
}

fn best_run(runs: Vec<lbmax::Result<OptimRun>>, best: Option<usize>) -> (Vec<String>, Option<OptimRun>) {
    let lines = runs
        .iter()
        .map(|r| match r {
            Ok(r) => format!("{:.4}", r.final_lambda()),
            Err(e) => format!("error: {e}"),
        })
        .collect();
    (lines, best.map(|b| runs.into_iter().nth(b).unwrap().unwrap()))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let problem = MeshProblem::new(icosphere(4, 1.0).unwrap()).unwrap();
    let surface = Surface::Mesh(&problem);
    let sphere_run = |k: usize, starts: usize| {
        let config = OptimConfig { k, ..OptimConfig::default() };
        let (runs, best) = multistart(starts, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            let omega0 = init::random_sphere_start(&problem.mesh.vertices, k, &mut rng);
            maximize_conformal(&surface, &omega0, &config)
        });
        best_run(runs, best)
    };
    let (l1, r1) = sphere_run(1, 5);
    let t1 = t.elapsed();
    let (l2, r2) = sphere_run(2, 3);
    let elapsed = t.elapsed();
    let lam1 = r1.as_ref().map_or(f64::NAN, |r| r.final_lambda());
    let ok1 = (24.9..=25.6).contains(&lam1);
    let (lam2, peaks) = match &r2 {
        Some(r) => {
            let mut sorted = r.final_omega.clone();
            sorted.sort_by(f64::total_cmp);
            let median = sorted[sorted.len() / 2];
            (r.final_lambda(), problem.mesh.local_maxima(&r.final_omega, 2.0 * median).len())
        }
        None => (f64::NAN, 0),
    };
    let ok2 = lam2 >= 47.5 && peaks >= 2;
    let ok = ok1 && ok2 && elapsed < Duration::from_secs(15 * 60);
    Outcome::new(
        ok,
        format!(
            "k=1 starts {l1:?} best {lam1:.4} in [24.9, 25.6]: {ok1} ({}); k=2 starts {l2:?} best {lam2:.4}, {peaks} peaks above twice the median: {ok2} ({}); total {}",
            secs(t1),
            secs(elapsed - t1),
            secs(elapsed)
        ),
    )
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 2..=4 {
        let mesh = kissing_mesh(k, 3).unwrap();
        let problem = MeshProblem::new(mesh).unwrap();
        let res = problem.solve(&MeshConformalFactor::constant(problem.lumped.len(), 1.0), k).unwrap();
        let target = reference::kissing_spheres(k).unwrap();
        let err = (res.normalized[k] - target).abs() / target;
        ok &= err <= 0.015;
        parts.push(format!("k={k} Lambda_k {:.3} vs {target:.3} ({:.2}%)", res.normalized[k], 100.0 * err));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    Outcome::new(ok, format!("{}; {}", parts.join("; "), secs(elapsed)))
}

/// Distance to the equilateral point, identifying a with a + 1.
fn distance_to_equilateral(p: TorusParams) -> f64 {
    let da = (p.a - 0.5) - (p.a - 0.5).round();
    (da * da + (p.b - 0.75f64.sqrt()).powi(2)).sqrt()
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let n = 32;
    let torus_run = |k: usize, starts: usize| {
        let config = OptimConfig { k, vary_moduli: true, ..OptimConfig::default() };
        let (runs, best) = multistart(starts, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            let (p, omega0) = init::random_torus_start(n, k, config.omega_hi, &mut rng)?;
            maximize_moduli(n, p, &omega0, Method::Auto, &config)
        });
        best_run(runs, best)
    };
    let (l1, r1) = torus_run(1, 5);
    let t1 = t.elapsed();
    let (lam1, p1) = r1.as_ref().map_or((f64::NAN, None), |r| (r.final_lambda(), r.final_params));
    let dist = p1.map_or(f64::INFINITY, distance_to_equilateral);
    let ok1 = dist <= 0.02 && (lam1 - 45.58).abs() <= 0.005 * 45.58;
    let (l2, r2) = torus_run(2, 5);
    let elapsed = t.elapsed();
    let ideal = reference::equilateral_plus_spheres(2).unwrap();
    let (lam2, note) = match &r2 {
        Some(r) => {
            let total: f64 = r.final_omega.iter().sum();
            let largest = r.final_omega.iter().copied().fold(0.0, f64::max) / total;
            let mut note = format!("largest single-node area fraction {:.1}%", 100.0 * largest);
            if r.final_lambda() > ideal {
                note.push_str(&format!(", above the ideal {ideal:.2}: grid-scale concentration, not a resolved sphere"));
            }
            (r.final_lambda(), note)
        }
        None => (f64::NAN, String::new()),
    };
    let ok2 = lam2 >= 66.0;
    let ok = ok1 && ok2 && elapsed < Duration::from_secs(30 * 60);
    let p1s = p1.map_or("none".to_string(), |p| format!("({:.6}, {:.6})", p.a, p.b));
    Outcome::new(
        ok,
        format!(
            "k=1 starts {l1:?} best {lam1:.4} at {p1s}, distance {dist:.2e}: {ok1} ({}); k=2 starts {l2:?} best {lam2:.4} >= 66: {ok2}, {note} ({}); total {}",
            secs(t1),
            secs(elapsed - t1),
            secs(elapsed)
        ),
    )
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let horn = reference::embedded_torus_spectrum(1.0, 8).unwrap().normalized;
    let table = ["23.21", "23.21", "30.63", "66.58", "66.58", "78.80", "83.71", "83.71"];
    let horn_misses: Vec<String> = (1..=8).filter(|&k| !matches_printed(horn[k], table[k - 1])).map(|k| format!("k={k} {:.4} vs {}", horn[k], table[k - 1])).collect();
    let published = [(1, 23.47), (3, 65.09), (5, 108.34), (7, 150.25)];
    let mut best_parts = Vec::new();
    let mut best_ok = true;
    for (k, want) in published {
        let (a, v) = reference::best_embedded_torus(k).unwrap();
        let ok = within_three_digits(v, want);
        best_ok &= ok;
        best_parts.push(format!("k={k} {v:.4} at a={a:.4} vs {want}{}", if ok { "" } else { " (miss)" }));
    }
    let elapsed = t.elapsed();
    let ok = horn_misses.is_empty() && best_ok && elapsed < Duration::from_secs(120);
    Outcome::new(
        ok,
        format!(
            "horn torus Lambda_1..8 {:.4?}, mismatches [{}]; best embedded {}; {}",
            &horn[1..],
            horn_misses.join("; "),
            best_parts.join("; "),
            secs(elapsed)
        ),
    )
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let close = |x: &[f64], y: &[f64], tol: f64| x.iter().zip(y).all(|(a, b)| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0));

    // moduli moves leave the normalized flat-torus spectrum unchanged
    let mut invariance = true;
    let mut idempotent = true;
    for _ in 0..200 {
        let p = TorusParams::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..4.0)).unwrap();
        let base = normalized_spectrum(p, 10).unwrap();
        for q in [moduli::reflect(p).unwrap(), moduli::shift(p).unwrap(), moduli::invert(p).unwrap(), moduli::canonicalize(p).unwrap()] {
            invariance &= close(&base, &normalized_spectrum(q, 10).unwrap(), 1e-10);
        }
        let c = moduli::canonicalize(p).unwrap();
        idempotent &= moduli::canonicalize(c).unwrap() == c && moduli::contains(c).unwrap();
    }

    // disjoint union of two spheres of different size
    let small = icosphere(1, 0.7).unwrap();
    let big = icosphere(1, 1.0).unwrap().translated([5.0, 0.0, 0.0]);
    let spec = |m: &TriMesh, k: usize| {
        let pr = MeshProblem::new(m.clone()).unwrap().with_method(Method::Dense);
        pr.solve(&MeshConformalFactor::constant(m.num_vertices(), 1.0), k).unwrap()
    };
    let (rs, rb) = (spec(&small, 41), spec(&big, 41));
    let (merged, vol) = reference::disjoint_union(&[(rs.eigenvalues.clone(), rs.volume), (rb.eigenvalues.clone(), rb.volume)]);
    let ru = spec(&small.disjoint_union(&big), 83);
    let union_ok = close(&ru.eigenvalues, &merged, 1e-10) && (ru.volume - vol).abs() <= 1e-10 * vol;

    // Moebius-dilated round factor on the sphere
    let round = reference::sphere_spectrum(8).normalized;
    let sphere_err = |s: usize, alpha: Option<f64>| {
        let mesh = icosphere(s, 1.0).unwrap();
        let z: Vec<f64> = mesh.vertices.iter().map(|v| v[2]).collect();
        let omega = alpha.map_or(vec![1.0; z.len()], |a| reference::sphere_isometric_factor(a, &z));
        let pr = MeshProblem::new(mesh).unwrap();
        let r = pr.solve(&MeshConformalFactor::new(omega).unwrap(), 8).unwrap();
        (1..=8).map(|k| (r.normalized[k] - round[k]).abs() / round[k]).fold(0.0, f64::max)
    };
    let (e3, e4) = (sphere_err(3, Some(0.5)), sphere_err(4, Some(0.5)));
    let flat4 = sphere_err(4, None);
    // within discretization error: small, and shrinking with refinement at
    // better than first order
    let isometric_ok = e4 < 0.01 && e4 < e3 / 2.5;

    // dilation by constants
    let grid = PeriodicGrid::new(16).unwrap();
    let w = smooth_grid_field(&grid, &mut rng, 0.4);
    let gp = GridProblem::new(TorusParams::new(0.2, 1.1).unwrap(), 16).unwrap();
    let lam_grid = |c: f64| gp.solve(&GridConformalFactor::new(16, w.iter().map(|x| c * x).collect()).unwrap(), 8).unwrap().normalized;
    let mesh = icosphere(2, 1.0).unwrap();
    let mw: Vec<f64> = mesh.vertices.iter().map(|v| (0.3 * v[0] - 0.2 * v[2]).exp()).collect();
    let mp = MeshProblem::new(mesh).unwrap();
    let lam_mesh = |c: f64| mp.solve(&MeshConformalFactor::new(mw.iter().map(|x| c * x).collect()).unwrap(), 8).unwrap().normalized;
    let dilation_ok = [0.37, 5.2].iter().all(|&c| close(&lam_grid(1.0), &lam_grid(c), 1e-10) && close(&lam_mesh(1.0), &lam_mesh(c), 1e-10));

    let ok = invariance && idempotent && union_ok && isometric_ok && dilation_ok;
    Outcome::new(
        ok,
        format!(
            "moduli invariance {invariance}; canonicalize idempotent {idempotent}; disjoint union {union_ok}; isometric factor max rel error s=3 {e3:.2e}, s=4 {e4:.2e} (unit factor s=4 {flat4:.2e}): {isometric_ok}; dilation {dilation_ok}; {}",
            secs(t.elapsed())
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, fn() -> Outcome); 10] = [
        (1, "flat-torus analytic spectra", criterion_1),
        (2, "closed-form flat-torus maximizer", criterion_2),
        (3, "finite element convergence", criterion_3),
        (4, "spectral convergence", criterion_4),
        (5, "gradient correctness", criterion_5),
        (6, "sphere optimization", criterion_6),
        (7, "kissing-sphere meshes", criterion_7),
        (8, "genus-one optimization", criterion_8),
        (9, "embedded torus", criterion_9),
        (10, "property suites", criterion_10),
    ];
    let only: Option<Vec<usize>> = std::env::var("LBMAX_ACCEPTANCE").ok().map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let r = run();
        println!("criterion {id:>2} {}: {name}: {}", if r.pass { "PASS" } else { "FAIL" }, r.detail);
        failed += usize::from(!r.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
