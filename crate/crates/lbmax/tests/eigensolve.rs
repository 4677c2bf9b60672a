use lbmax::eigen::{dense_reference, solve_generalized, Csr, EigenRequest, Method, SymMatrix};
use lbmax::fem::{assemble, icosphere};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense(n: usize, f: impl Fn(usize, usize) -> f64) -> SymMatrix {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = f(i, j);
        }
    }
    SymMatrix::dense(n, d)
}

fn random_spd(n: usize, rng: &mut ChaCha8Rng, shift: f64) -> SymMatrix {
    let g: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>() - 0.5).collect();
    dense(n, |i, j| (0..n).map(|k| g[i * n + k] * g[j * n + k]).sum::<f64>() + if i == j { shift } else { 0.0 })
}

#[test]
fn diagonal_examples() {
    let a = SymMatrix::Diagonal(vec![1.0, 2.0, 3.0]);
    let b = SymMatrix::Diagonal(vec![1.0; 3]);
    let r = solve_generalized(&a, &b, &EigenRequest::new(2)).unwrap();
    assert!((r.values[0] - 1.0).abs() < 1e-14 && (r.values[1] - 2.0).abs() < 1e-14);
    let r = solve_generalized(&SymMatrix::Diagonal(vec![2.0]), &SymMatrix::Diagonal(vec![4.0]), &EigenRequest::new(1)).unwrap();
    assert!((r.values[0] - 0.5).abs() < 1e-15);
}

#[test]
fn dense_reference_examples() {
    let a = dense(2, |i, j| if i == j { [2.0, 8.0][i] } else { 0.0 });
    let b = dense(2, |i, j| if i == j { 1.0 } else { 0.0 });
    let v = dense_reference(&a, &b).unwrap();
    assert!((v[0] - 2.0).abs() < 1e-14 && (v[1] - 8.0).abs() < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = random_spd(20, &mut rng, 1.0);
    for x in dense_reference(&m, &m).unwrap() {
        assert!((x - 1.0).abs() < 1e-10);
    }
}

#[test]
fn dense_reference_caps_dimension() {
    let a = SymMatrix::Diagonal(vec![1.0; 5001]);
    assert!(dense_reference(&a, &a).is_err());
}

#[test]
fn random_pair_both_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_spd(50, &mut rng, 0.1);
    let b = random_spd(50, &mut rng, 5.0);
    let full = dense_reference(&a, &b).unwrap();
    let r = solve_generalized(&a, &b, &EigenRequest::new(10).method(Method::Lanczos)).unwrap();
    assert!(r.converged);
    for k in 0..10 {
        assert!((r.values[k] - full[k]).abs() <= 1e-8 * full[k].abs().max(1.0), "k={k}");
    }
    // B-orthonormal
    for i in 0..10 {
        let bx = b.apply(&r.vectors[i]);
        for j in 0..10 {
            let d: f64 = r.vectors[j].iter().zip(&bx).map(|(p, q)| p * q).sum();
            assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8);
        }
    }
}

#[test]
fn sphere_pair_matches_dense_reference() {
    let mesh = icosphere(4, 1.0).unwrap();
    let pair = assemble(&mesh, None).unwrap();
    let a = SymMatrix::Sparse(pair.stiffness);
    let b = SymMatrix::Sparse(pair.mass);
    let full = dense_reference(&a, &b).unwrap();
    let r = solve_generalized(&a, &b, &EigenRequest::new(4)).unwrap();
    assert!(r.converged);
    assert!(r.values[0].abs() < 1e-8);
    for k in 1..4 {
        assert!((r.values[k] - 2.0).abs() < 0.01);
    }
    let r = solve_generalized(&a, &b, &EigenRequest::new(16).method(Method::Lanczos)).unwrap();
    for k in 0..16 {
        assert!((r.values[k] - full[k]).abs() <= 1e-8 * full[k].abs().max(1.0), "k={k}: {} vs {}", r.values[k], full[k]);
    }
    // zero mode is constant
    let x = &r.vectors[0];
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let corr = x.iter().map(|v| v * mean).sum::<f64>() / (x.iter().map(|v| v * v).sum::<f64>().sqrt() * (mean * mean * x.len() as f64).sqrt());
    assert!(corr.abs() > 1.0 - 1e-6);
}

#[test]
fn dense_operator_with_diagonal_weight() {
    // 1D periodic Laplacian, weight varies
    let n = 600;
    let a = dense(n, |i, j| {
        let d = (i as i64 - j as i64).rem_euclid(n as i64);
        if d == 0 {
            2.0
        } else if d == 1 || d == n as i64 - 1 {
            -1.0
        } else {
            0.0
        }
    });
    let w: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (i as f64 * 0.01).sin()).collect();
    let b = SymMatrix::Diagonal(w.clone());
    let full = dense_reference(&a, &b).unwrap();
    let r = solve_generalized(&a, &b, &EigenRequest::new(12)).unwrap();
    assert!(r.converged);
    assert!(r.values[0] >= -1e-9);
    for k in 0..12 {
        assert!((r.values[k] - full[k]).abs() <= 1e-8 * full[k].abs().max(1.0), "k={k}");
    }
}

#[test]
fn skyline_solves_sparse_system() {
    let mesh = icosphere(3, 1.0).unwrap();
    let pair = assemble(&mesh, None).unwrap();
    let m = pair.stiffness.add_scaled(&pair.mass, 0.5);
    let f = lbmax::eigen::skyline::Skyline::factor(&m).unwrap();
    let x: Vec<f64> = (0..m.n).map(|i| (i as f64).sin()).collect();
    let mut y = vec![0.0; m.n];
    m.matvec(&x, &mut y);
    f.solve_in_place(&mut y);
    for i in 0..m.n {
        assert!((y[i] - x[i]).abs() < 1e-10);
    }
}

#[test]
fn non_pd_mass_is_reported() {
    let a = SymMatrix::Diagonal(vec![1.0, 2.0]);
    let b = SymMatrix::Sparse(Csr::from_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]));
    assert!(dense_reference(&a, &b).is_err());
}

#[test]
fn separable_operator_routes_agree_on_high_contrast_weights() {
    use lbmax::spectral::{lb_operator, PeriodicGrid};
    use lbmax::TorusParams;
    let n = 16;
    let grid = PeriodicGrid::new(n).unwrap();
    let a = lb_operator(TorusParams::new(0.5, 3f64.sqrt() / 2.0).unwrap(), &grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // weights spanning six decades, as in concentrated conformal factors
    let w: Vec<f64> = (0..n * n).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
    let b = SymMatrix::Diagonal(w.clone());
    let reference = dense_reference(&a, &b).unwrap();
    // default shift: the FFT route; explicit shift: a dense factorization
    let fast = solve_generalized(&a, &b, &EigenRequest::new(6).method(Method::Lanczos)).unwrap().into_result().unwrap();
    let mut req = EigenRequest::new(6).method(Method::Lanczos);
    req.shift = -1e-3;
    let factored = solve_generalized(&a, &b, &req).unwrap().into_result().unwrap();
    assert!(fast.values[0].abs() < 1e-8);
    for k in 1..6 {
        let r = reference[k];
        assert!((fast.values[k] - r).abs() < 1e-8 * r, "k={k}: {} vs {r}", fast.values[k]);
        assert!((factored.values[k] - r).abs() < 1e-8 * r, "k={k}: {} vs {r}", factored.values[k]);
    }
    // B-orthonormal vectors
    for i in 0..6 {
        for j in 0..6 {
            let bij: f64 = fast.vectors[i].iter().zip(&fast.vectors[j]).zip(&w).map(|((x, y), d)| x * y * d).sum();
            assert!((bij - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8);
        }
    }
}
