use std::f64::consts::PI;

use lbmax::eigen::Method;
use lbmax::fem::{self, assemble, glue, glue_tori_strip, icosphere, kissing_spheres, solve_mesh, torus_mesh, MeshConformalFactor, MeshProblem, TriMesh};
use lbmax::fem::off::{parse_off, to_off_string};
use lbmax::lattice::{flat_torus_spectrum, TorusParams};
use lbmax::reference;

#[test]
fn icosphere_counts_and_area() {
    for s in 0..=4usize {
        let m = icosphere(s, 1.0).unwrap();
        assert_eq!(m.num_vertices(), 10 * 4usize.pow(s as u32) + 2);
        assert_eq!(m.num_triangles(), 20 * 4usize.pow(s as u32));
        assert_eq!(fem::euler_characteristic(&m).unwrap(), 2);
        assert_eq!(fem::genus(&m).unwrap(), 0);
    }
    let a4 = icosphere(4, 1.0).unwrap().total_area();
    assert!(a4 < 4.0 * PI && (4.0 * PI - a4) / (4.0 * PI) < 3e-3);
    assert!(icosphere(8, 1.0).is_err());
}

#[test]
fn icosphere_faces_point_outward() {
    let m = icosphere(2, 1.0).unwrap();
    for t in 0..m.num_triangles() {
        let n = m.face_normal(t);
        let c = m.face_centroid(t);
        assert!(n[0] * c[0] + n[1] * c[1] + n[2] * c[2] > 0.0);
    }
}

#[test]
fn flat_torus_mesh_is_genus_one_with_area_b() {
    let p = TorusParams::new(0.3, 1.2).unwrap();
    let m = torus_mesh(p, 16, 12).unwrap();
    assert_eq!(m.num_vertices(), 192);
    assert_eq!(m.num_triangles(), 384);
    assert_eq!(fem::genus(&m).unwrap(), 1);
    assert!((m.total_area() - 1.2).abs() < 1e-12);
}

#[test]
fn stiffness_annihilates_constants_and_mass_scales() {
    let m = icosphere(2, 1.0).unwrap();
    let p1 = assemble(&m, None).unwrap();
    let ones = vec![1.0; m.num_vertices()];
    let mut a1 = vec![0.0; ones.len()];
    p1.stiffness.matvec(&ones, &mut a1);
    assert!(a1.iter().all(|v| v.abs() < 1e-12));
    assert!((p1.mass.sum() - m.total_area()).abs() < 1e-12);
    let p2 = assemble(&m, Some(&MeshConformalFactor::constant(m.num_vertices(), 2.0))).unwrap();
    let (d1, d2) = (p1.mass.to_dense(), p2.mass.to_dense());
    for (x, y) in d1.iter().zip(&d2) {
        assert!((2.0 * x - y).abs() < 1e-14);
    }
    assert!(p1.stiffness.max_asymmetry() < 1e-14);
}

#[test]
fn sphere_eigenvalues_overestimate_and_converge_quadratically() {
    let exact = reference::sphere_spectrum(8).normalized;
    let mut errs = Vec::new();
    for s in 2..=4usize {
        let res = solve_mesh(&icosphere(s, 1.0).unwrap(), None, 8).unwrap();
        assert!(res.eigenvalues[0].abs() < 1e-8);
        let mut e = 0.0f64;
        for k in 1..=8 {
            let analytic = exact[k] / (4.0 * PI);
            assert!(res.eigenvalues[k] >= analytic, "s={s} k={k}: {}", res.eigenvalues[k]);
            e = e.max((res.eigenvalues[k] - analytic) / analytic);
        }
        errs.push(e);
    }
    for w in errs.windows(2) {
        let r = w[1] / w[0];
        assert!((0.2..=0.35).contains(&r), "error ratio {r}");
    }
}

#[test]
fn flat_torus_mesh_matches_lattice() {
    let p = TorusParams::square();
    let res = solve_mesh(&torus_mesh(p, 32, 32).unwrap(), None, 4).unwrap();
    let exact = flat_torus_spectrum(p, 4).unwrap();
    for k in 1..=4 {
        assert!((res.eigenvalues[k] - exact[k].lambda).abs() / exact[k].lambda < 0.01);
    }
}

#[test]
fn gluing_two_spheres_gives_a_sphere() {
    let a = icosphere(2, 1.0).unwrap();
    let g = kissing_spheres(&[a.clone(), a.clone()]).unwrap();
    assert_eq!(g.num_vertices(), 2 * a.num_vertices() - 3);
    assert_eq!(g.num_triangles(), 2 * a.num_triangles() - 2);
    assert_eq!(fem::euler_characteristic(&g).unwrap(), 2);
    assert_eq!(g.connected_components().len(), 1);
    let h = glue(&a, &a, 0, 5).unwrap();
    assert_eq!(fem::genus(&h).unwrap(), 0);
}

#[test]
fn two_kissing_spheres_normalized_value() {
    let s = icosphere(3, 1.0).unwrap();
    let g = kissing_spheres(&[s.clone(), s]).unwrap();
    let res = solve_mesh(&g, None, 2).unwrap();
    let target = reference::kissing_spheres(2).unwrap();
    assert!((res.normalized[2] - target).abs() / target < 0.015, "{}", res.normalized[2]);
}

#[test]
fn strip_glued_tori_have_genus_one() {
    let p = TorusParams::equilateral();
    let t = torus_mesh(p, 12, 12).unwrap();
    let g = glue_tori_strip(&t, &t, 12).unwrap();
    assert_eq!(fem::euler_characteristic(&g).unwrap(), 0);
    assert_eq!(fem::genus(&g).unwrap(), 1);
    assert_eq!(g.num_vertices(), 2 * 144 - 24);
    assert!((g.total_area() - 2.0 * (t.total_area() - t.total_area() / 12.0)).abs() < 1e-12);
    let res = solve_mesh(&g, None, 2).unwrap();
    assert!(res.eigenvalues[0].abs() < 1e-8 && res.eigenvalues[1] > 1e-3);
}

#[test]
fn disjoint_union_spectrum_is_multiset_union() {
    let a = icosphere(1, 1.0).unwrap();
    let b = icosphere(1, 1.7).unwrap().translated([5.0, 0.0, 0.0]);
    let u = a.disjoint_union(&b);
    assert_eq!(u.connected_components().len(), 2);
    let k = 20;
    let dense = |m: &TriMesh| MeshProblem::new(m.clone()).unwrap().with_method(Method::Dense);
    let ones = |m: &TriMesh| MeshConformalFactor::constant(m.num_vertices(), 1.0);
    let ra = dense(&a).solve(&ones(&a), k).unwrap();
    let rb = dense(&b).solve(&ones(&b), k).unwrap();
    let ru = dense(&u).solve(&ones(&u), k).unwrap();
    let (merged, vol) = reference::disjoint_union(&[(ra.eigenvalues.clone(), ra.volume), (rb.eigenvalues.clone(), rb.volume)]);
    assert!((vol - ru.volume).abs() < 1e-12);
    for i in 0..=k {
        assert!((merged[i] - ru.eigenvalues[i]).abs() < 1e-10 * merged[i].max(1.0), "{i}: {} vs {}", merged[i], ru.eigenvalues[i]);
    }
}

#[test]
fn off_round_trip_is_exact() {
    let m = icosphere(2, 1.3).unwrap();
    let back = parse_off(&to_off_string(&m)).unwrap();
    assert_eq!(back.vertices, m.vertices);
    assert_eq!(back.triangles, m.triangles);
    assert!(parse_off("OFF\n1 1 0\n0 0 0\n4 0 0 0 0\n").is_err());
    assert!(parse_off("PLY\n").is_err());
    assert!(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n").is_err());
}

#[test]
fn isometric_sphere_factor_keeps_round_values() {
    let m = icosphere(4, 1.0).unwrap();
    let z: Vec<f64> = m.vertices.iter().map(|v| v[2]).collect();
    let omega = MeshConformalFactor::new(reference::sphere_isometric_factor(0.5, &z)).unwrap();
    let res = solve_mesh(&m, Some(&omega), 8).unwrap();
    let round = reference::sphere_spectrum(8).normalized;
    for k in 1..=8 {
        assert!((res.normalized[k] - round[k]).abs() / round[k] < 0.01, "k={k}: {}", res.normalized[k]);
    }
    assert!((res.volume - 4.0 * PI).abs() / (4.0 * PI) < 0.01);
}

#[test]
fn sparse_and_dense_routes_agree_on_a_torus() {
    let m = torus_mesh(TorusParams::new(0.2, 0.9).unwrap(), 20, 20).unwrap();
    let w: Vec<f64> = m.uv.as_ref().unwrap().iter().map(|p| 1.0 + 0.5 * (2.0 * PI * p[0]).sin()).collect();
    let omega = MeshConformalFactor::new(w).unwrap();
    let rl = MeshProblem::new(m.clone()).unwrap().with_method(Method::Lanczos).solve(&omega, 6).unwrap();
    let rd = MeshProblem::new(m).unwrap().with_method(Method::Dense).solve(&omega, 6).unwrap();
    for k in 0..=6 {
        assert!((rl.eigenvalues[k] - rd.eigenvalues[k]).abs() < 1e-8 * rd.eigenvalues[k].max(1.0));
    }
}

#[test]
fn degenerate_inputs_are_rejected() {
    let flat = TriMesh::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]], vec![[0, 1, 2]]);
    assert!(assemble(&flat, None).is_err() || flat.validate().is_err());
    assert!(MeshConformalFactor::new(vec![1.0, 0.0]).is_err());
    assert!(torus_mesh(TorusParams::square(), 4, 8).is_err());
}

#[test]
fn local_maxima_count_peaks_once() {
    let m = icosphere(3, 1.0).unwrap();
    let z: Vec<f64> = m.vertices.iter().map(|v| v[2]).collect();
    let z2: Vec<f64> = z.iter().map(|v| v * v).collect();
    let flat = vec![1.0; m.num_vertices()];
    assert_eq!(m.local_maxima(&z, 0.0).len(), 1);
    assert_eq!(m.local_maxima(&z2, 0.5).len(), 2);
    assert_eq!(m.local_maxima(&flat, 0.0), vec![0]);
    assert!(m.local_maxima(&z2, 2.0).is_empty());
    let nb = m.vertex_neighbors();
    assert!(nb.iter().all(|l| l.len() == 5 || l.len() == 6));
}
