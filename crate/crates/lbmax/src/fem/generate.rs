use std::collections::HashMap;
use std::f64::consts::PI;

use super::mesh::TriMesh;
use crate::error::{invalid, Result};
use crate::lattice::TorusParams;

fn normalize(v: [f64; 3], r: f64) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [r * v[0] / n, r * v[1] / n, r * v[2] / n]
}

/// Geodesic sphere: the icosahedron subdivided `subdivisions` times with new
/// vertices projected to the sphere of the given radius.
pub fn icosphere(subdivisions: usize, radius: f64) -> Result<TriMesh> {
    if subdivisions > 7 {
        return invalid(format!("subdivisions must be in [0, 7], got {subdivisions}"));
    }
    if !(radius > 0.0) {
        return invalid("radius must be positive");
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|&v| normalize(v, 1.0))
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]], 1.0));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    for v in &mut verts {
        *v = [v[0] * radius, v[1] * radius, v[2] * radius];
    }
    Ok(TriMesh::new(verts, tris))
}

/// Periodic triangulation of the (a,b)-flat torus.
///
/// Vertex (i, j) sits at parameter (s, t) = (i/n_u, j/n_v) in the unit
/// square; the flat metric comes from mapping parameter differences through
/// (s, t) -> (s + a t, b t). The stored embedding is a ring torus used only
/// for display and rigid alignment when gluing.
pub fn torus_mesh(p: TorusParams, n_u: usize, n_v: usize) -> Result<TriMesh> {
    p.validate()?;
    if n_u < 8 || n_v < 8 {
        return invalid(format!("torus mesh needs at least 8 x 8 vertices, got {n_u} x {n_v}"));
    }
    let idx = |i: usize, j: usize| (j % n_v) * n_u + (i % n_u);
    let mut vertices = Vec::with_capacity(n_u * n_v);
    let mut uv = Vec::with_capacity(n_u * n_v);
    let (big, small) = (1.0, 0.4);
    for j in 0..n_v {
        for i in 0..n_u {
            let (s, t) = (i as f64 / n_u as f64, j as f64 / n_v as f64);
            uv.push([s, t]);
            let (th, ph) = (2.0 * PI * s, 2.0 * PI * t);
            let rr = big + small * ph.cos();
            vertices.push([rr * th.cos(), rr * th.sin(), small * ph.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n_u * n_v);
    for j in 0..n_v {
        for i in 0..n_u {
            let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut mesh = TriMesh { vertices, triangles, uv: Some(uv), edge_len2: None };
    mesh.edge_len2 = Some((0..mesh.triangles.len()).map(|t| flat_len2(&mesh, p, t)).collect());
    Ok(mesh)
}

/// Squared edge lengths of triangle `t` in the flat metric, wrapping
/// parameter differences into [-1/2, 1/2).
fn flat_len2(mesh: &TriMesh, p: TorusParams, t: usize) -> [f64; 3] {
    let uv = mesh.uv.as_ref().expect("torus mesh has uv");
    let tri = mesh.triangles[t];
    let edge = |x: usize, y: usize| {
        let wrap = |d: f64| d - (d + 0.5).floor();
        let ds = wrap(uv[y][0] - uv[x][0]);
        let dt = wrap(uv[y][1] - uv[x][1]);
        let (ex, ey) = (ds + p.a * dt, p.b * dt);
        ex * ex + ey * ey
    };
    [edge(tri[1], tri[2]), edge(tri[2], tri[0]), edge(tri[0], tri[1])]
}

/// Embedded torus of revolution with tube radius r and center radius R,
/// parameterized by angles (v around the axis, u around the tube).
pub fn embedded_torus_mesh(big_r: f64, r: f64, n_v: usize, n_u: usize) -> Result<TriMesh> {
    if !(r > 0.0) || big_r < r || n_u < 3 || n_v < 3 {
        return invalid("embedded torus needs R >= r > 0 and at least 3 x 3 vertices");
    }
    let idx = |i: usize, j: usize| (j % n_u) * n_v + (i % n_v);
    let mut vertices = Vec::with_capacity(n_u * n_v);
    for j in 0..n_u {
        for i in 0..n_v {
            let (v, u) = (2.0 * PI * i as f64 / n_v as f64, 2.0 * PI * j as f64 / n_u as f64);
            let c = big_r + r * u.cos();
            vertices.push([c * v.cos(), c * v.sin(), r * u.sin()]);
        }
    }
    let mut triangles = Vec::new();
    for j in 0..n_u {
        for i in 0..n_v {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            triangles.push([a, b, d]);
            triangles.push([a, d, c]);
        }
    }
    Ok(TriMesh::new(vertices, triangles))
}
