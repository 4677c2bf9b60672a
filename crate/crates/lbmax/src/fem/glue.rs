use super::mesh::{cross, dist2, TriMesh};
use crate::error::{invalid, Error, Result};

fn norm(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Rotation matrix taking unit vector `from` to unit vector `to`.
fn rotation_between(from: [f64; 3], to: [f64; 3]) -> [[f64; 3]; 3] {
    let c = dot(from, to);
    let mut axis = cross(from, to);
    let s = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if s < 1e-12 {
        if c > 0.0 {
            return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        }
        // half turn about any axis perpendicular to `from`
        let trial = if from[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let k = norm(cross(from, trial));
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = 2.0 * k[i] * k[j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        return r;
    }
    axis = [axis[0] / s, axis[1] / s, axis[2] / s];
    let (x, y, z) = (axis[0], axis[1], axis[2]);
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

fn apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [dot(r[0], v), dot(r[1], v), dot(r[2], v)]
}

/// Copy of `b` moved rigidly so that face `fb` sits on face `fa` of `a` with
/// opposite normal.
pub fn align(a: &TriMesh, fa: usize, b: &TriMesh, fb: usize) -> TriMesh {
    let na = norm(a.face_normal(fa));
    let nb = norm(b.face_normal(fb));
    let r = rotation_between(nb, [-na[0], -na[1], -na[2]]);
    let cb = b.face_centroid(fb);
    let ca = a.face_centroid(fa);
    let mut out = b.clone();
    for v in &mut out.vertices {
        let p = apply(&r, [v[0] - cb[0], v[1] - cb[1], v[2] - cb[2]]);
        *v = [p[0] + ca[0], p[1] + ca[1], p[2] + ca[2]];
    }
    out
}

/// Remove face `fa` from `a` and `fb` from `b`, then identify the three
/// boundary vertices pairwise to obtain one closed surface.
///
/// `b` is first aligned rigidly against `a`. The pairing is the
/// orientation-reversing cyclic match with the least total distance.
pub fn glue(a: &TriMesh, b: &TriMesh, fa: usize, fb: usize) -> Result<TriMesh> {
    if fa >= a.num_triangles() || fb >= b.num_triangles() {
        return invalid("glue face index out of range");
    }
    a.validate()?;
    b.validate()?;
    let b = align(a, fa, b, fb);
    let ta = a.triangles[fa];
    let tb = b.triangles[fb];
    // b_i pairs with a_{(c - i) mod 3}
    let cost = |c: usize| -> f64 { (0..3).map(|i| dist2(b.vertices[tb[i]], a.vertices[ta[(c + 3 - i) % 3]])).sum() };
    let c = (0..3).min_by(|&x, &y| cost(x).total_cmp(&cost(y))).unwrap();
    let mut pair = [(0usize, 0usize); 3];
    for i in 0..3 {
        pair[i] = (tb[i], ta[(c + 3 - i) % 3]);
    }
    let intrinsic_a = a.edge_len2.is_some();
    let intrinsic_b = b.edge_len2.is_some();
    let any_intrinsic = intrinsic_a || intrinsic_b;

    let mut vertices = a.vertices.clone();
    for &(vb, va) in &pair {
        vertices[va] = match (intrinsic_a, intrinsic_b) {
            (true, false) => b.vertices[vb],
            (false, true) => a.vertices[va],
            _ => {
                let (p, q) = (a.vertices[va], b.vertices[vb]);
                [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])]
            }
        };
    }
    let mut remap = vec![usize::MAX; b.num_vertices()];
    for &(vb, va) in &pair {
        remap[vb] = va;
    }
    for (v, r) in remap.iter_mut().enumerate() {
        if *r == usize::MAX {
            *r = vertices.len();
            vertices.push(b.vertices[v]);
        }
    }
    let mut triangles = Vec::with_capacity(a.num_triangles() + b.num_triangles() - 2);
    let mut len2 = Vec::new();
    for t in 0..a.num_triangles() {
        if t != fa {
            triangles.push(a.triangles[t]);
            if any_intrinsic {
                len2.push(a.tri_len2(t));
            }
        }
    }
    for t in 0..b.num_triangles() {
        if t != fb {
            let tr = b.triangles[t];
            triangles.push([remap[tr[0]], remap[tr[1]], remap[tr[2]]]);
            if any_intrinsic {
                len2.push(b.tri_len2(t));
            }
        }
    }
    let mesh = TriMesh { vertices, triangles, uv: None, edge_len2: if any_intrinsic { Some(len2) } else { None } };
    mesh.validate().map_err(|e| Error::NonManifold(format!("glued mesh is not a closed manifold: {e}")))?;
    Ok(mesh)
}

/// Face whose centroid maximizes the projection on `dir`.
pub fn extreme_face(m: &TriMesh, dir: [f64; 3]) -> usize {
    (0..m.num_triangles())
        .max_by(|&x, &y| dot(m.face_centroid(x), dir).total_cmp(&dot(m.face_centroid(y), dir)))
        .unwrap()
}

/// Chain of spheres touching along the x axis, glued face to face.
pub fn kissing_spheres(spheres: &[TriMesh]) -> Result<TriMesh> {
    if spheres.is_empty() {
        return invalid("need at least one sphere");
    }
    let mut chain = spheres[0].clone();
    let mut last_lo = 0;
    for s in &spheres[1..] {
        let fa = last_lo + extreme_face(&sub_mesh(&chain, last_lo), [1.0, 0.0, 0.0]);
        let fb = extreme_face(s, [-1.0, 0.0, 0.0]);
        let before = chain.num_triangles() - 1;
        chain = glue(&chain, s, fa, fb)?;
        last_lo = before;
    }
    Ok(chain)
}

// triangles from index `lo` on, vertices shared
fn sub_mesh(m: &TriMesh, lo: usize) -> TriMesh {
    TriMesh { vertices: m.vertices.clone(), triangles: m.triangles[lo..].to_vec(), uv: None, edge_len2: None }
}

/// Glue two tori of the same `n_u` along a band: the strip of triangles
/// between parameter rows 0 and 1 is removed from each torus and the
/// freed boundary circles are identified crosswise (row 0 of `a` with row 1
/// of `b`, row 1 of `a` with row 0 of `b`). The result has genus 1.
pub fn glue_tori_strip(a: &TriMesh, b: &TriMesh, n_u: usize) -> Result<TriMesh> {
    for m in [a, b] {
        if m.num_vertices() % n_u != 0 || m.num_triangles() != 2 * m.num_vertices() {
            return invalid("strip gluing expects structured torus meshes with matching n_u");
        }
    }
    let strip = 2 * n_u;
    let mut remap: Vec<usize> = Vec::with_capacity(b.num_vertices());
    let mut vertices = a.vertices.clone();
    for v in 0..b.num_vertices() {
        let (i, j) = (v % n_u, v / n_u);
        remap.push(match j {
            0 => n_u + i,
            1 => i,
            _ => {
                vertices.push(b.vertices[v]);
                vertices.len() - 1
            }
        });
    }
    let mut triangles = Vec::new();
    let mut len2 = Vec::new();
    for t in strip..a.num_triangles() {
        triangles.push(a.triangles[t]);
        len2.push(a.tri_len2(t));
    }
    for t in strip..b.num_triangles() {
        let tr = b.triangles[t];
        triangles.push([remap[tr[0]], remap[tr[1]], remap[tr[2]]]);
        len2.push(b.tri_len2(t));
    }
    let mesh = TriMesh { vertices, triangles, uv: None, edge_len2: Some(len2) };
    mesh.validate()?;
    Ok(mesh)
}
