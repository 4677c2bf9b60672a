use std::collections::HashMap;

use crate::error::{Error, Result};

/// Triangle mesh of a closed surface.
///
/// When `edge_len2` is present each triangle carries its own squared edge
/// lengths `[|v1 v2|^2, |v2 v0|^2, |v0 v1|^2]` (edge opposite each corner)
/// and the FEM uses them instead of the embedding. This is how flat tori,
/// which have no isometric embedding in 3-space, are represented.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub uv: Option<Vec<[f64; 2]>>,
    pub edge_len2: Option<Vec<[f64; 3]>>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = sub(a, b);
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Area from squared edge lengths (Heron).
pub fn area_from_len2(l: [f64; 3]) -> f64 {
    let s = 2.0 * (l[0] * l[1] + l[1] * l[2] + l[2] * l[0]) - (l[0] * l[0] + l[1] * l[1] + l[2] * l[2]);
    0.25 * s.max(0.0).sqrt()
}

impl TriMesh {
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Self {
        TriMesh { vertices, triangles, uv: None, edge_len2: None }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Squared edge lengths of triangle `t`, opposite corners 0, 1, 2.
    pub fn tri_len2(&self, t: usize) -> [f64; 3] {
        if let Some(l) = &self.edge_len2 {
            return l[t];
        }
        let [i, j, k] = self.triangles[t];
        let (p, q, r) = (self.vertices[i], self.vertices[j], self.vertices[k]);
        [dist2(q, r), dist2(r, p), dist2(p, q)]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        area_from_len2(self.tri_len2(t))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    /// Outward normal of triangle `t` from the embedding (not normalized).
    pub fn face_normal(&self, t: usize) -> [f64; 3] {
        let [i, j, k] = self.triangles[t];
        cross(sub(self.vertices[j], self.vertices[i]), sub(self.vertices[k], self.vertices[i]))
    }

    pub fn face_centroid(&self, t: usize) -> [f64; 3] {
        let [i, j, k] = self.triangles[t];
        let mut c = [0.0; 3];
        for v in [i, j, k] {
            for d in 0..3 {
                c[d] += self.vertices[v][d] / 3.0;
            }
        }
        c
    }

    /// Store intrinsic squared edge lengths for every triangle, taking them
    /// from the embedding where none are stored yet.
    pub fn make_intrinsic(&mut self) {
        if self.edge_len2.is_none() {
            let l = (0..self.num_triangles()).map(|t| self.tri_len2(t)).collect();
            self.edge_len2 = Some(l);
        }
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        let mut e: Vec<(usize, usize)> = Vec::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for c in 0..3 {
                let (i, j) = (t[c], t[(c + 1) % 3]);
                e.push((i.min(j), i.max(j)));
            }
        }
        e.sort_unstable();
        e.dedup();
        e.len()
    }

    /// Check indices, triangle areas and the closed oriented manifold property
    /// (every directed edge used once, its reverse used once).
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vertices();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::NonManifold(format!("triangle {t} has invalid vertex indices {tri:?}")));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::DegenerateTriangle(t));
            }
            for c in 0..3 {
                *directed.entry((tri[c], tri[(c + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(i, j), &cnt) in &directed {
            if cnt != 1 {
                return Err(Error::NonManifold(format!("directed edge ({i},{j}) used {cnt} times")));
            }
            if !directed.contains_key(&(j, i)) {
                return Err(Error::NonManifold(format!("edge ({i},{j}) is on a boundary or inconsistently oriented")));
            }
        }
        if let Some(l) = &self.edge_len2 {
            if l.len() != self.triangles.len() {
                return Err(Error::NonManifold("edge length table does not match triangles".into()));
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> Result<i64> {
        self.validate()?;
        Ok(self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64)
    }

    /// Genus of a closed connected orientable mesh.
    pub fn genus(&self) -> Result<i64> {
        let chi = self.euler_characteristic()?;
        if self.connected_components().len() != 1 {
            return Err(Error::NonManifold("genus requires a connected mesh".into()));
        }
        if (2 - chi) % 2 != 0 {
            return Err(Error::NonManifold(format!("odd Euler characteristic {chi}")));
        }
        Ok((2 - chi) / 2)
    }

    /// Vertex sets of the connected components, each sorted.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for t in &self.triangles {
            for c in 0..3 {
                let (a, b) = (find(&mut parent, t[c]), find(&mut parent, t[(c + 1) % 3]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|g| g[0]);
        out
    }

    /// Sorted neighbour lists from the triangle edges.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.num_vertices()];
        for t in &self.triangles {
            for c in 0..3 {
                let (a, b) = (t[c], t[(c + 1) % 3]);
                nb[a].push(b);
                nb[b].push(a);
            }
        }
        for l in &mut nb {
            l.sort_unstable();
            l.dedup();
        }
        nb
    }

    /// Peaks of a vertex field above `threshold`: maximal connected sets of
    /// equal values with every neighbour strictly lower. Each peak is
    /// reported by its lowest vertex index.
    pub fn local_maxima(&self, values: &[f64], threshold: f64) -> Vec<usize> {
        let nb = self.vertex_neighbors();
        let mut seen = vec![false; values.len()];
        let mut peaks = Vec::new();
        for v in 0..values.len() {
            if seen[v] || values[v] <= threshold {
                continue;
            }
            let mut stack = vec![v];
            seen[v] = true;
            let mut is_peak = true;
            while let Some(x) = stack.pop() {
                for &u in &nb[x] {
                    if values[u] > values[v] {
                        is_peak = false;
                    } else if values[u] == values[v] && !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            if is_peak {
                peaks.push(v);
            }
        }
        peaks
    }

    /// Both meshes side by side, without any identification.
    pub fn disjoint_union(&self, other: &TriMesh) -> TriMesh {
        let off = self.num_vertices();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        triangles.extend(other.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        let edge_len2 = if self.edge_len2.is_some() || other.edge_len2.is_some() {
            let mut l: Vec<[f64; 3]> = (0..self.num_triangles()).map(|t| self.tri_len2(t)).collect();
            l.extend((0..other.num_triangles()).map(|t| other.tri_len2(t)));
            Some(l)
        } else {
            None
        };
        TriMesh { vertices, triangles, uv: None, edge_len2 }
    }

    pub fn translated(&self, d: [f64; 3]) -> TriMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            for c in 0..3 {
                v[c] += d[c];
            }
        }
        m
    }
}
