//! ASCII OFF mesh files.

use std::fmt::Write as _;
use std::path::Path;

use super::mesh::TriMesh;
use crate::error::{Error, Result};

/// Serialize with 17 significant digits so that reading back is exact.
pub fn to_off_string(mesh: &TriMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF");
    let _ = writeln!(s, "{} {} 0", mesh.num_vertices(), mesh.num_triangles());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

pub fn parse_off(text: &str) -> Result<TriMesh> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace());
    let bad = |m: &str| Error::Parse(format!("OFF: {m}"));
    match tokens.next() {
        Some("OFF") => {}
        _ => return Err(bad("missing OFF header")),
    }
    let mut next_num = |what: &str| -> Result<String> { tokens.next().map(str::to_string).ok_or_else(|| bad(&format!("unexpected end of file reading {what}"))) };
    let nv: usize = next_num("vertex count")?.parse().map_err(|_| bad("bad vertex count"))?;
    let nf: usize = next_num("face count")?.parse().map_err(|_| bad("bad face count"))?;
    let _ne = next_num("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut v = [0.0; 3];
        for c in &mut v {
            *c = next_num("vertex")?.parse().map_err(|_| bad("bad vertex coordinate"))?;
        }
        vertices.push(v);
    }
    let mut triangles = Vec::with_capacity(nf);
    for f in 0..nf {
        let k: usize = next_num("face")?.parse().map_err(|_| bad("bad face size"))?;
        if k != 3 {
            return Err(bad(&format!("face {f} has {k} vertices; only triangles are supported")));
        }
        let mut t = [0usize; 3];
        for c in &mut t {
            *c = next_num("face index")?.parse().map_err(|_| bad("bad face index"))?;
            if *c >= nv {
                return Err(bad(&format!("face {f} index out of range")));
            }
        }
        triangles.push(t);
    }
    Ok(TriMesh::new(vertices, triangles))
}

pub fn read_off(path: &Path) -> Result<TriMesh> {
    parse_off(&std::fs::read_to_string(path)?)
}

pub fn write_off(path: &Path, mesh: &TriMesh) -> Result<()> {
    std::fs::write(path, to_off_string(mesh))?;
    Ok(())
}
