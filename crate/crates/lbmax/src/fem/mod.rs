//! Piecewise-linear finite elements on triangle meshes.

mod assemble;
mod generate;
mod glue;
mod mesh;
pub mod off;

pub use assemble::{assemble, hat_quadratic_forms, lumped_areas, solve_mesh, AssembledPair, MeshConformalFactor, MeshProblem};
pub use generate::{embedded_torus_mesh, icosphere, torus_mesh};
pub use glue::{align, extreme_face, glue, glue_tori_strip, kissing_spheres};
pub use mesh::{area_from_len2, TriMesh};

/// V - E + F of a closed mesh.
pub fn euler_characteristic(mesh: &TriMesh) -> crate::Result<i64> {
    mesh.euler_characteristic()
}

pub fn genus(mesh: &TriMesh) -> crate::Result<i64> {
    mesh.genus()
}
