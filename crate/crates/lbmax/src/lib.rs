//! Laplace-Beltrami spectra of surfaces and maximization of normalized
//! eigenvalues over conformal classes.
//!
//! Modules:
//! - [`lattice`]: closed-form flat-torus spectra, the best flat torus per
//!   index and sampled landscapes over the moduli domain.
//! - [`moduli`]: reflections, shifts and inversion of lattice parameters and
//!   reduction to the fundamental domain.
//! - [`spectral`]: Fourier discretization of conformal flat tori.
//! - [`fem`]: triangle meshes, icospheres, cotangent stiffness and lumped mass.
//! - [`eigen`]: dense and shift-invert Lanczos generalized eigensolvers.
//! - [`gradients`]: derivatives of simple eigenvalues with respect to the
//!   conformal factor and the lattice parameters.
//! - [`optim`]: bound-constrained quasi-Newton maximization and multistart.
//! - [`reference`]: analytic and semi-analytic comparison values.
//! - [`io`]: CSV, SVG and OFF formats, JSON run configs and CLI commands.
//!
//! Examples (`cargo run --release --example NAME`): `flat_torus_spectrum`,
//! `moduli_reduction`, `spectral_convergence`, `sphere_fem`,
//! `kissing_spheres`, `embedded_torus`, `gradient_check`, `svg_landscape`,
//! `conformal_sphere` and `genus_one`.

pub mod eigen;
pub mod error;
pub mod fem;
pub mod gradients;
pub mod io;
pub mod lattice;
pub mod moduli;
pub mod optim;
pub mod reference;
pub mod result;
pub mod spectral;

pub use error::{Error, Result};
pub use lattice::TorusParams;
pub use result::EigenResult;
