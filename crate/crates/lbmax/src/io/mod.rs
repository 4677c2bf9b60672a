//! Tables, pictures, run configuration and command drivers.

pub mod commands;
pub mod config;
pub mod svg;
pub mod table;

pub use config::{InitConfig, RunConfig, SolverChoice, SurfaceConfig};
pub use svg::{emit_svg_hammer, emit_svg_heatmap, hammer_project, Layout};
pub use table::{format_sig, parse_spectrum_csv, parse_sweep_csv, spectrum_csv, sweep_csv, SpectrumRow, SweepRow};
