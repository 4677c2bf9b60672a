//! Drivers behind the command-line subcommands. Each returns text or
//! writes files so the binary only parses arguments and maps errors to
//! exit codes.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fem::{self, embedded_torus_mesh, icosphere, kissing_spheres, MeshConformalFactor, MeshProblem, TriMesh};
use crate::io::config::{InitConfig, RunConfig, SurfaceConfig};
use crate::io::svg::{emit_svg_hammer, emit_svg_heatmap, Layout};
use crate::io::table::{format_sig, spectrum_csv, sweep_csv, trace_csv, values_csv, SpectrumRow, SweepRow, DIGITS};
use crate::lattice::{self, best_flat_torus_closed_form, flat_torus_spectrum, Landscape, TorusParams};
use crate::optim::{init, maximize_conformal, maximize_moduli, multistart, OptimRun, Surface, Termination};
use crate::reference;
use crate::spectral::{GridConformalFactor, GridProblem};

/// What `spectrum` computes.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    /// closed form from the dual lattice
    FlatTorus { a: f64, b: f64 },
    /// spectral collocation with unit factor on an n x n grid
    Grid { a: f64, b: f64, n: usize },
    /// analytic unit sphere
    SphereAnalytic,
    /// finite elements on an icosphere
    Sphere { subdivisions: usize },
    Mesh { path: std::path::PathBuf },
    /// torus of revolution with R / r = aspect^2, area one
    Embedded { aspect: f64 },
    /// `count` unit icospheres glued in a chain
    Kissing { count: usize, subdivisions: usize },
}

fn rows_from_normalized(values: &[f64], volume: f64, notes: impl Fn(usize) -> String) -> Vec<SpectrumRow> {
    values
        .iter()
        .enumerate()
        .map(|(k, v)| SpectrumRow { k, lambda: v / volume, normalized: *v, multiplicity_note: notes(k) })
        .collect()
}

fn mesh_rows(mesh: TriMesh, k_max: usize) -> Result<Vec<SpectrumRow>> {
    let problem = MeshProblem::new(mesh)?;
    let omega = MeshConformalFactor::constant(problem.lumped.len(), 1.0);
    let r = problem.solve(&omega, k_max)?;
    Ok(rows_from_normalized(&r.normalized, r.volume, |_| String::new()))
}

/// Kissing chain of `count` unit icospheres.
pub fn kissing_mesh(count: usize, subdivisions: usize) -> Result<TriMesh> {
    let spheres = (0..count).map(|_| icosphere(subdivisions, 1.0)).collect::<Result<Vec<_>>>()?;
    kissing_spheres(&spheres)
}

/// Rows k = 0..=k_max of the requested spectrum.
pub fn spectrum_rows(src: &SpectrumSource, k_max: usize) -> Result<Vec<SpectrumRow>> {
    match src {
        SpectrumSource::FlatTorus { a, b } => {
            let p = TorusParams::new(*a, *b)?;
            Ok(flat_torus_spectrum(p, k_max)?
                .into_iter()
                .enumerate()
                .map(|(k, e)| SpectrumRow { k, lambda: e.lambda, normalized: e.lambda * p.b, multiplicity_note: e.multiplicity_note() })
                .collect())
        }
        SpectrumSource::Grid { a, b, n } => {
            let problem = GridProblem::new(TorusParams::new(*a, *b)?, *n)?;
            let r = problem.solve(&GridConformalFactor::constant(*n, 1.0), k_max)?;
            Ok(rows_from_normalized(&r.normalized, r.volume, |_| String::new()))
        }
        SpectrumSource::SphereAnalytic => {
            let s = reference::sphere_spectrum(k_max);
            let degree = |k: usize| (k as f64).sqrt().floor() as usize;
            Ok(rows_from_normalized(&s.normalized, 4.0 * PI, |k| format!("degree {}", degree(k))))
        }
        SpectrumSource::Sphere { subdivisions } => mesh_rows(icosphere(*subdivisions, 1.0)?, k_max),
        SpectrumSource::Mesh { path } => mesh_rows(fem::off::read_off(path)?, k_max),
        SpectrumSource::Embedded { aspect } => {
            let s = reference::embedded_torus_spectrum(*aspect, k_max)?;
            Ok(rows_from_normalized(&s.normalized, 1.0, |_| String::new()))
        }
        SpectrumSource::Kissing { count, subdivisions } => mesh_rows(kissing_mesh(*count, *subdivisions)?, k_max),
    }
}

pub fn spectrum_command(src: &SpectrumSource, k_max: usize) -> Result<String> {
    spectrum_csv(&spectrum_rows(src, k_max)?)
}

/// Lambda_k over the fundamental domain for each k, on an na x nb grid.
/// With `restricted`, samples with a^2 + b^2 < (ceil(k/2) - 1)^2 are
/// masked as well.
pub fn flat_sweep(ks: &[usize], na: usize, nb: usize, b_max: f64, restricted: bool) -> Result<Vec<Landscape>> {
    ks.iter()
        .map(|&k| {
            let r = if restricted { (k.div_ceil(2) as f64 - 1.0).max(0.0) } else { 0.0 };
            lattice::landscape(k, na, nb, b_max, r)
        })
        .collect()
}

/// Long-format rows of admissible samples.
pub fn landscape_rows(maps: &[Landscape]) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for m in maps {
        let na = m.a.len();
        for (i, v) in m.values.iter().enumerate() {
            if m.inside[i] {
                rows.push(SweepRow { a: m.a[i % na], b: Some(m.b[i / na]), k: m.k, normalized: *v });
            }
        }
    }
    rows
}

pub fn landscape_svg(m: &Landscape) -> Result<String> {
    let layout = Layout { cell: (600.0 / m.a.len().max(m.b.len()) as f64).clamp(2.0, 24.0), title: format!("Lambda_{} over the moduli domain", m.k) };
    let filled: Vec<f64> = m.values.iter().zip(&m.inside).map(|(v, ok)| if *ok { *v } else { 0.0 }).collect();
    emit_svg_heatmap(&filled, m.b.len(), m.a.len(), Some(&m.inside), &layout)
}

/// Lambda_k of tori of revolution for `steps` aspect values from a_min to
/// a_max inclusive.
pub fn embedded_sweep(ks: &[usize], a_min: f64, a_max: f64, steps: usize) -> Result<Vec<SweepRow>> {
    if steps < 1 || !(a_min >= 1.0) || !(a_max >= a_min) {
        return invalid("need steps >= 1 and 1 <= a_min <= a_max");
    }
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let a: Vec<f64> = (0..steps).map(|i| if steps == 1 { a_min } else { a_min + (a_max - a_min) * i as f64 / (steps - 1) as f64 }).collect();
    let spectra: Vec<Vec<f64>> = a.par_iter().map(|&x| reference::embedded_torus_spectrum(x, k_max).map(|s| s.normalized)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &k in ks {
        for (x, s) in a.iter().zip(&spectra) {
            rows.push(SweepRow { a: *x, b: None, k, normalized: s[k] });
        }
    }
    Ok(rows)
}

pub fn embedded_sweep_command(ks: &[usize], a_min: f64, a_max: f64, steps: usize) -> Result<String> {
    sweep_csv(&embedded_sweep(ks, a_min, a_max, steps)?)
}

/// Which comparison value `reference` prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// round sphere spectrum up to k
    Sphere,
    /// k equal spheres touching at points
    KissingSpheres,
    /// equilateral flat torus with k - 1 spheres attached
    TorusPlusSpheres,
    /// closed-form flat-torus local maximum
    BestFlatTorus,
    /// best torus of revolution
    BestEmbeddedTorus,
}

/// CSV with header "quantity,k,Lambda,parameters".
pub fn reference_command(kind: ReferenceKind, k: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row = |q: &str, k: usize, v: f64, params: String| w.write_record([q.to_string(), k.to_string(), format_sig(v, DIGITS), params]);
    let res = match kind {
        ReferenceKind::Sphere => {
            let s = reference::sphere_spectrum(k);
            s.normalized.iter().enumerate().try_for_each(|(i, v)| row("sphere", i, *v, String::new()))
        }
        ReferenceKind::KissingSpheres => row("kissing_spheres", k, reference::kissing_spheres(k)?, format!("{k} spheres")),
        ReferenceKind::TorusPlusSpheres => row("torus_plus_spheres", k, reference::equilateral_plus_spheres(k)?, format!("{} spheres", k.saturating_sub(1))),
        ReferenceKind::BestFlatTorus => {
            let (v, p) = best_flat_torus_closed_form(k)?;
            row("best_flat_torus", k, v, format!("a={} b={}", format_sig(p.a, DIGITS), format_sig(p.b, DIGITS)))
        }
        ReferenceKind::BestEmbeddedTorus => {
            let (v, a) = reference::best_embedded_torus(k)?;
            row("best_embedded_torus", k, v, format!("a={}", format_sig(a, DIGITS)))
        }
    };
    res.map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::from("quantity,k,Lambda,parameters\n");
    out.push_str(&String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?).map_err(|e| Error::Parse(e.to_string()))?);
    Ok(out)
}

/// Hammer image of a field on the unit icosphere with `subdivisions`.
pub fn project_sphere_field(subdivisions: usize, values: &[f64], title: &str) -> Result<String> {
    let mesh = icosphere(subdivisions, 1.0)?;
    if values.len() != mesh.num_vertices() {
        return invalid(format!("{} values for a mesh with {} vertices", values.len(), mesh.num_vertices()));
    }
    emit_svg_hammer(&mesh.vertices, values, &Layout { cell: 480.0, title: title.to_string() })
}

/// The discretized surface an optimization runs on.
enum Built {
    Mesh { problem: MeshProblem, sphere: bool },
    Grid { params: TorusParams, n: usize, method: crate::eigen::Method },
}

fn build(surface: &SurfaceConfig) -> Result<Built> {
    Ok(match surface {
        SurfaceConfig::Sphere { subdivisions } => Built::Mesh { problem: MeshProblem::new(icosphere(*subdivisions, 1.0)?)?, sphere: true },
        SurfaceConfig::FlatTorus { a, b, n, solver } => Built::Grid { params: TorusParams::new(*a, *b)?, n: *n, method: (*solver).into() },
        SurfaceConfig::Mesh { path } => Built::Mesh { problem: MeshProblem::new(fem::off::read_off(path)?)?, sphere: false },
        SurfaceConfig::EmbeddedTorus { aspect, n_u, n_v } => {
            let (r, big_r) = reference::torus_radii(*aspect);
            Built::Mesh { problem: MeshProblem::new(embedded_torus_mesh(big_r, r, *n_v, *n_u)?)?, sphere: false }
        }
        SurfaceConfig::KissingSpheres { count, subdivisions } => Built::Mesh { problem: MeshProblem::new(kissing_mesh(*count, *subdivisions)?)?, sphere: false },
    })
}

fn initial_factor(cfg: &RunConfig, built: &Built, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let k = cfg.optim.k;
    match (&cfg.init, built) {
        (InitConfig::Constant { value }, b) => vec![*value; nodes(b)],
        (InitConfig::LogUniform { lo, hi }, b) => init::log_uniform(nodes(b), *lo, *hi, rng),
        (InitConfig::Auto, Built::Mesh { problem, sphere: true }) => init::random_sphere_start(&problem.mesh.vertices, k, rng),
        (InitConfig::Auto, Built::Mesh { problem, .. }) => init::log_uniform(problem.lumped.len(), 0.5, 2.0, rng),
        (InitConfig::Auto, Built::Grid { params, n, .. }) => init::random_torus_factor(*n, k, *params, cfg.optim.omega_hi, rng),
        (InitConfig::Gaussians { count, width, amplitude, base }, Built::Mesh { problem, .. }) => {
            let v = &problem.mesh.vertices;
            let centers: Vec<[f64; 3]> = (0..*count).map(|_| v[rng.gen_range(0..v.len())]).collect();
            init::gaussian_sum(v, &centers, *width, *base, *amplitude)
        }
        (InitConfig::Gaussians { count, width, amplitude, base }, Built::Grid { n, .. }) => {
            let centers: Vec<[f64; 2]> = (0..*count).map(|_| [rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)]).collect();
            init::periodic_gaussian_sum(*n, &centers, *width, *base, *amplitude)
        }
    }
}

fn nodes(b: &Built) -> usize {
    match b {
        Built::Mesh { problem, .. } => problem.lumped.len(),
        Built::Grid { n, .. } => n * n,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StartSummary {
    pub start: usize,
    pub lambda_k: Option<f64>,
    pub termination: Option<Termination>,
    pub steps: Option<usize>,
    pub error: Option<String>,
}

/// What `optimize` reports; free of timings so reruns are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub k: usize,
    pub best_start: usize,
    pub final_lambda_k: f64,
    pub final_params: Option<TorusParams>,
    pub termination: Termination,
    pub steps: usize,
    pub canonical_events: usize,
    pub multiplicity_warnings: usize,
    pub starts: Vec<StartSummary>,
}

pub struct RunOutcome {
    pub summary: RunSummary,
    pub best: OptimRun,
    /// vertex positions when the surface is the unit sphere
    pub sphere_points: Option<Vec<[f64; 3]>>,
    pub grid_n: Option<usize>,
}

/// Run every start of `cfg` and keep the largest final Lambda_k.
pub fn run_optimization(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let built = build(&cfg.surface)?;
    let (runs, best) = multistart(cfg.starts, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.optim.seed.wrapping_add(i as u64));
        let omega0 = initial_factor(cfg, &built, &mut rng);
        match &built {
            Built::Mesh { problem, .. } => maximize_conformal(&Surface::Mesh(problem), &omega0, &cfg.optim),
            Built::Grid { params, n, method } => {
                if cfg.optim.vary_moduli {
                    maximize_moduli(*n, *params, &omega0, *method, &cfg.optim)
                } else {
                    maximize_conformal(&Surface::Grid { n: *n, params: *params, method: *method }, &omega0, &cfg.optim)
                }
            }
        }
    });
    let starts: Vec<StartSummary> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| match r {
            Ok(r) => StartSummary { start: i, lambda_k: Some(r.final_lambda()), termination: Some(r.termination), steps: Some(r.history.len() - 1), error: None },
            Err(e) => StartSummary { start: i, lambda_k: None, termination: None, steps: None, error: Some(e.to_string()) },
        })
        .collect();
    let Some(b) = best else {
        // every start failed: report the first error
        return Err(runs.into_iter().find_map(|r| r.err()).expect("at least one start"));
    };
    let run = runs.into_iter().nth(b).expect("best index").expect("best run succeeded");
    let summary = RunSummary {
        experiment: cfg.experiment.clone(),
        k: cfg.optim.k,
        best_start: b,
        final_lambda_k: run.final_lambda(),
        final_params: run.final_params,
        termination: run.termination,
        steps: run.history.len() - 1,
        canonical_events: run.canonical_events.len(),
        multiplicity_warnings: run.multiplicity_warnings,
        starts,
    };
    let (sphere_points, grid_n) = match built {
        Built::Mesh { problem, sphere: true } => (Some(problem.mesh.vertices), None),
        Built::Mesh { .. } => (None, None),
        Built::Grid { n, .. } => (None, Some(n)),
    };
    Ok(RunOutcome { summary, best: run, sphere_points, grid_n })
}

/// SVG of one conformal factor, when the surface has a flat layout.
pub fn factor_svg(outcome: &RunOutcome, omega: &[f64], title: &str) -> Result<Option<String>> {
    if let Some(p) = &outcome.sphere_points {
        return emit_svg_hammer(p, omega, &Layout { cell: 480.0, title: title.to_string() }).map(Some);
    }
    if let Some(n) = outcome.grid_n {
        return emit_svg_heatmap(omega, n, n, None, &Layout { cell: (480.0 / n as f64).clamp(2.0, 16.0), title: title.to_string() }).map(Some);
    }
    Ok(None)
}

/// summary.json, trace.csv, omega.csv and snapshots/*.svg under `dir`.
pub fn write_run(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("summary.json"), summary_json(&outcome.summary))?;
    std::fs::write(dir.join("trace.csv"), trace_csv(&outcome.best.history)?)?;
    std::fs::write(dir.join("omega.csv"), values_csv("omega", &outcome.best.final_omega)?)?;
    if let Some(svg) = factor_svg(outcome, &outcome.best.final_omega, "final conformal factor")? {
        std::fs::write(dir.join("omega.svg"), svg)?;
        let snaps = dir.join("snapshots");
        std::fs::create_dir_all(&snaps)?;
        for s in &outcome.best.snapshots {
            if let Some(svg) = factor_svg(outcome, &s.omega, &format!("iteration {}", s.iteration))? {
                std::fs::write(snaps.join(format!("snapshot_{:05}.svg", s.iteration)), svg)?;
            }
        }
    }
    Ok(())
}

pub fn summary_json(s: &RunSummary) -> String {
    let mut t = serde_json::to_string_pretty(s).expect("summary serializes");
    t.push('\n');
    t
}
