//! Command-line front end. Exit codes: 0 success, 1 numerical failure,
//! 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lbmax::io::commands::{self, ReferenceKind, SpectrumSource};
use lbmax::io::table::{parse_values_csv, sweep_csv};
use lbmax::io::{hammer_project, format_sig, RunConfig};
use lbmax::Error;

#[derive(Parser)]
#[command(name = "lbmax", version, about = "Laplace-Beltrami spectra and conformal eigenvalue maximization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a spectrum as CSV (k,lambda,Lambda,multiplicity_note)
    Spectrum {
        #[command(subcommand)]
        surface: SpectrumSurface,
    },
    /// Sample Lambda_k over a parameter range as long-format CSV
    Sweep {
        #[command(subcommand)]
        family: SweepFamily,
    },
    /// Run a conformal maximization described by a JSON config
    Optimize {
        /// path to the JSON run configuration
        config: PathBuf,
        /// override the output directory of the config
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a reference value as CSV (quantity,k,Lambda,parameters)
    Reference {
        #[arg(value_enum)]
        kind: RefKind,
        #[arg(long)]
        k: usize,
    },
    /// Hammer projection of a point, or of a sphere field to SVG
    Project {
        #[command(subcommand)]
        target: ProjectTarget,
    },
}

#[derive(Args)]
struct KArg {
    /// largest index k (rows 0..=k are printed)
    #[arg(long)]
    k: usize,
    /// write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SpectrumSurface {
    /// Closed-form flat torus spectrum
    FlatTorus {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[command(flatten)]
        k: KArg,
    },
    /// Flat torus with unit factor on a spectral grid
    Grid {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[command(flatten)]
        k: KArg,
    },
    /// Unit sphere, analytic or by finite elements on an icosphere
    Sphere {
        #[arg(long)]
        analytic: bool,
        #[arg(long, default_value_t = 3)]
        subdivisions: usize,
        #[command(flatten)]
        k: KArg,
    },
    /// Finite elements on an OFF mesh
    Mesh {
        path: PathBuf,
        #[command(flatten)]
        k: KArg,
    },
    /// Unit-area torus of revolution with R / r = aspect^2
    Embedded {
        #[arg(long)]
        aspect: f64,
        #[command(flatten)]
        k: KArg,
    },
    /// Chain of unit icospheres glued at faces
    Kissing {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        subdivisions: usize,
        #[command(flatten)]
        k: KArg,
    },
}

#[derive(Subcommand)]
enum SweepFamily {
    /// Lambda_k over the flat-torus moduli domain (columns a,b,k,Lambda)
    FlatTorus {
        /// comma-separated eigenvalue indices
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long, default_value_t = 101)]
        na: usize,
        #[arg(long, default_value_t = 101)]
        nb: usize,
        #[arg(long, default_value_t = 3.0)]
        b_max: f64,
        /// also exclude a^2 + b^2 < (ceil(k/2) - 1)^2
        #[arg(long)]
        restricted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// write one heatmap per k into this directory
        #[arg(long)]
        svg_dir: Option<PathBuf>,
    },
    /// Lambda_k of tori of revolution over the aspect parameter (a,k,Lambda)
    Embedded {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        a_min: f64,
        #[arg(long, default_value_t = 3.0)]
        a_max: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum RefKind {
    Sphere,
    KissingSpheres,
    TorusPlusSpheres,
    BestFlatTorus,
    BestEmbeddedTorus,
}

#[derive(Subcommand)]
enum ProjectTarget {
    /// Project one point given in radians
    Point {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Render per-vertex values of a unit icosphere as a Hammer map
    Sphere {
        /// file with one value per vertex (optional header line)
        values: PathBuf,
        #[arg(long)]
        subdivisions: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> lbmax::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn spectrum(surface: SpectrumSurface) -> lbmax::Result<()> {
    let (src, k) = match surface {
        SpectrumSurface::FlatTorus { a, b, k } => (SpectrumSource::FlatTorus { a, b }, k),
        SpectrumSurface::Grid { a, b, n, k } => (SpectrumSource::Grid { a, b, n }, k),
        SpectrumSurface::Sphere { analytic: true, k, .. } => (SpectrumSource::SphereAnalytic, k),
        SpectrumSurface::Sphere { subdivisions, k, .. } => (SpectrumSource::Sphere { subdivisions }, k),
        SpectrumSurface::Mesh { path, k } => (SpectrumSource::Mesh { path }, k),
        SpectrumSurface::Embedded { aspect, k } => (SpectrumSource::Embedded { aspect }, k),
        SpectrumSurface::Kissing { count, subdivisions, k } => (SpectrumSource::Kissing { count, subdivisions }, k),
    };
    emit(&commands::spectrum_command(&src, k.k)?, k.out.as_ref())
}

fn sweep(family: SweepFamily) -> lbmax::Result<()> {
    match family {
        SweepFamily::FlatTorus { k, na, nb, b_max, restricted, out, svg_dir } => {
            let maps = commands::flat_sweep(&k, na, nb, b_max, restricted)?;
            if let Some(dir) = svg_dir {
                std::fs::create_dir_all(&dir)?;
                for m in &maps {
                    std::fs::write(dir.join(format!("landscape_k{}.svg", m.k)), commands::landscape_svg(m)?)?;
                }
            }
            emit(&sweep_csv(&commands::landscape_rows(&maps))?, out.as_ref())
        }
        SweepFamily::Embedded { k, a_min, a_max, steps, out } => emit(&commands::embedded_sweep_command(&k, a_min, a_max, steps)?, out.as_ref()),
    }
}

fn optimize(config: PathBuf, out: Option<PathBuf>) -> lbmax::Result<()> {
    let mut cfg = RunConfig::read(&config)?;
    if out.is_some() {
        cfg.output_dir = out;
    }
    let outcome = commands::run_optimization(&cfg)?;
    if let Some(dir) = &cfg.output_dir {
        commands::write_run(&outcome, dir)?;
    }
    print!("{}", commands::summary_json(&outcome.summary));
    Ok(())
}

fn reference(kind: RefKind, k: usize) -> lbmax::Result<()> {
    let kind = match kind {
        RefKind::Sphere => ReferenceKind::Sphere,
        RefKind::KissingSpheres => ReferenceKind::KissingSpheres,
        RefKind::TorusPlusSpheres => ReferenceKind::TorusPlusSpheres,
        RefKind::BestFlatTorus => ReferenceKind::BestFlatTorus,
        RefKind::BestEmbeddedTorus => ReferenceKind::BestEmbeddedTorus,
    };
    emit(&commands::reference_command(kind, k)?, None)
}

fn project(target: ProjectTarget) -> lbmax::Result<()> {
    match target {
        ProjectTarget::Point { theta, phi } => {
            let (x, y) = hammer_project(theta, phi);
            emit(&format!("x,y\n{},{}\n", format_sig(x, 12), format_sig(y, 12)), None)
        }
        ProjectTarget::Sphere { values, subdivisions, out } => {
            let v = parse_values_csv(&std::fs::read_to_string(&values)?)?;
            std::fs::write(out, commands::project_sphere_field(subdivisions, &v, "conformal factor")?).map_err(Error::from)
        }
    }
}

/// Cap the worker pool from LBMAX_THREADS.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("LBMAX_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| format!("LBMAX_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let res = match cli.command {
        Command::Spectrum { surface } => spectrum(surface),
        Command::Sweep { family } => sweep(family),
        Command::Optimize { config, out } => optimize(config, out),
        Command::Reference { kind, k } => reference(kind, k),
        Command::Project { target } => project(target),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 1 } else { 2 })
        }
    }
}
