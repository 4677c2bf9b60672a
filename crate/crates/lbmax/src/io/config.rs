//! JSON run configuration for the `optimize` command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eigen::Method;
use crate::error::{invalid, Error, Result};
use crate::optim::OptimConfig;

/// Eigensolver route, as spelled in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

impl From<SolverChoice> for Method {
    fn from(c: SolverChoice) -> Method {
        match c {
            SolverChoice::Auto => Method::Auto,
            SolverChoice::Dense => Method::Dense,
            SolverChoice::Lanczos => Method::Lanczos,
        }
    }
}

/// The surface whose conformal class is searched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    /// unit icosphere refined `subdivisions` times
    Sphere { subdivisions: usize },
    /// flat torus on an n x n spectral grid; the moduli move when
    /// `vary_moduli` is set in the optimizer settings
    FlatTorus {
        a: f64,
        b: f64,
        n: usize,
        #[serde(default)]
        solver: SolverChoice,
    },
    /// triangle mesh read from an OFF file
    Mesh { path: PathBuf },
    /// unit-area torus of revolution with R / r = aspect^2
    EmbeddedTorus { aspect: f64, n_u: usize, n_v: usize },
    /// `count` unit icospheres glued in a chain
    KissingSpheres { count: usize, subdivisions: usize },
}

/// Starting conformal factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitConfig {
    /// the random protocol suited to the surface and k
    #[default]
    Auto,
    Constant { value: f64 },
    LogUniform { lo: f64, hi: f64 },
    /// `count` Gaussian bumps at random centres on top of `base`
    Gaussians { count: usize, width: f64, amplitude: f64, base: f64 },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub optim: OptimConfig,
    #[serde(default)]
    pub init: InitConfig,
    /// independent starts; start i uses seed optim.seed + i
    #[serde(default = "one")]
    pub starts: usize,
    /// where summary, trace and snapshots go; none writes the summary only
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<RunConfig> {
        RunConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.optim.validate()?;
        if self.starts == 0 {
            return invalid("starts must be at least 1");
        }
        match &self.surface {
            SurfaceConfig::FlatTorus { a, b, n, .. } => {
                if !(a.is_finite() && *b > 0.0 && b.is_finite()) {
                    return invalid(format!("torus moduli must be finite with b > 0, got ({a}, {b})"));
                }
                if *n < 4 || n % 2 != 0 {
                    return invalid(format!("grid size must be even and at least 4, got {n}"));
                }
            }
            SurfaceConfig::EmbeddedTorus { aspect, n_u, n_v } => {
                if !(*aspect > 1.0) || *n_u < 3 || *n_v < 3 {
                    return invalid("embedded torus needs aspect > 1 and at least 3 samples per direction");
                }
            }
            SurfaceConfig::KissingSpheres { count, .. } if *count < 1 => return invalid("need at least one sphere"),
            SurfaceConfig::Sphere { .. } | SurfaceConfig::Mesh { .. } | SurfaceConfig::KissingSpheres { .. } => {}
        }
        if self.optim.vary_moduli && !matches!(self.surface, SurfaceConfig::FlatTorus { .. }) {
            return invalid("vary_moduli needs a flat_torus surface");
        }
        match &self.init {
            InitConfig::Constant { value } if !(*value > self.optim.omega_lo && *value < self.optim.omega_hi) => {
                invalid(format!("constant start {value} is outside the omega bounds"))
            }
            InitConfig::LogUniform { lo, hi } if !(*lo > self.optim.omega_lo && lo < hi && *hi < self.optim.omega_hi) => {
                invalid(format!("log-uniform range [{lo}, {hi}] must sit inside the omega bounds"))
            }
            InitConfig::Gaussians { count, width, base, amplitude } if *count == 0 || !(*width > 0.0) || !(*base > 0.0) || !(*amplitude >= 0.0) => {
                invalid("gaussian start needs count >= 1, width > 0, base > 0 and amplitude >= 0")
            }
            _ => Ok(()),
        }
    }
}
