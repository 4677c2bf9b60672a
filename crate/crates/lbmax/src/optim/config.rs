use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Settings of one constrained eigenvalue maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimConfig {
    /// index of the eigenvalue to maximize
    pub k: usize,
    pub omega_lo: f64,
    pub omega_hi: f64,
    /// initial barrier weight
    pub barrier_mu: f64,
    /// factor applied to the barrier weight after each outer iteration
    pub barrier_decay: f64,
    pub wolfe_c1: f64,
    pub wolfe_c2: f64,
    pub grad_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub vary_moduli: bool,
    pub seed: u64,
    /// store omega every this many accepted steps (0: first and last only)
    pub snapshot_interval: usize,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            k: 1,
            omega_lo: 1e-3,
            omega_hi: 1e3,
            barrier_mu: 1e-3,
            barrier_decay: 0.1,
            wolfe_c1: 1e-4,
            wolfe_c2: 0.9,
            grad_tol: 1e-6,
            max_outer: 4,
            max_inner: 200,
            vary_moduli: false,
            seed: 0,
            snapshot_interval: 0,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return invalid("k must be at least 1");
        }
        if !(self.omega_lo > 0.0 && self.omega_lo < self.omega_hi && self.omega_hi.is_finite()) {
            return invalid(format!("need 0 < omega_lo < omega_hi, got [{}, {}]", self.omega_lo, self.omega_hi));
        }
        if !(0.0 < self.wolfe_c1 && self.wolfe_c1 < self.wolfe_c2 && self.wolfe_c2 < 1.0) {
            return invalid("need 0 < wolfe_c1 < wolfe_c2 < 1");
        }
        if !(self.barrier_mu >= 0.0) || !(self.barrier_decay > 0.0 && self.barrier_decay < 1.0) {
            return invalid("barrier_mu must be >= 0 and barrier_decay in (0, 1)");
        }
        if !(self.grad_tol >= 0.0) || self.max_outer == 0 {
            return invalid("grad_tol must be >= 0 and max_outer >= 1");
        }
        Ok(())
    }
}
