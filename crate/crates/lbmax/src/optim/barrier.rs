use super::config::OptimConfig;

/// Lambda_k + mu sum_i m_i [log(omega_i - lo) + log(hi - omega_i)].
///
/// Returns -infinity when some omega_i is on or outside the box.
pub fn barrier_objective(lambda_k: f64, omega: &[f64], measure: &[f64], config: &OptimConfig, mu: f64) -> f64 {
    lambda_k + mu * barrier_sum(omega, measure, config.omega_lo, config.omega_hi)
}

pub fn barrier_sum(omega: &[f64], measure: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = 0.0;
    for (w, m) in omega.iter().zip(measure) {
        if !(*w > lo && *w < hi) {
            return f64::NEG_INFINITY;
        }
        s += m * ((w - lo).ln() + (hi - w).ln());
    }
    s
}

/// Partial derivatives of the barrier term (without mu).
pub fn barrier_gradient(omega: &[f64], measure: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    omega.iter().zip(measure).map(|(w, m)| m * (1.0 / (w - lo) - 1.0 / (hi - w))).collect()
}
