use crate::error::Result;

/// Result of evaluating one trial step.
pub enum Trial<T> {
    Feasible { f: f64, df: f64, data: T },
    Infeasible,
}

pub enum LineSearchOutcome<T> {
    /// both the sufficient decrease and the curvature condition hold
    Wolfe { t: f64, data: T },
    /// bracketing ran out of trials; the best sufficient-decrease point
    ArmijoOnly { t: f64, data: T },
    Failed,
}

const MAX_TRIALS: usize = 40;

/// Bracketing weak-Wolfe search for minimization: double the step until the
/// sufficient decrease fails or the curvature holds, then bisect.
///
/// `slope` is the directional derivative at t = 0 and must be negative.
/// Infeasible trials count as a failed sufficient decrease.
pub fn weak_wolfe<T, F>(f0: f64, slope: f64, t0: f64, c1: f64, c2: f64, mut eval: F) -> Result<LineSearchOutcome<T>>
where
    F: FnMut(f64) -> Result<Trial<T>>,
{
    if !(slope < 0.0) || !(t0 > 0.0) {
        return Ok(LineSearchOutcome::Failed);
    }
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut best: Option<(f64, T)> = None;
    let mut t = t0;
    for _ in 0..MAX_TRIALS {
        match eval(t)? {
            Trial::Infeasible => hi = t,
            Trial::Feasible { f, df, data } => {
                if !(f <= f0 + c1 * t * slope) || !df.is_finite() {
                    hi = t;
                } else if df < c2 * slope {
                    lo = t;
                    best = Some((t, data));
                } else {
                    return Ok(LineSearchOutcome::Wolfe { t, data });
                }
            }
        }
        t = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo };
        if hi.is_finite() && hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(match best {
        Some((t, data)) => LineSearchOutcome::ArmijoOnly { t, data },
        None => LineSearchOutcome::Failed,
    })
}
