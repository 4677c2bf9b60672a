//! Constrained maximization of a normalized eigenvalue over conformal
//! factors and, on flat tori, over the lattice moduli.
//!
//! Variables are the nodal values of omega (plus a and b when the moduli
//! vary). The objective is Lambda_k plus a log-barrier for the box
//! [omega_lo, omega_hi], maximized by BFGS with a weak-Wolfe bracketing line
//! search. Steps are taken on the slice of fixed volume, which removes the
//! dilation null direction of Lambda_k.

mod barrier;
mod config;
pub mod init;
mod search;

use rayon::prelude::*;
use serde::Serialize;

pub use barrier::{barrier_gradient, barrier_objective, barrier_sum};
pub use config::OptimConfig;
pub use search::{weak_wolfe, LineSearchOutcome, Trial};

use crate::eigen::Method;
use crate::error::{invalid, Error, Result};
use crate::fem::{MeshConformalFactor, MeshProblem};
use crate::gradients::{grid_gradient, mesh_gradient};
use crate::lattice::TorusParams;
use crate::moduli;
use crate::result::EigenResult;
use crate::spectral::{transport, GridConformalFactor, GridProblem};

/// Smallest admissible b along a line search before canonicalization.
const B_FLOOR: f64 = 0.05;
/// Accepted steps over which the objective must grow to keep going.
const PROGRESS_WINDOW: usize = 20;
/// Relative growth of the objective over the window counted as progress.
const PROGRESS_TOL: f64 = 1e-8;
/// Distance within which an iterate counts as lying on an edge of the
/// fundamental domain.
const EDGE_TOL: f64 = 1e-6;
/// Largest first step relative to the mean of omega.
const FIRST_STEP: f64 = 0.25;
/// Largest first moduli step relative to b.
const FIRST_MODULI_STEP: f64 = 0.05;

/// Where the eigenvalue problem lives.
pub enum Surface<'a> {
    Mesh(&'a MeshProblem),
    Grid { n: usize, params: TorusParams, method: Method },
}

impl Surface<'_> {
    pub fn num_nodes(&self) -> usize {
        match self {
            Surface::Mesh(p) => p.lumped.len(),
            Surface::Grid { n, .. } => n * n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    GradientTolerance,
    IterationCap,
    LineSearchFailure,
    /// the objective stopped growing over a window of accepted steps
    NoProgress,
}

/// One accepted iterate (or the starting point, with iteration 0).
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub outer: usize,
    pub iteration: usize,
    pub lambda_k: f64,
    pub objective: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub iteration: usize,
    pub omega: Vec<f64>,
    pub params: Option<TorusParams>,
}

/// Lambda_k just before and after moving (a, b) back into the fundamental
/// domain.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalEvent {
    pub iteration: usize,
    pub before: f64,
    pub after: f64,
    pub from: TorusParams,
    pub to: TorusParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimRun {
    pub config: OptimConfig,
    pub history: Vec<TraceRow>,
    pub snapshots: Vec<Snapshot>,
    pub canonical_events: Vec<CanonicalEvent>,
    /// accepted iterates where lambda_k was not separated from a neighbour
    pub multiplicity_warnings: usize,
    pub final_omega: Vec<f64>,
    pub final_params: Option<TorusParams>,
    pub final_result: EigenResult,
    pub termination: Termination,
}

impl OptimRun {
    pub fn final_lambda(&self) -> f64 {
        self.final_result.normalized[self.config.k]
    }
}

/// One evaluated point.
#[derive(Clone)]
struct Point {
    x: Vec<f64>,
    lambda_k: f64,
    objective: f64,
    /// partials of the objective, omega block projected to zero sum
    grad: Vec<f64>,
    result: EigenResult,
    simple: bool,
}

/// Change of coordinates from a raw moduli iterate to its representative
/// in the fundamental domain.
struct Chart {
    /// canonical omega[i] = raw omega[src[i]]
    src: Vec<usize>,
    /// d(a', b') / d(a, b)
    jac: [[f64; 2]; 2],
    from: TorusParams,
    to: TorusParams,
}

impl Chart {
    /// Gradient in the raw coordinates from the gradient at the canonical
    /// point (chain rule through the permutation and the moduli map).
    fn pull(&self, g: &[f64]) -> Vec<f64> {
        let n = self.src.len();
        let mut out = vec![0.0; g.len()];
        for (i, &j) in self.src.iter().enumerate() {
            out[j] = g[i];
        }
        for c in 0..2 {
            out[n + c] = self.jac[0][c] * g[n] + self.jac[1][c] * g[n + 1];
        }
        out
    }
}

fn move_jacobian(p: TorusParams, m: moduli::Move) -> [[f64; 2]; 2] {
    match m {
        moduli::Move::Reflect => [[-1.0, 0.0], [0.0, 1.0]],
        moduli::Move::Shift(_) => [[1.0, 0.0], [0.0, 1.0]],
        moduli::Move::Invert => {
            let r2 = p.a * p.a + p.b * p.b;
            let r4 = r2 * r2;
            let (aa, ab) = ((p.a * p.a - p.b * p.b) / r4, 2.0 * p.a * p.b / r4);
            [[aa, ab], [-ab, aa]]
        }
    }
}

fn mat_mul(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut z = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    z
}

struct Evaluator<'a> {
    surface: &'a Surface<'a>,
    config: &'a OptimConfig,
    moduli: bool,
    nodes: usize,
    /// base measure per node normalized to total one
    measure: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(surface: &'a Surface<'a>, config: &'a OptimConfig, moduli: bool) -> Self {
        let nodes = surface.num_nodes();
        let measure = match surface {
            Surface::Mesh(p) => {
                let total: f64 = p.lumped.iter().sum();
                p.lumped.iter().map(|m| m / total).collect()
            }
            Surface::Grid { .. } => vec![1.0 / nodes as f64; nodes],
        };
        Evaluator { surface, config, moduli, nodes, measure }
    }

    fn params_of(&self, x: &[f64]) -> Option<TorusParams> {
        match self.surface {
            Surface::Grid { params, .. } if !self.moduli => Some(*params),
            Surface::Grid { .. } => Some(TorusParams { a: x[self.nodes], b: x[self.nodes + 1] }),
            Surface::Mesh(_) => None,
        }
    }

    fn feasible(&self, x: &[f64]) -> bool {
        let (lo, hi) = (self.config.omega_lo, self.config.omega_hi);
        if !x[..self.nodes].iter().all(|w| *w > lo && *w < hi) {
            return false;
        }
        !self.moduli || (x[self.nodes].is_finite() && x[self.nodes + 1] > B_FLOOR && x[self.nodes + 1].is_finite())
    }

    /// Ok(None) for a point outside the feasible set.
    fn eval(&self, x: &[f64], mu: f64) -> Result<Option<Point>> {
        if !self.feasible(x) {
            return Ok(None);
        }
        let k = self.config.k;
        let omega = &x[..self.nodes];
        let (result, grad) = match self.surface {
            Surface::Mesh(p) => {
                let res = p.solve(&MeshConformalFactor::new(omega.to_vec())?, k + 1)?;
                let g = mesh_gradient(p, &res, k)?;
                (res, g)
            }
            Surface::Grid { n, method, .. } => {
                let params = self.params_of(x).expect("grid has params");
                let problem = GridProblem::new(params, *n)?.with_method(*method);
                let res = problem.solve(&GridConformalFactor::new(*n, omega.to_vec())?, k + 1)?;
                let g = grid_gradient(&problem, &res, k, self.moduli)?;
                (res, g)
            }
        };
        let abs_measure: Vec<f64> = match self.surface {
            Surface::Mesh(p) => p.lumped.clone(),
            Surface::Grid { n, .. } => {
                let w = crate::spectral::PeriodicGrid::new(*n)?.node_weight(&self.params_of(x).unwrap());
                vec![w; self.nodes]
            }
        };
        let lambda_k = result.normalized[k];
        if !lambda_k.is_finite() {
            return Ok(None);
        }
        let (lo, hi) = (self.config.omega_lo, self.config.omega_hi);
        let objective = lambda_k + mu * barrier_sum(omega, &self.measure, lo, hi);
        let bg = barrier_gradient(omega, &self.measure, lo, hi);
        let mut g: Vec<f64> = (0..self.nodes).map(|i| grad.d_omega_normalized[i] * abs_measure[i] + mu * bg[i]).collect();
        project(&mut g, &self.measure);
        if self.moduli {
            g.push(grad.d_a_normalized.expect("moduli gradient"));
            g.push(grad.d_b_normalized.expect("moduli gradient"));
        }
        Ok(Some(Point { x: x.to_vec(), lambda_k, objective, grad: g, result, simple: grad.simple }))
    }

    /// The canonical representative of a moduli iterate, or None when the
    /// iterate already lies in the fundamental domain. Err for a point
    /// that cannot be reduced.
    fn chart(&self, x: &[f64]) -> Result<Option<(Vec<f64>, Chart)>> {
        let n_grid = match self.surface {
            Surface::Grid { n, .. } if self.moduli => *n,
            _ => return Ok(None),
        };
        let p = self.params_of(x).expect("grid has params");
        let (q, moves) = moduli::canonicalize_with_moves(p)?;
        if moves.is_empty() {
            return Ok(None);
        }
        let nodes = self.nodes;
        let mut omega = x[..nodes].to_vec();
        let mut idx: Vec<f64> = (0..nodes).map(|i| i as f64).collect();
        let mut jac = [[1.0, 0.0], [0.0, 1.0]];
        let mut cur = p;
        for &m in &moves {
            omega = transport(&omega, n_grid, m);
            idx = transport(&idx, n_grid, m);
            jac = mat_mul(move_jacobian(cur, m), jac);
            cur = moduli::apply(cur, m)?;
        }
        omega.extend([q.a, q.b]);
        let src = idx.iter().map(|&v| v as usize).collect();
        Ok(Some((omega, Chart { src, jac, from: p, to: q })))
    }

    /// Evaluate at the canonical representative of x. The returned point
    /// lives in the canonical chart; the gradient for the raw chart is
    /// `chart.pull(point.grad)`.
    fn eval_canonical(&self, x: &[f64], mu: f64) -> Result<Option<(Point, Option<Chart>)>> {
        if !self.feasible(x) {
            return Ok(None);
        }
        match self.chart(x) {
            Ok(Some((y, chart))) => Ok(self.eval(&y, mu)?.map(|p| (p, Some(chart)))),
            Ok(None) => Ok(self.eval(x, mu)?.map(|p| (p, None))),
            Err(e) if e.is_numerical() || matches!(e, Error::InvalidInput(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Diagonal of the initial inverse Hessian: the inverse of the base
    /// measure for omega and one for (a, b), over the current objective
    /// scale, so that both blocks see comparable curvature.
    fn h0(&self, lambda: f64) -> Vec<f64> {
        let scale = 1.0 / lambda.abs().max(1.0);
        let mut d: Vec<f64> = self.measure.iter().map(|m| scale / m).collect();
        if self.moduli {
            d.extend([scale, scale]);
        }
        d
    }
}

/// Remove the component along the measure: g - (sum g) m, with sum m = 1.
fn project(g: &mut [f64], m: &[f64]) {
    let s: f64 = g.iter().sum();
    for (gi, mi) in g.iter_mut().zip(m) {
        *gi -= s * mi;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense inverse-Hessian approximation.
struct InverseHessian {
    n: usize,
    data: Vec<f64>,
    fresh: bool,
}

impl InverseHessian {
    fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = d[i];
        }
        InverseHessian { n, data, fresh: true }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        self.data.par_chunks(n).map(|row| dot(row, v)).collect()
    }

    /// BFGS update for minimization with step s and gradient change y.
    /// Returns false when the curvature condition fails and the update is
    /// skipped.
    fn update(&mut self, s: &[f64], y: &[f64]) -> bool {
        let sy = dot(s, y);
        let ny = dot(y, y).sqrt();
        let ns = dot(s, s).sqrt();
        if !(sy > 1e-12 * ns * ny) {
            return false;
        }
        if self.fresh {
            // scale the initial matrix so its curvature matches the step
            let hy = self.apply(y);
            let gamma = sy / dot(y, &hy);
            self.data.iter_mut().for_each(|v| *v *= gamma);
            self.fresh = false;
        }
        let n = self.n;
        let rho = 1.0 / sy;
        let hy = self.apply(y);
        let c = rho * rho * dot(y, &hy) + rho;
        self.data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for j in 0..n {
                row[j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + c * s[i] * s[j];
            }
        });
        true
    }
}

impl InverseHessian {
    /// Express the matrix in the canonical chart: J H J^T.
    fn transport(&mut self, chart: &Chart) {
        let n = self.n;
        let nodes = chart.src.len();
        let h = &self.data;
        let mut rows = vec![0.0; n * n];
        for (i, &j) in chart.src.iter().enumerate() {
            rows[i * n..(i + 1) * n].copy_from_slice(&h[j * n..(j + 1) * n]);
        }
        for r in 0..2 {
            for q in 0..n {
                rows[(nodes + r) * n + q] = chart.jac[r][0] * h[nodes * n + q] + chart.jac[r][1] * h[(nodes + 1) * n + q];
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let row = &rows[i * n..(i + 1) * n];
            let o = &mut out[i * n..(i + 1) * n];
            for (j, &k) in chart.src.iter().enumerate() {
                o[j] = row[k];
            }
            for r in 0..2 {
                o[nodes + r] = chart.jac[r][0] * row[nodes] + chart.jac[r][1] * row[nodes + 1];
            }
        }
        self.data = out;
    }
}

/// Norm of the gradient in the metric of the initial inverse Hessian.
fn grad_norm(g: &[f64], h0: &[f64]) -> f64 {
    g.iter().zip(h0).map(|(gi, hi)| gi * gi * hi).sum::<f64>().sqrt()
}

/// An accepted trial: the canonical point, the chart change if any, the
/// gradient in the raw chart and the raw iterate.
type Accepted = (Point, Option<Chart>, Option<Vec<f64>>, Vec<f64>);

enum InnerEnd {
    Converged,
    NoProgress,
    Cap,
    Stalled { accepted: usize },
}

struct State<'a> {
    ev: Evaluator<'a>,
    point: Point,
    history: Vec<TraceRow>,
    snapshots: Vec<Snapshot>,
    events: Vec<CanonicalEvent>,
    warnings: usize,
    accepted_total: usize,
}

impl State<'_> {
    fn record(&mut self, outer: usize, step: f64, h0: &[f64]) {
        let p = self.ev.params_of(&self.point.x);
        self.history.push(TraceRow {
            outer,
            iteration: self.accepted_total,
            lambda_k: self.point.lambda_k,
            objective: self.point.objective,
            grad_norm: grad_norm(&self.point.grad, h0),
            step,
            a: if self.ev.moduli { p.map(|p| p.a) } else { None },
            b: if self.ev.moduli { p.map(|p| p.b) } else { None },
        });
        let every = self.ev.config.snapshot_interval;
        if self.accepted_total == 0 || (every > 0 && self.accepted_total % every == 0) {
            self.snapshot();
        }
    }

    fn snapshot(&mut self) {
        let n = self.ev.nodes;
        self.snapshots.push(Snapshot {
            iteration: self.accepted_total,
            omega: self.point.x[..n].to_vec(),
            params: self.ev.params_of(&self.point.x),
        });
    }

    /// Bring (a, b) back into the fundamental domain, carrying omega along.
    /// Returns true when the point moved.
    fn canonicalize(&mut self, mu: f64) -> Result<bool> {
        let (n_grid, p) = match self.ev.surface {
            Surface::Grid { n, .. } if self.ev.moduli => (*n, self.ev.params_of(&self.point.x).unwrap()),
            _ => return Ok(false),
        };
        let (q, moves) = moduli::canonicalize_with_moves(p)?;
        if moves.is_empty() {
            return Ok(false);
        }
        let nodes = self.ev.nodes;
        let mut omega = self.point.x[..nodes].to_vec();
        for m in &moves {
            omega = transport(&omega, n_grid, *m);
        }
        omega.extend([q.a, q.b]);
        let before = self.point.lambda_k;
        let fresh = self.ev.eval(&omega, mu)?.ok_or_else(|| Error::InvalidInput("canonical point left the feasible set".into()))?;
        self.events.push(CanonicalEvent { iteration: self.accepted_total, before, after: fresh.lambda_k, from: p, to: q });
        self.point = fresh;
        Ok(true)
    }

    /// Initial trial step, capped when the inverse Hessian carries no
    /// curvature information yet.
    fn first_trial(&self, d: &[f64], t0: f64, fresh: bool) -> f64 {
        let nodes = self.ev.nodes;
        let mut t0 = t0;
        if fresh {
            let mean = self.point.x[..nodes].iter().sum::<f64>() / nodes as f64;
            let dmax = d[..nodes].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if dmax > 0.0 {
                t0 = t0.min(FIRST_STEP * mean / dmax);
            }
            if self.ev.moduli {
                let b = self.point.x[nodes + 1];
                let dm = d[nodes].abs().max(d[nodes + 1].abs());
                if dm > 0.0 {
                    t0 = t0.min(FIRST_MODULI_STEP * b / dm);
                }
            }
        }
        t0
    }

    /// On an edge of the fundamental domain, drop the outward normal part of
    /// the moduli direction. Crossing an edge moves to the identified edge
    /// with omega transported, and the discrete spectra on the two sides
    /// differ by aliasing of unresolved features, so a step straight out
    /// of F from the edge typically fails every trial. Returns true when d
    /// changed.
    fn slide_along_edges(&self, d: &mut [f64]) -> bool {
        let nodes = self.ev.nodes;
        let (a, b) = (self.point.x[nodes], self.point.x[nodes + 1]);
        let mut changed = false;
        if (a >= 0.5 - EDGE_TOL && d[nodes] > 0.0) || (a <= -0.5 + EDGE_TOL && d[nodes] < 0.0) {
            d[nodes] = 0.0;
            changed = true;
        }
        let r2 = a * a + b * b;
        let radial = a * d[nodes] + b * d[nodes + 1];
        if r2 <= 1.0 + EDGE_TOL && radial < 0.0 {
            d[nodes] -= radial * a / r2;
            d[nodes + 1] -= radial * b / r2;
            changed = true;
            // at a corner the tangent of the arc leaves through the side
            if (a >= 0.5 - EDGE_TOL && d[nodes] > 0.0) || (a <= -0.5 + EDGE_TOL && d[nodes] < 0.0) {
                d[nodes] = 0.0;
                d[nodes + 1] = 0.0;
            }
        }
        changed
    }

    /// Weak Wolfe search along the ascent direction d.
    fn search(&self, d: &[f64], slope: f64, t0: f64, mu: f64) -> Result<LineSearchOutcome<Accepted>> {
        let cfg = self.ev.config;
        let x0 = &self.point.x;
        let ev = &self.ev;
        // minimize f = -objective
        weak_wolfe(-self.point.objective, -slope, t0, cfg.wolfe_c1, cfg.wolfe_c2, |t| {
            let x: Vec<f64> = x0.iter().zip(d).map(|(a, b)| a + t * b).collect();
            // trials are judged at their canonical representative
            match ev.eval_canonical(&x, mu) {
                Ok(Some((p, chart))) => {
                    let f = -p.objective;
                    let raw = chart.as_ref().map(|c| c.pull(&p.grad));
                    let df = -dot(raw.as_ref().unwrap_or(&p.grad), d);
                    Ok(Trial::Feasible { f, df, data: (p, chart, raw, x) })
                }
                Ok(None) => Ok(Trial::Infeasible),
                Err(e) if e.is_numerical() => Ok(Trial::Infeasible),
                Err(e) => Err(e),
            }
        })
    }

    fn inner(&mut self, outer: usize, mu: f64) -> Result<InnerEnd> {
        let cfg = self.ev.config;
        let h0 = self.ev.h0(self.point.lambda_k);
        let mut h = InverseHessian::diagonal(&h0);
        let nodes = self.ev.nodes;
        let mut failures = 0usize;
        let mut accepted = 0usize;
        let mut recent = vec![self.point.objective];
        for _ in 0..cfg.max_inner {
            if grad_norm(&self.point.grad, &h0) <= cfg.grad_tol {
                return Ok(InnerEnd::Converged);
            }
            // ascent direction for the objective
            let mut d = h.apply(&self.point.grad);
            let mut slope = dot(&self.point.grad, &d);
            if !(slope > 0.0) {
                h = InverseHessian::diagonal(&h0);
                d = h.apply(&self.point.grad);
                slope = dot(&self.point.grad, &d);
            }
            if self.ev.moduli && self.slide_along_edges(&mut d) {
                slope = dot(&self.point.grad, &d);
                if !(slope > 0.0) {
                    d = self.point.grad.iter().zip(&h0).map(|(g, h)| g * h).collect();
                    d[nodes..].fill(0.0);
                    slope = dot(&self.point.grad, &d);
                }
            }
            let t0 = self.first_trial(&d, if failures > 0 { 1e-2 } else { 1.0 }, h.fresh);
            let mut outcome = self.search(&d, slope, t0, mu)?;
            if matches!(outcome, LineSearchOutcome::Failed) && self.ev.moduli && (d[nodes] != 0.0 || d[nodes + 1] != 0.0) {
                // the identified edges of the fundamental domain can block
                // every step that moves the moduli; retry with them held
                let mut dw = d.clone();
                dw[nodes..].fill(0.0);
                let mut sw = dot(&self.point.grad, &dw);
                if !(sw > 0.0) {
                    dw = self.point.grad.iter().zip(&h0).map(|(g, h)| g * h).collect();
                    dw[nodes..].fill(0.0);
                    sw = dot(&self.point.grad, &dw);
                }
                if sw > 0.0 {
                    let t0 = self.first_trial(&dw, 1.0, true);
                    outcome = self.search(&dw, sw, t0, mu)?;
                    d = dw;
                }
            }
            let (t, next) = match outcome {
                LineSearchOutcome::Wolfe { t, data } | LineSearchOutcome::ArmijoOnly { t, data } => (t, data),
                LineSearchOutcome::Failed => {
                    if h.fresh {
                        return Ok(InnerEnd::Stalled { accepted });
                    }
                    failures += 1;
                    if failures >= 2 {
                        h = InverseHessian::diagonal(&h0);
                        failures = 0;
                    }
                    continue;
                }
            };
            failures = 0;
            let (next, chart, raw, x_raw) = next;
            let s: Vec<f64> = d.iter().map(|v| t * v).collect();
            let y: Vec<f64> = raw.as_ref().unwrap_or(&next.grad).iter().zip(&self.point.grad).map(|(a, b)| -(a - b)).collect();
            h.update(&s, &y);
            accepted += 1;
            self.accepted_total += 1;
            if let Some(chart) = chart {
                h.transport(&chart);
                let before = self.ev.eval(&x_raw, mu)?.map_or(f64::NAN, |p| p.lambda_k);
                self.events.push(CanonicalEvent { iteration: self.accepted_total, before, after: next.lambda_k, from: chart.from, to: chart.to });
            }
            self.point = next;
            if !self.point.simple {
                self.warnings += 1;
            }
            self.record(outer, t, &h0);
            recent.push(self.point.objective);
            if recent.len() > PROGRESS_WINDOW {
                let old = recent[recent.len() - 1 - PROGRESS_WINDOW];
                if self.point.objective - old <= PROGRESS_TOL * old.abs().max(1.0) {
                    return Ok(InnerEnd::NoProgress);
                }
            }
        }
        Ok(InnerEnd::Cap)
    }
}

fn run(surface: &Surface, x0: Vec<f64>, config: &OptimConfig, moduli: bool) -> Result<OptimRun> {
    config.validate()?;
    let ev = Evaluator::new(surface, config, moduli);
    let nodes = ev.nodes;
    if x0.len() != nodes + if moduli { 2 } else { 0 } {
        return invalid(format!("initial conformal factor has {} values, expected {}", x0.len() - if moduli { 2 } else { 0 }, nodes));
    }
    if !x0[..nodes].iter().all(|w| *w > config.omega_lo && *w < config.omega_hi) {
        return invalid("initial conformal factor must lie strictly inside [omega_lo, omega_hi]");
    }
    let mut mu = config.barrier_mu;
    let point = ev.eval(&x0, mu)?.ok_or_else(|| Error::InvalidInput("initial point is infeasible".into()))?;
    let mut st = State { ev, point, history: Vec::new(), snapshots: Vec::new(), events: Vec::new(), warnings: 0, accepted_total: 0 };
    if st.canonicalize(mu)? {
        st.events.clear();
    }
    let h0 = st.ev.h0(st.point.lambda_k);
    st.record(0, 0.0, &h0);
    let mut termination = Termination::IterationCap;
    for outer in 0..config.max_outer {
        if outer > 0 {
            mu *= config.barrier_decay;
            let x = st.point.x.clone();
            st.point = st.ev.eval(&x, mu)?.ok_or_else(|| Error::InvalidInput("iterate left the feasible set".into()))?;
        }
        match st.inner(outer, mu)? {
            InnerEnd::Converged => termination = Termination::GradientTolerance,
            InnerEnd::NoProgress => termination = Termination::NoProgress,
            InnerEnd::Cap => termination = Termination::IterationCap,
            InnerEnd::Stalled { accepted } => {
                termination = Termination::LineSearchFailure;
                if accepted == 0 {
                    break;
                }
            }
        }
    }
    if st.snapshots.last().map(|s| s.iteration) != Some(st.accepted_total) {
        st.snapshot();
    }
    let final_params = if moduli { st.ev.params_of(&st.point.x) } else { None };
    Ok(OptimRun {
        config: config.clone(),
        history: st.history,
        snapshots: st.snapshots,
        canonical_events: st.events,
        multiplicity_warnings: st.warnings,
        final_omega: st.point.x[..nodes].to_vec(),
        final_params,
        final_result: st.point.result,
        termination,
    })
}

/// Maximize Lambda_k over conformal factors on a fixed surface.
pub fn maximize_conformal(surface: &Surface, omega0: &[f64], config: &OptimConfig) -> Result<OptimRun> {
    if config.vary_moduli {
        return invalid("vary_moduli needs maximize_moduli");
    }
    run(surface, omega0.to_vec(), config, false)
}

/// Maximize Lambda_k jointly over the conformal factor on an n x n grid
/// and the flat-torus moduli (a, b).
pub fn maximize_moduli(n: usize, params0: TorusParams, omega0: &[f64], method: Method, config: &OptimConfig) -> Result<OptimRun> {
    moduli::require_in_domain(params0)?;
    let surface = Surface::Grid { n, params: params0, method };
    let mut x = omega0.to_vec();
    x.extend([params0.a, params0.b]);
    run(&surface, x, config, true)
}

/// Run several starts in parallel; returns every run and the index of the
/// best final Lambda_k among those that finished.
pub fn multistart<F>(starts: usize, f: F) -> (Vec<Result<OptimRun>>, Option<usize>)
where
    F: Fn(usize) -> Result<OptimRun> + Sync,
{
    let runs: Vec<Result<OptimRun>> = (0..starts).into_par_iter().map(&f).collect();
    let best = runs
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().ok().map(|r| (i, r.final_lambda())))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i);
    (runs, best)
}
