//! Three interchangeable LP solution methods: revised simplex, affine
//! scaling, and an infeasible-start primal-dual method.
//!
//! All three consume a [`StandardLp`](crate::lp::StandardLp) and report a
//! [`SolveOutcome`]. On fully degenerate programs (`b = 0`) the optimal
//! value is either zero or unbounded below, so the interior-point methods
//! support an extra stopping rule: once an essentially feasible iterate has
//! a negative objective, the program is unbounded and the solve stops with
//! [`SolveStatus::EarlyNegative`].

mod affine;
mod primal_dual;
mod simplex;

pub use affine::affine_scaling;
pub use primal_dual::primal_dual;
pub use simplex::revised_simplex;

use nalgebra::{DMatrix, DVector};

/// Numeric controls shared by the solvers. The tolerances are absolute
/// unless a solver documents otherwise.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Iteration cap; `None` picks the method default (`50 * (m + n)` for
    /// the simplex, 500 for the interior-point methods).
    pub max_iters: Option<usize>,
    /// Feasibility tolerance on `max |Ax - b|`.
    pub feas_tol: f64,
    /// Optimality / pricing tolerance.
    pub opt_tol: f64,
    /// Duality-gap tolerance.
    pub gap_tol: f64,
    /// Enables the negative-objective stopping rule (valid only on fully
    /// degenerate programs).
    pub early_negative: bool,
    /// Objective threshold below which the rule fires.
    pub early_negative_threshold: f64,
    /// Fraction of the distance to the boundary taken per step.
    pub step_fraction: f64,
    /// Step-fraction cap applied by affine scaling on fully degenerate
    /// programs, where longer steps can cycle.
    pub degenerate_step_cap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: None,
            feas_tol: 1e-9,
            opt_tol: 1e-8,
            gap_tol: 1e-8,
            early_negative: false,
            early_negative_threshold: 1e-7,
            step_fraction: 0.995,
            degenerate_step_cap: 2.0 / 3.0,
        }
    }
}

impl SolverOptions {
    /// Returns an error when a tolerance or step fraction is out of range.
    pub fn validate(&self) -> crate::error::Result<()> {
        let positive = [
            ("feas_tol", self.feas_tol),
            ("opt_tol", self.opt_tol),
            ("gap_tol", self.gap_tol),
            ("early_negative_threshold", self.early_negative_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(crate::error::Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be strictly positive"),
                });
            }
        }
        for (name, v) in [("step_fraction", self.step_fraction), ("degenerate_step_cap", self.degenerate_step_cap)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(crate::error::Error::InvalidParameter {
                    name,
                    reason: format!("{v} not in (0, 1)"),
                });
            }
        }
        Ok(())
    }
}

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Converged to an optimal solution within tolerance.
    Optimal,
    /// The objective is unbounded below.
    Unbounded,
    /// Negative objective reached on a fully degenerate program: unbounded
    /// by the zero-or-unbounded dichotomy, detected early.
    EarlyNegative,
    /// No feasible solution (detected by dual divergence).
    Infeasible,
    /// Stopped at the iteration cap without a verdict.
    IterLimit,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::EarlyNegative => "early-negative",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::IterLimit => "iter-limit",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one solve: status, iterates, and the residuals backing the
/// status claim.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    /// Primal iterate. For an unbounded simplex run this is a point far
    /// along the improving ray rather than the (degenerate) final vertex.
    pub x: Option<DVector<f64>>,
    /// Dual iterate or dual estimate (row multipliers).
    pub y: Option<DVector<f64>>,
    /// Dual slacks / reduced costs.
    pub t: Option<DVector<f64>>,
    pub iterations: usize,
    pub primal_residual_inf: f64,
    pub dual_residual_inf: f64,
    pub duality_gap: f64,
    pub wall_time_ns: u64,
}

/// Per-iteration trace sink. Lines are CSV:
/// `iteration,objective,primal_residual,dual_residual,gap`.
pub type Trace<'a> = &'a mut dyn std::io::Write;

pub(crate) fn trace_row(
    trace: &mut Option<Trace<'_>>,
    iteration: usize,
    objective: f64,
    primal_residual: f64,
    dual_residual: f64,
    gap: f64,
) {
    if let Some(sink) = trace.as_mut() {
        let _ = writeln!(sink, "{iteration},{objective:e},{primal_residual:e},{dual_residual:e},{gap:e}");
    }
}

/// Solves the normal-equations system `M z = rhs` for symmetric positive
/// semidefinite `M`, trying Cholesky first and falling back to LU with a
/// small diagonal shift when the factorization breaks down near the optimal
/// face.
pub(crate) fn spd_solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if m.nrows() == 0 {
        return Some(DVector::zeros(0));
    }
    if let Some(chol) = m.clone().cholesky() {
        return Some(chol.solve(rhs));
    }
    let scale = m.diagonal().amax().max(1.0);
    for boost in [1e-12, 1e-10, 1e-8] {
        let mut shifted = m.clone();
        for i in 0..m.nrows() {
            shifted[(i, i)] += boost * scale;
        }
        if let Some(chol) = shifted.clone().cholesky() {
            return Some(chol.solve(rhs));
        }
        if let Some(sol) = shifted.lu().solve(rhs) {
            return Some(sol);
        }
    }
    m.clone().lu().solve(rhs)
}

/// Largest step `alpha` keeping `v + alpha * dv >= 0`, or infinity when the
/// direction never hits the boundary.
pub(crate) fn max_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        if dv[i] < 0.0 {
            best = best.min(v[i] / -dv[i]);
        }
    }
    best
}
