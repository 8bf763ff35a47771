//! Primal affine scaling. Each iterate rescales the problem so the current
//! point sits at all-ones, projects the objective onto the constraint null
//! space, and steps a fixed fraction of the distance to the boundary. On
//! fully degenerate programs the fraction is capped (default 2/3), which is
//! the known safe long-step regime under degeneracy.
//!
//! Near an optimal face the scaling matrix spans many orders of magnitude
//! and the normal-equations solve alone no longer keeps steps inside the
//! null space of `A`. Directions are therefore re-projected through a
//! factorization of `A A'` (well conditioned, computed once), and any
//! residual drift is repaired with a minimum-norm correction before it can
//! accumulate, so iterates stay feasible to within the tolerance for the
//! whole run.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::StandardLp;
use crate::solvers::{max_step, spd_solve, trace_row, SolveOutcome, SolveStatus, SolverOptions, Trace};

const DIVERGENCE_LIMIT: f64 = 1e14;

/// Reusable factorization of the constraint Gram matrix `A A'`.
struct GramFactor {
    chol: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
    lu: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl GramFactor {
    fn new(a: &DMatrix<f64>) -> Self {
        let gram = a * a.transpose();
        match gram.clone().cholesky() {
            Some(chol) => Self { chol: Some(chol), lu: None },
            None => Self { chol: None, lu: Some(gram.lu()) },
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        if rhs.is_empty() {
            return Some(rhs.clone());
        }
        match (&self.chol, &self.lu) {
            (Some(chol), _) => Some(chol.solve(rhs)),
            (None, Some(lu)) => lu.solve(rhs),
            _ => None,
        }
    }
}

/// Runs affine scaling from a strictly positive feasible point.
pub fn affine_scaling(
    lp: &StandardLp,
    x0: &crate::lp::StartPoint,
    opts: &SolverOptions,
    mut trace: Option<Trace<'_>>,
) -> Result<SolveOutcome> {
    opts.validate()?;
    let clock = Instant::now();
    let m = lp.n_rows();
    let n = lp.n_cols();
    let mut x = x0
        .x
        .clone()
        .ok_or_else(|| Error::InvalidStartPoint { reason: "no primal point".into() })?;
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    if x.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::InvalidStartPoint { reason: "point is not strictly positive".into() });
    }
    if lp.residual_inf(&x) > opts.feas_tol {
        return Err(Error::InvalidStartPoint {
            reason: format!("residual {} above tolerance", lp.residual_inf(&x)),
        });
    }

    let theta = if lp.meta.fully_degenerate {
        opts.step_fraction.min(opts.degenerate_step_cap)
    } else {
        opts.step_fraction
    };
    let max_iters = opts.max_iters.unwrap_or(500);
    let c_scale = lp.c.amax().max(1.0);
    let b_scale = lp.b.amax().max(1.0);
    let gram = GramFactor::new(&lp.a);
    let mut prev_objective = f64::INFINITY;
    // (bound b'w, w, reduced costs) of the best near-feasible dual estimate.
    let mut best: Option<(f64, DVector<f64>, DVector<f64>)> = None;

    let mut iterations = 0;
    loop {
        // Pull the iterate back onto the constraint manifold before it can
        // drift: minimum-norm correction, scaled down if positivity binds.
        let mut defect = &lp.b - &lp.a * &x;
        if defect.amax() > 1e-13 * b_scale {
            if let Some(h) = gram.solve(&defect) {
                let fix = lp.a.transpose() * h;
                let mut scale: f64 = 1.0;
                for j in 0..n {
                    if fix[j] < 0.0 {
                        scale = scale.min(0.5 * x[j] / -fix[j]);
                    }
                }
                for j in 0..n {
                    x[j] += scale * fix[j];
                }
                defect = &lp.b - &lp.a * &x;
            }
        }
        let residual = defect.amax();
        let objective = lp.objective(&x);

        // Dual estimate from the scaled normal equations.
        let mut scaled = lp.a.clone();
        for j in 0..n {
            let xj = x[j];
            for i in 0..m {
                scaled[(i, j)] *= xj;
            }
        }
        let normal = &scaled * scaled.transpose();
        let d2c = DVector::from_iterator(n, (0..n).map(|j| x[j] * x[j] * lp.c[j]));
        let rhs = &lp.a * &d2c;
        let w = spd_solve(&normal, &rhs).ok_or_else(|| Error::InvalidBasis {
            reason: "normal equations are singular".into(),
        })?;
        let reduced = &lp.c - lp.a.transpose() * &w;
        let gap = x.dot(&reduced);
        let dual_infeas = (-reduced.min()).max(0.0);

        // Near a vertex the scaling collapses and later estimates can jump
        // away from dual feasibility, so optimality is certified against
        // the best lower bound from any near-feasible estimate seen so far;
        // such a bound stays valid for every primal iterate.
        if dual_infeas <= opts.opt_tol * c_scale {
            let bound = lp.b.dot(&w);
            if best.as_ref().map_or(true, |(b, _, _)| bound > *b) {
                best = Some((bound, w.clone(), reduced.clone()));
            }
        }

        trace_row(&mut trace, iterations, objective, residual, dual_infeas, gap);

        let outcome = |status: SolveStatus, obj: f64, x: DVector<f64>, iters: usize| SolveOutcome {
            status,
            objective: Some(obj),
            primal_residual_inf: lp.residual_inf(&x),
            dual_residual_inf: dual_infeas,
            duality_gap: gap,
            x: Some(x),
            y: Some(w.clone()),
            t: Some(reduced.clone()),
            iterations: iters,
            wall_time_ns: clock.elapsed().as_nanos() as u64,
        };

        if opts.early_negative
            && objective < -opts.early_negative_threshold
            && residual <= opts.feas_tol
        {
            return Ok(outcome(SolveStatus::EarlyNegative, objective, x, iterations));
        }

        let stalled = (prev_objective - objective).abs() <= opts.opt_tol * (1.0 + objective.abs());
        if let Some((bound, best_w, best_r)) = &best {
            let best_gap = objective - bound;
            if residual <= opts.feas_tol
                && best_gap <= opts.gap_tol * (1.0 + bound.abs())
                && (stalled || best_gap <= opts.gap_tol)
            {
                return Ok(SolveOutcome {
                    status: SolveStatus::Optimal,
                    objective: Some(objective),
                    primal_residual_inf: lp.residual_inf(&x),
                    dual_residual_inf: (-best_r.min()).max(0.0),
                    duality_gap: best_gap,
                    y: Some(best_w.clone()),
                    t: Some(best_r.clone()),
                    x: Some(x),
                    iterations,
                    wall_time_ns: clock.elapsed().as_nanos() as u64,
                });
            }
        }

        if objective < -DIVERGENCE_LIMIT {
            return Ok(outcome(SolveStatus::Unbounded, objective, x, iterations));
        }

        // Step direction in the original space, re-projected onto the null
        // space of A through the well-conditioned Gram factorization.
        let mut dir = DVector::from_iterator(n, (0..n).map(|j| -x[j] * x[j] * reduced[j]));
        let leak = &lp.a * &dir;
        if leak.amax() > 0.0 {
            if let Some(h) = gram.solve(&leak) {
                dir -= lp.a.transpose() * h;
            }
        }
        let falling = x
            .iter()
            .zip(reduced.iter())
            .map(|(&xj, &rj)| (xj * rj).abs())
            .fold(0.0f64, f64::max);
        if falling <= 1e-14 * c_scale {
            // The projected objective vanishes: every feasible point shares
            // this objective value.
            return Ok(outcome(SolveStatus::Optimal, objective, x, iterations));
        }
        if dir.iter().all(|&v| v >= 0.0) {
            let descent = -lp.c.dot(&dir);
            if descent > 1e-12 * c_scale * dir.amax() {
                // A feasible direction that never hits the boundary and
                // strictly decreases the objective.
                return Ok(outcome(SolveStatus::Unbounded, objective, x, iterations));
            }
            // The projected gradient is numerically zero: nothing can move.
            return Ok(outcome(SolveStatus::IterLimit, objective, x, iterations));
        }

        iterations += 1;
        if iterations > max_iters {
            return Ok(outcome(SolveStatus::IterLimit, objective, x, iterations - 1));
        }

        let boundary = max_step(&x, &dir);
        let alpha = theta * boundary;
        for j in 0..n {
            let updated = x[j] + alpha * dir[j];
            x[j] = if updated > 0.0 { updated } else { x[j] * (1.0 - theta) };
        }
        prev_objective = objective;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{FormulationMeta, Layout, LpKind, StartPoint, VarBlock};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn tiny_lp(a: &[f64], rows: usize, cols: usize, b: &[f64], c: &[f64]) -> StandardLp {
        StandardLp {
            a: DMatrix::from_row_slice(rows, cols, a),
            b: DVector::from_row_slice(b),
            c: DVector::from_row_slice(c),
            meta: FormulationMeta {
                kind: LpKind::P3,
                omega0: None,
                layout: Layout::from_sizes(&[(VarBlock::Lambda, cols)]),
                fully_degenerate: b.iter().all(|&v| v == 0.0),
                initial_basis: None,
                free_cols: None,
            },
        }
    }

    #[test]
    fn solves_box_problem() {
        // min -x s.t. x + s = 1 from the center of the segment.
        let lp = tiny_lp(&[1.0, 1.0], 1, 2, &[1.0], &[-1.0, 0.0]);
        let start = StartPoint::primal(DVector::from_row_slice(&[0.5, 0.5]));
        let out = affine_scaling(&lp, &start, &SolverOptions::default(), None).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_abs_diff_eq!(out.objective.unwrap(), -1.0, epsilon = 1e-6);
    }

    #[test]
    fn rejects_non_interior_start() {
        let lp = tiny_lp(&[1.0, 1.0], 1, 2, &[1.0], &[-1.0, 0.0]);
        let zero = StartPoint::primal(DVector::from_row_slice(&[0.0, 1.0]));
        assert!(affine_scaling(&lp, &zero, &SolverOptions::default(), None).is_err());
        let infeasible = StartPoint::primal(DVector::from_row_slice(&[3.0, 3.0]));
        assert!(affine_scaling(&lp, &infeasible, &SolverOptions::default(), None).is_err());
        let missing = StartPoint { x: None, y: None, t: None };
        assert!(affine_scaling(&lp, &missing, &SolverOptions::default(), None).is_err());
    }

    #[test]
    fn early_negative_on_degenerate_cone() {
        // min -x s.t. x - s = 0 (fully degenerate, unbounded below).
        let lp = tiny_lp(&[1.0, -1.0], 1, 2, &[0.0], &[-1.0, 0.0]);
        let start = StartPoint::primal(DVector::from_row_slice(&[1.0, 1.0]));
        let opts = SolverOptions { early_negative: true, ..SolverOptions::default() };
        let out = affine_scaling(&lp, &start, &opts, None).unwrap();
        assert_eq!(out.status, SolveStatus::EarlyNegative);
        assert!(out.objective.unwrap() < -1e-7);
        assert!(out.primal_residual_inf <= 1e-9);
    }

    #[test]
    fn constant_objective_is_optimal() {
        // c vanishes on the feasible set: min 0 s.t. x + s = 1.
        let lp = tiny_lp(&[1.0, 1.0], 1, 2, &[1.0], &[0.0, 0.0]);
        let start = StartPoint::primal(DVector::from_row_slice(&[0.5, 0.5]));
        let out = affine_scaling(&lp, &start, &SolverOptions::default(), None).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_abs_diff_eq!(out.objective.unwrap(), 0.0);
    }
}
