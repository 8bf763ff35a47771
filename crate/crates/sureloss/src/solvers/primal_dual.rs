//! Infeasible-start primal-dual path following. Each iteration takes one
//! damped Newton step on the optimality system
//!
//! ```text
//! Ax - b = 0,   A'y + t - c = 0,   x_i t_i = sigma * mu,   x, t > 0
//! ```
//!
//! with fixed centering `sigma = 0.1` and one joint step length clipped to
//! a fraction of the distance to the boundary for both `x` and `t`. The
//! joint step keeps the primal residual, dual residual, and complementarity
//! contracting at the same rate; letting the two sides run at different
//! speeds can drive the gap many orders of magnitude below the residuals,
//! after which the scaling matrix degenerates and the lagging side stops
//! making progress. The start point only needs `x > 0` and `t > 0`;
//! feasibility is recovered along the way. The negative-objective stopping
//! rule is applied only while the primal residual is negligible, since the
//! zero-or-unbounded dichotomy needs an (essentially) feasible point.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::StandardLp;
use crate::solvers::{max_step, spd_solve, trace_row, SolveOutcome, SolveStatus, SolverOptions, Trace};

const SIGMA: f64 = 0.1;
const DIVERGENCE_LIMIT: f64 = 1e14;

/// Runs the primal-dual method from strictly positive `x` and `t` (and an
/// arbitrary free `y`, zero when absent).
pub fn primal_dual(
    lp: &StandardLp,
    start: &crate::lp::StartPoint,
    opts: &SolverOptions,
    mut trace: Option<Trace<'_>>,
) -> Result<SolveOutcome> {
    opts.validate()?;
    let clock = Instant::now();
    let m = lp.n_rows();
    let n = lp.n_cols();
    let mut x = start
        .x
        .clone()
        .ok_or_else(|| Error::InvalidStartPoint { reason: "no primal point".into() })?;
    let mut y = start.y.clone().unwrap_or_else(|| DVector::zeros(m));
    let mut t = start.t.clone().unwrap_or_else(|| DVector::from_element(n, 1.0));
    if x.len() != n || t.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len().max(t.len()) });
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: y.len() });
    }
    if x.iter().chain(t.iter()).any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::InvalidStartPoint {
            reason: "x and t must be strictly positive".into(),
        });
    }

    let max_iters = opts.max_iters.unwrap_or(500);
    let mut iterations = 0;
    loop {
        let r_p = &lp.a * &x - &lp.b;
        let r_d = lp.a.transpose() * &y + &t - &lp.c;
        let gap = x.dot(&t);
        let rp_inf = r_p.amax();
        let rd_inf = r_d.amax();
        let objective = lp.objective(&x);
        if !(rp_inf.is_finite() && rd_inf.is_finite() && gap.is_finite()) {
            return Err(Error::InvalidBasis {
                reason: "primal-dual iterates became non-finite".into(),
            });
        }

        trace_row(&mut trace, iterations, objective, rp_inf, rd_inf, gap);

        let outcome = |status: SolveStatus, x: DVector<f64>, y: DVector<f64>, t: DVector<f64>, iters: usize| {
            SolveOutcome {
                status,
                objective: Some(objective),
                primal_residual_inf: rp_inf,
                dual_residual_inf: rd_inf,
                duality_gap: gap,
                x: Some(x),
                y: Some(y),
                t: Some(t),
                iterations: iters,
                wall_time_ns: clock.elapsed().as_nanos() as u64,
            }
        };

        if rp_inf <= opts.feas_tol && rd_inf <= opts.feas_tol && gap <= opts.gap_tol {
            return Ok(outcome(SolveStatus::Optimal, x, y, t, iterations));
        }
        if opts.early_negative
            && objective < -opts.early_negative_threshold
            && rp_inf <= opts.feas_tol
        {
            return Ok(outcome(SolveStatus::EarlyNegative, x, y, t, iterations));
        }
        if x.amax() > DIVERGENCE_LIMIT {
            return Ok(outcome(SolveStatus::Unbounded, x, y, t, iterations));
        }
        if y.amax().max(t.amax()) > DIVERGENCE_LIMIT {
            return Ok(outcome(SolveStatus::Infeasible, x, y, t, iterations));
        }

        iterations += 1;
        if iterations > max_iters {
            return Ok(outcome(SolveStatus::IterLimit, x, y, t, iterations - 1));
        }

        let mu = gap / n as f64;

        // Augmented Newton system; the normal-equations form squares the
        // x/t conditioning and loses the primal residual to solve error
        // once the iterate is close to a degenerate optimum.
        //
        //   [ T/X  -A' ] [dx]   [ -t + sigma mu / x + r_d ]
        //   [ A     0  ] [dy] = [ -r_p                    ]
        let dim = n + m;
        let mut kkt = DMatrix::zeros(dim, dim);
        let mut rhs = DVector::zeros(dim);
        for j in 0..n {
            kkt[(j, j)] = t[j] / x[j];
            for i in 0..m {
                kkt[(j, n + i)] = -lp.a[(i, j)];
                kkt[(n + i, j)] = lp.a[(i, j)];
            }
            rhs[j] = -t[j] + SIGMA * mu / x[j] + r_d[j];
        }
        for i in 0..m {
            rhs[n + i] = -r_p[i];
        }
        let delta = kkt.lu().solve(&rhs).ok_or_else(|| Error::InvalidBasis {
            reason: "Newton system is singular".into(),
        })?;
        let dx = DVector::from_iterator(n, (0..n).map(|j| delta[j]));
        let dy = DVector::from_iterator(m, (0..m).map(|i| delta[n + i]));
        let aty = lp.a.transpose() * &dy;
        let dt = DVector::from_iterator(n, (0..n).map(|j| -r_d[j] - aty[j]));

        let alpha = (opts.step_fraction * max_step(&x, &dx).min(max_step(&t, &dt))).min(1.0);
        for j in 0..n {
            let nx = x[j] + alpha * dx[j];
            x[j] = if nx > 0.0 { nx } else { x[j] * (1.0 - opts.step_fraction) };
            let nt = t[j] + alpha * dt[j];
            t[j] = if nt > 0.0 { nt } else { t[j] * (1.0 - opts.step_fraction) };
        }
        y += alpha * dy;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{FormulationMeta, Layout, LpKind, StartPoint, VarBlock};
    use approx::assert_abs_diff_eq;

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

    fn ones_start(n: usize) -> StartPoint {
        StartPoint {
            x: Some(DVector::from_element(n, 1.0)),
            y: None,
            t: Some(DVector::from_element(n, 1.0)),
        }
    }

    #[test]
    fn solves_box_problem_from_infeasible_start() {
        let lp = tiny_lp(&[1.0, 1.0], 1, 2, &[1.0], &[-1.0, 0.0]);
        let out = primal_dual(&lp, &ones_start(2), &SolverOptions::default(), None).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_abs_diff_eq!(out.objective.unwrap(), -1.0, epsilon = 1e-6);
        assert!(out.primal_residual_inf <= 1e-9);
        assert!(out.dual_residual_inf <= 1e-9);
        assert!(out.duality_gap <= 1e-8);
    }

    #[test]
    fn rejects_nonpositive_start() {
        let lp = tiny_lp(&[1.0, 1.0], 1, 2, &[1.0], &[-1.0, 0.0]);
        let bad = StartPoint {
            x: Some(DVector::from_row_slice(&[1.0, 0.0])),
            y: None,
            t: Some(DVector::from_element(2, 1.0)),
        };
        assert!(primal_dual(&lp, &bad, &SolverOptions::default(), None).is_err());
    }

    #[test]
    fn early_negative_with_residual_guard() {
        // Fully degenerate and unbounded below; the start is feasible, so
        // the guard admits the early stop as soon as the objective dips.
        let lp = tiny_lp(&[1.0, -1.0], 1, 2, &[0.0], &[-1.0, 0.0]);
        let start = StartPoint {
            x: Some(DVector::from_element(2, 1.0)),
            y: None,
            t: Some(DVector::from_element(2, 1.0)),
        };
        let opts = SolverOptions { early_negative: true, ..SolverOptions::default() };
        let out = primal_dual(&lp, &start, &opts, None).unwrap();
        assert_eq!(out.status, SolveStatus::EarlyNegative);
        assert!(out.objective.unwrap() < -1e-7);
        assert!(out.primal_residual_inf <= 1e-9);
    }

    #[test]
    fn iteration_limit_reported() {
        let lp = tiny_lp(&[1.0, 1.0], 1, 2, &[1.0], &[-1.0, 0.0]);
        let opts = SolverOptions { max_iters: Some(1), ..SolverOptions::default() };
        let out = primal_dual(&lp, &ones_start(2), &opts, None).unwrap();
        assert_eq!(out.status, SolveStatus::IterLimit);
    }
}
