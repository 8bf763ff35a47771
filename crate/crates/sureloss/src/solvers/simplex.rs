//! Revised simplex with a dense LU basis factorization kept current through
//! product-form eta updates, refactorized every 50 pivots.
//!
//! Pricing is Dantzig (most negative reduced cost) while all basic values
//! are safely positive, and switches to Bland's rule (lowest eligible
//! index in and out) as soon as any basic value sits at zero, which is what
//! prevents cycling on fully degenerate programs.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::StandardLp;
use crate::solvers::{trace_row, SolveOutcome, SolveStatus, SolverOptions, Trace};

const REFACTOR_EVERY: usize = 50;
const PIVOT_TOL: f64 = 1e-9;

struct BasisFactor {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_t: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    /// Product-form updates: (basis position replaced, pivot column B^-1 a_q).
    etas: Vec<(usize, DVector<f64>)>,
}

impl BasisFactor {
    fn factorize(a: &DMatrix<f64>, basis: &[usize]) -> Result<Self> {
        let m = a.nrows();
        let mut b = DMatrix::zeros(m, m);
        for (pos, &col) in basis.iter().enumerate() {
            b.set_column(pos, &a.column(col));
        }
        let lu = b.clone().lu();
        let lu_t = b.transpose().lu();
        // A singular basis shows up as a (near-)zero pivot in U.
        let det_ok = (0..m).all(|i| lu.u()[(i, i)].abs() > 1e-12);
        if !det_ok {
            return Err(Error::InvalidBasis { reason: "singular basis matrix".into() });
        }
        Ok(Self { lu, lu_t, etas: Vec::new() })
    }

    /// Solves `B v = rhs`.
    fn ftran(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut v = self.lu.solve(rhs).expect("factorized basis");
        for (r, d) in &self.etas {
            let piv = v[*r] / d[*r];
            for i in 0..v.len() {
                if i != *r {
                    v[i] -= d[i] * piv;
                }
            }
            v[*r] = piv;
        }
        v
    }

    /// Solves `B' y = rhs`.
    fn btran(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut w = rhs.clone();
        for (r, d) in self.etas.iter().rev() {
            let dot = w.dot(d);
            w[*r] -= (dot - w[*r]) / d[*r];
        }
        self.lu_t.solve(&w).expect("factorized basis")
    }
}

fn assemble(n: usize, basis: &[usize], x_b: &DVector<f64>) -> DVector<f64> {
    let mut x = DVector::zeros(n);
    for (pos, &col) in basis.iter().enumerate() {
        x[col] = x_b[pos].max(0.0);
    }
    x
}

/// Runs the revised simplex from a caller-supplied feasible basis.
///
/// The basis must consist of `m` distinct column indices whose columns are
/// linearly independent with `B^-1 b >= 0`; the formulation builders supply
/// such bases in closed form, so a violation here signals a builder bug and
/// comes back as an error rather than a status.
pub fn revised_simplex(
    lp: &StandardLp,
    initial_basis: &[usize],
    opts: &SolverOptions,
    mut trace: Option<Trace<'_>>,
) -> Result<SolveOutcome> {
    opts.validate()?;
    let clock = Instant::now();
    let m = lp.n_rows();
    let n = lp.n_cols();
    if initial_basis.len() != m {
        return Err(Error::InvalidBasis {
            reason: format!("basis has {} columns, need {m}", initial_basis.len()),
        });
    }
    let mut in_basis = vec![false; n];
    for &col in initial_basis {
        if col >= n || in_basis[col] {
            return Err(Error::InvalidBasis { reason: format!("bad basis column {col}") });
        }
        in_basis[col] = true;
    }

    let max_iters = opts.max_iters.unwrap_or(50 * (m + n));
    let mut basis = initial_basis.to_vec();
    let mut factor = BasisFactor::factorize(&lp.a, &basis)?;
    let mut x_b = factor.ftran(&lp.b);
    if x_b.iter().any(|&v| v < -opts.feas_tol) {
        return Err(Error::InvalidBasis { reason: "initial basis is infeasible".into() });
    }
    for v in x_b.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }

    let mut iterations = 0;
    loop {
        if factor.etas.len() >= REFACTOR_EVERY {
            factor = BasisFactor::factorize(&lp.a, &basis)?;
            x_b = factor.ftran(&lp.b);
            for v in x_b.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }

        let c_b = DVector::from_iterator(m, basis.iter().map(|&col| lp.c[col]));
        let y = factor.btran(&c_b);
        let objective = c_b.dot(&x_b);
        let degenerate = x_b.iter().any(|&v| v <= opts.feas_tol);

        // Pricing. Bland takes the first eligible column; Dantzig the most
        // negative reduced cost.
        let mut entering: Option<(usize, f64)> = None;
        let mut min_reduced = f64::INFINITY;
        for j in 0..n {
            if in_basis[j] {
                continue;
            }
            let mut dot = 0.0;
            for i in 0..m {
                dot += y[i] * lp.a[(i, j)];
            }
            let reduced = lp.c[j] - dot;
            min_reduced = min_reduced.min(reduced);
            if reduced < -opts.opt_tol {
                if degenerate {
                    entering = Some((j, reduced));
                    break;
                }
                if entering.map_or(true, |(_, best)| reduced < best) {
                    entering = Some((j, reduced));
                }
            }
        }

        let Some((q, reduced_q)) = entering else {
            let x = assemble(n, &basis, &x_b);
            let ata = lp.a.transpose() * &y;
            let t = &lp.c - ata;
            return Ok(SolveOutcome {
                status: SolveStatus::Optimal,
                objective: Some(objective),
                primal_residual_inf: lp.residual_inf(&x),
                dual_residual_inf: (-min_reduced).max(0.0),
                duality_gap: objective - lp.b.dot(&y),
                x: Some(x),
                y: Some(y),
                t: Some(t),
                iterations,
                wall_time_ns: clock.elapsed().as_nanos() as u64,
            });
        };

        let a_q: DVector<f64> = lp.a.column(q).into_owned();
        let d = factor.ftran(&a_q);

        // Ratio test over rows with a usable pivot.
        let mut theta = f64::INFINITY;
        let mut leaving: Option<usize> = None;
        for i in 0..m {
            if d[i] > PIVOT_TOL {
                let ratio = x_b[i].max(0.0) / d[i];
                let better = match leaving {
                    None => true,
                    Some(r) => {
                        if ratio < theta - 1e-12 * (1.0 + theta.abs()) {
                            true
                        } else if ratio <= theta + 1e-12 * (1.0 + theta.abs()) {
                            // Tie: Bland wants the lowest leaving variable
                            // index, Dantzig the most stable pivot.
                            if degenerate {
                                basis[i] < basis[r]
                            } else {
                                d[i] > d[r]
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = theta.min(ratio);
                    leaving = Some(i);
                }
            }
        }

        let Some(r) = leaving else {
            // Improving ray: step far enough along it that the objective is
            // decisively negative, and report that point.
            let mut x = assemble(n, &basis, &x_b);
            let step = ((1.0 + objective.abs()) / reduced_q.abs()).min(1e6);
            x[q] += step;
            for i in 0..m {
                x[basis[i]] = (x[basis[i]] - step * d[i]).max(0.0);
            }
            let obj = lp.objective(&x);
            return Ok(SolveOutcome {
                status: SolveStatus::Unbounded,
                objective: Some(obj),
                primal_residual_inf: lp.residual_inf(&x),
                dual_residual_inf: (-min_reduced).max(0.0),
                duality_gap: f64::INFINITY,
                x: Some(x),
                y: Some(y),
                t: None,
                iterations,
                wall_time_ns: clock.elapsed().as_nanos() as u64,
            });
        };

        iterations += 1;
        if iterations > max_iters {
            let x = assemble(n, &basis, &x_b);
            return Ok(SolveOutcome {
                status: SolveStatus::IterLimit,
                objective: Some(objective),
                primal_residual_inf: lp.residual_inf(&x),
                dual_residual_inf: (-min_reduced).max(0.0),
                duality_gap: objective - lp.b.dot(&y),
                x: Some(x),
                y: Some(y),
                t: None,
                iterations,
                wall_time_ns: clock.elapsed().as_nanos() as u64,
            });
        }

        for i in 0..m {
            x_b[i] -= theta * d[i];
            if x_b[i] < 0.0 {
                x_b[i] = 0.0;
            }
        }
        x_b[r] = theta;
        in_basis[basis[r]] = false;
        in_basis[q] = true;
        basis[r] = q;
        factor.etas.push((r, d));

        trace_row(&mut trace, iterations, objective + theta * reduced_q, 0.0, (-min_reduced).max(0.0), 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{FormulationMeta, Layout, LpKind, VarBlock};
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

    #[test]
    fn one_pivot_optimum() {
        // min -x s.t. x + s = 1 starting from the slack basis.
        let lp = tiny_lp(&[1.0, 1.0], 1, 2, &[1.0], &[-1.0, 0.0]);
        let out = revised_simplex(&lp, &[1], &SolverOptions::default(), None).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_abs_diff_eq!(out.objective.unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.x.as_ref().unwrap()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn detects_unbounded_ray() {
        // min -x s.t. x - s = 0: the ray x = s -> infinity.
        let lp = tiny_lp(&[1.0, -1.0], 1, 2, &[0.0], &[-1.0, 0.0]);
        let out = revised_simplex(&lp, &[1], &SolverOptions::default(), None).unwrap();
        assert_eq!(out.status, SolveStatus::Unbounded);
        assert!(out.objective.unwrap() < 0.0);
        assert!(out.primal_residual_inf < 1e-9);
    }

    #[test]
    fn rejects_bad_bases() {
        let lp = tiny_lp(&[1.0, 1.0], 1, 2, &[1.0], &[-1.0, 0.0]);
        assert!(revised_simplex(&lp, &[0, 1], &SolverOptions::default(), None).is_err());
        assert!(revised_simplex(&lp, &[5], &SolverOptions::default(), None).is_err());
        // Infeasible basis: x = -1 at the basic column.
        let lp2 = tiny_lp(&[1.0, -1.0], 1, 2, &[1.0], &[0.0, 0.0]);
        assert!(revised_simplex(&lp2, &[1], &SolverOptions::default(), None).is_err());
    }

    #[test]
    fn two_variable_vertex() {
        // min -x - 2y s.t. x + s1 = 1, y + s2 = 2; optimum -5 at (1, 2).
        let lp = tiny_lp(
            &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0],
            2,
            4,
            &[1.0, 2.0],
            &[-1.0, -2.0, 0.0, 0.0],
        );
        let out = revised_simplex(&lp, &[2, 3], &SolverOptions::default(), None).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_abs_diff_eq!(out.objective.unwrap(), -5.0, epsilon = 1e-12);
        assert!(out.duality_gap.abs() < 1e-9);
    }

    #[test]
    fn iteration_limit_reported() {
        let lp = tiny_lp(
            &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0],
            2,
            4,
            &[1.0, 2.0],
            &[-1.0, -2.0, 0.0, 0.0],
        );
        let opts = SolverOptions { max_iters: Some(1), ..SolverOptions::default() };
        let out = revised_simplex(&lp, &[2, 3], &opts, None).unwrap();
        assert_eq!(out.status, SolveStatus::IterLimit);
    }
}
