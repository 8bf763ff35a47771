//! Closed-form starting points for the interior-point solvers. Each
//! constructor returns a strictly positive point that satisfies its side of
//! the constraints exactly (up to round-off), so no auxiliary phase-1 solve
//! is ever needed.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lp::{LpKind, StandardLp, StartPoint, VarBlock};

/// Interior feasible point for the reduced primal. With all
/// `lambda_i = lambda0 > 0`, set `alpha = 1 + max(0, -delta)` where `delta`
/// is the smallest row residual `b_j - sum_i a_ij lambda0`, and let each
/// slack absorb its row. Every component ends up strictly positive and
/// `Ax = b` holds exactly.
pub fn start_point_p3(lp: &StandardLp, lambda0: f64) -> Result<StartPoint> {
    if lp.meta.kind != LpKind::P3 {
        return Err(Error::WrongFormulation { expected: "P3", got: lp.meta.kind.to_string() });
    }
    if lambda0 <= 0.0 || !lambda0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "lambda0",
            reason: format!("{lambda0} is not strictly positive"),
        });
    }
    let lambda = lp.meta.layout.range(VarBlock::Lambda).unwrap_or(0..0);
    let alpha_at = lp.meta.layout.range(VarBlock::Alpha).unwrap().start;
    let slack = lp.meta.layout.range(VarBlock::Slack).unwrap_or(alpha_at + 1..alpha_at + 1);
    let m = lp.n_rows();

    let mut row_gap = vec![0.0; m];
    let mut delta = f64::INFINITY;
    for j in 0..m {
        let dot: f64 = lambda.clone().map(|i| lp.a[(j, i)] * lambda0).sum();
        row_gap[j] = lp.b[j] - dot;
        delta = delta.min(row_gap[j]);
    }
    if m == 0 {
        delta = 0.0;
    }
    let alpha = 1.0 + (-delta).max(0.0);

    let mut x = DVector::zeros(lp.n_cols());
    for i in lambda {
        x[i] = lambda0;
    }
    x[alpha_at] = alpha;
    for (j, col) in slack.enumerate() {
        x[col] = row_gap[j] + alpha;
    }
    Ok(StartPoint::primal(x))
}

/// Dual-side starting point for the primal-dual run on the reduced primal:
/// the free variables start at `-1/|O|`, the dual slacks at `1` on the
/// lambda block and `1/|O|` on the alpha and slack blocks. Not dual
/// feasible, which is fine for an infeasible-start method.
pub fn start_point_d5(n: usize, m_omega: usize) -> Result<StartPoint> {
    if n < 1 {
        return Err(Error::InvalidParameter { name: "n", reason: "need at least one gamble".into() });
    }
    if m_omega < 2 {
        return Err(Error::InvalidParameter {
            name: "m_omega",
            reason: "need at least two outcomes".into(),
        });
    }
    let inv = 1.0 / m_omega as f64;
    let y = DVector::from_element(m_omega - 1, -inv);
    let mut t = DVector::zeros(n + 1 + (m_omega - 1));
    for i in 0..n {
        t[i] = 1.0;
    }
    for i in n..t.len() {
        t[i] = inv;
    }
    Ok(StartPoint::dual(y, t))
}

/// Interior feasible point for the dual pairing of the phase-1 program.
///
/// Chooses every `lambda_i = -c` with `c = 0.5 / (1 + sum_i max(-r_i, 0))`,
/// which keeps `sum_i r_i lambda_i <= 0.5 < 1` for any sign pattern of the
/// coupling coefficients `r_i`. Then `u_i = -lambda_i` and
/// `mu = 1 - sum_i r_i lambda_i` are fixed by elimination, and `beta` and
/// the row slacks come from the same shift-and-absorb construction as the
/// primal starting point after substituting `alpha = -beta`.
pub fn start_point_p4prime(lp: &StandardLp) -> Result<StartPoint> {
    if lp.meta.kind != LpKind::P4Prime {
        return Err(Error::WrongFormulation { expected: "P4'", got: lp.meta.kind.to_string() });
    }
    let lambda = lp.meta.layout.range(VarBlock::Lambda).unwrap_or(0..0);
    let n = lambda.len();
    let slack = lp.meta.layout.range(VarBlock::Slack).unwrap_or(n + 1..n + 1);
    let m = slack.len();
    let coupling_row = lp.n_rows() - 1;

    let r: Vec<f64> = lambda.clone().map(|i| lp.a[(coupling_row, i)]).collect();
    let neg_sum: f64 = r.iter().map(|&ri| (-ri).max(0.0)).sum();
    let c_lambda = 0.5 / (1.0 + neg_sum);
    let lambda_val = -c_lambda;
    let coupling: f64 = r.iter().map(|&ri| ri * lambda_val).sum();
    let mu = 1.0 - coupling;

    // Rows 0..m are the outcome rows: sum_i a_ki lambda_i + alpha + s_k = 0.
    // With alpha = -beta this is the shift-and-absorb system with b = 0.
    let mut row_gap = vec![0.0; m];
    let mut delta = f64::INFINITY;
    for k in 0..m {
        let dot: f64 = lambda.clone().map(|i| lp.a[(k, i)] * lambda_val).sum();
        row_gap[k] = -dot;
        delta = delta.min(row_gap[k]);
    }
    if m == 0 {
        delta = 0.0;
    }
    let beta = 1.0 + (-delta).max(0.0);

    let mut y = DVector::zeros(n + 1);
    for i in 0..n {
        y[i] = lambda_val;
    }
    y[n] = -beta;

    let mut t = DVector::zeros(lp.n_rows());
    for (k, gap) in row_gap.iter().enumerate() {
        t[k] = gap + beta;
    }
    for i in 0..n {
        t[m + i] = c_lambda;
    }
    t[m + n] = beta;
    t[m + n + 1] = mu;
    Ok(StartPoint::dual(y, t))
}
