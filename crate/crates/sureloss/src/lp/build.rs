//! Encoders from a gamble set into the standard-form programs.
//!
//! Row and column conventions: the reference outcome `omega0` is dropped
//! from outcome-indexed rows/columns, which keep the remaining outcomes in
//! outcome order. Gamble-indexed blocks keep the gamble order of the input
//! set.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gambles::GambleSet;
use crate::lp::{FormulationMeta, Layout, LpKind, StandardLp, StartPoint, VarBlock};

/// Picks the reference outcome: the one on which the most gambles are
/// nonnegative, ties broken by lowest outcome index.
pub fn select_omega0(d: &GambleSet) -> usize {
    let mut best = 0;
    let mut best_count = 0;
    for w in 0..d.n_outcomes() {
        let count = (0..d.len()).filter(|&i| d.payoff(i, w) >= 0.0).count();
        if count > best_count {
            best = w;
            best_count = count;
        }
    }
    best
}

/// The unreduced primal: minimize the certain-loss bound `alpha` subject to
/// `sum_i f_i(w) lambda_i - alpha <= 0` on every outcome. The free `alpha`
/// is split into `alpha+ - alpha-` and the inequalities get slacks, so
/// `b = 0` and the program is fully degenerate. Kept as a cross-check for
/// the reduced formulation.
pub fn build_p1(d: &GambleSet) -> StandardLp {
    let n = d.len();
    let m = d.n_outcomes();
    let n_cols = n + 2 + m;
    let mut a = DMatrix::zeros(m, n_cols);
    for w in 0..m {
        for i in 0..n {
            a[(w, i)] = d.payoff(i, w);
        }
        a[(w, n)] = -1.0;
        a[(w, n + 1)] = 1.0;
        a[(w, n + 2 + w)] = 1.0;
    }
    let mut c = DVector::zeros(n_cols);
    c[n] = 1.0;
    c[n + 1] = -1.0;
    let layout = Layout::from_sizes(&[
        (VarBlock::Lambda, n),
        (VarBlock::AlphaPlus, 1),
        (VarBlock::AlphaMinus, 1),
        (VarBlock::Slack, m),
    ]);
    let initial_basis = Some((n + 2..n + 2 + m).collect());
    StandardLp {
        a,
        b: DVector::zeros(m),
        c,
        meta: FormulationMeta {
            kind: LpKind::P1,
            omega0: None,
            layout,
            fully_degenerate: true,
            initial_basis,
            free_cols: None,
        },
    }
}

/// The reduced primal: one equality row per outcome other than `omega0`,
///
/// ```text
/// min  sum_i f_i(w0) lambda_i + alpha
/// s.t. sum_i (f_i(w) - f_i(w0)) lambda_i - alpha + s(w) = 0   (w != w0)
///      lambda, alpha, s >= 0
/// ```
///
/// `b = 0`, so the program is fully degenerate and its optimal value is
/// either zero (the set avoids sure loss) or unbounded below. The all-slack
/// basis (the origin) is recorded as the initial extreme point.
pub fn build_p3(d: &GambleSet, omega0: usize) -> Result<StandardLp> {
    let n = d.len();
    let m_omega = d.n_outcomes();
    if omega0 >= m_omega {
        return Err(Error::DimensionMismatch { expected: m_omega, got: omega0 });
    }
    let m = m_omega - 1;
    let n_cols = n + 1 + m;
    let mut a = DMatrix::zeros(m, n_cols);
    for (row, w) in (0..m_omega).filter(|&w| w != omega0).enumerate() {
        for i in 0..n {
            a[(row, i)] = d.payoff(i, w) - d.payoff(i, omega0);
        }
        a[(row, n)] = -1.0;
        a[(row, n + 1 + row)] = 1.0;
    }
    let mut c = DVector::zeros(n_cols);
    for i in 0..n {
        c[i] = d.payoff(i, omega0);
    }
    c[n] = 1.0;
    let layout = Layout::from_sizes(&[
        (VarBlock::Lambda, n),
        (VarBlock::Alpha, 1),
        (VarBlock::Slack, m),
    ]);
    let initial_basis = Some((n + 1..n + 1 + m).collect());
    Ok(StandardLp {
        a,
        b: DVector::zeros(m),
        c,
        meta: FormulationMeta {
            kind: LpKind::P3,
            omega0: Some(omega0),
            layout,
            fully_degenerate: true,
            initial_basis,
            free_cols: None,
        },
    })
}

/// The simplex-ready dual. With `N = {j : f_j(w0) < 0}`:
///
/// ```text
/// min  sum_{j in N} v_j
/// s.t. sum_{w != w0} (f_j(w) - f_j(w0)) p(w) - s_j + v_j = -f_j(w0)   (j in N)
///      sum_{w != w0} (f_j(w0) - f_j(w)) p(w) + s_j      =  f_j(w0)   (j not in N)
///      sum_{w != w0} p(w) + q = 1
/// ```
///
/// All right-hand sides are nonnegative and the recorded initial basis
/// (`v_j` or `s_j` per gamble row, `q` for the mass row) is feasible. The
/// set avoids sure loss iff the optimal value is zero.
pub fn build_d3(d: &GambleSet, omega0: usize) -> Result<StandardLp> {
    let n = d.len();
    let m_omega = d.n_outcomes();
    if omega0 >= m_omega {
        return Err(Error::DimensionMismatch { expected: m_omega, got: omega0 });
    }
    let m = m_omega - 1;
    let negated: Vec<bool> = (0..n).map(|j| d.payoff(j, omega0) < 0.0).collect();
    let n_neg = negated.iter().filter(|&&x| x).count();
    let n_rows = n + 1;
    let n_cols = m + n + n_neg + 1;
    let p_at = 0;
    let s_at = m;
    let v_at = m + n;
    let q_at = m + n + n_neg;

    let mut a = DMatrix::zeros(n_rows, n_cols);
    let mut b = DVector::zeros(n_rows);
    let mut basis = Vec::with_capacity(n_rows);
    let mut v_pos = 0;
    for j in 0..n {
        let sign = if negated[j] { -1.0 } else { 1.0 };
        for (col, w) in (0..m_omega).filter(|&w| w != omega0).enumerate() {
            a[(j, p_at + col)] = sign * (d.payoff(j, omega0) - d.payoff(j, w));
        }
        if negated[j] {
            a[(j, s_at + j)] = -1.0;
            a[(j, v_at + v_pos)] = 1.0;
            basis.push(v_at + v_pos);
            v_pos += 1;
        } else {
            a[(j, s_at + j)] = 1.0;
            basis.push(s_at + j);
        }
        b[j] = sign * d.payoff(j, omega0);
    }
    for col in 0..m {
        a[(n, p_at + col)] = 1.0;
    }
    a[(n, q_at)] = 1.0;
    b[n] = 1.0;
    basis.push(q_at);

    let mut c = DVector::zeros(n_cols);
    for k in 0..n_neg {
        c[v_at + k] = 1.0;
    }
    let layout = Layout::from_sizes(&[
        (VarBlock::P, m),
        (VarBlock::Slack, n),
        (VarBlock::Artificial, n_neg),
        (VarBlock::Q, 1),
    ]);
    Ok(StandardLp {
        a,
        b,
        c,
        meta: FormulationMeta {
            kind: LpKind::D3,
            omega0: Some(omega0),
            layout,
            fully_degenerate: false,
            initial_basis: Some(basis),
            free_cols: None,
        },
    })
}

/// The phase-1 program for the slack-form dual, with its closed-form
/// interior starting point.
///
/// ```text
/// min  gamma
/// s.t. sum_{w != w0} (f_i(w0) - f_i(w)) p(w) + t_i + r_i gamma = f_i(w0)
///      sum_{w != w0} p(w) + q = 1
/// ```
///
/// With the uniform start `p0(w) = q0 = 1/|O|`, the per-gamble residual is
/// `h_i = f_i(w0) - sum_{w != w0} (f_i(w0) - f_i(w)) / |O|`; choosing
/// `t0_i = h_i` when `h_i > 0` (so `r_i = 0`) and `t0_i = 1` otherwise
/// (so `r_i = h_i - 1`) makes `(p0, t0, q0, gamma0 = 1)` satisfy every row
/// exactly. The set avoids sure loss iff the optimal `gamma` is zero.
pub fn build_d4_phase1(d: &GambleSet, omega0: usize) -> Result<(StandardLp, StartPoint)> {
    let n = d.len();
    let m_omega = d.n_outcomes();
    if omega0 >= m_omega {
        return Err(Error::DimensionMismatch { expected: m_omega, got: omega0 });
    }
    let m = m_omega - 1;
    let inv = 1.0 / m_omega as f64;
    let n_rows = n + 1;
    let n_cols = m + n + 2;
    let t_at = m;
    let q_at = m + n;
    let gamma_at = m + n + 1;

    let mut a = DMatrix::zeros(n_rows, n_cols);
    let mut b = DVector::zeros(n_rows);
    let mut x0 = DVector::zeros(n_cols);
    for col in 0..m {
        x0[col] = inv;
    }
    x0[q_at] = inv;
    x0[gamma_at] = 1.0;

    for i in 0..n {
        let mut coef_sum = 0.0;
        for (col, w) in (0..m_omega).filter(|&w| w != omega0).enumerate() {
            let coef = d.payoff(i, omega0) - d.payoff(i, w);
            a[(i, col)] = coef;
            coef_sum += coef;
        }
        let h = d.payoff(i, omega0) - coef_sum * inv;
        let (t0, r) = if h > 0.0 { (h, 0.0) } else { (1.0, h - 1.0) };
        a[(i, t_at + i)] = 1.0;
        a[(i, gamma_at)] = r;
        b[i] = d.payoff(i, omega0);
        x0[t_at + i] = t0;
    }
    for col in 0..m {
        a[(n, col)] = 1.0;
    }
    a[(n, q_at)] = 1.0;
    b[n] = 1.0;

    let mut c = DVector::zeros(n_cols);
    c[gamma_at] = 1.0;
    let layout = Layout::from_sizes(&[
        (VarBlock::P, m),
        (VarBlock::T, n),
        (VarBlock::Q, 1),
        (VarBlock::Gamma, 1),
    ]);
    let lp = StandardLp {
        a,
        b,
        c,
        meta: FormulationMeta {
            kind: LpKind::D4Phase1,
            omega0: Some(omega0),
            layout,
            fully_degenerate: false,
            initial_basis: None,
            free_cols: None,
        },
    };
    Ok((lp, StartPoint::primal(x0)))
}

/// The dual pairing of the phase-1 program, written as an equality system:
/// the transpose of the phase-1 matrix plus an identity block of dual
/// slacks. Row order follows the phase-1 column order (`p`-rows, `t`-rows,
/// `q`-row, coupling row carrying the `r_i`), variables are the free
/// `(lambda, alpha)` followed by the slacks `(s, u, beta, mu)`. The
/// objective maximizes `sum_i f_i(w0) lambda_i + alpha`, stored negated
/// since [`StandardLp`] minimizes.
pub fn build_p4prime(d4: &StandardLp) -> Result<StandardLp> {
    if d4.meta.kind != LpKind::D4Phase1 {
        return Err(Error::WrongFormulation {
            expected: "D4'",
            got: d4.meta.kind.to_string(),
        });
    }
    let rows_d4 = d4.n_rows();
    let cols_d4 = d4.n_cols();
    let n = rows_d4 - 1;
    let m = d4.meta.layout.range(VarBlock::P).map_or(0, |r| r.len());

    let n_rows = cols_d4;
    let n_cols = rows_d4 + cols_d4;
    let mut a = DMatrix::zeros(n_rows, n_cols);
    for i in 0..n_rows {
        for j in 0..rows_d4 {
            a[(i, j)] = d4.a[(j, i)];
        }
        a[(i, rows_d4 + i)] = 1.0;
    }
    let b = d4.c.clone();
    let mut c = DVector::zeros(n_cols);
    for j in 0..rows_d4 {
        c[j] = -d4.b[j];
    }
    let layout = Layout::from_sizes(&[
        (VarBlock::Lambda, n),
        (VarBlock::Alpha, 1),
        (VarBlock::Slack, m),
        (VarBlock::U, n),
        (VarBlock::Beta, 1),
        (VarBlock::Mu, 1),
    ]);
    Ok(StandardLp {
        a,
        b,
        c,
        meta: FormulationMeta {
            kind: LpKind::P4Prime,
            omega0: d4.meta.omega0,
            layout,
            fully_degenerate: false,
            initial_basis: None,
            free_cols: Some(0..rows_d4),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gambles::{Gamble, OutcomeSpace};
    use approx::assert_abs_diff_eq;

    fn set(gambles: &[&[f64]]) -> GambleSet {
        let space = OutcomeSpace::indexed(gambles[0].len()).unwrap();
        GambleSet::new(
            space,
            gambles.iter().map(|g| Gamble::new(g.to_vec()).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn omega0_tie_breaks_low() {
        assert_eq!(select_omega0(&set(&[&[-1.0, 2.0], &[3.0, -1.0]])), 0);
        assert_eq!(select_omega0(&set(&[&[-1.0, 2.0], &[-3.0, 1.0]])), 1);
        assert_eq!(select_omega0(&set(&[&[5.0, 0.0], &[0.0, 5.0]])), 0);
    }

    #[test]
    fn p1_shape_and_row() {
        let lp = build_p1(&set(&[&[1.0, -1.0]]));
        assert_eq!(lp.n_rows(), 2);
        assert_eq!(lp.n_cols(), 5);
        // Row for the first outcome: lambda - alpha+ + alpha- + s_0 = 0.
        assert_eq!(lp.a[(0, 0)], 1.0);
        assert_eq!(lp.a[(0, 1)], -1.0);
        assert_eq!(lp.a[(0, 2)], 1.0);
        assert_eq!(lp.a[(0, 3)], 1.0);
        assert_eq!(lp.a[(0, 4)], 0.0);
        assert!(lp.b.iter().all(|&v| v == 0.0));
        assert!(lp.meta.fully_degenerate);
    }

    #[test]
    fn p3_single_gamble() {
        let lp = build_p3(&set(&[&[1.0, -1.0]]), 0).unwrap();
        assert_eq!(lp.n_rows(), 1);
        assert_eq!(lp.n_cols(), 3);
        assert_eq!(lp.a[(0, 0)], -2.0);
        assert_eq!(lp.a[(0, 1)], -1.0);
        assert_eq!(lp.a[(0, 2)], 1.0);
        assert_eq!(lp.c.as_slice(), &[1.0, 1.0, 0.0]);
        assert!(lp.b.iter().all(|&v| v == 0.0));
        assert!(lp.meta.fully_degenerate);
    }

    #[test]
    fn p3_two_gambles_rows() {
        let lp = build_p3(&set(&[&[1.0, -2.0], &[-2.0, 1.0]]), 0).unwrap();
        // Row for w=1: (f_i(w) - f_i(w0)) gives -3 and 3.
        assert_eq!(lp.a[(0, 0)], -3.0);
        assert_eq!(lp.a[(0, 1)], 3.0);
        assert_eq!(lp.a[(0, 2)], -1.0);
        assert_eq!(lp.a[(0, 3)], 1.0);
        assert_eq!(lp.c.as_slice(), &[1.0, -2.0, 1.0, 0.0]);
    }

    #[test]
    fn p3_layout_partitions() {
        for (n, m) in [(1, 2), (3, 4), (5, 2)] {
            let gambles: Vec<Vec<f64>> =
                (0..n).map(|i| (0..m).map(|w| (i + w) as f64 - 1.5).collect()).collect();
            let refs: Vec<&[f64]> = gambles.iter().map(|g| g.as_slice()).collect();
            let lp = build_p3(&set(&refs), 0).unwrap();
            assert!(lp.meta.layout.covers(lp.n_cols()));
        }
    }

    #[test]
    fn d3_negated_row() {
        let lp = build_d3(&set(&[&[-1.0, 2.0]]), 0).unwrap();
        // N = {0}; the row reads 3 p(b) - s_0 + v_0 = 1.
        assert_eq!(lp.a[(0, 0)], 3.0);
        assert_eq!(lp.a[(0, 1)], -1.0);
        assert_eq!(lp.a[(0, 2)], 1.0);
        assert_eq!(lp.b[0], 1.0);
        assert_eq!(lp.c.as_slice(), &[0.0, 0.0, 1.0, 0.0]);
        assert!(lp.b.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn d3_initial_basis_reproduces_rhs() {
        let d = set(&[&[-1.0, 2.0, 0.5], &[3.0, -1.0, -0.25], &[0.0, 1.0, -2.0]]);
        let lp = build_d3(&d, select_omega0(&d)).unwrap();
        let basis = lp.meta.initial_basis.clone().unwrap();
        // Substitute the named basic values: v_j = -f_j(w0) or s_j = f_j(w0), q = 1.
        let mut x = DVector::zeros(lp.n_cols());
        let w0 = lp.meta.omega0.unwrap();
        let mut v_range = lp.meta.layout.range(VarBlock::Artificial).unwrap();
        for j in 0..d.len() {
            let f0 = d.payoff(j, w0);
            if f0 < 0.0 {
                x[v_range.next().unwrap()] = -f0;
            } else {
                x[lp.meta.layout.range(VarBlock::Slack).unwrap().start + j] = f0;
            }
        }
        x[lp.meta.layout.range(VarBlock::Q).unwrap().start] = 1.0;
        assert!(lp.residual_inf(&x) < 1e-14);
        assert_eq!(basis.len(), lp.n_rows());
    }

    #[test]
    fn d4_phase1_residual_choices() {
        // h = 1 for the all-ones gamble: t0 = h, r = 0.
        let (lp, start) = build_d4_phase1(&set(&[&[1.0, 1.0]]), 0).unwrap();
        let gamma_col = lp.meta.layout.range(VarBlock::Gamma).unwrap().start;
        let t_col = lp.meta.layout.range(VarBlock::T).unwrap().start;
        assert_abs_diff_eq!(lp.a[(0, gamma_col)], 0.0);
        assert_abs_diff_eq!(start.x.as_ref().unwrap()[t_col], 1.0);

        // h = -2 for the all-(-2) gamble: t0 = 1, r = -3.
        let (lp, start) = build_d4_phase1(&set(&[&[-2.0, -2.0]]), 0).unwrap();
        let gamma_col = lp.meta.layout.range(VarBlock::Gamma).unwrap().start;
        let t_col = lp.meta.layout.range(VarBlock::T).unwrap().start;
        assert_abs_diff_eq!(lp.a[(0, gamma_col)], -3.0);
        assert_abs_diff_eq!(start.x.as_ref().unwrap()[t_col], 1.0);
    }

    #[test]
    fn d4_phase1_start_is_interior_and_exact() {
        let d = set(&[&[0.3, -0.7, 0.1], &[-0.4, 0.2, 0.9], &[1.5, -2.5, 0.0]]);
        let (lp, start) = build_d4_phase1(&d, 1).unwrap();
        let x = start.x.unwrap();
        assert!(x.iter().all(|&v| v > 0.0));
        assert!(lp.residual_inf(&x) < 1e-12);
    }

    #[test]
    fn p4prime_shape_and_coupling_row() {
        let d = set(&[&[-2.0, -2.0], &[1.0, 1.0]]);
        let (d4, _) = build_d4_phase1(&d, 0).unwrap();
        let p4 = build_p4prime(&d4).unwrap();
        // (m-1) + n + 1 + 1 rows.
        assert_eq!(p4.n_rows(), 1 + 2 + 1 + 1);
        assert!(p4.meta.layout.covers(p4.n_cols()));
        // The coupling row carries the r_i on the lambda columns.
        let gamma_col = d4.meta.layout.range(VarBlock::Gamma).unwrap().start;
        let last = p4.n_rows() - 1;
        assert_abs_diff_eq!(p4.a[(last, 0)], d4.a[(0, gamma_col)]);
        assert_abs_diff_eq!(p4.a[(last, 1)], d4.a[(1, gamma_col)]);
        assert_abs_diff_eq!(p4.b[last], 1.0);
        assert_eq!(p4.meta.free_cols, Some(0..3));
    }

    #[test]
    fn p4prime_rejects_wrong_kind() {
        let lp = build_p3(&set(&[&[1.0, -1.0]]), 0).unwrap();
        assert!(build_p4prime(&lp).is_err());
    }
}
