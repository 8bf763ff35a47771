//! Exact rational feasibility oracle for small instances.
//!
//! Decides whether some pmf `p` satisfies `sum_w f_i(w) p(w) >= 0` for
//! every gamble by running a textbook phase-1 simplex in exact `BigRational`
//! arithmetic with Bland's rule. Independent of the floating-point solvers,
//! it is the ground truth the acceptance corpus is checked against.

use num::{bigint::BigInt, rational::BigRational, FromPrimitive, Signed, Zero};

use crate::error::{Error, Result};
use crate::gambles::{Gamble, GambleSet};

/// Hard cap on gambles and outcomes for the oracle.
pub const ORACLE_SIZE_LIMIT: usize = 16;

/// Denominator used when snapping gambles onto a rational grid.
pub const SNAP_DENOMINATOR: i64 = 1_000_000;

/// Rounds every payoff to the nearest multiple of `1/SNAP_DENOMINATOR`.
/// Feeding the snapped set to both the oracle and the floating-point
/// checkers makes them decide the identical instance.
pub fn snap_to_rationals(d: &GambleSet) -> GambleSet {
    let gambles = d
        .gambles()
        .iter()
        .map(|g| {
            Gamble::new(
                g.values()
                    .iter()
                    .map(|v| (v * SNAP_DENOMINATOR as f64).round() / SNAP_DENOMINATOR as f64)
                    .collect(),
            )
            .expect("snapping preserves finiteness")
        })
        .collect();
    GambleSet::new(d.space().clone(), gambles).expect("snapping preserves shape")
}

fn to_rational(v: f64) -> BigRational {
    let scaled = (v * SNAP_DENOMINATOR as f64).round();
    BigRational::new(
        BigInt::from_f64(scaled).expect("finite payoff"),
        BigInt::from(SNAP_DENOMINATOR),
    )
}

/// Decides avoiding sure loss exactly. Payoffs are interpreted on the
/// `1/SNAP_DENOMINATOR` grid (idempotent when the set is already snapped).
pub fn exact_oracle_asl(d: &GambleSet) -> Result<bool> {
    let n = d.len();
    let m = d.n_outcomes();
    if n > ORACLE_SIZE_LIMIT || m > ORACLE_SIZE_LIMIT {
        return Err(Error::OracleSizeGuard {
            n_gambles: n,
            n_outcomes: m,
            limit: ORACLE_SIZE_LIMIT,
        });
    }

    // Feasibility system: for each gamble, sum_w f_i(w) p_w - u_i = 0 with
    // u_i >= 0, plus sum_w p_w = 1. The gamble rows are stored negated so
    // the surplus u_i can serve as the initial basic variable; the mass row
    // gets the single artificial `a`, and phase-1 minimizes `a`.
    let n_rows = n + 1;
    let p_at = 0;
    let u_at = m;
    let a_at = m + n;
    let n_cols = m + n + 1;

    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));

    // Tableau rows plus RHS column; `obj` is the reduced-cost row with the
    // current objective value in its RHS slot.
    let mut rows: Vec<Vec<BigRational>> = vec![vec![zero.clone(); n_cols + 1]; n_rows];
    for i in 0..n {
        for w in 0..m {
            rows[i][p_at + w] = -to_rational(d.payoff(i, w));
        }
        rows[i][u_at + i] = one.clone();
    }
    for w in 0..m {
        rows[n][p_at + w] = one.clone();
    }
    rows[n][a_at] = one.clone();
    rows[n][n_cols] = one.clone();
    let mut basis: Vec<usize> = (0..n).map(|i| u_at + i).collect();
    basis.push(a_at);

    // Reduced costs of `min a` with `a` basic: subtract the mass row.
    let mut obj: Vec<BigRational> = vec![zero.clone(); n_cols + 1];
    obj[a_at] = one.clone();
    for j in 0..=n_cols {
        let v = rows[n][j].clone();
        obj[j] -= v;
    }

    loop {
        // Bland: lowest-index column with a negative reduced cost.
        let entering = (0..n_cols).find(|&j| obj[j].is_negative());
        let Some(q) = entering else {
            // Optimal. obj RHS holds -objective.
            return Ok(obj[n_cols].is_zero());
        };

        let mut leaving: Option<usize> = None;
        let mut best_ratio: Option<BigRational> = None;
        for r in 0..n_rows {
            if rows[r][q].is_positive() {
                let ratio = &rows[r][n_cols] / &rows[r][q];
                let replace = match &best_ratio {
                    None => true,
                    Some(best) => {
                        ratio < *best
                            || (ratio == *best && basis[r] < basis[leaving.unwrap()])
                    }
                };
                if replace {
                    best_ratio = Some(ratio);
                    leaving = Some(r);
                }
            }
        }
        let Some(r) = leaving else {
            // Minimizing a nonnegative variable cannot be unbounded.
            return Err(Error::InvalidBasis {
                reason: "exact phase-1 lost boundedness".into(),
            });
        };

        // Pivot on (r, q).
        let piv = rows[r][q].clone();
        for v in rows[r].iter_mut() {
            *v /= &piv;
        }
        for i in 0..n_rows {
            if i != r && !rows[i][q].is_zero() {
                let factor = rows[i][q].clone();
                for j in 0..=n_cols {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        if !obj[q].is_zero() {
            let factor = obj[q].clone();
            for j in 0..=n_cols {
                let delta = &factor * &rows[r][j];
                obj[j] -= delta;
            }
        }
        basis[r] = q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gambles::OutcomeSpace;

    fn set(gambles: &[&[f64]]) -> GambleSet {
        let space = OutcomeSpace::indexed(gambles[0].len()).unwrap();
        GambleSet::new(
            space,
            gambles.iter().map(|g| Gamble::new(g.to_vec()).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn simple_verdicts() {
        assert!(exact_oracle_asl(&set(&[&[1.0, -1.0]])).unwrap());
        assert!(!exact_oracle_asl(&set(&[&[1.0, -2.0], &[-2.0, 1.0]])).unwrap());
        assert!(!exact_oracle_asl(&set(&[&[-0.5, -0.5]])).unwrap());
        assert!(exact_oracle_asl(&set(&[&[1.0, -2.0], &[-1.0, 2.0]])).unwrap());
    }

    #[test]
    fn boundary_combination_still_avoids() {
        // lambda = (1, 1) yields exactly zero everywhere: max = 0 >= 0.
        assert!(exact_oracle_asl(&set(&[&[1.0, -1.0], &[-1.0, 1.0]])).unwrap());
    }

    #[test]
    fn size_guard() {
        let gambles: Vec<Vec<f64>> = (0..17).map(|i| vec![i as f64, -1.0]).collect();
        let refs: Vec<&[f64]> = gambles.iter().map(|g| g.as_slice()).collect();
        assert!(matches!(
            exact_oracle_asl(&set(&refs)),
            Err(Error::OracleSizeGuard { .. })
        ));
    }

    #[test]
    fn snapping_is_idempotent() {
        let d = set(&[&[0.123456789, -0.987654321]]);
        let snapped = snap_to_rationals(&d);
        assert_eq!(snapped.payoff(0, 0), 0.123457);
        assert_eq!(snap_to_rationals(&snapped), snapped);
    }
}
