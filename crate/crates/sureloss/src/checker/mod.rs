//! The user-facing decision procedure: avoiding-sure-loss verdicts with
//! re-verified certificates, natural-extension bounds, and an exact
//! small-scale oracle.
//!
//! Every verdict ships checkable evidence: a pmf under which every gamble
//! has nonnegative expectation (the set avoids sure loss), or a nonnegative
//! combination whose payoff is strictly negative on every outcome (it does
//! not). Certificates are re-checked numerically before being returned; if
//! a solver's terminal iterate is too dirty to verify, the checker re-solves
//! the slack-form dual with the simplex to extract clean evidence, and any
//! disagreement between the two solves is reported as an error rather than
//! a verdict.

mod exact;

pub use exact::{exact_oracle_asl, snap_to_rationals, ORACLE_SIZE_LIMIT, SNAP_DENOMINATOR};

use std::time::Instant;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gambles::{expectation, Gamble, GambleSet, Pmf};
use crate::lp::{
    build_d3, build_d4_phase1, build_p3, build_p4prime, select_omega0, start_point_d5,
    start_point_p3, start_point_p4prime, FormulationMeta, Layout, LpKind, StandardLp, StartPoint,
    VarBlock,
};
use crate::solvers::{
    affine_scaling, primal_dual, revised_simplex, SolveOutcome, SolveStatus, SolverOptions,
};

/// Certificate tolerance: looser than the solver tolerances so float noise
/// never fails genuinely valid evidence.
pub const CERT_TOL: f64 = 1e-6;

/// Threshold under which a phase-1 objective counts as zero.
pub const GAMMA_TOL: f64 = 1e-7;

/// Solution method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Simplex,
    AffineScaling,
    PrimalDual,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Simplex => "simplex",
            Method::AffineScaling => "affine-scaling",
            Method::PrimalDual => "primal-dual",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Formulation the method is run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    P3,
    D3,
    D4Prime,
}

impl Formulation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Formulation::P3 => "P3",
            Formulation::D3 => "D3",
            Formulation::D4Prime => "D4'",
        }
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated (method, formulation) pair plus solver options.
///
/// The supported pairs are: simplex on P3 or D3, affine scaling on P3 or
/// D4', primal-dual on P3 or D4'. The reduced primal P3 additionally gets
/// the negative-objective stopping rule, and each interior-point method its
/// customary step fraction.
#[derive(Debug, Clone)]
pub struct MethodChoice {
    pub method: Method,
    pub formulation: Formulation,
    pub options: SolverOptions,
}

impl MethodChoice {
    /// Builds a choice with the recommended options for the pair.
    pub fn new(method: Method, formulation: Formulation) -> Result<Self> {
        let supported = matches!(
            (method, formulation),
            (Method::Simplex, Formulation::P3)
                | (Method::Simplex, Formulation::D3)
                | (Method::AffineScaling, Formulation::P3)
                | (Method::AffineScaling, Formulation::D4Prime)
                | (Method::PrimalDual, Formulation::P3)
                | (Method::PrimalDual, Formulation::D4Prime)
        );
        if !supported {
            return Err(Error::InvalidMethodChoice {
                method: method.to_string(),
                formulation: formulation.to_string(),
            });
        }
        // Affine scaling keeps the degenerate-safe 2/3 step everywhere:
        // the phase-1 program can be degenerate at its optimum too, and
        // longer steps leave the dual estimates oscillating there.
        let options = SolverOptions {
            early_negative: formulation == Formulation::P3,
            step_fraction: match method {
                Method::AffineScaling => 2.0 / 3.0,
                _ => 0.995,
            },
            ..SolverOptions::default()
        };
        Ok(Self { method, formulation, options })
    }

    /// Replaces the solver options, keeping the pair.
    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    /// All six supported pairs, in a fixed order.
    pub fn all() -> Vec<MethodChoice> {
        [
            (Method::Simplex, Formulation::P3),
            (Method::Simplex, Formulation::D3),
            (Method::AffineScaling, Formulation::P3),
            (Method::AffineScaling, Formulation::D4Prime),
            (Method::PrimalDual, Formulation::P3),
            (Method::PrimalDual, Formulation::D4Prime),
        ]
        .into_iter()
        .map(|(m, f)| MethodChoice::new(m, f).expect("listed pairs are supported"))
        .collect()
    }

    /// Short label such as `simplex x P3`, used by CSV records and plots.
    pub fn label(&self) -> String {
        format!("{} x {}", self.method, self.formulation)
    }
}

/// Verdict evidence.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// A pmf giving every gamble in the set a nonnegative expectation.
    AslWitness { p: Pmf },
    /// A nonnegative combination (normalized to unit l1 norm) whose payoff
    /// is at most `alpha < 0` on every outcome.
    SureLossWitness { lambda: Vec<f64>, alpha: f64 },
}

/// The decision together with its evidence and the solve it came from.
#[derive(Debug, Clone)]
pub struct AslVerdict {
    pub avoids: bool,
    pub certificate: Certificate,
    pub diagnostics: SolveOutcome,
}

/// Checks that every expectation under `p` clears `-CERT_TOL`.
pub fn verify_asl_witness(d: &GambleSet, p: &Pmf) -> Result<()> {
    for (i, g) in d.gambles().iter().enumerate() {
        let e = expectation(p, g)?;
        if e < -CERT_TOL {
            return Err(Error::InvalidPmf {
                reason: format!("witness gives gamble {i} expectation {e}"),
            });
        }
    }
    Ok(())
}

/// Checks `lambda >= 0` and returns `alpha = max_w sum_i lambda_i f_i(w)`,
/// which must be at most `-CERT_TOL * max(1, |lambda|_1)`.
pub fn verify_sure_loss_witness(d: &GambleSet, lambda: &[f64]) -> Result<f64> {
    if lambda.len() != d.len() {
        return Err(Error::DimensionMismatch { expected: d.len(), got: lambda.len() });
    }
    let norm: f64 = lambda.iter().map(|v| v.abs()).sum();
    if lambda.iter().any(|&v| v < 0.0) || norm <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: "combination must be nonnegative and nonzero".into(),
        });
    }
    let mut alpha = f64::NEG_INFINITY;
    for w in 0..d.n_outcomes() {
        let combo: f64 = (0..d.len()).map(|i| lambda[i] * d.payoff(i, w)).sum();
        alpha = alpha.max(combo);
    }
    if alpha > -CERT_TOL * norm.max(1.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("combination only reaches max payoff {alpha}"),
        });
    }
    Ok(alpha)
}

fn clean_pmf(raw: &[f64]) -> Option<Pmf> {
    let mut probs = Vec::with_capacity(raw.len());
    for &v in raw {
        if v < -CERT_TOL {
            return None;
        }
        probs.push(v.max(0.0));
    }
    let sum: f64 = probs.iter().sum();
    if !(sum.is_finite() && sum > 0.5) {
        return None;
    }
    for v in probs.iter_mut() {
        *v /= sum;
    }
    Pmf::new(probs).ok()
}

fn clean_lambda(raw: &[f64]) -> Option<Vec<f64>> {
    let mut lambda = Vec::with_capacity(raw.len());
    for &v in raw {
        if !v.is_finite() {
            return None;
        }
        lambda.push(v.max(0.0));
    }
    let norm: f64 = lambda.iter().sum();
    if norm <= 0.0 {
        return None;
    }
    for v in lambda.iter_mut() {
        *v /= norm;
    }
    Some(lambda)
}

/// Reassembles a full-length pmf over all outcomes from the per-row block
/// (outcomes other than `omega0`) plus the mass `q` on `omega0`.
fn pmf_from_blocks(block: &[f64], q: f64, omega0: usize) -> Vec<f64> {
    let m = block.len() + 1;
    let mut p = Vec::with_capacity(m);
    let mut it = block.iter();
    for w in 0..m {
        if w == omega0 {
            p.push(q);
        } else {
            p.push(*it.next().expect("block covers all other outcomes"));
        }
    }
    p
}

fn slice(v: &DVector<f64>, range: std::ops::Range<usize>) -> Vec<f64> {
    range.map(|i| v[i]).collect()
}

/// Raw (uncleaned) certificate material extracted from a solve.
enum RawCertificate {
    Asl(Vec<f64>),
    SureLoss(Vec<f64>),
}

fn extract_raw(
    d: &GambleSet,
    lp: &StandardLp,
    out: &SolveOutcome,
    avoids: bool,
) -> Option<RawCertificate> {
    let omega0 = lp.meta.omega0.expect("checker formulations carry omega0");
    match lp.meta.kind {
        LpKind::P3 => {
            if avoids {
                // The dual slacks of the lambda/alpha/slack columns are
                // (expectations, q, p) of the witness pmf.
                let t = out.t.as_ref()?;
                let p_block = slice(t, lp.meta.layout.range(VarBlock::Slack)?);
                let q = t[lp.meta.layout.range(VarBlock::Alpha)?.start];
                Some(RawCertificate::Asl(pmf_from_blocks(&p_block, q, omega0)))
            } else {
                let x = out.x.as_ref()?;
                Some(RawCertificate::SureLoss(slice(x, lp.meta.layout.range(VarBlock::Lambda)?)))
            }
        }
        LpKind::D3 => {
            if avoids {
                let x = out.x.as_ref()?;
                let p_block = slice(x, lp.meta.layout.range(VarBlock::P)?);
                let q = x[lp.meta.layout.range(VarBlock::Q)?.start];
                Some(RawCertificate::Asl(pmf_from_blocks(&p_block, q, omega0)))
            } else {
                // Row multipliers: lambda_j = y_j on sign-flipped rows and
                // -y_j on the others.
                let y = out.y.as_ref()?;
                let lambda = (0..d.len())
                    .map(|j| if d.payoff(j, omega0) < 0.0 { y[j] } else { -y[j] })
                    .collect();
                Some(RawCertificate::SureLoss(lambda))
            }
        }
        LpKind::D4Phase1 => {
            if avoids {
                let x = out.x.as_ref()?;
                let p_block = slice(x, lp.meta.layout.range(VarBlock::P)?);
                let q = x[lp.meta.layout.range(VarBlock::Q)?.start];
                Some(RawCertificate::Asl(pmf_from_blocks(&p_block, q, omega0)))
            } else {
                // The dual multipliers of the gamble rows approach the
                // nonpositive optimal lambda of the pairing; negate them.
                let y = out.y.as_ref()?;
                let lambda = (0..d.len()).map(|j| -y[j]).collect();
                Some(RawCertificate::SureLoss(lambda))
            }
        }
        _ => None,
    }
}

fn build_certificate(d: &GambleSet, raw: RawCertificate) -> Option<Certificate> {
    match raw {
        RawCertificate::Asl(p_raw) => {
            let p = clean_pmf(&p_raw)?;
            verify_asl_witness(d, &p).ok()?;
            Some(Certificate::AslWitness { p })
        }
        RawCertificate::SureLoss(l_raw) => {
            let lambda = clean_lambda(&l_raw)?;
            let alpha = verify_sure_loss_witness(d, &lambda).ok()?;
            Some(Certificate::SureLossWitness { lambda, alpha })
        }
    }
}

fn synthesized_outcome(n_cols: usize, clock: Instant) -> SolveOutcome {
    SolveOutcome {
        status: SolveStatus::Optimal,
        objective: Some(0.0),
        x: Some(DVector::zeros(n_cols)),
        y: None,
        t: None,
        iterations: 0,
        primal_residual_inf: 0.0,
        dual_residual_inf: 0.0,
        duality_gap: 0.0,
        wall_time_ns: clock.elapsed().as_nanos() as u64,
    }
}

/// Decides whether a verdict can be read off a solve outcome; `None` means
/// the outcome carries no verdict (iteration limit, dual divergence on a
/// primal-feasible program, ...).
fn verdict_of(kind: LpKind, out: &SolveOutcome) -> Option<bool> {
    match (kind, out.status) {
        (LpKind::P3, SolveStatus::Optimal) => Some(true),
        (LpKind::P3, SolveStatus::Unbounded | SolveStatus::EarlyNegative) => Some(false),
        (LpKind::D3 | LpKind::D4Phase1, SolveStatus::Optimal) => {
            Some(out.objective.unwrap_or(f64::INFINITY) <= GAMMA_TOL)
        }
        _ => None,
    }
}

/// Checks whether `d` avoids sure loss using the chosen method and
/// formulation. Returns the verdict together with a numerically re-verified
/// certificate; an unusable solve (iteration limit, unverifiable evidence
/// that the fallback cannot repair, fallback disagreement) is an error, so
/// a wrong verdict is never returned silently.
pub fn avoids_sure_loss(d: &GambleSet, choice: &MethodChoice) -> Result<AslVerdict> {
    choice.options.validate()?;
    // Re-validate the pair in case the choice was assembled by hand.
    MethodChoice::new(choice.method, choice.formulation)?;
    let clock = Instant::now();
    let omega0 = select_omega0(d);
    let n = d.len();
    let m_omega = d.n_outcomes();

    // Reference-outcome fast path: if every gamble is nonnegative on
    // omega0, the point mass there witnesses consistency and the reduced
    // primal has the immediate optimum lambda = 0, alpha = 0.
    if (0..n).all(|i| d.payoff(i, omega0) >= 0.0) {
        let p = Pmf::point_mass(m_omega, omega0)?;
        verify_asl_witness(d, &p)?;
        return Ok(AslVerdict {
            avoids: true,
            certificate: Certificate::AslWitness { p },
            diagnostics: synthesized_outcome(n + m_omega, clock),
        });
    }

    // A single-outcome space past the fast path means some payoff is
    // negative on the only outcome; that gamble alone is a sure loss.
    if m_omega == 1 {
        let worst = (0..n)
            .min_by(|&a, &b| d.payoff(a, 0).total_cmp(&d.payoff(b, 0)))
            .expect("nonempty set");
        let mut lambda = vec![0.0; n];
        lambda[worst] = 1.0;
        let alpha = verify_sure_loss_witness(d, &lambda)?;
        return Ok(AslVerdict {
            avoids: false,
            certificate: Certificate::SureLossWitness { lambda, alpha },
            diagnostics: synthesized_outcome(n + 1, clock),
        });
    }

    let (lp, out) = match (choice.method, choice.formulation) {
        (Method::Simplex, Formulation::P3) => {
            let lp = build_p3(d, omega0)?;
            let basis = lp.meta.initial_basis.clone().expect("P3 records its basis");
            let out = revised_simplex(&lp, &basis, &choice.options, None)?;
            (lp, out)
        }
        (Method::Simplex, Formulation::D3) => {
            let lp = build_d3(d, omega0)?;
            let basis = lp.meta.initial_basis.clone().expect("D3 records its basis");
            let out = revised_simplex(&lp, &basis, &choice.options, None)?;
            (lp, out)
        }
        (Method::AffineScaling, Formulation::P3) => {
            let lp = build_p3(d, omega0)?;
            let start = start_point_p3(&lp, 1.0)?;
            let out = affine_scaling(&lp, &start, &choice.options, None)?;
            (lp, out)
        }
        (Method::AffineScaling, Formulation::D4Prime) => {
            let (lp, start) = build_d4_phase1(d, omega0)?;
            let out = affine_scaling(&lp, &start, &choice.options, None)?;
            (lp, out)
        }
        (Method::PrimalDual, Formulation::P3) => {
            let lp = build_p3(d, omega0)?;
            let primal = start_point_p3(&lp, 1.0)?;
            let dual = start_point_d5(n, m_omega)?;
            let out = primal_dual(&lp, &StartPoint::merged(&primal, &dual), &choice.options, None)?;
            (lp, out)
        }
        (Method::PrimalDual, Formulation::D4Prime) => {
            let (lp, primal) = build_d4_phase1(d, omega0)?;
            let pairing = build_p4prime(&lp)?;
            let dual = start_point_p4prime(&pairing)?;
            let out = primal_dual(&lp, &StartPoint::merged(&primal, &dual), &choice.options, None)?;
            (lp, out)
        }
        _ => unreachable!("validated above"),
    };

    let Some(avoids) = verdict_of(lp.meta.kind, &out) else {
        return Err(Error::NoVerdict { status: out.status, diagnostics: Box::new(out) });
    };

    if let Some(cert) = extract_raw(d, &lp, &out, avoids).and_then(|raw| build_certificate(d, raw))
    {
        return Ok(AslVerdict { avoids, certificate: cert, diagnostics: out });
    }

    // The terminal iterate was too dirty to verify; re-solve the slack-form
    // dual with the simplex for clean evidence.
    if choice.method == Method::Simplex && choice.formulation == Formulation::D3 {
        return Err(Error::CertificateCheckFailed {
            reason: "simplex-on-D3 certificate failed verification".into(),
            diagnostics: Box::new(out),
        });
    }
    let fb_lp = build_d3(d, omega0)?;
    let fb_basis = fb_lp.meta.initial_basis.clone().expect("D3 records its basis");
    let fb_opts = SolverOptions::default();
    let fb_out = revised_simplex(&fb_lp, &fb_basis, &fb_opts, None)?;
    let Some(fb_avoids) = verdict_of(LpKind::D3, &fb_out) else {
        return Err(Error::NoVerdict { status: fb_out.status, diagnostics: Box::new(fb_out) });
    };
    if fb_avoids != avoids {
        return Err(Error::VerdictConflict { primary: avoids, fallback: fb_avoids });
    }
    match extract_raw(d, &fb_lp, &fb_out, fb_avoids).and_then(|raw| build_certificate(d, raw)) {
        Some(cert) => Ok(AslVerdict { avoids, certificate: cert, diagnostics: out }),
        None => Err(Error::CertificateCheckFailed {
            reason: "fallback certificate failed verification".into(),
            diagnostics: Box::new(fb_out),
        }),
    }
}

/// Builds the natural-extension LP shared by both bounds.
///
/// Upper bound: `min beta` with `sum_i f_i(w) lambda_i - beta <= -g(w)`.
/// Lower bound: `max gamma` with `sum_i f_i(w) lambda_i + gamma <= g(w)`.
/// Both are shifted by `min g` so every right-hand side is nonnegative and
/// a feasible basis can be written down directly.
fn extension_lp(gambles: &[Gamble], g: &Gamble, upper: bool) -> (StandardLp, Vec<usize>, f64) {
    let n = gambles.len();
    let m = g.len();
    let shift = g.min();
    let shifted: Vec<f64> = g.values().iter().map(|v| v - shift).collect();
    let n_cols = n + 2 + m;
    let mut a = nalgebra::DMatrix::zeros(m, n_cols);
    let mut b = DVector::zeros(m);
    for w in 0..m {
        for (i, f) in gambles.iter().enumerate() {
            // Upper rows are stored negated so the RHS stays nonnegative.
            a[(w, i)] = if upper { -f.values()[w] } else { f.values()[w] };
        }
        a[(w, n)] = 1.0;
        a[(w, n + 1)] = -1.0;
        a[(w, n + 2 + w)] = if upper { -1.0 } else { 1.0 };
        b[w] = shifted[w];
    }
    let mut c = DVector::zeros(n_cols);
    // Upper: min (beta+ - beta-). Lower: max gamma as min (gamma- - gamma+).
    c[n] = if upper { 1.0 } else { -1.0 };
    c[n + 1] = if upper { -1.0 } else { 1.0 };

    let basis = if upper {
        let mut top = 0;
        for w in 0..m {
            if shifted[w] > shifted[top] {
                top = w;
            }
        }
        let mut basis: Vec<usize> = vec![n];
        basis.extend((0..m).filter(|&w| w != top).map(|w| n + 2 + w));
        basis
    } else {
        (0..m).map(|w| n + 2 + w).collect()
    };

    let lp = StandardLp {
        a,
        b,
        c,
        meta: FormulationMeta {
            kind: if upper { LpKind::UpperExt } else { LpKind::LowerExt },
            omega0: None,
            layout: Layout::from_sizes(&[
                (VarBlock::Lambda, n),
                (VarBlock::AlphaPlus, 1),
                (VarBlock::AlphaMinus, 1),
                (VarBlock::Slack, m),
            ]),
            fully_degenerate: false,
            initial_basis: Some(basis.clone()),
            free_cols: None,
        },
    };
    (lp, basis, shift)
}

fn solve_extension(gambles: &[Gamble], g: &Gamble, upper: bool) -> Result<f64> {
    for f in gambles {
        if f.len() != g.len() {
            return Err(Error::DimensionMismatch { expected: g.len(), got: f.len() });
        }
    }
    if gambles.is_empty() {
        return Ok(if upper { g.max() } else { g.min() });
    }
    let (lp, basis, shift) = extension_lp(gambles, g, upper);
    let out = revised_simplex(&lp, &basis, &SolverOptions::default(), None)?;
    match out.status {
        SolveStatus::Optimal => {
            let x = out.x.expect("optimal solve carries its point");
            let n = gambles.len();
            let free = x[n] - x[n + 1];
            Ok(if upper { free + shift } else { -free + shift })
        }
        SolveStatus::Unbounded => Err(Error::SureLossInExtension),
        status => Err(Error::NoVerdict { status, diagnostics: Box::new(out) }),
    }
}

/// Tightest upper buying price for `g` implied by the (consistent) set:
/// the least `beta` such that `beta - g` dominates some nonnegative
/// combination of the set. Errors when the set incurs sure loss.
pub fn upper_natural_extension(e: &GambleSet, g: &Gamble) -> Result<f64> {
    if g.len() != e.n_outcomes() {
        return Err(Error::DimensionMismatch { expected: e.n_outcomes(), got: g.len() });
    }
    solve_extension(e.gambles(), g, true)
}

/// Mirror of [`upper_natural_extension`] for the lower bound.
pub fn lower_natural_extension(e: &GambleSet, g: &Gamble) -> Result<f64> {
    if g.len() != e.n_outcomes() {
        return Err(Error::DimensionMismatch { expected: e.n_outcomes(), got: g.len() });
    }
    solve_extension(e.gambles(), g, false)
}

/// Natural-extension bounds over a bare gamble slice (possibly empty),
/// used by the generators before a full set exists.
pub fn upper_natural_extension_of(gambles: &[Gamble], g: &Gamble) -> Result<f64> {
    solve_extension(gambles, g, true)
}

/// See [`upper_natural_extension_of`].
pub fn lower_natural_extension_of(gambles: &[Gamble], g: &Gamble) -> Result<f64> {
    solve_extension(gambles, g, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gambles::OutcomeSpace;
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
    fn method_choice_validation() {
        assert!(MethodChoice::new(Method::Simplex, Formulation::D4Prime).is_err());
        assert!(MethodChoice::new(Method::AffineScaling, Formulation::D3).is_err());
        assert!(MethodChoice::new(Method::PrimalDual, Formulation::D3).is_err());
        assert_eq!(MethodChoice::all().len(), 6);
    }

    #[test]
    fn fast_path_point_mass() {
        let d = set(&[&[1.0, -1.0]]);
        for choice in MethodChoice::all() {
            let v = avoids_sure_loss(&d, &choice).unwrap();
            assert!(v.avoids);
            let Certificate::AslWitness { p } = &v.certificate else {
                panic!("expected a pmf witness")
            };
            assert_abs_diff_eq!(p.probs()[0], 1.0);
            assert_eq!(v.diagnostics.iterations, 0);
        }
    }

    #[test]
    fn single_negative_gamble_is_sure_loss() {
        let d = set(&[&[-0.5, -0.5]]);
        for choice in MethodChoice::all() {
            let v = avoids_sure_loss(&d, &choice).unwrap();
            assert!(!v.avoids);
            let Certificate::SureLossWitness { lambda, alpha } = &v.certificate else {
                panic!("expected a sure-loss witness")
            };
            assert_abs_diff_eq!(lambda[0], 1.0);
            assert_abs_diff_eq!(*alpha, -0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn two_gamble_witness_is_unique() {
        // Feasible pmfs must satisfy p1 = 2 p2, so the witness is (2/3, 1/3).
        let d = set(&[&[1.0, -2.0], &[-1.0, 2.0]]);
        for choice in MethodChoice::all() {
            let v = avoids_sure_loss(&d, &choice).unwrap();
            assert!(v.avoids, "{} got wrong verdict", choice.label());
            let Certificate::AslWitness { p } = &v.certificate else {
                panic!("expected a pmf witness")
            };
            assert_abs_diff_eq!(p.probs()[0], 2.0 / 3.0, epsilon = 2e-4);
            assert_abs_diff_eq!(p.probs()[1], 1.0 / 3.0, epsilon = 2e-4);
        }
    }

    #[test]
    fn explicit_sure_loss_combination() {
        // lambda = (1, 1) pays -1 on both outcomes.
        let d = set(&[&[1.0, -2.0], &[-2.0, 1.0]]);
        for choice in MethodChoice::all() {
            let v = avoids_sure_loss(&d, &choice).unwrap();
            assert!(!v.avoids, "{} got wrong verdict", choice.label());
            let Certificate::SureLossWitness { lambda, alpha } = &v.certificate else {
                panic!("expected a sure-loss witness")
            };
            assert!(*alpha <= -CERT_TOL);
            let recomputed = verify_sure_loss_witness(&d, lambda).unwrap();
            assert_abs_diff_eq!(recomputed, *alpha, epsilon = 1e-12);
        }
    }

    #[test]
    fn verdicts_match_oracle_on_mixed_cases() {
        let cases: Vec<(GambleSet, bool)> = vec![
            (set(&[&[0.2, -0.1, 0.0], &[-0.1, 0.2, -0.1]]), true),
            (set(&[&[0.25, -0.5, 0.1], &[-0.3, 0.4, -0.2]]), false),
            (set(&[&[-0.1, -0.2, 0.05], &[0.05, 0.1, -0.4]]), false),
            (set(&[&[1.0, -1.0], &[-1.0, 1.0]]), true),
        ];
        for (d, expected) in cases {
            assert_eq!(exact_oracle_asl(&d).unwrap(), expected);
            for choice in MethodChoice::all() {
                let v = avoids_sure_loss(&d, &choice).unwrap();
                assert_eq!(v.avoids, expected, "{}", choice.label());
            }
        }
    }

    #[test]
    fn single_outcome_space() {
        let ok = set(&[&[0.5], &[1.5]]);
        let bad = set(&[&[0.5], &[-0.25]]);
        for choice in MethodChoice::all() {
            assert!(avoids_sure_loss(&ok, &choice).unwrap().avoids);
            let v = avoids_sure_loss(&bad, &choice).unwrap();
            assert!(!v.avoids);
        }
    }

    #[test]
    fn upper_extension_hand_value() {
        let e = set(&[&[1.0, -1.0]]);
        let g = Gamble::new(vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(upper_natural_extension(&e, &g).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn lower_extension_hand_value() {
        let e = set(&[&[1.0, -1.0]]);
        let g = Gamble::new(vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(lower_natural_extension(&e, &g).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn empty_extension_degenerates_to_range() {
        let g = Gamble::new(vec![2.0, 5.0, 3.0]).unwrap();
        assert_abs_diff_eq!(upper_natural_extension_of(&[], &g).unwrap(), 5.0);
        assert_abs_diff_eq!(lower_natural_extension_of(&[], &g).unwrap(), 2.0);
    }

    #[test]
    fn extension_shifts_by_constants() {
        let e = set(&[&[1.0, -1.0], &[-0.5, 0.75]]);
        let g = Gamble::new(vec![0.25, 0.5]).unwrap();
        let upper = upper_natural_extension(&e, &g).unwrap();
        let lower = lower_natural_extension(&e, &g).unwrap();
        let g_shift = g.shifted(3.25).unwrap();
        assert_abs_diff_eq!(
            upper_natural_extension(&e, &g_shift).unwrap(),
            upper + 3.25,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            lower_natural_extension(&e, &g_shift).unwrap(),
            lower + 3.25,
            epsilon = 1e-9
        );
        assert!(lower <= upper + 1e-12);
    }

    #[test]
    fn extension_errors_on_sure_loss() {
        let e = set(&[&[-1.0, -1.0]]);
        let g = Gamble::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(upper_natural_extension(&e, &g), Err(Error::SureLossInExtension)));
        assert!(matches!(lower_natural_extension(&e, &g), Err(Error::SureLossInExtension)));
    }
}
