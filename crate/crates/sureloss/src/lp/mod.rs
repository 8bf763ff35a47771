//! Standard-form linear programs for consistency checking: the reduced
//! formulations, their metadata, and closed-form starting points.
//!
//! Everything here produces minimization problems `min c'x  s.t.  Ax = b,
//! x >= 0` (see [`StandardLp`]). The builders in [`build`] encode a gamble
//! set into the formulations listed in [`LpKind`]; [`start`] holds the
//! closed-form interior starting points used by the interior-point solvers.

mod build;
mod start;

pub use build::{build_d3, build_d4_phase1, build_p1, build_p3, build_p4prime, select_omega0};
pub use start::{start_point_d5, start_point_p3, start_point_p4prime};

use std::fmt::Write as _;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Which formulation a [`StandardLp`] encodes.
///
/// `P3` is the reduced primal (fully degenerate, `b = 0`); `D3` the
/// simplex-ready dual with slack/artificial columns; `D4Phase1` the phase-1
/// feasibility program for the slack-form dual (minimize the artificial
/// `gamma`); `P4Prime` its dual pairing. `P1` is the unreduced primal kept as
/// a cross-check. `UpperExt`/`LowerExt` are the natural-extension programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpKind {
    P1,
    P3,
    D3,
    D4Phase1,
    P4Prime,
    UpperExt,
    LowerExt,
}

impl LpKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LpKind::P1 => "P1",
            LpKind::P3 => "P3",
            LpKind::D3 => "D3",
            LpKind::D4Phase1 => "D4'",
            LpKind::P4Prime => "P4'",
            LpKind::UpperExt => "upper-ext",
            LpKind::LowerExt => "lower-ext",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "P1" => LpKind::P1,
            "P3" => LpKind::P3,
            "D3" => LpKind::D3,
            "D4'" => LpKind::D4Phase1,
            "P4'" => LpKind::P4Prime,
            "upper-ext" => LpKind::UpperExt,
            "lower-ext" => LpKind::LowerExt,
            _ => return None,
        })
    }
}

impl std::fmt::Display for LpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Named variable blocks of a formulation's column space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBlock {
    /// Nonnegative combination coefficients, one per gamble.
    Lambda,
    /// The scalar bound variable of the reduced primal.
    Alpha,
    /// Positive part of a split free variable.
    AlphaPlus,
    /// Negative part of a split free variable.
    AlphaMinus,
    /// Row slacks.
    Slack,
    /// Artificial variables (rows flipped for sign in the dual form).
    Artificial,
    /// Probability mass per non-reference outcome.
    P,
    /// Dual slacks per gamble.
    T,
    /// Residual probability mass on the reference outcome.
    Q,
    /// The phase-1 artificial scalar.
    Gamma,
    /// Mirror of lambda in the dual pairing.
    U,
    /// Mirror of alpha in the dual pairing.
    Beta,
    /// Slack of the phase-1 coupling row.
    Mu,
}

impl VarBlock {
    pub fn as_str(&self) -> &'static str {
        match self {
            VarBlock::Lambda => "lambda",
            VarBlock::Alpha => "alpha",
            VarBlock::AlphaPlus => "alpha+",
            VarBlock::AlphaMinus => "alpha-",
            VarBlock::Slack => "slack",
            VarBlock::Artificial => "artificial",
            VarBlock::P => "p",
            VarBlock::T => "t",
            VarBlock::Q => "q",
            VarBlock::Gamma => "gamma",
            VarBlock::U => "u",
            VarBlock::Beta => "beta",
            VarBlock::Mu => "mu",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "lambda" => VarBlock::Lambda,
            "alpha" => VarBlock::Alpha,
            "alpha+" => VarBlock::AlphaPlus,
            "alpha-" => VarBlock::AlphaMinus,
            "slack" => VarBlock::Slack,
            "artificial" => VarBlock::Artificial,
            "p" => VarBlock::P,
            "t" => VarBlock::T,
            "q" => VarBlock::Q,
            "gamma" => VarBlock::Gamma,
            "u" => VarBlock::U,
            "beta" => VarBlock::Beta,
            "mu" => VarBlock::Mu,
            _ => return None,
        })
    }
}

/// Ordered map from variable blocks to column ranges. The ranges are
/// disjoint and together cover `0..n_cols` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    blocks: Vec<(VarBlock, Range<usize>)>,
}

impl Layout {
    /// Builds a layout from consecutive block sizes, skipping empty blocks.
    pub fn from_sizes(sizes: &[(VarBlock, usize)]) -> Self {
        let mut blocks = Vec::new();
        let mut at = 0;
        for &(block, size) in sizes {
            if size > 0 {
                blocks.push((block, at..at + size));
                at += size;
            }
        }
        Self { blocks }
    }

    /// Column range of a block, if present.
    pub fn range(&self, block: VarBlock) -> Option<Range<usize>> {
        self.blocks.iter().find(|(b, _)| *b == block).map(|(_, r)| r.clone())
    }

    pub fn blocks(&self) -> &[(VarBlock, Range<usize>)] {
        &self.blocks
    }

    /// Total number of columns covered.
    pub fn n_cols(&self) -> usize {
        self.blocks.last().map_or(0, |(_, r)| r.end)
    }

    /// Checks that the ranges are consecutive, disjoint, and cover `0..n`.
    pub fn covers(&self, n: usize) -> bool {
        let mut at = 0;
        for (_, r) in &self.blocks {
            if r.start != at || r.end <= r.start {
                return false;
            }
            at = r.end;
        }
        at == n
    }
}

/// Formulation metadata carried alongside the matrix data, used to recover
/// verdict certificates from solution vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulationMeta {
    pub kind: LpKind,
    /// Index of the reference outcome, when the formulation has one.
    pub omega0: Option<usize>,
    pub layout: Layout,
    /// True when `b = 0`, i.e. every basic feasible solution is the origin.
    pub fully_degenerate: bool,
    /// Closed-form feasible basis (column indices), when the formulation
    /// provides one.
    pub initial_basis: Option<Vec<usize>>,
    /// Columns that are sign-free rather than nonnegative. Only the dual
    /// pairing `P4'` uses this.
    pub free_cols: Option<Range<usize>>,
}

/// A dense standard-form linear program: `min c'x  s.t.  Ax = b, x >= 0`,
/// with metadata describing which formulation it encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub meta: FormulationMeta,
}

impl StandardLp {
    pub fn n_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.a.ncols()
    }

    /// `c' x`.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.c.dot(x)
    }

    /// `max_i |(Ax - b)_i|`.
    pub fn residual_inf(&self, x: &DVector<f64>) -> f64 {
        (&self.a * x - &self.b).amax()
    }

    /// Plain-text listing of rows, columns, and right-hand side, for
    /// external cross-validation. Parse back with [`StandardLp::parse_dump`].
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "LP kind={} omega0={} degenerate={}",
            self.meta.kind,
            self.meta.omega0.map_or("-".to_string(), |w| w.to_string()),
            u8::from(self.meta.fully_degenerate),
        );
        let _ = writeln!(out, "DIMS {} {}", self.n_rows(), self.n_cols());
        for (block, range) in self.meta.layout.blocks() {
            let _ = writeln!(out, "LAYOUT {} {} {}", block.as_str(), range.start, range.end);
        }
        if let Some(basis) = &self.meta.initial_basis {
            let cols: Vec<String> = basis.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "BASIS {}", cols.join(" "));
        }
        let c: Vec<String> = self.c.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "C {}", c.join(" "));
        let b: Vec<String> = self.b.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "B {}", b.join(" "));
        for i in 0..self.n_rows() {
            let row: Vec<String> = (0..self.n_cols()).map(|j| format!("{:?}", self.a[(i, j)])).collect();
            let _ = writeln!(out, "A {}", row.join(" "));
        }
        out.push_str("END\n");
        out
    }

    /// Parses the [`StandardLp::dump`] listing.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut omega0 = None;
        let mut degenerate = false;
        let mut dims = None;
        let mut layout_sizes: Vec<(VarBlock, Range<usize>)> = Vec::new();
        let mut initial_basis: Option<Vec<usize>> = None;
        let mut c: Option<Vec<f64>> = None;
        let mut b: Option<Vec<f64>> = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();

        let parse_floats = |rest: &str| -> Result<Vec<f64>> {
            rest.split_whitespace()
                .map(|tok| tok.parse::<f64>().map_err(|e| Error::Parse(format!("bad number {tok:?}: {e}"))))
                .collect()
        };

        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line == "END" {
                continue;
            }
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            match tag {
                "LP" => {
                    for field in rest.split_whitespace() {
                        let (key, value) = field
                            .split_once('=')
                            .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
                        match key {
                            "kind" => {
                                kind = Some(
                                    LpKind::from_str(value)
                                        .ok_or_else(|| Error::Parse(format!("unknown kind {value:?}")))?,
                                );
                            }
                            "omega0" => {
                                omega0 = if value == "-" {
                                    None
                                } else {
                                    Some(value.parse().map_err(|e| Error::Parse(format!("omega0: {e}")))?)
                                };
                            }
                            "degenerate" => degenerate = value == "1",
                            _ => return Err(Error::Parse(format!("unknown header key {key:?}"))),
                        }
                    }
                }
                "DIMS" => {
                    let parts: Vec<usize> = rest
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|e| Error::Parse(format!("dims: {e}"))))
                        .collect::<Result<_>>()?;
                    if parts.len() != 2 {
                        return Err(Error::Parse("DIMS needs two values".into()));
                    }
                    dims = Some((parts[0], parts[1]));
                }
                "LAYOUT" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(Error::Parse("LAYOUT needs block start end".into()));
                    }
                    let block = VarBlock::from_str(parts[0])
                        .ok_or_else(|| Error::Parse(format!("unknown block {:?}", parts[0])))?;
                    let s: usize = parts[1].parse().map_err(|e| Error::Parse(format!("layout: {e}")))?;
                    let e: usize = parts[2].parse().map_err(|e| Error::Parse(format!("layout: {e}")))?;
                    layout_sizes.push((block, s..e));
                }
                "BASIS" => {
                    initial_basis = Some(
                        rest.split_whitespace()
                            .map(|t| t.parse().map_err(|e| Error::Parse(format!("basis: {e}"))))
                            .collect::<Result<_>>()?,
                    );
                }
                "C" => c = Some(parse_floats(rest)?),
                "B" => b = Some(parse_floats(rest)?),
                "A" => rows.push(parse_floats(rest)?),
                _ => return Err(Error::Parse(format!("unknown line tag {tag:?}"))),
            }
        }

        let kind = kind.ok_or_else(|| Error::Parse("missing LP header".into()))?;
        let (m, n) = dims.ok_or_else(|| Error::Parse("missing DIMS".into()))?;
        let c = c.ok_or_else(|| Error::Parse("missing C".into()))?;
        let b = b.ok_or_else(|| Error::Parse("missing B".into()))?;
        if c.len() != n || b.len() != m || rows.len() != m || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("inconsistent dimensions".into()));
        }
        let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        let layout = Layout { blocks: layout_sizes };
        if !layout.covers(n) {
            return Err(Error::Parse("layout does not cover all columns".into()));
        }
        Ok(StandardLp {
            a,
            b: DVector::from_vec(b),
            c: DVector::from_vec(c),
            meta: FormulationMeta {
                kind,
                omega0,
                layout,
                fully_degenerate: degenerate,
                initial_basis,
                free_cols: None,
            },
        })
    }
}

/// A starting point for a solver. `x` is the primal iterate; `y` and `t` the
/// dual iterate (free variables and dual slacks). Components that are
/// present and sign-constrained are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct StartPoint {
    pub x: Option<DVector<f64>>,
    pub y: Option<DVector<f64>>,
    pub t: Option<DVector<f64>>,
}

impl StartPoint {
    pub fn primal(x: DVector<f64>) -> Self {
        Self { x: Some(x), y: None, t: None }
    }

    pub fn dual(y: DVector<f64>, t: DVector<f64>) -> Self {
        Self { x: None, y: Some(y), t: Some(t) }
    }

    /// Merges a primal-side point with a dual-side point.
    pub fn merged(primal: &StartPoint, dual: &StartPoint) -> Self {
        Self { x: primal.x.clone(), y: dual.y.clone(), t: dual.t.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_lookup_and_cover() {
        let layout = Layout::from_sizes(&[
            (VarBlock::Lambda, 2),
            (VarBlock::Alpha, 1),
            (VarBlock::Slack, 3),
        ]);
        assert_eq!(layout.range(VarBlock::Lambda), Some(0..2));
        assert_eq!(layout.range(VarBlock::Slack), Some(3..6));
        assert_eq!(layout.range(VarBlock::Q), None);
        assert!(layout.covers(6));
        assert!(!layout.covers(7));
    }

    #[test]
    fn layout_skips_empty_blocks() {
        let layout = Layout::from_sizes(&[
            (VarBlock::P, 3),
            (VarBlock::Artificial, 0),
            (VarBlock::Q, 1),
        ]);
        assert_eq!(layout.range(VarBlock::Artificial), None);
        assert!(layout.covers(4));
    }

    #[test]
    fn dump_round_trip() {
        let lp = StandardLp {
            a: DMatrix::from_row_slice(1, 3, &[-2.0, -1.0, 1.0]),
            b: DVector::from_vec(vec![0.0]),
            c: DVector::from_vec(vec![1.0, 1.0, 0.0]),
            meta: FormulationMeta {
                kind: LpKind::P3,
                omega0: Some(0),
                layout: Layout::from_sizes(&[
                    (VarBlock::Lambda, 1),
                    (VarBlock::Alpha, 1),
                    (VarBlock::Slack, 1),
                ]),
                fully_degenerate: true,
                initial_basis: Some(vec![2]),
                free_cols: None,
            },
        };
        let text = lp.dump();
        let back = StandardLp::parse_dump(&text).unwrap();
        assert_eq!(back.a, lp.a);
        assert_eq!(back.b, lp.b);
        assert_eq!(back.c, lp.c);
        assert_eq!(back.meta.kind, lp.meta.kind);
        assert_eq!(back.meta.omega0, lp.meta.omega0);
        assert_eq!(back.meta.layout, lp.meta.layout);
        assert_eq!(back.meta.initial_basis, Some(vec![2]));
        assert!(back.meta.fully_degenerate);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(StandardLp::parse_dump("nonsense").is_err());
        assert!(StandardLp::parse_dump("LP kind=P3 omega0=0 degenerate=1\nDIMS 1 2\nC 1\nB 0\nA 1 2\nEND\n").is_err());
    }
}
