//! Deciding whether a finite set of desirable gambles avoids sure loss.
//!
//! A gamble assigns a payoff to each outcome of a finite space; a set of
//! desirable gambles avoids sure loss when no nonnegative combination of
//! its members pays strictly negative on every outcome. Equivalently, some
//! probability mass function gives every gamble in the set a nonnegative
//! expectation. This crate decides the question by building reduced linear
//! programs around a reference outcome and solving them with one of three
//! interchangeable methods:
//!
//! - revised simplex (on the reduced primal `P3` or the slack-form dual `D3`),
//! - affine scaling (on `P3` or the phase-1 program `D4'`),
//! - an infeasible-start primal-dual method (on `P3`/`D5` or `D4'`/`P4'`).
//!
//! The reduced primal is fully degenerate, so any feasible point with a
//! negative objective already proves unboundedness; the interior-point
//! methods exploit that as an extra stopping rule, and closed-form interior
//! starting points remove the usual phase-1 solve. Verdicts always carry a
//! certificate (a witnessing pmf, or a sure-loss combination) that is
//! re-verified numerically before being returned.
//!
//! The [`gen`] module generates random gamble sets with known ground truth
//! for benchmarking, and [`checker::exact_oracle_asl`] decides small
//! instances in exact rational arithmetic as an independent reference.
//!
//! ```
//! use sureloss::{avoids_sure_loss, Formulation, GambleSet, Method, MethodChoice};
//!
//! let d: GambleSet =
//!     serde_json::from_str(r#"{"outcomes": ["a", "b"], "gambles": [[1.0, -2.0], [-1.0, 2.0]]}"#)
//!         .unwrap();
//! let choice = MethodChoice::new(Method::PrimalDual, Formulation::P3).unwrap();
//! let verdict = avoids_sure_loss(&d, &choice).unwrap();
//! assert!(verdict.avoids);
//! ```

pub mod checker;
pub mod error;
pub mod gambles;
pub mod gen;
pub mod lp;
pub mod solvers;

pub use nalgebra;

pub use checker::{
    avoids_sure_loss, exact_oracle_asl, lower_natural_extension, snap_to_rationals,
    upper_natural_extension, AslVerdict, Certificate, Formulation, Method, MethodChoice,
};
pub use error::{Error, Result};
pub use gambles::{expectation, Gamble, GambleSet, LowerPrevision, OutcomeSpace, Pmf};
pub use gen::{Bias, GenSpec, RngStream};
pub use lp::{StandardLp, StartPoint};
pub use solvers::{SolveOutcome, SolveStatus, SolverOptions};
