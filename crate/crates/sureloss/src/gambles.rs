//! Domain types: outcome spaces, gambles, probability mass functions, and
//! lower previsions, together with their evaluation semantics.
//!
//! All types here are immutable values after construction and can be shared
//! freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for pmf normalization. Constructors renormalize when
/// the deviation from 1 is below this and reject otherwise.
pub const PMF_SUM_TOL: f64 = 1e-12;

/// A finite set of outcome labels with a fixed iteration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSpace {
    labels: Vec<String>,
}

impl OutcomeSpace {
    /// Builds an outcome space from distinct labels. Rejects empty and
    /// duplicated label lists.
    pub fn new<S: Into<String>>(labels: Vec<S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidOutcomeSpace { reason: "no outcomes".into() });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(Error::InvalidOutcomeSpace {
                    reason: format!("duplicate label {a:?}"),
                });
            }
        }
        Ok(Self { labels })
    }

    /// An outcome space with synthetic labels `w0..w{size-1}`, used by the
    /// random generators.
    pub fn indexed(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidOutcomeSpace { reason: "no outcomes".into() });
        }
        Ok(Self { labels: (0..size).map(|i| format!("w{i}")).collect() })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A bounded real-valued payoff function on a finite outcome space, stored
/// as one finite value per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamble {
    values: Vec<f64>,
}

impl Gamble {
    /// Builds a gamble, rejecting NaN and infinite payoffs.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest payoff over the outcomes.
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest payoff over the outcomes.
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The gamble shifted by a constant: `f + c` on every outcome.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Gamble::new(self.values.iter().map(|v| v + c).collect())
    }
}

/// An ordered set of gambles over a common outcome space. This is the object
/// whose consistency (avoiding sure loss) gets checked.
#[derive(Debug, Clone, PartialEq)]
pub struct GambleSet {
    space: OutcomeSpace,
    gambles: Vec<Gamble>,
}

/// Serialized form of [`GambleSet`]: exact field names are part of the JSON
/// interface (`{"outcomes": [...], "gambles": [[...], ...]}`).
#[derive(Serialize, Deserialize)]
struct GambleSetRepr {
    outcomes: Vec<String>,
    gambles: Vec<Vec<f64>>,
}

impl GambleSet {
    /// Builds a gamble set; every gamble must match the outcome-space
    /// dimension and the set must be nonempty.
    pub fn new(space: OutcomeSpace, gambles: Vec<Gamble>) -> Result<Self> {
        if gambles.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for g in &gambles {
            if g.len() != space.len() {
                return Err(Error::DimensionMismatch { expected: space.len(), got: g.len() });
            }
        }
        Ok(Self { space, gambles })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn gambles(&self) -> &[Gamble] {
        &self.gambles
    }

    /// Number of gambles in the set.
    pub fn len(&self) -> usize {
        self.gambles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gambles.is_empty()
    }

    /// Number of outcomes.
    pub fn n_outcomes(&self) -> usize {
        self.space.len()
    }

    /// Payoff of gamble `i` on outcome `w`.
    pub fn payoff(&self, i: usize, w: usize) -> f64 {
        self.gambles[i].values()[w]
    }

    /// A copy with gamble `i` removed. Errors when it would leave the set empty.
    pub fn without(&self, i: usize) -> Result<Self> {
        let mut gambles = self.gambles.clone();
        gambles.remove(i);
        GambleSet::new(self.space.clone(), gambles)
    }

    /// A copy with one gamble appended.
    pub fn with_gamble(&self, g: Gamble) -> Result<Self> {
        let mut gambles = self.gambles.clone();
        gambles.push(g);
        GambleSet::new(self.space.clone(), gambles)
    }
}

impl Serialize for GambleSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GambleSetRepr {
            outcomes: self.space.labels().to_vec(),
            gambles: self.gambles.iter().map(|g| g.values().to_vec()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GambleSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = GambleSetRepr::deserialize(deserializer)?;
        let space = OutcomeSpace::new(repr.outcomes).map_err(serde::de::Error::custom)?;
        let gambles = repr
            .gambles
            .into_iter()
            .map(Gamble::new)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        GambleSet::new(space, gambles).map_err(serde::de::Error::custom)
    }
}

/// A probability mass function on a finite outcome space: nonnegative
/// entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Builds a pmf. Entries must be nonnegative and sum to 1 within
    /// [`PMF_SUM_TOL`]; the stored entries are renormalized so they sum to 1
    /// exactly up to round-off.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf { reason: "empty".into() });
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPmf { reason: format!("entry {i} is {p}") });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PMF_SUM_TOL {
            return Err(Error::InvalidPmf { reason: format!("sum is {sum}") });
        }
        Ok(Self { probs: probs.into_iter().map(|p| p / sum).collect() })
    }

    /// The uniform pmf on `len` outcomes.
    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidPmf { reason: "empty".into() });
        }
        Ok(Self { probs: vec![1.0 / len as f64; len] })
    }

    /// All mass on outcome `w`.
    pub fn point_mass(len: usize, w: usize) -> Result<Self> {
        if w >= len {
            return Err(Error::DimensionMismatch { expected: len, got: w });
        }
        let mut probs = vec![0.0; len];
        probs[w] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Expectation of a gamble under a pmf: the dot product `sum_w p(w) f(w)`.
pub fn expectation(p: &Pmf, f: &Gamble) -> Result<f64> {
    if p.len() != f.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: f.len() });
    }
    Ok(p.probs().iter().zip(f.values()).map(|(p, v)| p * v).sum())
}

/// A lower prevision: a supremum-buying-price functional on gambles. The
/// variants cover the families produced by the random generators.
#[derive(Debug, Clone)]
pub enum LowerPrevision {
    /// A single expectation operator.
    Prevision(Pmf),
    /// Lower envelope of finitely many expectations; the credal set is the
    /// polytope spanned by the pmfs.
    Polyhedral(Vec<Pmf>),
    /// `(1 - delta) * E_p(f) + delta * min f`.
    LinearVacuous { pmf: Pmf, delta: f64 },
    /// `min f` for every gamble.
    Vacuous,
}

impl LowerPrevision {
    /// Builds a polyhedral lower prevision, rejecting an empty pmf list and
    /// mismatched pmf dimensions.
    pub fn polyhedral(pmfs: Vec<Pmf>) -> Result<Self> {
        match pmfs.first() {
            None => Err(Error::InvalidParameter {
                name: "pmfs",
                reason: "polyhedral lower prevision needs at least one pmf".into(),
            }),
            Some(first) => {
                let len = first.len();
                for p in &pmfs {
                    if p.len() != len {
                        return Err(Error::DimensionMismatch { expected: len, got: p.len() });
                    }
                }
                Ok(Self::Polyhedral(pmfs))
            }
        }
    }

    /// Builds a linear-vacuous mixture; `delta` must lie in `[0, 1]`.
    pub fn linear_vacuous(pmf: Pmf, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("{delta} not in [0, 1]"),
            });
        }
        Ok(Self::LinearVacuous { pmf, delta })
    }

    /// Evaluates the lower prevision on a gamble.
    pub fn evaluate(&self, f: &Gamble) -> Result<f64> {
        match self {
            Self::Prevision(p) => expectation(p, f),
            Self::Polyhedral(pmfs) => {
                let mut best = f64::INFINITY;
                for p in pmfs {
                    best = best.min(expectation(p, f)?);
                }
                Ok(best)
            }
            Self::LinearVacuous { pmf, delta } => {
                Ok((1.0 - delta) * expectation(pmf, f)? + delta * f.min())
            }
            Self::Vacuous => Ok(f.min()),
        }
    }
}
