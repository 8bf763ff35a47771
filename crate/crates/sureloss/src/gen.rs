//! Random-instance generators with known ground truth, for benchmarking and
//! testing.
//!
//! Consistent sets come from sampling payoffs uniformly and subtracting a
//! coherent lower prevision's value (optionally re-adding a positive bias,
//! which drops coherence but keeps consistency). Inconsistent sets extend a
//! consistent set by one gamble priced just above its upper natural
//! extension, which makes them the hardest kind to detect: exactly one
//! gamble violates consistency.
//!
//! All draws go through [`RngStream`], a (seed, stream) pair that
//! reproduces bitwise-identical instances regardless of host or thread
//! count; parallel grids split disjoint child streams instead of sharing a
//! sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::checker::{lower_natural_extension, upper_natural_extension};
use crate::error::{Error, Result};
use crate::gambles::{Gamble, GambleSet, LowerPrevision, OutcomeSpace, Pmf};

/// A reproducible random source: a base seed plus a stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer.
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// The generator for this stream. Calling twice replays the sequence.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// A child stream independent of this one and of any sibling with a
    /// different tag.
    pub fn split(&self, tag: u64) -> RngStream {
        RngStream { seed: self.seed, stream_id: mix(self.stream_id ^ mix(tag)) }
    }
}

/// Per-gamble positive bias added after subtracting the prevision value.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bias {
    /// No bias: the generated set sits exactly on the prevision.
    None,
    /// Uniform draw from (0, 1) per gamble.
    Uniform,
    /// Fixed bias per gamble.
    Constant(f64),
}

/// Sizes and knobs for instance generation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GenSpec {
    pub n_outcomes: usize,
    pub n_gambles: usize,
    /// Number of previsions enveloped by the polyhedral lower prevision.
    pub k_previsions: usize,
    /// Mixing/pricing parameter; what it means depends on the generator.
    pub delta: f64,
    pub bias: Bias,
}

impl GenSpec {
    pub fn new(n_outcomes: usize, n_gambles: usize) -> Self {
        Self { n_outcomes, n_gambles, k_previsions: 32, delta: 0.05, bias: Bias::None }
    }

    pub fn with_bias(mut self, bias: Bias) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k_previsions = k;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_outcomes < 2 {
            return Err(Error::InvalidParameter {
                name: "n_outcomes",
                reason: "need at least two outcomes".into(),
            });
        }
        if self.n_gambles < 1 {
            return Err(Error::InvalidParameter {
                name: "n_gambles",
                reason: "need at least one gamble".into(),
            });
        }
        if self.k_previsions < 1 {
            return Err(Error::InvalidParameter {
                name: "k_previsions",
                reason: "need at least one prevision".into(),
            });
        }
        Ok(())
    }
}

/// Uniform draw from the open interval (0, 1): endpoint values are
/// rejected and redrawn.
fn uniform_open(rng: &mut ChaCha12Rng) -> f64 {
    loop {
        let v: f64 = rng.gen();
        if v > 0.0 && v < 1.0 {
            return v;
        }
    }
}

/// Turns positive uniform draws into a pmf via the log-ratio construction
/// `p_i = ln r_i / sum_j ln r_j`.
pub fn pmf_from_draws(draws: &[f64]) -> Result<Pmf> {
    let logs: Vec<f64> = draws.iter().map(|&r| r.ln()).collect();
    let total: f64 = logs.iter().sum();
    Pmf::new(logs.into_iter().map(|l| l / total).collect())
}

/// Samples a pmf: uniform draws from (0, 1), normalized log-ratios.
pub fn gen_pmf(stream: &RngStream, m: usize) -> Result<Pmf> {
    if m < 1 {
        return Err(Error::InvalidParameter { name: "m", reason: "need an outcome".into() });
    }
    let mut rng = stream.rng();
    let draws: Vec<f64> = (0..m).map(|_| uniform_open(&mut rng)).collect();
    pmf_from_draws(&draws)
}

/// Samples a coherent prevision (an expectation operator).
pub fn gen_prevision(stream: &RngStream, m: usize) -> Result<LowerPrevision> {
    Ok(LowerPrevision::Prevision(gen_pmf(stream, m)?))
}

/// Samples a polyhedral lower prevision: the lower envelope of `k`
/// independent previsions, one per child stream.
pub fn gen_polyhedral(stream: &RngStream, m: usize, k: usize) -> Result<LowerPrevision> {
    if k < 1 {
        return Err(Error::InvalidParameter { name: "k", reason: "need a prevision".into() });
    }
    let pmfs = (0..k)
        .map(|j| gen_pmf(&stream.split(j as u64), m))
        .collect::<Result<Vec<_>>>()?;
    LowerPrevision::polyhedral(pmfs)
}

/// Samples a linear-vacuous mixture with the given `delta` in (0, 1).
pub fn gen_linear_vacuous(stream: &RngStream, m: usize, delta: f64) -> Result<LowerPrevision> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("{delta} not in (0, 1)"),
        });
    }
    LowerPrevision::linear_vacuous(gen_pmf(stream, m)?, delta)
}

/// Generates a consistent set: payoffs drawn uniformly from (0, 1), shifted
/// down by the lower prevision's value and up by the per-gamble bias. With
/// nonnegative bias, every expectation bound stays satisfied, so the output
/// avoids sure loss by construction.
pub fn gen_asl_set(stream: &RngStream, spec: &GenSpec, lp: &LowerPrevision) -> Result<GambleSet> {
    spec.validate()?;
    let mut rng = stream.rng();
    let n = spec.n_gambles;
    let m = spec.n_outcomes;
    let raw: Vec<Gamble> = (0..n)
        .map(|_| Gamble::new((0..m).map(|_| uniform_open(&mut rng)).collect()))
        .collect::<Result<Vec<_>>>()?;
    // Bias draws happen after all payoff draws, so switching the bias mode
    // leaves the underlying payoffs untouched.
    let biases: Vec<f64> = match spec.bias {
        Bias::None => vec![0.0; n],
        Bias::Constant(eta) => {
            if eta <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "bias",
                    reason: format!("constant bias {eta} must be positive"),
                });
            }
            vec![eta; n]
        }
        Bias::Uniform => (0..n).map(|_| uniform_open(&mut rng)).collect(),
    };
    let gambles = raw
        .into_iter()
        .zip(biases)
        .map(|(f, eta)| {
            let value = lp.evaluate(&f)?;
            f.shifted(eta - value)
        })
        .collect::<Result<Vec<_>>>()?;
    GambleSet::new(OutcomeSpace::indexed(m)?, gambles)
}

/// Extends a consistent set by one gamble priced strictly above its upper
/// natural extension, producing a set that does not avoid sure loss and in
/// which only the added gamble violates consistency.
pub fn gen_non_asl_set(stream: &RngStream, e: &GambleSet, delta: f64) -> Result<GambleSet> {
    if delta <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("{delta} must be positive"),
        });
    }
    let mut rng = stream.rng();
    let g = Gamble::new((0..e.n_outcomes()).map(|_| uniform_open(&mut rng)).collect())?;
    let beta = upper_natural_extension(e, &g)?;
    e.with_gamble(g.shifted(-beta - delta)?)
}

/// Adds a gamble priced strictly between its natural-extension bounds, so
/// the larger set still avoids sure loss. `delta = 0` sits on the lower
/// boundary of the admissible range and is allowed.
pub fn extend_asl_set(stream: &RngStream, e: &GambleSet, delta: f64) -> Result<GambleSet> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("{delta} not in [0, 1)"),
        });
    }
    let mut rng = stream.rng();
    let g = Gamble::new((0..e.n_outcomes()).map(|_| uniform_open(&mut rng)).collect())?;
    let upper = upper_natural_extension(e, &g)?;
    let lower = lower_natural_extension(e, &g)?;
    if lower > upper + 1e-9 {
        return Err(Error::InvalidParameter {
            name: "e",
            reason: format!("extension bounds are inverted: {lower} > {upper}"),
        });
    }
    let price = ((1.0 - delta) * lower + delta * upper).clamp(lower.min(upper), upper.max(lower));
    e.with_gamble(g.shifted(-price)?)
}

const ROLE_PREVISIONS: u64 = 0x70726576;
const ROLE_PAYOFFS: u64 = 0x7061796f;
const ROLE_EXTENSION: u64 = 0x65787467;

/// Full pipeline for a consistent benchmark instance: `k` previsions,
/// their polyhedral envelope, then the shifted uniform payoffs.
pub fn gen_asl_instance(stream: &RngStream, spec: &GenSpec) -> Result<GambleSet> {
    spec.validate()?;
    let envelope = gen_polyhedral(&stream.split(ROLE_PREVISIONS), spec.n_outcomes, spec.k_previsions)?;
    gen_asl_set(&stream.split(ROLE_PAYOFFS), spec, &envelope)
}

/// Full pipeline for an inconsistent benchmark instance with exactly
/// `spec.n_gambles` gambles: a consistent set one gamble short, extended by
/// an overpriced gamble with margin `spec.delta`.
pub fn gen_non_asl_instance(stream: &RngStream, spec: &GenSpec) -> Result<GambleSet> {
    if spec.n_gambles < 2 {
        return Err(Error::InvalidParameter {
            name: "n_gambles",
            reason: "an inconsistent instance needs at least two gambles".into(),
        });
    }
    let mut base = *spec;
    base.n_gambles = spec.n_gambles - 1;
    base.bias = Bias::None;
    let e = gen_asl_instance(stream, &base)?;
    gen_non_asl_set(&stream.split(ROLE_EXTENSION), &e, spec.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::exact_oracle_asl;
    use crate::gambles::expectation;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pmf_from_equal_draws_is_uniform() {
        let p = pmf_from_draws(&[0.37, 0.37, 0.37, 0.37]).unwrap();
        for &v in p.probs() {
            assert_abs_diff_eq!(v, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn pmf_from_known_logs() {
        let p = pmf_from_draws(&[(-1.0f64).exp(), (-3.0f64).exp()]).unwrap();
        assert_abs_diff_eq!(p.probs()[0], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(p.probs()[1], 0.75, epsilon = 1e-12);
    }

    #[test]
    fn pmf_coordinates_are_exchangeable() {
        // 100k draws at m = 3: each coordinate mean close to 1/3.
        let stream = RngStream::new(99, 0);
        let mut rng = stream.rng();
        let mut sums = [0.0f64; 3];
        let trials = 100_000;
        for _ in 0..trials {
            let draws: Vec<f64> = (0..3).map(|_| uniform_open(&mut rng)).collect();
            let p = pmf_from_draws(&draws).unwrap();
            for (s, &v) in sums.iter_mut().zip(p.probs()) {
                *s += v;
            }
        }
        for s in sums {
            assert_abs_diff_eq!(s / trials as f64, 1.0 / 3.0, epsilon = 0.01);
        }
    }

    #[test]
    fn prevision_matches_dot_product() {
        let stream = RngStream::new(5, 1);
        let lp = gen_prevision(&stream, 4).unwrap();
        let LowerPrevision::Prevision(p) = &lp else { panic!() };
        let mut rng = stream.split(1).rng();
        for _ in 0..100 {
            let f = Gamble::new((0..4).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            assert_abs_diff_eq!(
                lp.evaluate(&f).unwrap(),
                expectation(p, &f).unwrap(),
                epsilon = 1e-12
            );
        }
        let c = Gamble::new(vec![2.5; 4]).unwrap();
        assert_abs_diff_eq!(lp.evaluate(&c).unwrap(), 2.5, epsilon = 1e-12);
        let f = Gamble::new(vec![1.0, -0.5, 0.25, 2.0]).unwrap();
        let neg = Gamble::new(f.values().iter().map(|v| -v).collect()).unwrap();
        assert_abs_diff_eq!(
            lp.evaluate(&f).unwrap() + lp.evaluate(&neg).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn polyhedral_is_an_envelope() {
        let stream = RngStream::new(17, 3);
        let lp = gen_polyhedral(&stream, 3, 5).unwrap();
        let LowerPrevision::Polyhedral(pmfs) = &lp else { panic!() };
        assert_eq!(pmfs.len(), 5);
        let mut rng = stream.split(1234).rng();
        for _ in 0..50 {
            let f = Gamble::new((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let e = lp.evaluate(&f).unwrap();
            for p in pmfs {
                assert!(e <= expectation(p, &f).unwrap() + 1e-12);
            }
        }
        // k = 1 degenerates to a single prevision.
        let single = gen_polyhedral(&stream, 3, 1).unwrap();
        let direct = gen_prevision(&stream.split(0), 3).unwrap();
        let f = Gamble::new(vec![0.3, -0.6, 0.1]).unwrap();
        assert_abs_diff_eq!(
            single.evaluate(&f).unwrap(),
            direct.evaluate(&f).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn linear_vacuous_properties() {
        let stream = RngStream::new(23, 9);
        let lv = gen_linear_vacuous(&stream, 3, 1e-12).unwrap();
        let prevision = gen_prevision(&stream, 3).unwrap();
        let f = Gamble::new(vec![0.4, -0.8, 0.2]).unwrap();
        assert_abs_diff_eq!(
            lv.evaluate(&f).unwrap(),
            prevision.evaluate(&f).unwrap(),
            epsilon = 1e-9
        );
        let c = Gamble::new(vec![1.25; 3]).unwrap();
        let lv_half = gen_linear_vacuous(&stream, 3, 0.5).unwrap();
        assert_abs_diff_eq!(lv_half.evaluate(&c).unwrap(), 1.25, epsilon = 1e-12);
        assert!(gen_linear_vacuous(&stream, 3, 0.0).is_err());
        assert!(gen_linear_vacuous(&stream, 3, 1.0).is_err());
    }

    #[test]
    fn asl_sets_pass_the_oracle() {
        for seed in 0..20 {
            let stream = RngStream::new(seed, 100);
            let spec = GenSpec::new(4, 5);
            let d = gen_asl_instance(&stream, &spec).unwrap();
            assert!(exact_oracle_asl(&d).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn asl_set_values_sit_on_the_bias() {
        let stream = RngStream::new(3, 7);
        let spec = GenSpec::new(3, 4).with_bias(Bias::Constant(0.01));
        let envelope = gen_polyhedral(&stream.split(0), 3, 8).unwrap();
        let d = gen_asl_set(&stream.split(1), &spec, &envelope).unwrap();
        for g in d.gambles() {
            let v = envelope.evaluate(g).unwrap();
            assert_abs_diff_eq!(v, 0.01, epsilon = 1e-9);
            assert!(g.max() >= 0.0);
        }
    }

    #[test]
    fn non_asl_sets_fail_the_oracle_and_culprit_removal_restores() {
        for seed in 0..20 {
            let stream = RngStream::new(seed, 200);
            let spec = GenSpec::new(4, 5).with_delta(0.05);
            let d = gen_non_asl_instance(&stream, &spec).unwrap();
            assert!(!exact_oracle_asl(&d).unwrap(), "seed {seed}");
            // The added gamble is the last one and the only inconsistent
            // member: dropping it leaves the consistent base set, so every
            // violating combination must give it positive weight.
            let culprit = d.len() - 1;
            assert!(exact_oracle_asl(&d.without(culprit).unwrap()).unwrap());
            let choice =
                crate::checker::MethodChoice::new(crate::checker::Method::Simplex, crate::checker::Formulation::D3)
                    .unwrap();
            let v = crate::checker::avoids_sure_loss(&d, &choice).unwrap();
            let crate::checker::Certificate::SureLossWitness { lambda, .. } = v.certificate else {
                panic!("expected a sure-loss witness")
            };
            assert!(lambda[culprit] > 0.0, "violations must use the added gamble");
        }
    }

    #[test]
    fn negated_margin_restores_consistency() {
        let stream = RngStream::new(41, 300);
        let spec = GenSpec::new(3, 4);
        let e = gen_asl_instance(&stream, &spec).unwrap();
        let bad = gen_non_asl_set(&stream.split(9), &e, 0.05).unwrap();
        assert!(!exact_oracle_asl(&bad).unwrap());
        // Same draw, margin flipped to -delta: price beta - 0.05 is below
        // the upper extension, so the set stays consistent.
        let mut rng = stream.split(9).rng();
        let g = Gamble::new((0..3).map(|_| uniform_open(&mut rng)).collect()).unwrap();
        let beta = upper_natural_extension(&e, &g).unwrap();
        let good = e.with_gamble(g.shifted(-beta + 0.05).unwrap()).unwrap();
        assert!(exact_oracle_asl(&good).unwrap());
    }

    #[test]
    fn extended_sets_stay_consistent() {
        for seed in 0..10 {
            let stream = RngStream::new(seed, 400);
            let spec = GenSpec::new(3, 3);
            let e = gen_asl_instance(&stream, &spec).unwrap();
            for delta in [0.0, 0.3, 0.9] {
                let d = extend_asl_set(&stream.split(5), &e, delta).unwrap();
                assert!(exact_oracle_asl(&d).unwrap(), "seed {seed} delta {delta}");
            }
        }
    }

    #[test]
    fn streams_are_reproducible_and_split() {
        let spec = GenSpec::new(4, 6);
        let a = gen_asl_instance(&RngStream::new(7, 42), &spec).unwrap();
        let b = gen_asl_instance(&RngStream::new(7, 42), &spec).unwrap();
        assert_eq!(a, b);
        let c = gen_asl_instance(&RngStream::new(7, 43), &spec).unwrap();
        assert_ne!(a, c);
        let s = RngStream::new(7, 42);
        assert_ne!(s.split(0), s.split(1));
        assert_eq!(s.split(3), s.split(3));
    }

    #[test]
    fn credal_inclusion_for_polyhedral_sources() {
        // Every pmf spanning the envelope satisfies all expectation
        // constraints of the generated set.
        for seed in 0..10 {
            let stream = RngStream::new(seed, 500);
            let spec = GenSpec::new(4, 6);
            let envelope = gen_polyhedral(&stream.split(0), 4, 8).unwrap();
            let d = gen_asl_set(&stream.split(1), &spec, &envelope).unwrap();
            let LowerPrevision::Polyhedral(pmfs) = &envelope else { panic!() };
            for p in pmfs {
                for g in d.gambles() {
                    assert!(expectation(p, g).unwrap() >= -1e-9);
                }
            }
        }
    }
}
