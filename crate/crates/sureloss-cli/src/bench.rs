//! Benchmark harness: timed consistency checks over a grid of instance
//! sizes, with CSV records and per-cell summary statistics.
//!
//! The grid runs `|D| = 2^i` by `|O| = 2^j` cells. Each cell generates
//! `reps` instances with known ground truth (consistent sets from the
//! polyhedral-envelope pipeline with 32 previsions; inconsistent ones by
//! overpricing one extra gamble with margin 0.05) and times every
//! configured method on each instance. A verdict that contradicts the
//! ground truth aborts the run with the offending seed: timings of wrong
//! answers are worthless.
//!
//! Every check runs twice and only the second run is timed, which removes
//! warm-up effects (allocator, caches). Cells execute sequentially so the
//! timings do not contend with each other.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::time::Instant;
use sureloss::gen::{gen_asl_instance, gen_non_asl_instance, GenSpec, RngStream};
use sureloss::{avoids_sure_loss, GambleSet, MethodChoice};

/// Ground-truth label of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    Asl,
    NotAsl,
}

impl Truth {
    pub fn as_str(&self) -> &'static str {
        match self {
            Truth::Asl => "asl",
            Truth::NotAsl => "not_asl",
        }
    }

    fn tag(&self) -> u64 {
        match self {
            Truth::Asl => 1,
            Truth::NotAsl => 2,
        }
    }
}

/// Which ground truths a plan covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthFilter {
    Asl,
    NotAsl,
    Both,
}

impl TruthFilter {
    pub fn truths(&self) -> Vec<Truth> {
        match self {
            TruthFilter::Asl => vec![Truth::Asl],
            TruthFilter::NotAsl => vec![Truth::NotAsl],
            TruthFilter::Both => vec![Truth::Asl, Truth::NotAsl],
        }
    }
}

/// A benchmark plan: exponent ranges, repetitions, truths, methods, seed.
#[derive(Debug, Clone)]
pub struct BenchPlan {
    /// `|D| = 2^i` for `i` in this range.
    pub i_range: RangeInclusive<u32>,
    /// `|O| = 2^j` for `j` in this range.
    pub j_range: RangeInclusive<u32>,
    pub reps: usize,
    pub truth: TruthFilter,
    pub methods: Vec<MethodChoice>,
    pub seed: u64,
}

impl BenchPlan {
    /// Desk-scale default: up to 64 gambles and 64 outcomes, 50 repetitions.
    /// Finishes in minutes.
    pub fn desk(seed: u64) -> Self {
        Self {
            i_range: 1..=6,
            j_range: 1..=6,
            reps: 50,
            truth: TruthFilter::Both,
            methods: MethodChoice::all(),
            seed,
        }
    }

    /// Full grid: up to 256 gambles and 256 outcomes, 1000 repetitions.
    /// Expect hours.
    pub fn full(seed: u64) -> Self {
        Self {
            i_range: 1..=8,
            j_range: 1..=8,
            reps: 1000,
            truth: TruthFilter::Both,
            methods: MethodChoice::all(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.i_range.is_empty() || self.j_range.is_empty() {
            bail!("empty exponent range");
        }
        if self.reps == 0 {
            bail!("reps must be at least 1");
        }
        if self.methods.is_empty() {
            bail!("no methods configured");
        }
        Ok(())
    }
}

/// One timed check. Column order is the CSV schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: String,
    pub formulation: String,
    pub n_gambles: usize,
    pub n_outcomes: usize,
    pub ground_truth: String,
    pub rep_index: usize,
    pub seed: u64,
    pub verdict: String,
    pub agree_with_truth: bool,
    pub wall_time_ns: u64,
    pub iterations: usize,
    pub status: String,
}

/// Runs the check twice and records the verdict and wall time of the second
/// run only. Grid bookkeeping fields (ground truth, rep index, seed) are
/// filled in by [`run_grid`].
pub fn time_check(d: &GambleSet, choice: &MethodChoice) -> Result<BenchRecord> {
    let warmup = avoids_sure_loss(d, choice).context("warm-up run failed")?;
    let clock = Instant::now();
    let verdict = avoids_sure_loss(d, choice).context("timed run failed")?;
    let wall_time_ns = clock.elapsed().as_nanos() as u64;
    debug_assert_eq!(warmup.avoids, verdict.avoids);
    Ok(BenchRecord {
        method: choice.method.to_string(),
        formulation: choice.formulation.to_string(),
        n_gambles: d.len(),
        n_outcomes: d.n_outcomes(),
        ground_truth: String::new(),
        rep_index: 0,
        seed: 0,
        verdict: if verdict.avoids { "asl" } else { "not_asl" }.to_string(),
        agree_with_truth: true,
        wall_time_ns,
        iterations: verdict.diagnostics.iterations,
        status: verdict.diagnostics.status.to_string(),
    })
}

/// Per-cell aggregate: mean wall time and approximate 95% confidence
/// interval (`1.96 * sd / sqrt(reps)`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSummary {
    pub method: String,
    pub formulation: String,
    pub n_gambles: usize,
    pub n_outcomes: usize,
    pub ground_truth: String,
    pub reps: usize,
    pub mean_ns: f64,
    pub ci95_ns: f64,
}

/// Everything a grid run produces.
#[derive(Debug, Clone)]
pub struct GridSummary {
    pub records_path: PathBuf,
    pub summary_path: PathBuf,
    pub n_records: usize,
    pub cells: Vec<CellSummary>,
}

/// The stream feeding the instance of one grid slot.
pub fn instance_stream(seed: u64, i: u32, j: u32, truth: Truth, rep: usize) -> RngStream {
    RngStream::new(seed, 0)
        .split(u64::from(i))
        .split(u64::from(j))
        .split(truth.tag())
        .split(rep as u64)
}

/// Generates the instance of one grid slot: `2^i` gambles on `2^j`
/// outcomes with the plan's ground truth.
pub fn instance(seed: u64, i: u32, j: u32, truth: Truth, rep: usize) -> Result<GambleSet> {
    let stream = instance_stream(seed, i, j, truth, rep);
    let spec = GenSpec::new(1 << j, 1 << i);
    let d = match truth {
        Truth::Asl => gen_asl_instance(&stream, &spec),
        Truth::NotAsl => gen_non_asl_instance(&stream, &spec),
    }
    .with_context(|| format!("generating instance i={i} j={j} truth={} rep={rep}", truth.as_str()))?;
    Ok(d)
}

/// Runs the plan, appending records to `records.csv` and cell summaries to
/// `summary.csv` under `out_dir`. Any verdict/ground-truth disagreement
/// aborts with the offending cell and seed.
pub fn run_grid(plan: &BenchPlan, out_dir: &Path) -> Result<GridSummary> {
    plan.validate()?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let records_path = out_dir.join("records.csv");
    let summary_path = out_dir.join("summary.csv");
    let mut writer = csv::Writer::from_path(&records_path)
        .with_context(|| format!("opening {}", records_path.display()))?;

    // Key: (method, formulation, n_gambles, n_outcomes, truth) in plan order.
    let mut samples: std::collections::BTreeMap<(String, String, usize, usize, String), Vec<u64>> =
        std::collections::BTreeMap::new();
    let mut n_records = 0usize;

    for i in plan.i_range.clone() {
        for j in plan.j_range.clone() {
            for truth in plan.truth.truths() {
                for rep in 0..plan.reps {
                    let d = instance(plan.seed, i, j, truth, rep)?;
                    for choice in &plan.methods {
                        let mut record = time_check(&d, choice).with_context(|| {
                            format!(
                                "cell i={i} j={j} truth={} rep={rep} method={}",
                                truth.as_str(),
                                choice.label()
                            )
                        })?;
                        record.ground_truth = truth.as_str().to_string();
                        record.rep_index = rep;
                        record.seed = plan.seed;
                        record.agree_with_truth = record.verdict == record.ground_truth;
                        if !record.agree_with_truth {
                            bail!(
                                "verdict disagrees with ground truth: seed={} i={i} j={j} \
                                 truth={} rep={rep} method={} verdict={}",
                                plan.seed,
                                truth.as_str(),
                                choice.label(),
                                record.verdict
                            );
                        }
                        samples
                            .entry((
                                record.method.clone(),
                                record.formulation.clone(),
                                record.n_gambles,
                                record.n_outcomes,
                                record.ground_truth.clone(),
                            ))
                            .or_default()
                            .push(record.wall_time_ns);
                        writer.serialize(&record)?;
                        n_records += 1;
                    }
                }
            }
        }
    }
    writer.flush()?;

    let mut cells = Vec::new();
    let mut summary_writer = csv::Writer::from_path(&summary_path)
        .with_context(|| format!("opening {}", summary_path.display()))?;
    for ((method, formulation, n_gambles, n_outcomes, ground_truth), times) in samples {
        let cell = CellSummary {
            method,
            formulation,
            n_gambles,
            n_outcomes,
            ground_truth,
            reps: times.len(),
            mean_ns: mean(&times),
            ci95_ns: ci95(&times),
        };
        summary_writer.serialize(&cell)?;
        cells.push(cell);
    }
    summary_writer.flush()?;

    Ok(GridSummary { records_path, summary_path, n_records, cells })
}

pub(crate) fn mean(times: &[u64]) -> f64 {
    if times.is_empty() {
        return 0.0;
    }
    times.iter().map(|&t| t as f64).sum::<f64>() / times.len() as f64
}

pub(crate) fn ci95(times: &[u64]) -> f64 {
    if times.len() < 2 {
        return 0.0;
    }
    let m = mean(times);
    let var = times.iter().map(|&t| (t as f64 - m).powi(2)).sum::<f64>() / (times.len() - 1) as f64;
    1.96 * var.sqrt() / (times.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sureloss::{Formulation, Method};

    #[test]
    fn time_check_is_consistent_and_positive() {
        let d = instance(11, 2, 2, Truth::Asl, 0).unwrap();
        let choice = MethodChoice::new(Method::PrimalDual, Formulation::P3).unwrap();
        let a = time_check(&d, &choice).unwrap();
        let b = time_check(&d, &choice).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.verdict, "asl");
        assert!(a.wall_time_ns > 0);
    }

    #[test]
    fn grid_record_count_and_determinism() {
        let methods: Vec<MethodChoice> = MethodChoice::all().into_iter().take(5).collect();
        let plan = BenchPlan {
            i_range: 1..=2,
            j_range: 1..=2,
            reps: 3,
            truth: TruthFilter::Both,
            methods,
            seed: 21,
        };
        let dir = tempfile::tempdir().unwrap();
        let first = run_grid(&plan, &dir.path().join("a")).unwrap();
        // 2 i-values x 2 j-values x 2 truths x 3 reps x 5 methods.
        assert_eq!(first.n_records, 120);

        let second = run_grid(&plan, &dir.path().join("b")).unwrap();
        let strip = |path: &Path| {
            let text = fs::read_to_string(path).unwrap();
            text.lines()
                .map(|line| {
                    let cols: Vec<&str> = line.split(',').collect();
                    let mut kept = cols.clone();
                    kept.remove(9); // wall_time_ns
                    kept.join(",")
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&first.records_path), strip(&second.records_path));
    }

    #[test]
    fn stats_formulas() {
        assert_eq!(mean(&[1, 2, 3]), 2.0);
        let ci = ci95(&[10, 20, 30]);
        // sd = 10, n = 3: 1.96 * 10 / sqrt(3).
        assert!((ci - 1.96 * 10.0 / 3.0f64.sqrt()).abs() < 1e-9);
        assert_eq!(ci95(&[5]), 0.0);
    }
}
