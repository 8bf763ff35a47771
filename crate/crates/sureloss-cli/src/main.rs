//! Command-line interface: check a gamble set for consistency, generate
//! random instances with known ground truth, run the benchmark grid, and
//! solve dumped LPs for debugging.
//!
//! Exit codes for `check`: 0 when the set avoids sure loss, 1 when it does
//! not, 2 on any error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sureloss::gen::{gen_asl_instance, gen_non_asl_instance, GenSpec, RngStream};
use sureloss::lp::{start_point_p3, StandardLp, StartPoint, VarBlock};
use sureloss::solvers::{affine_scaling, primal_dual, revised_simplex, SolveOutcome, SolverOptions};
use sureloss::{avoids_sure_loss, Bias, Certificate, Formulation, GambleSet, Method, MethodChoice};
use sureloss_cli::{emit_plots, run_grid, BenchPlan, TruthFilter};

#[derive(Parser)]
#[command(name = "sureloss", version, about = "Check whether sets of desirable gambles avoid sure loss")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Simplex,
    AffineScaling,
    PrimalDual,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Simplex => Method::Simplex,
            MethodArg::AffineScaling => Method::AffineScaling,
            MethodArg::PrimalDual => Method::PrimalDual,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    P3,
    D3,
    D4prime,
}

impl From<FormulationArg> for Formulation {
    fn from(f: FormulationArg) -> Self {
        match f {
            FormulationArg::P3 => Formulation::P3,
            FormulationArg::D3 => Formulation::D3,
            FormulationArg::D4prime => Formulation::D4Prime,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TruthArg {
    Asl,
    NotAsl,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum BiasArg {
    None,
    Uniform,
    Constant,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Desk,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the gamble set in a JSON file avoids sure loss.
    Check {
        /// JSON file: {"outcomes": [...], "gambles": [[...], ...]}.
        file: PathBuf,
        #[arg(long, value_enum, default_value = "primal-dual")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "p3")]
        formulation: FormulationArg,
    },
    /// Generate a random gamble set with known ground truth.
    Gen {
        #[arg(long)]
        outcomes: usize,
        #[arg(long)]
        gambles: usize,
        #[arg(long, value_enum, default_value = "asl")]
        truth: TruthArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stream id, for drawing several independent instances per seed.
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Previsions enveloped by the generated polyhedral lower prevision.
        #[arg(long, default_value_t = 32)]
        k: usize,
        /// Overpricing margin for inconsistent instances.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, value_enum, default_value = "none")]
        bias: BiasArg,
        /// Bias size when --bias constant.
        #[arg(long, default_value_t = 0.01)]
        bias_value: f64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the timing grid and write CSV records, summaries, and plots.
    Bench {
        #[arg(long, value_enum, default_value = "desk")]
        preset: PresetArg,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the smallest gamble exponent (|D| = 2^i).
        #[arg(long)]
        i_min: Option<u32>,
        /// Override the largest gamble exponent.
        #[arg(long)]
        i_max: Option<u32>,
        /// Override the smallest outcome exponent (|O| = 2^j).
        #[arg(long)]
        j_min: Option<u32>,
        /// Override the largest outcome exponent.
        #[arg(long)]
        j_max: Option<u32>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        truth: TruthArg,
        /// Skip SVG emission.
        #[arg(long)]
        no_plots: bool,
    },
    /// Solve a dumped LP (debug tool).
    Solve {
        /// Plain-text LP listing produced by the library's dump format.
        file: PathBuf,
        #[arg(long, value_enum, default_value = "primal-dual")]
        method: MethodArg,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Check { file, method, formulation } => check(&file, method.into(), formulation.into()),
        Command::Gen { outcomes, gambles, truth, seed, stream, k, delta, bias, bias_value, out } => {
            generate(outcomes, gambles, truth, seed, stream, k, delta, bias, bias_value, out.as_deref())
        }
        Command::Bench { preset, out, seed, i_min, i_max, j_min, j_max, reps, truth, no_plots } => {
            bench(preset, &out, seed, i_min, i_max, j_min, j_max, reps, truth, no_plots)
        }
        Command::Solve { file, method } => solve(&file, method.into()),
    }
}

fn diagnostics_json(out: &SolveOutcome) -> serde_json::Value {
    serde_json::json!({
        "status": out.status.to_string(),
        "objective": out.objective,
        "iterations": out.iterations,
        "primal_residual_inf": out.primal_residual_inf,
        "dual_residual_inf": out.dual_residual_inf,
        "duality_gap": out.duality_gap,
        "wall_time_ns": out.wall_time_ns,
    })
}

fn check(file: &std::path::Path, method: Method, formulation: Formulation) -> Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let d: GambleSet = serde_json::from_str(&text).context("parsing gamble set")?;
    let choice = MethodChoice::new(method, formulation)?;
    let verdict = avoids_sure_loss(&d, &choice)?;
    let certificate = match &verdict.certificate {
        Certificate::AslWitness { p } => serde_json::json!({
            "type": "pmf",
            "p": p.probs(),
        }),
        Certificate::SureLossWitness { lambda, alpha } => serde_json::json!({
            "type": "sure_loss_combination",
            "lambda": lambda,
            "alpha": alpha,
        }),
    };
    let report = serde_json::json!({
        "avoids": verdict.avoids,
        "method": choice.method.to_string(),
        "formulation": choice.formulation.to_string(),
        "certificate": certificate,
        "diagnostics": diagnostics_json(&verdict.diagnostics),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if verdict.avoids { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[allow(clippy::too_many_arguments)]
fn generate(
    outcomes: usize,
    gambles: usize,
    truth: TruthArg,
    seed: u64,
    stream_id: u64,
    k: usize,
    delta: f64,
    bias: BiasArg,
    bias_value: f64,
    out: Option<&std::path::Path>,
) -> Result<ExitCode> {
    let bias = match bias {
        BiasArg::None => Bias::None,
        BiasArg::Uniform => Bias::Uniform,
        BiasArg::Constant => Bias::Constant(bias_value),
    };
    let spec = GenSpec::new(outcomes, gambles).with_k(k).with_delta(delta).with_bias(bias);
    let stream = RngStream::new(seed, stream_id);
    let (d, truth_name) = match truth {
        TruthArg::Asl => (gen_asl_instance(&stream, &spec)?, "asl"),
        TruthArg::NotAsl => (gen_non_asl_instance(&stream, &spec)?, "not_asl"),
        TruthArg::Both => bail!("gen needs --truth asl or --truth not-asl"),
    };
    let mut doc = serde_json::to_value(&d)?;
    doc.as_object_mut().expect("gamble set serializes to an object").insert(
        "header".to_string(),
        serde_json::json!({
            "seed": seed,
            "stream": stream_id,
            "spec": spec,
            "ground_truth": truth_name,
        }),
    );
    let text = serde_json::to_string_pretty(&doc)?;
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn bench(
    preset: PresetArg,
    out: &std::path::Path,
    seed: u64,
    i_min: Option<u32>,
    i_max: Option<u32>,
    j_min: Option<u32>,
    j_max: Option<u32>,
    reps: Option<usize>,
    truth: TruthArg,
    no_plots: bool,
) -> Result<ExitCode> {
    let mut plan = match preset {
        PresetArg::Desk => BenchPlan::desk(seed),
        PresetArg::Full => BenchPlan::full(seed),
    };
    plan.i_range = i_min.unwrap_or(*plan.i_range.start())..=i_max.unwrap_or(*plan.i_range.end());
    plan.j_range = j_min.unwrap_or(*plan.j_range.start())..=j_max.unwrap_or(*plan.j_range.end());
    if let Some(r) = reps {
        plan.reps = r;
    }
    plan.truth = match truth {
        TruthArg::Asl => TruthFilter::Asl,
        TruthArg::NotAsl => TruthFilter::NotAsl,
        TruthArg::Both => TruthFilter::Both,
    };
    let summary = run_grid(&plan, out)?;
    eprintln!(
        "wrote {} records to {} (summary: {})",
        summary.n_records,
        summary.records_path.display(),
        summary.summary_path.display()
    );
    if !no_plots {
        let plots = emit_plots(&summary.records_path, &out.join("plots"))?;
        eprintln!("wrote {} plots to {}", plots.len(), out.join("plots").display());
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(file: &std::path::Path, method: Method) -> Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let lp = StandardLp::parse_dump(&text)?;
    let opts = SolverOptions { early_negative: lp.meta.fully_degenerate, ..SolverOptions::default() };
    let out = match method {
        Method::Simplex => {
            let basis = lp
                .meta
                .initial_basis
                .clone()
                .context("the dump carries no BASIS line; the simplex needs one")?;
            revised_simplex(&lp, &basis, &opts, None)?
        }
        Method::AffineScaling => {
            let start = match lp.meta.kind {
                sureloss::lp::LpKind::P3 => start_point_p3(&lp, 1.0)?,
                _ => bail!("affine scaling on dumps is supported for P3 only; use primal-dual"),
            };
            affine_scaling(&lp, &start, &opts, None)?
        }
        Method::PrimalDual => {
            let start = match lp.meta.kind {
                sureloss::lp::LpKind::P3 => {
                    let primal = start_point_p3(&lp, 1.0)?;
                    let n = lp.meta.layout.range(VarBlock::Lambda).map_or(1, |r| r.len());
                    let dual = sureloss::lp::start_point_d5(n.max(1), lp.n_rows() + 1)?;
                    StartPoint::merged(&primal, &dual)
                }
                _ => StartPoint {
                    x: Some(sureloss::nalgebra::DVector::from_element(lp.n_cols(), 1.0)),
                    y: None,
                    t: Some(sureloss::nalgebra::DVector::from_element(lp.n_cols(), 1.0)),
                },
            };
            primal_dual(&lp, &start, &opts, None)?
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "kind": lp.meta.kind.to_string(),
            "rows": lp.n_rows(),
            "cols": lp.n_cols(),
            "outcome": diagnostics_json(&out),
        }))?
    );
    Ok(ExitCode::SUCCESS)
}
