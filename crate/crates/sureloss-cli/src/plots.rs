//! Static SVG comparison plots from benchmark records: mean wall time per
//! method over one size axis, with 95% confidence-interval error bars and a
//! base-2 logarithmic size axis.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::bench::{ci95, mean, BenchRecord};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// (series label) -> sorted (x size, mean ns, ci ns) triples.
type SeriesMap = BTreeMap<String, Vec<(usize, f64, f64)>>;

struct PlotSpec {
    file_name: String,
    title: String,
    x_label: String,
    series: SeriesMap,
}

/// Reads a records CSV produced by [`crate::bench::run_grid`] and writes
/// one SVG per (fixed gamble count, truth) with time against the number of
/// outcomes, and one per (fixed outcome count, truth) with time against the
/// number of gambles. Returns the written paths.
pub fn emit_plots(csv_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut reader = csv::Reader::from_path(csv_path)
        .with_context(|| format!("opening {}", csv_path.display()))?;
    let mut records: Vec<BenchRecord> = Vec::new();
    for row in reader.deserialize() {
        records.push(row.context("malformed benchmark CSV")?);
    }
    if records.is_empty() {
        bail!("no records in {}", csv_path.display());
    }
    fs::create_dir_all(out_dir)?;

    // cell key: (truth, label, n_gambles, n_outcomes) -> times
    let mut cells: BTreeMap<(String, String, usize, usize), Vec<u64>> = BTreeMap::new();
    for r in &records {
        let label = format!("{} x {}", r.method, r.formulation);
        cells
            .entry((r.ground_truth.clone(), label, r.n_gambles, r.n_outcomes))
            .or_default()
            .push(r.wall_time_ns);
    }

    let truths: Vec<String> = {
        let mut t: Vec<String> = records.iter().map(|r| r.ground_truth.clone()).collect();
        t.sort();
        t.dedup();
        t
    };
    let gamble_sizes: Vec<usize> = {
        let mut v: Vec<usize> = records.iter().map(|r| r.n_gambles).collect();
        v.sort();
        v.dedup();
        v
    };
    let outcome_sizes: Vec<usize> = {
        let mut v: Vec<usize> = records.iter().map(|r| r.n_outcomes).collect();
        v.sort();
        v.dedup();
        v
    };

    let mut specs: Vec<PlotSpec> = Vec::new();
    for truth in &truths {
        let truth_name = match truth.as_str() {
            "asl" => "consistent instances",
            "not_asl" => "inconsistent instances",
            other => other,
        };
        for &d in &gamble_sizes {
            let mut series: SeriesMap = BTreeMap::new();
            for ((t, label, ng, no), times) in &cells {
                if t == truth && *ng == d {
                    series.entry(label.clone()).or_default().push((*no, mean(times), ci95(times)));
                }
            }
            if series.values().any(|pts| pts.len() > 0) {
                specs.push(PlotSpec {
                    file_name: format!("{truth}_gambles{d}.svg"),
                    title: format!("{truth_name}, {d} gambles"),
                    x_label: "outcomes".to_string(),
                    series,
                });
            }
        }
        for &o in &outcome_sizes {
            let mut series: SeriesMap = BTreeMap::new();
            for ((t, label, ng, no), times) in &cells {
                if t == truth && *no == o {
                    series.entry(label.clone()).or_default().push((*ng, mean(times), ci95(times)));
                }
            }
            if series.values().any(|pts| pts.len() > 0) {
                specs.push(PlotSpec {
                    file_name: format!("{truth}_outcomes{o}.svg"),
                    title: format!("{truth_name}, {o} outcomes"),
                    x_label: "gambles".to_string(),
                    series,
                });
            }
        }
    }

    let mut written = Vec::new();
    for spec in specs {
        let path = out_dir.join(&spec.file_name);
        fs::write(&path, render(&spec)?)?;
        written.push(path);
    }
    Ok(written)
}

fn render(spec: &PlotSpec) -> Result<String> {
    let mut xs: Vec<usize> = Vec::new();
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for pts in spec.series.values() {
        for &(x, m, ci) in pts {
            xs.push(x);
            let lo = (m - ci).max(1.0);
            y_min = y_min.min(lo);
            y_max = y_max.max(m + ci);
        }
    }
    xs.sort();
    xs.dedup();
    if xs.is_empty() {
        bail!("empty plot {}", spec.file_name);
    }
    let y_lo = (y_min.log10() - 0.15).floor();
    let y_hi = (y_max.log10() + 0.15).ceil();
    let x_lo = (xs[0] as f64).log2();
    let x_hi = (xs[xs.len() - 1] as f64).log2().max(x_lo + 1.0);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let x_of = |v: usize| MARGIN_L + ((v as f64).log2() - x_lo) / (x_hi - x_lo) * plot_w;
    let y_of = |ns: f64| {
        let l = ns.max(1.0).log10();
        MARGIN_T + (y_hi - l) / (y_hi - y_lo) * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        spec.title
    );

    // Axes.
    let x0 = MARGIN_L;
    let x1 = MARGIN_L + plot_w;
    let y0 = MARGIN_T + plot_h;
    let y1 = MARGIN_T;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    for &x in &xs {
        let px = x_of(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px}" y1="{y0}" x2="{px}" y2="{}" stroke="black"/><text x="{px}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{x}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        );
    }
    let mut tick = y_lo as i64;
    while tick <= y_hi as i64 {
        let py = y_of(10f64.powi(tick as i32));
        if py >= y1 - 1.0 && py <= y0 + 1.0 {
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{py}" x2="{x0}" y2="{py}" stroke="black"/><text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                tick_label(tick)
            );
        }
        tick += 1;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{} (log scale)</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 14.0,
        spec.x_label
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 20 {})">mean time (log scale)</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );

    // Series with error bars, then the legend.
    for (idx, (label, pts)) in spec.series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut sorted = pts.clone();
        sorted.sort_by_key(|&(x, _, _)| x);
        let path: Vec<String> =
            sorted.iter().map(|&(x, m, _)| format!("{:.2},{:.2}", x_of(x), y_of(m))).collect();
        if path.len() > 1 {
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
                path.join(" ")
            );
        }
        for &(x, m, ci) in &sorted {
            let px = x_of(x);
            let _ = writeln!(
                svg,
                r#"<circle cx="{px:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                y_of(m)
            );
            if ci > 0.0 {
                let lo = y_of((m - ci).max(1.0));
                let hi = y_of(m + ci);
                let _ = writeln!(
                    svg,
                    r#"<line x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}" stroke="{color}" stroke-width="1.2"/><line x1="{:.2}" y1="{lo:.2}" x2="{:.2}" y2="{lo:.2}" stroke="{color}"/><line x1="{:.2}" y1="{hi:.2}" x2="{:.2}" y2="{hi:.2}" stroke="{color}"/>"#,
                    px - 3.0,
                    px + 3.0,
                    px - 3.0,
                    px + 3.0
                );
            }
        }
        let ly = MARGIN_T + 14.0 + idx as f64 * 18.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">{label}</text>"#,
            x1 + 10.0,
            x1 + 34.0,
            x1 + 40.0,
            ly + 4.0
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick_label(exp: i64) -> String {
    match exp {
        0..=2 => format!("{} ns", 10f64.powi(exp as i32)),
        3..=5 => format!("{} us", 10f64.powi(exp as i32 - 3)),
        6..=8 => format!("{} ms", 10f64.powi(exp as i32 - 6)),
        _ => format!("1e{exp} ns"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{run_grid, BenchPlan, TruthFilter};
    use sureloss::MethodChoice;

    #[test]
    fn plot_files_and_labels() {
        let plan = BenchPlan {
            i_range: 1..=2,
            j_range: 1..=2,
            reps: 2,
            truth: TruthFilter::Both,
            methods: MethodChoice::all(),
            seed: 5,
        };
        let dir = tempfile::tempdir().unwrap();
        let grid = run_grid(&plan, dir.path()).unwrap();
        let plots = emit_plots(&grid.records_path, &dir.path().join("plots")).unwrap();
        // 2 gamble sizes x 2 truths + 2 outcome sizes x 2 truths.
        assert_eq!(plots.len(), 8);
        let svg = fs::read_to_string(&plots[0]).unwrap();
        for choice in MethodChoice::all() {
            assert!(svg.contains(&choice.label()), "missing series {}", choice.label());
        }
    }

    #[test]
    fn empty_csv_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("records.csv");
        fs::write(
            &csv_path,
            "method,formulation,n_gambles,n_outcomes,ground_truth,rep_index,seed,verdict,agree_with_truth,wall_time_ns,iterations,status\n",
        )
        .unwrap();
        assert!(emit_plots(&csv_path, dir.path()).is_err());
    }
}
