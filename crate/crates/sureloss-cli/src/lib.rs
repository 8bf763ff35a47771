//! Benchmark harness behind the `sureloss` command line: timed grids of
//! consistency checks over generated instances, CSV records, and SVG
//! comparison plots.

pub mod bench;
pub mod plots;

pub use bench::{
    instance, instance_stream, run_grid, time_check, BenchPlan, BenchRecord, CellSummary,
    GridSummary, Truth, TruthFilter,
};
pub use plots::emit_plots;
