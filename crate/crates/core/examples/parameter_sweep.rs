//! Iteration counts over g and h on the 128x128 U, written as CSV.
//!
//! `cargo run --release --example parameter_sweep`

use gvflow::pipeline::{run_sweep, sweep_csv, RunConfig, SweepGrid};

fn main() -> gvflow::error::Result<()> {
    let fixed = RunConfig::default();
    let along_g = SweepGrid {
        g: vec![0.2, 0.7, 1.0, 2.0],
        h: vec![0.01],
        ..Default::default()
    };
    let along_h = SweepGrid {
        g: vec![2.0],
        h: vec![0.01, 0.02, 0.05, 0.1],
        ..Default::default()
    };
    for grid in [along_g, along_h] {
        print!("{}", sweep_csv(&run_sweep(&grid, &fixed)?));
    }
    Ok(())
}
