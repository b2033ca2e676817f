//! Clamping the initial field at T: iteration counts grow with T.
//!
//! `cargo run --release --example threshold_clamp`

use gvflow::field::{clamp_magnitude, edge_map, gradient_central, EdgeSign};
use gvflow::pipeline::{run_sweep, sweep_csv, RunConfig, SweepGrid};
use gvflow::synth::synth_ushape;

fn main() -> gvflow::error::Result<()> {
    let edge = edge_map(&synth_ushape(128, 128)?, 1.0, EdgeSign::Attractive)?;
    let grad = gradient_central(&edge);
    println!("peak |grad f| = {:.1}", grad.max_magnitude());
    for t in [1.0, 10.0, 80.0] {
        println!(
            "T = {t:>4}: clamped peak {:.1}",
            clamp_magnitude(&grad, t)?.max_magnitude()
        );
    }

    let grid = SweepGrid {
        threshold: vec![
            Some(1.0),
            Some(4.0),
            Some(7.0),
            Some(10.0),
            Some(40.0),
            Some(80.0),
            None,
        ],
        ..Default::default()
    };
    print!("{}", sweep_csv(&run_sweep(&grid, &RunConfig::default())?));
    Ok(())
}
