//! Periodic explicit solve compared with the frequency-domain steady state.
//!
//! `cargo run --release --example spectral_oracle`

use std::f64::consts::PI;

use gvflow::field::{edge_map, EdgeSign};
use gvflow::mask::{Boundary, DomainMask};
use gvflow::solver::{initial_field, solve_from_gradient, GvfParams};
use gvflow::spectral::{parseval_energy, spectral_steady_state, transfer_gain, GainMode};
use gvflow::synth::synth_disk;

fn main() -> gvflow::error::Result<()> {
    let (g, h) = (1.0, 0.1);
    println!("gain along w2 = 0, g/h = {}:", g / h);
    for k in 0..=4 {
        let w = PI * k as f64 / 4.0;
        println!(
            "  w1 = {w:.3}  discrete {:.5}  continuous {:.5}",
            transfer_gain(w, 0.0, g, h, GainMode::Discrete { cell_area: 1.0 })?,
            transfer_gain(w, 0.0, g, h, GainMode::Continuous)?
        );
    }

    let image = synth_disk(64, 64, 31.5, 31.5, 14.0)?;
    let grad = initial_field(&edge_map(&image, 1.0, EdgeSign::Attractive)?, f64::INFINITY)?;
    let p = GvfParams::new(g, h)
        .with_boundary(Boundary::Periodic)
        .with_delta(1e-10);
    let report = solve_from_gradient(&grad, &p, &DomainMask::full(*grad.spec()))?;
    let oracle = spectral_steady_state(&grad, g, h)?;
    println!(
        "explicit NI {}; max difference from the spectral steady state {:.2e} (field peak {:.1})",
        report.iterations,
        report.field.max_diff(&oracle),
        oracle.max_magnitude()
    );
    println!(
        "energy: input {:.4e}, explicit {:.4e}, spectral {:.4e}",
        parseval_energy(&grad),
        parseval_energy(&report.field),
        parseval_energy(&oracle)
    );
    Ok(())
}
