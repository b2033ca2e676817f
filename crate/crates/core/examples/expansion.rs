//! The first few iterates in closed form, checked against explicit steps.
//!
//! `cargo run --release --example expansion`

use gvflow::field::{GridSpec, ScalarField};
use gvflow::solver::{expansion_check, GvfParams};

fn main() -> gvflow::error::Result<()> {
    let spec = GridSpec::new(8, 8)?;
    let f = ScalarField::from_fn(spec, |i, j| if (i, j) == (4, 4) { 1.0 } else { 0.0 });
    for (g, h, dt) in [(1.0, 0.1, 0.2), (2.0, 0.02, 0.12), (1.0, 0.0, 0.2)] {
        let p = GvfParams::new(g, h).with_dt(dt);
        let diffs: Vec<String> = (1..=4)
            .map(|n| expansion_check(&f, &p, n).map(|d| format!("{d:.1e}")))
            .collect::<Result<_, _>>()?;
        println!(
            "g = {g}, h = {h}, dt = {dt}: v(1..4) differences {}",
            diffs.join(", ")
        );
    }
    Ok(())
}
