//! The iterative solver against an exact banded solve of the steady state.
//!
//! `cargo run --release --example direct_oracle`

use gvflow::direct::direct_steady_solve;
use gvflow::field::{edge_map, EdgeSign, GridSpec, ScalarField};
use gvflow::mask::{DomainMask, Rect};
use gvflow::solver::{gvf_solve, GvfParams};

fn main() -> gvflow::error::Result<()> {
    let spec = GridSpec::new(24, 20)?;
    let image = ScalarField::from_fn(spec, |i, j| {
        if (6..18).contains(&i) && (5..15).contains(&j) {
            255.0
        } else {
            0.0
        }
    });
    let f = edge_map(&image, 1.0, EdgeSign::Attractive)?;
    let masks = [
        ("full", DomainMask::full(spec)),
        (
            "holed",
            DomainMask::full(spec).with_hole(Rect::new(9, 8, 6, 4))?,
        ),
    ];
    for (name, mask) in masks {
        let exact = direct_steady_solve(&f, &GvfParams::new(1.0, 0.1), &mask)?;
        for delta in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
            let p = GvfParams::new(1.0, 0.1)
                .with_delta(delta)
                .with_max_iter(200_000);
            let r = gvf_solve(&f, &p, &mask)?;
            println!(
                "{name:>5} delta {delta:.0e}: NI {:>5}, max error {:.2e}",
                r.iterations,
                r.field.max_diff(&exact)
            );
        }
    }
    Ok(())
}
