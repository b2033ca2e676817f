//! Parameter validation and what happens when it is bypassed.
//!
//! `cargo run --release --example stability`

use gvflow::error::Error;
use gvflow::field::{GridSpec, ScalarField};
use gvflow::mask::DomainMask;
use gvflow::solver::{gvf_solve, validate_params, GvfParams};

fn main() {
    let spec = GridSpec::new(8, 8).unwrap();
    let f = ScalarField::from_fn(spec, |i, j| if (i, j) == (4, 4) { 1.0 } else { 0.0 });
    let mask = DomainMask::full(spec);

    for (g, h, dt) in [
        (2.0, 0.02, 0.12),
        (2.5, 0.02, 0.12),
        (0.2, 1.0, 0.12),
        (0.8, 0.72, 0.306),
    ] {
        let p = GvfParams::new(g, h).with_dt(dt);
        let violations = validate_params(&p, &spec);
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        println!(
            "g = {g}, h = {h}, dt = {dt}: {}",
            if text.is_empty() {
                "valid".into()
            } else {
                text.join("; ")
            }
        );
        if !violations.is_empty() {
            match gvf_solve(&f, &p.with_force(true), &mask) {
                Ok(r) => println!("  forced: NI {}, converged {}", r.iterations, r.converged),
                Err(Error::Diverged {
                    iteration,
                    magnitude,
                }) => {
                    println!("  forced: diverged at iteration {iteration}, |v| = {magnitude:.3e}")
                }
                Err(e) => println!("  forced: {e}"),
            }
        }
    }
}
