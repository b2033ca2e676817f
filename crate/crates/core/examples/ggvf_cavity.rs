//! Snakes driven by the constant-coefficient GVF field and by the GGVF
//! field, both started from a circle around the synthetic U.
//!
//! `cargo run --release --example ggvf_cavity -- [OUT_DIR]`

use gvflow::pipeline::{run_pipeline, Method, RunConfig};
use gvflow::synth::{distance_to_polygon, UShape};

fn main() -> gvflow::error::Result<()> {
    let out = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or("out/ggvf_cavity".into()));
    let u = UShape::for_grid(128, 128)?;
    let boundary = u.boundary();

    let runs = [
        (
            "gvf",
            RunConfig {
                method: Method::Gvf,
                ..RunConfig::default()
            },
        ),
        (
            "ggvf",
            RunConfig {
                method: Method::Ggvf,
                delta: 0.01,
                ..RunConfig::default()
            },
        ),
    ];
    for (name, cfg) in runs {
        let summary = run_pipeline(&RunConfig {
            snake: true,
            out: out.join(name),
            ..cfg
        })?;
        let contour = summary.contour.as_ref().expect("snake requested");
        let pts = contour.points();
        let mean = pts
            .iter()
            .map(|&p| distance_to_polygon(p, &boundary))
            .sum::<f64>()
            / pts.len() as f64;
        let deepest = pts
            .iter()
            .filter(|&&p| u.in_cavity(p))
            .map(|p| p.y)
            .fold(f64::NAN, f64::min);
        println!(
            "{name:>4}: field NI {}, snake {} iterations (converged {}), {} snaxels, \
             mean distance to the U {mean:.3}, {} in the cavity, highest cavity snaxel y = {deepest:.1}",
            summary.iterations,
            summary.snake.as_ref().map_or(0, |s| s.iterations),
            summary.snake.as_ref().is_some_and(|s| s.converged),
            pts.len(),
            pts.iter().filter(|&&p| u.in_cavity(p)).count(),
        );
    }
    println!("cavity spans y {}..{}", u.notch.y, u.notch.y + u.notch.h);
    Ok(())
}
