//! Every render mode for one field, with a contour drawn on top.
//!
//! `cargo run --release --example render_field -- [OUT_DIR]`

use gvflow::field::{GridSpec, ScalarField, VectorField};
use gvflow::io::{render, RenderMode};
use gvflow::snake::Snake;

fn main() -> gvflow::error::Result<()> {
    let out =
        std::path::PathBuf::from(std::env::args().nth(1).unwrap_or("out/render_field".into()));
    std::fs::create_dir_all(&out)?;

    // a vortex around the grid center
    let spec = GridSpec::new(96, 64)?;
    let (cx, cy) = (47.5, 31.5);
    let u = ScalarField::from_fn(spec, |_, j| -(j as f64 - cy));
    let v = ScalarField::from_fn(spec, |i, _| i as f64 - cx);
    let field = VectorField::new(u, v)?;
    let ring = Snake::circle(cx, cy, 20.0, 48)?;

    for (name, mode) in [
        ("magnitude.ppm", RenderMode::MagnitudeHeatmap),
        ("direction.ppm", RenderMode::DirectionHue),
        ("arrows.ppm", RenderMode::Arrows { stride: 8 }),
    ] {
        render(&field, mode, Some(&ring), out.join(name))?;
    }
    println!("wrote three renderings into {}", out.display());
    Ok(())
}
