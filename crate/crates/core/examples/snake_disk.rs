//! A GGVF snake closing in on a disk from a larger circle.
//!
//! `cargo run --release --example snake_disk`

use gvflow::field::{edge_map, EdgeSign};
use gvflow::mask::DomainMask;
use gvflow::snake::{snake_evolve, Snake, SnakeParams, TensileSign};
use gvflow::solver::{ggvf_solve, GgvfParams};
use gvflow::synth::{synth_disk, Disk};

fn main() -> gvflow::error::Result<()> {
    let disk = Disk::new(100, 100, 49.5, 49.5, 25.0)?;
    let f = edge_map(
        &synth_disk(100, 100, disk.cx, disk.cy, disk.r)?,
        1.0,
        EdgeSign::Attractive,
    )?;
    let p = GgvfParams {
        delta: 0.01,
        ..GgvfParams::default()
    };
    let report = ggvf_solve(&f, &p, &DomainMask::full(*f.spec()))?;
    let peak = report.field.max_magnitude();
    let field = gvflow::field::VectorField::new(
        report.field.u.map(|x| x / peak),
        report.field.v.map(|x| x / peak),
    )?;

    let params = SnakeParams {
        tensile_sign: TensileSign::Smoothing,
        ..SnakeParams::default()
    };
    let start = Snake::circle(disk.cx, disk.cy, 40.0, 60)?;
    let run = snake_evolve(&start, &field, &params)?;
    let d: Vec<f64> = run
        .snake
        .points()
        .iter()
        .map(|&q| disk.distance_to_boundary(q))
        .collect();
    println!(
        "field NI {}; snake {} iterations, converged {}, {} snaxels",
        report.iterations,
        run.iterations,
        run.converged,
        run.snake.len()
    );
    println!(
        "distance to the disk edge: mean {:.3}, max {:.3}",
        d.iter().sum::<f64>() / d.len() as f64,
        d.iter().copied().fold(0.0, f64::max)
    );
    Ok(())
}
