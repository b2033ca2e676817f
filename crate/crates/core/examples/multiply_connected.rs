//! Solving on a domain with a rectangular hole, and inside an outer window.
//!
//! `cargo run --release --example multiply_connected`

use gvflow::field::{edge_map, EdgeSign};
use gvflow::mask::Rect;
use gvflow::pipeline::{solve_edge_map, RunConfig, Shape};
use gvflow::synth::{box_outline, synth_box_with_hole};

fn main() -> gvflow::error::Result<()> {
    let (w, h) = (96, 96);
    let outline = box_outline(w, h)?;
    let hole = Rect::new(
        outline.x + 20,
        outline.y + 20,
        outline.w - 40,
        outline.h - 40,
    );
    let image = synth_box_with_hole(w, h, hole)?;
    let edge = edge_map(&image, 1.0, EdgeSign::Attractive)?;

    // the hole in the image is where the inner window sits
    let inner = Rect::new(hole.x + 3, hole.y + 3, hole.w - 6, hole.h - 6);
    let base = RunConfig {
        shape: Shape::BoxHole,
        width: w,
        height: h,
        ..RunConfig::default()
    };
    let variants = [
        ("full grid", base.clone()),
        (
            "inner window",
            RunConfig {
                inner_box: Some(inner),
                ..base.clone()
            },
        ),
        (
            "outer margin 6",
            RunConfig {
                outer_margin: Some(6),
                ..base.clone()
            },
        ),
        (
            "both",
            RunConfig {
                inner_box: Some(inner),
                outer_margin: Some(6),
                ..base
            },
        ),
    ];
    println!(
        "{:<16} {:>6} {:>7} {:>10} {:>9}",
        "domain", "NI", "|Ω|", "updates", "ms"
    );
    for (name, cfg) in variants {
        let s = solve_edge_map(&cfg, &edge)?;
        println!(
            "{name:<16} {:>6} {:>7} {:>10} {:>9.1}",
            s.report.iterations, s.report.inside_pixels, s.report.pixel_updates, s.wall_ms
        );
    }
    Ok(())
}
