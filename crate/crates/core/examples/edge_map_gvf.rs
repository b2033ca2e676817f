//! Edge map of the synthetic U, its GVF field, and rendered views.
//!
//! `cargo run --release --example edge_map_gvf -- [OUT_DIR]`

use gvflow::field::{edge_map, EdgeSign};
use gvflow::io::{self, render::render_scalar, RenderMode};
use gvflow::mask::DomainMask;
use gvflow::solver::{gvf_solve, steady_residual, GvfParams};
use gvflow::synth::synth_ushape;

fn main() -> gvflow::error::Result<()> {
    let out =
        std::path::PathBuf::from(std::env::args().nth(1).unwrap_or("out/edge_map_gvf".into()));
    std::fs::create_dir_all(&out)?;

    let image = synth_ushape(128, 128)?;
    let f = edge_map(&image, 1.0, EdgeSign::Attractive)?;
    let p = GvfParams::new(2.0, 0.02);
    let mask = DomainMask::full(*f.spec());
    let report = gvf_solve(&f, &p, &mask)?;

    println!(
        "NI = {}, converged = {}, final change = {:.2e}, residual = {:.2e}",
        report.iterations,
        report.converged,
        report.final_change(),
        steady_residual(&report.field, &f, &p, &mask)?
    );
    render_scalar(&f).write_ppm(out.join("edge.ppm"))?;
    io::write_field(&report.field, out.join("field.gvf"))?;
    io::render(
        &report.field,
        RenderMode::DirectionHue,
        None,
        out.join("direction.ppm"),
    )?;
    io::render(
        &report.field,
        RenderMode::Arrows { stride: 6 },
        None,
        out.join("arrows.ppm"),
    )?;
    println!("wrote {}", out.display());
    Ok(())
}
