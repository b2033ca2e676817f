//! PGM images, field files and contour CSV written and read back.
//!
//! `cargo run --release --example file_formats -- [OUT_DIR]`

use gvflow::field::VectorField;
use gvflow::io::{self, PgmEncoding};
use gvflow::snake::Snake;
use gvflow::synth::synth_disk;

fn main() -> gvflow::error::Result<()> {
    let out =
        std::path::PathBuf::from(std::env::args().nth(1).unwrap_or("out/file_formats".into()));
    std::fs::create_dir_all(&out)?;

    let image = synth_disk(40, 30, 19.5, 14.5, 6.0)?;
    io::write_pgm(&image, out.join("disk.pgm"))?;
    io::write_pgm_with(&image, out.join("disk-ascii.pgm"), 255, PgmEncoding::Ascii)?;
    let back = io::read_pgm(out.join("disk-ascii.pgm"))?;
    println!(
        "PGM: {}x{}, identical after reading back: {}",
        back.spec().width,
        back.spec().height,
        back == image
    );

    let field = VectorField::constant(*image.spec(), 0.1, -2.5e-7);
    io::write_field(&field, out.join("field.gvf"))?;
    println!(
        "field file identical after reading back: {}",
        io::read_field(out.join("field.gvf"))? == field
    );

    let snake = Snake::circle(19.5, 14.5, 8.0, 10)?;
    io::write_contour(&snake, out.join("contour.csv"))?;
    println!(
        "contour identical after reading back: {}",
        io::read_contour(out.join("contour.csv"))? == snake
    );

    match io::decode_pgm(b"P5\n4 4\n255\n\x00") {
        Err(e) => println!("truncated PGM: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
