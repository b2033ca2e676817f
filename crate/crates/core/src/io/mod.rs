//! File formats: PGM images, `GVF1` field files, contour CSV and PPM renders.

pub mod contour;
pub mod field_file;
pub mod pgm;
pub mod render;

pub use contour::{decode_contour, encode_contour, read_contour, write_contour};
pub use field_file::{decode_field, encode_field, read_field, write_field};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm, write_pgm_with, PgmEncoding};
pub use render::{render, render_field, Image, RenderMode};
