//! `GVF1` vector-field text format:
//!
//! ```text
//! GVF1
//! <width> <height>
//! <dx> <dy>
//! <u> <v>        one line per pixel, row-major
//! ```
//!
//! Values are written with 17 significant digits, so a round trip is exact.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField, VectorField};

pub const MAGIC: &str = "GVF1";

pub fn encode_field(field: &VectorField) -> String {
    let spec = field.spec();
    let mut out = String::with_capacity(64 + spec.len() * 48);
    let _ = writeln!(
        out,
        "{MAGIC}\n{} {}\n{:.16e} {:.16e}",
        spec.width, spec.height, spec.dx, spec.dy
    );
    for (u, v) in field.u.values().iter().zip(field.v.values()) {
        let _ = writeln!(out, "{u:.16e} {v:.16e}");
    }
    out
}

pub fn decode_field(text: &str) -> Result<VectorField> {
    let mut offset = 0;
    let mut lines = text.split_inclusive('\n').map(|line| {
        let at = offset;
        offset += line.len();
        (at, line.trim_end_matches(['\n', '\r']))
    });
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| {
            Error::format(
                text.len(),
                format!("unexpected end of file, expected {what}"),
            )
        })
    };

    let (at, magic) = next("magic")?;
    if magic != MAGIC {
        return Err(Error::format(
            at,
            format!("bad magic {magic:?}, expected {MAGIC:?}"),
        ));
    }
    let (at, dims) = next("dimensions")?;
    let [width, height] = parse_pair::<usize>(dims, at, "dimensions")?;
    let (at, spacing) = next("spacing")?;
    let [dx, dy] = parse_pair::<f64>(spacing, at, "spacing")?;
    let spec = GridSpec::with_spacing(width, height, dx, dy)
        .map_err(|e| Error::format(at, e.to_string()))?;

    // each sample line takes at least four bytes
    let expected = spec.len().min(text.len() / 4);
    let mut u = Vec::with_capacity(expected);
    let mut v = Vec::with_capacity(expected);
    for k in 0..spec.len() {
        let (at, line) = next("a sample").map_err(|_| {
            Error::format(
                text.len(),
                format!("expected {} samples, found {k}", spec.len()),
            )
        })?;
        let [a, b] = parse_pair::<f64>(line, at, "sample")?;
        u.push(a);
        v.push(b);
    }
    if let Some((at, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::format(
            at,
            format!("more than {} samples", spec.len()),
        ));
    }
    VectorField::new(
        ScalarField::from_vec(spec, u)?,
        ScalarField::from_vec(spec, v)?,
    )
}

fn parse_pair<T: std::str::FromStr>(line: &str, at: usize, what: &str) -> Result<[T; 2]> {
    let mut it = line.split_whitespace().map(str::parse::<T>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok([a, b]),
        _ => Err(Error::format(at, format!("malformed {what} line {line:?}"))),
    }
}

pub fn write_field(field: &VectorField, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, encode_field(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<VectorField> {
    let text = std::fs::read_to_string(path)?;
    decode_field(&text)
}
