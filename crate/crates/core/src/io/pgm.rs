//! Grayscale PGM, ASCII (P2) and binary (P5), up to 16 bits per sample.

use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmEncoding {
    Ascii,
    #[default]
    Binary,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.data.get(self.pos) {
                None => Error::format(start, format!("unexpected end of data, expected {what}")),
                Some(&b) => Error::format(
                    start,
                    format!("expected {what}, found byte {:?}", b as char),
                ),
            });
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(start, format!("{what} out of range")))
    }
}

/// Decode a P2 or P5 image. Samples become reals in `[0, maxval]`.
pub fn decode_pgm(data: &[u8]) -> Result<ScalarField> {
    let encoding = match data.get(..2) {
        Some(b"P2") => PgmEncoding::Ascii,
        Some(b"P5") => PgmEncoding::Binary,
        _ => return Err(Error::format(0, "not a P2 or P5 PGM")),
    };
    let mut c = Cursor { data, pos: 2 };
    let header_at = c.pos;
    let width = c.number("width")? as usize;
    let height = c.number("height")? as usize;
    c.skip_space_and_comments();
    let maxval_at = c.pos;
    let maxval = c.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(
            maxval_at,
            format!("maxval {maxval} outside 1..=65535"),
        ));
    }
    let spec = GridSpec::new(width, height).map_err(|e| Error::format(header_at, e.to_string()))?;
    let n = spec.len();
    let mut values = Vec::with_capacity(n.min(data.len()));

    match encoding {
        PgmEncoding::Ascii => {
            for _ in 0..n {
                c.skip_space_and_comments();
                let at = c.pos;
                let v = c.number("sample")?;
                if v > maxval {
                    return Err(Error::format(
                        at,
                        format!("sample {v} exceeds maxval {maxval}"),
                    ));
                }
                values.push(v as f64);
            }
        }
        PgmEncoding::Binary => {
            // exactly one whitespace byte separates the header from the raster
            if !data.get(c.pos).is_some_and(u8::is_ascii_whitespace) {
                return Err(Error::format(c.pos, "missing whitespace after maxval"));
            }
            let start = c.pos + 1;
            let bytes = if maxval > 255 { 2 } else { 1 };
            let need = n * bytes;
            let raster = data.get(start..start + need).ok_or_else(|| {
                Error::format(
                    data.len(),
                    format!(
                        "truncated raster: need {need} bytes, have {}",
                        data.len().saturating_sub(start)
                    ),
                )
            })?;
            for (k, chunk) in raster.chunks_exact(bytes).enumerate() {
                let v = if bytes == 2 {
                    u16::from_be_bytes([chunk[0], chunk[1]]) as u32
                } else {
                    chunk[0] as u32
                };
                if v > maxval {
                    return Err(Error::format(
                        start + k * bytes,
                        format!("sample {v} exceeds maxval {maxval}"),
                    ));
                }
                values.push(v as f64);
            }
        }
    }
    ScalarField::from_vec(spec, values)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<ScalarField> {
    decode_pgm(&std::fs::read(path)?)
}

/// Encode with values clamped to `[0, maxval]` and rounded to the nearest
/// integer.
pub fn encode_pgm(field: &ScalarField, maxval: u16, encoding: PgmEncoding) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(Error::Parameter("maxval must be positive".into()));
    }
    let spec = field.spec();
    let quantize = |x: f64| x.clamp(0.0, maxval as f64).round() as u16;
    let magic = match encoding {
        PgmEncoding::Ascii => "P2",
        PgmEncoding::Binary => "P5",
    };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", spec.width, spec.height).into_bytes();
    match encoding {
        PgmEncoding::Ascii => {
            for row in field.values().chunks_exact(spec.width) {
                let line: Vec<String> = row.iter().map(|&x| quantize(x).to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmEncoding::Binary => {
            for &x in field.values() {
                let q = quantize(x);
                if maxval > 255 {
                    out.extend_from_slice(&q.to_be_bytes());
                } else {
                    out.push(q as u8);
                }
            }
        }
    }
    Ok(out)
}

/// 8-bit binary PGM.
pub fn write_pgm(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    write_pgm_with(field, path, 255, PgmEncoding::Binary)
}

pub fn write_pgm_with(
    field: &ScalarField,
    path: impl AsRef<Path>,
    maxval: u16,
    encoding: PgmEncoding,
) -> Result<()> {
    std::fs::write(path, encode_pgm(field, maxval, encoding)?)?;
    Ok(())
}
