//! Snake contours as CSV, one `x,y` pair per line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::snake::{Point, Snake};

pub fn encode_contour(snake: &Snake) -> String {
    let mut out = String::new();
    for p in snake.points() {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
    out
}

pub fn decode_contour(text: &str) -> Result<Snake> {
    let mut points = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let at = offset;
        offset += line.len();
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let point = line
            .split_once(',')
            .and_then(|(x, y)| Some(Point::new(x.trim().parse().ok()?, y.trim().parse().ok()?)))
            .ok_or_else(|| Error::format(at, format!("expected x,y but got {line:?}")))?;
        points.push(point);
    }
    Snake::new(points)
}

pub fn write_contour(snake: &Snake, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, encode_contour(snake))?;
    Ok(())
}

pub fn read_contour(path: impl AsRef<Path>) -> Result<Snake> {
    decode_contour(&std::fs::read_to_string(path)?)
}
