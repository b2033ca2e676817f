//! Raster views of vector fields and contours, written as binary PPM (P6).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField, VectorField};
use crate::snake::Snake;

pub const DEFAULT_ARROW_STRIDE: usize = 8;

pub type Rgb = [u8; 3];

const RED: Rgb = [255, 0, 0];
const WHITE: Rgb = [255, 255, 255];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenderMode {
    /// Gray level proportional to |v|, peak magnitude white.
    MagnitudeHeatmap,
    /// Hue from the direction of v at full saturation; zero vectors black.
    DirectionHue,
    /// A segment from every `stride`-th pixel along v, length scaled so the
    /// strongest vector spans one cell.
    Arrows { stride: usize },
}

impl std::str::FromStr for RenderMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "magnitude" | "magnitude-heatmap" => Ok(RenderMode::MagnitudeHeatmap),
            "hue" | "direction-hue" => Ok(RenderMode::DirectionHue),
            "arrows" => Ok(RenderMode::Arrows {
                stride: DEFAULT_ARROW_STRIDE,
            }),
            other => Err(format!(
                "unknown render mode {other:?} (magnitude, direction-hue, arrows)"
            )),
        }
    }
}

/// RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    fn put(&mut self, x: i64, y: i64, color: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.pixels[y as usize * self.width + x as usize] = color;
        }
    }

    /// Bresenham segment, clipped to the image.
    pub fn line(&mut self, (x0, y0): (i64, i64), (x1, y1): (i64, i64), color: Rgb) {
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            self.put(x, y, color);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    /// Closed polyline through the snaxels, rounded to pixel centers.
    pub fn overlay_snake(&mut self, snake: &Snake, color: Rgb) {
        let pts: Vec<(i64, i64)> = snake
            .points()
            .iter()
            .map(|p| (p.x.round() as i64, p.y.round() as i64))
            .collect();
        for k in 0..pts.len() {
            self.line(pts[k], pts[(k + 1) % pts.len()], color);
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for px in &self.pixels {
            out.extend_from_slice(px);
        }
        out
    }

    pub fn write_ppm(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_ppm())?;
        Ok(())
    }
}

fn hsv_to_rgb(hue_deg: f64) -> Rgb {
    let h = hue_deg.rem_euclid(360.0) / 60.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let q = |c: f64| (c * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

fn gray(magnitude: &ScalarField) -> Image {
    let spec = magnitude.spec();
    let peak = magnitude.max();
    let mut img = Image::filled(spec.width, spec.height, [0; 3]);
    if peak > 0.0 {
        for (px, &m) in img.pixels.iter_mut().zip(magnitude.values()) {
            let level = (m / peak * 255.0).round() as u8;
            *px = [level; 3];
        }
    }
    img
}

pub fn render_field(field: &VectorField, mode: RenderMode) -> Result<Image> {
    let spec: GridSpec = *field.spec();
    match mode {
        RenderMode::MagnitudeHeatmap => Ok(gray(&field.magnitude())),
        RenderMode::DirectionHue => {
            let mut img = Image::filled(spec.width, spec.height, [0; 3]);
            for (k, px) in img.pixels.iter_mut().enumerate() {
                let (u, v) = (field.u.values()[k], field.v.values()[k]);
                if u != 0.0 || v != 0.0 {
                    *px = hsv_to_rgb(v.atan2(u).to_degrees());
                }
            }
            Ok(img)
        }
        RenderMode::Arrows { stride } => {
            if stride == 0 {
                return Err(Error::Parameter("arrow stride must be positive".into()));
            }
            let mut img = Image::filled(spec.width, spec.height, [0; 3]);
            let peak = field.max_magnitude();
            if peak == 0.0 {
                return Ok(img);
            }
            let scale = stride as f64 / peak;
            let half = stride / 2;
            for j in (half..spec.height).step_by(stride) {
                for i in (half..spec.width).step_by(stride) {
                    let (u, v) = field.get(i, j);
                    let tip = (
                        (i as f64 + u * scale).round() as i64,
                        (j as f64 + v * scale).round() as i64,
                    );
                    img.line((i as i64, j as i64), tip, WHITE);
                    img.put(i as i64, j as i64, RED);
                }
            }
            Ok(img)
        }
    }
}

/// Render and optionally draw a snake on top in red.
pub fn render(
    field: &VectorField,
    mode: RenderMode,
    overlay: Option<&Snake>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut img = render_field(field, mode)?;
    if let Some(s) = overlay {
        img.overlay_snake(s, RED);
    }
    img.write_ppm(path)
}

/// Gray rendering of a scalar image, e.g. an input or edge map.
pub fn render_scalar(f: &ScalarField) -> Image {
    gray(&f.map(|x| x - f.min()))
}
