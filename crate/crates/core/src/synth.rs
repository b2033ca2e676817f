//! Deterministic binary test images (foreground 255, background 0) and
//! their exact boundaries.
//!
//! A pixel belongs to a shape when its center does, so a rectangle of
//! pixels `[x, x + w)` has its boundary at `x − 0.5` and `x + w − 0.5` in
//! pixel-center coordinates. That is where the ridge of the edge map lies.

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField};
use crate::mask::Rect;
use crate::snake::Point;

pub const FOREGROUND: f64 = 255.0;
pub const BACKGROUND: f64 = 0.0;

/// Every shape keeps at least this many background pixels to the border.
pub const MIN_MARGIN: usize = 8;

/// Filled rectangle with a rectangular notch cut down from its top edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UShape {
    pub outer: Rect,
    pub notch: Rect,
}

impl UShape {
    /// Canonical U for a grid: the body sits a fifth of the grid in from each
    /// side, the notch is a third of the body wide and half of it deep.
    pub fn for_grid(width: usize, height: usize) -> Result<Self> {
        let (mx, my) = (width / 5, height / 5);
        if mx < MIN_MARGIN || my < MIN_MARGIN {
            return Err(Error::Parameter(format!(
                "a {width}x{height} grid is too small for the U shape (need >= 40x40)"
            )));
        }
        let outer = Rect::new(mx, my, width - 2 * mx, height - 2 * my);
        let nw = ((outer.w as f64) / 3.0).round() as usize;
        let nx = outer.x + (outer.w - nw) / 2;
        let notch = Rect::new(nx, outer.y, nw, outer.h / 2);
        Ok(Self { outer, notch })
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.outer.contains(i, j) && !self.notch.contains(i, j)
    }

    pub fn rasterize(&self, spec: GridSpec) -> ScalarField {
        ScalarField::from_fn(spec, |i, j| {
            if self.contains(i, j) {
                FOREGROUND
            } else {
                BACKGROUND
            }
        })
    }

    /// Closed boundary polygon, clockwise in image coordinates.
    pub fn boundary(&self) -> Vec<Point> {
        let (l, t) = (self.outer.x as f64 - 0.5, self.outer.y as f64 - 0.5);
        let r = (self.outer.x + self.outer.w) as f64 - 0.5;
        let b = (self.outer.y + self.outer.h) as f64 - 0.5;
        let nl = self.notch.x as f64 - 0.5;
        let nr = (self.notch.x + self.notch.w) as f64 - 0.5;
        let nb = (self.notch.y + self.notch.h) as f64 - 0.5;
        vec![
            Point::new(l, t),
            Point::new(nl, t),
            Point::new(nl, nb),
            Point::new(nr, nb),
            Point::new(nr, t),
            Point::new(r, t),
            Point::new(r, b),
            Point::new(l, b),
        ]
    }

    /// Strictly inside the notch: between its walls and below the mouth line.
    pub fn in_cavity(&self, p: Point) -> bool {
        let nl = self.notch.x as f64 - 0.5;
        let nr = (self.notch.x + self.notch.w) as f64 - 0.5;
        let top = self.notch.y as f64 - 0.5;
        let nb = (self.notch.y + self.notch.h) as f64 - 0.5;
        p.x > nl && p.x < nr && p.y > top && p.y < nb
    }
}

pub fn synth_ushape(width: usize, height: usize) -> Result<ScalarField> {
    let spec = GridSpec::new(width, height)?;
    Ok(UShape::for_grid(width, height)?.rasterize(spec))
}

/// Filled disk: pixel centers within `r` of `(cx, cy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Disk {
    pub fn new(width: usize, height: usize, cx: f64, cy: f64, r: f64) -> Result<Self> {
        let m = MIN_MARGIN as f64;
        let fits = r > 0.0
            && cx - r >= m
            && cy - r >= m
            && cx + r <= (width - 1) as f64 - m
            && cy + r <= (height - 1) as f64 - m;
        if !fits {
            return Err(Error::Parameter(format!(
                "disk at ({cx}, {cy}) with radius {r} does not fit {width}x{height} with {MIN_MARGIN}px margins"
            )));
        }
        Ok(Self { cx, cy, r })
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (x, y) = (i as f64 - self.cx, j as f64 - self.cy);
        x * x + y * y <= self.r * self.r
    }

    pub fn rasterize(&self, spec: GridSpec) -> ScalarField {
        ScalarField::from_fn(spec, |i, j| {
            if self.contains(i, j) {
                FOREGROUND
            } else {
                BACKGROUND
            }
        })
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        (p.dist(Point::new(self.cx, self.cy)) - self.r).abs()
    }
}

pub fn synth_disk(width: usize, height: usize, cx: f64, cy: f64, r: f64) -> Result<ScalarField> {
    let spec = GridSpec::new(width, height)?;
    Ok(Disk::new(width, height, cx, cy, r)?.rasterize(spec))
}

/// The box used by [`synth_box_with_hole`]: same placement as the U body.
pub fn box_outline(width: usize, height: usize) -> Result<Rect> {
    let (mx, my) = (width / 5, height / 5);
    if mx < MIN_MARGIN || my < MIN_MARGIN {
        return Err(Error::Parameter(format!(
            "a {width}x{height} grid is too small for the box (need >= 40x40)"
        )));
    }
    Ok(Rect::new(mx, my, width - 2 * mx, height - 2 * my))
}

/// Filled box with a rectangular hole. The hole must leave a wall of at
/// least one pixel on every side.
pub fn synth_box_with_hole(width: usize, height: usize, hole: Rect) -> Result<ScalarField> {
    let spec = GridSpec::new(width, height)?;
    let outer = box_outline(width, height)?;
    let inside = hole.w > 0
        && hole.h > 0
        && hole.x > outer.x
        && hole.y > outer.y
        && hole.x + hole.w < outer.x + outer.w
        && hole.y + hole.h < outer.y + outer.h;
    if !inside {
        return Err(Error::Parameter(format!(
            "hole {hole} must lie strictly inside the box {outer}"
        )));
    }
    Ok(ScalarField::from_fn(spec, |i, j| {
        if outer.contains(i, j) && !hole.contains(i, j) {
            FOREGROUND
        } else {
            BACKGROUND
        }
    }))
}

/// Distance from `p` to the nearest edge of a closed polygon.
pub fn distance_to_polygon(p: Point, polygon: &[Point]) -> f64 {
    let n = polygon.len();
    (0..n)
        .map(|k| distance_to_segment(p, polygon[k], polygon[(k + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

fn distance_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Bounding box of pixels whose value differs from zero, if any.
pub fn support_bbox(f: &ScalarField) -> Option<Rect> {
    let spec = f.spec();
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    let mut any = false;
    for j in 0..spec.height {
        for i in 0..spec.width {
            if f.get(i, j) != 0.0 {
                any = true;
                x0 = x0.min(i);
                y0 = y0.min(j);
                x1 = x1.max(i);
                y1 = y1.max(j);
            }
        }
    }
    any.then(|| Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
}
