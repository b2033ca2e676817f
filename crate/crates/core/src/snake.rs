//! Closed snaxel contour driven by a tensile force and a sampled external
//! field.
//!
//! Each iteration moves every snaxel at once:
//!
//! ```text
//! p_i ← p_i + step · (s·b·B_i + γ·f(p_i)),   B_i = p_i − (p_{i−1} + p_{i+1})/2
//! ```
//!
//! With `s = +1` (the default, [`TensileSign::AsWritten`]) the tensile term
//! pushes a snaxel away from the midpoint of its neighbors, which inflates a
//! convex contour. [`TensileSign::Smoothing`] flips it into the classic
//! shrinking/smoothing force.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    #[inline]
    fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

pub const MIN_SNAXELS: usize = 4;

/// Resampling that would need more snaxels than this is treated as a
/// runaway contour.
pub const MAX_SNAXELS: usize = 100_000;

/// Closed contour; index arithmetic is modulo `len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snake {
    points: Vec<Point>,
}

impl Snake {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < MIN_SNAXELS {
            return Err(Error::Geometry(format!(
                "a snake needs at least {MIN_SNAXELS} snaxels, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::Geometry("snaxel coordinates must be finite".into()));
        }
        Ok(Self { points })
    }

    /// `n` snaxels evenly spaced on a circle, starting at angle 0.
    pub fn circle(cx: f64, cy: f64, radius: f64, n: usize) -> Result<Self> {
        let points = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Point::new(cx + radius * t.cos(), cy + radius * t.sin())
            })
            .collect();
        Self::new(points)
    }

    #[inline]
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    fn at(&self, i: isize) -> Point {
        let n = self.points.len() as isize;
        self.points[i.rem_euclid(n) as usize]
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len())
            .map(|i| self.points[i].dist(self.at(i as isize + 1)))
            .sum()
    }

    pub fn centroid(&self) -> Point {
        let n = self.len() as f64;
        let s = self.points.iter().fold(Point::default(), |a, &p| a + p);
        s * (1.0 / n)
    }

    pub fn translated(&self, by: Point) -> Snake {
        Snake {
            points: self.points.iter().map(|&p| p + by).collect(),
        }
    }

    fn clamped(&self, spec: &GridSpec) -> Snake {
        Snake {
            points: self.points.iter().map(|&p| clamp_point(p, spec)).collect(),
        }
    }
}

#[inline]
fn clamp_point(p: Point, spec: &GridSpec) -> Point {
    Point::new(
        p.x.clamp(0.0, (spec.width - 1) as f64),
        p.y.clamp(0.0, (spec.height - 1) as f64),
    )
}

/// `B_i = v_i − ½(v_{i−1} + v_{i+1})`.
pub fn tensile_force(s: &Snake, i: usize) -> Result<Point> {
    if i >= s.len() {
        return Err(Error::Geometry(format!(
            "snaxel index {i} out of range for {} snaxels",
            s.len()
        )));
    }
    let i = i as isize;
    Ok(s.at(i) - (s.at(i - 1) + s.at(i + 1)) * 0.5)
}

/// Bilinear interpolation of both components. Coordinates outside the grid
/// rectangle are clamped onto it.
pub fn sample_field_bilinear(field: &VectorField, x: f64, y: f64) -> (f64, f64) {
    let spec = field.spec();
    let x = x.clamp(0.0, (spec.width - 1) as f64);
    let y = y.clamp(0.0, (spec.height - 1) as f64);
    let i0 = (x.floor() as usize).min(spec.width - 2);
    let j0 = (y.floor() as usize).min(spec.height - 2);
    let fx = x - i0 as f64;
    let fy = y - j0 as f64;
    let w00 = (1.0 - fx) * (1.0 - fy);
    let w10 = fx * (1.0 - fy);
    let w01 = (1.0 - fx) * fy;
    let w11 = fx * fy;
    let (a, b, c, d) = (
        field.get(i0, j0),
        field.get(i0 + 1, j0),
        field.get(i0, j0 + 1),
        field.get(i0 + 1, j0 + 1),
    );
    (
        w00 * a.0 + w10 * b.0 + w01 * c.0 + w11 * d.0,
        w00 * a.1 + w10 * b.1 + w01 * c.1 + w11 * d.1,
    )
}

/// Sign applied to the tensile term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TensileSign {
    /// `+b·B_i`
    #[default]
    AsWritten,
    /// `−b·B_i`
    Smoothing,
}

impl TensileSign {
    fn factor(self) -> f64 {
        match self {
            TensileSign::AsWritten => 1.0,
            TensileSign::Smoothing => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnakeParams {
    /// Tensile scale b.
    pub b: f64,
    /// External force scale γ.
    pub gamma: f64,
    /// Evolution step.
    pub step: f64,
    /// Stop once the largest snaxel displacement is below this.
    pub eps: f64,
    pub max_iter: usize,
    /// Target arc spacing. After a move that leaves some gap outside
    /// `[spacing/2, 2·spacing]` the contour is resampled; 0 disables.
    pub resample_spacing: f64,
    pub tensile_sign: TensileSign,
    /// Use unit-length external force vectors.
    pub normalize_force: bool,
}

impl Default for SnakeParams {
    fn default() -> Self {
        Self {
            b: 0.2,
            gamma: 1.0,
            step: 1.0,
            eps: 0.01,
            max_iter: 5000,
            resample_spacing: 2.0,
            tensile_sign: TensileSign::AsWritten,
            normalize_force: false,
        }
    }
}

impl SnakeParams {
    fn check(&self) -> Result<()> {
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !nonneg(self.b) || !nonneg(self.gamma) {
            return Err(Error::Parameter("b and gamma must be >= 0".into()));
        }
        if !pos(self.step) || !pos(self.eps) {
            return Err(Error::Parameter("step and eps must be > 0".into()));
        }
        if !nonneg(self.resample_spacing) {
            return Err(Error::Parameter("resample spacing must be >= 0".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnakeRun {
    pub snake: Snake,
    pub iterations: usize,
    pub converged: bool,
    /// Largest snaxel displacement of each iteration.
    pub displacement_history: Vec<f64>,
}

fn external_force(field: &VectorField, p: Point, normalize: bool) -> Point {
    let (u, v) = sample_field_bilinear(field, p.x, p.y);
    let f = Point::new(u, v);
    if normalize {
        let n = f.norm();
        if n > 0.0 {
            return f * (1.0 / n);
        }
    }
    f
}

/// Evolve until the largest displacement drops below `eps` or `max_iter`
/// iterations have run.
pub fn snake_evolve(s: &Snake, field: &VectorField, p: &SnakeParams) -> Result<SnakeRun> {
    p.check()?;
    let spec = *field.spec();
    let field_peak = if p.normalize_force {
        1.0
    } else {
        field.max_magnitude()
    };
    let sign = p.tensile_sign.factor();
    let mut snake = s.clamped(&spec);
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=p.max_iter {
        iterations = it;
        let mut tensile_peak: f64 = 0.0;
        let mut moved = Vec::with_capacity(snake.len());
        let mut max_disp: f64 = 0.0;
        for i in 0..snake.len() {
            let b = tensile_force(&snake, i)?;
            tensile_peak = tensile_peak.max(b.norm());
            let ext = external_force(field, snake.points[i], p.normalize_force);
            let target = snake.points[i] + (b * (sign * p.b) + ext * p.gamma) * p.step;
            let next = clamp_point(target, &spec);
            let d = next.dist(snake.points[i]);
            if !d.is_finite() {
                return Err(Error::SnakeDiverged { iteration: it });
            }
            max_disp = max_disp.max(d);
            moved.push(next);
        }
        debug_assert!(
            max_disp
                <= p.step * (p.b * tensile_peak + p.gamma * field_peak) * (1.0 + 1e-12) + 1e-12,
            "displacement {max_disp} exceeds the step bound"
        );
        history.push(max_disp);
        snake = Snake { points: moved };
        // a contour squeezed into a single point has nothing to redistribute
        if p.resample_spacing > 0.0
            && snake.perimeter() > 1e-9
            && spacing_drifted(&snake, p.resample_spacing)
        {
            if snake.perimeter() / p.resample_spacing > MAX_SNAXELS as f64 {
                return Err(Error::SnakeDiverged { iteration: it });
            }
            snake = resample_contour(&snake, p.resample_spacing)?;
        }
        if max_disp < p.eps {
            converged = true;
            break;
        }
    }

    Ok(SnakeRun {
        snake,
        iterations,
        converged,
        displacement_history: history,
    })
}

/// Some gap left `[spacing/2, 2·spacing]`.
fn spacing_drifted(s: &Snake, spacing: f64) -> bool {
    (0..s.len()).any(|i| {
        let gap = s.points[i].dist(s.at(i as isize + 1));
        gap < 0.5 * spacing || gap > 2.0 * spacing
    })
}

/// Redistribute snaxels at uniform arc length along the closed polyline,
/// keeping the first point. The new count is `max(4, round(perimeter/spacing))`.
pub fn resample_contour(s: &Snake, spacing: f64) -> Result<Snake> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::Parameter(format!(
            "resample spacing must be > 0, got {spacing}"
        )));
    }
    let n = s.len();
    let seg: Vec<f64> = (0..n)
        .map(|i| s.points[i].dist(s.at(i as isize + 1)))
        .collect();
    let perimeter: f64 = seg.iter().sum();
    if !(perimeter > 1e-9) {
        return Err(Error::Geometry(format!(
            "cannot resample a contour with perimeter {perimeter}"
        )));
    }
    let count = ((perimeter / spacing).round() as usize).max(MIN_SNAXELS);
    let gap = perimeter / count as f64;

    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    let mut start = 0.0;
    for m in 0..count {
        let target = m as f64 * gap;
        while k + 1 < n && start + seg[k] < target {
            start += seg[k];
            k += 1;
        }
        let t = if seg[k] > 0.0 {
            ((target - start) / seg[k]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(s.points[k].lerp(s.at(k as isize + 1), t));
    }
    Snake::new(out)
}
