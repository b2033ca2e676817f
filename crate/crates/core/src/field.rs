//! Dense 2D grids and the finite-difference primitives built on them.
//!
//! Pixel `(i, j)` is column `i` (x) and row `j` (y), stored row-major at
//! `j * width + i`. Borders follow a zero-normal-derivative rule: the
//! gradient reflects the missing neighbor across the border pixel, the
//! Laplacian replaces it with the border pixel itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid size and spacing shared by every field on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub dx: f64,
    pub dy: f64,
}

/// Largest pixel count a grid may have.
pub const MAX_PIXELS: usize = 1 << 30;

impl GridSpec {
    /// Unit-spaced grid. Fails for anything smaller than 3x3.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::with_spacing(width, height, 1.0, 1.0)
    }

    pub fn with_spacing(width: usize, height: usize, dx: f64, dy: f64) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(Error::Dimension(format!(
                "grid must be at least 3x3, got {width}x{height}"
            )));
        }
        if width.checked_mul(height).is_none_or(|n| n > MAX_PIXELS) {
            return Err(Error::Dimension(format!(
                "{width}x{height} grid exceeds {MAX_PIXELS} pixels"
            )));
        }
        if !(dx.is_finite() && dx > 0.0 && dy.is_finite() && dy > 0.0) {
            return Err(Error::Dimension(format!(
                "grid spacing must be positive and finite, got dx={dx}, dy={dy}"
            )));
        }
        Ok(Self {
            width,
            height,
            dx,
            dy,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    /// Area element `dx * dy`.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::Dimension(format!(
                "grid mismatch: {}x{} (dx={}, dy={}) vs {}x{} (dx={}, dy={})",
                self.width,
                self.height,
                self.dx,
                self.dy,
                other.width,
                other.height,
                other.dx,
                other.dy
            )));
        }
        Ok(())
    }
}

/// Real values on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        Self {
            spec,
            values: vec![value; spec.len()],
        }
    }

    pub fn from_vec(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Dimension(format!(
                "expected {} values for a {}x{} grid, got {}",
                spec.len(),
                spec.width,
                spec.height,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite value at pixel ({}, {})",
                k % spec.width,
                k / spec.width
            )));
        }
        Ok(Self { spec, values })
    }

    /// Build a field by evaluating `f(i, j)` at every pixel.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(spec.len());
        for j in 0..spec.height {
            for i in 0..spec.width {
                values.push(f(i, j));
            }
        }
        Self { spec, values }
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.spec.index(i, j);
        self.values[k] = value;
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Two-component field `(u, v)` = `(v¹, v²)` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub u: ScalarField,
    pub v: ScalarField,
}

impl VectorField {
    pub fn new(u: ScalarField, v: ScalarField) -> Result<Self> {
        u.spec().check_same(v.spec())?;
        Ok(Self { u, v })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            u: ScalarField::zeros(spec),
            v: ScalarField::zeros(spec),
        }
    }

    pub fn constant(spec: GridSpec, u: f64, v: f64) -> Self {
        Self {
            u: ScalarField::constant(spec, u),
            v: ScalarField::constant(spec, v),
        }
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        self.u.spec()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u.get(i, j), self.v.get(i, j))
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: (f64, f64)) {
        self.u.set(i, j, value.0);
        self.v.set(i, j, value.1);
    }

    /// Per-pixel Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let values = self
            .u
            .values()
            .iter()
            .zip(self.v.values())
            .map(|(a, b)| a.hypot(*b))
            .collect();
        ScalarField {
            spec: *self.spec(),
            values,
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.u
            .values()
            .iter()
            .zip(self.v.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// L∞ distance in the per-pixel 2-norm.
    pub fn max_diff(&self, other: &VectorField) -> f64 {
        self.u
            .values()
            .iter()
            .zip(self.v.values())
            .zip(other.u.values().iter().zip(other.v.values()))
            .fold(0.0, |m, ((a, b), (c, d))| m.max((a - c).hypot(b - d)))
    }

    /// Sum of squared components over all pixels, without the area element.
    pub fn sum_squares(&self) -> f64 {
        self.u
            .values()
            .iter()
            .zip(self.v.values())
            .map(|(a, b)| a * a + b * b)
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Whole-sample reflection: index `-1` maps to `1`, `n` maps to `n - 2`.
#[inline]
fn reflect_across(k: isize, n: usize) -> usize {
    let n = n as isize;
    if k < 0 {
        -k as usize
    } else if k >= n {
        (2 * n - 2 - k) as usize
    } else {
        k as usize
    }
}

/// Half-sample reflection with period `2n`: `-1 -> 0`, `n -> n - 1`.
#[inline]
fn reflect_half(k: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut m = k.rem_euclid(period);
    if m >= n {
        m = period - 1 - m;
    }
    m as usize
}

/// Central-difference gradient. At the border the missing neighbor is the
/// reflection of the inner one, so the normal component is zero there.
pub fn gradient_central(f: &ScalarField) -> VectorField {
    let spec = *f.spec();
    let (w, h) = (spec.width, spec.height);
    let mut u = ScalarField::zeros(spec);
    let mut v = ScalarField::zeros(spec);
    let (sx, sy) = (0.5 / spec.dx, 0.5 / spec.dy);
    for j in 0..h {
        let jm = reflect_across(j as isize - 1, h);
        let jp = reflect_across(j as isize + 1, h);
        for i in 0..w {
            let im = reflect_across(i as isize - 1, w);
            let ip = reflect_across(i as isize + 1, w);
            u.set(i, j, (f.get(ip, j) - f.get(im, j)) * sx);
            v.set(i, j, (f.get(i, jp) - f.get(i, jm)) * sy);
        }
    }
    VectorField { u, v }
}

/// Five-point Laplacian scaled by `1 / (dx * dy)`. Out-of-grid neighbors
/// take the center value, so the border flux is zero and the output sums
/// to zero.
pub fn laplacian_5pt(f: &ScalarField) -> ScalarField {
    let spec = *f.spec();
    let (w, h) = (spec.width, spec.height);
    let scale = 1.0 / spec.cell_area();
    let mut out = ScalarField::zeros(spec);
    for j in 0..h {
        for i in 0..w {
            let c = f.get(i, j);
            let left = if i > 0 { f.get(i - 1, j) } else { c };
            let right = if i + 1 < w { f.get(i + 1, j) } else { c };
            let up = if j > 0 { f.get(i, j - 1) } else { c };
            let down = if j + 1 < h { f.get(i, j + 1) } else { c };
            out.set(i, j, (left + right + up + down - 4.0 * c) * scale);
        }
    }
    out
}

/// Componentwise [`laplacian_5pt`].
pub fn vector_laplacian(field: &VectorField) -> VectorField {
    VectorField {
        u: laplacian_5pt(&field.u),
        v: laplacian_5pt(&field.v),
    }
}

/// Normalized 1D Gaussian taps, radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / denom).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Separable Gaussian smoothing with mirrored borders. `sigma = 0` is the
/// identity.
pub fn gaussian_blur(f: &ScalarField, sigma: f64) -> Result<ScalarField> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Parameter(format!(
            "smoothing sigma must be finite and >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(f.clone());
    }
    let spec = *f.spec();
    let (w, h) = (spec.width, spec.height);
    let taps = gaussian_kernel(sigma);
    let radius = (taps.len() / 2) as isize;

    let mut tmp = ScalarField::zeros(spec);
    for j in 0..h {
        for i in 0..w {
            let acc: f64 = taps
                .iter()
                .enumerate()
                .map(|(t, &wt)| wt * f.get(reflect_half(i as isize + t as isize - radius, w), j))
                .sum();
            tmp.set(i, j, acc);
        }
    }
    let mut out = ScalarField::zeros(spec);
    for j in 0..h {
        for i in 0..w {
            let acc: f64 = taps
                .iter()
                .enumerate()
                .map(|(t, &wt)| wt * tmp.get(i, reflect_half(j as isize + t as isize - radius, h)))
                .sum();
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Sign convention of an edge map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeSign {
    /// `+‖∇I‖²`; its gradient points toward edges.
    #[default]
    Attractive,
    /// `−‖∇I‖²`, the snake-potential convention.
    Potential,
}

/// Squared gradient magnitude of the (optionally smoothed) image.
pub fn edge_map(image: &ScalarField, sigma: f64, sign: EdgeSign) -> Result<ScalarField> {
    let smoothed = gaussian_blur(image, sigma)?;
    let grad = gradient_central(&smoothed);
    let s = match sign {
        EdgeSign::Attractive => 1.0,
        EdgeSign::Potential => -1.0,
    };
    let values = grad
        .u
        .values()
        .iter()
        .zip(grad.v.values())
        .map(|(a, b)| s * (a * a + b * b))
        .collect();
    Ok(ScalarField {
        spec: *image.spec(),
        values,
    })
}

/// Rescale every vector longer than `threshold` to exactly that length.
/// `f64::INFINITY` leaves the field untouched.
pub fn clamp_magnitude(field: &VectorField, threshold: f64) -> Result<VectorField> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Parameter(format!(
            "magnitude threshold must be > 0, got {threshold}"
        )));
    }
    let mut out = field.clone();
    if threshold.is_infinite() {
        return Ok(out);
    }
    for (a, b) in out
        .u
        .values_mut()
        .iter_mut()
        .zip(out.v.values_mut().iter_mut())
    {
        let m = a.hypot(*b);
        if m > threshold {
            let mut s = threshold / m;
            // rounding may land a hair above the threshold
            while (*a * s).hypot(*b * s) > threshold {
                s *= 1.0 - f64::EPSILON;
            }
            *a *= s;
            *b *= s;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: usize, h: usize) -> GridSpec {
        GridSpec::new(w, h).unwrap()
    }

    fn impulse(n: usize, at: (usize, usize)) -> ScalarField {
        let mut f = ScalarField::zeros(grid(n, n));
        f.set(at.0, at.1, 1.0);
        f
    }

    #[test]
    fn rejects_small_grids() {
        assert!(matches!(GridSpec::new(2, 5), Err(Error::Dimension(_))));
        assert!(matches!(GridSpec::new(5, 2), Err(Error::Dimension(_))));
        assert!(GridSpec::new(3, 3).is_ok());
    }

    #[test]
    fn from_vec_rejects_nan_and_bad_length() {
        let s = grid(3, 3);
        assert!(ScalarField::from_vec(s, vec![0.0; 8]).is_err());
        let mut v = vec![0.0; 9];
        v[4] = f64::NAN;
        assert!(ScalarField::from_vec(s, v).is_err());
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = gradient_central(&ScalarField::constant(grid(6, 5), 3.7));
        assert_eq!(g.max_magnitude(), 0.0);
    }

    #[test]
    fn gradient_of_ramp() {
        let f = ScalarField::from_fn(grid(7, 5), |i, _| i as f64);
        let g = gradient_central(&f);
        for j in 0..5 {
            for i in 1..6 {
                assert_eq!(g.get(i, j), (1.0, 0.0));
            }
            // normal component vanishes at the left and right borders
            assert_eq!(g.u.get(0, j), 0.0);
            assert_eq!(g.u.get(6, j), 0.0);
        }
    }

    #[test]
    fn gradient_of_impulse() {
        let g = gradient_central(&impulse(5, (2, 2)));
        let mut expected = VectorField::zeros(grid(5, 5));
        expected.u.set(1, 2, 0.5);
        expected.u.set(3, 2, -0.5);
        expected.v.set(2, 1, 0.5);
        expected.v.set(2, 3, -0.5);
        assert_eq!(g, expected);
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let l = laplacian_5pt(&ScalarField::constant(grid(4, 6), -2.0));
        assert_eq!(l.max_abs(), 0.0);
    }

    #[test]
    fn laplacian_of_quadratic() {
        let f = ScalarField::from_fn(grid(8, 6), |i, _| (i * i) as f64);
        let l = laplacian_5pt(&f);
        for j in 0..6 {
            for i in 1..7 {
                assert_eq!(l.get(i, j), 2.0);
            }
        }
    }

    #[test]
    fn laplacian_of_impulse() {
        let l = laplacian_5pt(&impulse(5, (2, 2)));
        for j in 0..5 {
            for i in 0..5 {
                let want = match (i, j) {
                    (2, 2) => -4.0,
                    (1, 2) | (3, 2) | (2, 1) | (2, 3) => 1.0,
                    _ => 0.0,
                };
                assert_eq!(l.get(i, j), want, "pixel ({i},{j})");
            }
        }
    }

    #[test]
    fn laplacian_corner_impulse_sums_to_zero() {
        let l = laplacian_5pt(&impulse(4, (0, 0)));
        assert_eq!(l.get(0, 0), -2.0);
        assert_eq!(l.values().iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn kernel_is_normalized_with_3_sigma_radius() {
        let k = gaussian_kernel(1.2);
        assert_eq!(k.len(), 2 * 4 + 1);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(gaussian_kernel(0.0), vec![1.0]);
    }

    #[test]
    fn blur_preserves_constants_and_mass() {
        let c = ScalarField::constant(grid(9, 7), 5.0);
        let b = gaussian_blur(&c, 1.5).unwrap();
        assert!(b.values().iter().all(|v| (v - 5.0).abs() < 1e-12));
        let imp = impulse(11, (5, 5));
        let b = gaussian_blur(&imp, 1.0).unwrap();
        assert!((b.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(gaussian_blur(&imp, -1.0).is_err());
    }

    #[test]
    fn edge_map_of_constant_is_zero() {
        let c = ScalarField::constant(grid(6, 6), 42.0);
        for sign in [EdgeSign::Attractive, EdgeSign::Potential] {
            assert_eq!(edge_map(&c, 1.0, sign).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn edge_map_of_vertical_step() {
        let img = ScalarField::from_fn(grid(10, 6), |i, _| if i < 5 { 0.0 } else { 100.0 });
        let att = edge_map(&img, 0.0, EdgeSign::Attractive).unwrap();
        let pot = edge_map(&img, 0.0, EdgeSign::Potential).unwrap();
        for j in 0..6 {
            for i in 0..10 {
                let want = if i == 4 || i == 5 { 2500.0 } else { 0.0 };
                assert_eq!(att.get(i, j), want);
                assert_eq!(pot.get(i, j), -att.get(i, j));
            }
        }
    }

    #[test]
    fn clamp_cases() {
        let s = grid(3, 3);
        let small = VectorField::constant(s, 0.3, 0.4);
        assert_eq!(clamp_magnitude(&small, 1.0).unwrap(), small);
        let big = VectorField::constant(s, 3.0, 4.0);
        let c = clamp_magnitude(&big, 1.0).unwrap();
        let (a, b) = c.get(1, 1);
        assert!((a - 0.6).abs() < 1e-15 && (b - 0.8).abs() < 1e-15);
        assert_eq!(clamp_magnitude(&big, f64::INFINITY).unwrap(), big);
        assert!(clamp_magnitude(&big, 0.0).is_err());
        assert!(clamp_magnitude(&big, -1.0).is_err());
        assert!(clamp_magnitude(&big, f64::NAN).is_err());
    }

    #[test]
    fn half_reflection_wraps() {
        assert_eq!(reflect_half(-1, 5), 0);
        assert_eq!(reflect_half(-2, 5), 1);
        assert_eq!(reflect_half(5, 5), 4);
        assert_eq!(reflect_half(6, 5), 3);
        assert_eq!(reflect_half(-7, 3), 0);
    }
}
