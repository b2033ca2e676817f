//! Solve domains: the full rectangle, an outer window, and windows with
//! rectangular holes (multiply connected domains).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, ScalarField};

/// Axis-aligned pixel rectangle `[x, x + w) × [y, y + h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.x && i < self.x + self.w && j >= self.y && j < self.y + self.h
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    /// Grow by `margin` on every side, clipped to the grid.
    pub fn grow_clipped(&self, margin: usize, spec: &GridSpec) -> Rect {
        let x0 = self.x.saturating_sub(margin);
        let y0 = self.y.saturating_sub(margin);
        let x1 = (self.x + self.w + margin).min(spec.width);
        let y1 = (self.y + self.h + margin).min(spec.height);
        Rect::new(x0, y0, x1 - x0, y1 - y0)
    }

    pub fn fits(&self, spec: &GridSpec) -> bool {
        self.x + self.w <= spec.width && self.y + self.h <= spec.height
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x, self.y, self.w, self.h)
    }
}

impl FromStr for Rect {
    type Err = String;

    /// Parses `x,y,w,h`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<_> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(format!("expected x,y,w,h but got {s:?}"));
        }
        let mut n = [0usize; 4];
        for (slot, p) in n.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|e| format!("bad rectangle component {p:?}: {e}"))?;
        }
        Ok(Rect::new(n[0], n[1], n[2], n[3]))
    }
}

impl From<Rect> for String {
    fn from(r: Rect) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Rect {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, Self::Error> {
        s.parse()
    }
}

/// Per-pixel membership in the solve domain Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    spec: GridSpec,
    inside: Vec<bool>,
}

impl DomainMask {
    pub fn full(spec: GridSpec) -> Self {
        Self {
            spec,
            inside: vec![true; spec.len()],
        }
    }

    pub fn from_vec(spec: GridSpec, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != spec.len() {
            return Err(Error::Dimension(format!(
                "mask has {} flags for a {}-pixel grid",
                inside.len(),
                spec.len()
            )));
        }
        if !inside.iter().any(|&b| b) {
            return Err(Error::Parameter("domain mask has no inside pixels".into()));
        }
        Ok(Self { spec, inside })
    }

    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut inside = Vec::with_capacity(spec.len());
        for j in 0..spec.height {
            for i in 0..spec.width {
                inside.push(f(i, j));
            }
        }
        Self::from_vec(spec, inside)
    }

    /// Only the pixels of `window` are active.
    pub fn window(spec: GridSpec, window: Rect) -> Result<Self> {
        Self::from_fn(spec, |i, j| window.contains(i, j))
    }

    /// Remove a rectangular hole from the domain.
    pub fn with_hole(mut self, hole: Rect) -> Result<Self> {
        if !hole.fits(&self.spec) {
            return Err(Error::Parameter(format!(
                "hole {hole} does not fit a {}x{} grid",
                self.spec.width, self.spec.height
            )));
        }
        for j in hole.y..hole.y + hole.h {
            for i in hole.x..hole.x + hole.w {
                let k = self.spec.index(i, j);
                self.inside[k] = false;
            }
        }
        Self::from_vec(self.spec, self.inside)
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        self.inside[self.spec.index(i, j)]
    }

    #[inline]
    pub fn flags(&self) -> &[bool] {
        &self.inside
    }

    pub fn is_full(&self) -> bool {
        self.inside.iter().all(|&b| b)
    }

    /// |Ω|.
    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Inside pixel with at least one 4-neighbor outside Ω or off the grid.
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        if !self.is_inside(i, j) {
            return false;
        }
        let (w, h) = (self.spec.width, self.spec.height);
        i == 0
            || j == 0
            || i + 1 == w
            || j + 1 == h
            || !self.is_inside(i - 1, j)
            || !self.is_inside(i + 1, j)
            || !self.is_inside(i, j - 1)
            || !self.is_inside(i, j + 1)
    }

    /// Zero every value outside Ω.
    pub fn apply(&self, f: &mut ScalarField) {
        for (v, &inside) in f.values_mut().iter_mut().zip(&self.inside) {
            if !inside {
                *v = 0.0;
            }
        }
    }
}

/// How the five-point stencil treats neighbors that are off the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Zero normal derivative: the missing neighbor takes the center value.
    #[default]
    Mirror,
    /// Wrap around the grid edges.
    Periodic,
}

/// Precomputed neighbor table over the inside pixels of a mask. Neighbors
/// outside Ω always resolve to the center pixel.
#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    pub(crate) cells: Vec<usize>,
    pub(crate) neighbors: Vec<[usize; 4]>,
}

impl Stencil {
    pub(crate) fn new(mask: &DomainMask, boundary: Boundary) -> Self {
        let spec = mask.spec();
        let (w, h) = (spec.width, spec.height);
        let mut cells = Vec::with_capacity(mask.count());
        let mut neighbors = Vec::with_capacity(mask.count());
        for j in 0..h {
            for i in 0..w {
                let c = spec.index(i, j);
                if !mask.inside[c] {
                    continue;
                }
                let pick = |ii: isize, jj: isize| -> usize {
                    let (ii, jj) = match boundary {
                        Boundary::Mirror => {
                            if ii < 0 || jj < 0 || ii >= w as isize || jj >= h as isize {
                                return c;
                            }
                            (ii as usize, jj as usize)
                        }
                        Boundary::Periodic => (
                            ii.rem_euclid(w as isize) as usize,
                            jj.rem_euclid(h as isize) as usize,
                        ),
                    };
                    let k = spec.index(ii, jj);
                    if mask.inside[k] {
                        k
                    } else {
                        c
                    }
                };
                let (ii, jj) = (i as isize, j as isize);
                cells.push(c);
                neighbors.push([
                    pick(ii - 1, jj),
                    pick(ii + 1, jj),
                    pick(ii, jj - 1),
                    pick(ii, jj + 1),
                ]);
            }
        }
        Self { cells, neighbors }
    }

    /// Unscaled `Σ neighbors − 4·center` at stencil entry `n`.
    #[inline]
    pub(crate) fn apply_at(&self, values: &[f64], n: usize) -> f64 {
        let c = self.cells[n];
        let [a, b, d, e] = self.neighbors[n];
        values[a] + values[b] + values[d] + values[e] - 4.0 * values[c]
    }
}
