//! Explicit diffusion-reaction iteration for GVF and GGVF fields.
//!
//! One step of the scheme, per component and per inside pixel:
//!
//! ```text
//! v' = (1 − h·Δt)·v + h·Δt·∂f + r·(Σ neighbors − 4·v),   r = g·Δt / (dx·dy)
//! ```
//!
//! The update is Jacobi: every pixel reads only the previous iterate.
//! Iteration stops once the largest per-pixel change (2-norm of the 2-vector)
//! drops below `delta`, or at `max_iter`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{clamp_magnitude, gradient_central, GridSpec, ScalarField, VectorField};
use crate::mask::{Boundary, DomainMask, Stencil};

pub const DEFAULT_DT: f64 = 0.12;
pub const DEFAULT_DELTA: f64 = 1e-4;
pub const DEFAULT_MAX_ITER: usize = 20_000;

/// A run is declared divergent once `max |v|` exceeds the initial field's
/// largest magnitude by this factor. A stable run obeys a maximum principle
/// and never grows at all.
pub const DIVERGENCE_GROWTH: f64 = 1e6;

/// Diffusion or reaction weight: one value for the whole grid or one per pixel.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Uniform(f64),
    PerPixel(ScalarField),
}

impl Coefficient {
    #[inline]
    pub(crate) fn at(&self, k: usize) -> f64 {
        match self {
            Coefficient::Uniform(c) => *c,
            Coefficient::PerPixel(f) => f.values()[k],
        }
    }

    /// Pixelwise maximum.
    pub fn max(&self) -> f64 {
        match self {
            Coefficient::Uniform(c) => *c,
            Coefficient::PerPixel(f) => f.max(),
        }
    }

    pub fn min(&self) -> f64 {
        match self {
            Coefficient::Uniform(c) => *c,
            Coefficient::PerPixel(f) => f.min(),
        }
    }

    pub fn uniform(&self) -> Option<f64> {
        match self {
            Coefficient::Uniform(c) => Some(*c),
            Coefficient::PerPixel(_) => None,
        }
    }

    fn check_grid(&self, spec: &GridSpec) -> Result<()> {
        match self {
            Coefficient::Uniform(_) => Ok(()),
            Coefficient::PerPixel(f) => f.spec().check_same(spec),
        }
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Uniform(c)
    }
}

/// Coefficients and controls for a GVF solve.
#[derive(Debug, Clone, PartialEq)]
pub struct GvfParams {
    /// Diffusion weight g.
    pub g: Coefficient,
    /// Reaction weight h.
    pub h: Coefficient,
    /// Time step Δt.
    pub dt: f64,
    /// Termination threshold δ on the max per-pixel change.
    pub delta: f64,
    /// Cap T on the initial field magnitude; `INFINITY` disables clamping.
    pub threshold: f64,
    pub max_iter: usize,
    /// Solve even when [`validate_params`] reports violations.
    pub force: bool,
    pub boundary: Boundary,
}

impl Default for GvfParams {
    fn default() -> Self {
        Self {
            g: Coefficient::Uniform(2.0),
            h: Coefficient::Uniform(0.02),
            dt: DEFAULT_DT,
            delta: DEFAULT_DELTA,
            threshold: f64::INFINITY,
            max_iter: DEFAULT_MAX_ITER,
            force: false,
            boundary: Boundary::Mirror,
        }
    }
}

impl GvfParams {
    pub fn new(g: f64, h: f64) -> Self {
        Self {
            g: Coefficient::Uniform(g),
            h: Coefficient::Uniform(h),
            ..Self::default()
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_force(mut self, force: bool) -> Self {
        self.force = force;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Domain checks that are errors rather than constraint violations.
    fn check_domain(&self, spec: &GridSpec) -> Result<()> {
        self.g.check_grid(spec)?;
        self.h.check_grid(spec)?;
        let finite_nonneg = |c: &Coefficient| c.min() >= 0.0 && c.max().is_finite();
        if !finite_nonneg(&self.g) || !finite_nonneg(&self.h) {
            return Err(Error::Parameter(
                "g and h must be finite and nonnegative".into(),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::Parameter(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if self.threshold.is_nan() || self.threshold <= 0.0 {
            return Err(Error::Parameter(format!(
                "threshold must be > 0, got {}",
                self.threshold
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// A violated stability or well-posedness constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    /// `r = g·Δt/(dx·dy) < 1/4`
    StabilityRatio { r: f64 },
    /// `g·Δt < 1`
    DiffusionStep { value: f64 },
    /// `h·Δt < 1`
    ReactionStep { value: f64 },
    /// `8r + h·Δt < 2`, which keeps the checkerboard mode from growing when
    /// `r < 1/4` and `h` is close to `g`.
    Amplification { value: f64 },
    /// `h < g`
    ReactionNotBelowDiffusion { h: f64, g: f64 },
    /// g and h both zero at a pixel.
    VanishingCoefficients { x: usize, y: usize },
    /// The stencil is exact only for `dx = dy = 1`.
    NonUnitSpacing { dx: f64, dy: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::StabilityRatio { r } => write!(f, "r < 1/4 violated (r = {r})"),
            Violation::DiffusionStep { value } => write!(f, "g*dt < 1 violated (g*dt = {value})"),
            Violation::ReactionStep { value } => write!(f, "h*dt < 1 violated (h*dt = {value})"),
            Violation::Amplification { value } => {
                write!(f, "8r + h*dt < 2 violated (8r + h*dt = {value})")
            }
            Violation::ReactionNotBelowDiffusion { h, g } => {
                write!(f, "h < g violated (h = {h}, g = {g})")
            }
            Violation::VanishingCoefficients { x, y } => {
                write!(f, "g and h are both zero at pixel ({x}, {y})")
            }
            Violation::NonUnitSpacing { dx, dy } => {
                write!(f, "dx = dy = 1 required (dx = {dx}, dy = {dy})")
            }
        }
    }
}

/// Every violated constraint among `r < 1/4`, `gΔt < 1`, `hΔt < 1`, `h < g`
/// and `8r + hΔt < 2`, plus nonvanishing coefficients and unit spacing. Per-pixel coefficients
/// are checked through their maxima; `h < g` is checked pixel by pixel.
pub fn validate_params(p: &GvfParams, spec: &GridSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.dx != 1.0 || spec.dy != 1.0 {
        out.push(Violation::NonUnitSpacing {
            dx: spec.dx,
            dy: spec.dy,
        });
    }
    let g_max = p.g.max();
    let h_max = p.h.max();
    let r = g_max * p.dt / spec.cell_area();
    if !(r < 0.25) {
        out.push(Violation::StabilityRatio { r });
    }
    if !(g_max * p.dt < 1.0) {
        out.push(Violation::DiffusionStep {
            value: g_max * p.dt,
        });
    }
    if !(h_max * p.dt < 1.0) {
        out.push(Violation::ReactionStep {
            value: h_max * p.dt,
        });
    }
    if r < 0.25 {
        let amplification = |g: f64, h: f64| 8.0 * g * p.dt / spec.cell_area() + h * p.dt;
        let worst = match (&p.g, &p.h) {
            (Coefficient::Uniform(g), Coefficient::Uniform(h)) => amplification(*g, *h),
            _ => (0..spec.len())
                .map(|k| amplification(p.g.at(k), p.h.at(k)))
                .fold(f64::NEG_INFINITY, f64::max),
        };
        if !(worst < 2.0) {
            out.push(Violation::Amplification { value: worst });
        }
    }
    match (&p.g, &p.h) {
        (Coefficient::Uniform(g), Coefficient::Uniform(h)) => {
            if !(h < g) {
                out.push(Violation::ReactionNotBelowDiffusion { h: *h, g: *g });
            }
            if *g == 0.0 && *h == 0.0 {
                out.push(Violation::VanishingCoefficients { x: 0, y: 0 });
            }
        }
        _ => {
            let n = spec.len();
            if let Some(k) = (0..n).find(|&k| !(p.h.at(k) < p.g.at(k))) {
                out.push(Violation::ReactionNotBelowDiffusion {
                    h: p.h.at(k),
                    g: p.g.at(k),
                });
            }
            if let Some(k) = (0..n).find(|&k| p.h.at(k) == 0.0 && p.g.at(k) == 0.0) {
                out.push(Violation::VanishingCoefficients {
                    x: k % spec.width,
                    y: k / spec.width,
                });
            }
        }
    }
    out
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub field: VectorField,
    /// NI: number of steps taken.
    pub iterations: usize,
    pub converged: bool,
    /// Max per-pixel change of each step.
    pub change_history: Vec<f64>,
    /// `Σ ‖v' − v‖² · dx·dy` of each step.
    pub energy_history: Vec<f64>,
    /// |Ω|.
    pub inside_pixels: usize,
    /// Total pixel updates performed (`iterations · |Ω|`).
    pub pixel_updates: u64,
}

impl SolveReport {
    pub fn final_change(&self) -> f64 {
        self.change_history.last().copied().unwrap_or(0.0)
    }
}

/// Per-step statistics.
#[derive(Debug, Clone, Copy)]
struct StepStats {
    change: f64,
    energy: f64,
    peak: f64,
}

/// Reusable state for stepping one problem.
struct Stepper<'a> {
    stencil: Stencil,
    grad: &'a VectorField,
    g: &'a Coefficient,
    h: &'a Coefficient,
    dt: f64,
    cell_area: f64,
}

impl<'a> Stepper<'a> {
    fn new(grad: &'a VectorField, p: &'a GvfParams, mask: &DomainMask) -> Self {
        Self {
            stencil: Stencil::new(mask, p.boundary),
            grad,
            g: &p.g,
            h: &p.h,
            dt: p.dt,
            cell_area: grad.spec().cell_area(),
        }
    }

    /// Writes the next iterate into `next`; only inside pixels are touched.
    fn step(&self, cur: &VectorField, next: &mut VectorField) -> StepStats {
        let (cu, cv) = (cur.u.values(), cur.v.values());
        let (gu, gv) = (self.grad.u.values(), self.grad.v.values());
        let mut change: f64 = 0.0;
        let mut energy = 0.0;
        let mut peak: f64 = 0.0;
        let inv_area = 1.0 / self.cell_area;
        {
            let nu = next.u.values_mut();
            for (n, &c) in self.stencil.cells.iter().enumerate() {
                let hdt = self.h.at(c) * self.dt;
                let r = self.g.at(c) * self.dt * inv_area;
                nu[c] = (1.0 - hdt) * cu[c] + hdt * gu[c] + r * self.stencil.apply_at(cu, n);
            }
        }
        {
            let nv = next.v.values_mut();
            for (n, &c) in self.stencil.cells.iter().enumerate() {
                let hdt = self.h.at(c) * self.dt;
                let r = self.g.at(c) * self.dt * inv_area;
                nv[c] = (1.0 - hdt) * cv[c] + hdt * gv[c] + r * self.stencil.apply_at(cv, n);
            }
        }
        let (nu, nv) = (next.u.values(), next.v.values());
        for &c in &self.stencil.cells {
            let du = nu[c] - cu[c];
            let dv = nv[c] - cv[c];
            let d2 = du * du + dv * dv;
            change = change.max(d2);
            energy += d2;
            peak = peak.max(nu[c].hypot(nv[c]));
            if !d2.is_finite() {
                change = f64::INFINITY;
            }
        }
        StepStats {
            change: change.sqrt(),
            energy: energy * self.cell_area,
            peak,
        }
    }
}

fn check_grids(grad: &VectorField, mask: &DomainMask) -> Result<()> {
    grad.spec().check_same(mask.spec())
}

/// One explicit step from `v`. Outside pixels are copied unchanged.
pub fn gvf_step(
    v: &VectorField,
    grad_f: &VectorField,
    p: &GvfParams,
    mask: &DomainMask,
) -> Result<VectorField> {
    v.spec().check_same(grad_f.spec())?;
    check_grids(grad_f, mask)?;
    p.g.check_grid(v.spec())?;
    p.h.check_grid(v.spec())?;
    let stepper = Stepper::new(grad_f, p, mask);
    let mut next = v.clone();
    stepper.step(v, &mut next);
    Ok(next)
}

/// `v(0) = clamp(∇f, T)`.
pub fn initial_field(f: &ScalarField, threshold: f64) -> Result<VectorField> {
    clamp_magnitude(&gradient_central(f), threshold)
}

/// Solve from the edge map `f`: `v(0) = clamp(∇f, T)`, then iterate.
pub fn gvf_solve(f: &ScalarField, p: &GvfParams, mask: &DomainMask) -> Result<SolveReport> {
    p.check_domain(f.spec())?;
    let grad = initial_field(f, p.threshold)?;
    solve_from_gradient(&grad, p, mask)
}

/// Iterate from `v(0) = grad_f` (already clamped by the caller).
pub fn solve_from_gradient(
    grad_f: &VectorField,
    p: &GvfParams,
    mask: &DomainMask,
) -> Result<SolveReport> {
    let spec = *grad_f.spec();
    check_grids(grad_f, mask)?;
    p.check_domain(&spec)?;
    if !p.force {
        let violations = validate_params(p, &spec);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
    }

    let mut grad = grad_f.clone();
    mask.apply(&mut grad.u);
    mask.apply(&mut grad.v);
    let stepper = Stepper::new(&grad, p, mask);
    let scale = grad.max_magnitude();

    let mut cur = grad.clone();
    let mut next = grad.clone();
    let mut change_history = Vec::new();
    let mut energy_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=p.max_iter {
        let stats = stepper.step(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        iterations = it;
        if !stats.change.is_finite()
            || !stats.peak.is_finite()
            || stats.peak > DIVERGENCE_GROWTH * scale
        {
            return Err(Error::Diverged {
                iteration: it,
                magnitude: stats.peak,
            });
        }
        change_history.push(stats.change);
        energy_history.push(stats.energy);
        if stats.change < p.delta {
            converged = true;
            break;
        }
    }

    let inside = stepper.stencil.cells.len();
    Ok(SolveReport {
        field: cur,
        iterations,
        converged,
        change_history,
        energy_history,
        inside_pixels: inside,
        pixel_updates: iterations as u64 * inside as u64,
    })
}

/// Controls for a generalized GVF solve.
#[derive(Debug, Clone, PartialEq)]
pub struct GgvfParams {
    /// Edge sensitivity K in `g = exp(−‖∇f‖²/K²)`.
    pub k: f64,
    pub dt: f64,
    pub delta: f64,
    pub threshold: f64,
    pub max_iter: usize,
    pub force: bool,
    pub boundary: Boundary,
}

impl Default for GgvfParams {
    fn default() -> Self {
        Self {
            k: 100.0,
            dt: DEFAULT_DT,
            delta: DEFAULT_DELTA,
            threshold: f64::INFINITY,
            max_iter: DEFAULT_MAX_ITER,
            force: false,
            boundary: Boundary::Mirror,
        }
    }
}

/// `g(x) = exp(−‖∇f(x)‖² / K²)`.
pub fn ggvf_weight(grad: &VectorField, k: f64) -> Result<ScalarField> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Parameter(format!("K must be > 0, got {k}")));
    }
    let k2 = k * k;
    Ok(grad.magnitude().map(|m| (-(m * m) / k2).exp()))
}

/// Stability for GGVF is checked against the worst case `g = 1`.
pub fn validate_ggvf(p: &GgvfParams, spec: &GridSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.dx != 1.0 || spec.dy != 1.0 {
        out.push(Violation::NonUnitSpacing {
            dx: spec.dx,
            dy: spec.dy,
        });
    }
    let r = p.dt / spec.cell_area();
    if !(r < 0.25) {
        out.push(Violation::StabilityRatio { r });
    }
    if !(p.dt < 1.0) {
        out.push(Violation::ReactionStep { value: p.dt });
    }
    out
}

/// Generalized GVF: diffusion weight `g(x)` from the initial gradient and
/// reaction weight `1 − g(x)`.
pub fn ggvf_solve(f: &ScalarField, p: &GgvfParams, mask: &DomainMask) -> Result<SolveReport> {
    let grad = initial_field(f, p.threshold)?;
    ggvf_solve_from_gradient(&grad, p, mask)
}

pub fn ggvf_solve_from_gradient(
    grad_f: &VectorField,
    p: &GgvfParams,
    mask: &DomainMask,
) -> Result<SolveReport> {
    if !p.force {
        let violations = validate_ggvf(p, grad_f.spec());
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
    }
    solve_from_gradient(grad_f, &p.per_pixel(grad_f)?, mask)
}

impl GgvfParams {
    /// The equivalent constant-form parameters: `g(x)` from `grad_f` and
    /// `h(x) = 1 − g(x)`. Validation is left to [`validate_ggvf`].
    pub fn per_pixel(&self, grad_f: &VectorField) -> Result<GvfParams> {
        let g = ggvf_weight(grad_f, self.k)?;
        let h = g.map(|w| 1.0 - w);
        Ok(GvfParams {
            g: Coefficient::PerPixel(g),
            h: Coefficient::PerPixel(h),
            dt: self.dt,
            delta: self.delta,
            threshold: self.threshold,
            max_iter: self.max_iter,
            force: true,
            boundary: self.boundary,
        })
    }
}

/// Discrete Laplacian over Ω with the stencil's boundary rule, scaled by
/// `1/(dx·dy)`. Outside pixels are zero.
pub(crate) fn masked_laplacian(field: &VectorField, stencil: &Stencil) -> VectorField {
    let spec = *field.spec();
    let inv_area = 1.0 / spec.cell_area();
    let mut out = VectorField::zeros(spec);
    let (fu, fv) = (field.u.values(), field.v.values());
    for (n, &c) in stencil.cells.iter().enumerate() {
        out.u.values_mut()[c] = stencil.apply_at(fu, n) * inv_area;
        out.v.values_mut()[c] = stencil.apply_at(fv, n) * inv_area;
    }
    out
}

/// `max_Ω ‖g·Δv + h·(∇f − v)‖₂`, the right-hand side of the evolution
/// equation at `v`. `∇f` is clamped with `p.threshold`.
pub fn steady_residual(
    v: &VectorField,
    f: &ScalarField,
    p: &GvfParams,
    mask: &DomainMask,
) -> Result<f64> {
    let grad = initial_field(f, p.threshold)?;
    steady_residual_from_gradient(v, &grad, p, mask)
}

pub fn steady_residual_from_gradient(
    v: &VectorField,
    grad_f: &VectorField,
    p: &GvfParams,
    mask: &DomainMask,
) -> Result<f64> {
    v.spec().check_same(grad_f.spec())?;
    check_grids(grad_f, mask)?;
    p.g.check_grid(v.spec())?;
    p.h.check_grid(v.spec())?;
    let stencil = Stencil::new(mask, p.boundary);
    let lap = masked_laplacian(v, &stencil);
    let mut worst: f64 = 0.0;
    for &c in &stencil.cells {
        let (g, h) = (p.g.at(c), p.h.at(c));
        let ru = g * lap.u.values()[c] + h * (grad_f.u.values()[c] - v.u.values()[c]);
        let rv = g * lap.v.values()[c] + h * (grad_f.v.values()[c] - v.v.values()[c]);
        worst = worst.max(ru.hypot(rv));
    }
    Ok(worst)
}

/// Closed-form `v(n)` for `n ∈ 1..=4` as a polynomial in the Laplacian,
/// compared against `n` explicit steps. Returns the L∞ (per-pixel 2-norm)
/// difference.
pub fn expansion_check(f: &ScalarField, p: &GvfParams, n: usize) -> Result<f64> {
    let (Some(g), Some(h)) = (p.g.uniform(), p.h.uniform()) else {
        return Err(Error::Unsupported(
            "expansion check needs uniform g and h".into(),
        ));
    };
    if !(1..=4).contains(&n) {
        return Err(Error::Parameter(format!("n must be in 1..=4, got {n}")));
    }
    let spec = *f.spec();
    let mask = DomainMask::full(spec);
    let grad = initial_field(f, p.threshold)?;

    let a = p.dt * g;
    let b = h * p.dt;
    // coefficient of (Δt·g)^k Δ^k ∇f, k = 1..=n
    let coeffs: Vec<f64> = match n {
        1 => vec![1.0],
        2 => vec![2.0 - b, 1.0],
        3 => vec![3.0 - 3.0 * b + b * b, 3.0 - 2.0 * b, 1.0],
        _ => vec![
            4.0 - 6.0 * b + 4.0 * b * b - b * b * b,
            6.0 - 8.0 * b + 3.0 * b * b,
            4.0 - 3.0 * b,
            1.0,
        ],
    };

    let stencil = Stencil::new(&mask, p.boundary);
    let mut closed = grad.clone();
    let mut power = grad.clone();
    let mut ak = 1.0;
    for c in coeffs {
        power = masked_laplacian(&power, &stencil);
        ak *= a;
        let s = ak * c;
        for (dst, src) in closed.u.values_mut().iter_mut().zip(power.u.values()) {
            *dst += s * src;
        }
        for (dst, src) in closed.v.values_mut().iter_mut().zip(power.v.values()) {
            *dst += s * src;
        }
    }

    let forced = GvfParams {
        force: true,
        ..p.clone()
    };
    let mut v = grad.clone();
    for _ in 0..n {
        v = gvf_step(&v, &grad, &forced, &mask)?;
    }
    Ok(closed.max_diff(&v))
}
