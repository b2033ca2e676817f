//! End-to-end runs: image, edge map, clamped gradient, GVF or GGVF over the
//! chosen domain, an optional snake, and the files describing the run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{edge_map, EdgeSign, GridSpec, ScalarField, VectorField};
use crate::io::{self, RenderMode};
use crate::mask::{Boundary, DomainMask, Rect};
use crate::snake::{snake_evolve, Snake, SnakeParams, TensileSign};
use crate::solver::{
    ggvf_solve_from_gradient, initial_field, solve_from_gradient, steady_residual_from_gradient,
    GgvfParams, GvfParams, SolveReport,
};
use crate::synth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Gvf,
    Ggvf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    #[default]
    U,
    Disk,
    BoxHole,
}

/// Everything a run depends on. JSON config files use the same kebab-case
/// keys as the command-line flags; missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct RunConfig {
    /// PGM input; when absent a synthetic `shape` is generated.
    pub input: Option<PathBuf>,
    pub shape: Shape,
    pub width: usize,
    pub height: usize,
    /// Disk center and radius; default to the grid center and a quarter of
    /// the shorter side.
    pub cx: Option<f64>,
    pub cy: Option<f64>,
    pub radius: Option<f64>,
    /// Hole of the box-hole shape; defaults to the middle third of the box.
    pub hole: Option<Rect>,

    /// Gaussian smoothing of the image before the edge map.
    pub sigma: f64,
    pub method: Method,
    pub g: f64,
    pub h: f64,
    pub dt: f64,
    pub delta: f64,
    /// Iteration cap.
    pub t_max: usize,
    /// Clamp T on `‖∇f‖`; `null` means no clamping.
    pub threshold: Option<f64>,
    pub k: f64,
    /// Solve only within this margin around the object's bounding box.
    pub outer_margin: Option<usize>,
    /// Rectangular hole excluded from the domain.
    pub inner_box: Option<Rect>,
    pub force: bool,
    pub periodic: bool,

    pub snake: bool,
    pub b: f64,
    pub gamma: f64,
    pub step: f64,
    pub eps: f64,
    pub snake_max_iter: usize,
    pub spacing: f64,
    /// Defaults to [`TensileSign::Smoothing`], unlike [`SnakeParams`].
    pub tensile_sign: TensileSign,
    pub normalize_force: bool,
    /// Scale the solved field to unit peak magnitude before it drives the
    /// snake.
    pub unit_peak: bool,
    /// Initial circle; defaults to the grid center and 0.45 of the shorter
    /// side.
    pub init_cx: Option<f64>,
    pub init_cy: Option<f64>,
    pub init_radius: Option<f64>,
    pub snaxels: usize,

    pub arrow_stride: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let gvf = GvfParams::default();
        let snake = SnakeParams::default();
        Self {
            input: None,
            shape: Shape::U,
            width: 128,
            height: 128,
            cx: None,
            cy: None,
            radius: None,
            hole: None,
            sigma: 1.0,
            method: Method::Gvf,
            g: 2.0,
            h: 0.02,
            dt: gvf.dt,
            delta: gvf.delta,
            t_max: gvf.max_iter,
            threshold: None,
            k: GgvfParams::default().k,
            outer_margin: None,
            inner_box: None,
            force: false,
            periodic: false,
            snake: false,
            b: snake.b,
            gamma: snake.gamma,
            step: snake.step,
            eps: snake.eps,
            snake_max_iter: snake.max_iter,
            spacing: snake.resample_spacing,
            tensile_sign: TensileSign::Smoothing,
            normalize_force: snake.normalize_force,
            unit_peak: true,
            init_cx: None,
            init_cy: None,
            init_radius: None,
            snaxels: 120,
            arrow_stride: io::render::DEFAULT_ARROW_STRIDE,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parameter(format!("config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    fn threshold_value(&self) -> f64 {
        self.threshold.unwrap_or(f64::INFINITY)
    }

    fn boundary(&self) -> Boundary {
        if self.periodic {
            Boundary::Periodic
        } else {
            Boundary::Mirror
        }
    }

    pub fn gvf_params(&self) -> GvfParams {
        GvfParams::new(self.g, self.h)
            .with_dt(self.dt)
            .with_delta(self.delta)
            .with_threshold(self.threshold_value())
            .with_max_iter(self.t_max)
            .with_force(self.force)
            .with_boundary(self.boundary())
    }

    pub fn ggvf_params(&self) -> GgvfParams {
        GgvfParams {
            k: self.k,
            dt: self.dt,
            delta: self.delta,
            threshold: self.threshold_value(),
            max_iter: self.t_max,
            force: self.force,
            boundary: self.boundary(),
        }
    }

    pub fn snake_params(&self) -> SnakeParams {
        SnakeParams {
            b: self.b,
            gamma: self.gamma,
            step: self.step,
            eps: self.eps,
            max_iter: self.snake_max_iter,
            resample_spacing: self.spacing,
            tensile_sign: self.tensile_sign,
            normalize_force: self.normalize_force,
        }
    }

    pub fn initial_snake(&self, spec: &GridSpec) -> Result<Snake> {
        let (w, h) = (spec.width as f64, spec.height as f64);
        Snake::circle(
            self.init_cx.unwrap_or((w - 1.0) / 2.0),
            self.init_cy.unwrap_or((h - 1.0) / 2.0),
            self.init_radius.unwrap_or(0.45 * w.min(h)),
            self.snaxels,
        )
    }
}

/// The configured input: a PGM file or a synthetic shape.
pub fn load_image(cfg: &RunConfig) -> Result<ScalarField> {
    if let Some(path) = &cfg.input {
        return io::read_pgm(path);
    }
    synth_image(cfg)
}

pub fn synth_image(cfg: &RunConfig) -> Result<ScalarField> {
    let (w, h) = (cfg.width, cfg.height);
    match cfg.shape {
        Shape::U => synth::synth_ushape(w, h),
        Shape::Disk => synth::synth_disk(
            w,
            h,
            cfg.cx.unwrap_or((w as f64 - 1.0) / 2.0),
            cfg.cy.unwrap_or((h as f64 - 1.0) / 2.0),
            cfg.radius.unwrap_or(w.min(h) as f64 / 4.0),
        ),
        Shape::BoxHole => {
            let hole = match cfg.hole {
                Some(r) => r,
                None => {
                    let b = synth::box_outline(w, h)?;
                    Rect::new(b.x + b.w / 3, b.y + b.h / 3, b.w / 3, b.h / 3)
                }
            };
            synth::synth_box_with_hole(w, h, hole)
        }
    }
}

/// Bounding box of the edge map where it exceeds a thousandth of its peak.
pub fn object_bbox(edge: &ScalarField) -> Option<Rect> {
    let cut = edge.max_abs() * 1e-3;
    if cut == 0.0 {
        return None;
    }
    synth::support_bbox(&edge.map(|x| if x.abs() >= cut { 1.0 } else { 0.0 }))
}

/// Ω from the outer margin and inner box. Without an outer margin the
/// window is the whole grid; a featureless image has no object to frame.
pub fn build_mask(
    spec: GridSpec,
    edge: &ScalarField,
    outer_margin: Option<usize>,
    inner_box: Option<Rect>,
) -> Result<DomainMask> {
    let mut mask = match (outer_margin, object_bbox(edge)) {
        (Some(margin), Some(bbox)) => DomainMask::window(spec, bbox.grow_clipped(margin, &spec))?,
        _ => DomainMask::full(spec),
    };
    if let Some(hole) = inner_box {
        mask = mask.with_hole(hole)?;
    }
    Ok(mask)
}

/// Result of the field stage of a run.
#[derive(Debug, Clone)]
pub struct Solved {
    pub report: SolveReport,
    pub residual: f64,
    pub mask: DomainMask,
    pub wall_ms: f64,
}

/// Clamp, mask and solve starting from an edge map.
pub fn solve_edge_map(cfg: &RunConfig, edge: &ScalarField) -> Result<Solved> {
    let start = Instant::now();
    let grad = initial_field(edge, cfg.threshold_value())?;
    let mask = build_mask(*edge.spec(), edge, cfg.outer_margin, cfg.inner_box)?;
    let (params, report) = match cfg.method {
        Method::Gvf => {
            let p = cfg.gvf_params();
            let report = solve_from_gradient(&grad, &p, &mask)?;
            (p, report)
        }
        Method::Ggvf => {
            let p = cfg.ggvf_params();
            let report = ggvf_solve_from_gradient(&grad, &p, &mask)?;
            (p.per_pixel(&grad)?, report)
        }
    };
    let residual = steady_residual_from_gradient(&report.field, &grad, &params, &mask)?;
    Ok(Solved {
        report,
        residual,
        mask,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnakeSummary {
    pub iterations: usize,
    pub converged: bool,
    pub snaxels: usize,
    pub final_displacement: f64,
}

/// What a run reports, echoing its complete configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub width: usize,
    pub height: usize,
    #[serde(rename = "NI")]
    pub iterations: usize,
    pub converged: bool,
    pub final_change: f64,
    pub residual: f64,
    pub inside_pixels: usize,
    pub pixel_updates: u64,
    pub snake: Option<SnakeSummary>,
    pub artifacts: Vec<String>,
    pub wall_ms: f64,
    #[serde(skip)]
    pub field: VectorField,
    #[serde(skip)]
    pub contour: Option<Snake>,
}

impl RunSummary {
    /// 0 on success, 4 when the solve or the snake hit its iteration cap.
    pub fn exit_code(&self) -> i32 {
        let snake_ok = self.snake.as_ref().is_none_or(|s| s.converged);
        if self.converged && snake_ok {
            0
        } else {
            4
        }
    }
}

/// Exit status for a failed run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Format { .. } => 2,
        Error::Diverged { .. } | Error::SnakeDiverged { .. } => 3,
        _ => 1,
    }
}

fn unit_peak(field: &VectorField) -> VectorField {
    let peak = field.max_magnitude();
    if peak == 0.0 {
        return field.clone();
    }
    VectorField {
        u: field.u.map(|x| x / peak),
        v: field.v.map(|x| x / peak),
    }
}

/// Run everything and write the artifacts into `cfg.out`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let image = load_image(cfg)?;
    let spec = *image.spec();
    let edge = edge_map(&image, cfg.sigma, EdgeSign::Attractive)?;
    let solved = solve_edge_map(cfg, &edge)?;
    let field = solved.report.field.clone();

    let snake_run = if cfg.snake {
        let drive = if cfg.unit_peak {
            unit_peak(&field)
        } else {
            field.clone()
        };
        Some(snake_evolve(
            &cfg.initial_snake(&spec)?,
            &drive,
            &cfg.snake_params(),
        )?)
    } else {
        None
    };

    std::fs::create_dir_all(&cfg.out)?;
    let mut artifacts = Vec::new();
    let mut emit = |name: &str| -> PathBuf {
        artifacts.push(name.to_string());
        cfg.out.join(name)
    };
    io::write_field(&field, emit("field.gvf"))?;
    io::write_pgm(&image, emit("input.pgm"))?;
    let overlay = snake_run.as_ref().map(|r| &r.snake);
    io::render(
        &field,
        RenderMode::MagnitudeHeatmap,
        overlay,
        emit("magnitude.ppm"),
    )?;
    io::render(
        &field,
        RenderMode::DirectionHue,
        None,
        emit("direction.ppm"),
    )?;
    let arrows = RenderMode::Arrows {
        stride: cfg.arrow_stride,
    };
    io::render(&field, arrows, overlay, emit("arrows.ppm"))?;
    if let Some(run) = &snake_run {
        io::write_contour(&run.snake, emit("contour.csv"))?;
    }
    artifacts.push("summary.json".into());

    let summary = RunSummary {
        config: cfg.clone(),
        width: spec.width,
        height: spec.height,
        iterations: solved.report.iterations,
        converged: solved.report.converged,
        final_change: solved.report.final_change(),
        residual: solved.residual,
        inside_pixels: solved.report.inside_pixels,
        pixel_updates: solved.report.pixel_updates,
        snake: snake_run.as_ref().map(|r| SnakeSummary {
            iterations: r.iterations,
            converged: r.converged,
            snaxels: r.snake.len(),
            final_displacement: r.displacement_history.last().copied().unwrap_or(0.0),
        }),
        artifacts,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        field,
        contour: snake_run.map(|r| r.snake),
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Parameter(format!("summary: {e}")))?;
    std::fs::write(cfg.out.join("summary.json"), json + "\n")?;
    Ok(summary)
}

/// Parameter lists for a sweep. An empty list means "use the fixed value".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SweepGrid {
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub dt: Vec<f64>,
    pub delta: Vec<f64>,
    pub threshold: Vec<Option<f64>>,
    pub inner_box: Vec<Option<Rect>>,
    pub outer_margin: Vec<Option<usize>>,
}

impl SweepGrid {
    /// Grid points in lexicographic order over
    /// (g, h, Δt, δ, T, d_in, d_out), each list in its given order.
    pub fn points(&self, fixed: &RunConfig) -> Vec<RunConfig> {
        fn or<T: Clone>(list: &[T], fixed: T) -> Vec<T> {
            if list.is_empty() {
                vec![fixed]
            } else {
                list.to_vec()
            }
        }
        let mut out = Vec::new();
        for &g in &or(&self.g, fixed.g) {
            for &h in &or(&self.h, fixed.h) {
                for &dt in &or(&self.dt, fixed.dt) {
                    for &delta in &or(&self.delta, fixed.delta) {
                        for &threshold in &or(&self.threshold, fixed.threshold) {
                            for &inner_box in &or(&self.inner_box, fixed.inner_box) {
                                for &outer_margin in &or(&self.outer_margin, fixed.outer_margin) {
                                    out.push(RunConfig {
                                        g,
                                        h,
                                        dt,
                                        delta,
                                        threshold,
                                        inner_box,
                                        outer_margin,
                                        ..fixed.clone()
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowStats {
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub inside_pixels: usize,
    pub pixel_updates: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub config: RunConfig,
    /// The run's statistics, or the error message of a failed row.
    pub outcome: std::result::Result<RowStats, String>,
}

/// Solve every grid point, in parallel, and return rows in grid order.
/// A failing point yields a row carrying its error; the sweep continues.
pub fn run_sweep(grid: &SweepGrid, fixed: &RunConfig) -> Result<Vec<SweepRow>> {
    let image = load_image(fixed)?;
    let edge = edge_map(&image, fixed.sigma, EdgeSign::Attractive)?;
    Ok(grid
        .points(fixed)
        .into_par_iter()
        .map(|config| {
            let outcome = solve_edge_map(&config, &edge)
                .map(|s| RowStats {
                    iterations: s.report.iterations,
                    converged: s.report.converged,
                    residual: s.residual,
                    inside_pixels: s.report.inside_pixels,
                    pixel_updates: s.report.pixel_updates,
                    wall_ms: s.wall_ms,
                })
                .map_err(|e| e.to_string());
            SweepRow { config, outcome }
        })
        .collect())
}

pub const SWEEP_HEADER: &str = "g,h,dt,delta,T,d_in,d_out,NI,converged,residual,wall_ms,status";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for row in rows {
        let c = &row.config;
        let t = c.threshold.map_or("inf".to_string(), |t| t.to_string());
        let d_in = c.inner_box.map_or("none".to_string(), |r| r.to_string());
        let d_out = c.outer_margin.map_or("full".to_string(), |m| m.to_string());
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},",
            c.g,
            c.h,
            c.dt,
            c.delta,
            t,
            csv_field(&d_in),
            d_out
        );
        let _ = match &row.outcome {
            Ok(s) => writeln!(
                out,
                "{},{},{:e},{:.3},{}",
                s.iterations,
                s.converged,
                s.residual,
                s.wall_ms,
                if s.converged { "ok" } else { "not-converged" }
            ),
            Err(msg) => writeln!(out, ",,,,{}", csv_field(&format!("error: {msg}"))),
        };
    }
    out
}
