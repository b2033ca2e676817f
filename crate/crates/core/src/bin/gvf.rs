use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gvflow::error::{Error, Result};
use gvflow::field::{edge_map, EdgeSign};
use gvflow::io::{self, RenderMode};
use gvflow::mask::Rect;
use gvflow::pipeline::{self, Method, RunConfig, Shape, SweepGrid};
use gvflow::snake::TensileSign;
use gvflow::solver::{initial_field, solve_from_gradient};
use gvflow::spectral::{parseval_energy, spectral_steady_state};

#[derive(Parser)]
#[command(
    name = "gvf",
    version,
    about = "Gradient vector flow fields, snakes and parameter sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic test image as PGM.
    Synth(SynthArgs),
    /// Constant-coefficient GVF field.
    Gvf(Shared),
    /// Generalized GVF field with g = exp(-|grad f|^2/K^2).
    Ggvf(Shared),
    /// Field followed by a snake.
    Snake(SnakeArgs),
    /// Periodic solve checked against the frequency-domain steady state.
    Spectral(Shared),
    /// Parameter sweep written as CSV.
    Sweep(SweepArgs),
    /// Render a field file as PPM.
    Render(RenderArgs),
}

fn parse_threshold(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" | "none" => Ok(f64::INFINITY),
        _ => s.parse().map_err(|e| format!("{e}")),
    }
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input PGM; a synthetic U is used when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Iteration cap.
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    periodic: bool,
    #[arg(long)]
    arrow_stride: Option<usize>,
}

impl Common {
    /// Defaults, then the config file, then flags.
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.out {
            c.out = p.clone();
        }
        if let Some(p) = &self.input {
            c.input = Some(p.clone());
        }
        c.sigma = self.sigma.unwrap_or(c.sigma);
        c.t_max = self.t_max.unwrap_or(c.t_max);
        c.k = self.k.unwrap_or(c.k);
        c.arrow_stride = self.arrow_stride.unwrap_or(c.arrow_stride);
        c.force |= self.force;
        c.periodic |= self.periodic;
        Ok(c)
    }
}

#[derive(Args, Clone)]
struct Shared {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Clamp on |grad f|, or "inf".
    #[arg(long, value_parser = parse_threshold)]
    threshold: Option<f64>,
    #[arg(long)]
    outer_margin: Option<usize>,
    /// Hole rectangle x,y,w,h.
    #[arg(long)]
    inner_box: Option<Rect>,
}

impl Shared {
    fn config(&self) -> Result<RunConfig> {
        let mut c = self.common.config()?;
        c.g = self.g.unwrap_or(c.g);
        c.h = self.h.unwrap_or(c.h);
        c.dt = self.dt.unwrap_or(c.dt);
        c.delta = self.delta.unwrap_or(c.delta);
        if let Some(t) = self.threshold {
            c.threshold = t.is_finite().then_some(t);
        }
        c.outer_margin = self.outer_margin.or(c.outer_margin);
        c.inner_box = self.inner_box.or(c.inner_box);
        Ok(c)
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "u")]
    shape: ShapeArg,
    #[arg(long, default_value_t = 128)]
    width: usize,
    #[arg(long, default_value_t = 128)]
    height: usize,
    #[arg(long)]
    cx: Option<f64>,
    #[arg(long)]
    cy: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    hole: Option<Rect>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum ShapeArg {
    U,
    Disk,
    BoxHole,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum MethodArg {
    Gvf,
    Ggvf,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum SignArg {
    AsWritten,
    Smoothing,
}

#[derive(Args)]
struct SnakeArgs {
    #[command(flatten)]
    shared: Shared,
    #[arg(long, value_enum, default_value = "ggvf")]
    method: MethodArg,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    snake_max_iter: Option<usize>,
    /// Resampling spacing in pixels; 0 disables.
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long, value_enum)]
    tensile_sign: Option<SignArg>,
    #[arg(long)]
    normalize_force: bool,
    #[arg(long)]
    init_cx: Option<f64>,
    #[arg(long)]
    init_cy: Option<f64>,
    #[arg(long)]
    init_radius: Option<f64>,
    #[arg(long)]
    snaxels: Option<usize>,
}

/// Sweep lists are comma separated; each defaults to the configured value.
#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "gvf")]
    method: MethodArg,
    #[arg(long, value_delimiter = ',')]
    g: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    h: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    dt: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    /// Clamp values; "inf" for none.
    #[arg(long, value_delimiter = ',', value_parser = parse_threshold)]
    threshold: Vec<f64>,
    /// Repeatable hole rectangle x,y,w,h, or "none".
    #[arg(long)]
    inner_box: Vec<String>,
    /// Outer margins; "full" for the whole grid.
    #[arg(long, value_delimiter = ',')]
    outer_margin: Vec<String>,
}

#[derive(Args)]
struct RenderArgs {
    /// Field file to render.
    #[arg(long)]
    field: PathBuf,
    #[arg(long, default_value = "magnitude")]
    mode: RenderMode,
    #[arg(long, default_value_t = io::render::DEFAULT_ARROW_STRIDE)]
    arrow_stride: usize,
    /// Contour CSV drawn on top.
    #[arg(long)]
    contour: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(pipeline::exit_code(&e) as u8)
        }
    }
}

fn report(summary: &pipeline::RunSummary) -> i32 {
    println!(
        "NI={} converged={} residual={:e} wall_ms={:.1} out={}",
        summary.iterations,
        summary.converged,
        summary.residual,
        summary.wall_ms,
        summary.config.out.display()
    );
    if let Some(s) = &summary.snake {
        println!(
            "snake iterations={} converged={} snaxels={}",
            s.iterations, s.converged, s.snaxels
        );
    }
    summary.exit_code()
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Synth(a) => {
            let cfg = RunConfig {
                shape: match a.shape {
                    ShapeArg::U => Shape::U,
                    ShapeArg::Disk => Shape::Disk,
                    ShapeArg::BoxHole => Shape::BoxHole,
                },
                width: a.width,
                height: a.height,
                cx: a.cx,
                cy: a.cy,
                radius: a.radius,
                hole: a.hole,
                ..RunConfig::default()
            };
            let img = pipeline::synth_image(&cfg)?;
            std::fs::create_dir_all(&a.out)?;
            let name = match a.shape {
                ShapeArg::U => "u.pgm",
                ShapeArg::Disk => "disk.pgm",
                ShapeArg::BoxHole => "box-hole.pgm",
            };
            let path = a.out.join(name);
            io::write_pgm(&img, &path)?;
            println!("{}", path.display());
            Ok(0)
        }
        Command::Gvf(s) => {
            let cfg = RunConfig {
                method: Method::Gvf,
                ..s.config()?
            };
            Ok(report(&pipeline::run_pipeline(&cfg)?))
        }
        Command::Ggvf(s) => {
            let cfg = RunConfig {
                method: Method::Ggvf,
                ..s.config()?
            };
            Ok(report(&pipeline::run_pipeline(&cfg)?))
        }
        Command::Snake(a) => {
            let mut cfg = a.shared.config()?;
            cfg.snake = true;
            cfg.method = match a.method {
                MethodArg::Gvf => Method::Gvf,
                MethodArg::Ggvf => Method::Ggvf,
            };
            macro_rules! take {
                ($($name:ident),*) => {$(
                    if let Some(v) = a.$name {
                        cfg.$name = v;
                    }
                )*};
            }
            take!(b, gamma, step, eps, snake_max_iter, spacing, snaxels);
            if let Some(sign) = a.tensile_sign {
                cfg.tensile_sign = match sign {
                    SignArg::AsWritten => TensileSign::AsWritten,
                    SignArg::Smoothing => TensileSign::Smoothing,
                };
            }
            cfg.normalize_force |= a.normalize_force;
            cfg.init_cx = a.init_cx.or(cfg.init_cx);
            cfg.init_cy = a.init_cy.or(cfg.init_cy);
            cfg.init_radius = a.init_radius.or(cfg.init_radius);
            Ok(report(&pipeline::run_pipeline(&cfg)?))
        }
        Command::Spectral(s) => spectral(&s.config()?),
        Command::Sweep(a) => sweep(a),
        Command::Render(a) => {
            let field = io::read_field(&a.field)?;
            let mode = match a.mode {
                RenderMode::Arrows { .. } => RenderMode::Arrows {
                    stride: a.arrow_stride,
                },
                m => m,
            };
            let contour = a.contour.as_ref().map(io::read_contour).transpose()?;
            std::fs::create_dir_all(&a.out)?;
            let path = a.out.join("render.ppm");
            io::render(&field, mode, contour.as_ref(), &path)?;
            println!("{}", path.display());
            Ok(0)
        }
    }
}

fn spectral(cfg: &RunConfig) -> Result<i32> {
    let cfg = RunConfig {
        periodic: true,
        ..cfg.clone()
    };
    let image = pipeline::load_image(&cfg)?;
    let edge = edge_map(&image, cfg.sigma, EdgeSign::Attractive)?;
    let grad = initial_field(&edge, cfg.threshold.unwrap_or(f64::INFINITY))?;
    let mask = gvflow::mask::DomainMask::full(*grad.spec());
    let report = solve_from_gradient(&grad, &cfg.gvf_params(), &mask)?;
    let oracle = spectral_steady_state(&grad, cfg.g, cfg.h)?;
    let diff = gvflow::field::VectorField {
        u: gvflow::field::ScalarField::from_fn(*grad.spec(), |i, j| {
            report.field.u.get(i, j) - oracle.u.get(i, j)
        }),
        v: gvflow::field::ScalarField::from_fn(*grad.spec(), |i, j| {
            report.field.v.get(i, j) - oracle.v.get(i, j)
        }),
    };
    let norm = oracle.sum_squares().sqrt();
    let rel_l2 = if norm > 0.0 {
        diff.sum_squares().sqrt() / norm
    } else {
        diff.sum_squares().sqrt()
    };
    let summary = serde_json::json!({
        "config": cfg,
        "NI": report.iterations,
        "converged": report.converged,
        "relative_l2": rel_l2,
        "energy_initial": parseval_energy(&grad),
        "energy_steady": parseval_energy(&report.field),
        "energy_oracle": parseval_energy(&oracle),
    });
    std::fs::create_dir_all(&cfg.out)?;
    let text = serde_json::to_string_pretty(&summary).expect("json values serialize");
    std::fs::write(cfg.out.join("spectral.json"), text.clone() + "\n")?;
    println!("{text}");
    Ok(if report.converged { 0 } else { 4 })
}

fn sweep(a: SweepArgs) -> Result<i32> {
    let mut fixed = a.common.config()?;
    fixed.method = match a.method {
        MethodArg::Gvf => Method::Gvf,
        MethodArg::Ggvf => Method::Ggvf,
    };
    let inner_box = a
        .inner_box
        .iter()
        .map(|s| match s.as_str() {
            "none" => Ok(None),
            _ => s.parse().map(Some).map_err(Error::Parameter),
        })
        .collect::<Result<Vec<_>>>()?;
    let outer_margin = a
        .outer_margin
        .iter()
        .map(|s| match s.as_str() {
            "full" => Ok(None),
            _ => s
                .parse()
                .map(Some)
                .map_err(|e| Error::Parameter(format!("outer margin {s:?}: {e}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = SweepGrid {
        g: a.g,
        h: a.h,
        dt: a.dt,
        delta: a.delta,
        threshold: a
            .threshold
            .iter()
            .map(|t| t.is_finite().then_some(*t))
            .collect(),
        inner_box,
        outer_margin,
    };
    let rows = pipeline::run_sweep(&grid, &fixed)?;
    let csv = pipeline::sweep_csv(&rows);
    std::fs::create_dir_all(&fixed.out)?;
    std::fs::write(fixed.out.join("sweep.csv"), &csv)?;
    print!("{csv}");
    Ok(0)
}
