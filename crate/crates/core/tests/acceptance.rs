//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gvflow::direct::direct_steady_solve;
use gvflow::error::{Error, Result};
use gvflow::field::{
    clamp_magnitude, edge_map, gradient_central, laplacian_5pt, EdgeSign, GridSpec, ScalarField,
    VectorField,
};
use gvflow::io::{
    decode_contour, decode_field, decode_pgm, encode_contour, encode_field, encode_pgm, PgmEncoding,
};
use gvflow::mask::{Boundary, DomainMask, Rect};
use gvflow::pipeline::{run_pipeline, solve_edge_map, Method, RunConfig, Solved, SweepGrid};
use gvflow::snake::{tensile_force, Point, Snake};
use gvflow::solver::{
    expansion_check, gvf_solve, initial_field, solve_from_gradient, validate_params, GvfParams,
    SolveReport, Violation,
};
use gvflow::spectral::{parseval_energy, spectral_steady_state};
use gvflow::synth::{distance_to_polygon, UShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(bool, String)>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_field(rng: &mut ChaCha8Rng, spec: GridSpec, scale: f64) -> ScalarField {
    ScalarField::from_fn(spec, |_, _| rng.gen_range(0.0..scale))
}

fn random_vectors(rng: &mut ChaCha8Rng, spec: GridSpec, scale: f64) -> VectorField {
    let u = ScalarField::from_fn(spec, |_, _| rng.gen_range(-scale..scale));
    let v = ScalarField::from_fn(spec, |_, _| rng.gen_range(-scale..scale));
    VectorField::new(u, v).unwrap()
}

fn impulse(n: usize) -> ScalarField {
    let spec = GridSpec::new(n, n).unwrap();
    ScalarField::from_fn(
        spec,
        |i, j| if (i, j) == (n / 2, n / 2) { 1.0 } else { 0.0 },
    )
}

fn relative_l2(a: &VectorField, b: &VectorField) -> f64 {
    let mut num = 0.0;
    for (x, y) in a.u.values().iter().zip(b.u.values()) {
        num += (x - y) * (x - y);
    }
    for (x, y) in a.v.values().iter().zip(b.v.values()) {
        num += (x - y) * (x - y);
    }
    (num / b.sum_squares()).sqrt()
}

fn u_edge() -> Result<ScalarField> {
    let image = gvflow::pipeline::synth_image(&RunConfig::default())?;
    edge_map(&image, RunConfig::default().sigma, EdgeSign::Attractive)
}

/// Worst relative increase between consecutive energies.
fn worst_energy_rise(report: &SolveReport) -> f64 {
    report
        .energy_history
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn strictly_decreasing(xs: &[usize]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn oracle_equivalence() -> Check {
    let mut rng = rng(1);
    let mut worst: f64 = 0.0;
    let mut all_converged = true;
    for case in 0..20 {
        let spec = GridSpec::new(rng.gen_range(8..=12), rng.gen_range(8..=12))?;
        let image = random_field(&mut rng, spec, 1.0);
        let f = edge_map(&image, 0.0, EdgeSign::Attractive)?;
        let g = rng.gen_range(0.3..2.0);
        let h = rng.gen_range(0.05..0.5) * g;
        let dt = rng.gen_range(0.5..0.95) * 0.25 / g;
        let p = GvfParams::new(g, h)
            .with_dt(dt)
            .with_delta(1e-10)
            .with_max_iter(1_000_000);
        let mask = if case % 2 == 0 {
            DomainMask::full(spec)
        } else {
            DomainMask::full(spec).with_hole(Rect::new(3, 3, 3, 2))?
        };
        let report = gvf_solve(&f, &p, &mask)?;
        all_converged &= report.converged;
        worst = worst.max(report.field.max_diff(&direct_steady_solve(&f, &p, &mask)?));
    }
    Ok((
        all_converged && worst < 1e-6,
        format!("max L∞ {worst:.2e} over 20 problems (< 1e-6)"),
    ))
}

fn periodic_params(g: f64, h: f64) -> GvfParams {
    GvfParams::new(g, h)
        .with_boundary(Boundary::Periodic)
        .with_delta(1e-12)
        .with_max_iter(200_000)
}

fn spectral_oracle() -> Check {
    let mut rng = rng(2);
    let spec = GridSpec::new(32, 32)?;
    let f = edge_map(
        &random_field(&mut rng, spec, 255.0),
        1.0,
        EdgeSign::Attractive,
    )?;
    let grad = initial_field(&f, f64::INFINITY)?;
    let p = periodic_params(1.0, 0.1);
    let report = solve_from_gradient(&grad, &p, &DomainMask::full(spec))?;
    let exact = spectral_steady_state(&grad, 1.0, 0.1)?;
    let err = relative_l2(&report.field, &exact);
    Ok((
        report.converged && err < 1e-8,
        format!(
            "relative L2 {err:.2e} after {} iterations (< 1e-8)",
            report.iterations
        ),
    ))
}

fn solve_all(configs: &[RunConfig], edge: &ScalarField) -> Result<Vec<Solved>> {
    configs.iter().map(|c| solve_edge_map(c, edge)).collect()
}

fn table1(edge: &ScalarField, keep: &mut Vec<Solved>) -> Check {
    let base = RunConfig::default();
    let along_g = SweepGrid {
        g: vec![0.2, 0.7, 1.0, 2.0],
        h: vec![0.01],
        ..Default::default()
    };
    let along_h = SweepGrid {
        g: vec![2.0],
        h: vec![0.01, 0.02, 0.05, 0.1],
        ..Default::default()
    };
    let by_g = solve_all(&along_g.points(&base), edge)?;
    let by_h = solve_all(&along_h.points(&base), edge)?;
    let ni = |s: &[Solved]| s.iter().map(|s| s.report.iterations).collect::<Vec<_>>();
    let (ni_g, ni_h) = (ni(&by_g), ni(&by_h));
    let converged = by_g.iter().chain(&by_h).all(|s| s.report.converged);
    keep.extend(by_g);
    keep.extend(by_h);
    Ok((
        converged && strictly_decreasing(&ni_g) && strictly_decreasing(&ni_h),
        format!("NI along g {ni_g:?}, along h {ni_h:?}"),
    ))
}

fn table2(edge: &ScalarField, keep: &mut Vec<Solved>) -> Check {
    let grid = SweepGrid {
        threshold: [1.0, 4.0, 7.0, 10.0, 40.0, 80.0].map(Some).to_vec(),
        ..Default::default()
    };
    let runs = solve_all(&grid.points(&RunConfig::default()), edge)?;
    let ni: Vec<usize> = runs.iter().map(|s| s.report.iterations).collect();
    let converged = runs.iter().all(|s| s.report.converged);
    keep.extend(runs);
    Ok((
        converged && ni.windows(2).all(|w| w[1] >= w[0]),
        format!("NI along T {ni:?}"),
    ))
}

fn windows(edge: &ScalarField) -> Check {
    let base = RunConfig::default();
    let margins = SweepGrid {
        outer_margin: vec![None, Some(60), Some(50)],
        ..Default::default()
    };
    let runs = solve_all(&margins.points(&base), edge)?;
    let ni: Vec<usize> = runs.iter().map(|s| s.report.iterations).collect();
    let (lo, hi) = (*ni.iter().min().unwrap(), *ni.iter().max().unwrap());
    let spread = (hi - lo) as f64 / lo as f64;

    let tight = SweepGrid {
        outer_margin: vec![Some(10), Some(5)],
        ..Default::default()
    };
    let tight = solve_all(&tight.points(&base), edge)?;

    // the solid base of the U, inset by 3 px
    let hole = RunConfig {
        inner_box: Some(Rect::new(28, 67, 72, 33)),
        ..base.clone()
    };
    let holed = solve_edge_map(&hole, edge)?;
    let full = &runs[0];
    let every = runs.iter().chain(&tight).chain([&holed]);
    let accounting = every.clone().all(|s| {
        s.report.pixel_updates == (s.report.iterations * s.report.inside_pixels) as u64
            && s.report.inside_pixels == s.mask.count()
    });
    let per_iteration = |s: &Solved| s.report.pixel_updates as f64 / s.report.iterations as f64;
    let proportional = per_iteration(&holed) / per_iteration(full)
        == holed.report.inside_pixels as f64 / full.report.inside_pixels as f64;
    let fewer = holed.report.inside_pixels < full.report.inside_pixels
        && holed.report.pixel_updates < full.report.pixel_updates;
    let converged = every.clone().all(|s| s.report.converged);
    let tight_ni: Vec<String> = tight
        .iter()
        .map(|s| format!("{}@|Ω|={}", s.report.iterations, s.report.inside_pixels))
        .collect();
    Ok((
        converged && spread <= 0.15 && accounting && proportional && fewer,
        format!(
            "NI {{full,60,50}} {ni:?} spread {:.1}%; hole NI {} |Ω| {} vs {}, updates {} vs {}; \
             informational margins 10,5: {}",
            spread * 100.0,
            holed.report.iterations,
            holed.report.inside_pixels,
            full.report.inside_pixels,
            holed.report.pixel_updates,
            full.report.pixel_updates,
            tight_ni.join(", ")
        ),
    ))
}

fn energy_decay(runs: &[Solved]) -> Check {
    let worst = runs
        .iter()
        .map(|s| worst_energy_rise(&s.report))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((
        !runs.is_empty() && worst <= 1e-12,
        format!(
            "{} runs, worst relative rise {worst:.2e} (<= 1e-12)",
            runs.len()
        ),
    ))
}

fn parseval_bound() -> Check {
    let mut rng = rng(7);
    let mut worst = f64::NEG_INFINITY;
    let mut runs = 0;
    for _ in 0..8 {
        let n = [16, 24, 32][rng.gen_range(0..3)];
        let spec = GridSpec::new(n, n)?;
        let f = edge_map(
            &random_field(&mut rng, spec, 255.0),
            1.0,
            EdgeSign::Attractive,
        )?;
        let g = rng.gen_range(0.2..2.0);
        let h = rng.gen_range(0.02..0.9) * g;
        let t = [f64::INFINITY, 10.0, 100.0][rng.gen_range(0..3)];
        let grad = initial_field(&f, t)?;
        let input = parseval_energy(&grad);
        let spectral = spectral_steady_state(&grad, g, h)?;
        let explicit = solve_from_gradient(&grad, &periodic_params(g, h), &DomainMask::full(spec))?;
        for out in [&spectral, &explicit.field] {
            worst = worst.max((parseval_energy(out) - input) / input);
            runs += 1;
        }
    }
    Ok((
        worst <= 1e-9,
        format!("{runs} periodic steady states, worst relative excess {worst:.2e} (<= 1e-9)"),
    ))
}

fn expansion() -> Check {
    let f = impulse(8);
    let mut worst: f64 = 0.0;
    for (g, h, dt) in [(1.0, 0.1, 0.2), (2.0, 0.02, 0.12), (0.5, 0.0, 0.4)] {
        let p = GvfParams::new(g, h).with_dt(dt);
        for n in 1..=4 {
            worst = worst.max(expansion_check(&f, &p, n)?);
        }
    }
    Ok((
        worst < 1e-12,
        format!("max L∞ {worst:.2e} over n = 1..4 (< 1e-12)"),
    ))
}

fn stability() -> Check {
    let f = impulse(8);
    let spec = *f.spec();
    let mask = DomainMask::full(spec);
    let rejects = |g: f64| {
        let p = GvfParams::new(g, 0.02).with_dt(0.125);
        let flagged = validate_params(&p, &spec)
            .iter()
            .any(|v| matches!(v, Violation::StabilityRatio { .. }));
        flagged && matches!(gvf_solve(&f, &p, &mask), Err(Error::Validation(_)))
    };
    let rejected = rejects(2.0) && rejects(2.4);
    let accepted = validate_params(&GvfParams::new(1.99, 0.02).with_dt(0.125), &spec).is_empty();
    let forced = GvfParams::new(2.4, 0.0).with_dt(0.125).with_force(true);
    let diverged_at = match gvf_solve(&f, &forced, &mask) {
        Err(Error::Diverged { iteration, .. }) => Some(iteration),
        _ => None,
    };
    Ok((
        rejected && accepted && diverged_at.is_some_and(|n| n <= 200),
        format!(
            "r = 0.25 and 0.3 rejected: {rejected}; forced r = 0.3, h = 0 diverged at {}",
            diverged_at.map_or("never".into(), |n| format!("iteration {n}"))
        ),
    ))
}

struct SnakeOutcome {
    converged: bool,
    mean: f64,
    in_cavity: usize,
    snaxels: usize,
}

fn snake_on_u(cfg: RunConfig) -> Result<SnakeOutcome> {
    let dir = tempfile::tempdir()?;
    let summary = run_pipeline(&RunConfig {
        snake: true,
        out: dir.path().to_path_buf(),
        ..cfg
    })?;
    let u = UShape::for_grid(summary.width, summary.height)?;
    let polygon = u.boundary();
    let contour = summary.contour.expect("snake requested");
    let pts = contour.points();
    Ok(SnakeOutcome {
        converged: summary.snake.is_some_and(|s| s.converged),
        mean: pts
            .iter()
            .map(|&p| distance_to_polygon(p, &polygon))
            .sum::<f64>()
            / pts.len() as f64,
        in_cavity: pts.iter().filter(|&&p| u.in_cavity(p)).count(),
        snaxels: pts.len(),
    })
}

fn cavity() -> Check {
    let ggvf = snake_on_u(RunConfig {
        method: Method::Ggvf,
        delta: 0.01,
        ..RunConfig::default()
    })?;
    let gvf = snake_on_u(RunConfig {
        method: Method::Gvf,
        g: 2.0,
        h: 0.02,
        ..RunConfig::default()
    })?;
    let ggvf_ok = ggvf.converged && ggvf.mean < 1.5 && ggvf.in_cavity >= 3;
    let gvf_ok = gvf.in_cavity == 0;
    Ok((
        ggvf_ok && gvf_ok,
        format!(
            "GGVF {}: converged {}, mean distance {:.3}, {} of {} snaxels in cavity (need >= 3); \
             GVF {}: {} of {} snaxels in cavity (need 0)",
            if ggvf_ok { "ok" } else { "FAILED" },
            ggvf.converged,
            ggvf.mean,
            ggvf.in_cavity,
            ggvf.snaxels,
            if gvf_ok { "ok" } else { "FAILED" },
            gvf.in_cavity,
            gvf.snaxels,
        ),
    ))
}

fn invariants() -> Check {
    let mut rng = rng(11);
    let mut failures = Vec::new();

    let mut worst_b: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(4..200);
        let pts = (0..n)
            .map(|_| Point::new(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0)))
            .collect();
        let s = Snake::new(pts)?;
        let mut sum = Point::new(0.0, 0.0);
        for i in 0..s.len() {
            sum = sum + tensile_force(&s, i)?;
        }
        worst_b = worst_b.max(sum.norm());
    }
    if worst_b > 1e-9 {
        failures.push(format!("|ΣB| = {worst_b:.2e}"));
    }

    for _ in 0..200 {
        let spec = GridSpec::new(rng.gen_range(3..20), rng.gen_range(3..20))?;
        let v = random_vectors(&mut rng, spec, 10.0);
        let t = rng.gen_range(0.01..12.0);
        let once = clamp_magnitude(&v, t)?;
        let grows = once
            .magnitude()
            .values()
            .iter()
            .zip(v.magnitude().values())
            .any(|(a, b)| a > b);
        if clamp_magnitude(&once, t)? != once || grows {
            failures.push("clamp".into());
            break;
        }
    }

    let mut worst_lap: f64 = 0.0;
    for _ in 0..200 {
        let spec = GridSpec::new(rng.gen_range(3..30), rng.gen_range(3..30))?;
        let f = random_field(&mut rng, spec, 100.0);
        let total: f64 = laplacian_5pt(&f).values().iter().sum();
        let scale: f64 = f.values().iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        worst_lap = worst_lap.max(total.abs() / scale);
    }
    if worst_lap > 1e-9 {
        failures.push(format!("Laplacian sum {worst_lap:.2e}"));
    }

    let mut round_trips = true;
    for _ in 0..50 {
        let spec = GridSpec::new(rng.gen_range(3..16), rng.gen_range(3..16))?;
        let v = random_vectors(&mut rng, spec, 1e3);
        round_trips &= decode_field(&encode_field(&v))? == v;
        let levels = ScalarField::from_fn(spec, |_, _| rng.gen_range(0..=65535u32) as f64);
        for enc in [PgmEncoding::Ascii, PgmEncoding::Binary] {
            round_trips &= decode_pgm(&encode_pgm(&levels, 65535, enc)?)? == levels;
        }
        let s = Snake::new(
            (0..rng.gen_range(4..50))
                .map(|_| Point::new(rng.gen_range(-1e3..1e3), rng.gen_range(-1e3..1e3)))
                .collect(),
        )?;
        round_trips &= decode_contour(&encode_contour(&s))? == s;
    }
    if !round_trips {
        failures.push("file round-trip".into());
    }
    let gradient = gradient_central(&impulse(5));
    if gradient.get(1, 2) != (0.5, 0.0) {
        failures.push("gradient".into());
    }

    Ok((
        failures.is_empty(),
        if failures.is_empty() {
            format!("ΣB max {worst_b:.1e}, Laplacian sum max {worst_lap:.1e}, clamp and round-trips exact")
        } else {
            format!("violated: {}", failures.join(", "))
        },
    ))
}

struct Ledger {
    passed: usize,
    total: usize,
}

impl Ledger {
    fn run(&mut self, n: usize, name: &str, budget: Duration, check: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && took <= budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        self.total += 1;
        self.passed += ok as usize;
        println!(
            "criterion {n:>2} {} {name}: {detail} [{:.2} s, budget {} s]",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut ledger = Ledger {
        passed: 0,
        total: 0,
    };
    let edge = u_edge().expect("synthetic U");
    let mut trend_runs = Vec::new();

    ledger.run(1, "oracle equivalence", secs(5), oracle_equivalence);
    ledger.run(2, "spectral oracle", secs(2), spectral_oracle);
    ledger.run(3, "NI trend in g and h", secs(120), || {
        table1(&edge, &mut trend_runs)
    });
    ledger.run(4, "NI trend in T", secs(60), || {
        table2(&edge, &mut trend_runs)
    });
    ledger.run(5, "outer and inner windows", secs(120), || windows(&edge));
    ledger.run(6, "energy decay", secs(1), || energy_decay(&trend_runs));
    ledger.run(7, "Parseval bound", secs(60), parseval_bound);
    ledger.run(8, "expansion check", secs(1), expansion);
    ledger.run(9, "stability", secs(5), stability);
    ledger.run(10, "cavity demonstration", secs(180), cavity);
    ledger.run(11, "invariant suites", secs(30), invariants);

    println!(
        "acceptance: {}/{} criteria passed",
        ledger.passed, ledger.total
    );
    if ledger.passed == ledger.total {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
