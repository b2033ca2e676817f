use gvflow::direct::direct_steady_solve;
use gvflow::error::Error;
use gvflow::field::{GridSpec, ScalarField, VectorField};
use gvflow::mask::{Boundary, DomainMask, Rect};
use gvflow::solver::{
    ggvf_solve, ggvf_weight, gvf_solve, gvf_step, initial_field, steady_residual, validate_params,
    Coefficient, GgvfParams, GvfParams, Violation,
};
use proptest::prelude::*;

/// Parameters that pass validation.
fn valid_params() -> impl Strategy<Value = GvfParams> {
    (0.2..2.0f64, 0.02..0.9f64, 0.2..0.98f64)
        .prop_map(|(g, frac, s)| GvfParams::new(g, frac * g).with_dt(s * 0.25 / g))
        .prop_filter("valid", |p| {
            validate_params(p, &GridSpec::new(8, 8).unwrap()).is_empty()
        })
}

fn edge_problem() -> impl Strategy<Value = ScalarField> {
    (8usize..=12, 8usize..=12).prop_flat_map(|(w, h)| {
        let spec = GridSpec::new(w, h).unwrap();
        prop::collection::vec(0.0..50.0f64, spec.len())
            .prop_map(move |v| ScalarField::from_vec(spec, v).unwrap())
    })
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Mirror), Just(Boundary::Periodic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constant_field_is_a_fixed_point(
        p in valid_params(),
        (a, b) in (-5.0..5.0f64, -5.0..5.0f64),
        border in boundary(),
    ) {
        let spec = GridSpec::new(7, 5).unwrap();
        let v = VectorField::constant(spec, a, b);
        let p = p.with_boundary(border);
        let next = gvf_step(&v, &v, &p, &DomainMask::full(spec)).unwrap();
        prop_assert!(next.max_diff(&v) <= 1e-14);
    }

    #[test]
    fn direct_solution_is_stationary(f in edge_problem(), p in valid_params()) {
        let mask = DomainMask::full(*f.spec());
        let v = direct_steady_solve(&f, &p, &mask).unwrap();
        let residual = steady_residual(&v, &f, &p, &mask).unwrap();
        let grad = initial_field(&f, p.threshold).unwrap();
        let moved = gvf_step(&v, &grad, &p, &mask).unwrap().max_diff(&v);
        let scale = grad.max_magnitude().max(1.0);
        prop_assert!(residual <= 1e-10 * scale);
        prop_assert!(moved <= p.dt * residual + 1e-14 * scale);
    }

    #[test]
    fn matches_the_direct_oracle(f in edge_problem(), p in valid_params()) {
        let p = p.with_delta(1e-10).with_max_iter(1_000_000);
        let mask = DomainMask::full(*f.spec());
        let report = gvf_solve(&f, &p, &mask).unwrap();
        prop_assert!(report.converged);
        let oracle = direct_steady_solve(&f, &p, &mask).unwrap();
        prop_assert!(report.field.max_diff(&oracle) < 1e-6);
    }

    #[test]
    fn energy_never_rises(f in edge_problem(), p in valid_params(), border in boundary()) {
        let p = p.with_boundary(border).with_delta(1e-6);
        let report = gvf_solve(&f, &p, &DomainMask::full(*f.spec())).unwrap();
        for w in report.energy_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        prop_assert_eq!(report.energy_history.len(), report.iterations);
    }

    #[test]
    fn outside_pixels_stay_zero(f in edge_problem(), p in valid_params()) {
        let spec = *f.spec();
        let mask = DomainMask::window(spec, Rect::new(1, 1, spec.width - 3, spec.height - 2))
            .unwrap()
            .with_hole(Rect::new(3, 3, 2, 2))
            .unwrap();
        let report = gvf_solve(&f, &p.with_delta(1e-3), &mask).unwrap();
        for j in 0..spec.height {
            for i in 0..spec.width {
                if !mask.is_inside(i, j) {
                    prop_assert_eq!(report.field.get(i, j), (0.0, 0.0));
                }
            }
        }
        prop_assert_eq!(report.pixel_updates, (report.iterations * mask.count()) as u64);
    }

    #[test]
    fn unstable_ratio_is_rejected(g in 0.1..5.0f64, r in 0.25..2.0f64) {
        let spec = GridSpec::new(8, 8).unwrap();
        let p = GvfParams::new(g, 0.01 * g).with_dt(r / g);
        let violations = validate_params(&p, &spec);
        let flagged = violations.iter().any(|v| matches!(v, Violation::StabilityRatio { .. }));
        prop_assert!(flagged);
        let f = ScalarField::zeros(spec);
        let rejected = matches!(gvf_solve(&f, &p, &DomainMask::full(spec)), Err(Error::Validation(_)));
        prop_assert!(rejected);
    }

    #[test]
    fn ggvf_weight_in_unit_interval(f in edge_problem(), k in 0.5..200.0f64) {
        let grad = initial_field(&f, f64::INFINITY).unwrap();
        let w = ggvf_weight(&grad, k).unwrap();
        prop_assert!(w.values().iter().all(|&x| (0.0..=1.0).contains(&x)));
        let p = GgvfParams { k, ..GgvfParams::default() }.per_pixel(&grad).unwrap();
        let (Coefficient::PerPixel(g), Coefficient::PerPixel(h)) = (&p.g, &p.h) else {
            panic!("expected per-pixel coefficients");
        };
        prop_assert_eq!(g, &w);
        for (a, b) in g.values().iter().zip(h.values()) {
            prop_assert!((a + b - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn reaction_not_below_diffusion_is_reported() {
    let spec = GridSpec::new(8, 8).unwrap();
    let v = validate_params(&GvfParams::new(0.2, 1.0), &spec);
    assert!(v
        .iter()
        .any(|v| matches!(v, Violation::ReactionNotBelowDiffusion { .. })));
}

#[test]
fn near_quarter_ratio_with_large_h_is_reported_and_would_diverge() {
    let spec = GridSpec::new(9, 9).unwrap();
    let p = GvfParams::new(0.8, 0.72).with_dt(0.245 / 0.8);
    let v = validate_params(&p, &spec);
    assert!(matches!(v[..], [Violation::Amplification { .. }]), "{v:?}");
    let f = ScalarField::from_fn(spec, |i, j| ((i * 5 + j * 3) % 7) as f64);
    let forced = gvf_solve(&f, &p.with_force(true), &DomainMask::full(spec));
    assert!(matches!(forced, Err(Error::Diverged { .. })));
}

#[test]
fn non_unit_spacing_is_reported() {
    let spec = GridSpec::with_spacing(8, 8, 0.5, 0.5).unwrap();
    let v = validate_params(&GvfParams::default(), &spec);
    assert!(v
        .iter()
        .any(|v| matches!(v, Violation::NonUnitSpacing { .. })));
}

#[test]
fn larger_h_converges_sooner_on_an_edge() {
    let spec = GridSpec::new(24, 24).unwrap();
    let f = ScalarField::from_fn(spec, |i, _| if i == 12 { 100.0 } else { 0.0 });
    let ni: Vec<usize> = [0.01, 0.02, 0.05, 0.1]
        .iter()
        .map(|&h| {
            gvf_solve(&f, &GvfParams::new(2.0, h), &DomainMask::full(spec))
                .unwrap()
                .iterations
        })
        .collect();
    assert!(ni.windows(2).all(|w| w[1] <= w[0]), "{ni:?}");
}

#[test]
fn ggvf_solves_are_deterministic() {
    let spec = GridSpec::new(16, 16).unwrap();
    let f = ScalarField::from_fn(spec, |i, j| ((i * 7 + j * 3) % 11) as f64);
    let p = GgvfParams {
        k: 5.0,
        delta: 1e-3,
        ..GgvfParams::default()
    };
    let a = ggvf_solve(&f, &p, &DomainMask::full(spec)).unwrap();
    let b = ggvf_solve(&f, &p, &DomainMask::full(spec)).unwrap();
    assert_eq!(a.field, b.field);
    assert_eq!(a.change_history, b.change_history);
}
