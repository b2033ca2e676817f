use gvflow::error::Error;
use gvflow::field::{GridSpec, ScalarField, VectorField};
use gvflow::io::{
    decode_contour, decode_field, decode_pgm, encode_contour, encode_field, encode_pgm,
    read_contour, read_field, read_pgm, render_field, write_contour, write_field, write_pgm_with,
    PgmEncoding, RenderMode,
};
use gvflow::mask::Rect;
use gvflow::snake::{Point, Snake};
use gvflow::synth::{synth_box_with_hole, synth_disk, synth_ushape};
use proptest::prelude::*;
use tempfile::TempDir;

fn spec() -> impl Strategy<Value = GridSpec> {
    (3usize..20, 3usize..20).prop_map(|(w, h)| GridSpec::new(w, h).unwrap())
}

fn field() -> impl Strategy<Value = VectorField> {
    spec().prop_flat_map(|s| {
        let comp = move || {
            prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, s.len())
                .prop_map(move |v| ScalarField::from_vec(s, v).unwrap())
        };
        (comp(), comp()).prop_map(|(u, v)| VectorField::new(u, v).unwrap())
    })
}

fn image(maxval: u16) -> impl Strategy<Value = ScalarField> {
    spec().prop_flat_map(move |s| {
        prop::collection::vec(0..=maxval, s.len()).prop_map(move |v| {
            ScalarField::from_vec(s, v.into_iter().map(f64::from).collect()).unwrap()
        })
    })
}

fn snake() -> impl Strategy<Value = Snake> {
    prop::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 4..60)
        .prop_map(|p| Snake::new(p.into_iter().map(|(x, y)| Point::new(x, y)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_files_round_trip_exactly(f in field()) {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("f.gvf");
        write_field(&f, &path).unwrap();
        prop_assert_eq!(read_field(&path).unwrap(), f);
    }

    #[test]
    fn pgm_round_trips(img in image(65535), ascii in any::<bool>()) {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("i.pgm");
        let enc = if ascii { PgmEncoding::Ascii } else { PgmEncoding::Binary };
        write_pgm_with(&img, &path, 65535, enc).unwrap();
        prop_assert_eq!(read_pgm(&path).unwrap(), img);
    }

    #[test]
    fn contours_round_trip(s in snake()) {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("c.csv");
        write_contour(&s, &path).unwrap();
        prop_assert_eq!(read_contour(&path).unwrap(), s);
    }

    #[test]
    fn writers_are_deterministic(f in field(), img in image(255)) {
        prop_assert_eq!(encode_field(&f), encode_field(&f.clone()));
        prop_assert_eq!(
            encode_pgm(&img, 255, PgmEncoding::Binary).unwrap(),
            encode_pgm(&img.clone(), 255, PgmEncoding::Binary).unwrap()
        );
        for mode in [RenderMode::MagnitudeHeatmap, RenderMode::DirectionHue, RenderMode::Arrows { stride: 3 }] {
            let img = render_field(&f, mode);
            prop_assume!(img.is_ok());
            let img = img.unwrap();
            prop_assert_eq!(img.to_ppm(), render_field(&f, mode).unwrap().to_ppm());
            prop_assert_eq!((img.width, img.height), (f.spec().width, f.spec().height));
        }
    }

    #[test]
    fn garbage_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let _ = decode_pgm(&bytes);
        if let Ok(text) = std::str::from_utf8(&bytes) {
            let _ = decode_field(text);
            let _ = decode_contour(text);
        }
    }
}

#[test]
fn field_file_errors_name_their_offset() {
    let good = encode_field(&VectorField::constant(
        GridSpec::new(3, 3).unwrap(),
        1.0,
        2.0,
    ));
    for (text, why) in [
        (good.replacen("GVF1", "GVF2", 1), "magic"),
        (good.lines().take(6).collect::<Vec<_>>().join("\n"), "short"),
        (format!("{good}1 2\n"), "extra"),
        (good.replacen("1.0000000000000000e0 2", "x 2", 1), "number"),
    ] {
        assert!(
            matches!(decode_field(&text), Err(Error::Format { .. })),
            "{why}: {:?}",
            decode_field(&text)
        );
    }
}

#[test]
fn contour_text_is_one_pair_per_line() {
    let s = Snake::circle(0.0, 0.0, 1.0, 4).unwrap();
    let text = encode_contour(&s);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.split(',').count() == 2));
}

#[test]
fn generators_are_pure() {
    assert_eq!(
        synth_ushape(128, 128).unwrap(),
        synth_ushape(128, 128).unwrap()
    );
    assert_eq!(
        synth_disk(64, 64, 31.5, 31.5, 12.0).unwrap(),
        synth_disk(64, 64, 31.5, 31.5, 12.0).unwrap()
    );
    let hole = Rect::new(30, 30, 10, 10);
    assert_eq!(
        synth_box_with_hole(80, 80, hole).unwrap(),
        synth_box_with_hole(80, 80, hole).unwrap()
    );
    // the notch center of the U is background
    assert_eq!(synth_ushape(128, 128).unwrap().get(64, 40), 0.0);
}

#[test]
fn huge_headers_fail_cleanly() {
    assert!(decode_pgm(b"P5 4000000000 4000000000 255\n").is_err());
    assert!(decode_pgm(b"P2 30000 30000 255\n1 2 3").is_err());
    assert!(decode_field("GVF1\n100000 100000\n1 1\n").is_err());
    assert!(decode_field("GVF1\n30000 30000\n1 1\n0 0\n").is_err());
}
