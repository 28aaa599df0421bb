use std::f64::consts::PI;

use hypconc::families::{random_mask, stream_rng};
use hypconc::format::*;
use hypconc_core::bergman::BergmanFunction;
use hypconc_core::concentration::localization_matrix;
use hypconc_core::hyperbolic::{mu_measure, pseudo_disc, HyperbolicSet, PseudoDisc};
use hypconc_core::transforms::HalfPlaneSignal;
use hypconc_core::{AlphaParam, Complex64};
use proptest::prelude::*;

#[test]
fn function_record_round_trips() {
    let f = BergmanFunction::new(
        AlphaParam::new(-0.3).unwrap(),
        vec![Complex64::new(0.5, -0.25), Complex64::new(0.0, 1.0 / 3.0), Complex64::new(-2.0, 1e-300)],
    )
    .unwrap();
    let text = serde_json::to_string(&FunctionRecord::from_function(&f)).unwrap();
    let back: FunctionRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_function().unwrap(), f);
    let bad = FunctionRecord { alpha: -1.5, coeffs: vec![[1.0, 0.0]] };
    assert!(matches!(bad.to_function(), Err(FormatError::Numeric(_))));
}

#[test]
fn disc_record_round_trips() {
    let d = PseudoDisc::new(Complex64::new(0.3, -0.2), 2.5).unwrap();
    let rec = SetRecord::from_disc(&d);
    let text = serde_json::to_string(&rec).unwrap();
    assert!(text.contains("\"type\":\"disc\""));
    let back: SetRecord = serde_json::from_str(&text).unwrap();
    match back.to_set().unwrap() {
        HyperbolicSet::Disc(e) => assert_eq!(e, d),
        other => panic!("expected a disc, got {other:?}"),
    }
}

#[test]
fn mask_record_round_trips() {
    let spec = GridSpec { nr: 24, ntheta: 40, rmax: 0.99 };
    let grid = spec.build().unwrap();
    let mask = random_mask(&mut stream_rng(3, 0), &grid, PI);
    let rec = SetRecord::from_mask(spec, &mask);
    let text = serde_json::to_string_pretty(&rec).unwrap();
    let back: SetRecord = serde_json::from_str(&text).unwrap();
    match back.to_set().unwrap() {
        HyperbolicSet::Mask(m) => {
            assert_eq!(m.bits(), mask.bits());
            assert_eq!(m.mu(), mask.mu());
        }
        other => panic!("expected a mask, got {other:?}"),
    }
}

#[test]
fn mask_record_rejects_wrong_length() {
    let rec = SetRecord::Mask { grid: GridSpec { nr: 4, ntheta: 8, rmax: 0.9 }, mask: encode_bits(&[true; 9]) };
    assert!(matches!(rec.to_set(), Err(FormatError::Malformed(_))));
    let rec = SetRecord::Mask { grid: GridSpec { nr: 4, ntheta: 8, rmax: 0.9 }, mask: "not base64!".into() };
    assert!(matches!(rec.to_set(), Err(FormatError::Base64(_))));
}

#[test]
fn rmax_defaults_when_absent() {
    let g: GridSpec = serde_json::from_str(r#"{"nr": 8, "ntheta": 16}"#).unwrap();
    assert_eq!(g.rmax, 0.999);
}

#[test]
fn grid_spec_parsing() {
    assert_eq!(GridSpec::parse("48x128", 0.99).unwrap(), GridSpec { nr: 48, ntheta: 128, rmax: 0.99 });
    assert_eq!(GridSpec::parse("8X16", 0.5).unwrap().ntheta, 16);
    for bad in ["48", "48x", "x12", "4.5x8", "-3x8"] {
        assert!(GridSpec::parse(bad, 0.9).is_err(), "{bad}");
    }
}

#[test]
fn signal_record_recovers_rate() {
    for (beta, rate) in [(0.5, 1.0), (1.5, 2.0), (2.0, 0.7)] {
        let f = HalfPlaneSignal::atom_with_rate(beta, Complex64::new(0.2, 0.9), 48, rate).unwrap();
        let rec = SignalRecord::from_signal(beta, &f);
        let back: SignalRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        let g = back.to_signal().unwrap();
        assert!((g.rate() / rate - 1.0).abs() < 1e-12);
        assert_eq!(g.values(), f.values());
        assert!((g.norm_sq() / f.norm_sq() - 1.0).abs() < 1e-12);
    }
    assert!(SignalRecord { beta: 1.0, nodes: vec![] }.to_signal().is_err());
}

#[test]
fn deficit_record_copies_fields() {
    let f = BergmanFunction::constant(AlphaParam::new(0.0).unwrap());
    let r = hypconc_core::concentration::deficit(&f, &pseudo_disc(Complex64::new(0.0, 0.0), PI).unwrap()).unwrap();
    let rec = DeficitRecord::from(r);
    assert_eq!(rec.s, r.s);
    assert_eq!(rec.deficit, r.deficit);
    assert!((rec.theta - 0.5).abs() < 1e-15);
}

#[test]
fn matrix_csv_shape() {
    let set = pseudo_disc(Complex64::new(0.2, 0.1), 2.0).unwrap();
    let t = localization_matrix(AlphaParam::new(1.0).unwrap(), &set, 5).unwrap();
    let mut buf = Vec::new();
    write_matrix_csv(&t, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("re0,im0,re1"));
    assert!(lines.iter().all(|l| l.split(',').count() == 10));
    let first: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first, t.matrix.get(0, 0).re);
}

fn sample_report() -> Report {
    let mut r = Report::new("demo", &["x", "y"]).param("alpha", 0.5).param("eps", [1e-1, 1e-2]);
    r.push(vec![1.0, f64::INFINITY]);
    r.push(vec![-0.0, f64::NAN]);
    r.push(vec![f64::NEG_INFINITY, 0.125]);
    r.flag(1, "y is not a number");
    r
}

#[test]
fn report_json_keeps_non_finite_cells() {
    let r = sample_report();
    let mut buf = Vec::new();
    r.write(OutputFormat::Json, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains("\"schema\": \"hypconc/1\""));
    assert!(text.contains("\"inf\"") && text.contains("\"-inf\"") && text.contains("\"nan\""));
    let back = Report::read_json(&text).unwrap();
    assert_eq!(back.columns, r.columns);
    assert_eq!(back.params, r.params);
    assert_eq!(back.violations, r.violations);
    for (a, b) in back.rows.iter().flatten().zip(r.rows.iter().flatten()) {
        assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()), "{a} {b}");
    }
}

#[test]
fn report_rejects_foreign_schema_and_bad_cells() {
    let mut r = sample_report();
    r.schema = "hypconc/0".into();
    let text = serde_json::to_string(&r).unwrap();
    assert!(matches!(Report::read_json(&text), Err(FormatError::Malformed(_))));
    let text = serde_json::to_string(&sample_report()).unwrap().replace("\"nan\"", "\"zero\"");
    assert!(matches!(Report::read_json(&text), Err(FormatError::Json(_))));
}

#[test]
fn report_csv_has_header_and_rows() {
    let r = sample_report();
    let mut buf = Vec::new();
    r.write(OutputFormat::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text, "x,y\n1,inf\n-0,NaN\n-inf,0.125\n");
    assert_eq!(r.column("y").unwrap().len(), 3);
    assert!(r.column("z").is_none());
}

#[test]
fn mask_measure_survives_encoding() {
    let spec = GridSpec { nr: 16, ntheta: 32, rmax: 0.95 };
    let grid = spec.build().unwrap();
    let set = HyperbolicSet::Disc(PseudoDisc::new(Complex64::new(0.1, 0.0), 1.0).unwrap());
    let mask = set.rasterize(&grid);
    let back = SetRecord::from_mask(spec, &mask).to_set().unwrap();
    assert_eq!(mu_measure(&back), mask.mu());
}

proptest! {
    #[test]
    fn bit_encoding_round_trips(bits in prop::collection::vec(any::<bool>(), 0..300)) {
        let text = encode_bits(&bits);
        prop_assert_eq!(decode_bits(&text, bits.len()).unwrap(), bits.clone());
        // a bitset one byte longer does not decode
        prop_assert!(decode_bits(&text, bits.len() + 8).is_err());
    }

    #[test]
    fn finite_reports_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e300f64..1e300, 3), 0..20)) {
        let mut r = Report::new("p", &["a", "b", "c"]);
        for row in &rows {
            r.push(row.clone());
        }
        let mut buf = Vec::new();
        r.write(OutputFormat::Json, &mut buf).unwrap();
        let back = Report::read_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}
