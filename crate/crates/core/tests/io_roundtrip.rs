use ncrealize::freecore::{FreeSeries, MatrixTuple, Word};
use ncrealize::io::{from_json, series_hash, to_json, PointFile, ReportFile, SeriesFile};
use ncrealize::funcalc::{HermitianCalculus, ScalarFunction};
use ncrealize::linalg::CMat;
use ncrealize::ordertest::{check_convex, check_monotone, DomainSpec};
use num_complex::Complex;
use proptest::prelude::*;

fn coefficient(k: usize, vals: &[(f64, f64)]) -> CMat<f64> {
    CMat::from_fn(k, k, |i, j| {
        let (re, im) = vals[(i * k + j) % vals.len()];
        Complex::new(re, im)
    })
}

proptest! {
    #[test]
    fn series_files_round_trip(
        d in 1usize..=3,
        k in 1usize..=2,
        raw in proptest::collection::vec((proptest::collection::vec(1usize..=3, 0..=3), -5.0f64..5.0, -5.0f64..5.0), 0..8),
    ) {
        let mut s = FreeSeries::<f64>::zero(d, 3, k);
        for (word, re, im) in raw {
            let w = Word::new(word.into_iter().map(|i| 1 + (i - 1) % d).collect());
            s.insert(w, coefficient(k, &[(re, im), (im, -re)])).unwrap();
        }
        let text = to_json(&SeriesFile::from_series(&s));
        let back = from_json::<SeriesFile>(&text).unwrap().to_series::<f64>().unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(series_hash(&back), series_hash(&s));
    }

    #[test]
    fn point_files_round_trip(vals in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..6), n in 1usize..=3) {
        let z = MatrixTuple::new(vec![coefficient(n, &vals), coefficient(n, &vals).adjoint()]).unwrap();
        let text = to_json(&PointFile::from_tuple(&z));
        prop_assert_eq!(from_json::<PointFile>(&text).unwrap().to_tuple::<f64>().unwrap(), z);
    }
}

#[test]
fn failing_report_round_trips_exactly() {
    let f = HermitianCalculus::new(ScalarFunction::Exp);
    let dom = DomainSpec::ball(0.9, 1, 3).unwrap();
    let r = check_monotone(&f, &dom, 50, 1e-8, 4).unwrap();
    assert!(!r.passed());
    let text = to_json(&ReportFile::from_report(&r, serde_json::json!({"note": "x"})));
    let file: ReportFile = from_json(&text).unwrap();
    assert_eq!(file.to_report::<f64>().unwrap(), r);
    assert_eq!(to_json(&file), text);
}

#[test]
fn passing_report_has_null_witness() {
    let f = HermitianCalculus::new(ScalarFunction::Power(2.0));
    let dom = DomainSpec::ball(0.9, 1, 3).unwrap();
    let r = check_convex(&f, &dom, 30, 1e-8, 4).unwrap();
    let text = to_json(&ReportFile::from_report(&r, serde_json::Value::Null));
    assert!(text.contains("\"witness\": null"));
    assert!(text.contains("\"verdict\": \"pass\""));
}
