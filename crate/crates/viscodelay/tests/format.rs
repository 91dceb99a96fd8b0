use proptest::prelude::*;
use serde::Serialize;
use serde_json::json;
use viscodelay::format::{
    fmt_f64, json_text, read_columns, text_records, to_json, write_csv, write_report, ENERGY_COLUMNS,
};

#[derive(Serialize)]
struct Sample {
    name: String,
    rho: f64,
    bound: f64,
    missing: Option<f64>,
    nested: Inner,
}

#[derive(Serialize)]
struct Inner {
    values: Vec<f64>,
    count: u32,
}

fn sample() -> Sample {
    Sample {
        name: "demo".into(),
        rho: f64::INFINITY,
        bound: 0.25,
        missing: None,
        nested: Inner { values: vec![1.5, f64::NEG_INFINITY, f64::NAN], count: 3 },
    }
}

#[test]
fn non_finite_numbers_become_strings() {
    let v = to_json(&sample()).unwrap();
    assert_eq!(v["rho"], json!("inf"));
    assert_eq!(v["bound"], json!(0.25));
    assert_eq!(v["nested"]["values"], json!([1.5, "-inf", "nan"]));
    assert_eq!(v["nested"]["count"], json!(3));
    assert!(v.get("missing").is_none());
    let text = json_text(&v);
    assert!(text.ends_with('\n'));
    assert_eq!(serde_json::from_str::<serde_json::Value>(&text).unwrap(), v);
}

#[test]
fn text_records_flatten_the_tree() {
    let text = text_records(&to_json(&sample()).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        [
            "bound = 2.5000000000000000e-1",
            "name = demo",
            "nested.count = 3",
            "nested.values.0 = 1.5000000000000000e0",
            "nested.values.1 = -inf",
            "nested.values.2 = nan",
            "rho = inf",
        ]
    );
}

#[test]
fn reports_come_in_pairs() {
    let dir = tempfile::tempdir().unwrap();
    write_report(dir.path(), "demo", &sample()).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("demo.json")).unwrap()).unwrap();
    assert_eq!(json["rho"], json!("inf"));
    let txt = std::fs::read_to_string(dir.path().join("demo.txt")).unwrap();
    assert!(txt.contains("rho = inf\n"));
}

#[test]
fn csv_round_trip_keeps_every_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let rows = vec![
        vec![0.0, 1.0 / 3.0, f64::INFINITY],
        vec![0.1, -2.5e-300, f64::NAN],
        vec![0.2, f64::MAX, f64::NEG_INFINITY],
    ];
    let header = ["t".to_string(), "energy".to_string(), "extra".to_string()];
    write_csv(&path, &header, rows.clone().into_iter()).unwrap();
    let cols = read_columns(&path, &["extra", "t", "energy"]).unwrap();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(cols[1][i].to_bits(), row[0].to_bits());
        assert_eq!(cols[2][i].to_bits(), row[1].to_bits());
        assert!(cols[0][i] == row[2] || (cols[0][i].is_nan() && row[2].is_nan()));
    }
    assert!(read_columns(&path, &["running_max"]).is_err());
}

#[test]
fn energy_columns_start_with_time_and_energy() {
    assert_eq!(&ENERGY_COLUMNS[..3], &["t", "energy", "running_max"]);
}

proptest! {
    #[test]
    fn formatted_floats_parse_back_exactly(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        let back: f64 = fmt_f64(x).parse().unwrap();
        if x.is_nan() {
            prop_assert!(back.is_nan());
        } else {
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
