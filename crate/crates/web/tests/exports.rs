use giant_atom_web::{layout_response, preset_curve, symmetric_curves};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn symmetric_peak_is_n_squared() {
    let v = parse(symmetric_curves(4, 401));
    let rate = v["rate"].as_array().unwrap();
    assert_eq!(rate.len(), 401);
    // ν = 1 sits at index 200.
    assert!((rate[200].as_f64().unwrap() - 16.0).abs() < 1e-12);
    assert!((v["mirror_rate"][200].as_f64().unwrap() - 32.0).abs() < 1e-12);
}

#[test]
fn preset_two_maxima_are_equal() {
    let v = parse(preset_curve("a", 301));
    assert_eq!(v["name"], "two-maxima");
    let mut peaks: Vec<f64> = v["features"]["maxima"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"].as_f64().unwrap())
        .collect();
    peaks.sort_by(|a, b| b.total_cmp(a));
    assert!((peaks[0] - peaks[1]).abs() < 1e-6 * peaks[0]);
}

#[test]
fn layout_response_matches_single_point() {
    let v = parse(layout_response(vec![0.0], vec![2.0], 0.1, 1.0, 10));
    for r in v["rate"].as_array().unwrap() {
        assert!((r.as_f64().unwrap() - 4.0).abs() < 1e-12);
    }
    assert!(v["shift"].as_array().unwrap().iter().all(|s| s.as_f64() == Some(0.0)));
}

#[test]
fn errors_are_reported_as_json() {
    assert!(parse(preset_curve("z", 10))["error"].is_string());
    assert!(parse(layout_response(vec![1.0, 0.0], vec![1.0, 1.0], 0.0, 1.0, 10))["error"].is_string());
    assert!(parse(symmetric_curves(0, 10))["error"].is_string());
}
