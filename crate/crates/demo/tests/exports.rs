use serde_json::Value;
use sscap_demo::{capacity_curve_bsc, exponent_curve, softcover_trend};

fn h(x: f64) -> f64 {
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn capacity_curve_endpoints() {
    let v = parse(capacity_curve_bsc(0.1, 4));
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 5);
    assert!((pts[0]["value"].as_f64().unwrap() - (1.0 - h(0.1))).abs() < 1e-9);
    assert!(pts[4]["value"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["non_increasing"], true);
}

#[test]
fn exponent_curve_reports_information_and_gamma() {
    let v = parse(exponent_curve(0.2, 0.8, 0.05));
    assert!((v["mutual_information"].as_f64().unwrap() - (1.0 - h(0.2))).abs() < 1e-12);
    assert!(v["gamma_delta"].as_f64().unwrap() > 0.0);
    assert!(!v["curve"].as_array().unwrap().is_empty());
    // Below the mutual information there is nothing to cover with.
    let v = parse(exponent_curve(0.2, 0.1, 0.05));
    assert_eq!(v["gamma_delta"].as_f64().unwrap(), 0.0);
}

#[test]
fn softcover_trend_is_seeded() {
    let a = softcover_trend(0.2, 0.8, 0.05, 8, 5, 3).unwrap();
    assert_eq!(a, softcover_trend(0.2, 0.8, 0.05, 8, 5, 3).unwrap());
    let v: Value = serde_json::from_str(&a).unwrap();
    let ns: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["n"].as_u64().unwrap()).collect();
    assert_eq!(ns, [2, 4, 6, 8]);
}

#[test]
fn bad_arguments_are_errors() {
    assert!(capacity_curve_bsc(0.1, 0).is_err());
    assert!(capacity_curve_bsc(1.5, 4).is_err());
    assert!(exponent_curve(0.2, -1.0, 0.05).is_err());
    assert!(softcover_trend(0.2, 0.8, 0.05, 40, 5, 1).is_err());
    assert!(softcover_trend(0.2, 0.8, 0.05, 8, 0, 1).is_err());
}
