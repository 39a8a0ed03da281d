use integrable_web::{classify, commutator, families, verify};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn lists_rank_two_families() {
    let v = parse(&families());
    assert_eq!(v.as_array().unwrap().len(), 10);
    assert_eq!(v[0], "Trig-B2");
}

#[test]
fn verify_and_commute() {
    let v = parse(&verify("Trig-B2", "1,1,2,3,5", "dual,translate:2:3", 16).unwrap());
    assert_eq!(v["ok"], true);
    let v = parse(&commutator("Toda-C2(1)", "1,2,3,5,7", 16).unwrap());
    assert_eq!((v["commutes"].clone(), v["symmetric"].clone()), (Value::Bool(true), Value::Bool(true)));
}

#[test]
fn classify_reports_tag() {
    let v = parse(&classify("Trig-B2", "1,-1/2,2,3,5", "translate:3:1").unwrap());
    assert_eq!(v["tag"], "Trig-B2");
}

#[test]
fn bad_input_is_an_error() {
    assert!(verify("Trig-B2", "1,2", "", 8).is_err());
    assert!(classify("nope", "1", "").is_err());
}
