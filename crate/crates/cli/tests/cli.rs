use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_integrable")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write(name: &str, v: &Value) -> String {
    let p = scratch(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_b2_catalog_instance() {
    let out = run(&["verify-b2", "--family", "trig-b2", "--params", "1,1,2,3,5", "--order", "32"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["ok"], json!(true));
}

#[test]
fn commutator_of_toda_c2() {
    let out = run(&["commutator-check", "--family", "toda-c2-1", "--params", "1,2,3,5,7", "--order", "32"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["commutes"], json!(true));
    assert_eq!(v["symmetric"], json!(true));
}

#[test]
fn perturbed_input_yields_witness() {
    let out = run(&["instantiate", "--family", "trig-b2", "--params", "1,1,2,3,5", "--order", "8"]);
    assert_eq!(code(&out), 0);
    let mut v = json_of(&out);
    let path = write("good.json", &v);
    assert_eq!(code(&run(&["verify-b2", "--input", &path])), 0);

    let terms = v["solution"]["v"]["terms"].as_array_mut().unwrap();
    terms[0]["num"] = json!("12345");
    let path = write("bad.json", &v);
    let out = run(&["verify-b2", "--input", &path]);
    assert_eq!(code(&out), 1);
    let r = json_of(&out);
    assert_eq!(r["ok"], json!(false));
    assert!(!r["witnesses"].as_array().unwrap().is_empty());

    let out = run(&["classify", "--input", &path]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["ok"], json!(false));
}

#[test]
fn classify_recovers_transformed_family() {
    let out = run(&["classify", "--family", "toda-c2-1", "--params", "1,2,3,5,7", "--transform", "reflect-y,translate:2:1/3"]);
    assert_eq!(code(&out), 0);
    let c = &json_of(&out)["components"][0];
    assert!(["Toda-C2(1)", "Toda-B2(1)"].contains(&c["tag"].as_str().unwrap()), "{c}");
}

#[test]
fn classify_rank_three() {
    let out = run(&["classify", "--family", "trig-bm", "--rank", "3", "--params", "2,3,5,7,11", "--order", "8"]);
    assert_eq!(code(&out), 0);
    let comps = json_of(&out)["components"].as_array().unwrap().clone();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0]["tag"], json!("Trig-Bm"));
    assert_eq!(comps[0]["roots"].as_array().unwrap().len(), 9);
}

#[test]
fn verify_bn_and_regularity() {
    let out = run(&["verify-bn", "--family", "toda-dm-1-bry", "--rank", "3", "--params", "1,2,3,5,7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["regular-check", "--family", "trig-bcm-reg", "--rank", "3", "--params", "1,2,3"]);
    assert_eq!((code(&out), json_of(&out)), (0, json!({ "regular": true })));
    let out = run(&["regular-check", "--family", "trig-bm", "--rank", "3", "--params", "1,2,3,5,7"]);
    assert_eq!((code(&out), json_of(&out)), (1, json!({ "regular": false })));
}

#[test]
fn type_a_triples() {
    let s = |k: i64, c: &str| json!({ "rank": 1, "ceiling": 24, "floor": -24, "terms": [{ "mu2": [k], "num": c, "den": "1" }] });
    let good = write("a_good.json", &json!({ "uij": s(2, "1"), "ujk": s(2, "2"), "uik": s(-2, "3") }));
    assert_eq!(code(&run(&["verify-a", "--input", &good])), 0);
    let bad = write("a_bad.json", &json!({ "uij": s(2, "1"), "ujk": s(2, "2"), "uik": s(2, "3") }));
    assert_eq!(code(&run(&["verify-a", "--input", &bad])), 1);
}

#[test]
fn vw_nullspace_dimension() {
    for (f, p, d) in [("trig-b2", "2,3,5,7,11", 4), ("trig-b2-s", "2,3,5,7", 2)] {
        let out = run(&["solve-vw", "--family", f, "--params", p]);
        assert_eq!(code(&out), 0);
        assert_eq!(json_of(&out)["dimension"], json!(d), "{f}");
    }
}

#[test]
fn catalog_listing() {
    let out = run(&["catalog-list", "--rank", "3", "--regular"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out).as_array().unwrap().len(), 4);
    let out = run(&["catalog-show", "--family", "Trig-B2", "--params", "1,1,2,3,5"]);
    let v = json_of(&out);
    assert_eq!(v["param_count"], json!(5));
    assert!(v.get("potential").is_some());
}

#[test]
fn transform_then_undo() {
    let out = run(&["transform", "--family", "trig-b2", "--params", "1,1,2,3,5", "--transform", "translate:2:3"]);
    assert_eq!(code(&out), 0);
    let path = write("moved.json", &json_of(&out));
    let back = run(&["transform", "--input", &path, "--transform", "translate:1/2:1/3"]);
    let direct = run(&["transform", "--family", "trig-b2", "--params", "1,1,2,3,5", "--transform", ""]);
    assert_eq!(json_of(&back), json_of(&direct));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify-b2", "--family", "no-such-family"][..],
        &["verify-b2", "--family", "trig-b2", "--params", "1,x"],
        &["verify-b2", "--family", "trig-b2", "--params", "1,2"],
        &["verify-b2", "--family", "trig-b2", "--params", "1,1,2,3,5", "--order", "0"],
        &["transform", "--family", "trig-b2", "--params", "1,1,2,3,5", "--transform", "spin:3"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn output_is_deterministic_and_canonical() {
    let args = ["classify", "--family", "trig-b2", "--params", "1,-1/2,2,3,5", "--transform", "dual,scale:2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", String::from_utf8(a.stdout).unwrap());
}

#[test]
fn output_flag_writes_file() {
    let p = scratch("list.json");
    let out = run(&["catalog-list", "--output", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 11);
}
