use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deformkit")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("deformkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn trivial_datum_passes_check_mdd() {
    let o = run(&["check-mdd", s(&data("trivial.json"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn so3_quantizes_at_order_two() {
    let o = run(&["quantize", s(&data("so3.json")), "--order", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["associative"], true);
    assert_eq!(v["bracket_preserved"], true);
    assert_eq!(v["table"]["x * y"], "x*y + hbar * (1/2*z)");
    // order 3 exceeds what the order-two quantization determines
    assert_eq!(code(&run(&["quantize", s(&data("so3.json"))])), 2);
}

#[test]
fn quantization_feeds_star_table() {
    let out = tmp("so3-star.json");
    assert_eq!(code(&run(&["quantize", s(&data("so3.json")), "--order", "2", "--out", s(&out)])), 0);
    let o = run(&["star-table", s(&out), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["associative"], true);
}

#[test]
fn moyal_table() {
    let o = run(&["star-table", s(&data("moyal.json")), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["table"]["x^2 * y^2"], "x^2*y^2 + hbar * (2*x*y) + hbar^2 * (1/2)");
}

#[test]
fn octahedron_class_is_reported() {
    let o = run(&["obstruction", s(&data("octahedron-class.json")), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["class"], "[c]*hbar");
    assert_eq!(v["order"], 1);
    assert_eq!(v["class_nonzero"], true);
    let text = run(&["obstruction", s(&data("octahedron-class.json"))]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("[c]*hbar"));
}

#[test]
fn coboundary_trivialization_feeds_check_add() {
    let out = tmp("triv.json");
    assert_eq!(code(&run(&["obstruction", s(&data("octahedron-coboundary.json")), "--out", s(&out)])), 0);
    assert_eq!(code(&run(&["check-add", s(&out)])), 0);
}

#[test]
fn integration_pipeline_feeds_back() {
    for (f, flavor) in [("ts-square-zero.json", "poisson"), ("ts-translation.json", "associative")] {
        let add = tmp(&format!("add-{}", f));
        let o = run(&["int-mc", s(&data(f)), "--format", "json"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(json(&o)["flavor"], flavor);
        std::fs::write(&add, &o.stdout).unwrap();
        // the report itself is accepted by the check commands
        assert_eq!(code(&run(&["check-add", s(&add)])), 0);
        let mdd = tmp(&format!("mdd-{}", f));
        assert_eq!(code(&run(&["exp-add", s(&add), "--out", s(&mdd)])), 0);
        assert_eq!(code(&run(&["check-mdd", s(&mdd)])), 0);
    }
}

#[test]
fn equivalence_with_itself() {
    let f = data("octahedron-class.json");
    let o = run(&["equiv", s(&f), s(&f), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["equivalent"], true);
}

#[test]
fn inequivalent_data_are_not_matched() {
    let o = run(&["equiv", s(&data("octahedron-class.json")), s(&data("octahedron-coboundary.json"))]);
    assert_eq!(code(&o), 1);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["int-mc", "ts-translation.json", "--format", "json"],
        vec!["quantize", "so3.json", "--order", "2"],
        vec!["obstruction", "octahedron-class.json", "--format", "json"],
        vec!["cohomology", "cohomology-octahedron.json"],
    ] {
        let p = data(args[1]);
        let mut a = args.clone();
        a[1] = s(&p);
        assert_eq!(run(&a).stdout, run(&a).stdout, "{:?}", args);
    }
}

#[test]
fn cohomology_of_octahedron() {
    let o = run(&["cohomology", s(&data("cohomology-octahedron.json")), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["betti"], serde_json::json!([1, 0, 1]));
}

#[test]
fn input_errors_carry_positions() {
    let cases = [
        ("{\"schema\": 1,\n \"flavor\": ", "2:"),
        ("{\"schema\": 2}", "1:2"),
        ("{\"schema\": 1, \"flavor\": \"poisson\", \"params\": 3, \"nerve\": \"full:2\"}", "1:"),
        ("{\"schema\": 1, \"flavor\": \"poison\", \"params\": \"hbar:1\", \"nerve\": \"full:2\"}", "1:"),
        ("{\"schema\": 1,\n \"flavor\": \"poisson\", \"params\": \"hbar:1\", \"nerve\": \"full:2\",\n \"vertex\": {\"U7\": []}}", "3:"),
    ];
    for (i, (text, pos)) in cases.iter().enumerate() {
        let p = tmp(&format!("bad{}.json", i));
        std::fs::write(&p, text).unwrap();
        let o = run(&["check-add", s(&p)]);
        assert_eq!(code(&o), 2, "case {}", i);
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(&format!("bad{}.json:{}", i, pos)), "case {}: {}", i, err);
    }
    assert_eq!(code(&run(&["check-add", "/nonexistent.json"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn failing_datum_exits_one() {
    let p = tmp("broken.json");
    let text = std::fs::read_to_string(data("trivial.json")).unwrap().replace(
        "\"U1\": [{ \"param\": \"hbar\", \"coeff\": \"1\", \"op\": \"dx^dy\" }]",
        "\"U1\": [{ \"param\": \"hbar\", \"coeff\": \"2\", \"op\": \"dx^dy\" }]",
    );
    std::fs::write(&p, text).unwrap();
    let o = run(&["check-add", s(&p), "--format", "json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["report"]["violations"][0]["condition"], "edge");
}

#[test]
fn selftest_subset() {
    let o = run(&["selftest", "--criterion", "3", "--criterion", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}
