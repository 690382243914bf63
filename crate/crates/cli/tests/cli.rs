use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abduct")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[test]
fn weak_and_irrefutable_explanations_of_example_one() {
    let data = fixture("example1.csv");
    let base = ["explain", "--data", &data, "--rows", "0,1", "--target", "row=0"];
    let dw = json(&[&base[..], &["--explainer", "dwaxp"]].concat());
    assert_eq!(strings(&dw["explanations"]), ["f1=0,f2=0", "f2=0"]);
    let ir = json(&[&base[..], &["--explainer", "irrefutable"]].concat());
    assert_eq!(strings(&ir["explanations"]), ["f1=0,f2=0", "f2=0"]);
    assert_eq!(dw["question"]["digest"], ir["question"]["digest"]);
    assert_eq!(dw["verified"], true);
}

#[test]
fn caxp_of_antelope_is_verified_and_order_dependent() {
    let data = fixture("zoo.csv");
    let base = ["explain", "--data", &data, "--id-column", "name", "--explainer", "caxp", "--target", "name=antelope"];
    let asc = json(&base);
    let desc = json(&[&base[..], &["--order", "desc"]].concat());
    assert_eq!(strings(&asc["explanations"]), ["toothed=1,legs=4,catsize=1"]);
    assert_eq!(strings(&desc["explanations"]), ["hair=1,eggs=0"]);
    let milk_last = "hair,feathers,eggs,airborne,aquatic,predator,toothed,backbone,breathes,venomous,fins,legs,tail,domestic,catsize,milk";
    let by_list = json(&[&base[..], &["--order", milk_last]].concat());
    assert_eq!(strings(&by_list["explanations"]), ["milk=1"]);
}

#[test]
fn envelopes_of_the_examples() {
    let ex1 = fixture("example1.csv");
    let doc = json(&["envelope", "--data", &ex1, "--rows", "0,1", "--decision-list"]);
    let members: Vec<&str> = doc["irrefutable"].as_array().unwrap().iter().map(|m| m["explanation"].as_str().unwrap()).collect();
    assert_eq!(members, ["f1=0,f2=0", "f1=0,f2=1", "f2=0", "f2=1"]);
    assert_eq!(strings(&doc["decision_list"]), ["f2=0 -> 0", "f2=1 -> 1", "default: 0"]);

    let ex3 = fixture("example3.csv");
    let doc = json(&["envelope", "--data", &ex3]);
    let members: Vec<&str> = doc["irrefutable"].as_array().unwrap().iter().map(|m| m["explanation"].as_str().unwrap()).collect();
    assert_eq!(members, ["f1=0,f2=0", "f1=1,f2=0", "f1=1,f2=1", "f2=0"]);
}

#[test]
fn single_row_envelope_is_the_whole_pool() {
    let ex1 = fixture("example1.csv");
    let doc = json(&["envelope", "--data", &ex1, "--rows", "0"]);
    assert_eq!(doc["irrefutable"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_deterministic_and_written_to_out() {
    let dir = std::env::temp_dir().join(format!("abduct-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let data = fixture("zoo.csv");
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.join(format!("run{i}.json"));
            let p = path.to_string_lossy().into_owned();
            let args = ["surrogate", "--data", &data, "--id-column", "name", "--format", "json", "--out", &p];
            assert!(run(&args).status.success());
            std::fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let doc: Value = serde_json::from_slice(&outs[0]).unwrap();
    assert_eq!(doc["root"], "milk");
    assert_eq!(doc["accuracy"]["correct"], 101);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn single_class_surrogate_is_one_leaf() {
    let dir = std::env::temp_dir().join(format!("abduct-one-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("one.csv");
    std::fs::write(&path, "f1,f2,class\n0,0,a\n0,1,a\n1,1,a\n").unwrap();
    let doc = json(&["surrogate", "--data", &path.to_string_lossy()]);
    assert_eq!(doc["leaves"], 1);
    for row in doc["explanations"].as_array().unwrap() {
        assert_eq!(row["axp"], "{}");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes() {
    let ex1 = fixture("example1.csv");
    let zoo = fixture("zoo.csv");
    let bad_target = run(&["explain", "--data", &ex1, "--explainer", "dwaxp", "--target", "row=9", "--format", "json"]);
    assert_eq!(bad_target.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&bad_target.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "validation");

    let missing = run(&["explain", "--data", "/nonexistent.csv", "--explainer", "dwaxp", "--target", "row=0"]);
    assert_eq!(missing.status.code(), Some(2));

    let capped = run(&["explain", "--data", &zoo, "--id-column", "name", "--explainer", "dwaxp", "--target", "row=0", "--cap", "100"]);
    assert_eq!(capped.status.code(), Some(3));

    let demo = run(&["demo-zoo"]);
    assert_eq!(demo.status.code(), Some(4));
    let text = String::from_utf8_lossy(&demo.stdout);
    assert!(text.contains("[PASS] root feature is milk"));
    assert!(text.contains("[FAIL] listed 14-literal set"));
}

#[test]
fn desk_axiom_matrix_has_no_discrepancies() {
    let doc = json(&["axioms", "--certificates"]);
    assert_eq!(doc["discrepancies"].as_array().unwrap().len(), 0);
    assert_eq!(doc["universe"]["questions"], 512);
    assert_eq!(doc["certificates"].as_array().unwrap().len(), 15);
}

#[test]
fn oracle_compare_agrees_on_small_data() {
    for name in ["example1.csv", "example3.csv"] {
        let doc = json(&["oracle-compare", "--data", &fixture(name)]);
        assert_eq!(doc["mismatches"].as_array().unwrap().len(), 0);
    }
}
