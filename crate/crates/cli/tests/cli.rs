use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entbasis"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn construct(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let mut args = vec!["construct", name, "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn catalog_lists_every_entry() {
    let out = run(&["catalog", "list", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let rows = json(&out);
    let find = |name: &str| rows.as_array().unwrap().iter().find(|r| r["name"] == name).cloned().unwrap();
    let w = find("eq5-w-ueb");
    assert_eq!(w["dims"], serde_json::json!([2, 2, 2]));
    assert_eq!(w["cardinality"], 6);
    assert_eq!(w["expected"], "UEB_ALL_CUTS");
    assert_eq!(find("eq6-mixed-ueb")["cardinality"], 7);
    assert_eq!(find("appendix-4qubit")["cardinality"], 15);
}

#[test]
fn construct_then_verify_round_trips_every_catalog_entry() {
    let dir = tempfile::tempdir().unwrap();
    let rows = json(&run(&["catalog", "list", "--format", "json"]));
    for row in rows.as_array().unwrap() {
        let name = row["name"].as_str().unwrap();
        let path = construct(dir.path(), name, &[]);
        let out = run(&["verify", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name}");
        assert_eq!(json(&out)["verdict"]["grade"], "EXACT", "{name}");
    }
}

#[test]
fn generator_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let read = |p: PathBuf| -> Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };
    let eq1 = read(construct(dir.path(), "eq1-ueb", &[]));
    assert_eq!(eq1["states"].as_array().unwrap().len(), 3);
    let n5 = read(construct(dir.path(), "nqubit-ueb", &["--n", "5"]));
    assert_eq!(n5["states"].as_array().unwrap().len(), 31);
    let e = read(construct(dir.path(), "embed-meb", &["--d", "3", "--n", "2"]));
    assert_eq!(e["states"].as_array().unwrap().len(), 9);
    assert_eq!(e["dims"], serde_json::json!([3, 5]));
    let g = read(construct(dir.path(), "ueb-general", &["--angles", "0.3,-1.1,0.0"]));
    assert_eq!(g["expected_kind"], "UEB");
}

#[test]
fn construct_rejects_unknown_names_and_bad_parameters() {
    assert_eq!(code(&run(&["construct", "no-such-thing"])), 3);
    assert_eq!(code(&run(&["construct", "embed-meb", "--d", "2", "--n", "2"])), 3);
    assert_eq!(code(&run(&["construct", "nqubit-ueb"])), 3);
}

#[test]
fn w_ueb_verifies_exactly_across_all_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "eq5-w-ueb", &[]);
    let out = run(&["verify", path.to_str().unwrap(), "--kind", "ueb-all-cuts"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    let cuts = r["verdict"]["per_cut"].as_array().unwrap();
    assert_eq!(cuts.len(), 3);
    assert!(cuts.iter().all(|c| c["grade"] == "EXACT" && c["status"] == "ONLY_PRODUCT"));
    assert!(r["states"].as_array().unwrap().iter().all(|s| s["slocc"]["label"] == "W" && s["grade"] == "EXACT"));
}

#[test]
fn single_cut_of_a_tripartite_set() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "eq5-w-ueb", &[]);
    let p = path.to_str().unwrap();
    let out = run(&["verify", p, "--kind", "ueb", "--cut", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["settings"]["cut"]["label"], "A|BC");
    assert_eq!(code(&run(&["verify", p, "--kind", "ueb"])), 3);
    assert_eq!(code(&run(&["verify", p, "--kind", "ueb", "--cut", "all"])), 0);
    assert_eq!(code(&run(&["verify", p, "--cut", "8"])), 3);
}

#[test]
fn exit_code_matrix() {
    let f = |n: &str| fixture(n).to_str().unwrap().to_string();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["verify".into(), f("umeb-candidate-2x3.json"), "--kind".into(), "umeb".into()], 0),
        (vec!["verify".into(), f("two-bell-states.json"), "--kind".into(), "ueb".into()], 1),
        (
            vec!["verify".into(), f("umeb-candidate-2x3.json"), "--kind".into(), "umeb".into(), "--require-exact".into()],
            2,
        ),
        (vec!["verify".into(), f("malformed.json")], 3),
        (vec!["verify".into(), f("not-normalized.json")], 3),
        (vec!["verify".into(), f("slightly-off.json")], 3),
        (vec!["verify".into(), f("missing.json")], 3),
        (vec!["verify".into(), f("two-bell-states.json"), "--tol".into(), "0.5".into()], 3),
        (vec!["analyze".into(), f("malformed.json")], 3),
    ];
    for (args, want) in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(code(&run(&refs)), want, "{args:?}");
    }
}

#[test]
fn two_bell_states_are_refuted_by_an_entangled_complement() {
    let out = run(&["verify", fixture("two-bell-states.json").to_str().unwrap(), "--kind", "ueb"]);
    let r = json(&out);
    assert_eq!(r["verdict"]["outcome"], "REFUTED");
    assert_eq!(r["verdict"]["per_cut"][0]["status"], "CONTAINS_ENTANGLED");
    assert_eq!(r["complement"]["dim"], 2);
    assert_eq!(r["complement"]["only_product"][0]["only_product"], false);
}

#[test]
fn gram_fix_repairs_small_overlaps() {
    let out = run(&["verify", fixture("slightly-off.json").to_str().unwrap(), "--gram-fix"]);
    assert_ne!(code(&out), 3);
    assert_eq!(json(&out)["settings"]["gram_fix"], true);
}

#[test]
fn inconclusive_report_carries_numerical_grade() {
    let p = fixture("umeb-candidate-2x3.json");
    let r = json(&run(&["verify", p.to_str().unwrap(), "--kind", "umeb", "--require-exact"]));
    assert_eq!(r["verdict"]["outcome"], "INCONCLUSIVE");
    assert_eq!(r["verdict"]["per_cut"][0]["grade"], "NUMERICAL_EVIDENCE");
    // best min singular value of the complement is sin(pi/8)
    let score = r["verdict"]["per_cut"][0]["score"].as_f64().unwrap();
    assert!((score - (std::f64::consts::PI / 8.0).sin()).abs() < 1e-6, "{score}");
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "prop2a-set", &[]);
    let p = path.to_str().unwrap();
    let args = ["analyze", p, "--completion", "entangled", "--seed", "7", "--starts", "16"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let q = fixture("umeb-candidate-2x3.json");
    let args = ["verify", q.to_str().unwrap(), "--kind", "umeb", "--format", "text"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn prop2a_completion_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "prop2a-set", &[]);
    let p = path.to_str().unwrap();
    let me = json(&run(&["analyze", p, "--completion", "max-entangled"]));
    let c = &me["completion"];
    assert_eq!((c["found"].as_u64(), c["complement_dim"].as_u64()), (Some(1), Some(3)));
    assert_eq!(c["uncompletable_as"], "UCMEB");
    assert_eq!(c["grade"], "EXACT");
    assert_eq!(c["strong_uncompletability"], "OUT_OF_SCOPE");
    let ent = json(&run(&["analyze", p, "--completion", "entangled"]));
    let c = &ent["completion"];
    assert_eq!(c["found"], 3);
    assert_eq!(c["completable"], "YES");
    assert!(c.get("uncompletable_as").is_none());
}

#[test]
fn mixed_ueb_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "eq6-mixed-ueb", &[]);
    let r = json(&run(&["analyze", path.to_str().unwrap()]));
    let labels: Vec<&str> = r["states"].as_array().unwrap().iter().map(|s| s["slocc"]["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["GHZ", "GHZ", "GHZ", "GHZ", "W", "W", "W"]);
    assert_eq!(r["slocc_resource_flag"]["value"], true);
    let flags = r["distinguishability"]["flags"].as_array().unwrap();
    assert_eq!(flags.len(), 3);
    assert!(flags.iter().all(|f| f["indistinguishable"] == true && f["grade"] == "RULE_BASED_CITED"));
}

#[test]
fn umeb_report_cites_resource_discrimination() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "eq3-in-2x3", &[]);
    let out = run(&["verify", path.to_str().unwrap(), "--kind", "umeb"]);
    assert_eq!(code(&out), 0);
    let notes = json(&out)["notes"].clone();
    assert_eq!(notes.as_array().unwrap().len(), 1);
}

#[test]
fn text_format() {
    let out = run(&["verify", fixture("two-bell-states.json").to_str().unwrap(), "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict   UEB REFUTED [EXACT]"), "{text}");
}
