//! End-to-end runs of the `crnreal` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn crnreal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crnreal")).args(args).env_remove("CRN_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_reports_deficiency_one_network() {
    let o = crnreal(&["analyze", path(&fixture("deficiency_one.net"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("δ=1"), "{out}");
    assert!(out.contains("δ_θ=[1,0]"), "{out}");
    assert!(out.contains("l=2") && out.contains("t=2"), "{out}");
    assert!(out.contains("DOT: satisfied"), "{out}");
}

#[test]
fn analyze_json_has_counts_and_partitions() {
    let o = crnreal(&["analyze", "--json", path(&fixture("deficiency_one.net"))]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["deficiency"], 1);
    assert_eq!(v["s"], 4);
    assert_eq!(v["deficiency_one_theorem"], true);
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn analyze_canonical_three_species_network() {
    let o = crnreal(&["analyze", path(&fixture("three_species.ode"))]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("δ=4") && out.contains("DOT: not satisfied"), "{out}");
}

#[test]
fn analyze_rejects_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("empty.net");
    std::fs::write(&file, "").unwrap();
    let o = crnreal(&["analyze", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error"), "{}", stderr(&o));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.net");
    std::fs::write(&file, "X1 -> X2\nX2 => X1\n").unwrap();
    let o = crnreal(&["analyze", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn realize_writes_the_canonical_network() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("net.net");
    let o = crnreal(&["realize", path(&fixture("three_species.ode")), "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("11 complexes, 8 reactions"), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("3 X2 -> X1 + 3 X2 ; k=2"), "{text}");
    let o = crnreal(&["analyze", path(&out)]);
    assert!(stdout(&o).contains("δ=4"));
}

#[test]
fn realize_single_decay() {
    let dir = tempfile::tempdir().unwrap();
    let ode = dir.path().join("decay.ode");
    std::fs::write(&ode, "dx1/dt = -x1\n").unwrap();
    let o = crnreal(&["realize", path(&ode)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("X1 -> 0 ; k=1"), "{}", stdout(&o));
}

#[test]
fn realize_names_inadmissible_monomial() {
    let dir = tempfile::tempdir().unwrap();
    let ode = dir.path().join("bad.ode");
    std::fs::write(&ode, "dx1/dt = -x2\ndx2/dt = x1\n").unwrap();
    let o = crnreal(&["realize", path(&ode)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("x2"), "{}", stderr(&o));
}

#[test]
fn verify_conjugate_pair() {
    let orig = fixture("conjugate_original.net");
    let tgt = fixture("conjugate_target.net");
    let o = crnreal(&["verify", path(&orig), path(&tgt), "--c", "1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("linear conjugacy: certified"));
    let o = crnreal(&["verify", path(&orig), path(&tgt), "--c", "1,1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("rejected"));
    let o = crnreal(&["verify", path(&orig), path(&orig)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_dimension_mismatch_is_an_error() {
    let o = crnreal(&["verify", path(&fixture("conjugate_original.net")), path(&fixture("deficiency_one.net"))]);
    assert_eq!(o.status.code(), Some(1));
    let o = crnreal(&["verify", path(&fixture("conjugate_original.net")), path(&fixture("conjugate_target.net")), "--c", "1,2,3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_flags_fail_before_any_work() {
    let net = fixture("two_species.net");
    for eps in ["0", "1", "-0.5", "abc"] {
        let o = crnreal(&["find", path(&net), "--eps", eps]);
        assert_eq!(o.status.code(), Some(1), "eps {eps}");
    }
    let o = crnreal(&["find", path(&net), "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(1), "usage errors are not infeasibility");
    let o = crnreal(&["find", path(&net), "--solver", "lpfile"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--solution"));
}

#[test]
fn export_lp_has_three_linkage_slots() {
    let o = crnreal(&["export-lp", path(&fixture("two_species.net"))]);
    assert!(o.status.success());
    let lp = stdout(&o);
    assert!(lp.starts_with("\\ mixed-integer program"));
    assert!(lp.contains(" L_3") && !lp.contains(" L_4"));
    assert_eq!(lp, std::fs::read_to_string(fixture("two_species.lp")).unwrap());
}

#[test]
fn seed_comes_from_environment() {
    let net = fixture("two_species.net");
    let base = crnreal(&["export-lp", path(&net)]);
    let seeded = Command::new(env!("CARGO_BIN_EXE_crnreal")).args(["export-lp", path(&net)]).env("CRN_SEED", "5").output().unwrap();
    let flag = crnreal(&["export-lp", path(&net), "--seed", "5"]);
    assert_ne!(stdout(&base), stdout(&seeded));
    assert_eq!(stdout(&seeded), stdout(&flag));
}

#[test]
fn find_dynamical_equivalence_and_reverify() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("out.json");
    let target = dir.path().join("target.net");
    let net = fixture("two_species.net");
    let o = crnreal(&["find", path(&net), "--mode", "dynequiv", "--out", path(&json), "--network-out", path(&target)]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["seed"], 0);
    assert_eq!(v["eps"], "1/10");
    assert_eq!(v["result"]["c"], serde_json::json!(["1", "1"]));
    assert_eq!(v["result"]["verification"]["certified"], true);
    // the found target passes verify when fed back in
    let o = crnreal(&["verify", path(&net), path(&target), "--c", "1,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn import_of_external_solution_certifies() {
    let sol = fixture("three_species_conjugate.highs.sol");
    let ode = fixture("three_species.ode");
    let o = crnreal(&["export-lp", path(&ode), "--import", path(&sol), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["verification"]["certified"], true);
    assert_eq!(v["result"]["verification"]["weakly_reversible"], true);
    let o = crnreal(&["find", path(&ode), "--solver", "lpfile", "--solution", path(&sol)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("certified: yes"));
}

#[test]
fn import_rejects_a_solution_of_another_model() {
    let o = crnreal(&["export-lp", path(&fixture("two_species.net")), "--import", path(&fixture("three_species_conjugate.highs.sol"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn time_limit_exits_with_limit_code() {
    let o = crnreal(&["find", path(&fixture("three_species.ode")), "--arithmetic", "float", "--time-limit", "1", "--json"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "limit");
    assert!(v["result"].is_null());
}

#[test]
fn thread_count_does_not_change_the_answer() {
    let net = fixture("two_species.net");
    let run = |threads: &str| {
        let o = crnreal(&["find", path(&net), "--mode", "dynequiv", "--arithmetic", "float", "--threads", threads, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["stats"]["elapsed_ms"] = serde_json::Value::Null;
        v
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn help_exits_cleanly() {
    let o = crnreal(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("export-lp"));
}
