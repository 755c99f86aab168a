use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use biext_core::json::{OrePolyJson, SubspaceJson};
use biext_core::{make_field, metric_from_skew, Caps, OrePoly};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_biext-witt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad stdout ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("biext-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const WORKED: &str = r#"{"p":3,"m":1,"terms":[{"e":-1,"c":[2]},{"e":1,"c":[1]}]}"#;

#[test]
fn example_passes_for_small_primes() {
    for p in ["2", "3", "5"] {
        let out = run(&["example", "--p", p]);
        assert_eq!(out.status.code(), Some(0), "p = {p}");
        let v = json_of(&out);
        assert_eq!(v["schema"], "biext-witt/1");
        assert_eq!(v["status"], "pass");
        assert_eq!(v["witt_class"], "NormForm");
        let p: u64 = p.parse().unwrap();
        assert_eq!(v["kernel_size"], p * p);
        assert_eq!(v["gauss_sum"]["coeffs"][0], -(p as i64));
    }
}

#[test]
fn parity_campaigns() {
    let out = run(&["verify-theorem1", "--p", "3", "--n", "3", "--trials", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["summary"]["passed"], 50);
    let records = v["records"].as_array().unwrap();
    assert!(records.iter().all(|r| r["witt_class"] == "NormForm"));
    let trials: Vec<u64> = records.iter().map(|r| r["trial"].as_u64().unwrap()).collect();
    assert_eq!(trials, (0..50).collect::<Vec<_>>());

    let out = run(&["verify-theorem1", "--p", "3", "--d", "2", "--n", "1", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 20);
    assert!(records.iter().all(|r| r["witt_class"] == "Zero"));
    assert!(records.iter().any(|r| r["kind"] == "hyperbolic"));
}

#[test]
fn gauss_campaign_values() {
    let out = run(&["verify-gauss", "--p", "5", "--n", "2", "--trials", "12"]);
    assert_eq!(out.status.code(), Some(0));
    for r in json_of(&out)["records"].as_array().unwrap() {
        let log = r["log_p_size"].as_u64().unwrap() as u32;
        assert_eq!(r["gauss_sum"]["coeffs"][0], -(5i64.pow(log / 2)));
    }
    let out = run(&["verify-gauss", "--p", "2", "--d", "2", "--n", "1", "--trials", "8"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["verify-theorem1", "--p", "2", "--n", "3", "--trials", "16", "--seed", "77"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["config"]["seed"], 77);
    assert_eq!(v["records"][3]["seed"], 80);
}

#[test]
fn table_output() {
    let out = run(&["verify-gauss", "--trials", "3", "--table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3 trials: 3 passed, 0 failed, 0 capped"));
    assert!(run(&["example", "--json", "--table"]).status.code() == Some(2));
}

#[test]
fn kernel_of_worked_example() {
    let out = run_stdin(&["kernel", "-"], WORKED);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["kernel_size"], 9);
    assert_eq!(v["field"]["N"], 2);
    assert_eq!(v["basis"].as_array().unwrap().len(), 2);

    let out = run_stdin(&["model", "-"], WORKED);
    let v = json_of(&out);
    let q = v["q"].as_array().unwrap();
    assert_eq!(q.len(), 9);
    assert_eq!(q[0], serde_json::json!([[0, 0], 0, 1]));
    assert_eq!(v["witt_class"], "NormForm");
}

#[test]
fn witt_and_gauss_of_emitted_groups() {
    let nf = run(&["norm-form", "--p", "3"]);
    let nf = String::from_utf8(nf.stdout).unwrap();
    let v = json_of(&run_stdin(&["witt", "-"], &nf));
    assert_eq!(v["witt_class"], "NormForm");
    let v = json_of(&run_stdin(&["gauss", "-"], &nf));
    assert_eq!(v["integer"], -3);

    let h = String::from_utf8(run(&["hyperbolic", "--p", "5"]).stdout).unwrap();
    assert_eq!(json_of(&run_stdin(&["witt", "-"], &h))["witt_class"], "Zero");
    assert_eq!(json_of(&run_stdin(&["gauss", "-"], &h))["integer"], 5);
}

#[test]
fn descend_empty_subspace_echoes() {
    let f = temp_file("f.json", WORKED);
    let l = temp_file("l.json", r#"{"p":3,"N":2,"basis":[]}"#);
    let out = run(&["descend", f.to_str().unwrap(), l.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let echoed: Value = serde_json::from_str(WORKED).unwrap();
    assert_eq!(json_of(&out)["f"], echoed);
}

#[test]
fn descend_by_isotropic_line() {
    let k = make_field(3, 1).unwrap();
    let f = OrePoly::random_skew(&k, 2, 9);
    let model = metric_from_skew(&f, &Caps::default()).unwrap();
    let a = (1..model.size()).find(|&a| model.q_fp(a) == 0).unwrap();
    let l = SubspaceJson::from_elems(model.field(), &[model.points()[a][0].clone()]);
    let f_path = temp_file("g.json", &serde_json::to_string(&OrePolyJson::from_poly(&f)).unwrap());
    let l_path = temp_file("line.json", &serde_json::to_string(&l).unwrap());
    let out = run(&["descend", f_path.to_str().unwrap(), l_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let down = json_of(&out)["f"].to_string();
    let v = json_of(&run_stdin(&["model", "-"], &down));
    assert_eq!(v["kernel_size"], 9);
    assert_eq!(v["witt_class"], "NormForm");

    // A non-isotropic line is refused.
    let b = (1..model.size()).find(|&b| model.q_fp(b) != 0).unwrap();
    let l = SubspaceJson::from_elems(model.field(), &[model.points()[b][0].clone()]);
    let l_path = temp_file("bad.json", &serde_json::to_string(&l).unwrap());
    let out = run(&["descend", f_path.to_str().unwrap(), l_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pullback_grows_kernel() {
    let f = temp_file("pf.json", WORKED);
    let phi = temp_file("phi.json", r#"{"p":3,"m":1,"terms":[{"e":0,"c":[1]},{"e":1,"c":[1]}]}"#);
    let out = run(&["pullback", f.to_str().unwrap(), phi.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let pulled = json_of(&out)["f"].to_string();
    let v = json_of(&run_stdin(&["model", "-"], &pulled));
    assert_eq!(v["kernel_size"], 81);
    assert_eq!(v["witt_class"], "NormForm");
}

#[test]
fn exit_codes() {
    assert_eq!(run_stdin(&["witt", "-"], "{bad").status.code(), Some(2));
    assert_eq!(run(&["example", "--p", "4"]).status.code(), Some(2));
    assert_eq!(run(&["verify-gauss", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    // Not skew: f = tau.
    let tau = r#"{"p":3,"m":1,"terms":[{"e":1,"c":[1]}]}"#;
    assert_eq!(run_stdin(&["model", "-"], tau).status.code(), Some(2));
    // Budgets.
    let out = run(&["verify-theorem1", "--trials", "2", "--enum-cap", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["summary"]["capped"], 2);
    assert_eq!(run_stdin(&["kernel", "--max-ext", "1", "-"], WORKED).status.code(), Some(3));
}
