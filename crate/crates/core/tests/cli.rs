use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mdomain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdomain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn construct(dir: &TempDir, name: &str, args: &[&str]) -> std::path::PathBuf {
    let out = dir.path().join(name);
    let mut full = vec!["construct"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path_str(&out)]);
    let o = mdomain(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn construct_then_analyze_m3() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m3.json");
    let o = mdomain(&["construct", "m3-example", "-o", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("kappa=3"));

    let o = mdomain(&["analyze", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("kappa=3"), "{text}");
    assert!(text.contains("k=1 M1⊕M1⊕M1 (dim 3)"), "{text}");

    let o = mdomain(&["--json", "analyze", path_str(&out), "--powers", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kappa"], 3);
    let dims: Vec<u64> = v["md_chain"].as_array().unwrap().iter().map(|m| m["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![3, 2, 1]);
    assert_eq!(v["powers"].as_array().unwrap().len(), 4);
    assert_eq!(v["powers"][3]["dim"], 1);
    assert_eq!(v["envelope"]["tool"], "mdomain");
}

#[test]
fn digest_ignores_formatting_and_full_adds_bases() {
    let dir = TempDir::new().unwrap();
    let a = construct(&dir, "etb.json", &["etb", "--dim", "4", "--index", "3"]);
    let pretty: Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    let b = dir.path().join("etb-pretty.json");
    fs::write(&b, serde_json::to_string_pretty(&pretty).unwrap()).unwrap();

    let digest = |p: &Path| {
        let o = mdomain(&["--json", "analyze", path_str(p)]);
        assert_eq!(o.status.code(), Some(0));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["kappa"], 3);
        v["envelope"]["input_digest"].as_str().unwrap().to_owned()
    };
    let da = digest(&a);
    assert_eq!(da.len(), 64);
    assert_eq!(da, digest(&b));

    let o = mdomain(&["--json", "analyze", path_str(&a), "--full"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let first = &v["bases"]["md_chain"][0];
    assert_eq!(first["dim"], 4);
    assert_eq!(first["basis"].as_array().unwrap().len(), 4);
}

#[test]
fn tensor_and_convex_compose_files() {
    let dir = TempDir::new().unwrap();
    let a = construct(&dir, "a.json", &["etb", "--dim", "3", "--index", "2"]);
    let b = construct(&dir, "b.json", &["dephasing-shift", "--dim", "2"]);
    let ab = dir.path().join("ab.json");
    let o = mdomain(&["tensor", path_str(&a), path_str(&b), "-o", path_str(&ab)]);
    assert_eq!(o.status.code(), Some(0));
    let o = mdomain(&["--json", "analyze", path_str(&ab)]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 6);
    assert_eq!(v["kappa"], 2);

    construct(&dir, "omega.json", &["omega-pair"]);
    let spec = dir.path().join("mix.json");
    fs::write(
        &spec,
        r#"{"terms": [{"weight": 0.5, "channel": "omega-1.json"}, {"weight": 0.5, "channel": "omega-2.json"}]}"#,
    )
    .unwrap();
    let mix = dir.path().join("mixed.json");
    let o = mdomain(&["convex", path_str(&spec), "-o", path_str(&mix)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = mdomain(&["--json", "analyze", path_str(&mix)]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kappa"], 2);
    assert_eq!(v["md_chain"][0]["dim"], 3);
}

#[test]
fn lattice_and_verify() {
    let o = mdomain(&["lattice", "--dim", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph"));

    let o = mdomain(&["lattice", "--dim", "4", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 11);
    assert_eq!(v["longest_chain"], 7);
    assert_eq!(v["longest_chain_types"][0], "M4");

    let o = mdomain(&["verify", "md-splitting", "--seeds", "2", "--dims", "2x2,2x3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("4 passed, 0 failed"), "{}", stdout(&o));

    let o = mdomain(&["--json", "verify", "kappa-tensor", "--seeds", "1", "--dims", "2x2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failed"], 0);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // Usage: unknown subcommand, missing file, missing required flag, bad JSON.
    assert_eq!(mdomain(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mdomain(&["analyze", "/nonexistent/channel.json"]).status.code(), Some(2));
    let out = dir.path().join("x.json");
    assert_eq!(mdomain(&["construct", "etb", "--dim", "4", "-o", path_str(&out)]).status.code(), Some(2));
    assert_eq!(
        mdomain(&["construct", "etb", "--dim", "4", "--index", "9", "-o", path_str(&out)]).status.code(),
        Some(2)
    );
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    assert_eq!(mdomain(&["analyze", path_str(&garbage)]).status.code(), Some(2));

    // Invalid channel: not trace preserving, and a ragged Kraus operator.
    let not_tp = dir.path().join("not-tp.json");
    fs::write(&not_tp, r#"{"dim": 2, "label": "p", "kraus": [[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#).unwrap();
    assert_eq!(mdomain(&["analyze", path_str(&not_tp)]).status.code(), Some(3));
    let ragged = dir.path().join("ragged.json");
    fs::write(&ragged, r#"{"dim": 2, "label": "r", "kraus": [[[[1,0]],[[0,0],[1,0]]]]}"#).unwrap();
    assert_eq!(mdomain(&["analyze", path_str(&ragged)]).status.code(), Some(3));

    // Trace preserving but not unital: amplitude damping.
    let damp = dir.path().join("damp.json");
    let g: f64 = 0.3;
    fs::write(
        &damp,
        format!(
            r#"{{"dim": 2, "label": "damp", "kraus": [[[[1,0],[0,0]],[[0,0],[{},0]]], [[[0,0],[{},0]],[[0,0],[0,0]]]]}}"#,
            (1.0 - g).sqrt(),
            g.sqrt()
        ),
    )
    .unwrap();
    assert_eq!(mdomain(&["analyze", path_str(&damp)]).status.code(), Some(4));
}
