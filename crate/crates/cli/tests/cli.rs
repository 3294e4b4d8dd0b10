use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn ncrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncrank"))
        .args(args)
        .env_remove("NCRANK_SEED")
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON record per line"))
        .collect()
}

fn single(out: &Output) -> Value {
    let mut lines = json_lines(out);
    assert_eq!(lines.len(), 1);
    lines.remove(0)
}

#[test]
fn wedge_ratio_example() {
    let out = ncrank(&["--json", "--seed", "1", "wedge", "ratio", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = single(&out);
    assert_eq!(r["result"]["crk"], 6);
    assert_eq!(r["result"]["ncrk"], 10);
    assert_eq!(r["result"]["ratio"], "5/3");
    assert_eq!(r["passed"], true);
}

#[test]
fn explicit_tensor_certificate() {
    let out = ncrank(&["--json", "brank", "explicit", "--p", "2", "--certify"]);
    assert_eq!(out.status.code(), Some(0));
    let r = single(&out);
    assert!(r["result"]["certificate"]["lower_bound"].as_u64().unwrap() >= 7);
}

#[test]
fn skew3_blowup_two() {
    let f = data("skew3.json");
    let out = ncrank(&[
        "--json", "--seed", "9", "rank", "pencil", &f, "--mode", "blowup=2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = single(&out)["result"].clone();
    assert_eq!(r["d"], 2);
    assert_eq!(r["observed_rank"], 6);
    assert_eq!(r["divisible_by_d"], true);
}

#[test]
fn records_carry_config_and_input_hash() {
    let f = data("skew3.json");
    let r = single(&ncrank(&[
        "--json", "--seed", "4", "--trials", "3", "rank", "pencil", &f, "--mode", "crk",
    ]));
    assert_eq!(r["tool"], "ncrank");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["config"]["seed"], 4);
    assert_eq!(r["config"]["trials"], 3);
    assert_eq!(r["config"]["output"], "json");
    assert!(r["config"]["modulus"].as_u64().unwrap() > 1 << 40);
    assert!(r["input_hash"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn reruns_are_byte_identical() {
    let f = data("skew3.json");
    let runs: [&[&str]; 3] = [
        &[
            "--json",
            "--seed",
            "11",
            "rank",
            "pencil",
            &f,
            "--mode",
            "profile=3x3",
        ],
        &[
            "--seed",
            "11",
            "audit",
            "regularity",
            "--random",
            "rows=3",
            "cols=3",
            "vars=2",
            "count=3",
        ],
        &[
            "--json",
            "--seed",
            "11",
            "ncf",
            "eval",
            "--expr",
            "inv(x*y - y*x) + 1/2",
            "--dim",
            "3",
        ],
    ];
    for args in runs {
        let a = ncrank(args);
        let b = ncrank(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn env_seed_is_used() {
    let f = data("skew3.json");
    let out = Command::new(env!("CARGO_BIN_EXE_ncrank"))
        .args(["--json", "rank", "pencil", &f, "--mode", "ncrk"])
        .env("NCRANK_SEED", "21")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = single(&out);
    assert_eq!(r["config"]["seed"], 21);
    assert_eq!(r["result"]["ncrk"], 3);
}

#[test]
fn usage_errors_exit_two() {
    let f = data("skew3.json");
    let cases: [&[&str]; 6] = [
        &["rank", "pencil", &f, "--mode", "crk"],
        &[
            "--seed",
            "1",
            "--modulus",
            "101",
            "rank",
            "pencil",
            &f,
            "--mode",
            "crk",
        ],
        &[
            "--seed",
            "1",
            "--modulus",
            "1099511627777",
            "rank",
            "pencil",
            &f,
            "--mode",
            "crk",
        ],
        &[
            "--seed",
            "1",
            "rank",
            "pencil",
            "/nonexistent.json",
            "--mode",
            "crk",
        ],
        &["--seed", "1", "ncf", "eval", "--expr", "x + ", "--dim", "2"],
        &["--seed", "1", "audit", "ratio", "--random", "rows=2"],
    ];
    for args in cases {
        let out = ncrank(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains("error:"),
            "{args:?}"
        );
    }
    let out = ncrank(&["rank", "pencil", &f, "--mode", "rank"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_checks_exit_one_with_hint() {
    let out = ncrank(&["--seed", "1", "--trials", "2", "ncf", "bergman", "--dim", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undersampling"));
}

#[test]
fn audit_batch_prints_one_record_per_pencil() {
    let out = ncrank(&[
        "--json", "--seed", "2", "audit", "ratio", "--random", "rows=4", "cols=4", "vars=3", "count=5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 5);
    for (i, r) in lines.iter().enumerate() {
        assert_eq!(r["result"]["index"], i);
        assert_eq!(r["passed"], true);
    }
}

#[test]
fn emitted_files_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let w = w.to_str().unwrap();
    assert_eq!(
        ncrank(&["wedge", "build", "--p", "1", "--n", "3", "--emit", w])
            .status
            .code(),
        Some(0)
    );
    let r = single(&ncrank(&[
        "--json", "--seed", "3", "rank", "pencil", w, "--mode", "ncrk",
    ]));
    assert_eq!(r["result"]["ncrk"], 3);

    let t = dir.path().join("t.json");
    let t = t.to_str().unwrap();
    assert_eq!(
        ncrank(&["brank", "explicit", "--p", "1", "--emit", t])
            .status
            .code(),
        Some(0)
    );
    let exact = single(&ncrank(&[
        "--json", "brank", "certify", "--tensor", t, "--p", "1", "--exact",
    ]));
    let modular = single(&ncrank(&[
        "--json", "brank", "certify", "--tensor", t, "--p", "1",
    ]));
    assert!(exact["result"]["lower_bound"].as_u64().unwrap() >= 3);
    assert_eq!(exact["result"]["lower_bound"], modular["result"]["lower_bound"]);
}

#[test]
fn linearize_manifest_lists_every_gate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = ncrank(&[
        "--json",
        "ncf",
        "linearize",
        "--expr",
        "inv(x*y - 1) + y",
        "--emit-pencils",
        d,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let gates = manifest["gates"].as_array().unwrap();
    assert_eq!(
        gates.len(),
        single(&out)["result"]["gates"].as_u64().unwrap() as usize
    );
    for (i, g) in gates.iter().enumerate() {
        assert_eq!(g["gate_id"], i);
        let text = std::fs::read_to_string(dir.path().join(g["file"].as_str().unwrap())).unwrap();
        let p: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(p["rows"], g["size"]);
        assert_eq!(p["num_vars"], 2);
    }
    // The root pencil is invertible at a generic point.
    let root = dir.path().join(gates[0]["file"].as_str().unwrap());
    let r = single(&ncrank(&[
        "--json",
        "--seed",
        "5",
        "rank",
        "pencil",
        root.to_str().unwrap(),
        "--mode",
        "crk",
    ]));
    assert_eq!(r["result"]["crk"], gates[0]["size"]);
}

#[test]
fn eval_reads_expression_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.txt");
    std::fs::write(&p, "inv(x - x)\n").unwrap();
    let at = format!("@{}", p.display());
    let r = single(&ncrank(&[
        "--json", "--seed", "1", "ncf", "eval", "--expr", &at, "--dim", "2",
    ]));
    assert_eq!(r["result"]["outcome"], "undefined");
    assert_eq!(r["result"]["gate"], 0);
}
