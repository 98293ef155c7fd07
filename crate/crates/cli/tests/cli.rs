use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const NAND_NOR: &str = "\
# NAND on o1, NOR on o2
cell a
cell b
input a b
gate nandnor a b o1 o2 delta=0.1 d=0.05
";

fn fluxlogic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxlogic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn sat_single_clause() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.cnf", "p cnf 3 1\n1 2 3 0\n");
    let o = fluxlogic(&["sat", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("s SATISFIABLE"));

    let o = fluxlogic(&["--json", "sat", f.to_str().unwrap()]);
    let v = json(&o);
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["status"], "SAT");
    let lits: Vec<i64> = v["assignment"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_i64().unwrap())
        .collect();
    assert!(lits.iter().any(|&l| l > 0));
}

#[test]
fn sat_unsat_and_unknown_exit_codes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "u.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let path = f.to_str().unwrap();
    let o = fluxlogic(&["--json", "sat", path]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["status"], "UNSAT");
    assert_eq!(json(&o)["violated_clauses"], 1);

    let o = fluxlogic(&["--json", "sat", path, "--anneal", "--sweeps", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["status"], "UNKNOWN");
}

#[test]
fn truth_table_nand_nor() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "nn.net", NAND_NOR);
    for model in ["mismatch", "quadratic"] {
        let o = fluxlogic(&[
            "--json",
            "--model",
            model,
            "truth-table",
            f.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let v = json(&o);
        assert_eq!(v["command"], "truth-table");
        assert_eq!(v["model"], model);
        let rows: Vec<(String, String)> = v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                let join = |k: &str| {
                    r[k].as_array()
                        .unwrap()
                        .iter()
                        .map(|x| x.as_str().unwrap())
                        .collect::<String>()
                };
                (join("inputs"), join("outputs"))
            })
            .collect();
        let want = [("00", "11"), ("01", "10"), ("10", "10"), ("11", "00")];
        let want: Vec<(String, String)> = want
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(rows, want, "{model}");
    }
}

#[test]
fn check_gate_pass_and_fail() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "nn.net", NAND_NOR);
    let path = f.to_str().unwrap();
    let o = fluxlogic(&["check-gate", path, "--expect", "nand,nor"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));

    let o = fluxlogic(&["check-gate", path, "--expect", "and,nor"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));

    let o = fluxlogic(&["check-gate", path, "--expect", "nand"]);
    assert_eq!(o.status.code(), Some(2));

    let o = fluxlogic(&["check-gate", path, "--expect", "nand", "--outputs", "o1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn flags_win_over_file_params() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.net", &format!("param model=quadratic\n{NAND_NOR}"));
    let o = fluxlogic(&["--json", "solve", f.to_str().unwrap()]);
    assert_eq!(json(&o)["model"], "quadratic");
    let o = fluxlogic(&[
        "--json",
        "--model",
        "mismatch",
        "solve",
        f.to_str().unwrap(),
    ]);
    assert_eq!(json(&o)["model"], "mismatch");
    assert_eq!(json(&o)["degeneracy"], 4);

    // Out of the window through a flag: gate lines without overrides fail.
    let g = write(&dir, "g.net", "cell a\ncell b\ngate nandnor a b x y\n");
    let o = fluxlogic(&["--delta", "0.01", "solve", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_over_limit_gives_guidance() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("cell c0\n");
    for i in 1..30 {
        text.push_str(&format!("cell c{i}\ncouple c{} c{i} 0.1\n", i - 1));
    }
    let f = write(&dir, "chain.net", &text);
    let path = f.to_str().unwrap();
    let o = fluxlogic(&["solve", path]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(
        err.contains("--anneal") && err.contains("--max-exact"),
        "{err}"
    );

    let o = fluxlogic(&["--json", "solve", path, "--anneal", "--sweeps", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["method"], "anneal");
    assert_eq!(v["certified"], false);
}

#[test]
fn parse_errors_exit_2_with_line() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.net", "cell a\n\ncouple a a 0.1\n");
    let o = fluxlogic(&["--json", "solve", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["line"], 3);
    assert!(v["error"].as_str().unwrap().contains("self-coupling"));

    let d = write(&dir, "bad.cnf", "c x\np cnf 2 1\n1 5 0\n");
    let o = fluxlogic(&["sat", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 3"));

    let o = fluxlogic(&["solve", "/nonexistent/file.net"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_ising_structure() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "two.net", "cell a bias=0.1\ncell b\ncouple a b 0.1\n");
    let o = fluxlogic(&["--json", "export-ising", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["spins"], serde_json::json!(["a", "b"]));
    let j = &v["j"][0];
    assert_eq!((j["a"].as_str(), j["b"].as_str()), (Some("a"), Some("b")));
    assert!((j["value"].as_f64().unwrap() - 0.05).abs() < 1e-12);
    // h_a = phi0 b_a / 2L; the cross term 2 b_b w / 2L vanishes with b_b = 0.
    let h: Vec<f64> = v["h"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["spin"] == "a")
        .map(|e| e["value"].as_f64().unwrap())
        .collect();
    assert!((h[0] - 0.05).abs() < 1e-12);
}

#[test]
fn anneal_json_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "nn.net", NAND_NOR);
    let path = f.to_str().unwrap();
    let run = |workers: &str| {
        let o = fluxlogic(&[
            "--json",
            "anneal",
            path,
            "--seed",
            "7",
            "--sweeps",
            "300",
            "--workers",
            workers,
        ]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let first = run("1");
    assert_eq!(first, run("1"));
    assert_eq!(first, run("4"));
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["schedule"]["seed"], 7);
}

#[test]
fn text_outputs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "nn.net", NAND_NOR);
    let o = fluxlogic(&["solve", f.to_str().unwrap()]);
    let s = stdout(&o);
    assert!(s.contains("degeneracy: 4"), "{s}");
    let o = fluxlogic(&["export-ising", f.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("constant "));
}
