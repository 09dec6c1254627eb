use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace { dir: tempfile::tempdir().unwrap() };
        ws.file("X3.csv", ",a,b,c\na,0,1,2\nb,1,0,2\nc,2,2,0\n");
        ws.file("Y3.csv", ",y1,y2,y3\ny1,0,2,2\ny2,2,0,2\ny3,2,2,0\n");
        ws.file("bad.csv", ",a,b,c\na,0,1,3\nb,1,0,2\nc,3,2,0\n");
        ws
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_umgh")).current_dir(self.dir.path()).args(args).output().unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn ugh_prints_two() {
    let ws = Workspace::new();
    let o = ws.run(&["ugh", "X3.csv", "Y3.csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2\n");
    assert_eq!(stdout(&ws.run(&["ugh", "X3.csv", "Y3.csv", "--linear"])), "2\n");
}

#[test]
fn dgh_json_has_distance_and_witness() {
    let ws = Workspace::new();
    for method in ["dp", "rec", "brute"] {
        let o = ws.run(&["dgh", "X3.csv", "Y3.csv", "--json", "--method", method]);
        assert!(o.status.success(), "{}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["distance"], "1/2");
        let pairs = v["correspondence"].as_array().unwrap();
        let mut left: Vec<&str> = pairs.iter().map(|p| p[0].as_str().unwrap()).collect();
        let mut right: Vec<&str> = pairs.iter().map(|p| p[1].as_str().unwrap()).collect();
        left.sort();
        left.dedup();
        right.sort();
        right.dedup();
        assert_eq!(left, ["a", "b", "c"]);
        assert_eq!(right, ["y1", "y2", "y3"]);
    }
}

#[test]
fn validation_failures_exit_one() {
    let ws = Workspace::new();
    let o = ws.run(&["validate", "bad.csv", "--kind", "ultrametric"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).trim(), "StrongTriangleViolation a c b");
    let o = ws.run(&["validate", "bad.csv", "--kind", "metric"]);
    assert!(o.status.success());
    ws.file("asym.csv", "0,1\n2,0\n");
    let o = ws.run(&["validate", "asym.csv", "--kind", "metric"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("AsymmetricMatrix"));
}

#[test]
fn usage_errors_exit_two() {
    let ws = Workspace::new();
    let o = ws.run(&["dgh", "X3.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ws.run(&["quotient", "X3.csv", "--t", "1", "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--mode"));
}

#[test]
fn quotient_at_zero_round_trips() {
    let ws = Workspace::new();
    let o = ws.run(&["quotient", "X3.csv", "--t", "0"]);
    assert!(o.status.success());
    ws.file("q.csv", &stdout(&o));
    assert_eq!(stdout(&ws.run(&["ugh", "X3.csv", "q.csv"])), "0\n");
    assert_eq!(stdout(&ws.run(&["dgh", "X3.csv", "q.csv"])).lines().next(), Some("0"));
    let o = ws.run(&["quotient", "X3.csv", "--t", "1"]);
    assert_eq!(stdout(&o), ",a,c\na,0,2\nc,2,0\n");
    let o = ws.run(&["quotient", "X3.csv", "--t", "2", "--mode", "open", "--json"]);
    assert_eq!(stdout(&o).trim(), r#"[["c"],["a","b"]]"#);
}

#[test]
fn numeric_output_modes() {
    let ws = Workspace::new();
    assert_eq!(stdout(&ws.run(&["spectrum", "X3.csv"])), "0 1 2\n");
    assert_eq!(stdout(&ws.run(&["spectrum", "X3.csv", "--json"])).trim(), r#"["0","1","2"]"#);
    assert_eq!(stdout(&ws.run(&["dghp", "X3.csv", "Y3.csv", "--p", "2", "--decimal", "4"])), "1.2247\n");
    assert_eq!(stdout(&ws.run(&["dghp", "X3.csv", "Y3.csv", "--p", "inf"])), "2\n");
    assert_eq!(stdout(&ws.run(&["dghp", "X3.csv", "Y3.csv", "--p", "2", "--method", "brute"])), "(3/2)^(1/2)\n");
    assert_eq!(stdout(&ws.run(&["ultrametricity", "bad.csv", "--decimal", "2"])), "0.50\n");
    let o = ws.run(&["dghp", "X3.csv", "Y3.csv", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("NonIntegerExponent"));
}

#[test]
fn metric_commands() {
    let ws = Workspace::new();
    let o = ws.run(&["slink", "bad.csv"]);
    assert_eq!(stdout(&o), ",a,b,c\na,0,1,2\nb,1,0,2\nc,2,2,0\n");
    let o = ws.run(&["approx-dgh", "bad.csv", "X3.csv", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["value"].as_str(), v["additive_bound"].as_str()), (Some("0"), Some("1")));
}

#[test]
fn gamma_and_fgc() {
    let ws = Workspace::new();
    assert_eq!(stdout(&ws.run(&["gamma", "Y3.csv", "--eps", "0"])), "3\n");
    let o = ws.run(&["gamma", "Y3.csv", "--eps", "0", "--fgc", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gamma"], 3);
    assert_eq!(v["fgc"]["holds"], true);
}

#[test]
fn json_tree_inputs_and_treegrams() {
    let ws = Workspace::new();
    ws.file(
        "x3.json",
        r#"{"representative":"a","diameter":"2","children":[
            {"representative":"a","diameter":"1","children":[
                {"representative":"a","diameter":"0"},{"representative":"b","diameter":"0"}]},
            {"representative":"c","diameter":"0"}]}"#,
    );
    assert_eq!(stdout(&ws.run(&["ugh", "x3.json", "X3.csv"])), "0\n");
    ws.file(
        "t.json",
        r#"{"representative":"a","diameter":"2","children":[
            {"representative":"a","diameter":"0","birth":"1"},{"representative":"b","diameter":"0"}]}"#,
    );
    ws.file("two.csv", "0,2\n2,0\n");
    let o = ws.run(&["ugh", "t.json", "two.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "1\n");
    assert_eq!(stdout(&ws.run(&["spectrum", "t.json"])), "0 1 2\n");
    let o = ws.run(&["dgh", "t.json", "two.csv"]);
    assert_eq!(o.status.code(), Some(1));
    ws.file("diss.csv", "1,2\n2,0\n");
    assert_eq!(stdout(&ws.run(&["ugh", "diss.csv", "two.csv"])), "1\n");
    assert!(ws.run(&["validate", "diss.csv", "--kind", "ultra-dissimilarity"]).status.success());
}

#[test]
fn budget_from_environment() {
    let ws = Workspace::new();
    let flat: String = (0..6)
        .map(|i| (0..6).map(|j| if i == j { "0" } else { "4" }).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    let pairs: String = (0..6)
        .map(|i| {
            (0..6)
                .map(|j| if i == j { "0" } else if i / 2 == j / 2 { "3" } else { "4" })
                .collect::<Vec<_>>()
                .join(",")
                + "\n"
        })
        .collect();
    ws.file("flat.csv", &flat);
    ws.file("pairs.csv", &pairs);
    let o = Command::new(env!("CARGO_BIN_EXE_umgh"))
        .current_dir(ws.dir.path())
        .args(["dgh", "flat.csv", "pairs.csv", "--method", "rec"])
        .env("UMGH_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("SurjectionBudgetExceeded"), "{}", stderr(&o));
    let o = ws.run(&["dgh", "flat.csv", "pairs.csv", "--threads", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("1/2"));
}
