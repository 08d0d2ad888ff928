//! End-to-end runs of the `depth-forge` binary.

use depth_forge::circuit::reference;
use depth_forge::io::{circuit_to_json, instance_from_json, schedule_from_json, Instance};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_depth-forge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn circuit(&self, name: &str, c: &depth_forge::VerifierCircuit) -> PathBuf {
        let path = self.path(name);
        std::fs::write(&path, circuit_to_json(c).unwrap()).unwrap();
        path
    }

    /// The reference VQA instance: empty core on two proof bits, g = 1, g′ = 2, |D| = 4.
    fn reference_vqa(&self) -> PathBuf {
        let c = self.circuit("empty.json", &reference::empty(2, 1));
        let out = self.path("vqa.json");
        let o = run(&["compile-vqa", "--circuit", p(&c), "--g", "1", "--gp", "2", "--delta", "0.5", "--d-size", "4", "-o", p(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    }
}

#[test]
fn ratio_of_the_reference_instance() {
    let f = Fixture::new();
    let inst = f.reference_vqa();
    let o = run(&["ratio", "--instance", p(&inst)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("m: 12\n") && text.contains("m': 19\n"), "{text}");
    assert!(text.contains("m'/m: 19/12"), "{text}");
    assert!(text.contains("N: "));
    assert!(text.contains("plan: infeasible"), "{text}");
}

#[test]
fn compiled_file_matches_the_library() {
    let f = Fixture::new();
    let inst = f.reference_vqa();
    let Instance::Vqa(v) = instance_from_json(&std::fs::read_to_string(inst).unwrap()).unwrap() else { panic!("kind") };
    assert_eq!(v, depth_forge::fixtures::vqa_reference());
}

#[test]
fn empty_schedule_leaves_the_observable_at_one() {
    let f = Fixture::new();
    let inst = f.reference_vqa();
    let sched = f.path("empty-schedule.json");
    std::fs::write(&sched, "[]").unwrap();
    let csv_path = f.path("traj.csv");
    for engine in ["logical", "dense", "closed"] {
        let o = run(&["simulate", "--instance", p(&inst), "--schedule", p(&sched), "--engine", engine, "--emit-trajectory", p(&csv_path)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("final expectation: 1.0000000000000000e0"), "{}", stdout(&o));
        let csv = std::fs::read_to_string(&csv_path).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,expectation,span-residual"));
        assert_eq!(lines.count(), 1);
    }
}

#[test]
fn span_suite_passes_on_the_reference_instance() {
    let f = Fixture::new();
    let inst = f.reference_vqa();
    let o = run(&["--seed", "7", "check-lemmas", "--instance", p(&inst), "--suite", "span", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["report"]["trials"], 20);
}

#[test]
fn hw_and_fewer_suites_pass() {
    let f = Fixture::new();
    let inst = f.reference_vqa();
    for suite in ["hw", "fewerL"] {
        let o = run(&["check-lemmas", "--instance", p(&inst), "--suite", suite, "--trials", "10", "--max-len", "15"]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
    }
    // rounding needs a QAOA instance
    let o = run(&["check-lemmas", "--instance", p(&inst), "--suite", "rounding"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn prove_a_yes_witness() {
    let f = Fixture::new();
    let c = f.circuit("y1.json", &reference::y1_acceptor(2));
    let inst = f.path("yes.json");
    let o = run(&["compile-vqa", "--circuit", p(&c), "--g", "1", "--gp", "2", "--delta", "0.5", "--d-size", "4", "-o", p(&inst)]);
    assert!(o.status.success());
    let sched = f.path("plan.json");
    let o = run(&["prove", "--instance", p(&inst), "--witness", "10", "--engine", "dense", "--emit-schedule", p(&sched)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("verdict: YES"), "{text}");
    let plan = schedule_from_json(&std::fs::read_to_string(&sched).unwrap()).unwrap();
    assert!(text.contains(&format!("schedule length: {}", plan.len())));
    // a rejected witness is a check failure, not an input error
    let o = run(&["prove", "--instance", p(&inst), "--witness", "01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verdict: NOT-YES"));
}

#[test]
fn qaoa_compile_and_rounding_suite() {
    let f = Fixture::new();
    let c = f.circuit("y1.json", &reference::y1_acceptor(1));
    let inst = f.path("qaoa.json");
    let o = run(&["compile-qaoa", "--circuit", p(&c), "--g", "1", "--gp", "1", "--delta", "0.5", "--d-size", "4", "--amplify", "1", "-o", p(&inst)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let Instance::Qaoa(q) = instance_from_json(&std::fs::read_to_string(&inst).unwrap()).unwrap() else { panic!("kind") };
    assert!(q.epsilon_q.sqrt() <= 1.0 / (48.0 * q.m_prime as f64));
    let o = run(&["check-lemmas", "--instance", p(&inst), "--suite", "rounding", "--trials", "3", "--max-len", "4"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["report"]["trials"], 3);
    assert_eq!(o.status.code(), Some(if report["passed"] == true { 0 } else { 1 }));
    let o = run(&["ratio", "--instance", p(&inst)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn input_errors_exit_with_two() {
    let f = Fixture::new();
    let missing = f.path("missing.json");
    assert_eq!(run(&["ratio", "--instance", p(&missing)]).status.code(), Some(2));
    let bad = f.path("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["ratio", "--instance", p(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let inst = f.reference_vqa();
    assert_eq!(run(&["prove", "--instance", p(&inst), "--witness", "1"]).status.code(), Some(2));
    let c = f.circuit("c.json", &reference::empty(2, 1));
    let out = f.path("o.json");
    let o = run(&["compile-vqa", "--circuit", p(&c), "--g", "3", "--gp", "2", "--delta", "0.5", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
}
