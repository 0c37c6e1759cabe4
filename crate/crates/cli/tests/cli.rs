use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_repairshop");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).args(args).current_dir(dir).env_remove("REPAIRSHOP_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen_instance(dir: &Path) {
    let o = run(dir, &["gen", "--aircraft", "10", "--trades", "3", "--waves", "3", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn three_solvers_agree_in_order() {
    let dir = tempfile::tempdir().unwrap();
    gen_instance(dir.path());
    let objective = |solver: &str| {
        let o = run(dir.path(), &["solve", "--solver", solver, "instance.json", "--out", &format!("{solver}.json")]);
        assert_eq!(code(&o), 0);
        let line = stdout(&o).lines().find(|l| l.starts_with("objective: ")).unwrap().to_string();
        line["objective: ".len()..].parse::<u32>().unwrap()
    };
    let (lbbd, oracle, heuristic) = (objective("lbbd"), objective("oracle"), objective("dispatch"));
    assert_eq!(lbbd, oracle);
    assert!(heuristic <= lbbd);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("lbbd.json")).unwrap()).unwrap();
    assert_eq!(doc["version"], "repairshop-solution/1");
    assert_eq!(doc["status"], "optimal");
    assert!(doc["ops"].as_array().is_some_and(|ops| !ops.is_empty()));
    assert!(dir.path().join("lbbd.provenance.json").exists());
}

#[test]
fn timeout_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gen", "--aircraft", "30", "--trades", "4", "--waves", "4", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let o = run(dir.path(), &["solve", "--solver", "lbbd", "--budget", "0.000000001", "instance.json"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stdout(&o).contains("status: timeout"));
}

#[test]
fn invalid_input_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    gen_instance(dir.path());
    let text = std::fs::read_to_string(dir.path().join("instance.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["trades"][0]["capacity"] = 0.into();
    std::fs::write(dir.path().join("bad.json"), doc.to_string()).unwrap();
    let o = run(dir.path(), &["solve", "bad.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("capacity"));

    assert_eq!(code(&run(dir.path(), &["solve", "missing.json"])), 2);
    assert_eq!(code(&run(dir.path(), &["gen", "--aircraft", "0"])), 2);
    assert_eq!(code(&run(dir.path(), &["sim", "instance.json", "--policies", "P13"])), 2);
    assert_eq!(code(&run(dir.path(), &["nonsense"])), 2);
}

#[test]
fn config_file_applies_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "aircraft = 12\nseed = 9\nmode = \"static\"\ntrades = 2\n").unwrap();
    let o = run(dir.path(), &["--config", "run.toml", "gen", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let prov: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("instance.provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["config"]["aircraft"], 12);
    assert_eq!(prov["config"]["trades"], 2);
    assert_eq!(prov["seed"], 4);

    std::fs::write(dir.path().join("bad.toml"), "[gen]\naircraft = 3\n").unwrap();
    assert_eq!(code(&run(dir.path(), &["--config", "bad.toml", "gen"])), 2);
}

#[test]
fn seed_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let with_env = |seed: &str, out: &str| {
        Command::new(BIN)
            .args(["gen", "--mode", "dynamic", "--aircraft", "10", "--out", out])
            .current_dir(dir.path())
            .env("REPAIRSHOP_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(code(&with_env("21", "a.json")), 0);
    assert_eq!(code(&run(dir.path(), &["gen", "--mode", "dynamic", "--aircraft", "10", "--seed", "21", "--out", "b.json"])), 0);
    let read = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(code(&with_env("abc", "c.json")), 2);
}

#[test]
fn sim_writes_long_format_traces() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gen", "--mode", "dynamic", "--aircraft", "10", "--seed", "2", "--out", "s/x.json"]);
    assert_eq!(code(&o), 0);
    let o = run(dir.path(), &["sim", "s", "--reps", "2", "--policies", "P31", "--schedulers", "dispatch", "--budget", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("# schema: repairshop-trace/1"));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next(), Some("instanceId,replication,policy,scheduler,wave,nu,O_w,epochRho,decisionTimeMs"));
    assert_eq!(lines.count(), 2 * 30);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let header = summary.lines().nth(2).unwrap();
    assert!(header.starts_with("scheduler,policy,runs,failures,wave,O_28,variance,rho,cdf_0.1"));
    assert!(header.contains("cdf_1.0"));
}

#[test]
fn bench_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gen", "--aircraft", "8", "--count", "2", "--out", "suite", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    std::fs::write(dir.path().join("suite/broken.json"), "{").unwrap();
    let o = run(dir.path(), &["bench", "suite", "--summarize"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let bench = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    // Two instances and one unreadable file, three solvers each.
    assert_eq!(bench.lines().filter(|l| !l.starts_with('#')).count(), 1 + 9);
    assert_eq!(bench.lines().filter(|l| l.contains(",error,")).count(), 3);
    let summary = std::fs::read_to_string(dir.path().join("bench.summary.csv")).unwrap();
    assert!(summary.lines().any(|l| l.starts_with("lbbd-tight,3,2,0,1,")));
}
