use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use retri_experiments::config::{parse_config, Overrides};
use retri_experiments::runner::{read_rows, run_single, run_sweep};

fn retri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retri")).args(args).output().expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const GRID: &str = r#"
algorithm = "retri"
n = 81
message_bytes = ["1KB", "8KB", "64KB", "512KB", "1MB", "4MB", "8MB", "64MB", "256MB"]
delta_seconds = ["1us", "10us", "100us", "1ms", "10ms", "50ms"]

[baseline]
algorithm = "direct"
n = 64
"#;

#[test]
fn default_grid_sweep_is_deterministic_with_54_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "grid.toml");
    fs::write(&cfg, GRID).unwrap();
    let a = path(dir.path(), "a.csv");
    let b = path(dir.path(), "b.csv");
    for out in [&a, &b] {
        assert!(retri(&["sweep", "--config", &cfg, "--out", out]).status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(fs::read(path(dir.path(), "a.baseline.csv")).unwrap(), fs::read(path(dir.path(), "b.baseline.csv")).unwrap());

    let rows = read_rows(&text).unwrap();
    assert_eq!(rows.len(), 54);
    assert!(text.starts_with("# algorithm = retri\n"));
    assert!(text.contains("# alpha_s = 1.7us"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "algorithm,n,m_bytes,R,alpha_s,alpha_h,beta,delta,per_phase,hop,transmission,reconfig,total,speedup_vs_baseline"
    );
    // m outer, delta inner
    assert_eq!((rows[0].m_bytes, rows[0].delta), (1024, 1e-6));
    assert_eq!((rows[1].m_bytes, rows[1].delta), (1024, 1e-5));
    assert_eq!(rows[6].m_bytes, 8192);
}

#[test]
fn speedup_against_itself_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "self.csv");
    let status = retri(&["sweep", "--algo", "bruck", "--n", "64", "--baseline", "bruck:64", "--out", &out]).status;
    assert!(status.success());
    let heat = path(dir.path(), "heat.csv");
    let status = retri(&["heatmap", "--sweep", &out, "--baseline", &path(dir.path(), "self.baseline.csv"), "--out", &heat]).status;
    assert!(status.success());
    let matrix = fs::read_to_string(&heat).unwrap();
    let cells: Vec<&str> = matrix.lines().skip(1).flat_map(|l| l.split(',').skip(1)).collect();
    assert_eq!(cells.len(), 54);
    assert!(cells.iter().all(|&c| c == "1.00"), "{matrix}");
    assert!(Path::new(&path(dir.path(), "heat.reconfigs.csv")).exists());
    assert!(fs::read_to_string(path(dir.path(), "heat.txt")).unwrap().contains("1.00"));
}

#[test]
fn zero_delay_column_dominates() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "s.csv");
    let status = retri(&["sweep", "--delta", "0,1us,1ms,50ms", "--baseline", "direct:64", "--out", &out]).status;
    assert!(status.success());
    let heat = retri(&["heatmap", "--sweep", &out, "--baseline", &path(dir.path(), "s.baseline.csv")]);
    assert!(heat.status.success());
    let text = String::from_utf8(heat.stdout).unwrap();
    for line in text.lines().skip(1).take(9) {
        let v: Vec<f64> = line.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        assert!(v.iter().all(|&x| v[0] >= x), "{line}");
    }
}

#[test]
fn single_cell_sweep_matches_run() {
    let cfg = Overrides {
        message_bytes: Some(vec!["1KB".into()]),
        deltas: Some(vec!["1us".into()]),
        baseline: Some("direct:64".into()),
        ..Default::default()
    }
    .apply(parse_config("").unwrap())
    .unwrap();
    let single = run_single(&cfg).unwrap();
    let sweep = run_sweep(&cfg).unwrap();
    assert_eq!(sweep.rows(), vec![single.row()]);
    assert_eq!(single.delivered(), Some(true));
    assert!(single.simulation.unwrap().crosscheck.unwrap() < 1e-9);
}

#[test]
fn normalization_divides_by_node_count() {
    let mut cfg = parse_config("n = 243\nmessage_bytes = [\"256MB\"]\ndelta_seconds = [\"50ms\"]\n").unwrap();
    let raw = run_sweep(&cfg).unwrap().rows()[0].total;
    cfg.normalize_per_node = true;
    let per_node = run_sweep(&cfg).unwrap().rows()[0].total;
    assert!((raw / 243.0 - per_node).abs() <= 1e-15 * raw);
}

#[test]
fn run_reports_padding_and_writes_exports() {
    let dir = tempfile::tempdir().unwrap();
    let (trace, schedule, topo) = (path(dir.path(), "t.tsv"), path(dir.path(), "s.txt"), path(dir.path(), "topo.txt"));
    let out = retri(&["run", "--n", "10", "--msg-bytes", "1000", "--trace", &trace, "--schedule", &schedule, "--topology", &topo]);
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("padded                yes (10 -> 27 nodes)"), "{report}");
    assert!(report.contains("delivery              ok"));
    assert_eq!(fs::read_to_string(&trace).unwrap().lines().count(), 1 + 3);
    assert!(fs::read_to_string(&schedule).unwrap().starts_with("#retri-schedule v1"));
    assert_eq!(fs::read_to_string(&topo).unwrap().matches("# phase").count(), 3);

    let direct = String::from_utf8(retri(&["run", "--algo", "direct", "--n", "64"]).stdout).unwrap();
    assert!(direct.contains("phases                1\n"));
    assert!(direct.contains("R                     0\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bad.toml");
    fs::write(&cfg, "n = 81\nalgorithm = \"ring\"\n").unwrap();
    let out = retri(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("`algorithm`"), "{err}");

    assert_eq!(retri(&["sweep", "--reconfigs", "9"]).status.code(), Some(2));
    assert_eq!(retri(&["run", "--baseline", "bruck"]).status.code(), Some(2));

    let ok = retri(&["verify", "--n", "27", "--msg-bytes", "27,2700", "--delta", "1us,1ms"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("PASS  delivery") && text.contains("0 failed"), "{text}");

    // the invariant suite cannot run past the simulation limit
    assert_eq!(retri(&["verify", "--n", "2187"]).status.code(), Some(3));
}
