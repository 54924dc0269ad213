use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use callout_cli::output::RankingsFile;
use callout_cli::RunManifest;
use tempfile::TempDir;

fn callout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_callout"))
        .args(args)
        .env_remove("CALLOUT_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn single_row_detect() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "one.csv", "1.5,2.5\n");
    let out = callout(&["detect", &input]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let file: RankingsFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(file.n, 1);
    assert_eq!(file.rankings.overall, vec![0]);
    assert_eq!(file.rankings.local, vec![0]);
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let asym = write(&dir, "m.csv", "0,1,2\n1,0,3\n2,3.5,0\n");
    assert_eq!(code(&callout(&["detect", "--distance-matrix", &asym])), 2);
    let ragged = write(&dir, "r.csv", "1,2\n3\n");
    assert_eq!(code(&callout(&["detect", &ragged])), 2);
    assert_eq!(code(&callout(&["detect", &path(&dir, "missing.csv")])), 2);
    let ok = write(&dir, "ok.csv", "1,2\n3,4\n5,6\n");
    assert_eq!(code(&callout(&["detect", &ok, "--capacity", "2"])), 2);
}

#[test]
fn detect_writes_csv_and_manifest() {
    let dir = TempDir::new().unwrap();
    let rows: String = (0..60).map(|i| format!("{},{}\n", i % 7, (i * 3) % 11)).collect();
    let input = write(&dir, "x.csv", &rows);
    let out_path = path(&dir, "ranks.csv");
    let out = callout(&["detect", &input, "--format", "csv", "--verify", "--capacity", "5", "-o", &out_path]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let file = RankingsFile::read(Path::new(&out_path)).unwrap();
    assert_eq!(file.n, 60);
    let manifest = RunManifest::read(&RunManifest::path_for(Path::new(&out_path))).unwrap();
    assert_eq!(manifest.command, "detect");
    assert_eq!(manifest.config.capacity, Some(5));
    assert!(manifest.distance_calls > 0);
}

#[test]
fn generate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    for p in [&a, &b] {
        assert_eq!(code(&callout(&["generate", "synthetic", "--seed", "4", "-o", p])), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let manifest = RunManifest::read(&RunManifest::path_for(Path::new(&a))).unwrap();
    let generator = manifest.generator.unwrap();
    assert_eq!(generator.seed, 4);
    assert_eq!(generator.counts.global, 30);
}

#[test]
fn realistic_generation() {
    let dir = TempDir::new().unwrap();
    let base = path(&dir, "base.csv");
    assert_eq!(code(&callout(&["generate", "synthetic", "--seed", "1", "-o", &base])), 0);
    let cfg = write(&dir, "cfg.json", r#"{"k_max": 3, "n_global": 5, "n_local": 5, "n_collective": 10}"#);
    let out = path(&dir, "real.csv");
    let run = callout(&["generate", "realistic", "--input", &base, "--config", &cfg, "-o", &out]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let manifest = RunManifest::read(&RunManifest::path_for(Path::new(&out))).unwrap();
    assert_eq!(manifest.generator.unwrap().counts.collective, 10);

    let tight = write(&dir, "tight.json", r#"{"k_max": 3, "candidate_pool": 10}"#);
    let run = callout(&["generate", "realistic", "--input", &base, "--config", &tight, "-o", &out]);
    assert_eq!(code(&run), 4);
    assert!(String::from_utf8_lossy(&run.stderr).contains("candidate_pool"));

    let unknown = write(&dir, "bad.json", r#"{"k_maximum": 3}"#);
    let run = callout(&["generate", "realistic", "--input", &base, "--config", &unknown, "-o", &out]);
    assert_eq!(code(&run), 2);
}

#[test]
fn evaluate_round_trip() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "d.csv");
    assert_eq!(code(&callout(&["generate", "synthetic", "--seed", "2", "-o", &data])), 0);
    let ranks = path(&dir, "r.json");
    assert_eq!(code(&callout(&["detect", &data, "-o", &ranks])), 0);
    let report = path(&dir, "report.json");
    let out = callout(&["evaluate", "--rankings", &ranks, "--labels", &data, "-o", &report]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    for key in ["overall", "global", "local", "collective"] {
        let auc = json[key]["aucroc"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&auc));
    }
}

#[test]
fn evaluate_perfect_fixture_and_mismatch() {
    let dir = TempDir::new().unwrap();
    let ranks = write(
        &dir,
        "r.csv",
        "id,overall,global,local,collective,s_o,s_g,s_c,d_nn\n\
         0,2,2,2,2,0,0,0,0\n\
         1,0,0,1,1,5,5,4,1\n\
         2,1,1,0,0,4,4,5,1\n",
    );
    let labels = write(&dir, "l.csv", "x,label\n0,inlier\n9,global\n5,collective\n");
    let out = callout(&["evaluate", "--rankings", &ranks, "--labels", &labels]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["overall"]["aucroc"].as_f64(), Some(1.0));
    assert_eq!(json["global"]["aucroc"].as_f64(), Some(1.0));
    assert_eq!(json["collective"]["aucpr"].as_f64(), Some(1.0));
    assert!(json["local"]["error"].is_string());

    let short = write(&dir, "s.csv", "inlier\nglobal\n");
    assert_eq!(code(&callout(&["evaluate", "--rankings", &ranks, "--labels", &short])), 2);
}
