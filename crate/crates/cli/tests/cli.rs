use dirac_moire_cli::config::{self, ExperimentConfig};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dirac-moire"));
    c.env_remove("DIRAC_MOIRE_THREADS");
    c
}

fn run(dir: &Path, sub: &str, cfg: &str, extra: &[&str]) -> Output {
    let path = dir.join(format!("{sub}.toml"));
    std::fs::write(&path, cfg).unwrap();
    bin()
        .arg(sub)
        .arg("--config")
        .arg(&path)
        .args(extra)
        .output()
        .unwrap()
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap()
}

fn stderr_record(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("error record on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    for bad in ["[model\nomega = 1", "[model]\nomegga = 1.0\n", "[edge]\nbogus = 1\n", "[valley]\nkx = 64\n", "seed = -1\n", "[junction.geom]\neps_r = 3.0\n"] {
        let out = tmp.path().join("out");
        let o = run(tmp.path(), "scatter1d", bad, &["--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{bad:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stderr_record(&o)["status"], "config_error");
        assert!(!out.exists(), "partial artifacts for {bad:?}");
    }
    let out = tmp.path().join("out2");
    let o = run(tmp.path(), "scatter1d", "", &["--out", out.to_str().unwrap(), "--override", "scatter.a"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn mismatched_experiment_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), "scatter1d", "experiment = \"gapscan\"\n", &["--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_give_identical_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("scatter1d", "[scatter]\nk = [0.8, 1.3]\n"),
        ("gapscan", "seed = 7\n"),
        ("bandstructure", "[model]\nomega = 0.7\n"),
        ("edge_spectrum", "[edge]\npoints = 9\n[edge.strip]\nky = 16\nly = 40.0\n"),
    ];
    for (sub, cfg) in cases {
        let mut csvs = vec![];
        for (i, threads) in ["1", "2", "1"].iter().enumerate() {
            let out = tmp.path().join(format!("{sub}-{i}"));
            let o = run(tmp.path(), sub, cfg, &["--out", out.to_str().unwrap(), "--threads", threads]);
            assert_eq!(o.status.code(), Some(0), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
            let mut files: Vec<_> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| e.unwrap().path())
                .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "dmar"))
                .collect();
            files.sort();
            assert!(!files.is_empty());
            csvs.push(files.iter().map(|p| std::fs::read(p).unwrap()).collect::<Vec<_>>());
        }
        assert_eq!(csvs[0], csvs[1], "{sub}: thread count changed the output");
        assert_eq!(csvs[0], csvs[2], "{sub}: rerun changed the output");
    }
}

#[test]
fn manifest_echo_reparses_to_the_same_config() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "[scatter]\nv0 = 0.3\nk = [0.7]\nx0 = [-1.5, 0.1, 1.5]\n";
    let out = tmp.path().join("o");
    let o = run(tmp.path(), "scatter1d", text, &["--out", out.to_str().unwrap(), "--override", "seed=11"]);
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&out);
    let echo: ExperimentConfig = serde_json::from_value(m["config"].clone()).unwrap();
    let mut want = config::parse(text, &["seed=11".into()]).unwrap();
    want.experiment = echo.experiment;
    assert_eq!(echo, want);
    assert_eq!(m["experiment"], "scatter1d");
    assert!(m["artifacts"].as_array().unwrap().iter().any(|a| a["name"] == "scatter.csv"));
    let csv = std::fs::read_to_string(out.join("scatter.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x0,k,re_r,im_r,abs_t_sq,sigma_plus,sigma_minus,v_at_split");
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn invariant_manifest_reports_minus_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = "[model]\nomega = 1.0\nlambda = 0.2\neta = 1\n[invariant]\nn = 200\n";
    let o = run(tmp.path(), "invariant", cfg, &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["results"]["nearest_int"], -2);
    assert_eq!(m["status"], "ok");
}

#[test]
fn junction_table_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = run(tmp.path(), "junction_table", "[table]\nmax_n = 8\n", &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("table.csv")).unwrap();
    let rows: Vec<Vec<&str>> = table.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["x0", "N=8", "N=16", "N=32", "N=64"]);
    assert_eq!(rows.len(), 4);
    for (r, x0) in rows[1..].iter().zip(["37.5", "50", "62.5"]) {
        assert_eq!(r.len(), 5);
        assert_eq!(r[0], x0);
        assert!(r[1].parse::<f64>().unwrap().is_finite());
        assert!(r[2..].iter().all(|c| c.is_empty()));
    }
    assert_eq!(manifest(&out)["results"]["skipped_n"], serde_json::json!([16, 32, 64]));
}

#[test]
fn tolerance_failure_exits_1_and_keeps_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = run(tmp.path(), "gapscan", "[gapscan]\ntol = 0.0\nn = 50\n", &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_record(&o)["status"], "tolerance_failure");
    assert_eq!(manifest(&out)["status"], "tolerance_failure");
    assert!(out.join("gapscan.csv").exists());
}

#[test]
fn solver_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = "[conductivity]\nn = 8\nx0 = [50.0]\n[junction_run.solver]\ndense_limit = 0\nmax_iter = 1\n";
    let o = run(tmp.path(), "conductivity", cfg, &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stderr_record(&o)["status"], "solver_failure");
    assert!(!out.exists());
}

#[test]
fn thread_count_from_env_and_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("c.toml");
    std::fs::write(&cfg_path, "").unwrap();
    let go = |env: Option<&str>, flag: Option<&str>, name: &str| {
        let out = tmp.path().join(name);
        let mut c = bin();
        c.arg("bandstructure").arg("--config").arg(&cfg_path).arg("--out").arg(&out);
        if let Some(e) = env {
            c.env("DIRAC_MOIRE_THREADS", e);
        }
        if let Some(f) = flag {
            c.args(["--threads", f]);
        }
        (c.output().unwrap(), out)
    };
    let (o, out) = go(Some("3"), None, "a");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(&out)["threads"], 3);
    let (o, out) = go(Some("3"), Some("1"), "b");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(&out)["threads"], 1);
    let (o, _) = go(Some("many"), None, "c");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn suite_names_the_failing_criterion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = run(
        tmp.path(),
        "reproduce",
        "[suite]\nquick = true\ninvariant_n = 120\nonly = [3, 4, 7]\n",
        &["--out", out.to_str().unwrap()],
    );
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("criterion  4: PASS"), "{stdout}");
    assert!(stdout.contains("criterion  7: PASS"), "{stdout}");
    // the second gluing target is inconsistent with W = −2, see README
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_record(&o)["message"].as_str().unwrap().contains("criterion 3"));
    let csv = std::fs::read_to_string(out.join("criteria.csv")).unwrap();
    assert!(csv.starts_with("criterion,status,check,value,bound,pass\n"));

    let out2 = tmp.path().join("o2");
    let o = run(tmp.path(), "reproduce", "[suite]\nonly = [4, 7, 10]\n", &["--out", out2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let again = tmp.path().join("o3");
    run(tmp.path(), "reproduce", "[suite]\nonly = [4, 7, 10]\n", &["--out", again.to_str().unwrap()]);
    assert_eq!(
        std::fs::read(out2.join("criteria.csv")).unwrap(),
        std::fs::read(again.join("criteria.csv")).unwrap()
    );
}
