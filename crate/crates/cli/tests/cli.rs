use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn schottky(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schottky"))
        .env("SCHOTTKY_CACHE_DIR", cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Records with the wall-time field removed; it is the last key of each line.
fn without_wall_time(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| match l.find(",\"wall_time_s\":") {
            Some(i) => l[..i].to_string(),
            None => l.to_string(),
        })
        .collect()
}

fn cache_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    v.sort();
    v
}

#[test]
fn missing_group_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = schottky(dir.path(), &["--group", "/no/such/group.json", "classes"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--group"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_arguments_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("thin2.json");
    let g = g.to_str().unwrap();
    let bad_rect = schottky(dir.path(), &["--group", g, "zeta-zeros", "--rect", "0,-1,0,1"]);
    assert_eq!(bad_rect.status.code(), Some(2));
    assert!(stderr(&bad_rect).contains("--rect"));
    let outside = schottky(dir.path(), &["--group", g, "zeta-eval", "--lambda", "-0.45"]);
    assert_eq!(outside.status.code(), Some(2));
    assert!(stderr(&outside).contains("--lambda"), "{}", stderr(&outside));
}

#[test]
fn cylinder_product_matches_direct_product() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("cylinder.json");
    let o = schottky(dir.path(), &["--group", g.to_str().unwrap(), "zeta-eval", "--lambda", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    let value = rec["outputs"][0]["value"].as_f64().unwrap();
    let exact: f64 = (0..40).map(|k| (1.0 - (-2.0 * (1.0 + k as f64)).exp()).powi(2)).product();
    assert!((value - exact).abs() <= 1e-9 * exact, "{value} vs {exact}");
    assert_eq!(rec["schema"], "schottky.result/1");
}

#[test]
fn second_classes_run_hits_the_cache_with_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("thin2.json");
    let args = ["--group", g.to_str().unwrap(), "classes", "--n-max", "6", "--list"];
    let first = schottky(dir.path(), &args);
    assert_eq!(first.status.code(), Some(0));
    assert!(stderr(&first).contains("cache miss"));
    let files = cache_files(dir.path());
    assert_eq!(files.len(), 1);
    let bytes = fs::read(&files[0]).unwrap();

    let second = schottky(dir.path(), &args);
    assert!(stderr(&second).contains("cache hit"), "{}", stderr(&second));
    assert_eq!(fs::read(&files[0]).unwrap(), bytes);
    assert_eq!(without_wall_time(&stdout(&first)), without_wall_time(&stdout(&second)));
}

#[test]
fn changed_n_max_uses_a_distinct_key() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("thin2.json");
    for n in ["5", "6"] {
        let o = schottky(dir.path(), &["--group", g.to_str().unwrap(), "classes", "--n-max", n]);
        assert!(stderr(&o).contains("cache miss"));
    }
    assert_eq!(cache_files(dir.path()).len(), 2);
}

#[test]
fn truncated_cache_file_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("thin2.json");
    let args = ["--group", g.to_str().unwrap(), "classes", "--n-max", "7", "--list"];
    let fresh = schottky(dir.path(), &args);
    let path = cache_files(dir.path()).remove(0);
    let original = fs::read(&path).unwrap();
    fs::write(&path, &original[..original.len() * 2 / 3]).unwrap();

    let again = schottky(dir.path(), &args);
    assert_eq!(again.status.code(), Some(0));
    assert!(stderr(&again).contains("cache corrupt"), "{}", stderr(&again));
    assert_eq!(without_wall_time(&stdout(&fresh)), without_wall_time(&stdout(&again)));
    assert_eq!(fs::read(&path).unwrap(), original);
}

#[test]
fn invalid_group_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("overlap.json");
    fs::write(
        &path,
        r#"{"rank": 2, "template": {"kind": "symmetric", "rank": 2, "spacing": "2.0", "radius": "1.5"}}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = schottky(dir.path(), &["--group", p, "group-validate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"passed\":false"));
    let o = schottky(dir.path(), &["--group", p, "verify-all", "--quick"]);
    assert_eq!(o.status.code(), Some(1));
    let o = schottky(dir.path(), &["--group", p, "delta"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("thin2.json");
    let o = schottky(
        dir.path(),
        &["--group", g.to_str().unwrap(), "delta", "--n-max", "8", "--tol", "1e-15"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"passed\":false"));
}

#[test]
fn csv_output_appends_under_one_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let g = fixture("thin2.json");
    for n in ["4", "5"] {
        let o = schottky(
            dir.path(),
            &[
                "--group",
                g.to_str().unwrap(),
                "--format",
                "csv",
                "--output",
                out.to_str().unwrap(),
                "classes",
                "--n-max",
                n,
            ],
        );
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read_to_string(out).unwrap();
    let headers = text.lines().filter(|l| l.starts_with("schema,")).count();
    assert_eq!(headers, 1);
    assert_eq!(
        text.lines().next().unwrap(),
        "schema,group_hash,command,name,value,imag,error,tolerance,passed,wall_time_s"
    );
}

#[test]
fn records_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let thin2 = fixture("thin2.json");
    let cylinder = fixture("cylinder.json");
    let runs: [(&Path, &[&str]); 4] = [
        (&thin2, &["delta"]),
        (&thin2, &["zeta-eval", "--lambda", "-0.2+0.3i,0.1", "--method", "determinant"]),
        (&thin2, &["trace-compare", "--t", "2", "--n-max", "10"]),
        (&cylinder, &["trace-compare", "--t", "1", "--tol", "1e-6"]),
    ];
    for (group, args) in runs {
        let outputs: Vec<Vec<String>> = ["1", "4"]
            .iter()
            .map(|threads| {
                let mut full = vec!["--group", group.to_str().unwrap(), "--threads", threads];
                full.extend_from_slice(args);
                let o = schottky(dir.path(), &full);
                assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
                without_wall_time(&stdout(&o))
            })
            .collect();
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}
