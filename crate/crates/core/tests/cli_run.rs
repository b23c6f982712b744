use std::fs;
use std::path::Path;
use std::process::Command;

fn conjlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conjlab"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path
}

const CESARO_COS: &str = r#"
[settings]
grid_size = 512

[[experiments]]
id = "cesaro-cos"
function = "cos:nu=1"
matrix = "cesaro"
model = "power:alpha=1"
theorem = "T1"
n_values = [8, 16, 32, 64, 128, 256, 512]
[experiments.assert]
slope = [-1.02, -0.98]
"#;

#[test]
fn empty_config_exits_zero_with_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "");
    let out = conjlab()
        .arg("run")
        .arg(&config)
        .env("CONJLAB_OUTPUT_DIR", dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1);
}

#[test]
fn cesaro_cosine_slope_and_ratio_column() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CESARO_COS);
    let out = conjlab()
        .arg("run")
        .arg(&config)
        .env("CONJLAB_OUTPUT_DIR", dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let mut summary = csv::Reader::from_path(dir.path().join("out/summary.csv")).unwrap();
    let row = summary.records().next().unwrap().unwrap();
    assert_eq!(&row[0], "cesaro-cos");
    let slope: f64 = row[1].parse().unwrap();
    assert!((slope + 1.0).abs() < 1e-6);

    let mut rows = csv::Reader::from_path(dir.path().join("out/cesaro-cos.csv")).unwrap();
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["n", "deviation", "bound_value", "ratio", "epsilon_used"]
    );
    let mut count = 0;
    for rec in rows.records() {
        let rec = rec.unwrap();
        let n: f64 = rec[0].parse().unwrap();
        let dev: f64 = rec[1].parse().unwrap();
        let bound: f64 = rec[2].parse().unwrap();
        let ratio: f64 = rec[3].parse().unwrap();
        assert_eq!(ratio, dev / bound);
        assert!((dev - 1.0 / (n + 1.0)).abs() < 1e-12);
        assert_eq!(&rec[4], "");
        count += 1;
    }
    assert_eq!(count, 7);

    let dat = fs::read_to_string(dir.path().join("out/cesaro-cos.dat")).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 7);
}

#[test]
fn output_dir_defaults_to_config_location() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &CESARO_COS.replace("grid_size = 512", "grid_size = 512\noutput_dir = \"results\""));
    let out = conjlab().arg("run").arg(&config).env_remove("CONJLAB_OUTPUT_DIR").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("results/cesaro-cos.csv").exists());
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &CESARO_COS.replace("slope = [-1.02, -0.98]", "slope = [-0.5, 0.0]"));
    let out = conjlab()
        .arg("run")
        .arg(&config)
        .env("CONJLAB_OUTPUT_DIR", dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    // results are still written
    assert!(dir.path().join("out/cesaro-cos.csv").exists());
}

#[test]
fn unknown_matrix_is_a_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{CESARO_COS}\n[[experiments]]\nid = \"bad\"\nfunction = \"cos:nu=1\"\nmatrix = \"hausdorff:q=2\"\nmodel = \"power:alpha=1\"\ntheorem = \"T1\"\n"
    );
    let config = write_config(dir.path(), &body);
    let out = conjlab()
        .arg("run")
        .arg(&config)
        .env("CONJLAB_OUTPUT_DIR", dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("hausdorff") && stdout.contains("'bad'"), "{stdout}");
    // the valid experiment still ran
    assert!(dir.path().join("out/cesaro-cos.csv").exists());
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[[experiments]\nid = ");
    let out = conjlab().arg("run").arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = conjlab().arg("run").arg(dir.path().join("missing.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CESARO_COS);
    for sub in ["a", "b"] {
        let status = conjlab()
            .arg("run")
            .arg(&config)
            .env("CONJLAB_OUTPUT_DIR", dir.path().join(sub))
            .output()
            .unwrap()
            .status;
        assert!(status.success());
    }
    for file in ["cesaro-cos.csv", "summary.csv", "cesaro-cos.dat"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(file)).unwrap(),
            fs::read(dir.path().join("b").join(file)).unwrap()
        );
    }
}

#[test]
fn check_verb() {
    let out = conjlab().args(["check", "cesaro", "--r", "2", "--n-max", "256"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.contains(" ok ")).count(), 3, "{text}");

    let out = conjlab().args(["check", "identity", "--n-max", "256"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.starts_with("first-moment ok")));
    assert!(text.lines().any(|l| l.starts_with("difference-tail VIOLATED")));

    let out = conjlab().args(["check", "euler:q=1", "--n-max", "1024"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("lower triangular: true"));
    assert!(text.lines().any(|l| l.starts_with("window-mass ok")));
    assert!(text.lines().any(|l| l.starts_with("first-moment ok")));

    let out = conjlab().args(["check", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
