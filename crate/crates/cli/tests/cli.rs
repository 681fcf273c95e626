//! Subcommand plumbing: files produced, formats, manifests and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cli() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_cauchy-prior-cli"))
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(cli())
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("cfg.toml");
    fs::write(&path, text).unwrap();
    path
}

fn files_with(dir: &Path, suffix: &str) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(suffix))
        .collect();
    names.sort();
    names
}

fn manifest(dir: &Path) -> toml::Table {
    fs::read_to_string(dir.join("manifest.toml"))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn prior_realizations_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "seed = 4\n[realizations]\nalphas = [1.0, 2.0]\nwalk_points = 1000\nfamilies = [\"cauchy\"]\n\
         sweeps = 300\n",
    );
    let out = tmp.path().join("a");
    assert!(
        run(&["prior-realizations", "--config", cfg.to_str().unwrap()], &out)
            .status
            .success()
    );

    for alpha in ["1", "2"] {
        let text = fs::read_to_string(out.join(format!("walk_alpha{alpha}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,value"));
        assert_eq!(lines.count(), 1000);
    }
    assert_eq!(files_with(&out, ".pgm"), vec!["realization_cauchy.pgm"]);
    let pgm = fs::read_to_string(out.join("realization_cauchy.pgm")).unwrap();
    let header: Vec<&str> = pgm
        .lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(str::split_whitespace)
        .take(4)
        .collect();
    assert_eq!(header, ["P2", "64", "64", "255"]);

    // same seed, same bytes
    let again = tmp.path().join("b");
    assert!(
        run(&["prior-realizations", "--config", cfg.to_str().unwrap()], &again)
            .status
            .success()
    );
    for name in files_with(&out, "") {
        assert_eq!(
            fs::read(out.join(&name)).unwrap(),
            fs::read(again.join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn deconvolution_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "seed = 5\n[deconvolution]\nsweeps = 2000\nnoise_level = 0.02\n",
    );
    let out = tmp.path().join("d");
    assert!(run(&["deconvolve", "--config", cfg.to_str().unwrap()], &out)
        .status
        .success());
    assert_eq!(
        files_with(&out, "_cm.csv"),
        [
            "deconv_n131_cm.csv",
            "deconv_n261_cm.csv",
            "deconv_n521_cm.csv",
            "deconv_n66_cm.csv"
        ]
    );
    let table = fs::read_to_string(out.join("deconv_comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 6);
    let m = manifest(&out);
    assert_eq!(m["deconvolution"]["noise_level"].as_float(), Some(0.02));
    assert_eq!(m["run"]["command"].as_str(), Some("deconvolve"));
    assert_eq!(m["seed"].as_integer(), Some(5));
    assert!(!fs::read_to_string(out.join("manifest.toml"))
        .unwrap()
        .contains(out.to_str().unwrap()));
}

#[test]
fn tomography_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "seed = 6\n[tomography]\nsize = 24\nsweeps = 200\n");
    let out = tmp.path().join("t");
    assert!(run(&["tomo", "--config", cfg.to_str().unwrap()], &out)
        .status
        .success());
    assert_eq!(
        files_with(&out, ".pgm"),
        [
            "tomo_cm_cauchy.pgm",
            "tomo_cm_gaussian.pgm",
            "tomo_cm_tv.pgm",
            "tomo_fbp.pgm",
            "tomo_map_cauchy.pgm",
            "tomo_truth.pgm"
        ]
    );
    let rmse = fs::read_to_string(out.join("rmse.csv")).unwrap();
    let lines: Vec<&str> = rmse.lines().collect();
    assert_eq!(lines[0], "method,rmse,runtime_s");
    let methods: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(
        methods,
        ["fbp", "map_cauchy", "cm_cauchy", "cm_tv", "cm_gaussian"]
    );
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));

    let m = manifest(&out);
    let t = &m["tomography"];
    assert_eq!(t["source_radius"].as_float(), Some(4.0));
    assert_eq!(t["detector_radius"].as_float(), Some(2.0));
    assert_eq!(t["detector_width"].as_float(), Some(3.0));

    let cross = fs::read_to_string(out.join("tomo_cross_row.csv")).unwrap();
    assert_eq!(cross.lines().count(), 25);
    assert!(cross.starts_with("x,truth,fbp,"));
}

#[test]
fn single_estimator_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "seed = 7\n[tomography]\nsize = 16\n");
    for (command, expected) in [("fbp-only", "tomo_fbp.pgm"), ("map-only", "tomo_map_cauchy.pgm")] {
        let out = tmp.path().join(command);
        assert!(run(&[command, "--config", cfg.to_str().unwrap()], &out)
            .status
            .success());
        assert_eq!(files_with(&out, ".pgm"), [expected, "tomo_truth.pgm"]);
        assert_eq!(
            fs::read_to_string(out.join("rmse.csv")).unwrap().lines().count(),
            2
        );
    }
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "seed = 1\n[realizations]\nfamilies = []\n");
    let out = tmp.path().join("s");
    let args = [
        "prior-realizations",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "42",
    ];
    assert!(run(&args, &out).status.success());
    assert_eq!(manifest(&out)["seed"].as_integer(), Some(42));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    // no seed anywhere
    assert_eq!(run(&["tomo"], &out).status.code(), Some(2));
    let missing = tmp.path().join("missing.toml");
    assert_eq!(
        run(&["tomo", "--config", missing.to_str().unwrap()], &out)
            .status
            .code(),
        Some(2)
    );
    let cfg = config(tmp.path(), "seed = 1\n[tomography]\nsource_radius = 0.5\n");
    let result = run(&["tomo", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("config error"));
    let cfg = config(tmp.path(), "[tomography]\nsize = 8\n");
    assert_eq!(
        run(&["tomo", "--config", cfg.to_str().unwrap()], &out)
            .status
            .code(),
        Some(2)
    );
}
