use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn system(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../systems")
        .join(name)
}

fn run(args: &[&str]) -> (i32, Value, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_saddleloop"))
        .args(args)
        .output()
        .unwrap();
    let parse = |b: &[u8]| {
        let s = String::from_utf8_lossy(b);
        if s.trim().is_empty() {
            Value::Null
        } else {
            serde_json::from_str(&s).unwrap()
        }
    };
    (
        out.status.code().unwrap(),
        parse(&out.stdout),
        parse(&out.stderr),
    )
}

#[test]
fn bounds_of_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let sys = system("canonical_ydx.json");
    let (code, v, _) = run(&[
        sys.to_str().unwrap(),
        "--command",
        "bounds",
        "--nu",
        "1,1,1,1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["bound_two_saddle"], 4);
    let file: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(file["bound_two_saddle"], 4);
}

#[test]
fn zero_form_gives_zero_csv_and_warning() {
    let dir = tempfile::tempdir().unwrap();
    let sys = system("canonical_zero.json");
    let (code, v, _) = run(&[
        sys.to_str().unwrap(),
        "--command",
        "melnikov",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let warnings = v["warnings"].as_array().unwrap();
    assert!(warnings
        .iter()
        .any(|w| w.as_str().unwrap().contains("degenerate perturbation")));
    let csv = std::fs::read_to_string(dir.path().join("m1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "s,re_m1,im_m1,f1,f2,f3");
    for line in lines {
        assert!(line.split(',').skip(1).all(|c| c == "0"), "{line}");
    }
}

#[test]
fn analyze_counts_within_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let sys = system("canonical_1m2x2.json");
    let (code, v, _) = run(&[
        sys.to_str().unwrap(),
        "--command",
        "analyze",
        "--eps",
        "1e-3",
        "--radius",
        "0.05",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let w = v["winding_count"].as_i64().unwrap();
    let r = v["real_cycle_count"].as_i64().unwrap();
    assert!(r <= w);
    assert!(v["bound"].is_i64());
    for f in [
        "m1.csv",
        "m1.svg",
        "contour.csv",
        "contour.svg",
        "zero_locus.csv",
        "zero_locus.svg",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn errors_are_json_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let sys = system("canonical_ydx.json");
    let (code, _, e) = run(&[
        sys.to_str().unwrap(),
        "--command",
        "count",
        "--eps",
        "1e-3",
        "--radius",
        "0.3",
        "--out",
        d,
    ]);
    assert_eq!(code, 2);
    assert_eq!(e["error"]["module"], "counting");
    assert_eq!(e["error"]["operation"], "count_zeros");
    assert!(dir.path().join("error.json").exists());

    let (code, _, e) = run(&["--command", "bogus"]);
    assert_eq!(code, 2);
    assert_eq!(e["error"]["operation"], "parse_args");

    let (code, _, e) = run(&["/no/such/file.json", "--command", "melnikov", "--out", d]);
    assert_eq!(code, 2);
    assert_eq!(e["error"]["operation"], "read_system");
}

#[test]
fn dulac_and_zero_locus_write_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let sys = system("canonical_ydx.json");
    let (code, v, _) = run(&[
        sys.to_str().unwrap(),
        "--command",
        "dulac",
        "--eps",
        "1e-3",
        "--rho",
        "0.02",
        "--phi",
        "0.5",
        "--out",
        d,
    ]);
    assert_eq!(code, 0);
    assert!(v["dulac"]["re_value"].is_f64());
    let head = std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    assert!(head.starts_with("param,re_x,im_x,re_y,im_y"));

    let (code, v, _) = run(&[
        sys.to_str().unwrap(),
        "--command",
        "zero-locus",
        "--eps",
        "1e-3",
        "--u-range=-0.05,-0.005",
        "--grid",
        "6",
        "--out",
        d,
    ]);
    assert_eq!(code, 0);
    assert!(v["zero_locus"]["max_residual"].as_f64().unwrap() < 1e-10);
    let head = std::fs::read_to_string(dir.path().join("zero_locus.csv")).unwrap();
    assert!(head.starts_with("u,v_solved,v_predicted,residual"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let sys = system("canonical_ydx.json");
    let text = serde_json::json!({"system_file": sys, "command": "bounds", "nu": ["1", "1", "1", "1"], "output_dir": dir.path().join("a")});
    std::fs::write(&cfg, text.to_string()).unwrap();
    let (code, v, _) = run(&["--config", cfg.to_str().unwrap(), "--nu", "2,1,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["bound_two_saddle"], 5);
    assert!(dir.path().join("a/summary.json").exists());
}
