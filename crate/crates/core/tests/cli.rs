//! End-to-end checks of the command-line surface: exit codes, output files,
//! and header flexibility.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqt-ladder"))
        .args(args)
        .output()
        .expect("spawn rqt-ladder")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const GOOD_CSV: &str = "\
sequence_id,resolution,qp,bitrate_kbps,psnr_db,xpsnr_db,vmaf,decode_time_s,decode_energy_j
clip,1080,30,2500,38.1,38.9,91.0,12.5,310.0
clip,1080,40,900,34.0,34.7,72.0,10.1,255.0
clip,2160,30,9000,41.2,42.0,97.0,33.0,820.0
clip,2160,40,3100,36.9,37.6,84.0,27.5,700.0
";

fn temp_with(name: &str, text: &str) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    let path = path.to_str().unwrap().to_string();
    (dir, path)
}

#[test]
fn validate_accepts_well_formed_csv() {
    let (_dir, path) = temp_with("m.csv", GOOD_CSV);
    let out = run(&["validate", &path]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_accepts_mbps_header() {
    let csv = GOOD_CSV
        .replace("bitrate_kbps", "bitrate_mbps")
        .replace(",2500,", ",2.5,")
        .replace(",900,", ",0.9,")
        .replace(",9000,", ",9.0,")
        .replace(",3100,", ",3.1,");
    let (_dir, path) = temp_with("m.csv", &csv);
    let out = run(&["validate", &path]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_rejects_malformed_rows() {
    let bad = GOOD_CSV.replace(",2500,", ",-2500,");
    let (_dir, path) = temp_with("m.csv", &bad);
    assert_eq!(code(&run(&["validate", &path])), 4);

    let dup = format!("{GOOD_CSV}clip,1080,30,2400,38.0,38.8,90.0,12.0,300.0\n");
    let (_dir, path) = temp_with("m.csv", &dup);
    assert_eq!(code(&run(&["validate", &path])), 4);
}

#[test]
fn strict_mode_rejects_off_grid_points() {
    let off = GOOD_CSV.replace("clip,1080,30,", "clip,1080,31,");
    let (_dir, path) = temp_with("m.csv", &off);
    assert_eq!(code(&run(&["validate", &path])), 0);
    assert_eq!(code(&run(&["validate", &path, "--strict"])), 4);
}

#[test]
fn missing_input_is_an_io_error() {
    assert_eq!(code(&run(&["validate", "/nonexistent/m.csv"])), 3);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&run(&["validate", "--bogus"])), 2);
    assert_eq!(code(&run(&["fronts"])), 2);
}

#[test]
fn front_writes_per_sequence_json() {
    let (_dir, path) = temp_with("m.csv", GOOD_CSV);
    let out_dir = Path::new(&path).parent().unwrap().join("fronts");
    let out = run(&[
        "front", &path, "--strategy", "jqt", "--metric", "xpsnr", "--alpha", "2.0",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_dir.join("front_clip.json")).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(!rows.as_array().unwrap().is_empty());
    for row in rows.as_array().unwrap() {
        assert!(row["bitrate_kbps"].as_f64().unwrap() > 0.0);
        assert!(row["objective"].is_number());
    }
}

#[test]
fn front_requires_a_front_strategy() {
    let (_dir, path) = temp_with("m.csv", GOOD_CSV);
    let out_dir = Path::new(&path).parent().unwrap().join("fronts");
    let out = run(&[
        "front", &path, "--strategy", "fixed", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn timecap_ladder_requires_tau_limit() {
    let (_dir, path) = temp_with("m.csv", GOOD_CSV);
    let out_dir = Path::new(&path).parent().unwrap().join("ladders");
    let out = run(&[
        "ladder", &path, "--strategy", "timecap", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ladder_honors_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("m.csv");
    std::fs::write(&csv_path, GOOD_CSV).unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        r#"{"strategy": "dynres", "metric": "psnr", "targets": [1000, 5000]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("ladders");
    let out = run(&[
        "ladder", csv_path.to_str().unwrap(),
        "--config", cfg_path.to_str().unwrap(),
        "--metric", "xpsnr",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ladder: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("ladder_clip.json")).unwrap())
            .unwrap();
    // strategy and targets from the file, metric overridden by the flag
    assert_eq!(ladder["strategy"], "dynres");
    assert_eq!(ladder["metric"], "xpsnr");
    let rungs = ladder["rungs"].as_array().unwrap();
    assert!(rungs.iter().all(|r| {
        let t = r["target_kbps"].as_f64().unwrap();
        t == 1000.0 || t == 5000.0
    }));
}

#[test]
fn sequence_filter_limits_output() {
    let two = format!(
        "{GOOD_CSV}other,1080,30,2600,37.5,38.2,90.0,13.0,320.0\nother,1080,40,950,33.1,33.9,70.0,10.4,260.0\n"
    );
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("m.csv");
    std::fs::write(&csv_path, &two).unwrap();
    let out_dir = dir.path().join("ladders");
    let out = run(&[
        "ladder", csv_path.to_str().unwrap(),
        "--strategy", "dynres", "--sequence", "other",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("ladder_other.json").exists());
    assert!(!out_dir.join("ladder_clip.json").exists());
}
