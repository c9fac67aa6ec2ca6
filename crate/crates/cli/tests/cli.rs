use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermal-vitals"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = bin(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// 32x32 frames, one 16x16 region at (8, 8), static, light noise.
fn spec(fps: u32, secs: f64, vital: &str, f: f64, seed: u64) -> Value {
    json!({
        "duration_s": secs,
        "fps": fps,
        "width": 32,
        "height": 32,
        "background": 1000,
        "noise_sigma": 2.0,
        "seed": seed,
        "regions": [{
            "label": "nose",
            "vital": vital,
            "roi": {"x": 8, "y": 8, "w": 16, "h": 16},
            "frequency_hz": f,
            "amplitude": 20,
            "contrast": 150
        }]
    })
}

fn write_spec(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec(v).unwrap()).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

fn rates(doc: &Value) -> Vec<f64> {
    doc["estimates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["rate_per_min"].as_f64().unwrap())
        .collect()
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d, "a.json", &spec(15, 4.0, "rr", 0.4, 1));
    write_spec(d, "b.json", &spec(15, 4.0, "rr", 0.4, 2));
    ok(d, &["gen", "--spec", "a.json", "-o", "a1.thsq"]);
    ok(d, &["gen", "--spec", "a.json", "-o", "a2.thsq"]);
    ok(d, &["gen", "--spec", "b.json", "-o", "b.thsq"]);
    let read = |n: &str| std::fs::read(d.join(n)).unwrap();
    assert_eq!(read("a1.thsq"), read("a2.thsq"));
    assert_ne!(read("a1.thsq"), read("b.thsq"));
}

#[test]
fn gen_accepts_toml_specs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let toml = r#"
duration_s = 2.0
fps = 15
width = 32
height = 32
background = 1000
seed = 4

[[regions]]
label = "nose"
vital = "rr"
roi = { x = 8, y = 8, w = 16, h = 16 }
frequency_hz = 0.4
amplitude = 20
"#;
    std::fs::write(d.join("s.toml"), toml).unwrap();
    ok(d, &["gen", "--spec", "s.toml", "-o", "s.thsq"]);
    assert!(d.join("s.thsq").exists());
}

#[test]
fn gen_rejects_modulation_above_nyquist() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d, "s.json", &spec(15, 2.0, "hr", 8.0, 1));
    let out = bin(d, &["gen", "--spec", "s.json", "-o", "s.thsq"]);
    assert_eq!(code(&out), 2);
    assert!(!d.join("s.thsq").exists());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&bin(d, &["estimate", "-i", "x.thsq"])), 2);
    assert_eq!(code(&bin(d, &["frobnicate"])), 2);
    write_spec(d, "s.json", &spec(15, 2.0, "rr", 0.4, 1));
    assert_eq!(
        code(&bin(
            d,
            &["--hop", "-1", "gen", "--spec", "s.json", "-o", "s.thsq"]
        )),
        2
    );
}

#[test]
fn missing_or_corrupt_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&bin(
            d,
            &[
                "track",
                "-i",
                "nope.thsq",
                "--roi",
                "0,0,16,16",
                "-o",
                "t.csv"
            ]
        )),
        3
    );
    std::fs::write(d.join("bad.thsq"), b"XXXX0000").unwrap();
    assert_eq!(
        code(&bin(
            d,
            &[
                "track",
                "-i",
                "bad.thsq",
                "--roi",
                "0,0,16,16",
                "-o",
                "t.csv"
            ]
        )),
        3
    );
}

#[test]
fn roi_outside_frame_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d, "s.json", &spec(15, 2.0, "rr", 0.4, 1));
    ok(d, &["gen", "--spec", "s.json", "-o", "s.thsq"]);
    let out = bin(
        d,
        &[
            "track",
            "-i",
            "s.thsq",
            "--roi",
            "20,20,16,16",
            "-o",
            "t.csv",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn heart_rate_at_five_fps_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d, "s.json", &spec(5, 30.0, "rr", 0.4, 1));
    ok(d, &["gen", "--spec", "s.json", "-o", "s.thsq"]);
    let out = bin(
        d,
        &[
            "estimate",
            "-i",
            "s.thsq",
            "--roi",
            "8,8,16,16",
            "--vital",
            "hr",
            "--method",
            "1",
            "-o",
            "e.json",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("5.34"));
    // respiration is fine at the same rate
    ok(
        d,
        &[
            "estimate",
            "-i",
            "s.thsq",
            "--roi",
            "8,8,16,16",
            "--vital",
            "rr",
            "--method",
            "1",
            "-o",
            "e.json",
        ],
    );
}

#[test]
fn respiration_at_point_four_hertz_reads_24_rpm() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d, "s.json", &spec(15, 40.0, "rr", 0.4, 3));
    ok(d, &["gen", "--spec", "s.json", "-o", "s.thsq"]);
    ok(
        d,
        &["track", "-i", "s.thsq", "--roi", "8,8,16,16", "-o", "t.csv"],
    );
    ok(
        d,
        &[
            "estimate", "-i", "s.thsq", "--track", "t.csv", "--vital", "rr", "--method", "1", "-o",
            "e.json",
        ],
    );
    let doc = read_json(&d.join("e.json"));
    let r = rates(&doc);
    // 40 s of frames, 30 s windows, 1 s hop
    assert_eq!(r.len(), 11);
    // nearest padded bin is within 15 / 4096 Hz
    assert!(
        r.iter().all(|v| (v - 24.0).abs() <= 60.0 * 15.0 / 4096.0),
        "{r:?}"
    );
    assert_eq!(doc["roi"], "nose");
    assert_eq!(doc["config"]["estimator"]["padding_factor"], 8);
}

#[test]
fn single_pixel_vote_matches_roi_mean() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut s = spec(15, 35.0, "rr", 0.3, 5);
    s["noise_sigma"] = json!(6.0);
    write_spec(d, "s.json", &s);
    ok(d, &["gen", "--spec", "s.json", "-o", "s.thsq"]);
    for m in ["1", "2"] {
        ok(
            d,
            &[
                "estimate",
                "-i",
                "s.thsq",
                "--roi",
                "15,15,1,1",
                "--vital",
                "rr",
                "--method",
                m,
                "-o",
                &format!("m{m}.json"),
            ],
        );
    }
    let (a, b) = (read_json(&d.join("m1.json")), read_json(&d.join("m2.json")));
    assert_eq!(rates(&a), rates(&b));
    assert_eq!(a["method"], 1);
    assert_eq!(b["method"], 2);
}

fn estimate_pair(d: &Path, vital: &str, f: f64) {
    write_spec(d, &format!("{vital}.json"), &spec(15, 60.0, vital, f, 7));
    ok(
        d,
        &[
            "gen",
            "--spec",
            &format!("{vital}.json"),
            "-o",
            &format!("{vital}.thsq"),
        ],
    );
    ok(
        d,
        &[
            "estimate",
            "-i",
            &format!("{vital}.thsq"),
            "--roi",
            "8,8,16,16",
            "--vital",
            vital,
            "--method",
            "1",
            "-o",
            &format!("{vital}_est.json"),
        ],
    );
}

#[test]
fn evaluate_without_overlapping_truth_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    estimate_pair(d, "rr", 0.4);
    std::fs::write(
        d.join("truth.csv"),
        "time_s,hr_bpm,rr_rpm\n500,120,24\n501,120,24\n",
    )
    .unwrap();
    let out = bin(
        d,
        &[
            "evaluate",
            "rr_est.json",
            "--truth",
            "truth.csv",
            "-o",
            "r.json",
        ],
    );
    assert_eq!(code(&out), 3);
}

#[test]
fn missing_respiration_truth_keeps_heart_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    estimate_pair(d, "hr", 2.0);
    estimate_pair(d, "rr", 0.4);
    let mut csv = String::from("time_s,hr_bpm,rr_rpm\n");
    for t in 0..=60 {
        csv.push_str(&format!("{t},120,\n"));
    }
    std::fs::write(d.join("truth.csv"), csv).unwrap();
    let out = ok(
        d,
        &[
            "--seed",
            "9",
            "evaluate",
            "hr_est.json",
            "rr_est.json",
            "--truth",
            "truth.csv",
            "-o",
            "r.json",
        ],
    );
    let report = read_json(&d.join("r.json"));
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["vital"], "hr");
    assert!(rows[0]["mape_method1"].as_f64().unwrap() < 0.2);
    assert!(!report["warnings"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(report["seed"], 9);
    assert_eq!(report["config"]["segment_seed"], 9);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("c.toml"),
        "[estimator]\nprominence_threshold = 4.5\nhop_s = 10.0\n",
    )
    .unwrap();
    write_spec(d, "s.json", &spec(15, 40.0, "rr", 0.4, 3));
    ok(d, &["gen", "--spec", "s.json", "-o", "s.thsq"]);
    ok(
        d,
        &[
            "--config",
            "c.toml",
            "--hop",
            "5",
            "estimate",
            "-i",
            "s.thsq",
            "--roi",
            "8,8,16,16",
            "--vital",
            "rr",
            "--method",
            "1",
            "-o",
            "e.json",
        ],
    );
    let doc = read_json(&d.join("e.json"));
    assert_eq!(doc["config"]["estimator"]["prominence_threshold"], 4.5);
    assert_eq!(doc["config"]["estimator"]["hop_s"], 5.0);
    // 10 s of slack at a 5 s hop
    assert_eq!(rates(&doc).len(), 3);
}

#[test]
fn book_walkthrough_runs_on_shipped_data() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../book/data");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for f in ["nose.json", "pipeline.toml"] {
        std::fs::copy(data.join(f), d.join(f)).unwrap();
    }
    let cfg = ["--config", "pipeline.toml"];
    let run = |rest: &[&str]| ok(d, &[&cfg[..], rest].concat());
    run(&[
        "gen",
        "--spec",
        "nose.json",
        "-o",
        "nose.thsq",
        "--truth-csv",
        "truth.csv",
    ]);
    run(&[
        "track",
        "-i",
        "nose.thsq",
        "--roi",
        "16,16,64,64",
        "-o",
        "nose_track.csv",
    ]);
    for m in ["1", "2"] {
        let out = format!("rr_m{m}.json");
        run(&[
            "estimate",
            "-i",
            "nose.thsq",
            "--track",
            "nose_track.csv",
            "--vital",
            "rr",
            "--method",
            m,
            "-o",
            &out,
        ]);
    }
    run(&[
        "evaluate",
        "rr_m1.json",
        "rr_m2.json",
        "--truth",
        "truth.csv",
        "-o",
        "report.json",
    ]);

    let report = read_json(&d.join("report.json"));
    let row = &report["rows"][0];
    assert_eq!(row["roi"], "nose");
    assert_eq!(row["recordings"], 2);
    for k in ["mape_method1", "mape_method2"] {
        assert!(row[k].as_f64().unwrap() < 1.0, "{k} = {}", row[k]);
    }
    assert!(d.join("report.rr_nose_m2.svg").exists());
}
