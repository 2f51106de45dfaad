use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use attn_core::io::{write_jsonl, write_png};
use attn_core::{BBox, BoxAnnotation, Detection, Frame, Geometry};
use serde_json::json;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn attn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attn"))
        .args(args)
        .env("ATTN_LOG", "error")
        .output()
        .expect("attn runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const FRAME_NS: i64 = 33_333_333;

fn road_frame(g: Geometry, k: usize, car: BBox) -> Frame {
    let mut f = Frame::filled(g, 3, 0);
    for y in 0..g.height {
        for x in 0..g.width {
            let sky = y < g.height / 3;
            let base = if sky { 170 } else { 60 + (y * 40 / g.height) as u8 };
            let tint = ((x + 3 * k) % 16) as u8;
            f.pixel_mut(x, y).copy_from_slice(&[base, base + tint, if sky { 230 } else { base }]);
        }
    }
    for y in car.y as usize..(car.y + car.h) as usize {
        for x in car.x as usize..(car.x + car.w) as usize {
            f.pixel_mut(x, y).copy_from_slice(&[200, 30, 30]);
        }
    }
    f
}

/// Writes a sequence fixture: frames, manifest, gaze at twice the frame
/// rate, one car box per frame and a driving command per frame.
fn write_sequence(dir: &Path, frames: usize, with_discards: bool) {
    let g = Geometry::new(48, 64);
    let mut manifest = Vec::new();
    let mut gaze = Vec::new();
    let mut boxes = Vec::new();
    let mut commands = Vec::new();
    for k in 0..frames {
        let car = BBox::new(4.0 + (k % 20) as f64 * 2.0, 26.0, 12.0, 8.0);
        let name = format!("frames/{k:06}.png");
        write_png(&dir.join(&name), &road_frame(g, k, car)).unwrap();
        let t = k as i64 * FRAME_NS;
        manifest.push(json!({"frame_index": k, "t_ns": t, "path": name, "width": 64, "height": 48}));
        let x = 10.0 + 1.5 * k as f64;
        let y = 28.0 + 8.0 * (k as f64 / 5.0).sin();
        gaze.push(json!({"t_ns": t - 8_000_000, "x": x, "y": y, "valid": !(with_discards && k == 5)}));
        let x2 = if with_discards && k == 12 { 70.0 } else { x + 0.5 };
        gaze.push(json!({"t_ns": t + 8_000_000, "x": x2, "y": y + 0.5, "valid": true}));
        boxes.push(BoxAnnotation::new(k as u64, 0, car));
        commands.push(json!({"frame_index": k, "steering": (x - 32.0) / 32.0, "velocity": 0.5 + 0.01 * k as f64}));
    }
    write_jsonl(&dir.join("manifest.jsonl"), &manifest).unwrap();
    write_jsonl(&dir.join("gaze.jsonl"), &gaze).unwrap();
    write_jsonl(&dir.join("boxes.jsonl"), &boxes).unwrap();
    write_jsonl(&dir.join("commands.jsonl"), &commands).unwrap();
}

fn write_detections(dir: &Path) {
    let gt = vec![
        BoxAnnotation::new(0, 0, BBox::new(2.0, 3.0, 10.0, 8.0)),
        BoxAnnotation::new(0, 1, BBox::new(20.0, 5.0, 6.0, 6.0)),
        BoxAnnotation::new(1, 0, BBox::new(8.0, 8.0, 12.0, 10.0)),
        BoxAnnotation::new(2, 0, BBox::new(30.0, 2.0, 9.0, 9.0)),
        BoxAnnotation::new(2, 1, BBox::new(1.0, 20.0, 15.0, 5.0)),
    ];
    let perfect: Vec<_> = gt.iter().map(|b| Detection::from_annotation(b, 0.9)).collect();
    write_jsonl(&dir.join("gt.jsonl"), &gt).unwrap();
    write_jsonl(&dir.join("dets_perfect.jsonl"), &perfect).unwrap();
    let dim: Vec<_> = perfect.iter().take(3).copied().collect();
    let bright: Vec<_> = perfect
        .iter()
        .map(|d| Detection { x: d.x + 1.0, ..*d })
        .collect();
    write_jsonl(&dir.join("brightness/0.75.jsonl"), &dim).unwrap();
    write_jsonl(&dir.join("brightness/1.jsonl"), &perfect).unwrap();
    write_jsonl(&dir.join("brightness/1.85.jsonl"), &bright).unwrap();
}

/// Regenerates the bundled fixtures: `cargo test -p attn-cli --test cli -- --ignored`.
#[test]
#[ignore]
fn regenerate_fixtures() {
    let root = fixtures();
    for d in ["toy3", "synth30", "detections"] {
        let _ = std::fs::remove_dir_all(root.join(d));
    }
    write_sequence(&root.join("toy3"), 3, false);
    write_sequence(&root.join("synth30"), 30, true);
    write_detections(&root.join("detections"));
}

#[test]
fn build_toy_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let toy = fixtures().join("toy3");
    let o = attn(&[
        "build",
        "--gaze",
        s(&toy.join("gaze.jsonl")),
        "--manifest",
        s(&toy.join("manifest.jsonl")),
        "--out",
        s(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let seq = tmp.path().join("seq");
    for k in 0..3 {
        assert!(seq.join(format!("{k:06}.png")).exists());
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(seq.join("report.json")).unwrap()).unwrap();
    assert_eq!(
        report,
        json!({"discarded_out_of_frame": 0, "discarded_invalid": 0, "discarded_degenerate": 0})
    );
    let map = attn_core::io::read_map_png(&seq.join("000000.png")).unwrap();
    assert_eq!((map.height, map.width), (32, 64));
}

#[test]
fn build_counts_discards() {
    let tmp = tempfile::tempdir().unwrap();
    let seq = fixtures().join("synth30");
    let o = attn(&[
        "build",
        "--gaze",
        s(&seq.join("gaze.jsonl")),
        "--manifest",
        s(&seq.join("manifest.jsonl")),
        "--out",
        s(tmp.path()),
    ]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(report["discarded_out_of_frame"], 1);
    assert_eq!(report["discarded_invalid"], 1);
}

#[test]
fn malformed_input_exits_2_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let gaze = tmp.path().join("gaze.jsonl");
    std::fs::write(&gaze, "{\"t_ns\": 0, \"x\": 1, \"y\": 1, \"valid\": true}\n{\"t_ns\": oops}\n").unwrap();
    let toy = fixtures().join("toy3");
    let o = attn(&[
        "build",
        "--gaze",
        s(&gaze),
        "--manifest",
        s(&toy.join("manifest.jsonl")),
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gaze.jsonl:2"), "{err}");
}

#[test]
fn missing_input_exits_2_naming_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let o = attn(&[
        "train",
        "--dataset",
        s(&tmp.path().join("nope/dataset.jsonl")),
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope/dataset.jsonl"));
}

#[test]
fn unwritable_output_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let toy = fixtures().join("toy3");
    let o = attn(&[
        "build",
        "--gaze",
        s(&toy.join("gaze.jsonl")),
        "--manifest",
        s(&toy.join("manifest.jsonl")),
        "--out",
        s(&blocker),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_map_on_perfect_detections() {
    let d = fixtures().join("detections");
    let o = attn(&[
        "eval",
        "map",
        "--dets",
        s(&d.join("dets_perfect.jsonl")),
        "--gt",
        s(&d.join("gt.jsonl")),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1.0");
}

#[test]
fn brightness_sweep_writes_one_row_per_factor() {
    let d = fixtures().join("detections");
    let tmp = tempfile::tempdir().unwrap();
    let o = attn(&[
        "sweep",
        "brightness",
        "--gt",
        s(&d.join("gt.jsonl")),
        "--dets-dir",
        s(&d.join("brightness")),
        "--factors",
        "0.75,1.0,1.85",
        "--out",
        s(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("brightness.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "condition,metric,std");
    assert!(lines[2].starts_with("1,1,"));
    assert!(tmp.path().join("brightness.json").exists());
}

#[test]
fn brightness_sweep_fails_on_missing_factor() {
    let d = fixtures().join("detections");
    let tmp = tempfile::tempdir().unwrap();
    let o = attn(&[
        "sweep",
        "brightness",
        "--gt",
        s(&d.join("gt.jsonl")),
        "--dets-dir",
        s(&d.join("brightness")),
        "--factors",
        "0.75,1.2",
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1.2"));
}

#[test]
fn print_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let o = attn(&["--print-config", "--decay.rate", "0.2"]);
    assert!(o.status.success());
    let first = stdout(&o);
    assert!(first.contains("\"rate\": 0.2"));
    let path = tmp.path().join("c.json");
    std::fs::write(&path, &first).unwrap();
    let again = attn(&["--config", s(&path), "--print-config"]);
    assert_eq!(stdout(&again), first);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let o = attn(&["--print-config", "--decay.speed", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("c.json");
    std::fs::write(&path, r#"{"decay": {"rate": 0.1, "extra": 1}}"#).unwrap();
    assert_eq!(attn(&["--config", s(&path), "--print-config"]).status.code(), Some(2));
}

#[test]
fn marked_pipeline_trains_and_scores_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let seq = fixtures().join("toy3");
    let build = tmp.path().join("maps");
    let fused = tmp.path().join("fused");
    let model = tmp.path().join("model");
    let run = |args: &[&str]| {
        let o = attn(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        o
    };
    run(&["build", "--gaze", s(&seq.join("gaze.jsonl")), "--manifest", s(&seq.join("manifest.jsonl")), "--out", s(&build)]);
    run(&[
        "--fusion.mode", "marked", "fuse",
        "--manifest", s(&seq.join("manifest.jsonl")),
        "--maps", s(&build.join("seq")),
        "--commands", s(&seq.join("commands.jsonl")),
        "--out", s(&fused),
    ]);
    let fused_img = attn_core::io::read_png(&fused.join("000000.png")).unwrap();
    assert_eq!(fused_img.channels, 3);
    run(&["--train.epochs", "2", "train", "--dataset", s(&fused.join("dataset.jsonl")), "--out", s(&model)]);
    let o = run(&[
        "eval", "mse",
        "--checkpoint", s(&model.join("model.tnet")),
        "--dataset", s(&fused.join("dataset.jsonl")),
    ]);
    let mse: f64 = stdout(&o).trim().parse().unwrap();
    assert!(mse.is_finite() && mse >= 0.0);
}

#[test]
fn augment_is_reproducible() {
    let seq = fixtures().join("toy3");
    let mut outs = Vec::new();
    for workers in ["1", "3"] {
        let tmp = tempfile::tempdir().unwrap();
        let build = tmp.path().join("maps");
        let aug = tmp.path().join("aug");
        assert!(attn(&["build", "--gaze", s(&seq.join("gaze.jsonl")), "--manifest", s(&seq.join("manifest.jsonl")), "--out", s(&build)])
            .status
            .success());
        let o = attn(&[
            "--workers", workers,
            "augment",
            "--manifest", s(&seq.join("manifest.jsonl")),
            "--maps", s(&build.join("seq")),
            "--boxes", s(&seq.join("boxes.jsonl")),
            "--out", s(&aug),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut files = Vec::new();
        for name in ["000000.png", "000001_att.png", "boxes.jsonl", "points.jsonl"] {
            files.push(std::fs::read(aug.join(name)).unwrap());
        }
        outs.push((files, tmp));
    }
    assert_eq!(outs[0].0, outs[1].0);
}
