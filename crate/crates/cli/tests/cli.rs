use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn crowdmind(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_crowdmind"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn synth(dir: &Path, kind: &str) {
    let out = crowdmind(&["synth", "--kind", kind, "--out", path(dir), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn analyze(input: &Path, output: &Path, extra: &[&str]) -> std::process::Output {
    let mut args = vec![
        "analyze",
        "--input-dir",
        path(input),
        "--output-dir",
        path(output),
        "--video-name",
        "clip",
        "--fps",
        "25",
        "--pixels-per-meter",
        "50",
        "--train-samples",
        "2000",
        "--train-epochs",
        "150",
    ];
    args.extend_from_slice(extra);
    crowdmind(&args)
}

#[test]
fn synth_writes_tracking_and_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "grouped-walk");
    let text = std::fs::read_to_string(dir.path().join("tracking.txt")).unwrap();
    assert!(text.starts_with("P-0"));
    let truth = std::fs::read_to_string(dir.path().join("ground_truth.csv")).unwrap();
    assert_eq!(truth.lines().count(), 9);
}

#[test]
fn synth_is_byte_identical_per_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    synth(a.path(), "corridor");
    synth(b.path(), "corridor");
    assert_eq!(files(a.path()), files(b.path()));
}

#[test]
fn analyze_reruns_are_byte_identical() {
    let input = tempfile::tempdir().unwrap();
    synth(input.path(), "grouped-walk");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let extra = ["--all-features", "--output", "txt,chart,overlay", "--every", "5"];
    let out = analyze(input.path(), a.path(), &extra);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("2 groups"));
    assert!(analyze(input.path(), b.path(), &extra).status.success());
    let fa = files(a.path());
    assert_eq!(fa, files(b.path()));
    assert!(fa.contains_key("clip_all_features_frame.txt"));
    assert!(fa.contains_key("clip_overlay.csv"));
    assert!(fa.contains_key("clip_cultural.txt"));
}

#[test]
fn physical_only_writes_physical_files() {
    let input = tempfile::tempdir().unwrap();
    synth(input.path(), "corridor");
    let out_dir = tempfile::tempdir().unwrap();
    let out = analyze(input.path(), out_dir.path(), &["--dims", "I"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = files(out_dir.path()).into_keys().collect();
    assert_eq!(names, ["clip_physical.txt", "clip_speed_chart.csv"]);
}

#[test]
fn cultural_only_writes_cultural_files() {
    let input = tempfile::tempdir().unwrap();
    synth(input.path(), "grouped-walk");
    let out_dir = tempfile::tempdir().unwrap();
    let out = analyze(input.path(), out_dir.path(), &["--dims", "IV"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = files(out_dir.path()).into_keys().collect();
    assert_eq!(names, ["clip_cultural.txt", "clip_hofstede_chart.csv"]);
}

#[test]
fn exit_codes() {
    let input = tempfile::tempdir().unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    // no tracking file
    assert_eq!(analyze(input.path(), out_dir.path(), &[]).status.code(), Some(1));

    synth(input.path(), "lone-walkers");
    let bad_fps = crowdmind(&[
        "analyze",
        "--input-dir",
        path(input.path()),
        "--output-dir",
        path(out_dir.path()),
        "--video-name",
        "clip",
        "--fps",
        "0",
        "--pixels-per-meter",
        "50",
    ]);
    assert_eq!(bad_fps.status.code(), Some(2));
    assert_eq!(analyze(input.path(), out_dir.path(), &["--every", "0"]).status.code(), Some(2));
    assert_eq!(analyze(input.path(), out_dir.path(), &["--dims", "V"]).status.code(), Some(2));

    std::fs::write(input.path().join("tracking.txt"), "P-1\n0 1.0\n").unwrap();
    assert_eq!(analyze(input.path(), out_dir.path(), &[]).status.code(), Some(1));

    let bad_spec = crowdmind(&["synth", "--kind", "grouped-walk", "--out", path(out_dir.path()), "--frames", "1"]);
    assert_eq!(bad_spec.status.code(), Some(2));
}
