use std::fs;
use std::path::Path;

use startle_surprise::cli::run_from_args;
use startle_surprise::eval::{parse_report_csv, REPORT_CSV_HEADER};
use tempfile::TempDir;

fn run(args: &[&str]) -> i32 {
    run_from_args(std::iter::once("startle-surprise").chain(args.iter().copied()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Short low-rate recordings keep the sweep quick: 120 s at 250 Hz with the
/// event at 80 s and a 20 s baseline guard.
fn synth_small(dir: &Path, n: &str) {
    let code = run(&[
        "synth", "--n", n, "--seed", "7", "--out", p(dir), "--fs", "250", "--duration", "120", "--onset", "80",
    ]);
    assert_eq!(code, 0);
}

fn sweep(data: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec![
        "sweep", "--data-dir", p(data), "--output-dir", p(out), "--seeds", "2", "--n-boot", "200",
        "--baseline-guard-s", "20",
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn synth_writes_one_recording_and_annotation_per_participant() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("d");
    synth_small(&data, "17");
    let names: Vec<String> = fs::read_dir(&data)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names.iter().filter(|n| n.ends_with("_recording.csv")).count(), 34);
    assert_eq!(names.iter().filter(|n| n.ends_with("_annotations.csv")).count(), 34);
    let rec = fs::read_to_string(data.join("p000_recording.csv")).unwrap();
    assert!(rec.starts_with("t_s,ecg,eda,ppg,resp\n"));
    assert_eq!(fs::read_to_string(data.join("p001_annotations.csv")).unwrap(), "onset_s,label\n80,surprise\n");
}

#[test]
fn sweep_is_deterministic_and_report_renders() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("d");
    synth_small(&data, "8");
    let before = fs::read(data.join("p003_recording.csv")).unwrap();

    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(sweep(&data, &a, &[]), 0);
    assert_eq!(sweep(&data, &b, &["--threads", "1"]), 0);
    assert_eq!(fs::read(data.join("p003_recording.csv")).unwrap(), before);

    let csv = fs::read_to_string(a.join("report.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), REPORT_CSV_HEADER);
    assert_eq!(parse_report_csv(&csv).unwrap().len(), 288);
    assert_eq!(csv, fs::read_to_string(b.join("report.csv")).unwrap());
    assert_eq!(
        fs::read(a.join("summary.json")).unwrap(),
        fs::read(b.join("summary.json")).unwrap()
    );
    let echoed = fs::read_to_string(a.join("effective_config.cfg")).unwrap();
    assert!(echoed.contains("seeds = 2\n") && echoed.contains("baseline_guard_s = 20\n"));

    // The echoed config reproduces the run on its own.
    let c = tmp.path().join("c");
    let cfg = tmp.path().join("again.cfg");
    fs::write(&cfg, echoed.replace(p(&a), p(&c))).unwrap();
    assert_eq!(run(&["sweep", "--config", p(&cfg)]), 0);
    assert_eq!(csv, fs::read_to_string(c.join("report.csv")).unwrap());

    let out = tmp.path().join("figs");
    assert_eq!(run(&["report", "--input", p(&a.join("report.csv")), "--out", p(&out)]), 0);
    for task in ["startle_vs_surprise", "startle_vs_baseline", "surprise_vs_baseline", "three_class"] {
        for suffix in ["_table.txt", "_best_window.csv", "_best_model.csv"] {
            assert!(out.join(format!("{task}{suffix}")).exists(), "{task}{suffix}");
        }
    }
    let panel = fs::read_to_string(out.join("three_class_best_window.csv")).unwrap();
    assert_eq!(panel.lines().next().unwrap(), "model,source,mean_acc,ci_low,ci_high,chance");
    assert_eq!(panel.lines().count(), 1 + 18);
}

#[test]
fn flags_override_config_and_set_reaches_grid_keys() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("d");
    synth_small(&data, "6");
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, format!("data_dir = {}\nwindows = 3,5\nmodels = svm\nseeds = 3\n", p(&data))).unwrap();
    let out = tmp.path().join("o");
    let code = run(&[
        "sweep", "--config", p(&cfg), "--output-dir", p(&out), "--windows", "5", "--tasks", "startle_vs_surprise",
        "--n-boot", "100", "--baseline-guard-s", "20", "--set", "grid.svm_c=1",
    ]);
    assert_eq!(code, 0);
    let rows = parse_report_csv(&fs::read_to_string(out.join("report.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.window_s == 5 && r.seed_count == 3));
    let echoed = fs::read_to_string(out.join("effective_config.cfg")).unwrap();
    assert!(echoed.contains("windows = 5\n") && echoed.contains("grid.svm_c = 1\n"));
}

#[test]
fn featurize_and_preprocess_write_tables() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("d");
    synth_small(&data, "5");
    let clean = tmp.path().join("clean");
    assert_eq!(run(&["preprocess", "--data-dir", p(&data), "--out", p(&clean)]), 0);
    assert_eq!(fs::read_dir(&clean).unwrap().count(), 20);

    let table = tmp.path().join("f/w7.csv");
    assert_eq!(
        run(&["featurize", "--data-dir", p(&clean), "--window", "7", "--out", p(&table), "--baseline-guard-s", "20"]),
        0
    );
    let text = fs::read_to_string(&table).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 21);
    assert_eq!(header[0], "ecg_mean");
    assert_eq!(header[20], "label");
    assert_eq!(text.lines().count(), 1 + 15);
}

#[test]
fn failures_exit_nonzero() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(&["sweep", "--seeds", "0"]), 2);
    assert_eq!(run(&["sweep", "--set", "colour=red"]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
    assert_eq!(run(&["featurize", "--data-dir", "x", "--window", "4", "--out", "y"]), 2);
    assert_eq!(run(&["preprocess", "--data-dir", p(&tmp.path().join("missing")), "--out", p(tmp.path())]), 1);
    assert_eq!(run(&["synth", "--n", "3", "--out", p(&tmp.path().join("s"))]), 1);
}
