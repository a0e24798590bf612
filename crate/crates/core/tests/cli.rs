//! End-to-end tests of the `mutualspace` binary: every subcommand against the
//! bundled fixtures, checking reports, plots, overrides, and failure modes.

use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// A config small enough for test-speed GA runs.
fn quick_config(dir: &Path, seed: u64) -> PathBuf {
    let path = dir.join("config.json");
    let ga = format!(
        r#"{{"population": 60, "generations": 120, "stagnation_window": 30, "seed": {seed}}}"#
    );
    fs::write(
        &path,
        format!(r#"{{"align": {ga}, "rearrange": {ga}, "pareto": {ga}}}"#),
    )
    .unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mutualspace"))
        .args(args)
        .env_remove("MUTUALSPACE_CONFIG")
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let output = run(args);
    assert!(
        output.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap())
        .unwrap_or_else(|e| panic!("{} is not valid JSON: {e}", path.display()))
}

/// Parse the numeric columns of a steps/pareto CSV: (K, E, penalty) per row.
fn csv_rows(path: &Path) -> Vec<(f64, f64, f64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().expect("header row");
    assert!(header.ends_with("K_m2,E,penalty,poses,deltas"), "{header}");
    lines
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 6, "row has extra commas: {line}");
            (
                cols[1].parse().unwrap(),
                cols[2].parse().unwrap(),
                cols[3].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn spaces_reports_areas_and_draws_rooms() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    run_ok(&[
        "spaces",
        fixture("free_table.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    let report = read_json(&out.join("spaces.json"));
    assert_eq!(report["resolution"].as_f64(), Some(0.05));
    let rooms = report["rooms"].as_array().unwrap();
    assert_eq!(rooms.len(), 1);
    let lounge = &rooms[0];
    assert_eq!(lounge["room_id"], "lounge");
    // 6x6 room minus a 2x1 table; the table adds a sittable band.
    let standable = lounge["standable_area_m2"].as_f64().unwrap();
    let sittable = lounge["sittable_area_m2"].as_f64().unwrap();
    assert!((standable - 34.0).abs() < 0.1, "standable {standable}");
    let band = sittable - standable;
    assert!((band - 2.0).abs() < 0.1, "band area {band}");

    let svg = fs::read_to_string(out.join("rooms/lounge.svg")).unwrap();
    assert!(svg.contains(r#"class="standable""#));
    assert!(svg.contains(r#"class="sittable""#));
    assert!(svg.contains(r#"class="furniture""#));
}

#[test]
fn align_writes_poses_trace_and_overlays() {
    let tmp = TempDir::new().unwrap();
    let config = quick_config(tmp.path(), 5);
    let out = tmp.path().join("out");
    run_ok(&[
        "align",
        fixture("two_identical_rooms.json").to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    let report = read_json(&out.join("alignment.json"));
    assert_eq!(report["kind"], "standable");
    assert_eq!(report["seed"].as_u64(), Some(5));
    let area = report["mutual_area_m2"].as_f64().unwrap();
    // Identical rooms overlap fully; the identity seed guarantees it.
    assert!(area >= 13.9, "mutual area {area}");

    let poses = report["poses"].as_array().unwrap();
    assert_eq!(poses.len(), 2);
    assert_eq!(poses[0]["tx"].as_f64(), Some(0.0));
    assert_eq!(poses[0]["theta_deg"].as_f64(), Some(0.0));

    let trace: Vec<f64> = report["k_trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(
        trace.len(),
        report["generations_run"].as_u64().unwrap() as usize
    );
    assert!(trace.windows(2).all(|w| w[1] >= w[0]), "trace not monotone");
    assert_eq!(*trace.last().unwrap(), area);

    for id in ["room_a", "room_b"] {
        let svg = fs::read_to_string(out.join(format!("rooms/{id}.svg"))).unwrap();
        assert!(svg.contains(r#"class="mutual""#), "{id} overlay missing");
    }
}

#[test]
fn rearrange_grows_area_and_draws_arrows() {
    let tmp = TempDir::new().unwrap();
    let config = quick_config(tmp.path(), 11);
    let out = tmp.path().join("out");
    run_ok(&[
        "rearrange",
        fixture("corridor_vs_cornered.json").to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    let rows = csv_rows(&out.join("steps.csv"));
    assert!(rows.len() >= 2, "no accepted rearrangement step");
    assert_eq!(
        rows[0],
        (5.0, 0.0, 0.0),
        "step 0 must be the pure alignment"
    );
    for pair in rows.windows(2) {
        let ((k0, e0, _), (k1, e1, p1)) = (pair[0], pair[1]);
        assert!(k1 >= 1.10 * k0 - 1e-9, "step grew {k0} -> {k1}");
        assert!(e1 >= e0, "effort fell {e0} -> {e1}");
        assert_eq!(p1, 0.0, "accepted step has penalty");
    }

    let step0 = read_json(&out.join("steps/0.json"));
    assert_eq!(step0["total_effort"].as_f64(), Some(0.0));
    assert_eq!(step0["delta"], serde_json::json!({}));

    let last = rows.len() - 1;
    let step_last = read_json(&out.join(format!("steps/{last}.json")));
    let moved = &step_last["delta"]["cornered"]["table_mid"];
    assert!(
        moved["du"].as_f64().unwrap().abs() > 0.1,
        "table never moved"
    );

    let svg = fs::read_to_string(out.join(format!("steps/{last}.svg"))).unwrap();
    assert!(svg.contains(r#"class="move-arrow""#), "no move arrow drawn");
    assert!(svg.contains("step "), "heading missing");
    let svg0 = fs::read_to_string(out.join("steps/0.svg")).unwrap();
    assert!(
        !svg0.contains(r#"class="move-arrow""#),
        "step 0 moved nothing"
    );
}

#[test]
fn pareto_front_is_sorted_and_anchored_at_zero_effort() {
    let tmp = TempDir::new().unwrap();
    let config = quick_config(tmp.path(), 21);
    let out = tmp.path().join("out");
    run_ok(&[
        "pareto",
        fixture("corridor_vs_cornered.json").to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    let rows = csv_rows(&out.join("pareto.csv"));
    assert!(
        rows.len() >= 2,
        "front collapsed to {} member(s)",
        rows.len()
    );
    assert_eq!(rows[0].1, 0.0, "first member must cost zero effort");
    for pair in rows.windows(2) {
        let ((k0, e0, _), (k1, e1, _)) = (pair[0], pair[1]);
        assert!(e1 > e0, "effort not strictly increasing: {e0} -> {e1}");
        assert!(k1 > k0, "area not strictly increasing: {k0} -> {k1}");
    }
    for &(_, _, penalty) in &rows {
        assert_eq!(penalty, 0.0);
    }

    let report = read_json(&out.join("pareto.json"));
    assert_eq!(report["members"].as_array().unwrap().len(), rows.len());

    let svg = fs::read_to_string(out.join("pareto.svg")).unwrap();
    assert_eq!(
        svg.matches(r#"class="front-point""#).count(),
        rows.len(),
        "scatter point per member"
    );
}

#[test]
fn seed_flag_overrides_config_and_runs_are_reproducible() {
    let tmp = TempDir::new().unwrap();
    let config = quick_config(tmp.path(), 5);
    let scene = fixture("two_identical_rooms.json");
    let mut reports = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        run_ok(&[
            "align",
            scene.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "99",
            "--out",
            out.to_str().unwrap(),
        ]);
        reports.push(fs::read(out.join("alignment.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1], "same seed, different bytes");
    let report: Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(report["seed"].as_u64(), Some(99), "--seed not applied");
}

#[test]
fn failures_exit_nonzero_and_name_the_culprit() {
    let tmp = TempDir::new().unwrap();

    let missing = run(&["spaces", "/no/such/scene.json"]);
    assert!(!missing.status.success());
    let stderr = String::from_utf8_lossy(&missing.stderr);
    assert!(stderr.contains("/no/such/scene.json"), "{stderr}");

    let bad_config = tmp.path().join("bad.json");
    fs::write(&bad_config, r#"{"resolutionn": 0.1}"#).unwrap();
    let typo = run(&[
        "spaces",
        fixture("free_table.json").to_str().unwrap(),
        "--config",
        bad_config.to_str().unwrap(),
    ]);
    assert!(!typo.status.success());
    let stderr = String::from_utf8_lossy(&typo.stderr);
    assert!(stderr.contains("resolutionn"), "{stderr}");

    let bad_res = run(&[
        "spaces",
        fixture("free_table.json").to_str().unwrap(),
        "--resolution=-0.5",
        "--out",
        tmp.path().join("neg").to_str().unwrap(),
    ]);
    assert!(!bad_res.status.success());
    let stderr = String::from_utf8_lossy(&bad_res.stderr);
    assert!(stderr.contains("resolution"), "{stderr}");
}
