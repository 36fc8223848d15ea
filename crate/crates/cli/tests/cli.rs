//! End-to-end checks of the `adares` binary: exit codes, error prefixes,
//! file outputs, and seed handling.

use std::path::Path;
use std::process::{Command, Output};

fn adares() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adares"))
}

fn run(args: &[&str]) -> Output {
    adares().args(args).output().expect("spawning adares")
}

fn assert_ok(output: &Output) {
    assert!(
        output.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pipeline_smoke_synth_plan() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("d");
    let plans = dir.path().join("plans.jsonl");

    let output = run(&[
        "synth",
        "--out",
        path(&corpus),
        "--n",
        "20",
        "--alt",
        "uniform:10:110",
        "--seed",
        "7",
    ]);
    assert_ok(&output);

    let output = run(&[
        "plan",
        "--manifest",
        path(&corpus.join("manifest.jsonl")),
        "--camera",
        path(&corpus.join("camera.json")),
        "--ref-m",
        "4.5",
        "--ref-px",
        "32",
        "-o",
        path(&plans),
    ]);
    assert_ok(&output);

    let text = std::fs::read_to_string(&plans).unwrap();
    assert_eq!(text.lines().count(), 20);
}

#[test]
fn self_evaluation_scores_ap_one() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("d");
    assert_ok(&run(&[
        "synth",
        "--out",
        path(&corpus),
        "--n",
        "6",
        "--alt",
        "fixed:45,80,100",
        "--seed",
        "3",
    ]));

    // ground truth re-emitted as detections with score 1.0
    let manifest_file = std::fs::File::open(corpus.join("manifest.jsonl")).unwrap();
    let parsed =
        adares_core::parse_manifest::<f64, _>(std::io::BufReader::new(manifest_file)).unwrap();
    let dets: Vec<adares_core::Detection> = parsed
        .manifest
        .records
        .iter()
        .flat_map(|r| {
            r.boxes
                .iter()
                .map(|b| adares_core::Detection::new(r.image_id.clone(), b.clone(), 1.0))
        })
        .collect();
    let dets_path = dir.path().join("gt-as-dets.jsonl");
    let mut buf = Vec::new();
    adares_core::eval::write_detections(&dets, &mut buf).unwrap();
    std::fs::write(&dets_path, buf).unwrap();

    let output = run(&[
        "eval",
        "--dets",
        path(&dets_path),
        "--manifest",
        path(&corpus.join("manifest.jsonl")),
        "--iou",
        "0.5,0.7",
    ]);
    assert_ok(&output);
    let stdout = String::from_utf8_lossy(&output.stdout);
    let mean_lines: Vec<&str> = stdout.lines().filter(|l| l.starts_with("mean")).collect();
    assert_eq!(mean_lines.len(), 2);
    for line in mean_lines {
        assert!(line.contains("1.0000"), "expected AP 1.0 in '{line}'");
    }
}

#[test]
fn split_without_altitudes_exits_2_naming_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.jsonl");
    std::fs::write(
        &manifest,
        concat!(
            r#"{"image_id":"first_bad","file":"a.pgm","width":64,"height":64,"altitude_m":null,"view":"bev","boxes":[]}"#,
            "\n",
            r#"{"image_id":"second","file":"b.pgm","width":64,"height":64,"altitude_m":null,"view":"bev","boxes":[]}"#,
            "\n"
        ),
    )
    .unwrap();

    let output = run(&[
        "split",
        "--manifest",
        path(&manifest),
        "--kind",
        "below25",
        "--train-out",
        path(&dir.path().join("t.jsonl")),
        "--holdout-out",
        path(&dir.path().join("h.jsonl")),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.starts_with("error[2]:"), "stderr: {stderr}");
    assert!(stderr.contains("first_bad"), "stderr: {stderr}");
}

#[test]
fn unknown_subcommand_exits_1() {
    let output = run(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.starts_with("error[1]:"), "stderr: {stderr}");
}

#[test]
fn missing_file_exits_3() {
    let output = run(&[
        "stats",
        "--plans",
        "/nonexistent/plans.jsonl",
        "-o",
        "/tmp/unused.csv",
    ]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.starts_with("error[3]:"), "stderr: {stderr}");
}

#[test]
fn help_is_available_everywhere() {
    for args in [
        vec!["--help"],
        vec!["synth", "--help"],
        vec!["eval", "--help"],
    ] {
        let output = run(&args);
        assert!(output.status.success(), "help failed for {args:?}");
    }
}

#[test]
fn seed_env_var_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let by_flag = dir.path().join("flag");
    let by_env = dir.path().join("env");

    assert_ok(&run(&[
        "synth",
        "--out",
        path(&by_flag),
        "--n",
        "4",
        "--alt",
        "uniform:10:110",
        "--seed",
        "99",
    ]));
    let output = adares()
        .args([
            "synth",
            "--out",
            path(&by_env),
            "--n",
            "4",
            "--alt",
            "uniform:10:110",
        ])
        .env("ADARES_SEED", "99")
        .output()
        .unwrap();
    assert_ok(&output);

    let a = std::fs::read(by_flag.join("manifest.jsonl")).unwrap();
    let b = std::fs::read(by_env.join("manifest.jsonl")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn outputs_do_not_depend_on_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("d");
    let plans = dir.path().join("plans.jsonl");
    assert_ok(&run(&[
        "--jobs",
        "1",
        "synth",
        "--out",
        path(&corpus),
        "--n",
        "12",
        "--alt",
        "uniform:10:110",
        "--seed",
        "21",
    ]));
    assert_ok(&run(&[
        "plan",
        "--manifest",
        path(&corpus.join("manifest.jsonl")),
        "--camera",
        path(&corpus.join("camera.json")),
        "--ref-m",
        "4.5",
        "--ref-px",
        "32",
        "-o",
        path(&plans),
    ]));

    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let dets = dir.path().join(format!("dets_{jobs}.jsonl"));
        assert_ok(&run(&[
            "--jobs",
            jobs,
            "detect",
            "--manifest",
            path(&corpus.join("manifest.jsonl")),
            "--plans",
            path(&plans),
            "-o",
            path(&dets),
        ]));
        outputs.push(std::fs::read(&dets).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "detections depend on --jobs");

    // a parallel synth reproduces the sequential corpus byte for byte
    let corpus_par = dir.path().join("d_par");
    assert_ok(&run(&[
        "--jobs",
        "4",
        "synth",
        "--out",
        path(&corpus_par),
        "--n",
        "12",
        "--alt",
        "uniform:10:110",
        "--seed",
        "21",
    ]));
    assert_eq!(
        std::fs::read(corpus.join("manifest.jsonl")).unwrap(),
        std::fs::read(corpus_par.join("manifest.jsonl")).unwrap()
    );
    assert_eq!(
        std::fs::read(corpus.join("images/scene_00003.pgm")).unwrap(),
        std::fs::read(corpus_par.join("images/scene_00003.pgm")).unwrap()
    );
}

#[test]
fn stats_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("d");
    let plans = dir.path().join("plans.jsonl");
    assert_ok(&run(&[
        "synth",
        "--out",
        path(&corpus),
        "--n",
        "8",
        "--alt",
        "uniform:10:110",
        "--seed",
        "5",
    ]));
    assert_ok(&run(&[
        "plan",
        "--manifest",
        path(&corpus.join("manifest.jsonl")),
        "--camera",
        path(&corpus.join("camera.json")),
        "--ref-m",
        "4.5",
        "--ref-px",
        "32",
        "-o",
        path(&plans),
    ]));

    let csv = dir.path().join("hist.csv");
    let svg = dir.path().join("hist.svg");
    assert_ok(&run(&[
        "stats",
        "--plans",
        path(&plans),
        "--bin-width",
        "128",
        "-o",
        path(&csv),
        "--svg",
        path(&svg),
    ]));

    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("bin_lower_px,count\n"));
    let total: u64 = csv_text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 8);
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
}

#[test]
fn resize_writes_target_sized_images() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("d");
    let plans = dir.path().join("plans.jsonl");
    let out = dir.path().join("resized");
    assert_ok(&run(&[
        "synth",
        "--out",
        path(&corpus),
        "--n",
        "3",
        "--alt",
        "fixed:45",
        "--seed",
        "2",
    ]));
    assert_ok(&run(&[
        "plan",
        "--manifest",
        path(&corpus.join("manifest.jsonl")),
        "--camera",
        path(&corpus.join("camera.json")),
        "--ref-m",
        "4.5",
        "--ref-px",
        "32",
        "-o",
        path(&plans),
    ]));
    assert_ok(&run(&[
        "resize",
        "--manifest",
        path(&corpus.join("manifest.jsonl")),
        "--plans",
        path(&plans),
        "-o",
        path(&out),
    ]));

    let plans = {
        let file = std::fs::File::open(&plans).unwrap();
        adares_core::resize::read_plans::<f64, _>(std::io::BufReader::new(file)).unwrap()
    };
    for plan in &plans {
        let image: adares_core::Raster<f32> = adares_core::Raster::read_pgm(
            &out.join("images").join(format!("{}.pgm", plan.image_id)),
        )
        .unwrap();
        assert_eq!(image.width(), plan.target_width_px);
        assert_eq!(image.height(), plan.target_height_px);
    }
}

#[test]
fn annotate_altitude_fills_missing_values() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("d");
    assert_ok(&run(&[
        "synth",
        "--out",
        path(&corpus),
        "--n",
        "5",
        "--alt",
        "uniform:20:100",
        "--seed",
        "8",
        "--noise",
        "0",
    ]));

    // strip the altitudes
    let manifest_file = std::fs::File::open(corpus.join("manifest.jsonl")).unwrap();
    let mut manifest =
        adares_core::parse_manifest::<f64, _>(std::io::BufReader::new(manifest_file))
            .unwrap()
            .manifest;
    let truth: Vec<f64> = manifest
        .records
        .iter_mut()
        .map(|r| r.altitude_m.take().unwrap().meters())
        .collect();
    let stripped = dir.path().join("stripped.jsonl");
    let mut buf = Vec::new();
    adares_core::write_manifest(&manifest, &mut buf).unwrap();
    std::fs::write(&stripped, buf).unwrap();

    let priors = dir.path().join("priors.json");
    std::fs::write(&priors, r#"[{"class": 0, "meters": 4.5}]"#).unwrap();

    let annotated = dir.path().join("annotated.jsonl");
    assert_ok(&run(&[
        "annotate-altitude",
        "--manifest",
        path(&stripped),
        "--camera",
        path(&corpus.join("camera.json")),
        "--priors",
        path(&priors),
        "-o",
        path(&annotated),
    ]));

    let file = std::fs::File::open(&annotated).unwrap();
    let back = adares_core::parse_manifest::<f64, _>(std::io::BufReader::new(file))
        .unwrap()
        .manifest;
    for (record, expected) in back.records.iter().zip(&truth) {
        let estimated = record.altitude_m.expect("altitude filled").meters();
        assert!(
            (estimated - expected).abs() <= 0.05 * expected,
            "estimated {estimated} vs true {expected}"
        );
    }
}
