//! End-to-end tests of the `rbo` binary: configuration plumbing, output
//! contracts (field JSON, CSV headers, sidecars), exit codes, and the
//! byte-level determinism promise. All runs use small grids so the whole
//! file stays fast.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rbo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rbo"))
}

fn run(args: &[&str]) -> Output {
    rbo().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Small-grid arguments shared by most runs.
const SMALL: &[&str] = &["--set", "n=128", "--set", "half_length=32"];

#[test]
fn ground_state_is_deterministic_and_echoes_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = dir.path().join("a");
    let d2 = dir.path().join("b");

    let mut args = vec!["ground-state"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(&["--gamma", "0.05"]);

    let out1 = run(&[args.clone(), vec!["--out-dir", d1.to_str().unwrap()]].concat());
    assert_eq!(code(&out1), 0, "stderr: {}", stderr(&out1));
    let text = stdout(&out1);
    assert!(text.contains("# configuration"), "{text}");
    assert!(text.contains("gamma = 0.05  (flag)"), "{text}");
    assert!(text.contains("n = 128  (flag)"), "{text}");
    assert!(text.contains("c = 1  (default)"), "{text}");
    assert!(text.contains("converged in"), "{text}");

    let out2 = run(&[args, vec!["--out-dir", d2.to_str().unwrap()]].concat());
    assert_eq!(code(&out2), 0);
    assert_eq!(
        fs::read(d1.join("ground_state.json")).unwrap(),
        fs::read(d2.join("ground_state.json")).unwrap(),
        "rerun must reproduce the field byte for byte"
    );

    let meta = read_json(&d1.join("ground_state_meta.json"));
    assert_eq!(meta["tool"], "rbo");
    assert_eq!(meta["command"], "ground-state");
    assert!(meta["results"]["residual_rel"].as_f64().unwrap() <= 1e-10);
    assert!(meta["results"]["iterations"].as_u64().unwrap() >= 1);
    assert!(meta["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    let entry = meta["config"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["key"] == "gamma")
        .unwrap();
    assert_eq!(entry["value"], "0.05");
    assert_eq!(entry["source"], "flag");
}

#[test]
fn config_file_set_and_flags_compose_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sample configuration\ngamma = 0.1\nn = 128\nhalf_length = 32\ntol = 1e-9\n")
        .unwrap();

    let out = run(&[
        "soliton-check",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "tol=1e-8",
        "--gamma",
        "0.05",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("gamma = 0.05  (flag)"), "{text}");
    assert!(text.contains("n = 128  (file)"), "{text}");
    assert!(text.contains("tol = 1e-8  (flag)"), "{text}");
    assert!(text.contains("c = 1  (default)"), "{text}");
}

#[test]
fn configuration_mistakes_exit_2() {
    let cases: &[&[&str]] = &[
        &["ground-state", "--set", "gamm=1"],
        &["ground-state", "--set", "gamma=-0.1"],
        &["ground-state", "--set", "n=100"],
        &["ground-state", "--set", "nonsense"],
        &["converge-gamma"], // empty gamma_list
        &["converge-gamma", "--set", "gamma_list=0.1,0.2"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains("configuration error"), "{args:?}");
    }

    let out = run(&["ground-state", "--set", "gamm=1"]);
    assert!(stderr(&out).contains("unknown key `gamm`"));
}

#[test]
fn unreadable_config_file_exits_4() {
    let out = run(&["ground-state", "--config", "/no/such/file.cfg"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("I/O failure"), "{}", stderr(&out));
}

#[test]
fn soliton_check_reports_the_residual_scale() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["soliton-check"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(&["--out-dir", dir.path().to_str().unwrap()]);
    let out = run(&args);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("relative residual"));

    let meta = read_json(&dir.path().join("soliton_check.json"));
    let rel = meta["results"]["residual_rel"].as_f64().unwrap();
    assert!(rel > 0.0 && rel < 1e-2, "line-profile truncation residual, got {rel}");
    assert!(meta["results"]["functionals"]["V"].as_f64().unwrap() > 0.0);
}

#[test]
fn evolve_round_trips_fields_and_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let gs_dir = dir.path().join("gs");
    let ev_dir = dir.path().join("ev");

    let mut args = vec!["ground-state"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(&["--gamma", "0.05", "--out-dir", gs_dir.to_str().unwrap()]);
    assert_eq!(code(&run(&args)), 0);
    let field = gs_dir.join("ground_state.json");
    let initial = format!("initial={}", field.display());

    let out = run(&[
        "evolve",
        "--set",
        &initial,
        "--set",
        "dt=0.05",
        "--set",
        "t_end=0.2",
        "--set",
        "save_stride=2",
        "--gamma",
        "0.05",
        "--out-dir",
        ev_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let csv = fs::read_to_string(ev_dir.join("evolve_series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,E,V"));
    // dt = 0.05 to t = 0.2 is 4 steps; stride 2 records t = 0, 0.1, 0.2.
    assert_eq!(lines.count(), 3);

    let final_state = read_json(&ev_dir.join("final_state.json"));
    assert_eq!(final_state["format_version"], 1);
    assert_eq!(final_state["grid"]["n"], 128);
    assert_eq!(final_state["samples"].as_array().unwrap().len(), 128);

    // Tampered version: refused with both versions named, exit 4.
    let bumped = dir.path().join("bumped.json");
    let text = fs::read_to_string(&field)
        .unwrap()
        .replace("\"format_version\": 1", "\"format_version\": 3");
    fs::write(&bumped, text).unwrap();
    let out = run(&[
        "evolve",
        "--set",
        &format!("initial={}", bumped.display()),
        "--out-dir",
        ev_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    let msg = stderr(&out);
    assert!(msg.contains("version 3") && msg.contains("version 1"), "{msg}");

    // Off-contract grid: schema mismatch, exit 4.
    let badn = dir.path().join("badn.json");
    fs::write(
        &badn,
        format!(
            "{{\"format_version\": 1, \"grid\": {{\"n\": 100, \"half_length\": 8.0}}, \"samples\": [{}]}}",
            vec!["0.0"; 100].join(",")
        ),
    )
    .unwrap();
    let out = run(&[
        "evolve",
        "--set",
        &format!("initial={}", badn.display()),
        "--out-dir",
        ev_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("schema mismatch"), "{}", stderr(&out));
}

#[test]
fn rotation_rejects_initial_data_with_a_mean_as_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let constant = dir.path().join("constant.json");
    fs::write(
        &constant,
        format!(
            "{{\"format_version\": 1, \"grid\": {{\"n\": 32, \"half_length\": 8.0}}, \"samples\": [{}]}}",
            vec!["1.0"; 32].join(",")
        ),
    )
    .unwrap();
    let out = run(&[
        "evolve",
        "--set",
        &format!("initial={}", constant.display()),
        "--set",
        "dt=0.05",
        "--set",
        "t_end=0.1",
        "--gamma",
        "0.01",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("numerical failure"), "{}", stderr(&out));
}

#[test]
fn stability_emits_the_frozen_csv_contract_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = dir.path().join("a");
    let d2 = dir.path().join("b");

    let mut base = vec!["stability"];
    base.extend_from_slice(SMALL);
    base.extend_from_slice(&[
        "--gamma",
        "0.05",
        "--seed",
        "7",
        "--set",
        "amp=0.01",
        "--set",
        "dt=0.05",
        "--set",
        "t_horizon=0.5",
        "--set",
        "save_stride=2",
    ]);

    let out = run(&[base.clone(), vec!["--out-dir", d1.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("member 0 (seed 7)"));

    let csv = fs::read_to_string(d1.join("stability.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,orbital_distance,shift,E_drift,V_drift"));
    // t = 0, 0.1, 0.2, 0.3, 0.4, 0.5 at stride 2.
    assert_eq!(csv.lines().count(), 7);
    let first_row = csv.lines().nth(1).unwrap();
    assert!(first_row.starts_with("0,"), "{first_row}");

    let out2 = run(&[base, vec!["--out-dir", d2.to_str().unwrap()]].concat());
    assert_eq!(code(&out2), 0);
    assert_eq!(
        fs::read(d1.join("stability.csv")).unwrap(),
        fs::read(d2.join("stability.csv")).unwrap(),
        "stability CSV must be byte-identical on rerun"
    );

    let meta = read_json(&d1.join("stability_meta.json"));
    let members = meta["results"]["members"].as_array().unwrap();
    assert_eq!(members.len(), 1);
    assert_eq!(members[0]["verdict"], "bounded");
    assert_eq!(members[0]["seed"], 7);
}

#[test]
fn ensemble_bytes_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = dir.path().join("par");
    let d2 = dir.path().join("seq");

    let args = |out: &Path| {
        vec![
            "stability".to_string(),
            "--set".into(),
            "n=64".into(),
            "--set".into(),
            "half_length=16".into(),
            "--gamma".into(),
            "0.05".into(),
            "--set".into(),
            "ensemble=3".into(),
            "--set".into(),
            "dt=0.05".into(),
            "--set".into(),
            "t_horizon=0.3".into(),
            "--out-dir".into(),
            out.display().to_string(),
        ]
    };

    let out = rbo().args(args(&d1)).env("RBO_WORKERS", "3").output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let out = rbo().args(args(&d2)).env("RBO_WORKERS", "1").output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    for i in 0..3 {
        let name = format!("stability_{i:03}.csv");
        assert_eq!(
            fs::read(d1.join(&name)).unwrap(),
            fs::read(d2.join(&name)).unwrap(),
            "{name} differs between worker counts"
        );
    }

    let out = rbo()
        .args(["stability", "--set", "n=64", "--set", "half_length=16"])
        .env("RBO_WORKERS", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("RBO_WORKERS"), "{}", stderr(&out));
}

#[test]
fn converge_gamma_emits_ordered_rows_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = dir.path().join("a");
    let d2 = dir.path().join("b");

    let mut base = vec!["converge-gamma"];
    base.extend_from_slice(SMALL);
    base.extend_from_slice(&["--set", "gamma_list=0.2,0.1"]);

    let out = run(&[base.clone(), vec!["--out-dir", d1.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let csv = fs::read_to_string(d1.join("converge_gamma.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "gamma,m,dist_h12,residual,iterations");
    assert_eq!(lines.len(), 3);
    let row = |i: usize| -> Vec<f64> {
        lines[i].split(',').map(|v| v.parse().unwrap()).collect()
    };
    let (first, second) = (row(1), row(2));
    assert_eq!(first[0], 0.2);
    assert_eq!(second[0], 0.1);
    assert!(second[1] < first[1], "m must decrease with gamma");
    assert!(second[2] < first[2], "distance must decrease with gamma");

    let out = run(&[base, vec!["--out-dir", d2.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read(d1.join("converge_gamma.csv")).unwrap(),
        fs::read(d2.join("converge_gamma.csv")).unwrap()
    );
}

#[test]
fn spectrum_certifies_projected_coercivity() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["spectrum"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(&["--gamma", "0.05", "--out-dir", dir.path().to_str().unwrap()]);
    let out = run(&args);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("projected minimum eigenvalue"));

    let meta = read_json(&dir.path().join("spectrum.json"));
    let results = &meta["results"];
    assert!(results["min_eig_projected"].as_f64().unwrap() > 0.0);
    assert!(results["raw_min_eig"].as_f64().unwrap() < 0.0);
    assert!(results["kernel_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(results["degenerate_projection"], false);
}

#[test]
fn help_names_every_subcommand() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in
        ["ground-state", "evolve", "stability", "converge-gamma", "spectrum", "soliton-check"]
    {
        assert!(text.contains(name), "missing {name} in help");
    }
    assert!(text.contains("RBO_WORKERS"));
}
