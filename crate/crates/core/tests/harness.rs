mod common;

use std::process::Command;

use ura_core::sim::*;

fn small() -> RunConfig {
    RunConfig::from_toml_str(
        r#"
        [system]
        slot_len = 24
        bits_per_slot = 8
        parity_bits = [0, 4, 8, 8]
        num_antennas = 50
        ebn0_db = -4.0

        [users]
        active = 20

        [run]
        trials = 200
        "#,
    )
    .unwrap()
}

fn sweep(cfg: &RunConfig, axis: SweepAxis, values: &[f64]) -> Vec<SweepRow> {
    let mut cfg = cfg.clone();
    cfg.sweep = Some(SweepSection { axis, values: values.to_vec() });
    run_sweep(&cfg, std::io::sink()).unwrap()
}

#[test]
fn more_antennas_lower_the_error_rate() {
    let rows = sweep(&small(), SweepAxis::Antennas, &[50.0, 100.0]);
    let (a, b) = (&rows[0].metrics, &rows[1].metrics);
    assert_eq!(a.trials, 200);
    assert!(b.pe < a.pe, "M=50: {}, M=100: {}", a.pe, b.pe);
    // the gap is well outside both intervals
    assert!(a.pe - b.pe > a.ci_half_width + b.ci_half_width);
}

#[test]
fn error_rate_falls_with_ebn0_at_reference_scale() {
    let mut cfg = RunConfig::default();
    cfg.run.trials = 3;
    let rows = sweep(&cfg, SweepAxis::Ebn0Db, &[-6.0, 0.0]);
    assert!(rows[1].metrics.pe < rows[0].metrics.pe, "{:?}", rows.iter().map(|r| r.metrics.pe).collect::<Vec<_>>());
}

#[test]
fn per_trial_counts_are_conserved() {
    let mut cfg = small();
    cfg.run.trials = 40;
    cfg.system.ebn0_db = -7.0;
    let sim = Simulator::new(&cfg).unwrap();
    let (metrics, records) = run_point(&sim).unwrap();
    for r in &records {
        assert!(r.misdetections <= r.targets && r.targets <= r.active());
        assert!(r.false_alarms <= r.decoded.len());
        assert_eq!(r.slot_list_sizes.len(), 4);
    }
    assert!((0.0..=1.0).contains(&metrics.p_md) && (0.0..=1.0).contains(&metrics.p_fa));
    assert_eq!(metrics.pe, metrics.p_md + metrics.p_fa);
}

#[test]
fn ka_sweep_reports_the_swept_value() {
    let mut cfg = small();
    cfg.run.trials = 5;
    let rows = sweep(&cfg, SweepAxis::Ka, &[4.0, 8.0]);
    assert_eq!(rows[0].config.users.active, 4);
    assert_eq!(rows[1].config.users.active, 8);
    assert_eq!(rows[1].metrics.targets, 5 * 8);
}

fn urasim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_urasim")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

#[test]
fn cli_writes_identical_csv_for_identical_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, small().to_toml_string()).unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let status = urasim(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--ebn0-db",
            "-5,-3",
            "--trials",
            "20",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn cli_run_and_analyze() {
    let out = urasim(&["analyze", "--ka", "100,300"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "Ka,J,R_out,sum_rate_bits,entropy_bound_bits,feasible");
    assert!(lines[2].starts_with("300,12,0.25,900,1508."));
    assert!(lines[2].ends_with(",true"));

    let out = urasim(&["run", "--ebn0-db", "1", "--ebn0-db", "2"]);
    assert!(!out.status.success());
    let out = urasim(&["sweep", "--trials", "1"]);
    assert!(!out.status.success());
    let out = urasim(&["run", "--support", "median:3"]);
    assert!(!out.status.success());
}

#[test]
fn shipped_presets_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = RunConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            if cfg.system.slot_len == 100 {
                assert_eq!(cfg.profile().unwrap().payload_bits(), 96, "{}", path.display());
                assert_eq!(cfg.num_slots(), 32);
            }
            seen += 1;
        }
    }
    assert!(seen >= 5);
}
