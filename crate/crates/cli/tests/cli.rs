use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use qsl_lab::{parse_config, parse_layered, run_scenario, serialize, sweep_parallel};

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("QSL_LAB_WORKERS")
        .output()
        .unwrap()
}

#[test]
fn runs_a_config_file_and_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.ini"),
        "[dephasing-qsl]\n[sweep]\nt = 0:1:3\n",
    )
    .unwrap();
    let out = lab(
        &["run", "c.ini", "--out", "o/x.csv", "--workers", "2"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("o/x.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let meta = std::fs::read_to_string(dir.path().join("o/x.csv.meta")).unwrap();
    assert!(meta.contains("[dephasing-qsl]") && meta.contains("gamma_tolerance"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("bad.ini"), "[dephasing-qsl]\ns = 0\n").unwrap();
    std::fs::write(p.join("unknown.ini"), "[dephasing-qsl]\nspeed = 1\n").unwrap();
    std::fs::write(p.join("ok.ini"), "[dephasing-qsl]\n").unwrap();
    assert_eq!(lab(&["run", "bad.ini"], p).status.code(), Some(2));
    assert_eq!(lab(&["run", "unknown.ini"], p).status.code(), Some(2));
    assert_eq!(
        lab(&["run", "ok.ini", "--workers", "0"], p).status.code(),
        Some(2)
    );
    assert_eq!(lab(&["run", "--preset", "nope"], p).status.code(), Some(2));
    assert_eq!(lab(&["run"], p).status.code(), Some(2));
    assert_eq!(lab(&["run", "missing.ini"], p).status.code(), Some(1));
    // a budget of one ADO cannot hold any hierarchy
    let out = lab(
        &[
            "run",
            "--preset",
            "fig8c",
            "--override",
            "ado_budget=1",
            "--override",
            "sweep.t=0,1",
        ],
        p,
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("temperature = 1"), "{stderr}");
}

#[test]
fn error_names_line_and_key() {
    let err = parse_config("[dephasing-qsl]\nlambda = 0.1\ns = 0\n").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 3") && msg.contains("`s`"), "{msg}");
}

#[test]
fn presets_listing_names_every_figure() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["presets"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fig1a",
        "fig3d",
        "fig5",
        "fig7",
        "fig8d",
        "fig8d-transverse",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn file_keys_override_the_preset() {
    let base = qsl_lab::presets::find("fig1a").unwrap().text;
    let cfg = parse_layered(
        base,
        "[dephasing-qsl]\ntemperature = 3\n[sweep]\nt = 0, 1\n",
        &["omega=2".into()],
    )
    .unwrap();
    assert_eq!(cfg.physics.lambda, 0.2);
    assert_eq!(cfg.physics.temperature, 3.0);
    assert_eq!(cfg.physics.omega, 2.0);
    assert_eq!(cfg.sweep.len(), 1);
    let other = parse_layered(base, "[dephasing-ratio]\n", &[]).unwrap();
    assert_eq!(other.kind.name(), "dephasing-ratio");
    assert_eq!(other.sweep.len(), 2);
}

#[test]
fn serial_and_parallel_match() {
    let cfg = parse_config("[bangbang-qsl]\n[sweep]\nt = 0:1:5\ntemperature = 0.5, 2\n").unwrap();
    let serial = run_scenario(&cfg).unwrap();
    for w in [1, 3] {
        assert_eq!(sweep_parallel(&cfg, w).unwrap(), serial);
    }
}

fn value() -> impl Strategy<Value = f64> {
    (1u32..5000).prop_map(|n| n as f64 / 1000.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(
        kind in prop::sample::select(vec!["dephasing-qsl", "dephasing-ratio", "heom-coherence"]),
        lambda in value(),
        omega_c in value(),
        s in value(),
        temperature in value(),
        lo in 0u32..100,
        span in 1u32..100,
        count in 2usize..50,
        with_sweep in any::<bool>(),
        tol in 1u32..100,
    ) {
        let mut text = format!(
            "[{kind}]\nlambda = {lambda}\nomega_c = {omega_c}\ns = {s}\ntemperature = {temperature}\n"
        );
        if kind.starts_with("heom") {
            text.push_str("tau_d = 1\n");
        }
        if with_sweep && !kind.starts_with("heom") {
            text.push_str(&format!("[sweep]\nt = {}:{}:{count}\n", lo as f64 / 10.0, (lo + span) as f64 / 10.0));
        }
        text.push_str(&format!("[numerics]\nheom_tol = {}e-7\n", tol));
        let cfg = parse_config(&text).unwrap();
        let again = parse_config(&serialize(&cfg)).unwrap();
        prop_assert_eq!(&cfg, &again);
        prop_assert_eq!(serialize(&cfg), serialize(&again));
    }
}
