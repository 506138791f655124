use std::path::Path;
use std::process::{Command, Output};

fn casimir(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn vacuum_sweep_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "vac.json",
        r#"{"materials": ["vacuum", "vacuum"], "separation_m": 1e-6,
            "sweep": {"variable": "temperature", "start": 1, "stop": 300, "points": 4, "spacing": "log"}}"#,
    );
    let o = casimir(&["compute", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("a_m,T_K,tau,F_J_per_m2,P_Pa,S_J_per_K_m2,err_F,err_P,err_S,l_terms_used,flag\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    for r in rows {
        for v in &r[3..9] {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0);
        }
        assert_eq!(r[10], "ok");
    }
}

#[test]
fn config_errors_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\"materials\": [\"Si-static\", \"Si-static\"],\n \"separation_m\": 1e-6,\n \"temperature\": 3}");
    let o = casimir(&["compute", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("temperature"), "{err}");

    let cfg = write(
        dir.path(),
        "bad2.json",
        r#"{"materials": ["Si-static", "unobtainium"], "separation_m": 1e-6, "temperature_K": 3}"#,
    );
    let o = casimir(&["compute", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("materials[1]"));
}

#[test]
fn convergence_failure_exits_3_with_partial_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cap.json",
        r#"{"materials": ["Si-static", "Si-static"], "separation_m": 1e-6, "temperature_K": [300, 1],
            "numerics": {"l_max_cap": 20}}"#,
    );
    let o = casimir(&["compute", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][10], "unconverged:F+P+S");
    assert!(rows[1][6] == "NaN");
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = casimir(&["compute", "--config", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let o = casimir(&["materials", "validate", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn output_file_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"materials": ["ideal-metal", "Si-static"], "separation_m": 1e-6, "temperature_K": 300}"#,
    );
    let o = casimir(&["compute", "--config", &cfg, "--format", "json", "--out", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let row = &v["rows"][0];
    assert!(row["F_J_per_m2"].as_f64().unwrap() < 0.0);
    assert_eq!(row["flag"], "ok");
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "d.json",
        r#"{"materials": ["Si-static", "SiO2-static"], "separation_m": [4e-7, 1e-6],
            "sweep": {"variable": "temperature", "start": 20, "stop": 300, "points": 5}}"#,
    );
    let runs: Vec<Vec<u8>> = ["1", "4", "8"]
        .iter()
        .map(|n| {
            let o = casimir(&["compute", "--config", &cfg, "--threads", n], dir.path());
            assert_eq!(o.status.code(), Some(0));
            o.stdout
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn looser_tolerance_agrees_within_itself() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.json",
        r#"{"materials": ["Si-static", "SiO2-static"], "separation_m": 4e-7, "temperature_K": [30, 300]}"#,
    );
    let parse = |tol: &str| -> Vec<Vec<f64>> {
        let o = casimir(&["compute", "--config", &cfg, "--tol", tol], dir.path());
        assert_eq!(o.status.code(), Some(0));
        data_rows(&stdout(&o))
            .iter()
            .map(|r| r[3..9].iter().map(|v| v.parse().unwrap()).collect())
            .collect()
    };
    let tight = parse("1e-9");
    let loose = parse("2e-9");
    for (a, b) in tight.iter().zip(&loose) {
        for i in 0..3 {
            let combined = a[i + 3] + b[i + 3] + 2e-9 * a[i].abs();
            assert!((a[i] - b[i]).abs() <= combined, "{} vs {}", a[i], b[i]);
        }
    }
}

#[test]
fn compare_asymptotic_reports_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cmp.json",
        r#"{"materials": ["Si-static", "Si-static"], "separation_m": 1e-6,
            "sweep": {"variable": "temperature", "start": 0.5, "stop": 5, "points": 3, "spacing": "log"}}"#,
    );
    let o = casimir(&["compare-asymptotic", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("quantity,T_K,tau,exact_correction,err_exact,asymptotic_correction,rel_diff,flag\n"));
    assert_eq!(data_rows(&text).len(), 6);
    let slope = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("# {key}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((slope("slope_free_energy") - 3.0).abs() < 0.1);
    assert!((slope("slope_pressure") - 4.0).abs() < 0.15);

    let cfg = write(
        dir.path(),
        "dc.json",
        r#"{"materials": ["Si-dc", "Si-dc"], "separation_m": 1e-6, "temperature_K": 1}"#,
    );
    assert_eq!(casimir(&["compare-asymptotic", "--config", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn nernst_check_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "n.json",
        r#"{"materials": ["ideal-metal", "Si-dc"], "separation_m": 1e-6, "temperature_K": 1}"#,
    );
    let o = casimir(&["nernst-check", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# verdict=VIOLATION"), "{text}");
    assert_eq!(data_rows(&text).len(), 5);

    let cfg = write(
        dir.path(),
        "p.json",
        r#"{"materials": ["Si-static", "SiO2-static"], "separation_m": 1e-6, "ladder_K": [6, 4, 2, 1]}"#,
    );
    let o = casimir(&["nernst-check", "--config", &cfg, "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["notes"]["verdict"], "PASS");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);

    // The ladder replaces the temperature grid; compute still needs one.
    let o = casimir(&["compute", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("temperature_K"));
}

#[test]
fn eps_and_material_validation() {
    let dir = tempfile::tempdir().unwrap();
    let o = casimir(&["eps", "--material", "Si-static", "--xi", "6.6e15"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - (1.0 + 10.67 / 2.0)).abs() < 1e-12);
    let o = casimir(&["eps", "--material", "Si-dc", "--xi", "1e14"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = casimir(&["eps", "--material", "Si-dc", "--xi", "1e14", "--T", "300"], dir.path());
    assert_eq!(o.status.code(), Some(0));

    let good = write(dir.path(), "m.json", r#"{"model": "plasma", "omega_p": 1.37e16}"#);
    let o = casimir(&["materials", "validate", &good], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: plasma"));
    let bad = write(dir.path(), "b.json", r#"{"model": "plasma", "omega_p": -1}"#);
    assert_eq!(casimir(&["materials", "validate", &bad], dir.path()).status.code(), Some(2));
}
