use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

use mlpwm::inverter::{operating_amplitude, synthesize_line, ChbTopology, StrategyConfig, StrategyKind};
use mlpwm::spectral::{sample_pattern, spectrum, thd, HarmonicTable};

fn mlpwm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlpwm"))
        .args(args)
        .env_remove("MLPWM_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (headers, rows)
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn out_arg(dir: &TempDir) -> String {
    dir.path().to_str().unwrap().to_string()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(mlpwm(&["--help"]).status.code(), Some(0));
    assert_eq!(mlpwm(&["--version"]).status.code(), Some(0));
    assert_eq!(mlpwm(&["sweep-k", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(mlpwm(&["--bogus"]).status.code(), Some(1));
    assert_eq!(mlpwm(&["synth", "--strategy", "SVPWM"]).status.code(), Some(1));
    let none = mlpwm(&[]);
    assert_eq!(none.status.code(), Some(1));
    assert!(stderr(&none).contains("subcommand"));
}

#[test]
fn out_of_range_k_exits_one_and_cites_range() {
    let dir = TempDir::new().unwrap();
    let o = mlpwm(&["synth", "--k", "1.2", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("carrier.k") && err.contains("[0, 0.95]"), "{err}");
    assert!(!dir.path().join("harmonics.csv").exists());
}

#[test]
fn bad_config_files_exit_one() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("unknown.json", r#"{"carrier": {"m_bar": 15, "truncation": 0.5}}"#, "truncation"),
        ("malformed.json", r#"{"carrier": "#, "config"),
        ("grid.json", r#"{"sweep": {"k_grid": [0.3, 0.99]}}"#, "sweep.k_grid"),
        ("vdc.json", r#"{"topology": {"vdc_per_cell": -75}}"#, "topology.vdc_per_cell"),
        ("ma.json", r#"{"modulating": {"amplitude": 0.0}}"#, "modulating.amplitude"),
    ];
    for (name, text, needle) in cases {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        let o = mlpwm(&["sweep-k", "--config", path.to_str().unwrap(), "--out", &out_arg(&dir)]);
        assert_eq!(o.status.code(), Some(1), "{name}");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let o = mlpwm(&["synth", "--config", "/nonexistent/run.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn single_strategy_compare_exits_one() {
    let dir = TempDir::new().unwrap();
    let o = mlpwm(&["compare", "--strategy", "HIPWM_FMTCt", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at least 2"));
}

#[test]
fn synth_thd_matches_library_exactly() {
    let dir = TempDir::new().unwrap();
    let o = mlpwm(&["synth", "--strategy", "HIPWM_FMTCt", "--k", "0.55", "--m-bar", "15", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let topo = ChbTopology::default();
    let base = StrategyConfig::standard(StrategyKind::HipwmFmtct, 50.0, 1.0, 15, 0.55, None).unwrap();
    let ma = operating_amplitude(&base, &topo, 220.0).unwrap();
    let line = synthesize_line(&base.with_amplitude(ma).unwrap(), &topo).unwrap();
    let record = sample_pattern(&line.pattern, topo.vdc_per_cell(), 65536, 1).unwrap();
    let lib = spectrum(&record, 50).unwrap();

    let (headers, rows) = read_csv(&dir.path().join("harmonics.csv"));
    assert_eq!(headers, ["order", "freq_hz", "amplitude", "percent"]);
    assert_eq!(rows.len(), 50);
    let amps = column(&rows, 2);
    let pcts = column(&rows, 3);
    for (i, e) in lib.entries.iter().enumerate() {
        assert_eq!(rows[i][0].parse::<usize>().unwrap(), e.order);
        assert_eq!(amps[i], e.amplitude, "order {}", e.order);
        assert_eq!(pcts[i], e.percent_of_fundamental, "order {}", e.order);
    }
    let from_csv = HarmonicTable::from_lines(50.0, 0.0, amps.iter().enumerate().map(|(i, &a)| (i + 1, a, 0.0)));
    assert_eq!(thd(&from_csv).unwrap(), thd(&lib).unwrap());
    assert!(stdout(&o).contains(&format!("THD = {:.6} %", lib.thd_percent)));

    let (wh, wave) = read_csv(&dir.path().join("waveform.csv"));
    assert_eq!(wh, ["t", "value"]);
    assert_eq!(wave.len(), 65536);
    for (v, s) in column(&wave, 1).iter().zip(&record.samples) {
        assert_eq!(v, s);
    }
}

#[test]
fn spwm_ii_defaults_give_linear_range_rms() {
    let dir = TempDir::new().unwrap();
    let o = mlpwm(&["synth", "--strategy", "SPWM_II", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("harmonics.csv"));
    let rms = column(&rows, 2)[0] / 2f64.sqrt();
    assert!((rms - 183.7).abs() / 183.7 < 0.02, "{rms}");
}

#[test]
fn sweep_k_table_and_determinism() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let oa = mlpwm(&["sweep-k", "--out", &out_arg(&a)]);
    let ob = mlpwm(&["sweep-k", "--out", &out_arg(&b)]);
    assert_eq!(oa.status.code(), Some(0), "{}", stderr(&oa));
    assert_eq!(ob.status.code(), Some(0));
    let bytes_a = fs::read(a.path().join("sweep_k.csv")).unwrap();
    assert_eq!(bytes_a, fs::read(b.path().join("sweep_k.csv")).unwrap());

    let (headers, rows) = read_csv(&a.path().join("sweep_k.csv"));
    assert_eq!(headers, ["K", "A_M", "t1_ms", "max_mod_order", "thd_pct", "vrms_fund", "risk_score"]);
    let ks = column(&rows, 0);
    assert_eq!(ks, [0.2, 0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.7, 0.8]);
    let published = [44.27778, 55.13363, 70.63823, 81.10183, 94.24778, 111.1513, 133.5116];
    for (am, want) in column(&rows, 1).iter().zip(published) {
        assert!((am - want).abs() / want < 1e-3, "{am} vs {want}");
    }
    for (row, (am, mmo)) in column(&rows, 1).iter().zip(column(&rows, 3)).enumerate() {
        assert!((am * (1.0 - ks[row]) - mmo).abs() < 1e-12 * mmo);
    }
    assert!((column(&rows, 2)[4] - 2.5).abs() < 1e-3);
}

#[test]
fn csv_values_round_trip_through_json_output() {
    let csv_dir = TempDir::new().unwrap();
    let json_dir = TempDir::new().unwrap();
    for (dir, fmt) in [(&csv_dir, "csv"), (&json_dir, "json")] {
        let o = mlpwm(&["compare", "--ma", "0.9", "--format", fmt, "--out", &out_arg(dir)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let (headers, rows) = read_csv(&csv_dir.path().join("compare.csv"));
    let json: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_str(&fs::read_to_string(json_dir.path().join("compare.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(json.len(), 4);
    for (row, rec) in rows.iter().zip(&json) {
        assert_eq!(rec.len(), headers.len());
        assert_eq!(rec["strategy"].as_str().unwrap(), row[0]);
        for (i, h) in headers.iter().enumerate().skip(1) {
            assert_eq!(rec[h.as_str()].as_f64().unwrap(), row[i].parse::<f64>().unwrap(), "{h}");
        }
    }
    // Equal pulse count across the phase-shifted strategies inside the linear range.
    let events = column(&rows, 4);
    assert_eq!(events[1], events[2]);
    assert_eq!(events[2], events[3]);
    let thd = column(&rows, 2);
    assert!(thd[0] > thd[1]);
}

#[test]
fn floats_keep_nine_significant_digits() {
    let dir = TempDir::new().unwrap();
    let o = mlpwm(&["sweep-k", "--samples", "8192", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("sweep_k.csv"));
    for cell in rows.iter().flatten() {
        let mantissa = cell.split('e').next().unwrap();
        let digits = mantissa.chars().filter(char::is_ascii_digit).collect::<String>();
        assert!(digits.trim_start_matches('0').len() >= 9 || cell.parse::<f64>().unwrap() == 0.0, "{cell}");
    }
}

#[test]
fn print_config_round_trips() {
    let dir = TempDir::new().unwrap();
    let first = mlpwm(&["--print-config", "--k", "0.45", "--cells", "3"]);
    assert_eq!(first.status.code(), Some(0));
    let text = stdout(&first);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["carrier"]["k"], 0.45);
    assert_eq!(v["topology"]["cells_per_phase"], 3);
    assert!(v["modulating"]["amplitude"].is_null());

    let path = dir.path().join("resolved.json");
    fs::write(&path, &text).unwrap();
    let again = mlpwm(&["--print-config", "--config", path.to_str().unwrap()]);
    assert_eq!(stdout(&again), text);

    let via_env = Command::new(env!("CARGO_BIN_EXE_mlpwm"))
        .arg("--print-config")
        .env("MLPWM_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(stdout(&via_env), text);
}

#[test]
fn resonance_table_and_risk_report() {
    let dir = TempDir::new().unwrap();
    let o = mlpwm(&["synth", "--strategy", "SPWM_I", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(0));
    let spectrum = dir.path().join("harmonics.csv");
    let o = mlpwm(&["resonance", "--spectrum", spectrum.to_str().unwrap(), "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("breathing mode") && text.contains("risk score"), "{text}");

    let (headers, rows) = read_csv(&dir.path().join("resonances.csv"));
    assert_eq!(headers, ["source", "m", "n", "frequency_hz"]);
    let ring0: f64 = rows
        .iter()
        .find(|r| r[0] == "stator" && r[1] == "0")
        .map(|r| r[3].parse().unwrap())
        .unwrap();
    assert!((ring0 - 9662.0).abs() / 9662.0 < 0.01, "{ring0}");
    assert_eq!(rows.iter().filter(|r| r[0] == "stator").count(), 9);
    assert_eq!(rows.iter().filter(|r| r[0] == "housing").count(), 36);
    assert_eq!(rows.iter().filter(|r| r[0] == "housing_lambda0").count(), 1);

    let (rh, _) = read_csv(&dir.path().join("risk.csv"));
    assert_eq!(rh.len(), 8);
}

#[test]
fn missing_stator_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("motor.json");
    fs::write(&path, r#"{"motor": {"stator": null}}"#).unwrap();
    let o = mlpwm(&["resonance", "--config", path.to_str().unwrap(), "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("motor.stator"));
}

#[test]
fn reproduce_bundle_writes_all_tables() {
    let dir = TempDir::new().unwrap();
    let o = mlpwm(&["reproduce-paper", "--samples", "8192", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["sweep_k.csv", "compare.csv", "resonances.csv", "summary.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("K sweep") && summary.contains("Strategy comparison"));
}
