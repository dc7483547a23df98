use std::path::Path;
use std::process::Command;

use repcoh_cli::config::{load_config, parse_config};
use repcoh_cli::figures::{figure, preset_text, FIGURE_IDS};
use repcoh_cli::sweep::{rows_table, run_sweep, Mode, SweepSpec};
use repcoh_cli::verify::{verify, Level, Status, VerifyOptions};

fn repcoh() -> Command {
    Command::new(env!("CARGO_BIN_EXE_repcoh"))
}

const CONFIG: &str = r#"{
  "schema": 1,
  "id": "probe",
  "scenario": {
    "bath_unit": { "temperature": 0.2 },
    "interaction": { "f1": 0.4242640687119285, "f2": 0.6 },
    "collision": { "n_max": 3000 }
  }
}"#;

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("probe.json");
    std::fs::write(&path, CONFIG).unwrap();
    path
}

#[test]
fn presets_round_trip_through_serde() {
    for id in FIGURE_IDS {
        let run = parse_config(preset_text(id).unwrap(), id).unwrap();
        let text = serde_json::to_string_pretty(&run).unwrap();
        assert_eq!(parse_config(&text, "again").unwrap(), run, "{id}");
    }
}

#[test]
fn single_point_sweep_gives_one_row() {
    let run = parse_config(CONFIG, "inline").unwrap();
    let spec = SweepSpec::parse_arg("temperature=0.2:0.2:1").unwrap();
    let rows = run_sweep(&run, &spec, Mode::Analytic).unwrap();
    assert_eq!(rows.len(), 1);
    let csv = rows_table(&run, &spec, Mode::Analytic, &rows).to_csv();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn sweep_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("sweep{k}.csv"));
        let status = repcoh()
            .args(["sweep", "--config"])
            .arg(&cfg)
            .args(["--sweep", "cluster_size=1,2,3", "--mode", "collision", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        assert!(repcoh_cli::table::meta_path(&out).exists());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 4);
    assert!(data[0].starts_with("scenario,value,C_ss_analytic,C_ss_sim"));
    assert!(text.contains(&format!("# config-sha256 {}", load_config(&cfg).unwrap().hash())));
}

#[test]
fn config_errors_exit_with_usage_status() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{ "schema": 1, "scenario": { "target": { "frequency": -1 }, "interaction": { "f1": 0.1, "f2": 0.2 } } }"#).unwrap();
    let out = repcoh().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scenario.target.frequency"));
    let out = repcoh().args(["figure", "fig9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_without_sweep_prints_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = repcoh().args(["--seed", "7", "run", "--mode", "analytic", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 2);
    assert!(data[1].starts_with("probe,,0.238973"), "{}", data[1]);
}

#[test]
fn perturbed_decay_rate_breaks_the_consistency_check() {
    let report = verify(&VerifyOptions { level: Level::Fast, gamma_scale: 1.001 });
    assert_eq!(report.get("4").unwrap().status, Status::Fail);
    let pristine = verify(&VerifyOptions { level: Level::Fast, gamma_scale: 1.0 });
    assert_eq!(pristine.get("4").unwrap().status, Status::Pass);
}

#[test]
fn verify_json_report_marks_skipped_checks() {
    let out = repcoh().args(["verify", "--fast", "--json"]).output().unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let results = report["results"].as_array().unwrap();
    assert!(results.iter().any(|r| r["id"] == "1" && r["status"] == "skip"));
    assert!(results.iter().any(|r| r["id"] == "2" && r["status"] == "pass"));
}

fn header(id: &str) -> Vec<String> {
    let (_, t) = figure(id, Mode::Analytic).unwrap();
    t.columns
}

#[test]
fn figure_presets_carry_the_plotted_columns() {
    assert_eq!(header("fig1c"), ["collision", "t", "C_N1", "C_N2", "C_N3"]);
    for id in ["fig2a", "fig4a"] {
        let h = header(id);
        for c in ["N", "temperature", "C_ss", "C_ss_limit", "P_ss", "C_ss_collision"] {
            assert!(h.iter().any(|x| x == c), "{id}: {c}");
        }
    }
    assert!(header("fig5").iter().any(|c| c == "C_collision"));
    assert!(header("fig3a").iter().any(|c| c == "ratio"));
}

#[test]
fn figure_command_writes_data_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let status = repcoh().args(["figure", "fig5", "--decimate", "5", "--out"]).arg(dir.path()).status().unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.path().join("fig5.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    // 125 collision-grid samples, every fifth kept plus the last
    assert_eq!(rows.len(), 26);
    let last: Vec<&str> = rows[rows.len() - 1].split(',').collect();
    assert_eq!(last.len(), 14);
    assert!(last.iter().all(|v| !v.is_empty()));
    assert!(dir.path().join("fig5.csv.meta.json").exists());
}
