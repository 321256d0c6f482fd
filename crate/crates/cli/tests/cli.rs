use std::path::Path;
use std::process::Command;

fn velopaoi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_velopaoi"))
}

fn data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(String::from)
        .collect()
}

#[test]
fn meta_writes_two_byte_stable_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("run");
    let run = || {
        let status = velopaoi()
            .args(["meta", "--scenario", "ground", "--trials", "300", "--seed", "9", "--out"])
            .arg(&stem)
            .status()
            .unwrap();
        // A 300-trial estimate may or may not meet the tolerance.
        assert!(matches!(status.code(), Some(0 | 1)), "{status:?}");
        let a = std::fs::read(dir.path().join("run_analysis.csv")).unwrap();
        let s = std::fs::read(dir.path().join("run_simulation.csv")).unwrap();
        (a, s)
    };
    let first = run();
    assert_eq!(data_rows(&dir.path().join("run_analysis.csv")).len(), 99);
    assert_eq!(data_rows(&dir.path().join("run_simulation.csv")).len(), 99);
    let second = run();
    assert_eq!(first, second);
    let text = String::from_utf8(first.1).unwrap();
    for key in ["# seed: 9", "# trials: 300", "# fingerprint: ", "# scenario_hash: ", "x,y_sim,sim_ci_halfwidth"] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn ground_correlation_starts_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("rho");
    let status = velopaoi()
        .args(["correlation", "--scenario", "ground", "--trials", "200", "--velocities", "0,10,20,40,80", "--out"])
        .arg(&stem)
        .status()
        .unwrap();
    assert!(matches!(status.code(), Some(0 | 1)));
    let rows = data_rows(&dir.path().join("rho_analysis.csv"));
    assert_eq!(rows.len(), 5);
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 1.0).abs() < 0.02, "{first:?}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let status = velopaoi().args(["meta", "--scenario", "lunar"]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[system]\nwarp = 9\n").unwrap();
    let status = velopaoi().args(["meta", "--scenario"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let status = velopaoi().arg("teleport").status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn tolerance_decides_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tolerance: f64| {
        let cfg = dir.path().join("handover.toml");
        std::fs::write(
            &cfg,
            format!(
                "preset = \"ground\"\n[scenario]\nvelocities = [100.0, 400.0]\ntrials = 2000\ntolerance = {tolerance}\nout = \"{}\"\n",
                dir.path().join("ho").display()
            ),
        )
        .unwrap();
        velopaoi().args(["handover-check", "--scenario"]).arg(&cfg).status().unwrap().code()
    };
    assert_eq!(run(0.5), Some(0));
    assert_eq!(run(0.0), Some(1));
    assert_eq!(data_rows(&dir.path().join("ho_simulation.csv")).len(), 2);
}
