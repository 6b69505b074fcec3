mod common;

use std::fs;
use std::path::Path;

use common::fixture;
use disco_core::runner::{execute, run, scan, Method, ReplayConfig, RunConfig, ScanConfig, SectorConfig, SystemConfig};
use disco_core::HubbardSpec;

fn dimer_config(u: f64, method: Method) -> RunConfig {
    let mut c = RunConfig::new(SystemConfig::Hubbard(HubbardSpec::new(2, 1, 1.0, u)), method);
    c.sector = Some(SectorConfig { n_alpha: 1, n_beta: 1 });
    c
}

/// Copies a fixture so the FCI cache lands in a scratch directory.
fn staged(dir: &Path, name: &str) -> std::path::PathBuf {
    let dst = dir.join(format!("{name}.fcidump"));
    fs::copy(fixture(&format!("{name}.fcidump")), &dst).unwrap();
    dst
}

#[test]
fn fci_on_the_dimer_matches_closed_form() {
    for u in [0.0, 2.0, 8.0] {
        let out = execute(&dimer_config(u, Method::Fci)).unwrap();
        let exact = (u - (u * u + 16.0_f64).sqrt()) / 2.0;
        assert!((out.summary.energy - exact).abs() < 1e-12);
        assert_eq!(out.summary.dimension, 4);
        assert!(out.summary.s_squared.abs() < 1e-10);
    }
}

#[test]
fn disco_run_writes_outputs_and_replay_reproduces_them() {
    let dir = tempfile::tempdir().unwrap();
    let path = staged(dir.path(), "h4_linear_0.90");
    let mut c = RunConfig::new(SystemConfig::Fcidump { path: path.clone(), frozen: 0 }, Method::Disco);
    c.optimizer.m_operators = 4;
    c.optimizer.restarts = 2;
    c.optimizer.max_macro_cycles = 3;
    c.output = dir.path().join("run");
    let out = run(&c).unwrap();
    for f in ["summary.json", "ansatz.txt", "records.jsonl"] {
        assert!(c.output.join(f).is_file(), "{f}");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(c.output.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_operators"], 4);
    assert_eq!(summary["restart_seeds"].as_array().unwrap().len(), 2);
    let fci = out.summary.fci_energy.unwrap();
    let expected = common::reference_value("h4_linear_0.90", "fci_energy");
    assert!((fci - expected).abs() < 1e-8);
    assert!(out.summary.error.unwrap() >= -1e-12);
    assert!(path.with_file_name("h4_linear_0.90.fcidump.fci.json").is_file());

    let mut r = c.clone();
    r.method = Method::Replay;
    r.replay = Some(ReplayConfig {
        ansatz: c.output.join("ansatz.txt"),
        relax: false,
    });
    r.output = dir.path().join("replay");
    let rep = run(&r).unwrap();
    assert!((rep.summary.energy - out.summary.energy).abs() < 1e-12);
    assert_eq!(rep.ansatz, out.ansatz);
}

#[test]
fn zero_operator_search_reports_reference_energy() {
    let mut c = dimer_config(4.0, Method::Disco);
    c.optimizer.m_operators = 0;
    let out = execute(&c).unwrap();
    assert_eq!(out.summary.energy, out.summary.reference_energy);
    assert_eq!(out.summary.certified, Some(true));
    assert_eq!(out.summary.n_operators, 0);
    assert_eq!(out.summary.cnot_count, 0);
}

#[test]
fn u_scan_double_occupancy_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::new(SystemConfig::Hubbard(HubbardSpec::new(3, 1, 1.0, 0.0)), Method::Fci);
    c.sector = Some(SectorConfig { n_alpha: 2, n_beta: 1 });
    c.output = dir.path().to_path_buf();
    c.scan = Some(ScanConfig {
        u_values: vec![0.0, 1.0, 4.0, 16.0],
        ..Default::default()
    });
    let table = scan(&c, true).unwrap();
    let docc: Vec<f64> = table.rows.iter().map(|r| r.double_occupancy.unwrap()).collect();
    for w in docc.windows(2) {
        assert!(w[1] < w[0], "{docc:?}");
    }
    assert_eq!(table.npe, Some(0.0));
    let csv = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "point,label,parameter,energy,fci_energy,error,s_squared,double_occupancy,n_operators,cnot_count,certified,status"
    );
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn single_point_scan_equals_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = staged(dir.path(), "h2_0.74");
    let mut c = RunConfig::new(SystemConfig::Fcidump { path: path.clone(), frozen: 0 }, Method::Disco);
    c.optimizer.m_operators = 1;
    c.output = dir.path().join("out");
    let single = execute(&c).unwrap();
    c.scan = Some(ScanConfig {
        fcidumps: vec![path],
        ..Default::default()
    });
    let table = scan(&c, false).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.rows[0].energy, Some(single.summary.energy));
    assert!((table.rows[0].parameter - 0.74).abs() < 1e-15);
    assert_eq!(table.rows[0].status, "ok");
}

#[test]
fn warm_started_scan_replays_previous_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["h4_linear_scan_0.90", "h4_linear_scan_1.10"].iter().map(|n| staged(dir.path(), n)).collect();
    let mut c = RunConfig::new(SystemConfig::Fcidump { path: paths[0].clone(), frozen: 0 }, Method::Disco);
    c.optimizer.m_operators = 3;
    c.optimizer.restarts = 1;
    c.optimizer.max_macro_cycles = 2;
    c.output = dir.path().join("scan");
    c.scan = Some(ScanConfig {
        fcidumps: paths,
        warm_start: true,
        ..Default::default()
    });
    let table = scan(&c, true).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows.iter().all(|r| r.status == "ok" && r.n_operators == Some(3)));
    assert_eq!(table.rows[1].certified, None);
    assert!(dir.path().join("scan/point_001/ansatz.txt").is_file());
}

#[test]
fn config_parsing_rejects_unknown_keys_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = "method = \"fci\"\n[system.hubbard]\nlx = 2\nly = 1\nt_hop = 1.0\nu_rep = 2.0\n[sector]\nn_alpha = 1\nn_beta = 1\n";
    let c = RunConfig::from_toml_str(good, dir.path()).unwrap();
    assert_eq!(c.output, dir.path().join("disco-out"));
    let typo = good.replace("u_rep", "u_repulsion");
    assert!(RunConfig::from_toml_str(&typo, dir.path()).is_err());
    let extra = format!("{good}[optimizer]\nbogus = 1\n");
    assert!(RunConfig::from_toml_str(&extra, dir.path()).is_err());
    let missing = "method = \"disco\"\n[system.fcidump]\npath = \"nope.fcidump\"\n";
    assert!(RunConfig::from_toml_str(missing, dir.path()).is_err());
    let no_sector = "method = \"fci\"\n[system.hubbard]\nlx = 2\nly = 1\nt_hop = 1.0\nu_rep = 2.0\n";
    assert!(RunConfig::from_toml_str(no_sector, dir.path()).is_err());
}

#[test]
fn shipped_configurations_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let c = RunConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(RunConfig::from_toml_str(&c.to_toml().unwrap(), Path::new("/")).unwrap(), c);
            n += 1;
        }
    }
    assert!(n >= 4);
}
