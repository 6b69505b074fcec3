//! Batch front-end: resolved run configurations, single runs and scans.

mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{AdaptConfig, Method, ReplayConfig, RunConfig, ScanConfig, SectorConfig, SystemConfig};

use crate::ansatz::{energy, evaluate_state, Ansatz};
use crate::cost::{cnot_count, CostModel};
use crate::error::{Error, Result};
use crate::fock::SectorBasis;
use crate::hamiltonian::{
    build_fcidump_hamiltonian, build_hubbard_hamiltonian, freeze_core, s_squared_expectation, FcidumpData, HubbardSpec,
    SectorHamiltonian,
};
use crate::linalg::expectation;
use crate::optimizer::{adapt_vqe, disco_vqe, local_minimize, write_records, AdaptTermination, MoveRecord, RestartSummary};
use crate::oracle::{fci_ground_state, EigenConfig};
use crate::pool::{OperatorPool, PoolTables};

/// A built system: Hamiltonian, pool tables and lattice metadata.
pub struct System {
    pub ham: SectorHamiltonian,
    pub pool: OperatorPool,
    pub tables: PoolTables,
    pub hubbard: Option<HubbardSpec>,
    /// Hash identifying the exact problem, used by the FCI cache.
    pub content_hash: String,
}

impl System {
    pub fn basis(&self) -> &SectorBasis {
        self.ham.basis()
    }

    pub fn reference(&self) -> usize {
        self.basis().aufbau_index()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn build_system(system: &SystemConfig, sector: Option<SectorConfig>) -> Result<System> {
    match system {
        SystemConfig::Fcidump { path, frozen } => {
            let bytes = fs::read(path)?;
            let data = crate::hamiltonian::parse_fcidump(bytes.as_slice())?;
            let data: FcidumpData = if *frozen > 0 { freeze_core(&data, *frozen)? } else { data };
            let (na, nb) = match sector {
                Some(s) => (s.n_alpha, s.n_beta),
                None => data.sector()?,
            };
            let basis = SectorBasis::new(data.n_orbitals(), na, nb)?;
            let ham = build_fcidump_hamiltonian(&data, &basis)?;
            let mut h = Sha256::new();
            h.update(&bytes);
            h.update(format!("frozen={frozen};sector={na},{nb}").as_bytes());
            finish(ham, None, hex(&h.finalize()))
        }
        SystemConfig::Hubbard(spec) => {
            let s = sector.ok_or_else(|| Error::Config("Hubbard systems require a sector".into()))?;
            let basis = SectorBasis::new(spec.n_sites(), s.n_alpha, s.n_beta)?;
            let ham = build_hubbard_hamiltonian(spec, &basis)?;
            let mut h = Sha256::new();
            h.update(serde_json::to_string(spec)?.as_bytes());
            h.update(format!("sector={},{}", s.n_alpha, s.n_beta).as_bytes());
            finish(ham, Some(spec.clone()), hex(&h.finalize()))
        }
    }
}

fn finish(ham: SectorHamiltonian, hubbard: Option<HubbardSpec>, content_hash: String) -> Result<System> {
    let pool = OperatorPool::new(ham.basis().n_orbitals())?;
    let tables = PoolTables::new(&pool, ham.basis())?;
    Ok(System {
        ham,
        pool,
        tables,
        hubbard,
        content_hash,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FciCache {
    content_hash: String,
    energy: f64,
}

fn cache_path(fcidump: &Path) -> PathBuf {
    let mut name = fcidump.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".fci.json");
    fcidump.with_file_name(name)
}

/// Exact ground energy, read from or written to the cache next to an FCIDUMP.
pub fn fci_energy(system: &System, config: &RunConfig) -> Result<f64> {
    let cache = match (&config.system, config.fci_cache) {
        (SystemConfig::Fcidump { path, .. }, true) => Some(cache_path(path)),
        _ => None,
    };
    if let Some(c) = &cache {
        if let Ok(text) = fs::read_to_string(c) {
            if let Ok(entry) = serde_json::from_str::<FciCache>(&text) {
                if entry.content_hash == system.content_hash {
                    return Ok(entry.energy);
                }
            }
        }
    }
    let e = fci_ground_state(&system.ham, &EigenConfig::default())?.ground_energy();
    if let Some(c) = &cache {
        let entry = FciCache {
            content_hash: system.content_hash.clone(),
            energy: e,
        };
        // a read-only fixture directory only costs the cache
        let _ = write_atomic(c, serde_json::to_string_pretty(&entry)?.as_bytes());
    }
    Ok(e)
}

/// Writes through a temporary file in the same directory and renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Structured summary of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: Method,
    pub n_orbitals: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub dimension: usize,
    pub energy: f64,
    pub reference_energy: f64,
    pub fci_energy: Option<f64>,
    pub error: Option<f64>,
    pub s_squared: f64,
    pub double_occupancy: Option<f64>,
    pub n_operators: usize,
    pub cnot_count: u64,
    pub cost_model: CostModel,
    pub certified: Option<bool>,
    pub grad_norm: Option<f64>,
    pub adapt_termination: Option<AdaptTermination>,
    pub adapt_energies: Option<Vec<f64>>,
    pub seed: u64,
    pub restart_seeds: Vec<RestartSummary>,
    pub pool_fingerprint: String,
    pub elapsed_seconds: f64,
    pub config: RunConfig,
}

/// Everything a run produces, before it is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub ansatz: Ansatz,
    pub records: Vec<MoveRecord>,
}

fn observables(system: &System, state: &[f64]) -> Result<(f64, Option<f64>)> {
    let s2 = s_squared_expectation(state, system.basis())?;
    let docc = match &system.hubbard {
        Some(spec) => Some(expectation(&spec.double_occupancy_operator(system.basis())?, state)?),
        None => None,
    };
    Ok((s2, docc))
}

/// Executes the configured method without touching the filesystem (other than the FCI cache).
pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let system = build_system(&config.system, config.sector)?;
    execute_on(config, &system, None)
}

/// Like [`execute`] on a prebuilt system; `warm` replaces the replay ansatz.
pub fn execute_on(config: &RunConfig, system: &System, warm: Option<&Ansatz>) -> Result<RunOutput> {
    let start = Instant::now();
    let reference = system.reference();
    let ref_energy = energy(&Ansatz::empty(reference), &system.ham, &system.tables)?;
    let mut fci = None;
    let mut certified = None;
    let mut grad_norm = None;
    let mut adapt_termination = None;
    let mut adapt_energies = None;
    let mut restart_seeds = Vec::new();
    let mut records = Vec::new();

    let (ansatz, e, state) = match (config.method, warm) {
        (Method::Fci, _) => {
            let r = fci_ground_state(&system.ham, &EigenConfig::default())?;
            fci = Some(r.ground_energy());
            (Ansatz::empty(reference), r.ground_energy(), r.ground_vector)
        }
        (Method::Replay, _) | (_, Some(_)) => {
            let a = match warm {
                Some(a) => a.clone(),
                None => {
                    let r = config.replay.as_ref().expect("validated");
                    Ansatz::from_text(&fs::read_to_string(&r.ansatz)?, &system.pool)?
                }
            };
            let relax = warm.is_some() || config.replay.as_ref().is_some_and(|r| r.relax);
            let a = if relax {
                let s = local_minimize(&a, &system.ham, &system.tables, &config.optimizer)?;
                grad_norm = Some(s.grad_norm);
                s.ansatz
            } else {
                a
            };
            let e = energy(&a, &system.ham, &system.tables)?;
            let st = evaluate_state(&a, &system.tables)?;
            (a, e, st)
        }
        (Method::Disco, None) => {
            let b = disco_vqe(&system.ham, &system.tables, reference, &config.optimizer)?;
            certified = Some(b.certified);
            grad_norm = Some(b.grad_norm);
            restart_seeds = b.restarts;
            records = b.move_history;
            let st = evaluate_state(&b.ansatz, &system.tables)?;
            (b.ansatz, b.energy, st)
        }
        (Method::Adapt, None) => {
            let r = adapt_vqe(
                &system.ham,
                &system.tables,
                reference,
                config.adapt.max_operators,
                config.adapt.selection_tolerance,
                &config.optimizer,
            )?;
            adapt_termination = Some(r.termination);
            adapt_energies = Some(r.energies.clone());
            let st = evaluate_state(&r.ansatz, &system.tables)?;
            (r.ansatz, r.energy, st)
        }
    };
    if fci.is_none() && config.compute_fci {
        fci = Some(fci_energy(system, config)?);
    }
    let (s2, docc) = observables(system, &state)?;
    let basis = system.basis();
    let summary = RunSummary {
        method: config.method,
        n_orbitals: basis.n_orbitals(),
        n_alpha: basis.n_alpha(),
        n_beta: basis.n_beta(),
        dimension: basis.len(),
        energy: e,
        reference_energy: ref_energy,
        fci_energy: fci,
        error: fci.map(|f| e - f),
        s_squared: s2,
        double_occupancy: docc,
        n_operators: ansatz.len(),
        cnot_count: cnot_count(&ansatz, basis.n_orbitals(), &config.cost_model),
        cost_model: config.cost_model.clone(),
        certified,
        grad_norm,
        adapt_termination,
        adapt_energies,
        seed: config.optimizer.rng_seed,
        restart_seeds,
        pool_fingerprint: system.pool.fingerprint(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        config: config.clone(),
    };
    Ok(RunOutput {
        summary,
        ansatz,
        records,
    })
}

/// Writes `summary.json`, `ansatz.txt` and `records.jsonl` into `dir`.
pub fn write_output(out: &RunOutput, pool: &OperatorPool, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_atomic(&dir.join("summary.json"), serde_json::to_string_pretty(&out.summary)?.as_bytes())?;
    write_atomic(&dir.join("ansatz.txt"), out.ansatz.to_text(pool).as_bytes())?;
    let mut buf = Vec::new();
    write_records(&out.records, &mut buf)?;
    write_atomic(&dir.join("records.jsonl"), &buf)?;
    Ok(())
}

/// Executes a configuration and writes its result files to `config.output`.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let system = build_system(&config.system, config.sector)?;
    let out = execute_on(config, &system, None)?;
    write_output(&out, &system.pool, &config.output)?;
    Ok(out)
}

/// One row of a scan table. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub point: usize,
    pub label: String,
    pub parameter: f64,
    pub energy: Option<f64>,
    pub fci_energy: Option<f64>,
    pub error: Option<f64>,
    pub s_squared: Option<f64>,
    pub double_occupancy: Option<f64>,
    pub n_operators: Option<usize>,
    pub cnot_count: Option<u64>,
    pub certified: Option<bool>,
    pub status: String,
}

#[derive(Debug, Clone)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    /// Max minus min error over points that report one.
    pub npe: Option<f64>,
}

pub fn non_parallelity_error(errors: &[f64]) -> Option<f64> {
    if errors.is_empty() {
        return None;
    }
    let max = errors.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = errors.iter().cloned().fold(f64::INFINITY, f64::min);
    Some(max - min)
}

impl ScanTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn point_configs(template: &RunConfig, scan: &ScanConfig) -> Vec<(String, f64, RunConfig)> {
    let mut out = Vec::new();
    if !scan.fcidumps.is_empty() {
        let frozen = match &template.system {
            SystemConfig::Fcidump { frozen, .. } => *frozen,
            _ => 0,
        };
        for (i, p) in scan.fcidumps.iter().enumerate() {
            let mut c = template.clone();
            c.system = SystemConfig::Fcidump {
                path: p.clone(),
                frozen,
            };
            let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            // parameter: trailing number of the file stem, else the index
            let param = label.rsplit('_').next().and_then(|s| s.parse().ok()).unwrap_or(i as f64);
            out.push((label, param, c));
        }
    } else if let SystemConfig::Hubbard(spec) = &template.system {
        for &u in &scan.u_values {
            let mut c = template.clone();
            c.system = SystemConfig::Hubbard(HubbardSpec { u_rep: u, ..spec.clone() });
            out.push((format!("U={u}"), u, c));
        }
    } else {
        out.push(("point".into(), 0.0, template.clone()));
    }
    for (i, (_, _, c)) in out.iter_mut().enumerate() {
        c.scan = None;
        c.output = template.output.join(format!("point_{i:03}"));
    }
    out
}

fn row_from(point: usize, label: String, parameter: f64, res: Result<RunOutput>) -> (ScanRow, Option<Ansatz>) {
    match res {
        Ok(o) => {
            let s = &o.summary;
            (
                ScanRow {
                    point,
                    label,
                    parameter,
                    energy: Some(s.energy),
                    fci_energy: s.fci_energy,
                    error: s.error,
                    s_squared: Some(s.s_squared),
                    double_occupancy: s.double_occupancy,
                    n_operators: Some(s.n_operators),
                    cnot_count: Some(s.cnot_count),
                    certified: s.certified,
                    status: "ok".into(),
                },
                Some(o.ansatz),
            )
        }
        Err(e) => (
            ScanRow {
                point,
                label,
                parameter,
                energy: None,
                fci_energy: None,
                error: None,
                s_squared: None,
                double_occupancy: None,
                n_operators: None,
                cnot_count: None,
                certified: None,
                status: format!("error: {e}"),
            },
            None,
        ),
    }
}

fn run_point(c: &RunConfig, warm: Option<&Ansatz>, write: bool) -> Result<RunOutput> {
    c.validate()?;
    let system = build_system(&c.system, c.sector)?;
    let out = execute_on(c, &system, warm)?;
    if write {
        write_output(&out, &system.pool, &c.output)?;
    }
    Ok(out)
}

/// Runs every scan point; failures become rows with an error status.
///
/// With `warm_start`, point `k > 0` replays point `k - 1`'s ansatz with
/// re-relaxed amplitudes and points run in order.
pub fn scan(template: &RunConfig, write: bool) -> Result<ScanTable> {
    template.validate()?;
    let scan_cfg = template.scan.clone().unwrap_or_default();
    let points = point_configs(template, &scan_cfg);
    let mut rows = Vec::with_capacity(points.len());
    if scan_cfg.warm_start {
        let mut prev: Option<Ansatz> = None;
        for (i, (label, param, c)) in points.into_iter().enumerate() {
            let (row, a) = row_from(i, label, param, run_point(&c, prev.as_ref(), write));
            if a.is_some() {
                prev = a;
            }
            rows.push(row);
        }
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(scan_cfg.workers)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        rows = pool.install(|| {
            points
                .into_par_iter()
                .enumerate()
                .map(|(i, (label, param, c))| row_from(i, label, param, run_point(&c, None, write)).0)
                .collect()
        });
    }
    let errors: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
    let table = ScanTable {
        npe: non_parallelity_error(&errors),
        rows,
    };
    if write {
        write_atomic(&template.output.join("scan.csv"), table.to_csv()?.as_bytes())?;
        let npe = serde_json::json!({ "npe": table.npe, "points": table.rows.len() });
        write_atomic(&template.output.join("scan_summary.json"), serde_json::to_string_pretty(&npe)?.as_bytes())?;
    }
    Ok(table)
}
