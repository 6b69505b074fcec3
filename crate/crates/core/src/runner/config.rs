use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::hamiltonian::HubbardSpec;
use crate::optimizer::OptimizerConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemConfig {
    Fcidump {
        path: PathBuf,
        #[serde(default)]
        frozen: usize,
    },
    Hubbard(HubbardSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorConfig {
    pub n_alpha: usize,
    pub n_beta: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Disco,
    Adapt,
    Fci,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaptConfig {
    pub max_operators: usize,
    pub selection_tolerance: f64,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            max_operators: 200,
            selection_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayConfig {
    pub ansatz: PathBuf,
    /// Re-relax the amplitudes with the operator order held fixed.
    #[serde(default)]
    pub relax: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// One FCIDUMP per point; the template's frozen count applies to all.
    pub fcidumps: Vec<PathBuf>,
    /// Hubbard `U` values applied to the template lattice.
    pub u_values: Vec<f64>,
    /// Start each point from the previous point's ansatz with amplitudes re-relaxed.
    pub warm_start: bool,
    pub workers: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            fcidumps: Vec::new(),
            u_values: Vec::new(),
            warm_start: false,
            workers: 1,
        }
    }
}

/// One job: a system, a sector, a method and its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    /// Required for Hubbard systems; FCIDUMP systems default to the header sector.
    #[serde(default)]
    pub sector: Option<SectorConfig>,
    pub method: Method,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub cost_model: CostModel,
    #[serde(default)]
    pub adapt: AdaptConfig,
    #[serde(default)]
    pub replay: Option<ReplayConfig>,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Compute the exact ground state for error reporting.
    #[serde(default = "default_true")]
    pub compute_fci: bool,
    /// Cache exact energies next to FCIDUMP inputs.
    #[serde(default = "default_true")]
    pub fci_cache: bool,
}

fn default_output() -> PathBuf {
    PathBuf::from("disco-out")
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    pub fn new(system: SystemConfig, method: Method) -> Self {
        Self {
            system,
            sector: None,
            method,
            optimizer: OptimizerConfig::default(),
            cost_model: CostModel::default(),
            adapt: AdaptConfig::default(),
            replay: None,
            scan: None,
            output: default_output(),
            compute_fci: true,
            fci_cache: true,
        }
    }

    /// Parses TOML; relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolve_paths(base_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let SystemConfig::Fcidump { path, .. } = &mut self.system {
            fix(path);
        }
        if let Some(r) = &mut self.replay {
            fix(&mut r.ansatz);
        }
        if let Some(s) = &mut self.scan {
            s.fcidumps.iter_mut().for_each(fix);
        }
        fix(&mut self.output);
    }

    /// Checks everything that can be checked without building the Hamiltonian.
    pub fn validate(&self) -> Result<()> {
        match &self.system {
            SystemConfig::Hubbard(spec) => {
                spec.validate()?;
                if self.sector.is_none() {
                    return Err(Error::Config("Hubbard systems require a [sector] table".into()));
                }
            }
            SystemConfig::Fcidump { path, .. } => {
                if !path.is_file() {
                    return Err(Error::Config(format!("FCIDUMP not found: {}", path.display())));
                }
            }
        }
        self.optimizer.validate()?;
        match self.method {
            Method::Replay => match &self.replay {
                None => return Err(Error::Config("method = \"replay\" requires a [replay] table".into())),
                Some(r) if !r.ansatz.is_file() => {
                    return Err(Error::Config(format!("ansatz file not found: {}", r.ansatz.display())))
                }
                _ => {}
            },
            Method::Adapt => {
                if !(self.adapt.selection_tolerance > 0.0) {
                    return Err(Error::Config("adapt.selection_tolerance must be positive".into()));
                }
            }
            Method::Disco | Method::Fci => {}
        }
        if let Some(scan) = &self.scan {
            if !scan.fcidumps.is_empty() && !scan.u_values.is_empty() {
                return Err(Error::Config("a scan lists either fcidumps or u_values, not both".into()));
            }
            if !scan.u_values.is_empty() && !matches!(self.system, SystemConfig::Hubbard(_)) {
                return Err(Error::Config("u_values scans require a Hubbard system".into()));
            }
            if !scan.fcidumps.is_empty() && !matches!(self.system, SystemConfig::Fcidump { .. }) {
                return Err(Error::Config("fcidumps scans require an FCIDUMP system".into()));
            }
            if let Some(p) = scan.fcidumps.iter().find(|p| !p.is_file()) {
                return Err(Error::Config(format!("FCIDUMP not found: {}", p.display())));
            }
            if scan.workers == 0 {
                return Err(Error::Config("scan.workers must be at least 1".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HUBBARD: &str = r#"
method = "fci"
output = "out"

[system.hubbard]
lx = 2
ly = 1
t_hop = 1.0
u_rep = 4.0
orbital_basis = "site"

[sector]
n_alpha = 1
n_beta = 1

[optimizer]
m_operators = 3
rng_seed = 7
"#;

    #[test]
    fn parses_hubbard_and_resolves_output() {
        let cfg = RunConfig::from_toml_str(HUBBARD, Path::new("/tmp/base")).unwrap();
        assert_eq!(cfg.method, Method::Fci);
        assert_eq!(cfg.output, PathBuf::from("/tmp/base/out"));
        assert_eq!(cfg.optimizer.m_operators, 3);
        assert_eq!(cfg.optimizer.bh_steps_per_cycle, OptimizerConfig::default().bh_steps_per_cycle);
        match cfg.system {
            SystemConfig::Hubbard(s) => assert_eq!(s.u_rep, 4.0),
            _ => panic!("expected hubbard"),
        }
    }

    #[test]
    fn unknown_keys_are_errors() {
        let typo = HUBBARD.replace("rng_seed", "rng_sed");
        assert!(matches!(RunConfig::from_toml_str(&typo, Path::new(".")), Err(Error::Config(_))));
        let top = format!("bogus = 1\n{HUBBARD}");
        assert!(RunConfig::from_toml_str(&top, Path::new(".")).is_err());
    }

    #[test]
    fn method_specific_validation() {
        let no_sector = HUBBARD.replace("[sector]\nn_alpha = 1\nn_beta = 1\n", "");
        assert!(RunConfig::from_toml_str(&no_sector, Path::new(".")).is_err());
        let replay = HUBBARD.replace("method = \"fci\"", "method = \"replay\"");
        assert!(RunConfig::from_toml_str(&replay, Path::new(".")).is_err());
        let bad_tol = HUBBARD.replace("rng_seed = 7", "grad_tolerance = -1.0");
        assert!(RunConfig::from_toml_str(&bad_tol, Path::new(".")).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::from_toml_str(HUBBARD, Path::new("/tmp")).unwrap();
        let text = cfg.to_toml().unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
