use std::path::Path;

use clr_lab::numerics::{QuadratureSpec, SearchSpec};
use clr_lab::report::Format;
use serde::Deserialize;

use crate::Failure;

/// Contents of a `--config` file. Every field is optional; flags given on the
/// command line win over the file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub output_format: Option<Format>,
    pub seed: Option<u64>,
    pub digits: Option<usize>,
    pub quadrature: Option<QuadratureSpec>,
    pub search: Option<SearchSpec>,
    pub n_cap: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub format: Format,
    pub digits: usize,
    pub provenance: bool,
    pub quadrature: QuadratureSpec,
    pub search: SearchSpec,
    pub n_cap: u32,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            format: Format::Md,
            digits: 6,
            provenance: false,
            quadrature: QuadratureSpec::default(),
            search: SearchSpec::default(),
            n_cap: clr_lab::constants::N_CAP,
        }
    }
}

pub struct Overrides {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub digits: Option<usize>,
    pub provenance: bool,
    pub quad_rel_tol: Option<f64>,
    pub restarts: Option<usize>,
}

impl CliConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self, Failure> {
        let mut cfg = CliConfig::default();
        if let Some(q) = file.quadrature {
            cfg.quadrature = q;
        }
        if let Some(s) = file.search {
            cfg.search = s;
        }
        if let Some(n) = file.n_cap {
            cfg.n_cap = n;
        }
        cfg.format = flags.format.or(file.output_format).unwrap_or(cfg.format);
        cfg.digits = flags.digits.or(file.digits).unwrap_or(cfg.digits);
        if let Some(seed) = flags.seed.or(file.seed) {
            cfg.search.seed = seed;
        }
        if let Some(t) = flags.quad_rel_tol {
            cfg.quadrature.rel_tol = t;
        }
        if let Some(r) = flags.restarts {
            cfg.search.restarts = r;
        }
        cfg.provenance = flags.provenance;
        if cfg.digits == 0 || cfg.digits > 17 {
            return Err(Failure::input(format!("--digits must be in 1..=17, got {}", cfg.digits)));
        }
        if cfg.n_cap < 3 {
            return Err(Failure::input(format!("n_cap must be >= 3, got {}", cfg.n_cap)));
        }
        cfg.quadrature.validate()?;
        cfg.search.validate()?;
        Ok(cfg)
    }
}
