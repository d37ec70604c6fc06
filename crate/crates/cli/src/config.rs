//! Experiment configuration: JSON files plus flag overrides. After
//! normalization every random quantity carries an explicit seed, and a
//! config round-trips through its file format losslessly.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x0B3A_11AD;

/// Claim ids the verify experiment can run.
pub const KNOWN_CLAIMS: &[&str] = &[
    "commutator-series-identity",
    "number-weight-bound-1",
    "number-weight-bound-2",
    "shell-bound-radial",
    "shell-bound-tangential",
    "shell-bound-coordinate",
    "series-term-bound",
    "shell-comparison",
    "dilation-bound",
    "circle-average-bound",
    "disk-average-bound",
    "tangential-radial-identity",
];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "experiment", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentConfig {
    Verify(VerifyConfig),
    Commutator(CommutatorConfig),
    Cover(CoverRunConfig),
    Constants(ConstantsConfig),
}

fn default_parallelism() -> usize {
    0
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub n: usize,
    /// Claim ids to run; empty means every claim applicable to `n`.
    #[serde(default)]
    pub claims: Vec<String>,
    /// Monomial grid degree for the exact-identity claims.
    #[serde(default = "VerifyConfig::default_grid")]
    pub max_degree: usize,
    #[serde(default = "VerifyConfig::default_kmax")]
    pub k_max: u32,
    #[serde(default = "VerifyConfig::default_tmax")]
    pub t_max: u32,
    /// Seeded random trials per sampled claim.
    #[serde(default = "VerifyConfig::default_trials")]
    pub trials: usize,
    pub seed: Option<u64>,
    /// Generator literal, e.g. "z1^2 - 2*z2"; overrides the random model.
    #[serde(default)]
    pub polynomial: Option<String>,
    /// Random generator degree when no literal is given.
    #[serde(default = "VerifyConfig::default_degree")]
    pub degree: usize,
    /// Sparse support size for the random model; dense when absent.
    #[serde(default)]
    pub sparsity: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl VerifyConfig {
    fn default_grid() -> usize {
        4
    }
    fn default_kmax() -> u32 {
        4
    }
    fn default_tmax() -> u32 {
        4
    }
    fn default_trials() -> usize {
        50
    }
    pub fn defaults(n: usize) -> Self {
        VerifyConfig {
            n,
            claims: Vec::new(),
            max_degree: Self::default_grid(),
            k_max: Self::default_kmax(),
            t_max: Self::default_tmax(),
            trials: Self::default_trials(),
            seed: None,
            polynomial: None,
            degree: 2,
            sparsity: None,
            out: None,
            parallelism: 0,
        }
    }
    fn default_degree() -> usize {
        2
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CommutatorConfig {
    pub n: usize,
    /// Generator literal; "1" gives the full space.
    #[serde(default)]
    pub polynomial: Option<String>,
    #[serde(default = "CommutatorConfig::default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub sparsity: Option<usize>,
    pub seed: Option<u64>,
    /// Max multiplier degrees to sweep.
    #[serde(default = "CommutatorConfig::default_b_list")]
    pub b_list: Vec<usize>,
    #[serde(default = "CommutatorConfig::default_coord")]
    pub i: usize,
    #[serde(default = "CommutatorConfig::default_coord")]
    pub j: usize,
    /// Schatten exponents; empty selects {n, n+1/2, n+1, 2n}.
    #[serde(default)]
    pub schatten: Vec<f64>,
    /// Minimum multiplier degree l.
    #[serde(default)]
    pub min_degree: usize,
    #[serde(default)]
    pub export_matrices: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl CommutatorConfig {
    fn default_degree() -> usize {
        2
    }
    fn default_b_list() -> Vec<usize> {
        vec![10, 14, 18]
    }
    fn default_coord() -> usize {
        1
    }
    pub fn defaults(n: usize) -> Self {
        CommutatorConfig {
            n,
            polynomial: None,
            degree: Self::default_degree(),
            sparsity: None,
            seed: None,
            b_list: Self::default_b_list(),
            i: 1,
            j: if n > 1 { 2 } else { 1 },
            schatten: Vec::new(),
            min_degree: 0,
            export_matrices: false,
            out: None,
            parallelism: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoverRunConfig {
    pub n: usize,
    #[serde(default = "CoverRunConfig::default_r")]
    pub r: f64,
    #[serde(default = "CoverRunConfig::default_c")]
    pub c: f64,
    pub samples: usize,
    #[serde(default = "CoverRunConfig::default_probes")]
    pub probes: usize,
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl CoverRunConfig {
    fn default_r() -> f64 {
        0.5
    }
    fn default_c() -> f64 {
        1e-3
    }
    fn default_probes() -> usize {
        1000
    }
    pub fn defaults(n: usize) -> Self {
        CoverRunConfig {
            n,
            r: Self::default_r(),
            c: Self::default_c(),
            samples: 10_000,
            probes: Self::default_probes(),
            seed: None,
            out: None,
            parallelism: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(default = "ConstantsConfig::default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "ConstantsConfig::default_m_list")]
    pub m_list: Vec<usize>,
    #[serde(default = "ConstantsConfig::default_trials")]
    pub trials: usize,
    #[serde(default = "ConstantsConfig::default_kmax")]
    pub k_max: u32,
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl ConstantsConfig {
    fn default_n_list() -> Vec<usize> {
        vec![1, 2]
    }
    fn default_m_list() -> Vec<usize> {
        vec![1, 2, 3]
    }
    fn default_trials() -> usize {
        100
    }
    fn default_kmax() -> u32 {
        4
    }
    pub fn defaults() -> Self {
        ConstantsConfig {
            n_list: Self::default_n_list(),
            m_list: Self::default_m_list(),
            trials: Self::default_trials(),
            k_max: Self::default_kmax(),
            seed: None,
            out: None,
            parallelism: 0,
        }
    }
}

impl ExperimentConfig {
    /// Fill every omitted seed with the fixed default so reruns are
    /// reproducible, and validate the field ranges.
    pub fn normalize(&mut self) -> Result<(), CliError> {
        match self {
            ExperimentConfig::Verify(cfg) => {
                cfg.seed.get_or_insert(DEFAULT_SEED);
                if cfg.n == 0 {
                    return Err(CliError::config("n", "dimension must be at least 1"));
                }
                if let Some(ref lit) = cfg.polynomial {
                    bergman_core::parse::parse_poly(lit, cfg.n)
                        .map_err(|e| CliError::config("polynomial", e.to_string()))?;
                }
                if cfg.sparsity == Some(0) {
                    return Err(CliError::config("sparsity", "needs at least one term"));
                }
                for claim in &cfg.claims {
                    if !KNOWN_CLAIMS.contains(&claim.as_str()) {
                        return Err(CliError::config(
                            "claims",
                            format!("unknown claim `{claim}`; known: {KNOWN_CLAIMS:?}"),
                        ));
                    }
                }
            }
            ExperimentConfig::Commutator(cfg) => {
                cfg.seed.get_or_insert(DEFAULT_SEED);
                if cfg.n == 0 {
                    return Err(CliError::config("n", "dimension must be at least 1"));
                }
                if cfg.b_list.is_empty() {
                    return Err(CliError::config("b_list", "need at least one degree"));
                }
                if cfg.i < 1 || cfg.i > cfg.n {
                    return Err(CliError::config("i", "coordinate out of range"));
                }
                if cfg.j < 1 || cfg.j > cfg.n {
                    return Err(CliError::config("j", "coordinate out of range"));
                }
                if let Some(ref lit) = cfg.polynomial {
                    let p = bergman_core::parse::parse_poly(lit, cfg.n)
                        .map_err(|e| CliError::config("polynomial", e.to_string()))?;
                    if p.is_zero() {
                        return Err(CliError::config("polynomial", "generator must be nonzero"));
                    }
                }
                if cfg.schatten.iter().any(|&q| !(q > 0.0)) {
                    return Err(CliError::config("schatten", "exponents must be positive"));
                }
            }
            ExperimentConfig::Cover(cfg) => {
                cfg.seed.get_or_insert(DEFAULT_SEED);
                if cfg.n == 0 {
                    return Err(CliError::config("n", "dimension must be at least 1"));
                }
                if cfg.samples == 0 {
                    return Err(CliError::config("samples", "need at least one sample"));
                }
                bergman_core::covering::CoverConfig::new(cfg.r, cfg.c)
                    .map_err(|e| CliError::config("c", e.to_string()))?;
            }
            ExperimentConfig::Constants(cfg) => {
                cfg.seed.get_or_insert(DEFAULT_SEED);
                if cfg.n_list.is_empty() || cfg.m_list.is_empty() {
                    return Err(CliError::config("n_list", "need at least one (n, m) pair"));
                }
                if cfg.trials == 0 {
                    return Err(CliError::config("trials", "need at least one trial"));
                }
            }
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        let out = match self {
            ExperimentConfig::Verify(c) => &c.out,
            ExperimentConfig::Commutator(c) => &c.out,
            ExperimentConfig::Cover(c) => &c.out,
            ExperimentConfig::Constants(c) => &c.out,
        };
        out.clone().unwrap_or_else(|| PathBuf::from("bergman-out"))
    }

    pub fn parallelism(&self) -> usize {
        match self {
            ExperimentConfig::Verify(c) => c.parallelism,
            ExperimentConfig::Commutator(c) => c.parallelism,
            ExperimentConfig::Cover(c) => c.parallelism,
            ExperimentConfig::Constants(c) => c.parallelism,
        }
    }
}
