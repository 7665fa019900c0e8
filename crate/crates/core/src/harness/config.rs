use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{FederationConfig, Method, WeightingMode};
use crate::error::{Result, TopoError};
use crate::model::TrainConfig;
use crate::privacy::DEFAULT_ALPHA_C;
use crate::scenarios::{ScenarioConfig, ScenarioName};

/// Scenario preset plus optional overrides; the seed comes from the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clients: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub informative: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_range: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_rate_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversarial_ids: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip_rate: Option<f64>,
}

impl ScenarioSpec {
    pub fn preset(name: ScenarioName) -> Self {
        Self {
            name,
            clients: None,
            dim: None,
            informative: None,
            size_range: None,
            positive_rate_range: None,
            adversarial_ids: None,
            flip_rate: None,
        }
    }

    pub fn resolve(&self, seed: u64) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::preset(self.name, seed);
        if let Some(k) = self.clients {
            cfg.clients = k;
            // preset adversaries are the last ids; keep them in range
            cfg.adversarial_ids.retain(|&id| id < k);
        }
        cfg.dim = self.dim.unwrap_or(cfg.dim);
        cfg.informative = self.informative.unwrap_or(cfg.informative);
        cfg.size_range = self.size_range.unwrap_or(cfg.size_range);
        cfg.positive_rate_range = self.positive_rate_range.unwrap_or(cfg.positive_rate_range);
        if let Some(ids) = &self.adversarial_ids {
            cfg.adversarial_ids = ids.clone();
        }
        cfg.flip_rate = self.flip_rate.unwrap_or(cfg.flip_rate);
        cfg
    }
}

/// Everything one harness invocation needs. Unknown JSON keys are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    /// Method for single-method runs (`run_experiment`, drift study).
    pub method: Method,
    /// Methods compared by `compare` and `sweep`.
    pub methods: Vec<Method>,
    pub rounds: usize,
    #[serde(rename = "M")]
    pub clusters: usize,
    pub beta_blend: f64,
    pub tau: f64,
    /// Anomaly threshold used by the attack-rate sweep.
    pub sweep_tau: f64,
    pub n_sub: usize,
    #[serde(rename = "L")]
    pub resolution: usize,
    pub lambda_softmax: f64,
    pub weighting_mode: WeightingMode,
    pub train: TrainConfig,
    pub master_seed: u64,
    /// Run seeds; empty means `[master_seed]`.
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub trust_enabled: bool,
    pub exp_factor: bool,
    pub augment: bool,
    pub theta_drift: f64,
    pub drift_lr_multiplier: f64,
    pub refresh_descriptors: bool,
    pub drift_rounds: usize,
    pub attack_rates: Vec<f64>,
    pub alpha_c: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSpec::preset(ScenarioName::Healthcare),
            method: Method::Ptopofl,
            methods: Method::ALL.to_vec(),
            rounds: 15,
            clusters: 2,
            beta_blend: 0.3,
            tau: 2.0,
            sweep_tau: 1.8,
            n_sub: 80,
            resolution: 20,
            lambda_softmax: 1.0,
            weighting_mode: WeightingMode::DescriptorExp,
            train: TrainConfig::default(),
            master_seed: 42,
            seeds: Vec::new(),
            output_dir: PathBuf::from("results"),
            trust_enabled: true,
            exp_factor: true,
            augment: true,
            theta_drift: 1.0,
            drift_lr_multiplier: 1.0,
            refresh_descriptors: false,
            drift_rounds: 20,
            attack_rates: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            alpha_c: DEFAULT_ALPHA_C,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| TopoError::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| TopoError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            TopoError::Config(m) => TopoError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Pins both the scenario and the training seed to `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self.seeds = vec![seed];
        self
    }

    pub fn run_seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![self.master_seed]
        } else {
            self.seeds.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TopoError::Config(m.to_string()));
        if self.rounds == 0 || self.drift_rounds == 0 {
            return bad("rounds and drift_rounds must be at least 1");
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty");
        }
        if self.attack_rates.iter().any(|r| !(0.0..=0.5).contains(r)) {
            return bad("attack rates must lie in [0, 0.5]");
        }
        if !(self.alpha_c >= 0.0) {
            return bad("alpha_c must be non-negative");
        }
        self.scenario.resolve(self.master_seed).validate()?;
        let k = self.scenario.resolve(self.master_seed).clients;
        self.federation(self.method, self.master_seed).validate(k)
    }

    pub fn federation(&self, method: Method, seed: u64) -> FederationConfig {
        FederationConfig {
            method,
            clusters: self.clusters,
            beta_blend: self.beta_blend,
            tau: self.tau,
            n_sub: self.n_sub,
            resolution: self.resolution,
            lambda_softmax: self.lambda_softmax,
            weighting_mode: self.weighting_mode,
            trust_enabled: self.trust_enabled,
            exp_factor: self.exp_factor,
            augment: self.augment,
            theta_drift: self.theta_drift,
            drift_lr_multiplier: self.drift_lr_multiplier,
            refresh_descriptors: self.refresh_descriptors,
            train: self.train.clone(),
            seed,
        }
    }
}
