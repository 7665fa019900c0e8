use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate_cluster, blend_clusters, intra_cluster_weights, softmax_cluster_weights, WeightingMode};
use super::cluster::{cluster_clients, ClusterAssignment};
use super::drift::{topological_drift, SignatureHistory};
use super::trust::{trust_scores, TrustReport};
use crate::error::{Result, TopoError};
use crate::model::{
    accuracy, auc_roc, augment_features, local_update, predict_proba, AugmentStats, ControlVariates, LabeledDataset,
    ModelParams, TrainConfig, UpdateMode, AUGMENT_LEN,
};
use crate::rng::{purpose, stream};
use crate::tda::{cloud_topology, descriptor_from_diagram, PointCloud, TopoDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ptopofl,
    Fedavg,
    Fedprox,
    Scaffold,
    Pfedme,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Ptopofl, Method::Fedavg, Method::Fedprox, Method::Scaffold, Method::Pfedme];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ptopofl => "ptopofl",
            Method::Fedavg => "fedavg",
            Method::Fedprox => "fedprox",
            Method::Scaffold => "scaffold",
            Method::Pfedme => "pfedme",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = TopoError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| TopoError::Config(format!("unknown method '{s}'")))
    }
}

/// Server and client settings for one federated run.
#[derive(Debug, Clone, PartialEq)]
pub struct FederationConfig {
    pub method: Method,
    pub clusters: usize,
    pub beta_blend: f64,
    pub tau: f64,
    pub n_sub: usize,
    pub resolution: usize,
    pub lambda_softmax: f64,
    pub weighting_mode: WeightingMode,
    pub trust_enabled: bool,
    /// Keep the `exp(-‖φ̂_k − φ̂_C‖)` factor in the intra-cluster weights.
    pub exp_factor: bool,
    /// Append descriptor statistics to client features (all methods).
    pub augment: bool,
    pub theta_drift: f64,
    pub drift_lr_multiplier: f64,
    /// Recompute signatures every round instead of reusing round 0's.
    pub refresh_descriptors: bool,
    pub train: TrainConfig,
    pub seed: u64,
}

impl Default for FederationConfig {
    fn default() -> Self {
        Self {
            method: Method::Ptopofl,
            clusters: 2,
            beta_blend: 0.3,
            tau: 2.0,
            n_sub: 80,
            resolution: 20,
            lambda_softmax: 1.0,
            weighting_mode: WeightingMode::DescriptorExp,
            trust_enabled: true,
            exp_factor: true,
            augment: true,
            theta_drift: 1.0,
            drift_lr_multiplier: 1.0,
            refresh_descriptors: false,
            train: TrainConfig::default(),
            seed: 0,
        }
    }
}

impl FederationConfig {
    pub fn validate(&self, clients: usize) -> Result<()> {
        self.train.validate()?;
        let bad = |m: String| Err(TopoError::Config(m));
        if clients < 2 {
            return bad(format!("need at least 2 clients, got {clients}"));
        }
        if self.clusters == 0 || self.clusters > clients {
            return bad(format!("cluster count {} must lie in 1..={clients}", self.clusters));
        }
        if !(0.0..=1.0).contains(&self.beta_blend) {
            return bad(format!("beta_blend {} outside [0, 1]", self.beta_blend));
        }
        if self.n_sub < 2 || self.resolution == 0 {
            return bad("n_sub must be ≥ 2 and the Betti resolution ≥ 1".into());
        }
        if !(self.lambda_softmax >= 0.0) || !self.tau.is_finite() {
            return bad("lambda_softmax must be ≥ 0 and tau finite".into());
        }
        if !(self.theta_drift >= 0.0) || !(self.drift_lr_multiplier > 0.0) {
            return bad("theta_drift must be ≥ 0 and drift_lr_multiplier > 0".into());
        }
        Ok(())
    }

    fn needs_topology(&self) -> bool {
        self.augment || self.method == Method::Ptopofl
    }
}

/// One client's raw (unaugmented) train and test data.
#[derive(Debug, Clone)]
pub struct ClientData {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

/// A client's descriptor and the subsample size it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientTopology {
    pub descriptor: TopoDescriptor,
    pub points_used: usize,
}

/// Descriptor of a client's training features, subsampled with the stream
/// keyed by `(seed, client, round)`.
pub fn client_topology(
    train: &LabeledDataset,
    n_sub: usize,
    resolution: usize,
    seed: u64,
    client: usize,
    round: usize,
) -> Result<ClientTopology> {
    let cloud = PointCloud::new(train.features().to_vec())?;
    let mut rng = stream(&[seed, client as u64, round as u64, purpose::SUBSAMPLE]);
    let topo = cloud_topology(&cloud, n_sub, &mut rng)?;
    Ok(ClientTopology {
        descriptor: descriptor_from_diagram(&topo.diagram, resolution),
        points_used: topo.points_used,
    })
}

/// Descriptors for every client at `round`, computed in parallel.
pub fn compute_topologies(clients: &[ClientData], cfg: &FederationConfig, round: usize) -> Result<Vec<ClientTopology>> {
    clients
        .par_iter()
        .enumerate()
        .map(|(k, c)| client_topology(&c.train, cfg.n_sub, cfg.resolution, cfg.seed, k, round))
        .collect()
}

/// What the server decided in one round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundSummary {
    pub round: usize,
    /// Cluster label per client (empty for baselines).
    pub clusters: Vec<usize>,
    /// Trust per client (empty for baselines).
    pub trust: Vec<f64>,
    pub flagged: Vec<usize>,
    /// Drift per client (empty for baselines).
    pub drift: Vec<f64>,
    /// Re-clustering scheduled for the next round.
    pub recluster: bool,
}

/// Pooled and per-client test metrics of the serving models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub auc_global: Option<f64>,
    pub acc_global: f64,
    pub per_client_auc: Vec<Option<f64>>,
}

struct Scaffold {
    global: Vec<f64>,
    local: Vec<Vec<f64>>,
}

/// Server plus simulated clients, advanced one round at a time.
pub struct Federation {
    cfg: FederationConfig,
    clients: Vec<ClientData>,
    topology: Vec<ClientTopology>,
    train_inputs: Vec<LabeledDataset>,
    test_inputs: Vec<LabeledDataset>,
    global: ModelParams,
    cluster_models: Vec<ModelParams>,
    assignment: Option<ClusterAssignment>,
    trust: TrustReport,
    history: SignatureHistory,
    signatures: Vec<TopoDescriptor>,
    drift: Vec<f64>,
    recluster: bool,
    boosted: Vec<bool>,
    scaffold: Option<Scaffold>,
    personalized: Vec<Option<ModelParams>>,
    round: usize,
}

impl Federation {
    pub fn new(clients: Vec<ClientData>, cfg: FederationConfig) -> Result<Self> {
        cfg.validate(clients.len())?;
        let topology = if cfg.needs_topology() {
            compute_topologies(&clients, &cfg, 0)?
        } else {
            Vec::new()
        };
        Self::with_topology(clients, topology, cfg)
    }

    /// Like [`Federation::new`] but reuses round-0 descriptors computed by
    /// [`compute_topologies`] with the same seed, subsample size and resolution.
    pub fn with_topology(clients: Vec<ClientData>, topology: Vec<ClientTopology>, cfg: FederationConfig) -> Result<Self> {
        cfg.validate(clients.len())?;
        let k = clients.len();
        let dim = clients[0].train.dim();
        if clients.iter().any(|c| c.train.dim() != dim || c.test.dim() != dim) {
            return Err(TopoError::Input("clients disagree on feature dimension".into()));
        }
        if cfg.needs_topology() && topology.len() != k {
            return Err(TopoError::Input(format!("{} descriptors for {k} clients", topology.len())));
        }
        let model_dim = if cfg.augment { dim + AUGMENT_LEN } else { dim };
        let mut fed = Self {
            train_inputs: Vec::with_capacity(k),
            test_inputs: Vec::with_capacity(k),
            global: ModelParams::zeros(model_dim),
            cluster_models: Vec::new(),
            assignment: None,
            trust: TrustReport::neutral(k),
            history: SignatureHistory::new(k),
            signatures: Vec::new(),
            drift: Vec::new(),
            recluster: false,
            boosted: vec![false; k],
            scaffold: (cfg.method == Method::Scaffold).then(|| Scaffold {
                global: vec![0.0; model_dim + 1],
                local: vec![vec![0.0; model_dim + 1]; k],
            }),
            personalized: vec![None; k],
            round: 0,
            clients,
            topology,
            cfg,
        };
        for c in 0..k {
            let (train, test) = fed.inputs_for(c)?;
            fed.train_inputs.push(train);
            fed.test_inputs.push(test);
        }
        Ok(fed)
    }

    fn inputs_for(&self, k: usize) -> Result<(LabeledDataset, LabeledDataset)> {
        let c = &self.clients[k];
        if !self.cfg.augment {
            return Ok((c.train.clone(), c.test.clone()));
        }
        let t = &self.topology[k];
        let stats = AugmentStats::from_descriptor(&t.descriptor, c.train.centroid(), t.points_used);
        Ok((augment_features(&c.train, &stats)?, augment_features(&c.test, &stats)?))
    }

    pub fn config(&self) -> &FederationConfig {
        &self.cfg
    }

    pub fn num_clients(&self) -> usize {
        self.clients.len()
    }

    /// Rounds completed so far.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn global_model(&self) -> &ModelParams {
        &self.global
    }

    pub fn cluster_models(&self) -> &[ModelParams] {
        &self.cluster_models
    }

    pub fn assignment(&self) -> Option<&ClusterAssignment> {
        self.assignment.as_ref()
    }

    pub fn trust(&self) -> &TrustReport {
        &self.trust
    }

    pub fn history(&self) -> &SignatureHistory {
        &self.history
    }

    /// Raw descriptors recorded in the latest pTopoFL round.
    pub fn signatures(&self) -> &[TopoDescriptor] {
        &self.signatures
    }

    pub fn topology(&self) -> &[ClientTopology] {
        &self.topology
    }

    pub fn client_sizes(&self) -> Vec<usize> {
        self.clients.iter().map(|c| c.train.len()).collect()
    }

    /// The model client `k` would serve predictions with.
    pub fn serving_model(&self, k: usize) -> &ModelParams {
        match (self.cfg.method, &self.assignment) {
            (Method::Ptopofl, Some(a)) => &self.cluster_models[a.label(k)],
            (Method::Pfedme, _) => self.personalized[k].as_ref().unwrap_or(&self.global),
            _ => &self.global,
        }
    }

    /// Runs the configured method for one round.
    pub fn step(&mut self) -> Result<RoundSummary> {
        match self.cfg.method {
            Method::Ptopofl => self.run_round(),
            _ => self.baseline_round(),
        }
    }

    fn client_cfg(&self, k: usize) -> TrainConfig {
        let mut cfg = self.cfg.train.clone();
        if self.boosted[k] {
            cfg.learning_rate *= self.cfg.drift_lr_multiplier;
        }
        if self.cfg.method != Method::Fedprox {
            cfg.prox_mu = 0.0;
        }
        cfg
    }

    fn training_rng(&self, k: usize) -> crate::rng::StreamRng {
        stream(&[self.cfg.seed, k as u64, self.round as u64, purpose::SHUFFLE])
    }

    fn size_weights(&self) -> Vec<f64> {
        let sizes = self.client_sizes();
        let total: usize = sizes.iter().sum();
        sizes.iter().map(|&n| n as f64 / total as f64).collect()
    }

    /// One pTopoFL round: local updates from each client's cluster model,
    /// then clustering (round 0 or after drift), trust, weighted
    /// aggregation, blending and signature tracking.
    pub fn run_round(&mut self) -> Result<RoundSummary> {
        if self.cfg.method != Method::Ptopofl {
            return Err(TopoError::Config(format!("run_round needs ptopofl, configured {}", self.cfg.method)));
        }
        let k = self.num_clients();
        let starts: Vec<&ModelParams> = (0..k)
            .map(|c| match &self.assignment {
                Some(a) => &self.cluster_models[a.label(c)],
                None => &self.global,
            })
            .collect();
        let updated: Vec<ModelParams> = (0..k)
            .into_par_iter()
            .map(|c| {
                let out = local_update(
                    starts[c],
                    &self.train_inputs[c],
                    &self.client_cfg(c),
                    UpdateMode::Plain,
                    None,
                    &mut self.training_rng(c),
                )?;
                Ok(out.params)
            })
            .collect::<Result<_>>()?;

        let descs: Vec<TopoDescriptor> = self.topology.iter().map(|t| t.descriptor.clone()).collect();
        if self.assignment.is_none() || self.recluster {
            self.assignment = Some(cluster_clients(&descs, self.cfg.clusters)?);
            self.recluster = false;
        }
        let assignment = self.assignment.clone().expect("assigned above");
        self.trust = if self.cfg.trust_enabled {
            trust_scores(&descs, self.cfg.tau)?
        } else {
            TrustReport::neutral(k)
        };
        let sizes = self.client_sizes();
        let weights = match self.cfg.weighting_mode {
            WeightingMode::DescriptorExp => {
                intra_cluster_weights(&descs, &sizes, &self.trust.trust, &assignment, self.cfg.exp_factor)?
            }
            WeightingMode::WassersteinSoftmax => {
                softmax_cluster_weights(&descs, &sizes, &self.trust.trust, &assignment, self.cfg.lambda_softmax)?
            }
        };
        let mut raw = Vec::with_capacity(assignment.num_clusters());
        for c in 0..assignment.num_clusters() {
            let members = assignment.members(c);
            let models: Vec<&ModelParams> = members.iter().map(|&i| &updated[i]).collect();
            let w: Vec<f64> = members.iter().map(|&i| weights[i]).collect();
            raw.push(aggregate_cluster(&models, &w)?);
        }
        let cluster_sizes = assignment.cluster_sizes();
        self.global = blend_clusters(&raw, &cluster_sizes, 1.0)?
            .into_iter()
            .next()
            .expect("at least one cluster");
        self.cluster_models = blend_clusters(&raw, &cluster_sizes, self.cfg.beta_blend)?;

        self.track_drift()?;
        self.round += 1;
        Ok(RoundSummary {
            round: self.round - 1,
            clusters: assignment.labels().to_vec(),
            trust: self.trust.trust.clone(),
            flagged: self.trust.flagged.clone(),
            drift: self.drift.clone(),
            recluster: self.recluster,
        })
    }

    /// Records this round's signatures and schedules re-clustering for
    /// clients whose drift exceeds the threshold.
    fn track_drift(&mut self) -> Result<()> {
        let fresh = if self.cfg.refresh_descriptors && self.round > 0 {
            Some(compute_topologies(&self.clients, &self.cfg, self.round)?)
        } else {
            None
        };
        let current = fresh.as_deref().unwrap_or(&self.topology);
        self.history
            .record(current.iter().map(|t| t.descriptor.normalized()).collect())?;
        self.signatures = current.iter().map(|t| t.descriptor.clone()).collect();
        self.drift = (0..self.num_clients())
            .map(|c| topological_drift(&self.history, c))
            .collect::<Result<_>>()?;
        let drifted: Vec<usize> = (0..self.num_clients())
            .filter(|&c| self.drift[c] > self.cfg.theta_drift)
            .collect();
        if let (false, Some(fresh)) = (drifted.is_empty(), fresh) {
            self.recluster = true;
            for c in drifted {
                self.topology[c] = fresh[c].clone();
                let (train, test) = self.inputs_for(c)?;
                self.train_inputs[c] = train;
                self.test_inputs[c] = test;
                self.boosted[c] = true;
            }
        }
        Ok(())
    }

    /// One round of FedAvg, FedProx, SCAFFOLD or pFedMe.
    pub fn baseline_round(&mut self) -> Result<RoundSummary> {
        let mode = match self.cfg.method {
            Method::Fedavg => UpdateMode::Plain,
            Method::Fedprox => UpdateMode::Prox,
            Method::Scaffold => UpdateMode::Scaffold,
            Method::Pfedme => UpdateMode::PFedMe,
            Method::Ptopofl => {
                return Err(TopoError::Config("ptopofl is not a baseline method".into()));
            }
        };
        let k = self.num_clients();
        let outcomes: Vec<_> = (0..k)
            .into_par_iter()
            .map(|c| {
                let cv = self.scaffold.as_ref().map(|s| ControlVariates {
                    local: &s.local[c],
                    global: &s.global,
                });
                local_update(
                    &self.global,
                    &self.train_inputs[c],
                    &self.client_cfg(c),
                    mode,
                    cv,
                    &mut self.training_rng(c),
                )
            })
            .collect::<Result<_>>()?;
        let models: Vec<&ModelParams> = outcomes.iter().map(|o| &o.params).collect();
        self.global = aggregate_cluster(&models, &self.size_weights())?;
        if let Some(s) = self.scaffold.as_mut() {
            for (c, out) in outcomes.iter().enumerate() {
                let new = out.control.as_ref().expect("scaffold update returns a control variate");
                for ((g, n), o) in s.global.iter_mut().zip(new).zip(&s.local[c]) {
                    *g += (n - o) / k as f64;
                }
                s.local[c] = new.clone();
            }
        }
        if self.cfg.method == Method::Pfedme {
            self.personalized = outcomes.into_iter().map(|o| o.personalized).collect();
        }
        self.round += 1;
        Ok(RoundSummary {
            round: self.round - 1,
            clusters: Vec::new(),
            trust: Vec::new(),
            flagged: Vec::new(),
            drift: Vec::new(),
            recluster: false,
        })
    }

    /// Scores every client's test set with its serving model.
    pub fn evaluate(&self) -> Evaluation {
        let mut scores = Vec::new();
        let mut labels = Vec::new();
        let mut per_client_auc = Vec::with_capacity(self.num_clients());
        for (k, test) in self.test_inputs.iter().enumerate() {
            let s = predict_proba(self.serving_model(k), test.features());
            per_client_auc.push(auc_roc(&s, test.labels()));
            scores.extend(s);
            labels.extend_from_slice(test.labels());
        }
        Evaluation {
            auc_global: auc_roc(&scores, &labels),
            acc_global: accuracy(&scores, &labels, 0.5),
            per_client_auc,
        }
    }
}
