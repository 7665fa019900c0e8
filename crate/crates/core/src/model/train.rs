use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::data::{LabeledDataset, ModelParams};
use super::logistic::objective;
use crate::error::{Result, TopoError};
use crate::rng::StreamRng;

/// Local optimiser settings shared by all clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub local_epochs: usize,
    pub batch_size: usize,
    /// Inverse regularisation strength `1/C`; weights only.
    pub l2_reg: f64,
    pub prox_mu: f64,
    pub pfedme_lambda: f64,
    pub pfedme_inner_steps: usize,
    pub pfedme_outer_lr: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            local_epochs: 5,
            batch_size: 32,
            l2_reg: 1.0,
            prox_mu: 0.1,
            pfedme_lambda: 15.0,
            pfedme_inner_steps: 5,
            pfedme_outer_lr: 0.05,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TopoError::Config(m.to_string()));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.local_epochs == 0 || self.batch_size == 0 {
            return bad("local_epochs and batch_size must be at least 1");
        }
        if !(self.l2_reg >= 0.0 && self.prox_mu >= 0.0 && self.pfedme_lambda >= 0.0) {
            return bad("regularisation strengths must be non-negative");
        }
        if self.pfedme_inner_steps == 0 || !(self.pfedme_outer_lr > 0.0) {
            return bad("pFedMe inner steps and outer rate must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    Plain,
    /// FedProx: proximal pull towards the round's starting model.
    Prox,
    /// SCAFFOLD with option-II control-variate refresh.
    Scaffold,
    /// pFedMe: Moreau-envelope bi-level update.
    PFedMe,
}

/// SCAFFOLD control variates, flat layout matching [`ModelParams::to_flat`].
#[derive(Debug, Clone, Copy)]
pub struct ControlVariates<'a> {
    pub local: &'a [f64],
    pub global: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct LocalOutcome {
    pub params: ModelParams,
    /// Refreshed local control variate (SCAFFOLD only).
    pub control: Option<Vec<f64>>,
    /// Personalised model θ̂ (pFedMe only).
    pub personalized: Option<ModelParams>,
    pub steps: usize,
}

fn step(params: &mut ModelParams, grad: &[f64], lr: f64) {
    let d = params.dim();
    for (w, g) in params.weights.iter_mut().zip(grad) {
        *w -= lr * g;
    }
    params.bias -= lr * grad[d];
}

/// Batches for one epoch: a seeded permutation cut into chunks, each chunk
/// sorted so that a single full batch is order-independent.
fn epoch_batches(n: usize, batch: usize, rng: &mut StreamRng) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.chunks(batch)
        .map(|c| {
            let mut c = c.to_vec();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Runs local minibatch SGD from `start` and returns the updated model.
pub fn local_update(
    start: &ModelParams,
    data: &LabeledDataset,
    cfg: &TrainConfig,
    mode: UpdateMode,
    control: Option<ControlVariates<'_>>,
    rng: &mut StreamRng,
) -> Result<LocalOutcome> {
    if start.dim() != data.dim() {
        return Err(TopoError::Input(format!(
            "model dimension {} does not match data dimension {}",
            start.dim(),
            data.dim()
        )));
    }
    let p = start.dim() + 1;
    let correction: Option<Vec<f64>> = match (mode, control) {
        (UpdateMode::Scaffold, Some(cv)) => {
            if cv.local.len() != p || cv.global.len() != p {
                return Err(TopoError::Input("control variate length mismatch".into()));
            }
            Some(cv.global.iter().zip(cv.local).map(|(g, l)| g - l).collect())
        }
        (UpdateMode::Scaffold, None) => {
            return Err(TopoError::Input("SCAFFOLD update needs control variates".into()))
        }
        _ => None,
    };
    let n = data.len();
    let lr = cfg.learning_rate;

    let mut params = start.clone();
    let mut personal = start.clone();
    let mut steps = 0usize;
    // Ridge and proximal terms are handled explicitly below for pFedMe.
    let inner_cfg = TrainConfig {
        prox_mu: 0.0,
        ..cfg.clone()
    };
    for _ in 0..cfg.local_epochs {
        for batch in epoch_batches(n, cfg.batch_size, rng) {
            match mode {
                UpdateMode::Plain => {
                    let (_, g) = objective(&params, data, &batch, n, &inner_cfg, None);
                    step(&mut params, &g, lr);
                }
                UpdateMode::Prox => {
                    let (_, g) = objective(&params, data, &batch, n, cfg, Some(start));
                    step(&mut params, &g, lr);
                }
                UpdateMode::Scaffold => {
                    let (_, mut g) = objective(&params, data, &batch, n, &inner_cfg, None);
                    for (gi, ci) in g.iter_mut().zip(correction.as_deref().unwrap_or(&[])) {
                        *gi += ci;
                    }
                    step(&mut params, &g, lr);
                }
                UpdateMode::PFedMe => {
                    let lambda = cfg.pfedme_lambda;
                    let anchor = params.to_flat();
                    for _ in 0..cfg.pfedme_inner_steps {
                        let (_, mut g) = objective(&personal, data, &batch, n, &inner_cfg, None);
                        for ((gi, t), w) in g.iter_mut().zip(personal.to_flat()).zip(&anchor) {
                            *gi += lambda * (t - w);
                        }
                        step(&mut personal, &g, lr);
                    }
                    let pull: Vec<f64> = anchor
                        .iter()
                        .zip(personal.to_flat())
                        .map(|(w, t)| lambda * (w - t))
                        .collect();
                    step(&mut params, &pull, cfg.pfedme_outer_lr);
                }
            }
            steps += 1;
        }
    }
    if !params.is_finite() {
        return Err(TopoError::Input("local update diverged to non-finite parameters".into()));
    }

    let control = match (mode, control) {
        (UpdateMode::Scaffold, Some(cv)) => {
            let denom = lr * steps as f64;
            let s = start.to_flat();
            let e = params.to_flat();
            Some(
                (0..p)
                    .map(|j| cv.local[j] - cv.global[j] + (s[j] - e[j]) / denom)
                    .collect(),
            )
        }
        _ => None,
    };
    Ok(LocalOutcome {
        params,
        control,
        personalized: (mode == UpdateMode::PFedMe).then_some(personal),
        steps,
    })
}
