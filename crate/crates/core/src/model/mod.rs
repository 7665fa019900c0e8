//! Local logistic-regression learner and its federated update rules.

mod augment;
mod data;
mod logistic;
mod metrics;
mod train;

pub use augment::{augment_features, AugmentStats, AUGMENT_LEN};
pub use data::{LabeledDataset, ModelParams};
pub use logistic::{loss_and_gradient, predict_proba, sigmoid};
pub use metrics::{accuracy, auc_roc};
pub use train::{local_update, ControlVariates, LocalOutcome, TrainConfig, UpdateMode};
