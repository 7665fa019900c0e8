use serde::{Deserialize, Serialize};

use crate::error::{Result, TopoError};

/// Logistic-regression parameters. Serialized flat as `[w_1..w_d, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl ModelParams {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.weights.clone();
        v.push(self.bias);
        v
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        let (bias, weights) = flat
            .split_last()
            .ok_or_else(|| TopoError::Input("flat parameter vector is empty".into()))?;
        Ok(Self {
            weights: weights.to_vec(),
            bias: *bias,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }
}

impl Serialize for ModelParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_flat().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let flat = Vec::<f64>::deserialize(d)?;
        ModelParams::from_flat(&flat).map_err(serde::de::Error::custom)
    }
}

/// Feature rows with binary labels. Single-class datasets are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
    dim: usize,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if features.is_empty() {
            return Err(TopoError::Input("dataset must have at least one row".into()));
        }
        if features.len() != labels.len() {
            return Err(TopoError::Input(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let dim = features[0].len();
        if features.iter().any(|r| r.len() != dim) {
            return Err(TopoError::Input("feature rows have unequal length".into()));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(TopoError::Input("labels must be 0 or 1".into()));
        }
        Ok(Self { features, labels, dim })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn positive_rate(&self) -> f64 {
        self.labels.iter().map(|&y| y as f64).sum::<f64>() / self.len() as f64
    }

    pub fn has_both_classes(&self) -> bool {
        self.labels.contains(&0) && self.labels.contains(&1)
    }

    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self> {
        Self::new(self.features.clone(), labels)
    }

    pub fn with_features(&self, features: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(features, self.labels.clone())
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.features[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    /// Column means.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for row in &self.features {
            for (acc, x) in c.iter_mut().zip(row) {
                *acc += x;
            }
        }
        let n = self.len() as f64;
        c.iter_mut().for_each(|x| *x /= n);
        c
    }

    /// Concatenates datasets of equal dimension.
    pub fn concat(parts: &[&LabeledDataset]) -> Result<Self> {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for p in parts {
            features.extend(p.features.iter().cloned());
            labels.extend_from_slice(&p.labels);
        }
        Self::new(features, labels)
    }
}
