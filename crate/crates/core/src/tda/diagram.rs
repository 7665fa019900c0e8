use serde::{Deserialize, Serialize};

use crate::error::{Result, TopoError};

/// A single (birth, death) pair. `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
    pub dim: u8,
}

impl PersistencePair {
    pub fn new(birth: f64, death: f64, dim: u8) -> Result<Self> {
        if dim > 1 {
            return Err(TopoError::Input(format!("homology dimension {dim} is not supported")));
        }
        if birth.is_nan() || death.is_nan() || birth < 0.0 || death < birth {
            return Err(TopoError::Input(format!("invalid pair ({birth}, {death})")));
        }
        Ok(Self { birth, death, dim })
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Multiset of persistence pairs across homology dimensions 0 and 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn new(pairs: Vec<PersistencePair>) -> Self {
        Self { pairs }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn dims_present(&self) -> Vec<u8> {
        let mut dims: Vec<u8> = self.pairs.iter().map(|p| p.dim).collect();
        dims.sort_unstable();
        dims.dedup();
        dims
    }

    pub fn in_dim(&self, dim: u8) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    pub fn finite(&self, dim: u8) -> impl Iterator<Item = &PersistencePair> {
        self.in_dim(dim).filter(|p| p.is_finite())
    }

    pub fn essential_count(&self, dim: u8) -> usize {
        self.in_dim(dim).filter(|p| !p.is_finite()).count()
    }

    pub fn finite_persistences(&self, dim: u8) -> Vec<f64> {
        self.finite(dim).map(PersistencePair::persistence).collect()
    }

    pub fn finite_deaths(&self, dim: u8) -> Vec<f64> {
        self.finite(dim).map(|p| p.death).collect()
    }

    /// Merges another diagram's pairs into this one.
    pub fn extend(&mut self, other: PersistenceDiagram) {
        self.pairs.extend(other.pairs);
    }
}

/// Linear-interpolated percentile (`q` in [0, 100]), the same rule numpy uses by default.
/// Returns `None` on empty input.
pub fn percentile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (q / 100.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

pub fn median(values: &[f64]) -> Option<f64> {
    percentile(values, 50.0)
}

/// Betti curve over `resolution` thresholds spaced linearly from 0 to the
/// 95th percentile of finite deaths in `dim`. Entry `l` counts finite pairs
/// with death strictly above threshold `l`.
pub fn betti_curve(diag: &PersistenceDiagram, dim: u8, resolution: usize) -> Vec<f64> {
    let deaths = diag.finite_deaths(dim);
    let Some(top) = percentile(&deaths, 95.0) else {
        return vec![0.0; resolution];
    };
    thresholds(top, resolution)
        .into_iter()
        .map(|t| deaths.iter().filter(|&&d| d > t).count() as f64)
        .collect()
}

pub(crate) fn thresholds(top: f64, resolution: usize) -> Vec<f64> {
    match resolution {
        0 => vec![],
        1 => vec![0.0],
        _ => {
            let step = top / (resolution - 1) as f64;
            (0..resolution)
                .map(|l| if l == resolution - 1 { top } else { step * l as f64 })
                .collect()
        }
    }
}

/// Shannon entropy (nats) of normalized finite lifetimes in `dim`.
pub fn persistence_entropy(diag: &PersistenceDiagram, dim: u8) -> f64 {
    let pers = diag.finite_persistences(dim);
    if pers.len() <= 1 {
        return 0.0;
    }
    let total: f64 = pers.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let h: f64 = pers
        .iter()
        .map(|&p| {
            let q = p / total;
            -q * (q + 1e-10).ln()
        })
        .sum();
    h.max(0.0)
}

/// l2 norm of the finite lifetimes in `dim`.
pub fn amplitude(diag: &PersistenceDiagram, dim: u8) -> f64 {
    diag.finite(dim)
        .map(|p| p.persistence().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Number of finite pairs whose lifetime is strictly above the median lifetime.
pub fn count_above_median(diag: &PersistenceDiagram, dim: u8) -> usize {
    let pers = diag.finite_persistences(dim);
    match median(&pers) {
        Some(m) => pers.iter().filter(|&&p| p > m).count(),
        None => 0,
    }
}
