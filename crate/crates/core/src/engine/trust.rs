use serde::Serialize;

use super::cluster::euclidean;
use crate::error::{Result, TopoError};
use crate::tda::TopoDescriptor;

/// Descriptor-outlier scores, one entry per client.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrustReport {
    /// Mean raw-descriptor distance to every other client.
    pub delta: Vec<f64>,
    pub z: Vec<f64>,
    /// `exp(-max(z - 1, 0))`.
    pub trust: Vec<f64>,
    /// Clients with `z > tau`, ascending.
    pub flagged: Vec<usize>,
}

impl TrustReport {
    /// Report with every client fully trusted (trust scoring disabled).
    pub fn neutral(k: usize) -> Self {
        Self {
            delta: vec![0.0; k],
            z: vec![0.0; k],
            trust: vec![1.0; k],
            flagged: Vec::new(),
        }
    }
}

pub fn trust_from_z(z: f64) -> f64 {
    (-(z - 1.0).max(0.0)).exp()
}

pub fn trust_scores(descs: &[TopoDescriptor], tau: f64) -> Result<TrustReport> {
    let k = descs.len();
    if k < 2 {
        return Err(TopoError::Config(format!("trust scoring needs at least 2 clients, got {k}")));
    }
    let delta: Vec<f64> = (0..k)
        .map(|i| {
            let total: f64 = (0..k)
                .filter(|&j| j != i)
                .map(|j| euclidean(descs[i].values(), descs[j].values()))
                .sum();
            total / (k - 1) as f64
        })
        .collect();
    let mean = delta.iter().sum::<f64>() / k as f64;
    let sd = (delta.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / k as f64).sqrt();
    let z: Vec<f64> = if sd < 1e-12 {
        vec![0.0; k]
    } else {
        delta.iter().map(|d| (d - mean) / sd).collect()
    };
    let trust = z.iter().map(|&v| trust_from_z(v)).collect();
    let flagged = (0..k).filter(|&i| z[i] > tau).collect();
    Ok(TrustReport {
        delta,
        z,
        trust,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_desc(x: f64) -> TopoDescriptor {
        let mut v = vec![0.0; 48];
        v[0] = x;
        TopoDescriptor::from_values(v).unwrap()
    }

    #[test]
    fn identical_descriptors_are_all_trusted() {
        let descs = vec![scalar_desc(3.0); 4];
        let r = trust_scores(&descs, 2.0).unwrap();
        assert_eq!(r.trust, vec![1.0; 4]);
        assert!(r.flagged.is_empty());
        assert!(trust_scores(&descs[..1], 2.0).unwrap_err().is_config());
    }

    #[test]
    fn nine_plus_one_outlier_has_z_three() {
        // Nine coincident clients and one at distance 1: δ = 1/9 for the
        // nine, 1 for the outlier; population z of the outlier is exactly 3.
        let mut descs = vec![scalar_desc(0.0); 9];
        descs.push(scalar_desc(1.0));
        let r = trust_scores(&descs, 2.0).unwrap();
        assert!((r.z[9] - 3.0).abs() < 1e-12);
        assert!((r.trust[9] - (-2.0f64).exp()).abs() < 1e-12);
        assert_eq!(r.flagged, vec![9]);
        assert!(r.trust[..9].iter().all(|&t| t == 1.0));
    }

    #[test]
    fn seven_plus_one_outlier_hits_the_z_ceiling() {
        // With K = 8 the largest attainable population z-score is sqrt(7).
        let mut descs = vec![scalar_desc(0.0); 7];
        descs.push(scalar_desc(1.0));
        let r = trust_scores(&descs, 2.0).unwrap();
        assert!((r.z[7] - 7f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.flagged, vec![7]);
        assert!((r.trust[7] - (1.0 - 7f64.sqrt()).exp()).abs() < 1e-12);
    }
}
