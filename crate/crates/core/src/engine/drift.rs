use super::cluster::euclidean;
use crate::error::{Result, TopoError};

/// Per-client descriptor signatures, one entry per recorded round.
#[derive(Debug, Clone, Default)]
pub struct SignatureHistory {
    per_client: Vec<Vec<Vec<f64>>>,
}

impl SignatureHistory {
    pub fn new(clients: usize) -> Self {
        Self {
            per_client: vec![Vec::new(); clients],
        }
    }

    /// Appends one round: a signature for every client.
    pub fn record(&mut self, signatures: Vec<Vec<f64>>) -> Result<()> {
        if signatures.len() != self.per_client.len() {
            return Err(TopoError::Input(format!(
                "expected {} signatures, got {}",
                self.per_client.len(),
                signatures.len()
            )));
        }
        for (h, s) in self.per_client.iter_mut().zip(signatures) {
            h.push(s);
        }
        Ok(())
    }

    pub fn rounds(&self) -> usize {
        self.per_client.first().map_or(0, Vec::len)
    }

    pub fn clients(&self) -> usize {
        self.per_client.len()
    }

    pub fn signature(&self, client: usize, round: usize) -> Option<&[f64]> {
        self.per_client.get(client)?.get(round).map(Vec::as_slice)
    }
}

/// Mean distance of a client's signatures from its first one.
pub fn topological_drift(history: &SignatureHistory, client: usize) -> Result<f64> {
    let sigs = history
        .per_client
        .get(client)
        .ok_or_else(|| TopoError::Input(format!("no client {client} in history")))?;
    let first = sigs
        .first()
        .ok_or_else(|| TopoError::Input("drift needs at least one recorded round".into()))?;
    let total: f64 = sigs.iter().map(|s| euclidean(s, first)).sum();
    Ok(total / sigs.len() as f64)
}
