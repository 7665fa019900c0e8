//! Reconstruction-risk and mutual-information proxies for what a client
//! transmits: gradients (p values) versus a descriptor (m values).

use serde::Serialize;

use crate::tda::DESCRIPTOR_LEN;

/// Compression factor applied to descriptor leakage.
pub const DEFAULT_ALPHA_C: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivacyProfile {
    /// Samples held by the client.
    pub n: usize,
    /// Raw feature dimension.
    pub d: usize,
    /// Model parameter count.
    pub p: usize,
    /// Descriptor length.
    pub m: usize,
    pub alpha_c: f64,
}

impl PrivacyProfile {
    /// Logistic model on raw features (`p = d + 1`), canonical descriptor.
    pub fn logistic(n: usize, d: usize, alpha_c: f64) -> Self {
        Self {
            n,
            d,
            p: d + 1,
            m: DESCRIPTOR_LEN,
            alpha_c,
        }
    }
}

/// `min(1, p / (n·d))`.
pub fn rho_gradient(profile: &PrivacyProfile) -> f64 {
    (profile.p as f64 / (profile.n * profile.d) as f64).min(1.0)
}

/// `(m / (n·d)) · α_c`.
pub fn rho_topo(profile: &PrivacyProfile) -> f64 {
    profile.m as f64 / (profile.n * profile.d) as f64 * profile.alpha_c
}

/// `log2(1 + dim · α_c)` bits.
pub fn mi_proxy(dim: usize, alpha_c: f64) -> f64 {
    (1.0 + dim as f64 * alpha_c).log2()
}
