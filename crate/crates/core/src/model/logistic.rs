use super::data::{LabeledDataset, ModelParams};
use super::train::TrainConfig;

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
pub(crate) fn logit(params: &ModelParams, x: &[f64]) -> f64 {
    params.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + params.bias
}

pub fn predict_proba(params: &ModelParams, features: &[Vec<f64>]) -> Vec<f64> {
    features.iter().map(|x| sigmoid(logit(params, x))).collect()
}

/// Objective on the rows `rows`, with the ridge term scaled by `n_effective`.
///
/// `mean BCE + (l2_reg / 2) |w|^2 / n_effective + (prox_mu / 2) |θ - θ_g|^2`.
/// The ridge term skips the bias; the proximal term covers all parameters.
/// Returns the loss and the flat gradient `[dw.., db]`.
pub(crate) fn objective(
    params: &ModelParams,
    data: &LabeledDataset,
    rows: &[usize],
    n_effective: usize,
    cfg: &TrainConfig,
    global: Option<&ModelParams>,
) -> (f64, Vec<f64>) {
    let d = params.dim();
    let mut grad = vec![0.0; d + 1];
    let mut loss = 0.0;
    for &i in rows {
        let x = data.row(i);
        let y = data.labels()[i] as f64;
        let z = logit(params, x);
        loss += softplus(z) - y * z;
        let r = sigmoid(z) - y;
        for (g, v) in grad.iter_mut().zip(x) {
            *g += r * v;
        }
        grad[d] += r;
    }
    let m = rows.len() as f64;
    loss /= m;
    grad.iter_mut().for_each(|g| *g /= m);

    if cfg.l2_reg > 0.0 {
        let scale = cfg.l2_reg / n_effective as f64;
        loss += 0.5 * scale * params.weights.iter().map(|w| w * w).sum::<f64>();
        for (g, w) in grad.iter_mut().zip(&params.weights) {
            *g += scale * w;
        }
    }
    if cfg.prox_mu > 0.0 {
        if let Some(g0) = global {
            let theta = params.to_flat();
            let anchor = g0.to_flat();
            let mut sq = 0.0;
            for ((g, t), a) in grad.iter_mut().zip(&theta).zip(&anchor) {
                *g += cfg.prox_mu * (t - a);
                sq += (t - a) * (t - a);
            }
            loss += 0.5 * cfg.prox_mu * sq;
        }
    }
    (loss, grad)
}

/// Full-dataset loss and its analytic gradient.
pub fn loss_and_gradient(
    params: &ModelParams,
    data: &LabeledDataset,
    cfg: &TrainConfig,
    global: Option<&ModelParams>,
) -> (f64, Vec<f64>) {
    let rows: Vec<usize> = (0..data.len()).collect();
    objective(params, data, &rows, data.len(), cfg, global)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_saturates_without_overflow() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(40.0) - 1.0).abs() < 1e-15);
        assert!(sigmoid(-800.0) >= 0.0);
        for z in [-5.0, -0.3, 0.7, 12.0] {
            assert!((sigmoid(z) - 1.0 / (1.0 + (-z).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_model_scores_half() {
        let p = ModelParams::zeros(3);
        assert_eq!(predict_proba(&p, &[vec![1.0, 2.0, 3.0], vec![-4.0, 0.0, 9.0]]), vec![0.5, 0.5]);
    }

    #[test]
    fn uninformative_loss_is_ln2() {
        let data = LabeledDataset::new(vec![vec![1.0], vec![-2.0], vec![0.5], vec![3.0]], vec![0, 1, 0, 1]).unwrap();
        let cfg = TrainConfig {
            l2_reg: 0.0,
            ..TrainConfig::default()
        };
        let (loss, _) = loss_and_gradient(&ModelParams::zeros(1), &data, &cfg, None);
        assert!((loss - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn proximal_term_vanishes_at_anchor() {
        let data = LabeledDataset::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0, 1]).unwrap();
        let p = ModelParams {
            weights: vec![0.3, -0.2],
            bias: 0.1,
        };
        let plain = TrainConfig::default();
        let prox = TrainConfig {
            prox_mu: 0.1,
            ..TrainConfig::default()
        };
        assert_eq!(
            loss_and_gradient(&p, &data, &plain, None),
            loss_and_gradient(&p, &data, &prox, Some(&p))
        );
    }
}
