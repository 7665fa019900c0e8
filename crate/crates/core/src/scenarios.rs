//! Seeded synthetic federations: the adversarial healthcare-style scenario,
//! the pathological non-IID benchmark, and label-flip poisoning.

use std::path::Path;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::engine::ClientData;
use crate::error::{Result, TopoError};
use crate::model::{sigmoid, LabeledDataset};
use crate::rng::{purpose, stream, StreamRng};

/// Mixture templates; client `k` draws from template `k % TEMPLATES`.
pub const TEMPLATES: usize = 2;
/// Spread of component means and within-component SD on informative
/// columns, per template; the templates differ in geometry, not just position.
const TEMPLATE_COMPONENTS: [usize; TEMPLATES] = [3, 6];
const TEMPLATE_SCALE: [f64; TEMPLATES] = [2.5, 4.0];
const TEMPLATE_SD: [f64; TEMPLATES] = [1.0, 0.3];
const CLIENT_SHIFT_SD: f64 = 0.5;
const TEMPLATE_TEACHER_MIX: f64 = 0.8;
const TEST_FRACTION: f64 = 0.25;
const RATE_TOLERANCE: f64 = 0.02;
const BISECTION_STEPS: usize = 50;
/// Adversarial feature shift: this many informative columns, by this many SDs.
const SHIFT_DIMS: usize = 5;
const SHIFT_SDS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioName {
    Healthcare,
    Benchmark,
}

impl ScenarioName {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Healthcare => "healthcare",
            ScenarioName::Benchmark => "benchmark",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: ScenarioName,
    pub clients: usize,
    pub dim: usize,
    pub informative: usize,
    pub size_range: (usize, usize),
    pub positive_rate_range: (f64, f64),
    pub adversarial_ids: Vec<usize>,
    pub flip_rate: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Eight hospitals, 60–250 patients, mortality 10–45%.
    pub fn healthcare(seed: u64) -> Self {
        Self {
            name: ScenarioName::Healthcare,
            clients: 8,
            dim: 20,
            informative: 10,
            size_range: (60, 250),
            positive_rate_range: (0.10, 0.45),
            adversarial_ids: vec![6, 7],
            flip_rate: 0.4,
            seed,
        }
    }

    /// Ten clients with positive rates anywhere in (0.1, 0.9).
    pub fn benchmark(seed: u64) -> Self {
        Self {
            name: ScenarioName::Benchmark,
            clients: 10,
            dim: 20,
            informative: 12,
            size_range: (60, 250),
            positive_rate_range: (0.1, 0.9),
            adversarial_ids: Vec::new(),
            flip_rate: 0.0,
            seed,
        }
    }

    pub fn preset(name: ScenarioName, seed: u64) -> Self {
        match name {
            ScenarioName::Healthcare => Self::healthcare(seed),
            ScenarioName::Benchmark => Self::benchmark(seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TopoError::Config(m));
        if self.clients < 2 {
            return bad(format!("need at least 2 clients, got {}", self.clients));
        }
        if self.informative == 0 || self.informative > self.dim {
            return bad(format!("informative dims {} must lie in 1..={}", self.informative, self.dim));
        }
        let (lo, hi) = self.size_range;
        if lo < 8 || lo > hi {
            return bad(format!("size range ({lo}, {hi}) must satisfy 8 ≤ lo ≤ hi"));
        }
        let (rlo, rhi) = self.positive_rate_range;
        if !(0.0 < rlo && rlo <= rhi && rhi < 1.0) {
            return bad(format!("positive rate range ({rlo}, {rhi}) must lie inside (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.flip_rate) {
            return bad(format!("flip_rate {} outside [0, 1]", self.flip_rate));
        }
        if let Some(&bad_id) = self.adversarial_ids.iter().find(|&&id| id >= self.clients) {
            return bad(format!("adversarial id {bad_id} out of range for {} clients", self.clients));
        }
        Ok(())
    }
}

/// The highest `round(rate · k)` client ids.
pub fn adversaries_for_rate(rate: f64, clients: usize) -> Vec<usize> {
    let count = ((rate * clients as f64).round() as usize).min(clients);
    (clients - count..clients).collect()
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub clients: Vec<ClientData>,
    /// Rate each client's intercept was tuned to (before any poisoning).
    pub target_rates: Vec<f64>,
    pub templates: Vec<usize>,
}

struct Template {
    means: Vec<Vec<f64>>,
    sd: f64,
    teacher: Vec<f64>,
}

fn gaussian_vec(rng: &mut StreamRng, len: usize, sd: f64) -> Vec<f64> {
    (0..len).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn templates(cfg: &ScenarioConfig) -> Vec<Template> {
    let d = cfg.informative;
    let shared = gaussian_vec(&mut stream(&[cfg.seed, 0, 0, purpose::TEMPLATE]), d, 1.0);
    (0..TEMPLATES)
        .map(|t| {
            let mut rng = stream(&[cfg.seed, t as u64 + 1, 0, purpose::TEMPLATE]);
            let means = (0..TEMPLATE_COMPONENTS[t]).map(|_| gaussian_vec(&mut rng, d, TEMPLATE_SCALE[t])).collect();
            let own = gaussian_vec(&mut rng, d, 1.0);
            let teacher = unit(shared.iter().zip(&own).map(|(s, o)| s + TEMPLATE_TEACHER_MIX * o).collect());
            Template {
                means,
                sd: TEMPLATE_SD[t],
                teacher,
            }
        })
        .collect()
}

/// Intercept making the realised positive rate hit `target` within
/// tolerance, for fixed logits and uniforms.
fn tune_intercept(logits: &[f64], uniforms: &[f64], target: f64) -> Result<(f64, Vec<u8>)> {
    let labels_at = |b: f64| -> Vec<u8> {
        logits
            .iter()
            .zip(uniforms)
            .map(|(z, u)| u8::from(*u < sigmoid(z + b)))
            .collect()
    };
    let rate = |ys: &[u8]| ys.iter().map(|&y| y as f64).sum::<f64>() / ys.len() as f64;
    let (mut lo, mut hi) = (-50.0, 50.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let ys = labels_at(mid);
        let r = rate(&ys);
        if (r - target).abs() <= RATE_TOLERANCE {
            return Ok((mid, ys));
        }
        if r < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(TopoError::Generation(format!(
        "positive rate {target:.3} not reached within ±{RATE_TOLERANCE} after {BISECTION_STEPS} bisection steps"
    )))
}

/// Stratified when both classes are present. Returns sorted (train, test) indices.
fn split_indices(labels: &[u8], rng: &mut StreamRng) -> (Vec<usize>, Vec<usize>) {
    let mut test = Vec::new();
    let strata: Vec<Vec<usize>> = if labels.contains(&0) && labels.contains(&1) {
        [0u8, 1]
            .iter()
            .map(|&c| (0..labels.len()).filter(|&i| labels[i] == c).collect())
            .collect()
    } else {
        vec![(0..labels.len()).collect()]
    };
    for mut s in strata {
        s.shuffle(rng);
        let take = (TEST_FRACTION * s.len() as f64).round() as usize;
        test.extend_from_slice(&s[..take]);
    }
    test.sort_unstable();
    let train = (0..labels.len()).filter(|i| test.binary_search(i).is_err()).collect();
    (train, test)
}

/// Inverts the labels of `round(flip_rate · n)` rows chosen without
/// replacement. Returns the poisoned dataset and the flipped rows (sorted).
pub fn apply_label_flip(
    data: &LabeledDataset,
    flip_rate: f64,
    rng: &mut impl Rng,
) -> Result<(LabeledDataset, Vec<usize>)> {
    if !(0.0..=1.0).contains(&flip_rate) {
        return Err(TopoError::Config(format!("flip_rate {flip_rate} outside [0, 1]")));
    }
    let count = (flip_rate * data.len() as f64).round() as usize;
    let mut rows = sample(rng, data.len(), count).into_vec();
    rows.sort_unstable();
    let mut labels = data.labels().to_vec();
    for &i in &rows {
        labels[i] = 1 - labels[i];
    }
    Ok((data.with_labels(labels)?, rows))
}

/// Flips labels and moves the flipped rows by `+2·sd` on the first five
/// informative columns, so the poisoning shows up in the cloud's geometry.
fn poison(data: &LabeledDataset, informative: usize, flip_rate: f64, rng: &mut StreamRng) -> Result<LabeledDataset> {
    let (flipped, rows) = apply_label_flip(data, flip_rate, rng)?;
    let n = data.len() as f64;
    let mut features = flipped.features().to_vec();
    for j in 0..SHIFT_DIMS.min(informative) {
        let mean = data.features().iter().map(|r| r[j]).sum::<f64>() / n;
        let sd = (data.features().iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n).sqrt();
        for &i in &rows {
            features[i][j] += SHIFT_SDS * sd;
        }
    }
    flipped.with_features(features)
}

pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let templates = templates(cfg);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut clients = Vec::with_capacity(cfg.clients);
    let mut target_rates = Vec::with_capacity(cfg.clients);
    let mut template_ids = Vec::with_capacity(cfg.clients);
    for k in 0..cfg.clients {
        let key = |p: u64| stream(&[cfg.seed, k as u64, 0, p]);
        let mut meta = key(purpose::CLIENT_META);
        let n = meta.random_range(cfg.size_range.0..=cfg.size_range.1);
        let (rlo, rhi) = cfg.positive_rate_range;
        let target = if rlo == rhi { rlo } else { meta.random_range(rlo..rhi) };
        let t = k % TEMPLATES;
        let tpl = &templates[t];
        // per-component shifts change inter-component geometry, not just position
        let means: Vec<Vec<f64>> = tpl
            .means
            .iter()
            .map(|m| m.iter().zip(gaussian_vec(&mut meta, cfg.informative, CLIENT_SHIFT_SD)).map(|(a, s)| a + s).collect())
            .collect();

        let mut feat_rng = key(purpose::FEATURES);
        let features: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let c = feat_rng.random_range(0..means.len());
                let mut row: Vec<f64> = means[c].iter().map(|m| m + tpl.sd * noise.sample(&mut feat_rng)).collect();
                row.extend((cfg.informative..cfg.dim).map(|_| noise.sample(&mut feat_rng)));
                row
            })
            .collect();

        let logits: Vec<f64> = features
            .iter()
            .map(|x| x.iter().zip(&tpl.teacher).map(|(a, w)| a * w).sum())
            .collect();
        let mut label_rng = key(purpose::LABELS);
        let uniforms: Vec<f64> = (0..n).map(|_| label_rng.random::<f64>()).collect();
        let (_, labels) = tune_intercept(&logits, &uniforms, target)?;

        let all = LabeledDataset::new(features, labels)?;
        let (train_idx, test_idx) = split_indices(all.labels(), &mut key(purpose::SPLIT));
        let mut train = all.subset(&train_idx)?;
        let test = all.subset(&test_idx)?;
        if cfg.adversarial_ids.contains(&k) {
            train = poison(&train, cfg.informative, cfg.flip_rate, &mut key(purpose::ATTACK))?;
        }
        clients.push(ClientData { train, test });
        target_rates.push(target);
        template_ids.push(t);
    }
    Ok(Scenario {
        config: cfg.clone(),
        clients,
        target_rates,
        templates: template_ids,
    })
}

fn write_dataset(path: &Path, data: &LabeledDataset) -> Result<()> {
    let csv_err = |source| TopoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header: Vec<String> = (0..data.dim()).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    w.write_record(&header).map_err(csv_err)?;
    for (row, y) in data.features().iter().zip(data.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(y.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| TopoError::io(path, e))
}

/// Writes `client_{k}_train.csv` and `client_{k}_test.csv` into `dir`.
pub fn export_csv(scenario: &Scenario, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| TopoError::io(dir, e))?;
    for (k, c) in scenario.clients.iter().enumerate() {
        write_dataset(&dir.join(format!("client_{k}_train.csv")), &c.train)?;
        write_dataset(&dir.join(format!("client_{k}_test.csv")), &c.test)?;
    }
    Ok(())
}
