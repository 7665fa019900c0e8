use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::ExperimentConfig;
use super::record::{convergence_round, fmt_opt, partial_path, RoundRecord, Table};
use crate::engine::{compute_topologies, ClientTopology, Federation, FederationConfig, Method};
use crate::error::Result;
use crate::privacy::{mi_proxy, rho_gradient, rho_topo, PrivacyProfile};
use crate::scenarios::{adversaries_for_rate, export_csv, generate_scenario, Scenario, ScenarioConfig};
use crate::tda::layout;

/// A generated scenario and its round-0 descriptors, shared by every
/// method run on the same seed.
struct Prepared {
    scenario: Scenario,
    topology: Vec<ClientTopology>,
}

fn prepare(cfg: &ExperimentConfig, scenario: &ScenarioConfig, seed: u64) -> Result<Prepared> {
    let scenario = generate_scenario(scenario)?;
    let fed = cfg.federation(Method::Ptopofl, seed);
    let topology = compute_topologies(&scenario.clients, &fed, 0)?;
    Ok(Prepared { scenario, topology })
}

fn run_prepared(prep: &Prepared, fed_cfg: FederationConfig, rounds: usize) -> Result<(Federation, Vec<RoundRecord>)> {
    let method = fed_cfg.method.to_string();
    let seed = fed_cfg.seed;
    let mut fed = Federation::with_topology(prep.scenario.clients.clone(), prep.topology.clone(), fed_cfg)?;
    let mut records = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let start = Instant::now();
        let summary = fed.step()?;
        let eval = fed.evaluate();
        records.push(RoundRecord {
            round: summary.round + 1,
            method: method.clone(),
            scenario: prep.scenario.config.name.as_str().to_string(),
            seed,
            auc_global: eval.auc_global,
            acc_global: eval.acc_global,
            per_client_auc: eval.per_client_auc,
            trust: summary.trust,
            clusters: summary.clusters,
            drift: summary.drift,
            wallclock_ms: start.elapsed().as_millis() as u64,
        });
    }
    Ok((fed, records))
}

/// Runs `cfg.method` for every seed and returns the per-round records.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RoundRecord>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for seed in cfg.run_seeds() {
        let prep = prepare(cfg, &cfg.scenario.resolve(seed), seed)?;
        out.extend(run_prepared(&prep, cfg.federation(cfg.method, seed), cfg.rounds)?.1);
    }
    Ok(out)
}

/// Main table plus a timing sidecar keyed by the same leading columns.
struct Output {
    main: Table,
    timing: Table,
}

impl Output {
    fn records(lead: &[&str]) -> Self {
        let mut timing_header: Vec<&str> = lead.to_vec();
        timing_header.extend(["round", "method", "seed", "wallclock_ms"]);
        Self {
            main: Table::records(lead),
            timing: Table::new(&timing_header),
        }
    }

    fn push(&mut self, lead: Vec<String>, r: &RoundRecord) {
        let mut t = lead.clone();
        t.extend([r.round.to_string(), r.method.clone(), r.seed.to_string(), r.wallclock_ms.to_string()]);
        self.timing.push(t);
        self.main.push_record(lead, r);
    }
}

/// Writes the table atomically on success; on failure writes whatever rows
/// exist to `<name>.partial.csv` and returns the original error.
fn finish(path: PathBuf, main: &Table, extra: &[(PathBuf, &Table)], outcome: Result<()>) -> Result<PathBuf> {
    match outcome {
        Ok(()) => {
            main.write_atomic(&path)?;
            for (p, t) in extra {
                t.write_atomic(p)?;
            }
            Ok(path)
        }
        Err(e) => {
            // best effort: the run error is what the caller needs to see
            let _ = main.write_atomic(&partial_path(&path));
            Err(e)
        }
    }
}

fn out_path(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

/// Every configured method on every seed. Writes `compare.csv`,
/// `compare_summary.csv` and `timing_compare.csv`.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<PathBuf> {
    cfg.validate()?;
    let mut out = Output::records(&[]);
    let mut summary = Table::new(&["method", "seed", "final_auc", "final_acc", "convergence_round"]);
    let outcome = (|| {
        for seed in cfg.run_seeds() {
            let prep = prepare(cfg, &cfg.scenario.resolve(seed), seed)?;
            for &method in &cfg.methods {
                let (_, records) = run_prepared(&prep, cfg.federation(method, seed), cfg.rounds)?;
                for r in &records {
                    out.push(Vec::new(), r);
                }
                let aucs: Vec<f64> = records.iter().filter_map(|r| r.auc_global).collect();
                let last = records.last().expect("rounds ≥ 1");
                summary.push(vec![
                    method.to_string(),
                    seed.to_string(),
                    fmt_opt(last.auc_global),
                    last.acc_global.to_string(),
                    convergence_round(&aucs).map_or_else(|| "NA".into(), |r| (r + 1).to_string()),
                ]);
            }
        }
        Ok(())
    })();
    finish(
        out_path(cfg, "compare.csv"),
        &out.main,
        &[
            (out_path(cfg, "compare_summary.csv"), &summary),
            (out_path(cfg, "timing_compare.csv"), &out.timing),
        ],
        outcome,
    )
}

/// One run per (attack rate, seed, method) with `round(rate·K)` adversaries
/// and the sweep anomaly threshold. Writes `sweep.csv`.
pub fn run_sweep(cfg: &ExperimentConfig, attack_rates: &[f64]) -> Result<PathBuf> {
    cfg.validate()?;
    let mut out = Output::records(&["attack_rate"]);
    let outcome = (|| {
        for &rate in attack_rates {
            if !(0.0..=0.5).contains(&rate) {
                return Err(crate::TopoError::Config(format!("attack rate {rate} outside [0, 0.5]")));
            }
            for seed in cfg.run_seeds() {
                let mut sc = cfg.scenario.resolve(seed);
                sc.adversarial_ids = adversaries_for_rate(rate, sc.clients);
                let prep = prepare(cfg, &sc, seed)?;
                for &method in &cfg.methods {
                    let mut fed = cfg.federation(method, seed);
                    fed.tau = cfg.sweep_tau;
                    for r in &run_prepared(&prep, fed, cfg.rounds)?.1 {
                        out.push(vec![rate.to_string()], r);
                    }
                }
            }
        }
        Ok(())
    })();
    finish(
        out_path(cfg, "sweep.csv"),
        &out.main,
        &[(out_path(cfg, "timing_sweep.csv"), &out.timing)],
        outcome,
    )
}

/// Ablation variants of pTopoFL, in output order.
pub const ABLATION_VARIANTS: [&str; 4] = ["full", "m1", "beta0", "trust_off"];

/// Federation settings for an ablation variant. `m1` collapses to a single
/// cluster with plain size weighting, which is exactly FedAvg.
pub fn ablation_config(cfg: &ExperimentConfig, variant: &str, seed: u64) -> FederationConfig {
    let mut fed = cfg.federation(Method::Ptopofl, seed);
    match variant {
        "m1" => {
            fed.clusters = 1;
            fed.trust_enabled = false;
            fed.exp_factor = false;
        }
        "beta0" => fed.beta_blend = 0.0,
        "trust_off" => fed.trust_enabled = false,
        _ => {}
    }
    fed
}

/// Writes `ablation.csv` with a leading `variant` column.
pub fn run_ablation(cfg: &ExperimentConfig) -> Result<PathBuf> {
    cfg.validate()?;
    let mut out = Output::records(&["variant"]);
    let outcome = (|| {
        for seed in cfg.run_seeds() {
            let prep = prepare(cfg, &cfg.scenario.resolve(seed), seed)?;
            for variant in ABLATION_VARIANTS {
                for r in &run_prepared(&prep, ablation_config(cfg, variant, seed), cfg.rounds)?.1 {
                    out.push(vec![variant.to_string()], r);
                }
            }
        }
        Ok(())
    })();
    finish(
        out_path(cfg, "ablation.csv"),
        &out.main,
        &[(out_path(cfg, "timing_ablation.csv"), &out.timing)],
        outcome,
    )
}

/// pTopoFL with signatures recomputed every round; one row per
/// (seed, round, client). Writes `drift.csv`.
pub fn run_drift_study(cfg: &ExperimentConfig, rounds: usize) -> Result<PathBuf> {
    cfg.validate()?;
    let mut table = Table::new(&["seed", "round", "client", "h0_entropy", "h1_entropy", "drift", "auc_global"]);
    let outcome = (|| {
        for seed in cfg.run_seeds() {
            let prep = prepare(cfg, &cfg.scenario.resolve(seed), seed)?;
            let mut fed_cfg = cfg.federation(Method::Ptopofl, seed);
            fed_cfg.refresh_descriptors = true;
            let mut fed = Federation::with_topology(prep.scenario.clients.clone(), prep.topology.clone(), fed_cfg)?;
            for _ in 0..rounds {
                let summary = fed.step()?;
                let auc = fed.evaluate().auc_global;
                for (k, sig) in fed.signatures().iter().enumerate() {
                    let v = sig.values();
                    table.push(vec![
                        seed.to_string(),
                        (summary.round + 1).to_string(),
                        k.to_string(),
                        v[layout::ENTROPY0].to_string(),
                        v[layout::ENTROPY1].to_string(),
                        summary.drift[k].to_string(),
                        fmt_opt(auc),
                    ]);
                }
            }
        }
        Ok(())
    })();
    finish(out_path(cfg, "drift.csv"), &table, &[], outcome)
}

fn privacy_row(seed: &str, client: &str, p: &PrivacyProfile, grad_dim: usize) -> Vec<String> {
    let (rg, rt) = (rho_gradient(p), rho_topo(p));
    vec![
        seed.to_string(),
        client.to_string(),
        p.n.to_string(),
        p.d.to_string(),
        p.p.to_string(),
        rg.to_string(),
        rt.to_string(),
        (rg / rt).to_string(),
        mi_proxy(grad_dim, p.alpha_c).to_string(),
        mi_proxy(p.m, p.alpha_c).to_string(),
    ]
}

/// Headline configuration: 100 samples, 20 features, 21 parameters, and
/// the 210-dimensional gradient used for the mutual-information proxy.
pub const HEADLINE_N: usize = 100;
pub const HEADLINE_D: usize = 20;
pub const HEADLINE_GRAD_DIM: usize = 210;

/// Per-client leakage proxies (gradient vs descriptor) for every seed, a
/// mean row, and the headline row. Writes `privacy.csv`.
pub fn run_privacy_report(cfg: &ExperimentConfig) -> Result<PathBuf> {
    cfg.validate()?;
    let mut table = Table::new(&[
        "seed",
        "client_id",
        "n",
        "d",
        "p",
        "rho_grad",
        "rho_topo",
        "reduction",
        "mi_grad",
        "mi_topo",
    ]);
    let outcome = (|| {
        let (mut sum_grad, mut sum_topo, mut count) = (0.0, 0.0, 0usize);
        for seed in cfg.run_seeds() {
            let scenario = generate_scenario(&cfg.scenario.resolve(seed))?;
            for (k, c) in scenario.clients.iter().enumerate() {
                let p = PrivacyProfile::logistic(c.train.len(), c.train.dim(), cfg.alpha_c);
                sum_grad += rho_gradient(&p);
                sum_topo += rho_topo(&p);
                count += 1;
                table.push(privacy_row(&seed.to_string(), &k.to_string(), &p, p.p));
            }
        }
        let n = count as f64;
        table.push(vec![
            "all".into(),
            "mean".into(),
            String::new(),
            String::new(),
            String::new(),
            (sum_grad / n).to_string(),
            (sum_topo / n).to_string(),
            (sum_grad / sum_topo).to_string(),
            String::new(),
            String::new(),
        ]);
        let headline = PrivacyProfile::logistic(HEADLINE_N, HEADLINE_D, cfg.alpha_c);
        table.push(privacy_row("all", "headline", &headline, HEADLINE_GRAD_DIM));
        Ok(())
    })();
    finish(out_path(cfg, "privacy.csv"), &table, &[], outcome)
}

/// Writes each seed's client datasets under `scenario_<seed>/`.
pub fn run_export(cfg: &ExperimentConfig) -> Result<PathBuf> {
    cfg.validate()?;
    for seed in cfg.run_seeds() {
        let scenario = generate_scenario(&cfg.scenario.resolve(seed))?;
        export_csv(&scenario, &cfg.output_dir.join(format!("scenario_{seed}")))?;
    }
    Ok(cfg.output_dir.clone())
}

/// Reads back one of the harness CSVs as (header, rows).
pub fn read_table(path: &Path) -> Result<Table> {
    let csv_err = |source| crate::TopoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)?;
    Ok(Table { header, rows })
}
