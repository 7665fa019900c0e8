//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the code paths it checks.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn dist_matrix(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| points.iter().map(|q| dist(p, q)).collect())
        .collect()
}

/// Prim's algorithm on the complete graph; returns sorted MST edge weights.
pub fn prim_mst_weights(d: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut weights = Vec::new();
    best[0] = 0.0;
    for step in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[u] = true;
        if step > 0 {
            weights.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] && d[u][v] < best[v] {
                best[v] = d[u][v];
            }
        }
    }
    weights.sort_by(f64::total_cmp);
    weights
}

/// Full boundary-matrix reduction over Z/2 on every simplex of dimension
/// 0..=2 with value <= max_scale, columns ordered by (value, dim, vertices).
/// Returns sorted H1 pairs with positive persistence; classes alive at
/// max_scale are truncated there.
pub fn exhaustive_h1(d: &[Vec<f64>], max_scale: f64) -> Vec<(f64, f64)> {
    let n = d.len();
    let mut simplices: Vec<(f64, usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        simplices.push((0.0, 0, vec![i]));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if d[i][j] <= max_scale {
                simplices.push((d[i][j], 1, vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let v = d[i][j].max(d[i][k]).max(d[j][k]);
                if v <= max_scale {
                    simplices.push((v, 2, vec![i, j, k]));
                }
            }
        }
    }
    simplices.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let index_of = |verts: &Vec<usize>| simplices.iter().position(|s| &s.2 == verts).unwrap();
    let m = simplices.len();
    let mut cols: Vec<Vec<bool>> = vec![vec![false; m]; m];
    for (c, s) in simplices.iter().enumerate() {
        if s.1 == 0 {
            continue;
        }
        for drop in 0..s.2.len() {
            let face: Vec<usize> = s.2.iter().enumerate().filter(|(k, _)| *k != drop).map(|(_, &v)| v).collect();
            cols[c][index_of(&face)] = true;
        }
    }
    let low = |col: &Vec<bool>| col.iter().rposition(|&x| x);
    let mut low_owner: Vec<Option<usize>> = vec![None; m];
    for c in 0..m {
        while let Some(l) = low(&cols[c]) {
            match low_owner[l] {
                Some(other) => {
                    let add = cols[other].clone();
                    for (x, y) in cols[c].iter_mut().zip(add) {
                        *x ^= y;
                    }
                }
                None => {
                    low_owner[l] = Some(c);
                    break;
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for (e, s) in simplices.iter().enumerate() {
        if s.1 != 1 || low(&cols[e]).is_some() {
            continue;
        }
        let death = match low_owner[e] {
            Some(t) => simplices[t].0,
            None => max_scale,
        };
        if death > s.0 {
            pairs.push((s.0, death));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs
}

/// Exhaustive optimal partial matching cost (before the p-th root).
pub fn brute_force_matching_cost(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    fn diag(x: (f64, f64)) -> f64 {
        (x.1 - x.0) / 2f64.sqrt()
    }
    fn rec(a: &[(f64, f64)], b: &[(f64, f64)], i: usize, used: &mut Vec<bool>, p: f64) -> f64 {
        if i == a.len() {
            return b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&x, _)| diag(x).powf(p))
                .sum();
        }
        let mut best = diag(a[i]).powf(p) + rec(a, b, i + 1, used, p);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let c = ((a[i].0 - b[j].0).powi(2) + (a[i].1 - b[j].1).powi(2)).sqrt().powf(p);
                best = best.min(c + rec(a, b, i + 1, used, p));
                used[j] = false;
            }
        }
        best
    }
    rec(a, b, 0, &mut vec![false; b.len()], p)
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    let one_way = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(x, y).max(one_way(y, x))
}

/// Brute-force bottleneck matching over finite H0 deaths (births are all 0).
/// Returns the min over matchings of the max ground cost, enumerating
/// thresholds and checking feasibility by Kuhn's augmenting paths.
pub fn bottleneck_h0(a: &[f64], b: &[f64]) -> f64 {
    let pa: Vec<(f64, f64)> = a.iter().map(|&d| (0.0, d)).collect();
    let pb: Vec<(f64, f64)> = b.iter().map(|&d| (0.0, d)).collect();
    let (ma, mb) = (pa.len(), pb.len());
    let n = ma + mb;
    let diag = |x: (f64, f64)| (x.1 - x.0) / 2f64.sqrt();
    let cost = |i: usize, j: usize| -> f64 {
        match (i < ma, j < mb) {
            (true, true) => ((pa[i].0 - pb[j].0).powi(2) + (pa[i].1 - pb[j].1).powi(2)).sqrt(),
            (true, false) => diag(pa[i]),
            (false, true) => diag(pb[j]),
            _ => 0.0,
        }
    };
    let mut cands: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| cost(i, j)).collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    for t in cands {
        let mut match_col: Vec<Option<usize>> = vec![None; n];
        fn try_kuhn(
            r: usize,
            n: usize,
            t: f64,
            cost: &dyn Fn(usize, usize) -> f64,
            seen: &mut Vec<bool>,
            match_col: &mut Vec<Option<usize>>,
        ) -> bool {
            for c in 0..n {
                if cost(r, c) <= t && !seen[c] {
                    seen[c] = true;
                    if match_col[c].is_none() || try_kuhn(match_col[c].unwrap(), n, t, cost, seen, match_col) {
                        match_col[c] = Some(r);
                        return true;
                    }
                }
            }
            false
        }
        let ok = (0..n).all(|r| try_kuhn(r, n, t, &cost, &mut vec![false; n], &mut match_col));
        if ok {
            return t;
        }
    }
    0.0
}

/// AUC as the fraction of (positive, negative) pairs ranked correctly, ties 1/2.
pub fn brute_force_auc(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let mut num = 0.0;
    let mut pairs = 0usize;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1;
            num += if si > sj {
                1.0
            } else if si == sj {
                0.5
            } else {
                0.0
            };
        }
    }
    (pairs > 0).then(|| num / pairs as f64)
}

/// Regularised logistic loss written out directly from its definition.
pub fn reference_logistic_loss(w: &[f64], b: f64, x: &[Vec<f64>], y: &[u8], l2: f64) -> f64 {
    let n = x.len() as f64;
    let mut total = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let z: f64 = row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b;
        let p = 1.0 / (1.0 + (-z).exp());
        total -= if label == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    total / n + 0.5 * l2 / n * w.iter().map(|v| v * v).sum::<f64>()
}

pub fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    unit((0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
}

/// Rotates unit vector `u` towards a random tangent direction so that the
/// chord length to `u` is exactly `chord`; the result stays on the sphere.
pub fn rotate_by_chord(rng: &mut ChaCha8Rng, u: &[f64], chord: f64) -> Vec<f64> {
    let v = random_unit(rng, u.len());
    let along: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
    let t = unit(v.iter().zip(u).map(|(a, b)| a - along * b).collect());
    let theta = 2.0 * (chord / 2.0).asin();
    u.iter().zip(&t).map(|(a, b)| theta.cos() * a + theta.sin() * b).collect()
}

/// Planted clusters on the unit sphere: returns vectors and their group.
pub fn planted_sphere_clusters(
    rng: &mut ChaCha8Rng,
    groups: usize,
    per_group: usize,
    d: usize,
    radius: f64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let centers: Vec<Vec<f64>> = (0..groups).map(|_| random_unit(rng, d)).collect();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    // interleave groups so the planted labels are not already sorted
    for i in 0..per_group {
        for (g, c) in centers.iter().enumerate() {
            let r = if i == 0 { 0.0 } else { rng.random_range(0.0..radius) };
            points.push(if r == 0.0 { c.clone() } else { rotate_by_chord(rng, c, r) });
            labels.push(g);
        }
    }
    (points, labels)
}

/// Canonical form of a partition: labels renumbered by first appearance.
pub fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(i) => i,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect()
}

/// (smallest inter-group distance, largest intra-group distance).
pub fn gap_and_diameter(points: &[Vec<f64>], labels: &[usize]) -> (f64, f64) {
    let mut gap = f64::INFINITY;
    let mut diam: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let dd = dist(&points[i], &points[j]);
            if labels[i] == labels[j] {
                diam = diam.max(dd);
            } else {
                gap = gap.min(dd);
            }
        }
    }
    (gap, diam)
}

/// Softmax adversarial mass computed from scratch: adversaries are the
/// entries flagged in `adversarial`.
pub fn softmax_mass(dists: &[f64], adversarial: &[bool], lambda: f64) -> f64 {
    let e: Vec<f64> = dists.iter().map(|d| (-lambda * d).exp()).collect();
    let total: f64 = e.iter().sum();
    e.iter().zip(adversarial).filter(|(_, &a)| a).map(|(v, _)| v).sum::<f64>() / total
}

/// Upper bound on adversarial softmax mass for adversary fraction `eps`
/// and distance margin `lambda_delta`.
pub fn softmax_mass_bound(eps: f64, lambda_delta: f64) -> f64 {
    let s = (-lambda_delta).exp();
    eps * s / ((1.0 - eps) + eps * s)
}

/// Random gradient vectors and a random probability vector.
pub fn random_grads_and_alpha(rng: &mut ChaCha8Rng, k: usize, d: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let grads = (0..k)
        .map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    (grads, raw.into_iter().map(|a| a / total).collect())
}

/// Variance identity computed without the weighted-mean shortcut: expands
/// every squared norm coordinate by coordinate.
pub fn variance_terms(grads: &[Vec<f64>], alpha: &[f64]) -> (f64, f64, f64) {
    let k = grads.len();
    let d = grads[0].len();
    let mut lhs = 0.0;
    let mut spread = 0.0;
    let mut shift = 0.0;
    for j in 0..d {
        let mean: f64 = grads.iter().map(|g| g[j]).sum::<f64>() / k as f64;
        let wmean: f64 = grads.iter().zip(alpha).map(|(g, a)| a * g[j]).sum();
        for (g, a) in grads.iter().zip(alpha) {
            lhs += a * (g[j] - wmean).powi(2);
            spread += a * (g[j] - mean).powi(2);
        }
        shift += (wmean - mean).powi(2);
    }
    (lhs, spread, shift)
}
