//! Matching distances between persistence diagrams.
//!
//! Only finite pairs are matched. A point may match a point of the other
//! diagram (Euclidean ground cost) or its own orthogonal projection onto the
//! diagonal, at cost `(death - birth) / sqrt(2)`.

use super::assignment;
use super::diagram::PersistenceDiagram;
use crate::error::{Result, TopoError};

fn finite_points(d: &PersistenceDiagram, dim: u8) -> Vec<(f64, f64)> {
    d.finite(dim).map(|p| (p.birth, p.death)).collect()
}

/// Orders the two point lists so that (a, b) and (b, a) build the same problem.
fn canonical(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let key = |v: &Vec<(f64, f64)>| v.iter().flat_map(|&(x, y)| [x, y]).collect::<Vec<f64>>();
    let (ka, kb) = (key(&a), key(&b));
    let ord = ka
        .iter()
        .zip(&kb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(ka.len().cmp(&kb.len()));
    if ord.is_gt() {
        (b, a)
    } else {
        (a, b)
    }
}

fn point_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

pub(crate) fn diagonal_dist(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / std::f64::consts::SQRT_2
}

/// Ground distances of the augmented square problem: rows are the points of
/// `a` followed by diagonal slots for `b`, columns the points of `b` followed
/// by diagonal slots for `a`.
fn augmented_ground(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let (ma, mb) = (a.len(), b.len());
    let n = ma + mb;
    let mut ground = vec![vec![0.0; n]; n];
    for (i, row) in ground.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = match (i < ma, j < mb) {
                (true, true) => point_dist(a[i], b[j]),
                (true, false) => diagonal_dist(a[i]),
                (false, true) => diagonal_dist(b[j]),
                (false, false) => 0.0,
            };
        }
    }
    ground
}

/// p-Wasserstein distance between the finite parts of two diagrams in `dim`.
pub fn wasserstein_distance(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: u8, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(TopoError::Input(format!("Wasserstein order must be finite and >= 1, got {p}")));
    }
    let (pa, pb) = canonical(finite_points(a, dim), finite_points(b, dim));
    let ground = augmented_ground(&pa, &pb);
    let cost: Vec<Vec<f64>> = ground
        .iter()
        .map(|row| row.iter().map(|g| g.powf(p)).collect())
        .collect();
    let (total, _) = assignment::solve(&cost);
    Ok(total.max(0.0).powf(1.0 / p))
}

/// Bottleneck (W∞) distance via the assignment solver: the smallest ground
/// threshold under which a matching using only admissible edges exists.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: u8) -> f64 {
    let (pa, pb) = canonical(finite_points(a, dim), finite_points(b, dim));
    let ground = augmented_ground(&pa, &pb);
    if ground.is_empty() {
        return 0.0;
    }
    let mut candidates: Vec<f64> = ground.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |t: f64| {
        let cost: Vec<Vec<f64>> = ground
            .iter()
            .map(|row| row.iter().map(|&g| if g <= t { 0.0 } else { 1.0 }).collect())
            .collect();
        assignment::solve(&cost).0 == 0.0
    };
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}
