//! One-dimensional persistence of the Vietoris–Rips 2-skeleton.
//!
//! The complex is truncated at `max_scale`: only edges and triangles with
//! filtration value at most `max_scale` enter. Pairs are found by reducing the
//! coboundary matrix over Z/2 with edges as columns (the dual of boundary
//! reduction, same pairs). Edges that kill an H0 class are cleared up front
//! using the union-find pass. Classes still alive at `max_scale` get their
//! death truncated to `max_scale`; zero-persistence pairs are dropped.

use super::cloud::DistanceMatrix;
use super::diagram::{PersistenceDiagram, PersistencePair};
use super::union_find::DisjointSets;
use crate::error::{Result, TopoError};

const UNSET: u32 = u32::MAX;

fn binom2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

fn binom3(x: usize) -> usize {
    if x < 3 {
        0
    } else {
        x * (x - 1) * (x - 2) / 6
    }
}

/// Index of triangle i < j < k in the combinatorial number system.
fn tri_key(i: usize, j: usize, k: usize) -> usize {
    binom3(k) + binom2(j) + i
}

fn sort3(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    let mut v = [a, b, c];
    v.sort_unstable();
    (v[0], v[1], v[2])
}

/// Z/2 sum of two sorted index lists.
fn xor_sorted(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            std::cmp::Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
}

pub fn h1_persistence(dist: &DistanceMatrix, max_scale: f64, cap: usize) -> Result<PersistenceDiagram> {
    let n = dist.len();
    if n > cap {
        return Err(TopoError::Size { n, cap });
    }
    if !(max_scale > 0.0) || !max_scale.is_finite() {
        return Err(TopoError::Input(format!("max_scale must be positive and finite, got {max_scale}")));
    }
    if n < 3 {
        return Ok(PersistenceDiagram::empty());
    }

    // Edges in filtration order: (value, i, j).
    let mut edges: Vec<(usize, usize, f64)> = dist.edges().filter(|e| e.2 <= max_scale).collect();
    edges.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut edge_rank = vec![UNSET; n * n];
    for (r, &(i, j, _)) in edges.iter().enumerate() {
        edge_rank[i * n + j] = r as u32;
        edge_rank[j * n + i] = r as u32;
    }

    // Triangles in filtration order: (diameter, youngest edge rank, key).
    let mut triangles: Vec<(f64, u32, usize)> = Vec::new();
    for k in 2..n {
        for j in 1..k {
            let ejk = edge_rank[j * n + k];
            if ejk == UNSET {
                continue;
            }
            for i in 0..j {
                let (eij, eik) = (edge_rank[i * n + j], edge_rank[i * n + k]);
                if eij == UNSET || eik == UNSET {
                    continue;
                }
                let top = eij.max(eik).max(ejk);
                triangles.push((edges[top as usize].2, top, tri_key(i, j, k)));
            }
        }
    }
    triangles.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut tri_rank = vec![UNSET; binom3(n)];
    for (r, t) in triangles.iter().enumerate() {
        tri_rank[t.2] = r as u32;
    }

    // Edges that merge H0 components carry no H1 class.
    let mut negative = vec![false; edges.len()];
    let mut sets = DisjointSets::new(n);
    for (r, &(i, j, _)) in edges.iter().enumerate() {
        if sets.union(i, j).is_some() {
            negative[r] = true;
        }
    }

    let mut pivot_owner: Vec<u32> = vec![UNSET; triangles.len()];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); edges.len()];
    let mut pairs = Vec::new();
    let mut scratch = Vec::new();

    for col in (0..edges.len()).rev() {
        if negative[col] {
            continue;
        }
        let (i, j, birth) = edges[col];
        let mut cob: Vec<u32> = (0..n)
            .filter(|&k| k != i && k != j)
            .filter_map(|k| {
                if edge_rank[i * n + k] == UNSET || edge_rank[j * n + k] == UNSET {
                    return None;
                }
                let (a, b, c) = sort3(i, j, k);
                Some(tri_rank[tri_key(a, b, c)])
            })
            .collect();
        cob.sort_unstable();

        // The pivot is the earliest triangle in the coboundary.
        while let Some(&low) = cob.first() {
            let owner = pivot_owner[low as usize];
            if owner == UNSET {
                break;
            }
            xor_sorted(&cob, &reduced[owner as usize], &mut scratch);
            std::mem::swap(&mut cob, &mut scratch);
        }

        let death = match cob.first() {
            Some(&low) => {
                pivot_owner[low as usize] = col as u32;
                triangles[low as usize].0
            }
            None => max_scale,
        };
        if death > birth {
            pairs.push(PersistencePair { birth, death, dim: 1 });
        }
        reduced[col] = cob;
    }

    pairs.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
    Ok(PersistenceDiagram::new(pairs))
}
