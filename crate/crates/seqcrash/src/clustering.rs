//! Partitioning around medoids over a precomputed dissimilarity matrix,
//! silhouette evaluation, and a k-sweep for model selection.
//!
//! The search is fully deterministic and RNG-free:
//! - BUILD picks the first medoid minimizing the total distance to all
//!   points, then greedily adds the candidate with the largest cost
//!   reduction; ties prefer the lowest sequence index.
//! - SWAP applies the single globally best cost-reducing
//!   (medoid, non-medoid) exchange per iteration until none remains; ties
//!   prefer the lowest (medoid index, candidate index) pair.
//! - Final assignment sends each point to its nearest medoid; equidistant
//!   ties prefer the highest medoid sequence index, which mirrors the
//!   published reference partition on the bundled corpus. Medoids always
//!   own their cluster.

use rayon::prelude::*;

use crate::alignment::DissimilarityMatrix;
use crate::error::{Error, Result};

const SWAP_EPS: f64 = 1e-12;

/// Result of a PAM run. Clusters are labeled 0..k in ascending order of
/// their medoid's sequence index.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub k: usize,
    pub medoids: Vec<usize>,
    pub assignment: Vec<usize>,
    /// Sum of distances from each point to its cluster medoid.
    pub cost: f64,
    /// True when two medoids coincide at distance zero (possible when k
    /// exceeds the number of distinct rows).
    pub zero_distance_medoids: bool,
}

impl Clustering {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Members of each cluster, in point order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

fn build_phase(dm: &DissimilarityMatrix, k: usize) -> Vec<usize> {
    let n = dm.n();
    let mut first = 0;
    let mut best_sum = f64::INFINITY;
    for i in 0..n {
        let sum = dm.row_sum(i);
        if sum < best_sum {
            best_sum = sum;
            first = i;
        }
    }
    let mut medoids = vec![first];
    let mut nearest: Vec<f64> = (0..n).map(|i| dm.get(i, first)).collect();
    while medoids.len() < k {
        let mut best = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for c in 0..n {
            if medoids.contains(&c) {
                continue;
            }
            let gain: f64 = (0..n).map(|j| (nearest[j] - dm.get(j, c)).max(0.0)).sum();
            if gain > best_gain {
                best_gain = gain;
                best = c;
            }
        }
        medoids.push(best);
        for (j, near) in nearest.iter_mut().enumerate() {
            *near = near.min(dm.get(j, best));
        }
    }
    medoids
}

/// Distances to the nearest and second-nearest medoid for every point.
fn nearest_two(dm: &DissimilarityMatrix, medoids: &[usize]) -> Vec<(usize, f64, f64)> {
    (0..dm.n())
        .map(|j| {
            let mut near_pos = 0;
            let mut near = f64::INFINITY;
            let mut second = f64::INFINITY;
            for (pos, &m) in medoids.iter().enumerate() {
                let d = dm.get(j, m);
                if d < near {
                    second = near;
                    near = d;
                    near_pos = pos;
                } else if d < second {
                    second = d;
                }
            }
            (near_pos, near, second)
        })
        .collect()
}

/// Cost change from replacing the medoid at `mpos` with candidate `h`.
fn swap_delta(dm: &DissimilarityMatrix, info: &[(usize, f64, f64)], mpos: usize, h: usize) -> f64 {
    let mut delta = 0.0;
    for (j, &(near_pos, near, second)) in info.iter().enumerate() {
        let d_jh = dm.get(j, h);
        if near_pos == mpos {
            delta += d_jh.min(second) - near;
        } else if d_jh < near {
            delta += d_jh - near;
        }
    }
    delta
}

/// PAM: BUILD then repeated best-improvement SWAP.
pub fn pam(dm: &DissimilarityMatrix, k: usize) -> Result<Clustering> {
    let n = dm.n();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut medoids = build_phase(dm, k);

    loop {
        let info = nearest_two(dm, &medoids);
        let is_medoid = {
            let mut flags = vec![false; n];
            for &m in &medoids {
                flags[m] = true;
            }
            flags
        };
        // Evaluate every (medoid, candidate) exchange; pick the most
        // negative delta, ties toward the lowest indices.
        let candidates: Vec<(usize, usize)> = (0..medoids.len())
            .flat_map(|mpos| (0..n).map(move |h| (mpos, h)))
            .filter(|&(_, h)| !is_medoid[h])
            .collect();
        let best = candidates
            .par_iter()
            .map(|&(mpos, h)| (swap_delta(dm, &info, mpos, h), medoids[mpos], h, mpos))
            .reduce_with(|a, b| {
                let ka = (a.0, a.1, a.2);
                let kb = (b.0, b.1, b.2);
                if kb < ka {
                    b
                } else {
                    a
                }
            });
        match best {
            Some((delta, _, h, mpos)) if delta < -SWAP_EPS => {
                medoids[mpos] = h;
            }
            _ => break,
        }
    }

    medoids.sort_unstable();
    let mut assignment = vec![0usize; n];
    let mut cost = 0.0;
    let mut medoid_pos = vec![usize::MAX; n];
    for (pos, &m) in medoids.iter().enumerate() {
        medoid_pos[m] = pos;
    }
    for j in 0..n {
        if medoid_pos[j] != usize::MAX {
            assignment[j] = medoid_pos[j];
            continue;
        }
        let near = medoids
            .iter()
            .map(|&m| dm.get(j, m))
            .fold(f64::INFINITY, f64::min);
        // Equidistant ties go to the highest-index medoid.
        let pick = medoids
            .iter()
            .enumerate()
            .rev()
            .find(|&(_, &m)| dm.get(j, m) == near)
            .map(|(pos, _)| pos)
            .expect("at least one medoid");
        assignment[j] = pick;
        cost += near;
    }
    let zero_distance_medoids = medoids
        .iter()
        .enumerate()
        .any(|(i, &a)| medoids[..i].iter().any(|&b| dm.get(a, b) == 0.0));
    Ok(Clustering {
        k,
        medoids,
        assignment,
        cost,
        zero_distance_medoids,
    })
}

/// Per-point silhouette widths with per-cluster and overall averages.
#[derive(Debug, Clone)]
pub struct SilhouetteReport {
    pub widths: Vec<f64>,
    pub per_cluster: Vec<f64>,
    pub overall: f64,
}

/// s_i = (b_i - a_i) / max(a_i, b_i); singletons score exactly 0.
pub fn silhouette(dm: &DissimilarityMatrix, clustering: &Clustering) -> Result<SilhouetteReport> {
    if clustering.k < 2 {
        return Err(Error::SilhouetteUndefined);
    }
    let n = dm.n();
    let members = clustering.members();
    let mut widths = vec![0.0; n];
    for i in 0..n {
        let own = &members[clustering.assignment[i]];
        if own.len() == 1 {
            widths[i] = 0.0;
            continue;
        }
        let a_i: f64 = own
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| dm.get(i, j))
            .sum::<f64>()
            / (own.len() - 1) as f64;
        let b_i = members
            .iter()
            .enumerate()
            .filter(|&(c, m)| c != clustering.assignment[i] && !m.is_empty())
            .map(|(_, m)| m.iter().map(|&j| dm.get(i, j)).sum::<f64>() / m.len() as f64)
            .fold(f64::INFINITY, f64::min);
        if !b_i.is_finite() {
            // Every other cluster is empty; no competing cluster exists.
            widths[i] = 0.0;
            continue;
        }
        let denom = a_i.max(b_i);
        widths[i] = if denom > 0.0 {
            (b_i - a_i) / denom
        } else {
            0.0
        };
    }
    let per_cluster = members
        .iter()
        .map(|m| {
            if m.is_empty() {
                0.0
            } else {
                m.iter().map(|&i| widths[i]).sum::<f64>() / m.len() as f64
            }
        })
        .collect();
    let overall = widths.iter().sum::<f64>() / n as f64;
    Ok(SilhouetteReport {
        widths,
        per_cluster,
        overall,
    })
}

/// One k-sweep row.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub k: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub min_cluster_silhouette: f64,
    pub max_cluster_silhouette: f64,
    pub overall_silhouette: f64,
}

/// K-sweep results plus the recommendation, when any k qualifies.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// Smallest k whose overall silhouette is within `margin` of the sweep
    /// maximum and whose every cluster average exceeds 0.1.
    pub recommended: Option<usize>,
}

pub const DEFAULT_SWEEP_MARGIN: f64 = 0.03;
const CLUSTER_SILHOUETTE_FLOOR: f64 = 0.1;

pub fn sweep(dm: &DissimilarityMatrix, k_min: usize, k_max: usize) -> Result<Sweep> {
    sweep_with_margin(dm, k_min, k_max, DEFAULT_SWEEP_MARGIN)
}

pub fn sweep_with_margin(
    dm: &DissimilarityMatrix,
    k_min: usize,
    k_max: usize,
    margin: f64,
) -> Result<Sweep> {
    let n = dm.n();
    if k_min < 2 || k_min > k_max || k_max + 1 > n {
        return Err(Error::InvalidKRange { k_min, k_max, n });
    }
    let mut rows = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let clustering = pam(dm, k)?;
        let sil = silhouette(dm, &clustering)?;
        let sizes = clustering.cluster_sizes();
        rows.push(SweepRow {
            k,
            min_size: sizes.iter().copied().min().unwrap_or(0),
            max_size: sizes.iter().copied().max().unwrap_or(0),
            min_cluster_silhouette: sil
                .per_cluster
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min),
            max_cluster_silhouette: sil
                .per_cluster
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
            overall_silhouette: sil.overall,
        });
    }
    let best = rows
        .iter()
        .map(|r| r.overall_silhouette)
        .fold(f64::NEG_INFINITY, f64::max);
    let recommended = rows
        .iter()
        .find(|r| {
            r.overall_silhouette >= best - margin
                && r.min_cluster_silhouette > CLUSTER_SILHOUETTE_FLOOR
        })
        .map(|r| r.k);
    Ok(Sweep { rows, recommended })
}
