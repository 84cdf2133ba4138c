//! Trimming by average pairwise distance.
//!
//! Each observation is ranked by its mean distance to the rest of the sample;
//! the top `floor(alpha1 * n)` and bottom `floor(alpha2 * n)` ranks are
//! discarded. The kept set is exactly the order-statistic band between the
//! two thresholds. One-sided trimming is the `alpha2 = 0` special case with a
//! wider admissible range for `alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, PointCloud};

/// Trimming proportions for the asymmetric procedure.
///
/// `alpha1` trims from the top of the average-distance ranking (far points),
/// `alpha2` from the bottom (tightly clustered points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrimSpec {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl TrimSpec {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&alpha1) || !alpha1.is_finite() {
            return Err(Error::input(format!(
                "alpha1 must lie in [0, 1/2), got {alpha1}"
            )));
        }
        if !(0.0..0.5).contains(&alpha2) || !alpha2.is_finite() {
            return Err(Error::input(format!(
                "alpha2 must lie in [0, 1/2), got {alpha2}"
            )));
        }
        Ok(TrimSpec { alpha1, alpha2 })
    }
}

/// Result of a trimming pass: the kept original indices plus the
/// order-statistic thresholds that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimResult {
    /// Kept original indices, strictly increasing.
    pub kept: Vec<usize>,
    /// Average pairwise distance of every original index (length n).
    pub avg_dists: Vec<f64>,
    /// The (floor(alpha2*n) + 1)-th smallest average distance.
    pub lower_threshold: f64,
    /// The (n - floor(alpha1*n))-th smallest average distance.
    pub upper_threshold: f64,
}

/// `floor(alpha * n)` computed in integer arithmetic on
/// `round(alpha * 10^9)` so that binary floating error near boundaries like
/// `0.2 * 5` cannot change the removal count.
pub fn floor_count(alpha: f64, n: usize) -> usize {
    debug_assert!((0.0..=1.0).contains(&alpha));
    let numerator = (alpha * 1e9).round() as u128;
    ((numerator * n as u128) / 1_000_000_000u128) as usize
}

/// Average distance from each point to the rest of the sample (length n).
pub fn avg_pairwise_distances(d: &DistanceMatrix) -> Result<Vec<f64>> {
    let n = d.len();
    if n < 2 {
        return Err(Error::input(
            "average pairwise distance requires at least 2 points",
        ));
    }
    let denom = (n - 1) as f64;
    Ok((0..n)
        .map(|i| d.row(i).iter().sum::<f64>() / denom)
        .collect())
}

fn trim_by_counts(d: &DistanceMatrix, remove_top: usize, remove_bottom: usize) -> Result<TrimResult> {
    let n = d.len();
    if remove_top + remove_bottom >= n {
        return Err(Error::input(format!(
            "trimming exhausts sample: removing {remove_top} + {remove_bottom} of {n} points"
        )));
    }
    let avg_dists = avg_pairwise_distances(d)?;

    // Tie rule: rank by (average distance, original index) ascending. Removal
    // from the bottom takes the first entries (smallest indices first among
    // ties); removal from the top takes the last (largest indices first).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        avg_dists[a]
            .partial_cmp(&avg_dists[b])
            .expect("average distances are finite")
            .then(a.cmp(&b))
    });

    let lower_threshold = avg_dists[order[remove_bottom]];
    let upper_threshold = avg_dists[order[n - 1 - remove_top]];

    let mut kept: Vec<usize> = order[remove_bottom..n - remove_top].to_vec();
    kept.sort_unstable();

    Ok(TrimResult {
        kept,
        avg_dists,
        lower_threshold,
        upper_threshold,
    })
}

/// Asymmetric trimming: removes the `floor(alpha2*n)` lowest-ranked and
/// `floor(alpha1*n)` highest-ranked points by average pairwise distance.
pub fn trim_asymmetric(d: &DistanceMatrix, spec: &TrimSpec) -> Result<TrimResult> {
    let n = d.len();
    let k1 = floor_count(spec.alpha1, n);
    let k2 = floor_count(spec.alpha2, n);
    trim_by_counts(d, k1, k2)
}

/// One-sided trimming: removes the `floor(alpha*n)` points with the largest
/// average pairwise distances. `alpha` may range over `[0, 1)`.
pub fn trim_one_sided(d: &DistanceMatrix, alpha: f64) -> Result<TrimResult> {
    if !(0.0..1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(Error::input(format!(
            "one-sided alpha must lie in [0, 1), got {alpha}"
        )));
    }
    let k1 = floor_count(alpha, d.len());
    trim_by_counts(d, k1, 0)
}

/// Trims a large reference sample against itself; the kept points stand in
/// for the population trimmed support in convergence experiments.
pub fn reference_population_trim(reference: &PointCloud, spec: &TrimSpec) -> Result<Vec<usize>> {
    let d = DistanceMatrix::from_cloud(reference)?;
    Ok(trim_asymmetric(&d, spec)?.kept)
}
