//! Point clouds, pairwise distance matrices, and set-to-set distances.
//!
//! Every downstream computation (trimming, Rips filtrations, persistence)
//! consumes a [`DistanceMatrix`], so the Euclidean metric is realized once
//! here and precomputed or non-Euclidean metrics can enter by constructing a
//! `DistanceMatrix` directly.

use crate::error::{Error, Result};

/// Largest point count accepted for dense distance-matrix storage.
pub const MAX_POINTS: usize = 5000;

/// A finite set of points in `R^m`, indexed `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloud {
    /// Builds a cloud from coordinate rows, validating that all rows share
    /// one dimension `m >= 1` and every coordinate is finite.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::input("point cloud must contain at least one point"));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::input("points must have dimension >= 1"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::input(format!(
                    "point {i} has dimension {} but point 0 has dimension {dim}",
                    p.len()
                )));
            }
            if let Some(c) = p.iter().find(|c| !c.is_finite()) {
                return Err(Error::input(format!(
                    "point {i} has non-finite coordinate {c}"
                )));
            }
        }
        Ok(PointCloud { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dimension `m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// The sub-cloud at the given original indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<PointCloud> {
        let points = indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::input(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        PointCloud::new(points)
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric pairwise-distance table; the single source of truth for all
/// metric queries downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    // row-major, n*n
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Euclidean pairwise distances of a cloud.
    pub fn from_cloud(cloud: &PointCloud) -> Result<Self> {
        let n = cloud.len();
        if n > MAX_POINTS {
            return Err(Error::input(format!(
                "cloud has {n} points; dense distance matrices are limited to {MAX_POINTS}"
            )));
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(cloud.point(i), cloud.point(j));
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        Ok(DistanceMatrix { n, entries })
    }

    /// Wraps a raw `n x n` table, validating symmetry, zero diagonal and
    /// finite non-negative entries.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("distance matrix must have n >= 1"));
        }
        if n > MAX_POINTS {
            return Err(Error::input(format!(
                "distance matrix of size {n} exceeds the {MAX_POINTS}-point limit"
            )));
        }
        if entries.len() != n * n {
            return Err(Error::input(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::input(format!("nonzero diagonal at index {i}")));
            }
            for j in 0..n {
                let d = entries[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::input(format!(
                        "invalid distance {d} at ({i},{j})"
                    )));
                }
                if entries[j * n + i] != d {
                    return Err(Error::input(format!("asymmetric entries at ({i},{j})")));
                }
            }
        }
        Ok(DistanceMatrix { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// The principal submatrix on `indices` (strictly increasing not required;
    /// order is preserved).
    pub fn submatrix(&self, indices: &[usize]) -> Result<DistanceMatrix> {
        let m = indices.len();
        if m == 0 {
            return Err(Error::input("submatrix needs at least one index"));
        }
        for &i in indices {
            if i >= self.n {
                return Err(Error::input(format!("index {i} out of range")));
            }
        }
        let mut entries = vec![0.0; m * m];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                entries[a * m + b] = self.get(i, j);
            }
        }
        Ok(DistanceMatrix { n: m, entries })
    }

    /// `min_i max_j d(i, j)`. Beyond this filtration value the Rips complex is
    /// a cone over the minimizing vertex, so homology in dimension >= 1 is
    /// trivial there and finite bars never extend past it.
    pub fn enclosing_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .copied()
                    .fold(0.0f64, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Hausdorff distance between two non-empty clouds of equal ambient
/// dimension, by exhaustive nearest-point scan.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::input(format!(
            "ambient dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

fn directed_hausdorff(from: &PointCloud, to: &PointCloud) -> f64 {
    let mut sup = 0.0f64;
    for p in from.points() {
        let mut inf = f64::INFINITY;
        for q in to.points() {
            let d = euclidean(p, q);
            if d < inf {
                inf = d;
                if inf == 0.0 {
                    break;
                }
            }
        }
        sup = sup.max(inf);
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(pts: &[&[f64]]) -> PointCloud {
        PointCloud::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    pub(crate) fn unit_square() -> PointCloud {
        cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])
    }

    #[test]
    fn distance_matrix_line() {
        let d = DistanceMatrix::from_cloud(&cloud(&[&[0.0], &[3.0]])).unwrap();
        assert_eq!(d.get(0, 1), 3.0);
        assert_eq!(d.get(1, 0), 3.0);
    }

    #[test]
    fn distance_matrix_3_4_5() {
        let d = DistanceMatrix::from_cloud(&cloud(&[&[0.0, 0.0], &[3.0, 4.0]])).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
    }

    #[test]
    fn distance_matrix_zero_diagonal() {
        let d = DistanceMatrix::from_cloud(&cloud(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]))
            .unwrap();
        for i in 0..3 {
            assert_eq!(d.get(i, i), 0.0);
        }
    }

    #[test]
    fn non_finite_coordinate_rejected() {
        assert!(PointCloud::new(vec![vec![0.0, f64::NAN]]).is_err());
        assert!(PointCloud::new(vec![vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn mixed_dimension_rejected() {
        assert!(PointCloud::new(vec![vec![0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn hausdorff_singletons() {
        let a = cloud(&[&[0.0]]);
        let b = cloud(&[&[1.0]]);
        assert_eq!(hausdorff(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn hausdorff_midpoint() {
        let a = cloud(&[&[0.0], &[2.0]]);
        let b = cloud(&[&[0.0], &[1.0], &[2.0]]);
        assert_eq!(hausdorff(&a, &b).unwrap(), 1.0);
        assert_eq!(hausdorff(&b, &a).unwrap(), 1.0);
    }

    #[test]
    fn hausdorff_identity() {
        let a = cloud(&[&[0.3, -1.0], &[2.0, 5.5], &[7.0, 0.25]]);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_dimension_mismatch() {
        let a = cloud(&[&[0.0]]);
        let b = cloud(&[&[0.0, 1.0]]);
        assert!(hausdorff(&a, &b).is_err());
    }

    #[test]
    fn enclosing_radius_line() {
        let d = DistanceMatrix::from_cloud(&cloud(&[&[0.0], &[1.0], &[2.0]])).unwrap();
        assert_eq!(d.enclosing_radius(), 1.0);
    }

    #[test]
    fn enclosing_radius_single_point() {
        let d = DistanceMatrix::from_cloud(&cloud(&[&[4.0, 2.0]])).unwrap();
        assert_eq!(d.enclosing_radius(), 0.0);
    }

    #[test]
    fn enclosing_radius_unit_square() {
        let d = DistanceMatrix::from_cloud(&unit_square()).unwrap();
        // every corner's farthest neighbor is the opposite corner
        assert!((d.enclosing_radius() - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn submatrix_preserves_entries() {
        let d = DistanceMatrix::from_cloud(&cloud(&[&[0.0], &[1.0], &[5.0]])).unwrap();
        let s = d.submatrix(&[0, 2]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(0, 1), 5.0);
    }

    #[test]
    fn from_entries_validates() {
        assert!(DistanceMatrix::from_entries(2, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        // asymmetric
        assert!(DistanceMatrix::from_entries(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        // nonzero diagonal
        assert!(DistanceMatrix::from_entries(2, vec![0.5, 1.0, 1.0, 0.0]).is_err());
        // negative
        assert!(DistanceMatrix::from_entries(2, vec![0.0, -1.0, -1.0, 0.0]).is_err());
    }
}
