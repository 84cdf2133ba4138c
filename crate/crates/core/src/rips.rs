//! Vietoris-Rips filtrations: the flag complex of the distance-threshold
//! graph, built explicitly up to a maximum dimension.
//!
//! Filtration values are in edge-length units: a simplex enters at the length
//! of its longest edge. All diagrams and thresholds in this crate use the
//! same convention; the scale parameter of a ball-based construction is half
//! the edge length.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// Default cap on the total number of simplices a filtration may hold.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 50_000_000;

/// Rips distance threshold: an explicit edge length, or the enclosing radius
/// of the distance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RipsThreshold {
    Auto,
    Value(f64),
}

impl RipsThreshold {
    pub fn resolve(self, d: &DistanceMatrix) -> Result<f64> {
        match self {
            RipsThreshold::Auto => Ok(d.enclosing_radius()),
            RipsThreshold::Value(t) => {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(Error::input(format!(
                        "Rips threshold must be positive and finite, got {t}"
                    )));
                }
                Ok(t)
            }
        }
    }
}

/// A borrowed view of one simplex in a filtration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexRef<'a> {
    /// Strictly increasing vertex indices; length = dim + 1.
    pub vertices: &'a [u32],
    /// Length of the longest edge (0 for vertices).
    pub value: f64,
}

impl SimplexRef<'_> {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Simplices of one dimension, sorted by (value, lexicographic vertices).
struct DimBlock {
    width: usize,
    vertices: Vec<u32>,
    values: Vec<f64>,
}

impl DimBlock {
    fn len(&self) -> usize {
        self.values.len()
    }

    fn verts(&self, i: usize) -> &[u32] {
        &self.vertices[i * self.width..(i + 1) * self.width]
    }

    fn sort(&mut self) {
        let m = self.len();
        let mut perm: Vec<u32> = (0..m as u32).collect();
        perm.sort_unstable_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            self.values[a]
                .partial_cmp(&self.values[b])
                .expect("filtration values are finite")
                .then_with(|| self.verts(a).cmp(self.verts(b)))
        });
        let mut vertices = Vec::with_capacity(self.vertices.len());
        let mut values = Vec::with_capacity(m);
        for &p in &perm {
            vertices.extend_from_slice(self.verts(p as usize));
            values.push(self.values[p as usize]);
        }
        self.vertices = vertices;
        self.values = values;
    }
}

/// An explicit Rips filtration: every simplex of the flag complex up to
/// `max_dim`, each tagged with the value at which it enters.
///
/// Simplices are stored per dimension, each dimension sorted by
/// (value, lexicographic vertices); the global filtration order refines this
/// by (value, dimension, lexicographic vertices), so every face precedes its
/// cofaces.
pub struct Filtration {
    n_vertices: usize,
    max_dim: usize,
    threshold: f64,
    blocks: Vec<DimBlock>,
}

impl std::fmt::Debug for Filtration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Filtration")
            .field("n_vertices", &self.n_vertices)
            .field("max_dim", &self.max_dim)
            .field("threshold", &self.threshold)
            .field("simplices", &self.len())
            .finish()
    }
}

impl Filtration {
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Total number of simplices across all dimensions.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of simplices of one dimension.
    pub fn dim_len(&self, dim: usize) -> usize {
        self.blocks.get(dim).map_or(0, |b| b.len())
    }

    /// The `i`-th simplex of dimension `dim` in block order.
    pub fn simplex(&self, dim: usize, i: usize) -> SimplexRef<'_> {
        let b = &self.blocks[dim];
        SimplexRef {
            vertices: b.verts(i),
            value: b.values[i],
        }
    }

    /// Simplices of one dimension in block order.
    pub fn dim_iter(&self, dim: usize) -> impl Iterator<Item = SimplexRef<'_>> {
        let b = &self.blocks[dim];
        (0..b.len()).map(move |i| SimplexRef {
            vertices: b.verts(i),
            value: b.values[i],
        })
    }

    /// All simplices in global filtration order
    /// (value, dimension, lexicographic vertices).
    pub fn iter(&self) -> impl Iterator<Item = SimplexRef<'_>> {
        // k-way merge over the per-dimension blocks
        let mut cursors = vec![0usize; self.blocks.len()];
        std::iter::from_fn(move || {
            let mut best: Option<(usize, SimplexRef<'_>)> = None;
            for (dim, &c) in cursors.iter().enumerate() {
                if c >= self.blocks[dim].len() {
                    continue;
                }
                let s = self.simplex(dim, c);
                let better = match &best {
                    None => true,
                    Some((bdim, bs)) => {
                        (s.value, dim, s.vertices) < (bs.value, *bdim, bs.vertices)
                    }
                };
                if better {
                    best = Some((dim, s));
                }
            }
            let (dim, s) = best?;
            cursors[dim] += 1;
            Some(s)
        })
    }

    /// Debug dump: one line per simplex, `value dim v0 v1 ...`, in global
    /// filtration order.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for s in self.iter() {
            write!(out, "{} {}", s.value, s.dim()).unwrap();
            for v in s.vertices {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the Rips filtration with the default simplex budget.
pub fn rips_filtration(
    d: &DistanceMatrix,
    max_dim: usize,
    threshold: RipsThreshold,
) -> Result<Filtration> {
    rips_filtration_with_budget(d, max_dim, threshold, DEFAULT_SIMPLEX_BUDGET)
}

/// Builds the Rips filtration, failing with a resource error if the total
/// simplex count would exceed `budget`.
pub fn rips_filtration_with_budget(
    d: &DistanceMatrix,
    max_dim: usize,
    threshold: RipsThreshold,
    budget: usize,
) -> Result<Filtration> {
    let n = d.len();
    let t = threshold.resolve(d)?;

    let mut blocks: Vec<DimBlock> = (0..=max_dim)
        .map(|k| DimBlock {
            width: k + 1,
            vertices: Vec::new(),
            values: Vec::new(),
        })
        .collect();

    // vertices at value 0
    blocks[0].vertices.extend(0..n as u32);
    blocks[0].values.extend(std::iter::repeat(0.0).take(n));

    let mut total = n;
    if total > budget {
        return Err(budget_error(n, max_dim, t, budget));
    }

    if max_dim >= 1 {
        // neighbor lists of the threshold graph, ascending
        let mut nbrs: Vec<Vec<u32>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && d.get(i, j) <= t {
                    nbrs[i].push(j as u32);
                }
            }
        }

        // flag expansion: depth-first clique growth over candidate
        // intersections, extending only past the largest vertex
        let mut simplex: Vec<u32> = Vec::with_capacity(max_dim + 1);
        for v0 in 0..n as u32 {
            simplex.push(v0);
            let cand: Vec<u32> = nbrs[v0 as usize]
                .iter()
                .copied()
                .filter(|&u| u > v0)
                .collect();
            expand(
                d,
                &nbrs,
                &mut simplex,
                &cand,
                0.0,
                max_dim,
                &mut blocks,
                &mut total,
                budget,
            )
            .map_err(|_| budget_error(n, max_dim, t, budget))?;
            simplex.pop();
        }
    }

    for b in blocks.iter_mut().skip(1) {
        b.sort();
    }

    Ok(Filtration {
        n_vertices: n,
        max_dim,
        threshold: t,
        blocks,
    })
}

fn budget_error(n: usize, max_dim: usize, t: f64, budget: usize) -> Error {
    Error::resource(format!(
        "simplex budget of {budget} exceeded building the Rips filtration \
         (n = {n}, max_dim = {max_dim}, threshold = {t}); lower the threshold \
         or dimension, or raise the budget"
    ))
}

struct BudgetExceeded;

#[allow(clippy::too_many_arguments)]
fn expand(
    d: &DistanceMatrix,
    nbrs: &[Vec<u32>],
    simplex: &mut Vec<u32>,
    cand: &[u32],
    value: f64,
    max_dim: usize,
    blocks: &mut [DimBlock],
    total: &mut usize,
    budget: usize,
) -> std::result::Result<(), BudgetExceeded> {
    for (ci, &v) in cand.iter().enumerate() {
        let new_value = simplex
            .iter()
            .map(|&u| d.get(u as usize, v as usize))
            .fold(value, f64::max);

        simplex.push(v);
        let dim = simplex.len() - 1;
        *total += 1;
        if *total > budget {
            return Err(BudgetExceeded);
        }
        blocks[dim].vertices.extend_from_slice(simplex);
        blocks[dim].values.push(new_value);

        if dim < max_dim {
            // candidates after v that are also neighbors of v
            let next: Vec<u32> = intersect_sorted(&cand[ci + 1..], &nbrs[v as usize]);
            if !next.is_empty() {
                expand(d, nbrs, simplex, &next, new_value, max_dim, blocks, total, budget)?;
            }
        }
        simplex.pop();
    }
    Ok(())
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
