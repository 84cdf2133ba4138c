//! Persistent homology over Z2.
//!
//! [`persistent_homology`] reduces the boundary matrix of an explicit
//! [`Filtration`] in filtration order with the clearing ("twist")
//! optimization, processing dimensions from high to low; dimension 0 uses a
//! union-find fast path with the same output contract. An independent
//! fixed-scale rank computation, [`brute_force_betti`], serves as a
//! correctness oracle at small scales and shares no code with the reduction.

use std::collections::HashMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::rips::Filtration;

/// One persistence bar. `death` is `f64::INFINITY` for essential classes and
/// serializes as the literal string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        Bar { dim, birth, death }
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    /// death - birth; infinite for essential classes.
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

impl Serialize for Bar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Bar", 3)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("birth", &self.birth)?;
        if self.death.is_finite() {
            st.serialize_field("death", &self.death)?;
        } else {
            st.serialize_field("death", "inf")?;
        }
        st.end()
    }
}

impl<'de> Deserialize<'de> for Bar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            birth: f64,
            death: DeathField,
        }
        let raw = Raw::deserialize(d)?;
        Ok(Bar::new(raw.dim, raw.birth, raw.death.0))
    }
}

struct DeathField(f64);

impl<'de> Deserialize<'de> for DeathField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = DeathField;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<DeathField, E> {
                Ok(DeathField(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<DeathField, E> {
                Ok(DeathField(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<DeathField, E> {
                Ok(DeathField(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<DeathField, E> {
                if v == "inf" {
                    Ok(DeathField(f64::INFINITY))
                } else {
                    Err(E::custom(format!("unexpected death value {v:?}")))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// A multiset of persistence bars. Zero-persistence pairs are never stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub bars: Vec<Bar>,
}

impl PersistenceDiagram {
    pub fn new(mut bars: Vec<Bar>) -> Self {
        bars.retain(|b| b.death > b.birth);
        let mut dgm = PersistenceDiagram { bars };
        dgm.sort();
        dgm
    }

    fn sort(&mut self) {
        self.bars.sort_by(|a, b| {
            (a.dim, a.birth, a.death)
                .partial_cmp(&(b.dim, b.birth, b.death))
                .expect("births are finite")
        });
    }

    pub fn bars_of_dim(&self, dim: usize) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.dim == dim)
    }

    /// Number of bars alive at scale `t` in one dimension:
    /// bars with `birth <= t < death`.
    pub fn betti_at_scale(&self, dim: usize, t: f64) -> usize {
        self.bars_of_dim(dim)
            .filter(|b| b.birth <= t && t < b.death)
            .count()
    }

    /// The finite bar of maximal persistence in one dimension; ties broken by
    /// smaller birth, then smaller death. `None` when no finite bar exists.
    pub fn dominant_feature(&self, dim: usize) -> Option<(f64, f64, f64)> {
        self.bars_of_dim(dim)
            .filter(|b| !b.is_infinite())
            .map(|b| (b.birth, b.death, b.persistence()))
            .max_by(|a, b| {
                // maximize length; prefer smaller birth then smaller death
                (a.2, -a.0, -a.1)
                    .partial_cmp(&(b.2, -b.0, -b.1))
                    .expect("finite bars compare")
            })
    }

    /// Betti numbers of one dimension sampled at the given scales
    /// (strictly increasing).
    pub fn betti_profile(&self, dim: usize, scales: &[f64]) -> Result<BettiProfile> {
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("profile scales must be strictly increasing"));
        }
        if scales.first().is_some_and(|&s| s < 0.0) {
            return Err(Error::input("profile scales must be nonnegative"));
        }
        Ok(BettiProfile {
            dim,
            values: scales
                .iter()
                .map(|&s| (s, self.betti_at_scale(dim, s)))
                .collect(),
        })
    }
}

/// Betti numbers of one homology dimension along increasing scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiProfile {
    pub dim: usize,
    pub values: Vec<(f64, usize)>,
}

/// Persistent homology of an explicit filtration, reporting dimensions
/// `0..=max_hom_dim`.
///
/// Requires `f.max_dim() >= max_hom_dim + 1`: without (k+1)-simplices the
/// death times in dimension k are unreliable.
pub fn persistent_homology(f: &Filtration, max_hom_dim: usize) -> Result<PersistenceDiagram> {
    if f.max_dim() < max_hom_dim + 1 {
        return Err(Error::input(format!(
            "filtration max_dim {} is too small for homology dimension {}; \
             need max_dim >= {}",
            f.max_dim(),
            max_hom_dim,
            max_hom_dim + 1
        )));
    }
    let mut bars: Vec<Bar> = Vec::new();

    // cleared[d][j]: simplex (d, j) was a pivot of the (d+1)-reduction, so it
    // creates a d-cycle and its own column reduces to zero.
    let top = max_hom_dim + 1;
    let mut cleared: Vec<Vec<bool>> = (0..=top).map(|d| vec![false; f.dim_len(d)]).collect();

    for d in (2..=top).rev() {
        reduce_dimension(f, d, max_hom_dim, &mut cleared, &mut bars);
    }

    // dimension 0 and the dimension-1 creators via union-find over edges in
    // filtration order; output-identical to reducing the full d = 1 boundary
    let mut uf = UnionFind::new(f.n_vertices());
    for (j, edge) in f.dim_iter(1).enumerate() {
        let (a, b) = (edge.vertices[0] as usize, edge.vertices[1] as usize);
        if uf.union(a, b) {
            // merge: a component born at 0 dies here
            if edge.value > 0.0 {
                bars.push(Bar::new(0, 0.0, edge.value));
            }
        } else if max_hom_dim >= 1 && !cleared[1][j] {
            // cycle-creating edge never killed from above:
            // essential class in dimension 1
            bars.push(Bar::new(1, edge.value, f64::INFINITY));
        }
    }
    for _ in 0..uf.component_count() {
        bars.push(Bar::new(0, 0.0, f64::INFINITY));
    }

    Ok(PersistenceDiagram::new(bars))
}

/// Standard left-to-right Z2 column reduction of the dimension-`d` boundary,
/// in filtration order. Pairs (pivot facet, column) produce bars in dimension
/// d-1; columns reducing to zero are essential creators in dimension d.
fn reduce_dimension(
    f: &Filtration,
    d: usize,
    max_hom_dim: usize,
    cleared: &mut [Vec<bool>],
    bars: &mut Vec<Bar>,
) {
    let n_facets = f.dim_len(d - 1);
    let n_cols = f.dim_len(d);

    // facet vertex slice -> index in the (d-1) block
    let facet_index: HashMap<&[u32], u32> = (0..n_facets)
        .map(|i| (f.simplex(d - 1, i).vertices, i as u32))
        .collect();

    const NONE: u32 = u32::MAX;
    let mut pivot_owner: Vec<u32> = vec![NONE; n_facets];
    let mut stored: Vec<Option<Vec<u32>>> = vec![None; n_cols];

    let mut face_buf: Vec<u32> = Vec::with_capacity(d + 1);
    for j in 0..n_cols {
        if cleared[d][j] {
            continue;
        }
        let s = f.simplex(d, j);

        // boundary column: facet indices, ascending
        let mut col: Vec<u32> = (0..=d)
            .map(|omit| {
                face_buf.clear();
                face_buf.extend_from_slice(s.vertices);
                face_buf.remove(omit);
                facet_index[face_buf.as_slice()]
            })
            .collect();
        col.sort_unstable();

        loop {
            let Some(&piv) = col.last() else {
                // zero column: creator of a d-cycle; unpaired because the
                // (d+1)-reduction already ran, so it is essential
                if d <= max_hom_dim {
                    bars.push(Bar::new(d, s.value, f64::INFINITY));
                }
                break;
            };
            let owner = pivot_owner[piv as usize];
            if owner == NONE {
                pivot_owner[piv as usize] = j as u32;
                cleared[d - 1][piv as usize] = true;
                let birth = f.simplex(d - 1, piv as usize).value;
                if s.value > birth {
                    bars.push(Bar::new(d - 1, birth, s.value));
                }
                stored[j] = Some(col);
                break;
            }
            col = symmetric_difference(&col, stored[owner as usize].as_ref().unwrap());
        }
    }
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let g = self.parent[self.parent[i] as usize];
            self.parent[i] = g;
            i = g as usize;
        }
        i
    }

    /// Returns true when the two elements were in distinct components.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi as u32;
        if self.rank[ra] == self.rank[rb] {
            self.rank[hi] += 1;
        }
        self.components -= 1;
        true
    }

    pub fn component_count(&self) -> usize {
        self.components
    }
}

/// Betti number at one fixed scale by dense Z2 rank computation:
/// `nullity(boundary_dim) - rank(boundary_{dim+1})` on the flag complex at
/// scale `t`. Independent of the reduction code path; oracle scale only.
pub fn brute_force_betti(
    d: &DistanceMatrix,
    dim: usize,
    t: f64,
    max_dim: usize,
) -> Result<usize> {
    let n = d.len();
    if n > 10 {
        return Err(Error::input(format!(
            "brute-force betti is an oracle for n <= 10, got n = {n}"
        )));
    }
    if max_dim < dim + 1 {
        return Err(Error::input(format!(
            "need max_dim >= {} to compute betti in dimension {dim}",
            dim + 1
        )));
    }
    if t < 0.0 {
        return Err(Error::input("scale must be nonnegative"));
    }

    let simplices_k = enumerate_at_scale(d, dim, t);
    let simplices_km1 = if dim == 0 {
        Vec::new()
    } else {
        enumerate_at_scale(d, dim - 1, t)
    };
    let simplices_kp1 = enumerate_at_scale(d, dim + 1, t);

    let rank_k = boundary_rank(&simplices_km1, &simplices_k);
    let rank_kp1 = boundary_rank(&simplices_k, &simplices_kp1);
    Ok(simplices_k.len() - rank_k - rank_kp1)
}

/// All k-simplices of the flag complex at scale t (subsets whose pairwise
/// distances are all <= t), in lexicographic order.
fn enumerate_at_scale(d: &DistanceMatrix, k: usize, t: f64) -> Vec<Vec<usize>> {
    let n = d.len();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k + 1);
    fn rec(
        d: &DistanceMatrix,
        n: usize,
        k: usize,
        t: f64,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k + 1 {
            out.push(current.clone());
            return;
        }
        for v in start..n {
            if current.iter().all(|&u| d.get(u, v) <= t) {
                current.push(v);
                rec(d, n, k, t, v + 1, current, out);
                current.pop();
            }
        }
    }
    rec(d, n, k, t, 0, &mut current, &mut out);
    out
}

/// Rank over Z2 of the boundary map sending each `cols` simplex to the sum of
/// its facets, by dense Gaussian elimination. Zero when either side is empty.
fn boundary_rank(rows: &[Vec<usize>], cols: &[Vec<usize>]) -> usize {
    if rows.is_empty() || cols.is_empty() {
        return 0;
    }
    let row_index: HashMap<&[usize], usize> =
        rows.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();

    // matrix[c] = set of row indices, as a dense bit vector in u64 words
    let words = rows.len().div_ceil(64);
    let mut matrix: Vec<Vec<u64>> = cols
        .iter()
        .map(|s| {
            let mut bits = vec![0u64; words];
            for omit in 0..s.len() {
                let mut facet = s.clone();
                facet.remove(omit);
                let r = row_index[facet.as_slice()];
                bits[r / 64] ^= 1 << (r % 64);
            }
            bits
        })
        .collect();

    let mut rank = 0;
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows.len()];
    for c in 0..matrix.len() {
        loop {
            let Some(r) = highest_bit(&matrix[c]) else { break };
            match pivot_of_row[r] {
                None => {
                    pivot_of_row[r] = Some(c);
                    rank += 1;
                    break;
                }
                Some(p) => {
                    let (a, b) = split_two(&mut matrix, c, p);
                    for (w, pw) in a.iter_mut().zip(b.iter()) {
                        *w ^= *pw;
                    }
                }
            }
        }
    }
    rank
}

fn highest_bit(bits: &[u64]) -> Option<usize> {
    for (w, &word) in bits.iter().enumerate().rev() {
        if word != 0 {
            return Some(w * 64 + 63 - word.leading_zeros() as usize);
        }
    }
    None
}

fn split_two<'a, T>(v: &'a mut [T], a: usize, b: usize) -> (&'a mut T, &'a T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}
