//! Implicit Rips persistence for large inputs.
//!
//! [`flag_rips_persistence`] computes the same diagrams as building an
//! explicit filtration and reducing its boundary matrix, but never
//! materializes simplices above the requested homology dimension: it reduces
//! the anti-transposed (coboundary) matrix dimension by dimension, columns in
//! reverse filtration order, enumerating cofacets on demand. Clearing skips
//! columns already paired in the previous dimension, and pairs whose
//! death simplex is the earliest cofacet and shares the column's diameter are
//! matched directly from the enumeration without touching the matrix.
//!
//! At Rips thresholds near the enclosing radius a few hundred points generate
//! hundreds of millions of top-dimensional simplices; the explicit route is
//! memory-bound there while this engine needs little beyond the distance
//! matrix. Both engines are checked against each other property-wise.
//!
//! The simplexwise order refining the filtration is (diameter ascending,
//! combinatorial vertex index descending). Diagrams do not depend on the
//! refinement; this choice makes direct pairs frequent.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::persistence::{Bar, PersistenceDiagram};
use crate::rips::RipsThreshold;

/// Persistence of the Rips filtration at `threshold`, reported for dimensions
/// `0..=max_hom_dim`, without building the filtration explicitly.
pub fn flag_rips_persistence(
    d: &DistanceMatrix,
    threshold: RipsThreshold,
    max_hom_dim: usize,
) -> Result<PersistenceDiagram> {
    let t = threshold.resolve(d)?;
    let n = d.len();
    let binom = Binomial::new(n, max_hom_dim + 3)?;

    let mut bars: Vec<Bar> = Vec::new();
    // (k+1)-simplices paired as deaths while processing dimension k; their
    // own columns in dimension k+1 reduce to zero and are skipped.
    let mut cleared: HashSet<u64> = HashSet::new();

    for k in 0..=max_hom_dim {
        if k == 0 {
            cleared = reduce_dim0(d, t, n, &binom, &mut bars);
        } else {
            cleared = reduce_dim(d, t, n, k, &binom, &cleared, &mut bars);
        }
    }

    Ok(PersistenceDiagram::new(bars))
}

/// Union-find pass over edges in filtration order. Returns the merged
/// ("negative") edges for clearing in dimension 1.
fn reduce_dim0(
    d: &DistanceMatrix,
    t: f64,
    n: usize,
    binom: &Binomial,
    bars: &mut Vec<Bar>,
) -> HashSet<u64> {
    let mut edges: Vec<(f64, u64, u32, u32)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = d.get(i, j);
            if dist <= t {
                let idx = binom.c(i, 1) + binom.c(j, 2);
                edges.push((dist, idx, i as u32, j as u32));
            }
        }
    }
    edges.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("distances are finite")
            .then(b.1.cmp(&a.1))
    });

    let mut uf = crate::persistence::UnionFind::new(n);
    let mut negative = HashSet::new();
    for &(dist, idx, i, j) in &edges {
        if uf.union(i as usize, j as usize) {
            negative.insert(idx);
            if dist > 0.0 {
                bars.push(Bar::new(0, 0.0, dist));
            }
        }
    }
    for _ in 0..uf.component_count() {
        bars.push(Bar::new(0, 0.0, f64::INFINITY));
    }
    negative
}

/// Coboundary reduction for one homology dimension `k >= 1`. Returns the
/// (k+1)-simplices paired as deaths, for clearing in the next dimension.
fn reduce_dim(
    d: &DistanceMatrix,
    t: f64,
    n: usize,
    k: usize,
    binom: &Binomial,
    cleared: &HashSet<u64>,
    bars: &mut Vec<Bar>,
) -> HashSet<u64> {
    // all k-simplices of the complex, then reverse filtration order
    let mut columns = SimplexList::enumerate(d, t, n, k, binom);
    columns.sort_processing_order();

    let mut next_cleared: HashSet<u64> = HashSet::new();
    // pivot cofacet index -> column that owns it
    let mut pivot_owner: HashMap<u64, StoredColumn> = HashMap::new();
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut verts_buf: Vec<usize> = Vec::with_capacity(k + 1);

    'columns: for c in 0..columns.len() {
        let (diam, idx) = columns.key(c);
        if cleared.contains(&idx) {
            continue;
        }
        columns.vertices(c, &mut verts_buf);

        // direct-pair attempt: the earliest cofacet, when it shares the
        // column's diameter and this column is its latest facet, is the pivot
        // outright and the pair has zero persistence
        let mut first_equal: Option<(f64, u64, usize)> = None;
        for v in (0..n).rev() {
            if verts_buf.contains(&v) {
                continue;
            }
            let mut dmax = 0.0f64;
            for &u in &verts_buf {
                dmax = dmax.max(d.get(u, v));
            }
            if dmax > t {
                continue;
            }
            if dmax <= diam {
                first_equal = Some((diam, cofacet_index(&verts_buf, v, binom), v));
                break;
            }
        }
        if let Some((cdiam, cidx, _v)) = first_equal {
            if !pivot_owner.contains_key(&cidx)
                && latest_facet_matches(d, &verts_buf, cidx, cdiam, diam, idx, binom, first_equal.unwrap().2)
            {
                pivot_owner.insert(cidx, StoredColumn::Identity { diam, idx });
                next_cleared.insert(cidx);
                // zero persistence: no bar
                continue 'columns;
            }
        }

        // full reduction: assemble the coboundary column and chase pivots
        heap.clear();
        push_coboundary(d, t, n, diam, &verts_buf, binom, &mut heap);
        loop {
            let Some(pivot) = pop_pivot(&mut heap) else {
                // zero column: essential class in dimension k
                bars.push(Bar::new(k, diam, f64::INFINITY));
                continue 'columns;
            };
            match pivot_owner.entry(pivot.idx) {
                Entry::Vacant(e) => {
                    if pivot.diam > diam {
                        bars.push(Bar::new(k, diam, pivot.diam));
                    }
                    let mut rest: Vec<HeapEntry> = Vec::with_capacity(heap.len() + 1);
                    rest.push(pivot);
                    while let Some(entry) = pop_pivot(&mut heap) {
                        rest.push(entry);
                    }
                    e.insert(StoredColumn::Entries(rest));
                    next_cleared.insert(pivot.idx);
                    continue 'columns;
                }
                Entry::Occupied(e) => {
                    heap.push(pivot); // cancels against the owner's pivot
                    match e.get() {
                        StoredColumn::Entries(entries) => {
                            heap.extend(entries.iter().copied());
                        }
                        StoredColumn::Identity { diam: odiam, idx: oidx } => {
                            let mut overts = Vec::with_capacity(k + 1);
                            decode_index(*oidx, k, binom, &mut overts);
                            push_coboundary(d, t, n, *odiam, &overts, binom, &mut heap);
                        }
                    }
                }
            }
        }
    }
    next_cleared
}

/// Reduced columns are stored by their pivot. Direct pairs never touched the
/// matrix, so their column is the raw coboundary, recomputed if ever needed.
enum StoredColumn {
    Entries(Vec<HeapEntry>),
    Identity { diam: f64, idx: u64 },
}

#[derive(Clone, Copy, Debug)]
struct HeapEntry {
    diam: f64,
    idx: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.idx == other.idx
    }
}
impl Eq for HeapEntry {}

/// Max-heap order such that the heap maximum is the earliest cofacet in the
/// filtration: smallest diameter, then largest combinatorial index.
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .diam
            .partial_cmp(&self.diam)
            .expect("diameters are finite")
            .then(self.idx.cmp(&other.idx))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Pops the top entry with Z2 cancellation of duplicates.
fn pop_pivot(heap: &mut BinaryHeap<HeapEntry>) -> Option<HeapEntry> {
    while let Some(top) = heap.pop() {
        let mut alive = true;
        while heap.peek().is_some_and(|e| e.idx == top.idx) {
            heap.pop();
            alive = !alive;
        }
        if alive {
            return Some(top);
        }
    }
    None
}

fn push_coboundary(
    d: &DistanceMatrix,
    t: f64,
    n: usize,
    diam: f64,
    verts: &[usize],
    binom: &Binomial,
    heap: &mut BinaryHeap<HeapEntry>,
) {
    for v in 0..n {
        if verts.contains(&v) {
            continue;
        }
        let mut dmax = diam;
        for &u in verts {
            dmax = dmax.max(d.get(u, v));
        }
        if dmax <= t {
            heap.push(HeapEntry {
                diam: dmax,
                idx: cofacet_index(verts, v, binom),
            });
        }
    }
}

/// Whether the column (diam, idx) is the latest facet (largest diameter,
/// then smallest index) of the cofacet obtained by inserting `added`.
#[allow(clippy::too_many_arguments)]
fn latest_facet_matches(
    d: &DistanceMatrix,
    verts: &[usize],
    _cidx: u64,
    _cdiam: f64,
    diam: f64,
    idx: u64,
    binom: &Binomial,
    added: usize,
) -> bool {
    let mut all: Vec<usize> = verts.to_vec();
    let pos = all.partition_point(|&u| u < added);
    all.insert(pos, added);

    let mut best_diam = f64::NEG_INFINITY;
    let mut best_idx = 0u64;
    let mut facet = Vec::with_capacity(all.len() - 1);
    for omit in 0..all.len() {
        facet.clear();
        facet.extend(all.iter().copied().enumerate().filter_map(|(i, u)| {
            (i != omit).then_some(u)
        }));
        let mut fd = 0.0f64;
        for a in 0..facet.len() {
            for b in (a + 1)..facet.len() {
                fd = fd.max(d.get(facet[a], facet[b]));
            }
        }
        let fidx = simplex_index(&facet, binom);
        // latest in filtration order: larger diameter, then smaller index
        if fd > best_diam || (fd == best_diam && fidx < best_idx) {
            best_diam = fd;
            best_idx = fidx;
        }
    }
    best_diam == diam && best_idx == idx
}

/// Combinatorial index of a simplex with strictly increasing vertices:
/// sum of C(v_i, i+1).
fn simplex_index(verts: &[usize], binom: &Binomial) -> u64 {
    verts
        .iter()
        .enumerate()
        .map(|(i, &v)| binom.c(v, i + 1))
        .sum()
}

fn cofacet_index(verts: &[usize], added: usize, binom: &Binomial) -> u64 {
    let mut idx = 0u64;
    let mut pos = 0;
    for (i, &v) in verts.iter().enumerate() {
        if v < added {
            idx += binom.c(v, i + 1);
            pos = i + 1;
        } else {
            idx += binom.c(v, i + 2);
        }
    }
    idx + binom.c(added, pos + 1)
}

/// Recovers the sorted vertices of the k-simplex with the given index.
fn decode_index(mut idx: u64, k: usize, binom: &Binomial, out: &mut Vec<usize>) {
    out.clear();
    out.resize(k + 1, 0);
    let mut v = binom.n - 1;
    for i in (0..=k).rev() {
        while binom.c(v, i + 1) > idx {
            v -= 1;
        }
        out[i] = v;
        idx -= binom.c(v, i + 1);
    }
}

/// The k-simplices of the flag complex at threshold t, stored flat.
struct SimplexList {
    k: usize,
    diams: Vec<f64>,
    idxs: Vec<u64>,
    verts: Vec<u32>,
    order: Vec<u32>,
}

impl SimplexList {
    fn enumerate(d: &DistanceMatrix, t: f64, n: usize, k: usize, binom: &Binomial) -> Self {
        let mut list = SimplexList {
            k,
            diams: Vec::new(),
            idxs: Vec::new(),
            verts: Vec::new(),
            order: Vec::new(),
        };
        let mut current: Vec<usize> = Vec::with_capacity(k + 1);
        list.rec(d, t, n, k, binom, 0, 0.0, &mut current);
        list.order = (0..list.diams.len() as u32).collect();
        list
    }

    fn rec(
        &mut self,
        d: &DistanceMatrix,
        t: f64,
        n: usize,
        k: usize,
        binom: &Binomial,
        start: usize,
        diam: f64,
        current: &mut Vec<usize>,
    ) {
        if current.len() == k + 1 {
            self.diams.push(diam);
            self.idxs.push(simplex_index(current, binom));
            self.verts.extend(current.iter().map(|&v| v as u32));
            return;
        }
        let remaining = k + 1 - current.len();
        let Some(last_start) = n.checked_sub(remaining) else {
            return;
        };
        for v in start..=last_start {
            let mut nd = diam;
            let mut ok = true;
            for &u in current.iter() {
                let duv = d.get(u, v);
                if duv > t {
                    ok = false;
                    break;
                }
                nd = nd.max(duv);
            }
            if ok {
                current.push(v);
                self.rec(d, t, n, k, binom, v + 1, nd, current);
                current.pop();
            }
        }
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    /// Reverse filtration order: diameter descending, then index ascending.
    fn sort_processing_order(&mut self) {
        let diams = &self.diams;
        let idxs = &self.idxs;
        self.order.sort_unstable_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            diams[b]
                .partial_cmp(&diams[a])
                .expect("diameters are finite")
                .then(idxs[a].cmp(&idxs[b]))
        });
    }

    fn key(&self, c: usize) -> (f64, u64) {
        let i = self.order[c] as usize;
        (self.diams[i], self.idxs[i])
    }

    fn vertices(&self, c: usize, out: &mut Vec<usize>) {
        let i = self.order[c] as usize;
        let w = self.k + 1;
        out.clear();
        out.extend(self.verts[i * w..(i + 1) * w].iter().map(|&v| v as usize));
    }
}

struct Binomial {
    n: usize,
    max_k: usize,
    table: Vec<u64>,
}

impl Binomial {
    fn new(n: usize, max_k: usize) -> Result<Self> {
        let mut table = vec![0u64; (n + 1) * (max_k + 1)];
        for v in 0..=n {
            table[v * (max_k + 1)] = 1;
            for j in 1..=max_k.min(v) {
                let val = table[(v - 1) * (max_k + 1) + j - 1] as u128
                    + table[(v - 1) * (max_k + 1) + j] as u128;
                if val > u64::MAX as u128 / 4 {
                    return Err(Error::input(format!(
                        "simplex indices overflow for n = {n} at dimension {}; \
                         reduce the homology dimension",
                        max_k - 2
                    )));
                }
                table[v * (max_k + 1) + j] = val as u64;
            }
        }
        Ok(Binomial { n, max_k, table })
    }

    #[inline]
    fn c(&self, v: usize, k: usize) -> u64 {
        if k > self.max_k || k > v {
            if k > self.max_k {
                panic!("binomial table too small");
            }
            return 0;
        }
        self.table[v * (self.max_k + 1) + k]
    }
}
