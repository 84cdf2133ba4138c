//! Bottleneck distance between persistence diagrams.
//!
//! Finite bars match to finite bars at L-infinity cost in the (birth, death)
//! plane or to the diagonal at half their persistence; infinite bars match
//! only to infinite bars by birth. The distance is computed exactly: the
//! optimum is always one of finitely many candidate costs, located by binary
//! search with a bipartite-matching feasibility test per candidate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{hausdorff, DistanceMatrix, PointCloud};
use crate::persistence::{persistent_homology, Bar, PersistenceDiagram};
use crate::rips::{rips_filtration, RipsThreshold};

/// One side of a matched pair: a bar, or the diagonal.
pub type MatchEnd = Option<Bar>;

#[derive(Debug, Clone, Serialize)]
pub struct BottleneckResult {
    pub value: f64,
    /// An achieving matching (bar or diagonal on each side); empty when the
    /// value is infinite.
    pub matching: Vec<(MatchEnd, MatchEnd)>,
}

fn linf(a: &Bar, b: &Bar) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

fn half_persistence(b: &Bar) -> f64 {
    (b.death - b.birth) / 2.0
}

/// Bottleneck distance restricted to one homology dimension.
pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: usize) -> BottleneckResult {
    let fa: Vec<Bar> = a.bars_of_dim(dim).filter(|b| !b.is_infinite()).copied().collect();
    let fb: Vec<Bar> = b.bars_of_dim(dim).filter(|b| !b.is_infinite()).copied().collect();
    let mut ia: Vec<Bar> = a.bars_of_dim(dim).filter(|b| b.is_infinite()).copied().collect();
    let mut ib: Vec<Bar> = b.bars_of_dim(dim).filter(|b| b.is_infinite()).copied().collect();

    if ia.len() != ib.len() {
        return BottleneckResult {
            value: f64::INFINITY,
            matching: Vec::new(),
        };
    }

    // essential classes: matching sorted by birth minimizes the maximum
    // birth difference on the line
    ia.sort_by(|x, y| x.birth.partial_cmp(&y.birth).unwrap());
    ib.sort_by(|x, y| x.birth.partial_cmp(&y.birth).unwrap());
    let mut matching: Vec<(MatchEnd, MatchEnd)> = Vec::new();
    let mut essential_cost = 0.0f64;
    for (x, y) in ia.iter().zip(&ib) {
        essential_cost = essential_cost.max((x.birth - y.birth).abs());
        matching.push((Some(*x), Some(*y)));
    }

    let (finite_cost, finite_matching) = finite_bottleneck(&fa, &fb);
    matching.extend(finite_matching);

    BottleneckResult {
        value: essential_cost.max(finite_cost),
        matching,
    }
}

fn finite_bottleneck(fa: &[Bar], fb: &[Bar]) -> (f64, Vec<(MatchEnd, MatchEnd)>) {
    if fa.is_empty() && fb.is_empty() {
        return (0.0, Vec::new());
    }

    // candidate costs: every inter-bar L-infinity distance, every half
    // persistence, and zero
    let mut candidates: Vec<f64> = vec![0.0];
    for x in fa {
        candidates.push(half_persistence(x));
        for y in fb {
            candidates.push(linf(x, y));
        }
    }
    for y in fb {
        candidates.push(half_persistence(y));
    }
    candidates.sort_by(|p, q| p.partial_cmp(q).unwrap());
    candidates.dedup();

    // smallest feasible candidate by binary search; feasibility is monotone
    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    debug_assert!(Matching::new(fa, fb, candidates[hi]).is_perfect());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if Matching::new(fa, fb, candidates[mid]).is_perfect() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let cost = candidates[lo];
    let matching = Matching::new(fa, fb, cost).extract(fa, fb);
    (cost, matching)
}

/// Perfect-matching feasibility at a cost cap, on the diagonal-augmented
/// bipartite graph: bars of `fa` and a diagonal pool face bars of `fb` and a
/// diagonal pool; a bar pairs with a bar when their L-infinity distance is
/// within the cap, with the diagonal when its half-persistence is, and the
/// pools absorb each other freely. Solved as max-flow (Dinic).
struct Matching {
    flow: Dinic,
    na: usize,
    nb: usize,
    /// first outgoing edge id of each a vertex, for matching extraction
    a_edges: Vec<Vec<(usize, usize)>>, // (edge id, b index or usize::MAX for diagonal)
}

impl Matching {
    fn new(fa: &[Bar], fb: &[Bar], cap: f64) -> Self {
        let (na, nb) = (fa.len(), fb.len());
        // vertices: 0 = source, 1 = sink, 2 = diagonal pool A, 3 = diagonal
        // pool B, 4.. = fa bars, 4+na.. = fb bars
        let (s, t, da, db) = (0, 1, 2, 3);
        let av = |i: usize| 4 + i;
        let bv = |j: usize| 4 + na + j;
        let mut flow = Dinic::new(4 + na + nb);
        let mut a_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); na];

        for i in 0..na {
            flow.add_edge(s, av(i), 1);
        }
        flow.add_edge(s, da, nb as i64);
        for j in 0..nb {
            flow.add_edge(bv(j), t, 1);
        }
        flow.add_edge(db, t, na as i64);
        flow.add_edge(da, db, na.max(nb) as i64);
        for (i, x) in fa.iter().enumerate() {
            for (j, y) in fb.iter().enumerate() {
                if linf(x, y) <= cap {
                    let e = flow.add_edge(av(i), bv(j), 1);
                    a_edges[i].push((e, j));
                }
            }
            if half_persistence(x) <= cap {
                let e = flow.add_edge(av(i), db, 1);
                a_edges[i].push((e, usize::MAX));
            }
        }
        for (j, y) in fb.iter().enumerate() {
            if half_persistence(y) <= cap {
                flow.add_edge(da, bv(j), 1);
            }
        }

        let mut m = Matching {
            flow,
            na,
            nb,
            a_edges,
        };
        m.flow.max_flow(s, t);
        m
    }

    fn is_perfect(&self) -> bool {
        self.flow.total == (self.na + self.nb) as i64
    }

    fn extract(&self, fa: &[Bar], fb: &[Bar]) -> Vec<(MatchEnd, MatchEnd)> {
        let mut out = Vec::with_capacity(fa.len() + fb.len());
        let mut b_taken = vec![false; self.nb];
        for (i, x) in fa.iter().enumerate() {
            let mut end: MatchEnd = None;
            for &(e, j) in &self.a_edges[i] {
                if self.flow.edge_flow(e) > 0 {
                    if j != usize::MAX {
                        end = Some(fb[j]);
                        b_taken[j] = true;
                    }
                    break;
                }
            }
            out.push((Some(*x), end));
        }
        for (j, y) in fb.iter().enumerate() {
            if !b_taken[j] {
                out.push((None, Some(*y)));
            }
        }
        out
    }
}

struct DinicEdge {
    to: usize,
    cap: i64,
}

struct Dinic {
    edges: Vec<DinicEdge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
    total: i64,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
            total: 0,
        }
    }

    /// Returns the forward edge id.
    fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.edges.len();
        self.adj[from].push(id);
        self.edges.push(DinicEdge { to, cap });
        self.adj[to].push(id + 1);
        self.edges.push(DinicEdge { to: from, cap: 0 });
        id
    }

    fn edge_flow(&self, id: usize) -> i64 {
        self.edges[id ^ 1].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let edge = &self.edges[e];
                if edge.cap > 0 && self.level[edge.to] < 0 {
                    self.level[edge.to] = self.level[u] + 1;
                    queue.push_back(edge.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let e = self.adj[u][self.iter[u]];
            let (to, cap) = (self.edges[e].to, self.edges[e].cap);
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let d = self.dfs(to, t, pushed.min(cap));
                if d > 0 {
                    self.edges[e].cap -= d;
                    self.edges[e ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) {
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                self.total += f;
            }
        }
    }
}

/// Bottleneck distance between two clouds' Rips diagrams in one dimension,
/// alongside the Hausdorff distance between the clouds. In edge-length units
/// the stability theorem guarantees `w <= 2 h` (up to rounding).
pub fn stability_gap(
    cloud_a: &PointCloud,
    cloud_b: &PointCloud,
    dim: usize,
    max_dim: usize,
) -> Result<(f64, f64)> {
    if max_dim < dim + 1 {
        return Err(Error::input(format!(
            "need max_dim >= {} for homology dimension {dim}",
            dim + 1
        )));
    }
    let da = DistanceMatrix::from_cloud(cloud_a)?;
    let db = DistanceMatrix::from_cloud(cloud_b)?;
    let fa = rips_filtration(&da, max_dim, RipsThreshold::Auto)?;
    let fb = rips_filtration(&db, max_dim, RipsThreshold::Auto)?;
    let dgm_a = persistent_homology(&fa, dim)?;
    let dgm_b = persistent_homology(&fb, dim)?;
    let w = bottleneck(&dgm_a, &dgm_b, dim).value;
    let h = hausdorff(cloud_a, cloud_b)?;
    Ok((w, h))
}
