//! Brute-force oracles. Deliberately naive and independent of the
//! library's algorithms; only the basic data types are shared.
#![allow(dead_code, clippy::needless_range_loop)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use convex_completion::closure::ConvPoint;
use convex_completion::{FiniteMetric, WeightedGraph};

pub const REL: f64 = 1e-9;

pub fn le(a: f64, b: f64) -> bool {
    a <= b + REL * a.abs().max(b.abs())
}

/// Plain adjacency lists `(neighbor, length)`.
pub fn adjacency(g: &WeightedGraph) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); g.n_vertices()];
    for e in g.edges() {
        adj[e.u].push((e.v, e.length));
        adj[e.v].push((e.u, e.length));
    }
    adj
}

#[derive(PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

pub fn dijkstra(adj: &[Vec<(usize, f64)>], s: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Reverse((Key(0.0), s)));
    while let Some(Reverse((Key(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, l) in &adj[v] {
            if d + l < dist[w] {
                dist[w] = d + l;
                heap.push(Reverse((Key(d + l), w)));
            }
        }
    }
    dist
}

/// Floyd-Warshall; small graphs only.
pub fn floyd(g: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = g.n_vertices();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in g.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.length);
        d[e.v][e.u] = d[e.u][e.v];
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Connected and `|E| = |V| - 1`, by union-find.
pub fn is_tree(g: &WeightedGraph) -> bool {
    let n = g.n_vertices();
    if g.n_edges() + 1 != n {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut comps = n;
    for e in g.edges() {
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps == 1
}

/// All-pairs stretch ratios `test / base` over `pairs`; returns `(min, max)`.
pub fn ratio_range(base: &FiniteMetric, test: &[Vec<f64>]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..base.len() {
        for j in (i + 1)..base.len() {
            let r = test[i][j] / base.d(i, j);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (lo, hi)
}

/// Distances among the first `k` vertices of `g` by Dijkstra.
pub fn leading_distances(g: &WeightedGraph, k: usize) -> Vec<Vec<f64>> {
    let adj = adjacency(g);
    (0..k).map(|s| dijkstra(&adj, s)[..k].to_vec()).collect()
}

/// Radii at which the doubling cover count can change, plus midpoints
/// and one value past the end.
fn critical_radii(m: &FiniteMetric) -> Vec<f64> {
    let mut vals = Vec::new();
    for i in 0..m.len() {
        for j in 0..m.len() {
            if i != j {
                vals.push(m.d(i, j));
                vals.push(m.d(i, j) / 2.0);
            }
        }
    }
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    let mut out = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        out.push(v);
        if let Some(&next) = vals.get(k + 1) {
            out.push((v + next) / 2.0);
        }
    }
    if let Some(&last) = vals.last() {
        out.push(2.0 * last);
    }
    out
}

/// Exact doubling constant by exhaustive subset search; `n <= 12`.
pub fn brute_lambda(m: &FiniteMetric) -> usize {
    let n = m.len();
    assert!(n <= 12);
    if n <= 1 {
        return 1;
    }
    let mut best = 1;
    for x in 0..n {
        for &r in &critical_radii(m) {
            let ball: u32 = (0..n).filter(|&y| le(m.d(x, y), 2.0 * r)).fold(0, |acc, y| acc | (1 << y));
            let cover_of = |c: usize| (0..n).filter(|&y| le(m.d(c, y), r)).fold(0u32, |acc, y| acc | (1 << y));
            let covers: Vec<u32> = (0..n).map(cover_of).collect();
            let need = (1..=n)
                .find(|&k| subsets(n, k).any(|s| s.iter().fold(0u32, |a, &c| a | covers[c]) & ball == ball))
                .unwrap();
            best = best.max(need);
        }
    }
    best
}

fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).filter(move |s| s.count_ones() as usize == k).map(move |s| (0..n).filter(|&i| s >> i & 1 == 1).collect())
}

/// Largest `S` inside some `B(x, r)` with pairwise distances `>= r/2`,
/// by exhaustive clique search.
pub fn max_packing(m: &FiniteMetric) -> usize {
    fn grow(adj: &[Vec<bool>], cand: &[usize], size: usize, best: &mut usize) {
        if size + cand.len() <= *best {
            return;
        }
        let Some((&v, rest)) = cand.split_first() else {
            *best = size;
            return;
        };
        let next: Vec<usize> = rest.iter().copied().filter(|&w| adj[v][w]).collect();
        grow(adj, &next, size + 1, best);
        grow(adj, rest, size, best);
    }
    let n = m.len();
    let mut best = n.min(1);
    for x in 0..n {
        for z in 0..n {
            let r = m.d(x, z);
            if r == 0.0 {
                continue;
            }
            let ball: Vec<usize> = (0..n).filter(|&y| le(m.d(x, y), r)).collect();
            let adj: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| le(r / 2.0, m.d(a, b))).collect()).collect();
            grow(&adj, &ball, 0, &mut best);
        }
    }
    best
}

/// Maximum long-edge count over a dense set of radii: every event value
/// and seven evenly spaced radii inside each gap between events.
pub fn dense_grid_audit(g: &WeightedGraph) -> usize {
    let d = floyd(g);
    let n = g.n_vertices();
    let mut events: Vec<f64> = d.iter().flatten().copied().chain(g.edges().iter().map(|e| e.length)).collect();
    events.push(0.0);
    events.sort_by(f64::total_cmp);
    events.dedup();
    let mut radii = Vec::new();
    for w in events.windows(2) {
        for k in 1..=8 {
            radii.push(w[0] + (w[1] - w[0]) * k as f64 / 8.0);
        }
    }
    let mut best = 0;
    for u in 0..n {
        for &r in &radii {
            let count = g
                .edges()
                .iter()
                .filter(|e| d[u][e.u].min(d[u][e.v]) <= r && e.length > r)
                .count();
            best = best.max(count);
        }
    }
    best
}

/// Distances between conv points computed by splitting edges at the
/// points and running Dijkstra on the refined graph.
pub fn subdivided_distances(g: &WeightedGraph, points: &[ConvPoint]) -> Vec<Vec<f64>> {
    let n = g.n_vertices();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut node_of = vec![0usize; points.len()];
    let mut cuts: Vec<Vec<(f64, usize)>> = vec![Vec::new(); g.n_edges()];
    for (k, p) in points.iter().enumerate() {
        match *p {
            ConvPoint::Vertex(v) => node_of[k] = v,
            ConvPoint::OnEdge { edge, offset } => {
                if let Some(&(_, id)) = cuts[edge].iter().find(|(o, _)| *o == offset) {
                    node_of[k] = id;
                } else {
                    adj.push(Vec::new());
                    node_of[k] = adj.len() - 1;
                    cuts[edge].push((offset, adj.len() - 1));
                }
            }
        }
    }
    for (id, e) in g.edges().iter().enumerate() {
        let mut chain = vec![(0.0, e.u)];
        let mut c = cuts[id].clone();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        chain.extend(c);
        chain.push((e.length, e.v));
        for w in chain.windows(2) {
            let l = w[1].0 - w[0].0;
            adj[w[0].1].push((w[1].1, l));
            adj[w[1].1].push((w[0].1, l));
        }
    }
    node_of
        .iter()
        .map(|&s| {
            let d = dijkstra(&adj, s);
            node_of.iter().map(|&t| d[t]).collect()
        })
        .collect()
}
