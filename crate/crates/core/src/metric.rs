//! Finite metric spaces, shortest-path metrics, greedy nets and stretch
//! verification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::tol;
use crate::PointId;

/// `n` points with a dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    n: usize,
    dist: Vec<f64>,
}

impl FiniteMetric {
    /// Builds a metric from a full matrix, checking symmetry, positivity
    /// and the triangle inequality.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            dist.extend_from_slice(row);
        }
        let m = FiniteMetric { n, dist };
        m.check_axioms()?;
        m.check_triangle()?;
        Ok(m)
    }

    /// Builds a metric from `d(i, j)` evaluated for `i < j`. The caller
    /// guarantees the triangle inequality; symmetry, zero diagonal and
    /// positivity are checked.
    pub fn from_fn(n: usize, mut d: impl FnMut(PointId, PointId) -> f64) -> Result<Self> {
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d(i, j);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        let m = FiniteMetric { n, dist };
        m.check_axioms()?;
        Ok(m)
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.dist[i * n + i] != 0.0 {
                return Err(Error::InvalidMetric(format!("d({i},{i}) != 0")));
            }
            for j in (i + 1)..n {
                let a = self.dist[i * n + j];
                if a != self.dist[j * n + i] {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) is not symmetric")));
                }
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) = {a} is not positive")));
                }
            }
        }
        Ok(())
    }

    /// Triangle inequality with relative tolerance; O(n^3).
    pub fn check_triangle(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    if !tol::le(self.d(i, j), self.d(i, k) + self.d(k, j)) {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: PointId, j: PointId) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: PointId) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    /// Iterates `(i, j, d)` over unordered pairs `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (PointId, PointId, f64)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.d(i, j))))
    }

    pub fn min_distance(&self) -> Option<f64> {
        self.pairs().map(|(_, _, d)| d).min_by(f64::total_cmp)
    }

    pub fn diameter(&self) -> f64 {
        self.pairs().map(|(_, _, d)| d).fold(0.0, f64::max)
    }

    /// All distances multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> FiniteMetric {
        FiniteMetric {
            n: self.n,
            dist: self.dist.iter().map(|d| d * factor).collect(),
        }
    }

    /// The submetric on `points`, re-indexed `0..points.len()` in the
    /// given order.
    pub fn restrict(&self, points: &[PointId]) -> FiniteMetric {
        let k = points.len();
        let mut dist = vec![0.0; k * k];
        for (a, &i) in points.iter().enumerate() {
            for (b, &j) in points.iter().enumerate() {
                dist[a * k + b] = self.d(i, j);
            }
        }
        FiniteMetric { n: k, dist }
    }

    /// Points `y` with `d(x, y) <= r` in ascending id order.
    pub fn ball(&self, x: PointId, r: f64) -> Vec<PointId> {
        (0..self.n).filter(|&y| tol::le(self.d(x, y), r)).collect()
    }
}

/// Shortest-path metric of a connected graph.
pub fn shortest_path_metric(g: &WeightedGraph) -> Result<FiniteMetric> {
    g.check_connected()?;
    let n = g.n_vertices();
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| g.dijkstra(s)).collect();
    let mut dist = Vec::with_capacity(n * n);
    for row in &rows {
        dist.extend_from_slice(row);
    }
    // Dijkstra from i and from j may round differently.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    Ok(FiniteMetric { n, dist })
}

/// Greedy net over `candidates` (scanned in the given order): a candidate
/// is kept unless some already-kept point lies within distance `r`.
///
/// The result is an `r`-covering of `candidates` and its points are
/// pairwise more than `r` apart.
pub fn greedy_net_of(m: &FiniteMetric, candidates: &[PointId], r: f64) -> Vec<PointId> {
    let mut kept: Vec<PointId> = Vec::new();
    for &p in candidates {
        if kept.iter().all(|&q| tol::gt(m.d(p, q), r)) {
            kept.push(p);
        }
    }
    kept
}

/// Greedy `r`-net of the whole metric, scanning points in ascending id.
pub fn greedy_net(m: &FiniteMetric, r: f64) -> Vec<PointId> {
    let all: Vec<PointId> = (0..m.len()).collect();
    greedy_net_of(m, &all, r)
}

/// Outcome of comparing two metrics on the same point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub min_pair: Option<(PointId, PointId)>,
    pub max_pair: Option<(PointId, PointId)>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub pass: bool,
    /// First pair (in `(i, j)` order) whose ratio leaves the allowed band.
    pub violation: Option<(PointId, PointId, f64)>,
}

/// Checks `test / base` on every pair against `[1, 1+eps]`, or against
/// `[(1+eps)^-1, 1+eps]` when `allow_contraction` is set.
pub fn verify_stretch(base: &FiniteMetric, test: &FiniteMetric, eps: f64, allow_contraction: bool) -> Result<StretchReport> {
    if base.len() != test.len() {
        return Err(Error::SizeMismatch {
            left: base.len(),
            right: test.len(),
        });
    }
    let upper = 1.0 + eps;
    let lower = if allow_contraction { 1.0 / upper } else { 1.0 };
    let mut report = StretchReport {
        min_ratio: 1.0,
        max_ratio: 1.0,
        min_pair: None,
        max_pair: None,
        lower_bound: lower,
        upper_bound: upper,
        pass: true,
        violation: None,
    };
    let mut first = true;
    for (i, j, d) in base.pairs() {
        let ratio = test.d(i, j) / d;
        if first || ratio < report.min_ratio {
            report.min_ratio = ratio;
            report.min_pair = Some((i, j));
        }
        if first || ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.max_pair = Some((i, j));
        }
        first = false;
        if report.violation.is_none() && !(tol::ge(ratio, lower) && tol::le(ratio, upper)) {
            report.violation = Some((i, j, ratio));
            report.pass = false;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{exponential_star, lcp_metric, uniform_metric};

    #[test]
    fn path_metric() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        assert_eq!(m.d(0, 2), 5.0);
    }

    #[test]
    fn star_metric() {
        let m = shortest_path_metric(&exponential_star(3)).unwrap();
        assert_eq!(m.d(1, 2), 6.0);
        assert_eq!(m.d(2, 3), 12.0);
    }

    #[test]
    fn disconnected() {
        let g = WeightedGraph::new(2);
        assert_eq!(shortest_path_metric(&g), Err(Error::DisconnectedGraph { a: 0, b: 1 }));
    }

    #[test]
    fn matrix_validation() {
        assert!(FiniteMetric::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetric::from_matrix(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(FiniteMetric::from_matrix(bad).is_err());
    }

    #[test]
    fn greedy_net_examples() {
        let u = uniform_metric(4, 1.0);
        assert_eq!(greedy_net(&u, 0.5), vec![0, 1, 2, 3]);
        assert_eq!(greedy_net(&u, 1.5), vec![0]);
        // ids 0..3 are 00, 01, 10, 11
        assert_eq!(greedy_net(&lcp_metric(2), 3.0), vec![0, 2]);
    }

    #[test]
    fn stretch_examples() {
        let base = shortest_path_metric(&exponential_star(4)).unwrap();
        let same = verify_stretch(&base, &base, 0.25, false).unwrap();
        assert!(same.pass);
        assert_eq!(same.max_ratio, 1.0);

        let grown = base.scaled(1.1);
        let r = verify_stretch(&base, &grown, 0.25, false).unwrap();
        assert!(r.pass);
        assert!((r.max_ratio - 1.1).abs() < 1e-12);

        let mut rows: Vec<Vec<f64>> = (0..base.len()).map(|i| base.row(i).to_vec()).collect();
        rows[1][3] *= 0.9;
        rows[3][1] *= 0.9;
        let shrunk = FiniteMetric::from_fn(base.len(), |i, j| rows[i][j]).unwrap();
        let r = verify_stretch(&base, &shrunk, 0.25, false).unwrap();
        assert!(!r.pass);
        assert_eq!(r.violation.map(|v| (v.0, v.1)), Some((1, 3)));
        // the same shrink is allowed in two-sided mode
        assert!(verify_stretch(&base, &shrunk, 0.25, true).unwrap().pass);
    }

    #[test]
    fn size_mismatch() {
        let a = uniform_metric(3, 1.0);
        let b = uniform_metric(4, 1.0);
        assert_eq!(verify_stretch(&a, &b, 0.1, false), Err(Error::SizeMismatch { left: 3, right: 4 }));
    }
}
