//! Bounded-degree `(1+eps)`-spanner over a net-tree.
//!
//! Pipeline: pair net points level by level into base edge sets `E_i`,
//! direct every pair toward the endpoint that survives longer in the
//! net-tree, then let vertices with many in-edge levels donate their
//! high-level in-edges to a close low-level neighbor.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::epsilon::Epsilon;
use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::metric::{shortest_path_metric, verify_stretch, FiniteMetric, StretchReport};
use crate::net_tree::{level_radius, NetTree};
use crate::tol;
use crate::PointId;

/// A pair `{u, v}` (u < v) of level-`level` net points, first admitted
/// at that level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseEdge {
    pub u: PointId,
    pub v: PointId,
    pub level: usize,
    /// Distance in the net-tree's scaled units.
    pub scaled_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub from: PointId,
    pub to: PointId,
    pub level: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Directed away from this endpoint.
    A,
    /// Directed into this endpoint and kept.
    B,
    /// Received by this endpoint through donation.
    C,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::A => "A",
            EdgeKind::B => "B",
            EdgeKind::C => "C",
        })
    }
}

/// Spanner edge. `source` is the type-A endpoint and `target` the
/// endpoint that holds it as type-B (kept) or type-C (donated).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpannerEdge {
    pub source: PointId,
    pub target: PointId,
    /// Metric distance between the endpoints, original units.
    pub length: f64,
    /// Level of the base pair this edge came from.
    pub level: usize,
    pub target_kind: EdgeKind,
    pub donor: Option<PointId>,
    /// For donated edges, the length of the base pair `{source, donor}`.
    pub original_length: Option<f64>,
}

impl SpannerEdge {
    pub fn endpoints(&self) -> (PointId, PointId) {
        (self.source.min(self.target), self.source.max(self.target))
    }

    pub fn kind_at(&self, w: PointId) -> Option<EdgeKind> {
        if w == self.source {
            Some(EdgeKind::A)
        } else if w == self.target {
            Some(self.target_kind)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanner {
    pub graph: WeightedGraph,
    pub edges: Vec<SpannerEdge>,
    pub eps: Epsilon,
    pub net_tree: NetTree,
    pub max_degree: usize,
    pub stretch: StretchReport,
}

/// `E_i` for `i = 1..=top`; index 0 is empty.
///
/// `E_i` holds the pairs of level-`i` labels within `C_eps * 2^i` (scaled)
/// that no lower level admitted.
pub fn build_base_edge_sets(m: &FiniteMetric, t: &NetTree, eps: Epsilon) -> Vec<Vec<BaseEdge>> {
    assert_eq!(m.len(), t.n_points(), "net-tree built over a different metric");
    let scaled = t.scaled_metric();
    let n = m.len();
    let c = eps.c_eps();
    let mut admitted = vec![false; n * n];
    let mut sets = vec![Vec::new(); t.top_level() + 1];
    for (i, set) in sets.iter_mut().enumerate().skip(1) {
        let mut labels: Vec<PointId> = t.labels(i).collect();
        labels.sort_unstable();
        let limit = c * level_radius(i);
        for (a, &u) in labels.iter().enumerate() {
            for &v in &labels[a + 1..] {
                let d = scaled.d(u, v);
                if !admitted[u * n + v] && tol::le(d, limit) {
                    admitted[u * n + v] = true;
                    assert!(
                        tol::gt(d, c * level_radius(i - 1)),
                        "pair {{{u},{v}}} at level {i} is shorter than its bracket"
                    );
                    set.push(BaseEdge {
                        u,
                        v,
                        level: i,
                        scaled_length: d,
                    });
                }
            }
        }
    }
    sets
}

/// Directs each pair toward the endpoint with larger `istar`; ties go to
/// the larger id.
pub fn assign_directions(sets: &[Vec<BaseEdge>], t: &NetTree) -> Vec<DirectedEdge> {
    let istar = |v| t.istar(v).expect("label of the tree");
    sets.iter()
        .flatten()
        .map(|e| {
            let (from, to) = match istar(e.u).cmp(&istar(e.v)) {
                std::cmp::Ordering::Less => (e.u, e.v),
                std::cmp::Ordering::Greater => (e.v, e.u),
                std::cmp::Ordering::Equal => (e.u, e.v),
            };
            DirectedEdge { from, to, level: e.level }
        })
        .collect()
}

/// Degree reduction by donation.
///
/// For each vertex `x` (ascending id), its in-edges are grouped by level
/// into nonempty groups `F_1 < F_2 < ...`. The first `lag` groups stay.
/// Every edge `{y, x}` of a later group `F_j` is replaced by `{y, u}`,
/// where `{u, x}` is the lowest-source edge of `F_(j - lag)`. Donated
/// edges are not reprocessed. Pairs that collide keep the shorter edge.
pub fn donate_edges(directed: &[DirectedEdge], m: &FiniteMetric, eps: Epsilon) -> Vec<SpannerEdge> {
    let lag = eps.donation_lag();
    let mut incoming: BTreeMap<PointId, BTreeMap<usize, Vec<PointId>>> = BTreeMap::new();
    for e in directed {
        incoming.entry(e.to).or_default().entry(e.level).or_default().push(e.from);
    }
    let mut out: Vec<SpannerEdge> = Vec::with_capacity(directed.len());
    for (&x, groups) in &incoming {
        let groups: Vec<(usize, Vec<PointId>)> = groups
            .iter()
            .map(|(&level, sources)| {
                let mut s = sources.clone();
                s.sort_unstable();
                (level, s)
            })
            .collect();
        for (j, (level, sources)) in groups.iter().enumerate() {
            if j < lag {
                for &y in sources {
                    out.push(SpannerEdge {
                        source: y,
                        target: x,
                        length: m.d(y, x),
                        level: *level,
                        target_kind: EdgeKind::B,
                        donor: None,
                        original_length: None,
                    });
                }
            } else {
                let u = groups[j - lag].1[0];
                for &y in sources {
                    out.push(SpannerEdge {
                        source: y,
                        target: u,
                        length: m.d(y, u),
                        level: *level,
                        target_kind: EdgeKind::C,
                        donor: Some(x),
                        original_length: Some(m.d(y, x)),
                    });
                }
            }
        }
    }
    let mut best: BTreeMap<(PointId, PointId), SpannerEdge> = BTreeMap::new();
    for e in out {
        best.entry(e.endpoints())
            .and_modify(|cur| {
                if e.length < cur.length {
                    *cur = e;
                }
            })
            .or_insert(e);
    }
    best.into_values().collect()
}

/// Full construction with the stretch check attached.
pub fn build_spanner(m: &FiniteMetric, eps: Epsilon) -> Result<Spanner> {
    let t = NetTree::build(m, eps);
    let sets = build_base_edge_sets(m, &t, eps);
    let directed = assign_directions(&sets, &t);
    let edges = donate_edges(&directed, m, eps);
    let mut graph = WeightedGraph::new(m.len());
    for e in &edges {
        let (u, v) = e.endpoints();
        graph.add_edge(u, v, e.length)?;
    }
    let stretch = verify_stretch(m, &shortest_path_metric(&graph)?, eps.value(), false)?;
    Ok(Spanner {
        max_degree: graph.max_degree(),
        graph,
        edges,
        eps,
        net_tree: t,
        stretch,
    })
}

impl Spanner {
    /// `meta <u> <v> level=<i> kind=<A|B|C> donor=<id|->` per edge, where
    /// `<u>` is the type-A endpoint and `kind` is the edge's type at `<v>`.
    pub fn meta_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let donor = e.donor.map_or_else(|| "-".to_string(), |d| d.to_string());
            out.push_str(&format!(
                "meta {} {} level={} kind={} donor={}\n",
                e.source, e.target, e.level, e.target_kind, donor
            ));
        }
        out
    }

    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for v in 0..self.graph.n_vertices() {
            *h.entry(self.graph.degree(v)).or_insert(0) += 1;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::uniform_metric;

    fn quarter() -> Epsilon {
        Epsilon::new(0.25).unwrap()
    }

    #[test]
    fn pair_lands_in_first_level() {
        // scaled distance 256: 132 < 256 <= 264
        let m = uniform_metric(2, 5.0);
        let t = NetTree::build(&m, quarter());
        let sets = build_base_edge_sets(&m, &t, quarter());
        let all: Vec<_> = sets.iter().flatten().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].level, 1);
        assert_eq!(all[0].scaled_length, 256.0);
    }

    #[test]
    fn uniform_pairs_all_in_e1() {
        let m = uniform_metric(6, 1.0);
        let t = NetTree::build(&m, quarter());
        let sets = build_base_edge_sets(&m, &t, quarter());
        assert_eq!(sets[1].len(), 15);
        assert!(sets[2..].iter().all(Vec::is_empty));
    }

    #[test]
    fn single_point_has_no_edges() {
        let m = uniform_metric(1, 1.0);
        let t = NetTree::build(&m, quarter());
        assert!(build_base_edge_sets(&m, &t, quarter()).iter().all(Vec::is_empty));
        let s = build_spanner(&m, quarter()).unwrap();
        assert_eq!(s.graph.n_edges(), 0);
        assert!(s.stretch.pass);
    }

    #[test]
    fn directions() {
        let m = FiniteMetric::from_fn(3, |i, j| if i + j == 1 { 1.0 } else { 8.0 }).unwrap();
        let t = NetTree::build(&m, quarter());
        // 1 merges into 0 early; 0 and 2 survive longer
        assert!(t.istar(1).unwrap() < t.istar(0).unwrap());
        let sets = build_base_edge_sets(&m, &t, quarter());
        let directed = assign_directions(&sets, &t);
        let e01 = directed.iter().find(|e| e.from.min(e.to) == 0 && e.from.max(e.to) == 1).unwrap();
        assert_eq!((e01.from, e01.to), (1, 0));
        let e12 = directed.iter().find(|e| e.from.min(e.to) == 1 && e.from.max(e.to) == 2).unwrap();
        assert_eq!((e12.from, e12.to), (1, 2));
        assert!(assign_directions(&[], &t).is_empty());
    }

    #[test]
    fn equal_istar_points_to_larger_id() {
        let sets = vec![
            vec![],
            vec![BaseEdge {
                u: 0,
                v: 1,
                level: 1,
                scaled_length: 256.0,
            }],
        ];
        // uniform over three points: 1 and 2 share istar
        let m = uniform_metric(3, 1.0);
        let t = NetTree::build(&m, quarter());
        assert_eq!(t.istar(1), t.istar(2));
        let sets = vec![
            sets[0].clone(),
            vec![BaseEdge {
                u: 1,
                v: 2,
                level: 1,
                scaled_length: 256.0,
            }],
        ];
        let d = assign_directions(&sets, &t);
        assert_eq!((d[0].from, d[0].to), (1, 2));
    }

    #[test]
    fn few_groups_means_no_donation() {
        let m = uniform_metric(5, 1.0);
        let t = NetTree::build(&m, quarter());
        let directed = assign_directions(&build_base_edge_sets(&m, &t, quarter()), &t);
        let edges = donate_edges(&directed, &m, quarter());
        assert_eq!(edges.len(), directed.len());
        assert!(edges.iter().all(|e| e.donor.is_none() && e.target_kind == EdgeKind::B));
    }

    #[test]
    fn two_point_spanner() {
        let m = uniform_metric(2, 3.0);
        let s = build_spanner(&m, quarter()).unwrap();
        assert_eq!(s.graph.n_edges(), 1);
        assert_eq!(s.stretch.max_ratio, 1.0);
        assert_eq!(s.meta_lines(), "meta 1 0 level=1 kind=B donor=-\n");
    }
}
