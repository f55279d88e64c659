//! The convex closure `conv(G)`: every edge of `G` becomes a segment of
//! its length, and distances run along segments and shortest paths.
//!
//! Also houses the long-edge audit. An edge `{v, w}` is *long* for
//! `(u, r)` when one endpoint is within `r` of `u` and its length exceeds
//! `r`; the number of long edges controls the doubling dimension of the
//! closure in both directions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doubling::{estimate_dimension, DimensionEstimate};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, WeightedGraph};
use crate::metric::{shortest_path_metric, FiniteMetric};
use crate::tol;
use crate::VertexId;

/// A vertex, or the point at `offset` from the smaller endpoint of an
/// edge, with `0 < offset < length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConvPoint {
    Vertex(VertexId),
    OnEdge { edge: EdgeId, offset: f64 },
}

impl ConvPoint {
    pub fn on_edge(edge: EdgeId, offset: f64) -> ConvPoint {
        ConvPoint::OnEdge { edge, offset }
    }
}

/// `conv(G)` backed by the all-pairs shortest-path metric of `G`.
#[derive(Debug, Clone)]
pub struct ConvexClosure<'g> {
    g: &'g WeightedGraph,
    metric: FiniteMetric,
}

impl<'g> ConvexClosure<'g> {
    pub fn new(g: &'g WeightedGraph) -> Result<Self> {
        let metric = shortest_path_metric(g)?;
        Ok(ConvexClosure { g, metric })
    }

    pub fn graph(&self) -> &WeightedGraph {
        self.g
    }

    pub fn vertex_metric(&self) -> &FiniteMetric {
        &self.metric
    }

    pub fn check(&self, p: ConvPoint) -> Result<()> {
        match p {
            ConvPoint::Vertex(v) if v < self.g.n_vertices() => Ok(()),
            ConvPoint::Vertex(v) => Err(Error::InvalidPoint(format!("vertex {v} does not exist"))),
            ConvPoint::OnEdge { edge, offset } => {
                let Some(e) = self.g.edges().get(edge) else {
                    return Err(Error::InvalidPoint(format!("edge {edge} does not exist")));
                };
                if offset > 0.0 && offset < e.length {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!(
                        "offset {offset} outside (0, {}) on edge {edge}",
                        e.length
                    )))
                }
            }
        }
    }

    /// The point `t` along edge `edge` measured from endpoint `from`,
    /// snapped to a vertex at either end.
    pub fn point_from(&self, edge: EdgeId, from: VertexId, t: f64) -> ConvPoint {
        let e = self.g.edge(edge);
        let offset = if from == e.u { t } else { e.length - t };
        self.snap(edge, offset)
    }

    fn snap(&self, edge: EdgeId, offset: f64) -> ConvPoint {
        let e = self.g.edge(edge);
        let eps = 1e-12 * e.length;
        if offset <= eps {
            ConvPoint::Vertex(e.u)
        } else if offset >= e.length - eps {
            ConvPoint::Vertex(e.v)
        } else {
            ConvPoint::OnEdge { edge, offset }
        }
    }

    /// Exits of `p` onto the vertex set: `(vertex, distance along p's own
    /// segment)`.
    fn exits(&self, p: ConvPoint) -> Vec<(VertexId, f64)> {
        match p {
            ConvPoint::Vertex(v) => vec![(v, 0.0)],
            ConvPoint::OnEdge { edge, offset } => {
                let e = self.g.edge(edge);
                vec![(e.u, offset), (e.v, e.length - offset)]
            }
        }
    }

    fn same_edge_gap(p: ConvPoint, q: ConvPoint) -> Option<f64> {
        match (p, q) {
            (ConvPoint::OnEdge { edge: a, offset: x }, ConvPoint::OnEdge { edge: b, offset: y }) if a == b => {
                Some((x - y).abs())
            }
            _ => None,
        }
    }

    /// Unchecked distance; both points must be valid.
    pub fn dist(&self, p: ConvPoint, q: ConvPoint) -> f64 {
        let mut best = Self::same_edge_gap(p, q).unwrap_or(f64::INFINITY);
        for (a, da) in self.exits(p) {
            for (b, db) in self.exits(q) {
                best = best.min(da + self.metric.d(a, b) + db);
            }
        }
        best
    }

    pub fn distance(&self, p: ConvPoint, q: ConvPoint) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.dist(p, q))
    }

    /// Lexicographically smallest shortest vertex path from `a` to `b`.
    pub fn shortest_path(&self, a: VertexId, b: VertexId) -> Vec<(VertexId, Option<EdgeId>)> {
        let mut path = vec![(a, None)];
        let mut w = a;
        while w != b {
            let target = self.metric.d(w, b);
            let (z, id) = self
                .g
                .neighbors(w)
                .iter()
                .filter(|&&(z, id)| tol::approx_eq(self.g.edge(id).length + self.metric.d(z, b), target))
                .min_by_key(|&&(z, _)| z)
                .copied()
                .expect("some neighbor lies on a shortest path");
            path.push((z, Some(id)));
            w = z;
        }
        path
    }

    /// The point at distance `s` from `p` along a shortest route to `q`.
    /// Among equally short routes the one with the lexicographically
    /// smallest vertex sequence is walked (a direct run along a shared
    /// edge has the empty sequence).
    pub fn geodesic_point(&self, p: ConvPoint, q: ConvPoint, s: f64) -> Result<ConvPoint> {
        let total = self.distance(p, q)?;
        if !(s >= 0.0 && tol::le(s, total)) {
            return Err(Error::InvalidPoint(format!("arc length {s} outside [0, {total}]")));
        }
        if s == 0.0 {
            return Ok(p);
        }
        if let (Some(gap), ConvPoint::OnEdge { edge, offset: x }, ConvPoint::OnEdge { offset: y, .. }) =
            (Self::same_edge_gap(p, q), p, q)
        {
            if tol::approx_eq(gap, total) {
                let dir = if y >= x { 1.0 } else { -1.0 };
                return Ok(self.snap(edge, x + dir * s.min(gap)));
            }
        }
        let mut route: Option<(Vec<VertexId>, Vec<Segment>)> = None;
        for (a, da) in self.exits(p) {
            for (b, db) in self.exits(q) {
                if !tol::approx_eq(da + self.metric.d(a, b) + db, total) {
                    continue;
                }
                let path = self.shortest_path(a, b);
                let seq: Vec<VertexId> = path.iter().map(|&(v, _)| v).collect();
                if route.as_ref().is_some_and(|(best, _)| *best <= seq) {
                    continue;
                }
                let mut segs = Vec::new();
                if let ConvPoint::OnEdge { edge, offset } = p {
                    let e = self.g.edge(edge);
                    let dir = if a == e.u { -1.0 } else { 1.0 };
                    segs.push(Segment { edge, start: offset, dir, len: da });
                }
                for pair in path.windows(2) {
                    let (w, _) = pair[0];
                    let (_, id) = pair[1];
                    let id = id.expect("interior step has an edge");
                    let e = self.g.edge(id);
                    let (start, dir) = if w == e.u { (0.0, 1.0) } else { (e.length, -1.0) };
                    segs.push(Segment { edge: id, start, dir, len: e.length });
                }
                if let ConvPoint::OnEdge { edge, .. } = q {
                    let e = self.g.edge(edge);
                    let (start, dir) = if b == e.u { (0.0, 1.0) } else { (e.length, -1.0) };
                    segs.push(Segment { edge, start, dir, len: db });
                }
                route = Some((seq, segs));
            }
        }
        let (_, segs) = route.expect("the distance is realized by some route");
        let mut left = s;
        for seg in &segs {
            if left <= seg.len {
                return Ok(self.snap(seg.edge, seg.start + seg.dir * left));
            }
            left -= seg.len;
        }
        Ok(q)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    edge: EdgeId,
    start: f64,
    dir: f64,
    len: f64,
}

pub fn conv_distance(g: &WeightedGraph, p: ConvPoint, q: ConvPoint) -> Result<f64> {
    ConvexClosure::new(g)?.distance(p, q)
}

pub fn conv_geodesic_point(g: &WeightedGraph, p: ConvPoint, q: ConvPoint, s: f64) -> Result<ConvPoint> {
    ConvexClosure::new(g)?.geodesic_point(p, q, s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditWitness {
    pub u: VertexId,
    pub r: f64,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub max_count: usize,
    pub witness: Option<AuditWitness>,
    /// `max_r |L_u(r)|` per vertex.
    pub per_vertex_profile: Vec<usize>,
}

/// `L_u(r)` as edge ids.
pub fn long_edges(g: &WeightedGraph, metric: &FiniteMetric, u: VertexId, r: f64) -> Vec<EdgeId> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| tol::le(metric.d(u, e.u).min(metric.d(u, e.v)), r) && tol::gt(e.length, r))
        .map(|(id, _)| id)
        .collect()
}

/// Radii probed at `u`: every positive event value `d(u, endpoint)` or
/// `length(e)`, and the midpoint of each pair of consecutive events
/// (starting from 0). `|L_u(r)|` is constant between events.
pub fn audit_radii(g: &WeightedGraph, metric: &FiniteMetric, u: VertexId) -> Vec<f64> {
    let mut events: Vec<f64> = vec![0.0];
    for e in g.edges() {
        events.push(metric.d(u, e.u));
        events.push(metric.d(u, e.v));
        events.push(e.length);
    }
    events.sort_by(f64::total_cmp);
    events.dedup_by(|a, b| tol::approx_eq(*a, *b));
    let mut radii = Vec::with_capacity(2 * events.len());
    for (k, &ev) in events.iter().enumerate() {
        if k > 0 {
            radii.push((events[k - 1] + ev) / 2.0);
            radii.push(ev);
        }
    }
    radii
}

/// Maximum number of long edges over all vertices and radii.
pub fn long_edge_audit(g: &WeightedGraph) -> Result<AuditResult> {
    let metric = shortest_path_metric(g)?;
    Ok(audit_with_metric(g, &metric))
}

pub fn audit_with_metric(g: &WeightedGraph, metric: &FiniteMetric) -> AuditResult {
    let per_vertex: Vec<Option<AuditWitness>> = (0..g.n_vertices())
        .into_par_iter()
        .map(|u| {
            // edge e is long exactly for r in [near(e), length(e))
            let mut starts = Vec::new();
            let mut ends = Vec::new();
            for e in g.edges() {
                let near = metric.d(u, e.u).min(metric.d(u, e.v));
                if near < e.length {
                    starts.push(near);
                    ends.push(e.length);
                }
            }
            starts.sort_by(f64::total_cmp);
            ends.sort_by(f64::total_cmp);
            let count = |r: f64| {
                starts.partition_point(|&a| tol::le(a, r)) - ends.partition_point(|&b| tol::le(b, r))
            };
            let mut best: Option<(usize, f64)> = None;
            for r in audit_radii(g, metric, u) {
                let c = count(r);
                if c > 0 && best.is_none_or(|(b, _)| c > b) {
                    best = Some((c, r));
                }
            }
            best.map(|(_, r)| AuditWitness {
                u,
                r,
                edges: long_edges(g, metric, u, r),
            })
        })
        .collect();
    let per_vertex_profile = per_vertex
        .iter()
        .map(|w| w.as_ref().map_or(0, |w| w.edges.len()))
        .collect();
    let mut witness: Option<AuditWitness> = None;
    for w in per_vertex.into_iter().flatten() {
        if witness.as_ref().is_none_or(|b| w.edges.len() > b.edges.len()) {
            witness = Some(w);
        }
    }
    AuditResult {
        max_count: witness.as_ref().map_or(0, |w| w.edges.len()),
        witness,
        per_vertex_profile,
    }
}

/// Points of `conv(G)` certified to lie in a ball and be pairwise
/// separated, with every claim measured rather than assumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingCertificate {
    pub center: ConvPoint,
    pub ball_radius: f64,
    pub points: Vec<ConvPoint>,
    pub min_separation: f64,
    /// Upper end of the allowed pairwise window, if any.
    pub max_separation: Option<f64>,
    pub measured_min_pairwise: f64,
    pub measured_max_pairwise: f64,
    pub measured_max_center_distance: f64,
    pub verified: bool,
}

impl PackingCertificate {
    pub fn measure(
        closure: &ConvexClosure<'_>,
        center: ConvPoint,
        ball_radius: f64,
        points: Vec<ConvPoint>,
        min_separation: f64,
        max_separation: Option<f64>,
    ) -> Result<Self> {
        closure.check(center)?;
        for &p in &points {
            closure.check(p)?;
        }
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (a, &p) in points.iter().enumerate() {
            for &q in &points[a + 1..] {
                let d = closure.dist(p, q);
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        let reach = points.iter().map(|&p| closure.dist(center, p)).fold(0.0, f64::max);
        let verified = reach <= ball_radius + tol::cert_slack(ball_radius)
            && (points.len() < 2 || lo >= min_separation - tol::cert_slack(min_separation))
            && max_separation.is_none_or(|m| points.len() < 2 || hi <= m + tol::cert_slack(m));
        Ok(PackingCertificate {
            center,
            ball_radius,
            points,
            min_separation,
            max_separation,
            measured_min_pairwise: lo,
            measured_max_pairwise: hi,
            measured_max_center_distance: reach,
            verified,
        })
    }

    /// `(1/2) log2 |points|`, the doubling-dimension lower bound a
    /// verified certificate carries.
    pub fn dim_lower(&self) -> f64 {
        if self.points.is_empty() {
            0.0
        } else {
            0.5 * (self.points.len() as f64).log2()
        }
    }
}

/// `W = { e[r/2] : e in L_u(r) }`, the offset measured from the endpoint
/// nearer to `u`. The points lie in `B(u, 2r)` and are pairwise at least
/// `r` apart.
pub fn long_edge_packing_witness(g: &WeightedGraph, u: VertexId, r: f64) -> Result<PackingCertificate> {
    let closure = ConvexClosure::new(g)?;
    packing_witness_in(&closure, u, r)
}

pub fn packing_witness_in(closure: &ConvexClosure<'_>, u: VertexId, r: f64) -> Result<PackingCertificate> {
    let g = closure.graph();
    let metric = closure.vertex_metric();
    if u >= g.n_vertices() {
        return Err(Error::InvalidPoint(format!("vertex {u} does not exist")));
    }
    let edges = if r > 0.0 { long_edges(g, metric, u, r) } else { Vec::new() };
    if edges.is_empty() {
        return Err(Error::EmptyLongEdgeSet { u, r });
    }
    let points = edges
        .iter()
        .map(|&id| {
            let e = g.edge(id);
            let near = if metric.d(u, e.v) < metric.d(u, e.u) { e.v } else { e.u };
            closure.point_from(id, near, r / 2.0)
        })
        .collect();
    PackingCertificate::measure(closure, ConvPoint::Vertex(u), 2.0 * r, points, r, None)
}

/// Evenly spaced sample of `conv(G)`: the vertices, then
/// `e[j * len / (s + 1)]` for `j = 1..=s` on each edge in id order.
pub fn conv_sample(g: &WeightedGraph, samples_per_edge: usize) -> Vec<ConvPoint> {
    let mut pts: Vec<ConvPoint> = (0..g.n_vertices()).map(ConvPoint::Vertex).collect();
    for (id, e) in g.edges().iter().enumerate() {
        for j in 1..=samples_per_edge {
            pts.push(ConvPoint::on_edge(id, j as f64 * e.length / (samples_per_edge + 1) as f64));
        }
    }
    pts
}

/// The finite metric on [`conv_sample`].
pub fn conv_sample_metric(closure: &ConvexClosure<'_>, samples_per_edge: usize) -> FiniteMetric {
    let pts = conv_sample(closure.graph(), samples_per_edge);
    FiniteMetric::from_fn(pts.len(), |i, j| closure.dist(pts[i], pts[j])).expect("sample points are distinct")
}

/// Doubling estimate of a finite sample of `conv(G)`. The sample's lower
/// bound is a valid lower bound for `conv(G)` itself.
pub fn sampled_conv_dimension(g: &WeightedGraph, samples_per_edge: usize, exact_max_n: usize) -> Result<DimensionEstimate> {
    let closure = ConvexClosure::new(g)?;
    Ok(estimate_dimension(&conv_sample_metric(&closure, samples_per_edge), exact_max_n))
}
