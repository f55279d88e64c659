//! Tree completion: attach an exponential tail to every vertex and move
//! each edge up the tails to the level matching its length. Distances
//! among the original vertices stay within `1 + eps`, and the convex
//! closure of the result has doubling dimension independent of `n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::closure::{audit_with_metric, conv_sample_metric, AuditResult, ConvexClosure};
use crate::doubling::{estimate_dimension, DimensionEstimate};
use crate::epsilon::Epsilon;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::{shortest_path_metric, verify_stretch, FiniteMetric, StretchReport};
use crate::net_tree::NetTree;
use crate::VertexId;

/// `G` plus one tail path per vertex; tail edge `j` has scaled length `2^j`.
#[derive(Debug, Clone)]
pub struct Tails {
    pub graph: WeightedGraph,
    /// `(u, j) -> u_[j]` for `j >= 1`.
    pub index: BTreeMap<(VertexId, usize), VertexId>,
    pub scale: f64,
}

impl Tails {
    /// `u_[j]`, with `u_[0] = u`.
    pub fn vertex(&self, u: VertexId, j: usize) -> Option<VertexId> {
        if j == 0 {
            (u < self.graph.n_vertices()).then_some(u)
        } else {
            self.index.get(&(u, j)).copied()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftedEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub level: usize,
    pub new_u: VertexId,
    pub new_v: VertexId,
    /// In original units.
    pub length: f64,
    /// Endpoints share the same ancestor; no edge was added.
    pub collapsed: bool,
}

#[derive(Debug, Clone)]
pub struct Completion {
    pub output: WeightedGraph,
    pub tail_index: BTreeMap<(VertexId, usize), VertexId>,
    pub lifted: Vec<LiftedEdge>,
    /// Multiply original lengths by this to get the net-tree units.
    pub scale: f64,
    pub n_original: usize,
    pub input_is_tree: bool,
}

impl Completion {
    pub fn tail_vertex(&self, u: VertexId, j: usize) -> Option<VertexId> {
        if j == 0 {
            (u < self.n_original).then_some(u)
        } else {
            self.tail_index.get(&(u, j)).copied()
        }
    }

    /// Number of tail edges hanging off `u`.
    pub fn tail_len(&self, u: VertexId) -> usize {
        self.tail_index.range((u, 1)..=(u, usize::MAX)).count()
    }

    pub fn sidecar_lines(&self) -> String {
        let mut out = String::new();
        for (&(u, j), &w) in &self.tail_index {
            out.push_str(&format!("tail {u} {j} {w}\n"));
        }
        for l in &self.lifted {
            out.push_str(&format!("lift {} {} {} {} {}\n", l.u, l.v, l.level, l.new_u, l.new_v));
        }
        out
    }
}

pub fn attach_tails(g: &WeightedGraph, t: &NetTree) -> Result<Tails> {
    if t.n_points() != g.n_vertices() {
        return Err(Error::SizeMismatch {
            left: g.n_vertices(),
            right: t.n_points(),
        });
    }
    let scale = t.scale();
    let mut graph = g.clone();
    let mut index = BTreeMap::new();
    for u in 0..g.n_vertices() {
        let mut prev = u;
        for j in 1..=t.istar(u)? {
            let w = graph.add_vertex();
            graph.add_edge(prev, w, 2f64.powi(j as i32) / scale)?;
            index.insert((u, j), w);
            prev = w;
        }
    }
    Ok(Tails { graph, index, scale })
}

/// Replaces every original edge `{u, v}` with `{u^_[i], v^_[i]}` of the
/// same length, where `i` is the length's bracket level and `u^`, `v^`
/// are the level-`i` net-tree ancestors.
pub fn lift_edges(tails: &Tails, g: &WeightedGraph, t: &NetTree, eps: Epsilon) -> Result<Completion> {
    let mut output = tails.graph.clone();
    let mut lifted = Vec::with_capacity(g.n_edges());
    for e in g.edges() {
        let scaled = e.length * tails.scale;
        let level = eps.bracket_level(scaled).ok_or(Error::LevelUnderflow {
            length: scaled,
            c_eps: eps.c_eps(),
        })?;
        let hu = t.level_ancestor_label(e.u, level)?;
        let hv = t.level_ancestor_label(e.v, level)?;
        let new_u = tails.vertex(hu, level).expect("ancestor survives to the edge's level");
        let new_v = tails.vertex(hv, level).expect("ancestor survives to the edge's level");
        let id = output.find_edge(e.u, e.v).expect("original edge present");
        output.remove_edge(id);
        let collapsed = new_u == new_v;
        if !collapsed {
            output.add_or_shorten(new_u, new_v, e.length)?;
        }
        lifted.push(LiftedEdge {
            u: e.u,
            v: e.v,
            level,
            new_u,
            new_v,
            length: e.length,
            collapsed,
        });
    }
    Ok(Completion {
        output,
        tail_index: tails.index.clone(),
        lifted,
        scale: tails.scale,
        n_original: g.n_vertices(),
        input_is_tree: g.is_tree(),
    })
}

/// Net tree, tails, lifting. `g` must be connected; tree inputs give tree
/// outputs.
pub fn complete_tree(g: &WeightedGraph, eps: Epsilon) -> Result<Completion> {
    let metric = shortest_path_metric(g)?;
    let t = NetTree::build(&metric, eps);
    let tails = attach_tails(g, &t)?;
    lift_edges(&tails, g, &t, eps)
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletionReport {
    pub stretch: StretchReport,
    /// `None` when the input is not a tree.
    pub tree_preserved: Option<bool>,
    pub audit: AuditResult,
    /// `None` when sampling was skipped.
    pub conv_dimension: Option<DimensionEstimate>,
    pub pass: bool,
}

/// Distances of the completion restricted to the original vertices.
pub fn restricted_metric(c: &Completion) -> Result<(FiniteMetric, FiniteMetric)> {
    let full = shortest_path_metric(&c.output)?;
    let orig: Vec<VertexId> = (0..c.n_original).collect();
    Ok((full.restrict(&orig), full))
}

/// Stretch on original vertices (contraction allowed), tree-ness, the
/// long-edge audit and, when `samples_per_edge` is given, a sampled
/// dimension estimate of the output's convex closure.
pub fn verify_completion(
    g: &WeightedGraph,
    c: &Completion,
    eps: Epsilon,
    samples_per_edge: Option<usize>,
    exact_max_n: usize,
) -> Result<CompletionReport> {
    let base = shortest_path_metric(g)?;
    let (restricted, full) = restricted_metric(c)?;
    let stretch = verify_stretch(&base, &restricted, eps.value(), true)?;
    let tree_preserved = g.is_tree().then(|| c.output.is_tree());
    let audit = audit_with_metric(&c.output, &full);
    let conv_dimension = match samples_per_edge {
        Some(s) => {
            let closure = ConvexClosure::new(&c.output)?;
            Some(estimate_dimension(&conv_sample_metric(&closure, s), exact_max_n))
        }
        None => None,
    };
    let pass = stretch.pass && tree_preserved != Some(false);
    Ok(CompletionReport {
        stretch,
        tree_preserved,
        audit,
        conv_dimension,
        pass,
    })
}
