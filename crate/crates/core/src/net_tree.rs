//! Hierarchical net-trees.
//!
//! The input metric is rescaled so its smallest distance is exactly
//! `2^tau`. Level 0 holds every point; level `i` keeps a greedy
//! `2^i`-net of the labels of level `i - 1`, scanned in ascending id.
//! Construction stops at the first level with a single label.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::epsilon::Epsilon;
use crate::error::{Error, Result};
use crate::metric::{greedy_net_of, FiniteMetric};
use crate::tol;
use crate::PointId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub label: PointId,
    /// Index into the next level; `None` only at the top.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetTree {
    levels: Vec<Vec<Node>>,
    scale: f64,
    scaled: FiniteMetric,
    istar: Vec<usize>,
}

/// `r_i = 2^i` in scaled units.
pub fn level_radius(i: usize) -> f64 {
    2f64.powi(i as i32)
}

impl NetTree {
    pub fn build(m: &FiniteMetric, eps: Epsilon) -> NetTree {
        let scale = match m.min_distance() {
            Some(d) => eps.min_scaled_distance() / d,
            None => 1.0,
        };
        let scaled = m.scaled(scale);
        let mut labels: Vec<Vec<PointId>> = vec![(0..m.len()).collect()];
        while labels.last().expect("level 0").len() > 1 {
            let i = labels.len();
            let next = greedy_net_of(&scaled, labels.last().unwrap(), level_radius(i));
            labels.push(next);
        }
        let mut levels: Vec<Vec<Node>> = Vec::with_capacity(labels.len());
        for (i, level) in labels.iter().enumerate() {
            let nodes = level
                .iter()
                .map(|&label| {
                    let parent = labels.get(i + 1).map(|above| {
                        above.iter().position(|&p| p == label).unwrap_or_else(|| {
                            // lowest id among covering labels
                            let r = level_radius(i + 1);
                            let mut covering: Vec<(PointId, usize)> = above
                                .iter()
                                .enumerate()
                                .filter(|(_, &p)| tol::le(scaled.d(label, p), r))
                                .map(|(k, &p)| (p, k))
                                .collect();
                            covering.sort_unstable();
                            covering.first().expect("net covers the level below").1
                        })
                    });
                    Node { label, parent }
                })
                .collect();
            levels.push(nodes);
        }
        Self::from_parts(levels, scale, scaled)
    }

    /// Assembles a tree without checking it; see [`validate_net_tree`].
    pub fn from_parts(levels: Vec<Vec<Node>>, scale: f64, scaled: FiniteMetric) -> NetTree {
        let mut istar = vec![0; scaled.len()];
        for (i, level) in levels.iter().enumerate() {
            for node in level {
                if node.label < istar.len() {
                    istar[node.label] = i;
                }
            }
        }
        NetTree {
            levels,
            scale,
            scaled,
            istar,
        }
    }

    pub fn levels(&self) -> &[Vec<Node>] {
        &self.levels
    }

    pub fn into_parts(self) -> (Vec<Vec<Node>>, f64, FiniteMetric) {
        (self.levels, self.scale, self.scaled)
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Factor applied to the input distances.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The input metric in scaled units.
    pub fn scaled_metric(&self) -> &FiniteMetric {
        &self.scaled
    }

    pub fn labels(&self, i: usize) -> impl Iterator<Item = PointId> + '_ {
        self.levels[i].iter().map(|n| n.label)
    }

    pub fn n_points(&self) -> usize {
        self.scaled.len()
    }

    /// Highest level whose label set contains `v`.
    pub fn istar(&self, v: PointId) -> Result<usize> {
        self.istar.get(v).copied().ok_or(Error::UnknownPoint(v))
    }

    /// Label of the level-`i` ancestor of the leaf labeled `v`.
    pub fn level_ancestor_label(&self, v: PointId, i: usize) -> Result<PointId> {
        if v >= self.n_points() {
            return Err(Error::UnknownPoint(v));
        }
        if i > self.top_level() {
            return Err(Error::LevelOutOfRange {
                level: i,
                top: self.top_level(),
            });
        }
        let mut idx = self.levels[0]
            .iter()
            .position(|n| n.label == v)
            .ok_or(Error::UnknownPoint(v))?;
        for level in 0..i {
            idx = self.levels[level][idx].parent.ok_or(Error::LevelOutOfRange {
                level: i,
                top: level,
            })?;
        }
        Ok(self.levels[i][idx].label)
    }

    /// One line per node: `node <level> <index> <label> <parent-index-or-->`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, level) in self.levels.iter().enumerate() {
            for (k, node) in level.iter().enumerate() {
                let parent = node.parent.map_or_else(|| "-".to_string(), |p| p.to_string());
                writeln!(out, "node {i} {k} {} {parent}", node.label).unwrap();
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    Structure,
    LeafBijection,
    SameLabelChild,
    NestedLabels,
    NetPacking,
    NetCovering,
    ParentDistance,
    SingleRoot,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Structure => "structure",
            Clause::LeafBijection => "leaf bijection",
            Clause::SameLabelChild => "same-label child",
            Clause::NestedLabels => "nested labels",
            Clause::NetPacking => "net packing",
            Clause::NetCovering => "net covering",
            Clause::ParentDistance => "parent distance",
            Clause::SingleRoot => "single root",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub clause: Option<Clause>,
    pub detail: Option<String>,
}

impl ValidationReport {
    fn ok() -> Self {
        ValidationReport {
            pass: true,
            clause: None,
            detail: None,
        }
    }

    fn fail(clause: Clause, detail: String) -> Self {
        ValidationReport {
            pass: false,
            clause: Some(clause),
            detail: Some(detail),
        }
    }
}

/// Checks every net-tree condition against `m` (original units; the
/// tree's scale is applied here). Reports the first violated clause.
pub fn validate_net_tree(t: &NetTree, m: &FiniteMetric) -> ValidationReport {
    let n = m.len();
    let d = |a: PointId, b: PointId| m.d(a, b) * t.scale;
    let levels = &t.levels;
    if levels.is_empty() {
        return ValidationReport::fail(Clause::Structure, "no levels".into());
    }
    if t.n_points() != n {
        return ValidationReport::fail(Clause::Structure, format!("tree over {} points, metric has {n}", t.n_points()));
    }
    for (i, level) in levels.iter().enumerate() {
        for (k, node) in level.iter().enumerate() {
            if node.label >= n {
                return ValidationReport::fail(Clause::Structure, format!("node ({i},{k}) has unknown label {}", node.label));
            }
            match (node.parent, levels.get(i + 1)) {
                (Some(p), Some(above)) if p < above.len() => {}
                (None, None) => {}
                _ => {
                    return ValidationReport::fail(
                        Clause::Structure,
                        format!("node ({i},{k}) has an invalid parent link"),
                    )
                }
            }
        }
    }

    let mut seen = vec![false; n];
    for node in &levels[0] {
        if std::mem::replace(&mut seen[node.label], true) {
            return ValidationReport::fail(Clause::LeafBijection, format!("label {} repeats among leaves", node.label));
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return ValidationReport::fail(Clause::LeafBijection, format!("point {v} has no leaf"));
    }

    for i in 1..levels.len() {
        let below = &levels[i - 1];
        let here = &levels[i];
        for (k, node) in here.iter().enumerate() {
            if !below.iter().any(|c| c.parent == Some(k) && c.label == node.label) {
                return ValidationReport::fail(
                    Clause::SameLabelChild,
                    format!("node ({i},{k}) labeled {} has no child with its label", node.label),
                );
            }
        }
        let below_labels: Vec<PointId> = below.iter().map(|c| c.label).collect();
        for node in here {
            if !below_labels.contains(&node.label) {
                return ValidationReport::fail(Clause::NestedLabels, format!("label {} at level {i} is absent at level {}", node.label, i - 1));
            }
        }
        let r = level_radius(i);
        for (a, x) in here.iter().enumerate() {
            for y in &here[a + 1..] {
                if tol::lt(d(x.label, y.label), r) {
                    return ValidationReport::fail(
                        Clause::NetPacking,
                        format!("labels {} and {} at level {i} are closer than {r}", x.label, y.label),
                    );
                }
            }
        }
        for &v in &below_labels {
            if !here.iter().any(|x| tol::le(d(v, x.label), r)) {
                return ValidationReport::fail(Clause::NetCovering, format!("label {v} at level {} is not covered at level {i}", i - 1));
            }
        }
    }

    for (i, level) in levels.iter().enumerate().take(levels.len() - 1) {
        let r = level_radius(i + 1);
        for (k, node) in level.iter().enumerate() {
            let p = levels[i + 1][node.parent.expect("checked")].label;
            if !tol::le(d(node.label, p), r) {
                return ValidationReport::fail(
                    Clause::ParentDistance,
                    format!("node ({i},{k}) labeled {} is farther than {r} from parent label {p}", node.label),
                );
            }
        }
    }
    if levels.last().map(Vec::len) != Some(1) {
        return ValidationReport::fail(Clause::SingleRoot, "top level is not a single node".into());
    }
    ValidationReport::ok()
}
