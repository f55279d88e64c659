//! Executable lower-bound certificates for the two hard families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closure::{ConvPoint, ConvexClosure, PackingCertificate};
use crate::completion::Completion;
use crate::epsilon::Epsilon;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::PointId;

/// `floor(log2(1 / (2 eps)))`, the number of star leaves the packing uses.
pub fn star_packing_size(eps: Epsilon) -> usize {
    let k = (0.5 / eps.value()).log2();
    let rounded = k.round();
    if (k - rounded).abs() < 1e-9 {
        rounded as usize
    } else {
        k.floor() as usize
    }
}

/// In the convex closure of a star completion, walks distance 1 from the
/// center toward each of the first `star_packing_size(eps)` leaves and
/// certifies the resulting points lie in `B(v0, 2)` with pairwise
/// distances in `[1, 2]`.
pub fn star_lb_certificate(c: &Completion, eps: Epsilon) -> Result<PackingCertificate> {
    let k = star_packing_size(eps).max(1);
    let leaves = c.n_original.saturating_sub(1);
    if leaves < k {
        return Err(Error::TooFewLeaves { leaves, needed: k });
    }
    let closure = ConvexClosure::new(&c.output)?;
    let center = ConvPoint::Vertex(0);
    let points = (1..=k)
        .map(|i| closure.geodesic_point(center, ConvPoint::Vertex(i), 1.0))
        .collect::<Result<Vec<_>>>()?;
    PackingCertificate::measure(&closure, center, 2.0, points, 1.0, Some(2.0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub present: usize,
    pub total: usize,
    /// First absent pair `(0x, 1y)` in id order.
    pub missing: Option<(PointId, PointId)>,
}

impl CrossingReport {
    pub fn complete(&self) -> bool {
        self.present == self.total
    }
}

fn check_vertex_set(h: &WeightedGraph, p: u32) -> Result<usize> {
    let n = 1usize << p;
    if h.n_vertices() != n {
        return Err(Error::VertexSetMismatch {
            expected: n,
            found: h.n_vertices(),
        });
    }
    Ok(n)
}

/// Whether `h` joins every point starting with 0 to every point
/// starting with 1 by a direct edge.
pub fn lcp_crossing_check(h: &WeightedGraph, p: u32) -> Result<CrossingReport> {
    let n = check_vertex_set(h, p)?;
    let half = n / 2;
    let mut present = 0;
    let mut missing = None;
    for x in 0..half {
        for y in half..n {
            if h.find_edge(x, y).is_some() {
                present += 1;
            } else if missing.is_none() {
                missing = Some((x, y));
            }
        }
    }
    Ok(CrossingReport {
        present,
        total: half * half,
        missing,
    })
}

/// Midpoints `e[2^(p-1)]` of the crossing edges of `h`, certified to be
/// pairwise at least `2^p` apart. The upper end of the window is
/// `3 * 2^(p-1)`; the measured extremes are kept in the certificate.
pub fn crossing_midpoint_packing(h: &WeightedGraph, p: u32) -> Result<PackingCertificate> {
    let n = check_vertex_set(h, p)?;
    let half = n / 2;
    let offset = (1u64 << (p - 1)) as f64;
    let closure = ConvexClosure::new(h)?;
    let points: Vec<ConvPoint> = (0..half)
        .into_par_iter()
        .flat_map_iter(|x| {
            let closure = &closure;
            (half..n).filter_map(move |y| {
                let id = closure.graph().find_edge(x, y)?;
                (offset < closure.graph().edge(id).length).then(|| closure.point_from(id, x, offset))
            })
        })
        .collect();
    let center = points.first().copied().unwrap_or(ConvPoint::Vertex(0));
    PackingCertificate::measure(&closure, center, 3.0 * offset, points, 2.0 * offset, Some(3.0 * offset))
}
