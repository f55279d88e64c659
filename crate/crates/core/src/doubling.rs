//! Doubling-constant estimation.
//!
//! Upper bounds come from covering closed balls `B(x, 2r)` by closed balls
//! `B(y, r)` centered at points of the space; lower bounds come from
//! `r/2`-separated subsets of a ball `B(x, r)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{exact_cover, greedy_cover, Bits};
use crate::metric::FiniteMetric;
use crate::tol;
use crate::PointId;

pub const DEFAULT_EXACT_MAX_N: usize = 64;

/// Above this many points the packing search uses a geometric radius grid
/// instead of every candidate radius.
pub const PACKING_FULL_RADII_MAX_N: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMode {
    ExactCover,
    GreedyCover,
}

/// The cover that realized the maximum: `cover` balls of radius `radius`
/// cover `B(center, 2 radius)` (in greedy mode, `B(center, 4 radius)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverWitness {
    pub center: PointId,
    pub radius: f64,
    pub cover: Vec<PointId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub lambda: usize,
    pub dim: f64,
    pub mode: CoverMode,
    pub witness: Option<CoverWitness>,
}

/// `points` lie in `B(center, radius)` and are pairwise at least
/// `radius / 2` apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingWitness {
    pub center: PointId,
    pub radius: f64,
    pub points: Vec<PointId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub dim: f64,
    pub witness: Option<PackingWitness>,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub upper: Option<UpperBound>,
    pub lower: Option<LowerBound>,
}

impl DimensionEstimate {
    pub fn lambda_upper(&self) -> Option<usize> {
        self.upper.as_ref().map(|u| u.lambda)
    }

    pub fn dim_upper(&self) -> Option<f64> {
        self.upper.as_ref().map(|u| u.dim)
    }

    pub fn dim_lower(&self) -> Option<f64> {
        self.lower.as_ref().map(|l| l.dim)
    }

    pub fn mode(&self) -> Option<CoverMode> {
        self.upper.as_ref().map(|u| u.mode)
    }

    pub fn merge(self, other: DimensionEstimate) -> DimensionEstimate {
        DimensionEstimate {
            upper: self.upper.or(other.upper),
            lower: self.lower.or(other.lower),
        }
    }
}

/// Both bounds.
pub fn estimate_dimension(m: &FiniteMetric, exact_max_n: usize) -> DimensionEstimate {
    doubling_estimate(m, exact_max_n).merge(packing_lower_bound(m))
}

/// Minimum number of closed balls `B(y, r)`, `y` in the space, covering
/// `B(x, 2r)`. Exact branch-and-bound when `exact` is set, greedy
/// otherwise. Returns the ball centers in ascending order.
pub fn min_ball_cover(m: &FiniteMetric, x: PointId, r: f64, exact: bool) -> Vec<PointId> {
    cover_ball(m, x, 2.0 * r, r, exact)
}

fn cover_ball(m: &FiniteMetric, x: PointId, big: f64, small: f64, exact: bool) -> Vec<PointId> {
    let universe = m.ball(x, big);
    if universe.len() == 1 {
        return universe;
    }
    let mut centers = Vec::new();
    let mut sets = Vec::new();
    for y in 0..m.len() {
        let mut s = Bits::empty(universe.len());
        for (k, &z) in universe.iter().enumerate() {
            if tol::le(m.d(y, z), small) {
                s.insert(k);
            }
        }
        if !s.is_empty() {
            centers.push(y);
            sets.push(s);
        }
    }
    let chosen = if exact {
        exact_cover(universe.len(), &sets)
    } else {
        greedy_cover(universe.len(), &sets)
    }
    .expect("every point covers itself");
    let mut out: Vec<PointId> = chosen.into_iter().map(|k| centers[k]).collect();
    out.sort_unstable();
    out
}

/// Greedy cover of `B(x, big)` by balls of radius `small` centered at the
/// first uncovered point in ascending id order.
fn net_cover(m: &FiniteMetric, x: PointId, big: f64, small: f64) -> Vec<PointId> {
    let universe = m.ball(x, big);
    crate::metric::greedy_net_of(m, &universe, small)
}

/// Candidate radii for center `x`: the cover count of `B(x, 2r)` only
/// increases where the big ball grows, i.e. at `r = d(x, z) / 2`; between
/// those values it can only fall as the small balls grow.
fn center_radii(m: &FiniteMetric, x: PointId) -> Vec<f64> {
    let mut radii: Vec<f64> = (0..m.len()).filter(|&z| z != x).map(|z| m.d(x, z) / 2.0).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| tol::approx_eq(*a, *b));
    radii
}

/// Doubling-constant upper estimate.
///
/// With `n <= exact_max_n` this is the exact doubling constant under the
/// closed-ball convention. Otherwise each center is probed on the dyadic
/// grid `r_k = 2^k min_d / 2`, bounding every `r` in `[r_k, 2 r_k)` by a
/// greedy cover of `B(x, 4 r_k)` with radius-`r_k` balls; the result is
/// still an upper bound on the doubling constant.
pub fn doubling_estimate(m: &FiniteMetric, exact_max_n: usize) -> DimensionEstimate {
    let n = m.len();
    let exact = n <= exact_max_n;
    let mode = if exact { CoverMode::ExactCover } else { CoverMode::GreedyCover };
    let trivial = UpperBound {
        lambda: 1,
        dim: 0.0,
        mode,
        witness: None,
    };
    let Some(min_d) = m.min_distance() else {
        return DimensionEstimate {
            upper: Some(trivial),
            lower: None,
        };
    };
    let diameter = m.diameter();

    let per_center: Vec<Option<CoverWitness>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best: Option<CoverWitness> = None;
            let mut consider = |r: f64, cover: Vec<PointId>| {
                if best.as_ref().is_none_or(|b| cover.len() > b.cover.len()) {
                    best = Some(CoverWitness { center: x, radius: r, cover });
                }
            };
            if exact {
                for r in center_radii(m, x) {
                    let cover = cover_ball(m, x, 2.0 * r, r, true);
                    consider(r, cover);
                }
            } else {
                let mut r = min_d / 2.0;
                while r < diameter {
                    let cover = net_cover(m, x, 4.0 * r, r);
                    consider(r, cover);
                    r *= 2.0;
                }
            }
            best
        })
        .collect();

    let mut best: Option<CoverWitness> = None;
    for w in per_center.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| w.cover.len() > b.cover.len()) {
            best = Some(w);
        }
    }
    let upper = match best {
        Some(w) if w.cover.len() > 1 => UpperBound {
            lambda: w.cover.len(),
            dim: (w.cover.len() as f64).log2(),
            mode,
            witness: Some(w),
        },
        _ => trivial,
    };
    DimensionEstimate {
        upper: Some(upper),
        lower: None,
    }
}

/// Greedy `r/2`-separated subset of `B(x, r)`, scanning ascending id.
pub fn separated_subset(m: &FiniteMetric, x: PointId, r: f64) -> Vec<PointId> {
    let mut kept: Vec<PointId> = Vec::new();
    for y in m.ball(x, r) {
        if kept.iter().all(|&z| tol::ge(m.d(y, z), r / 2.0)) {
            kept.push(y);
        }
    }
    kept
}

/// Re-checks a packing witness by direct distance evaluation.
pub fn verify_packing(m: &FiniteMetric, w: &PackingWitness) -> bool {
    w.points.iter().all(|&p| p < m.len() && tol::le(m.d(w.center, p), w.radius))
        && w.points.iter().enumerate().all(|(a, &p)| {
            w.points[a + 1..]
                .iter()
                .all(|&q| p != q && tol::ge(m.d(p, q), w.radius / 2.0))
        })
}

/// Packing lower bound on the doubling dimension: the best
/// `(1/2) log2 |S|` over centers and radii, where `S` is an
/// `r/2`-separated subset of `B(x, r)`.
pub fn packing_lower_bound(m: &FiniteMetric) -> DimensionEstimate {
    let n = m.len();
    let Some(min_d) = m.min_distance() else {
        return DimensionEstimate {
            upper: None,
            lower: Some(LowerBound {
                dim: 0.0,
                witness: None,
                verified: true,
            }),
        };
    };
    let diameter = m.diameter();
    let per_center: Vec<PackingWitness> = (0..n)
        .into_par_iter()
        .map(|x| {
            let radii: Vec<f64> = if n <= PACKING_FULL_RADII_MAX_N {
                let mut rs: Vec<f64> = (0..n).filter(|&z| z != x).map(|z| m.d(x, z)).collect();
                rs.sort_by(f64::total_cmp);
                rs.dedup_by(|a, b| tol::approx_eq(*a, *b));
                rs
            } else {
                let step = 2f64.powf(0.25);
                let mut rs = Vec::new();
                let mut r = min_d;
                while r <= diameter * step {
                    rs.push(r);
                    r *= step;
                }
                rs
            };
            let mut best = PackingWitness {
                center: x,
                radius: 0.0,
                points: vec![x],
            };
            for r in radii {
                let s = separated_subset(m, x, r);
                if s.len() > best.points.len() {
                    best = PackingWitness {
                        center: x,
                        radius: r,
                        points: s,
                    };
                }
            }
            best
        })
        .collect();
    let mut best: Option<PackingWitness> = None;
    for w in per_center {
        if best.as_ref().is_none_or(|b| w.points.len() > b.points.len()) {
            best = Some(w);
        }
    }
    let w = best.expect("n >= 2");
    let verified = verify_packing(m, &w);
    DimensionEstimate {
        upper: None,
        lower: Some(LowerBound {
            dim: 0.5 * (w.points.len() as f64).log2(),
            witness: Some(w),
            verified,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{lcp_metric, uniform_metric};

    #[test]
    fn single_point() {
        let m = uniform_metric(1, 1.0);
        let e = estimate_dimension(&m, 64);
        assert_eq!(e.lambda_upper(), Some(1));
        assert_eq!(e.dim_upper(), Some(0.0));
        assert_eq!(e.dim_lower(), Some(0.0));
    }

    #[test]
    fn uniform_four() {
        let m = uniform_metric(4, 1.0);
        let e = estimate_dimension(&m, 64);
        assert_eq!(e.lambda_upper(), Some(4));
        assert_eq!(e.dim_upper(), Some(2.0));
        assert_eq!(e.mode(), Some(CoverMode::ExactCover));
        let w = e.upper.unwrap().witness.unwrap();
        assert_eq!((w.center, w.radius), (0, 0.5));
        let low = e.lower.unwrap();
        assert_eq!(low.dim, 1.0);
        assert!(low.verified);
        assert_eq!(low.witness.unwrap().points, vec![0, 1, 2, 3]);
    }

    #[test]
    fn lcp_two() {
        let e = doubling_estimate(&lcp_metric(2), 64);
        assert_eq!(e.lambda_upper(), Some(2));
        assert_eq!(e.dim_upper(), Some(1.0));
        // B(00, 4) = everything, covered by B(00, 2) and B(10, 2)
        assert_eq!(min_ball_cover(&lcp_metric(2), 0, 2.0, true), vec![0, 2]);
    }

    #[test]
    fn greedy_mode_bounds_exact() {
        let m = lcp_metric(4);
        let exact = doubling_estimate(&m, 64).lambda_upper().unwrap();
        let greedy = doubling_estimate(&m, 0);
        assert_eq!(greedy.mode(), Some(CoverMode::GreedyCover));
        assert!(greedy.lambda_upper().unwrap() >= exact);
    }

    #[test]
    fn tampered_packing_fails_verification() {
        let m = uniform_metric(4, 1.0);
        let w = PackingWitness {
            center: 0,
            radius: 3.0,
            points: vec![0, 1, 2],
        };
        assert!(!verify_packing(&m, &w));
    }
}
