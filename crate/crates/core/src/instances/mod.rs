//! Instance generators, including the two lower-bound families: the
//! exponentially weighted star and the longest-common-prefix metric on
//! binary strings.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::FiniteMetric;

mod certificates;

pub use certificates::{
    crossing_midpoint_packing, lcp_crossing_check, star_lb_certificate, star_packing_size, CrossingReport,
};

/// `K_{1,n}` with center 0 and edge `{0, i}` of length `2^i`.
pub fn exponential_star(n: usize) -> WeightedGraph {
    let mut g = WeightedGraph::new(n + 1);
    for i in 1..=n {
        g.add_edge(0, i, 2f64.powi(i as i32)).expect("valid star edge");
    }
    g
}

/// `2^p` binary strings of length `p`, id = the string read as a binary
/// number, with `d(x, y) = 2^(p - lcp(x, y))`.
pub fn lcp_metric(p: u32) -> FiniteMetric {
    assert!((1..=20).contains(&p), "lcp metric needs 1 <= p <= 20");
    let n = 1usize << p;
    FiniteMetric::from_fn(n, |x, y| {
        // p - lcp is the bit length of x ^ y
        let differing = usize::BITS - (x ^ y).leading_zeros();
        2f64.powi(differing as i32)
    })
    .expect("lcp metric is valid")
}

/// Binary label of point `id` in `lcp_metric(p)`.
pub fn lcp_label(id: usize, p: u32) -> String {
    format!("{:0width$b}", id, width = p as usize)
}

/// All pairwise distances equal to `d`.
pub fn uniform_metric(n: usize, d: f64) -> FiniteMetric {
    FiniteMetric::from_fn(n, |_, _| d).expect("uniform metric is valid")
}

/// Euclidean metric on `n` points drawn uniformly from the unit cube.
pub fn random_euclidean(n: usize, ambient_dim: usize, seed: u64) -> FiniteMetric {
    let points = random_points(n, ambient_dim, seed);
    FiniteMetric::from_fn(n, |i, j| {
        points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
    .expect("distinct random points")
}

pub fn random_points(n: usize, ambient_dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..ambient_dim).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

/// Range of `log2(length)` for random tree edges.
pub const RANDOM_TREE_LOG_LENGTH: (f64, f64) = (0.0, 4.0);

/// Random recursive tree: vertex `k` attaches to a uniform earlier vertex;
/// lengths are log-uniform in `[1, 16)`.
pub fn random_tree(n: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::new(n);
    let (lo, hi) = RANDOM_TREE_LOG_LENGTH;
    for k in 1..n {
        let parent = rng.gen_range(0..k);
        let length = 2f64.powf(rng.gen_range(lo..hi));
        g.add_edge(parent, k, length).expect("valid tree edge");
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ExponentialStar,
    LcpHypercube,
    EuclideanRandom,
    RandomTree,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::ExponentialStar => "exponential-star",
            Family::LcpHypercube => "lcp-hypercube",
            Family::EuclideanRandom => "euclidean-random",
            Family::RandomTree => "random-tree",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential-star" | "star" => Ok(Family::ExponentialStar),
            "lcp-hypercube" | "lcp" => Ok(Family::LcpHypercube),
            "euclidean-random" | "euclidean" => Ok(Family::EuclideanRandom),
            "random-tree" | "tree" => Ok(Family::RandomTree),
            other => Err(Error::Parse {
                line: 1,
                msg: format!("unknown family `{other}`"),
            }),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A generated instance: graph families produce a graph, metric families
/// a bare metric.
#[derive(Debug, Clone)]
pub enum Instance {
    Graph(WeightedGraph),
    Metric(FiniteMetric),
}

/// Parameters for one generated instance. Generation is a pure function
/// of this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    /// Leaves for the star, points for euclidean, vertices for trees.
    pub n: usize,
    /// String length for the lcp metric.
    pub p: u32,
    pub dim: usize,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(family: Family) -> Self {
        InstanceSpec {
            family,
            n: 0,
            p: 0,
            dim: 2,
            seed: 0,
        }
    }

    pub fn star(n: usize) -> Self {
        InstanceSpec { n, ..Self::new(Family::ExponentialStar) }
    }

    pub fn lcp(p: u32) -> Self {
        InstanceSpec { p, ..Self::new(Family::LcpHypercube) }
    }

    pub fn euclidean(n: usize, dim: usize, seed: u64) -> Self {
        InstanceSpec { n, dim, seed, ..Self::new(Family::EuclideanRandom) }
    }

    pub fn tree(n: usize, seed: u64) -> Self {
        InstanceSpec { n, seed, ..Self::new(Family::RandomTree) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Parse { line: 1, msg: msg.to_string() });
        match self.family {
            Family::LcpHypercube if !(1..=12).contains(&self.p) => bad("lcp-hypercube needs 1 <= p <= 12"),
            Family::EuclideanRandom if self.dim == 0 => bad("euclidean-random needs dim >= 1"),
            Family::ExponentialStar if !(1..=60).contains(&self.n) => bad("exponential-star needs 1 <= n <= 60"),
            Family::EuclideanRandom | Family::RandomTree if self.n == 0 => bad("n must be at least 1"),
            _ => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<Instance> {
        self.validate()?;
        Ok(match self.family {
            Family::ExponentialStar => Instance::Graph(exponential_star(self.n)),
            Family::LcpHypercube => Instance::Metric(lcp_metric(self.p)),
            Family::EuclideanRandom => Instance::Metric(random_euclidean(self.n, self.dim, self.seed)),
            Family::RandomTree => Instance::Graph(random_tree(self.n, self.seed)),
        })
    }

    /// Size used for labeling: leaves, points, vertices, or `2^p`.
    pub fn size(&self) -> usize {
        match self.family {
            Family::LcpHypercube => 1usize << self.p,
            _ => self.n,
        }
    }
}

/// `family=<..> n=<..> p=<..> dim=<..> seed=<..>`
impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "family={} n={} p={} dim={} seed={}",
            self.family, self.n, self.p, self.dim, self.seed
        )
    }
}

impl FromStr for InstanceSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut family = None;
        let mut spec = InstanceSpec::new(Family::ExponentialStar);
        for tok in s.split_whitespace() {
            let (key, value) = tok.split_once('=').ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("expected key=value, got `{tok}`"),
            })?;
            let num = |v: &str| {
                v.parse::<u64>().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("`{key}` expects an integer, got `{v}`"),
                })
            };
            match key {
                "family" => family = Some(value.parse::<Family>()?),
                "n" => spec.n = num(value)? as usize,
                "p" => spec.p = num(value)? as u32,
                "dim" => spec.dim = num(value)? as usize,
                "seed" => spec.seed = num(value)?,
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        spec.family = family.ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing family=".into(),
        })?;
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_lengths() {
        let g = exponential_star(3);
        let lengths: Vec<f64> = g.edges().iter().map(|e| e.length).collect();
        assert_eq!(lengths, vec![2.0, 4.0, 8.0]);
        assert_eq!(exponential_star(1).edges()[0].length, 2.0);
    }

    #[test]
    fn lcp_distances() {
        let m = lcp_metric(2);
        assert_eq!(m.d(0, 1), 2.0);
        assert_eq!(m.d(0, 2), 4.0);
        assert_eq!(m.d(2, 3), 2.0);
        assert_eq!(lcp_label(2, 2), "10");
        let m1 = lcp_metric(1);
        assert_eq!(m1.len(), 2);
        assert_eq!(m1.d(0, 1), 2.0);
        m.check_triangle().unwrap();
    }

    #[test]
    fn seeded_generators_repeat() {
        assert_eq!(random_euclidean(1, 2, 5).len(), 1);
        assert_eq!(random_euclidean(30, 2, 7), random_euclidean(30, 2, 7));
        assert_ne!(random_euclidean(30, 2, 7), random_euclidean(30, 2, 8));
        let t = random_tree(50, 3);
        assert!(t.is_tree());
        assert_eq!(t, random_tree(50, 3));
        for e in t.edges() {
            assert!((1.0..16.0).contains(&e.length));
        }
    }

    #[test]
    fn spec_text_round_trip() {
        let s: InstanceSpec = "family=euclidean-random n=50 dim=2 seed=1".parse().unwrap();
        assert_eq!(s, InstanceSpec::euclidean(50, 2, 1));
        assert_eq!(s.to_string().parse::<InstanceSpec>().unwrap(), s);
        assert!("family=nope n=1".parse::<InstanceSpec>().is_err());
        assert!("n=1".parse::<InstanceSpec>().is_err());
    }
}
