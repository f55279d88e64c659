//! Plain-text formats.
//!
//! ```text
//! metric <n>            graph <n>
//! d <i> <j> <value>     e <u> <v> <length>
//! ```
//!
//! Blank lines and anything after `#` are ignored. Metric files list each
//! pair `i < j` exactly once.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::instances::Instance;
use crate::metric::FiniteMetric;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((k + 1, fields))
    })
}

fn field<T: std::str::FromStr>(line: usize, fields: &[&str], k: usize, what: &str) -> Result<T> {
    let raw = fields.get(k).ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    raw.parse().map_err(|_| parse_err(line, format!("bad {what} `{raw}`")))
}

fn header(line: usize, fields: &[&str], keyword: &str) -> Result<usize> {
    if fields.first() != Some(&keyword) || fields.len() != 2 {
        return Err(parse_err(line, format!("expected `{keyword} <n>`")));
    }
    field(line, fields, 1, "size")
}

pub fn parse_metric(text: &str) -> Result<FiniteMetric> {
    let mut lines = content_lines(text);
    let (l0, head) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let n = header(l0, &head, "metric")?;
    let mut rows = vec![vec![f64::NAN; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (line, f) in lines {
        if f[0] != "d" || f.len() != 4 {
            return Err(parse_err(line, "expected `d <i> <j> <value>`"));
        }
        let i: usize = field(line, &f, 1, "index")?;
        let j: usize = field(line, &f, 2, "index")?;
        let v: f64 = field(line, &f, 3, "distance")?;
        if i >= j || j >= n {
            return Err(parse_err(line, format!("pair ({i}, {j}) needs i < j < {n}")));
        }
        if !rows[i][j].is_nan() {
            return Err(parse_err(line, format!("pair ({i}, {j}) given twice")));
        }
        rows[i][j] = v;
        rows[j][i] = v;
    }
    if let Some((i, j)) = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| rows[i][j].is_nan()) {
        return Err(Error::InvalidMetric(format!("distance ({i}, {j}) missing")));
    }
    FiniteMetric::from_matrix(rows)
}

pub fn write_metric(m: &FiniteMetric) -> String {
    let mut out = format!("metric {}\n", m.len());
    for (i, j, d) in m.pairs() {
        let _ = writeln!(out, "d {i} {j} {d}");
    }
    out
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = content_lines(text);
    let (l0, head) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let n = header(l0, &head, "graph")?;
    let mut g = WeightedGraph::new(n);
    for (line, f) in lines {
        if f[0] != "e" || f.len() != 4 {
            return Err(parse_err(line, "expected `e <u> <v> <length>`"));
        }
        let u = field(line, &f, 1, "vertex")?;
        let v = field(line, &f, 2, "vertex")?;
        let len = field(line, &f, 3, "length")?;
        g.add_edge(u, v, len).map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = format!("graph {}\n", g.n_vertices());
    for e in g.edges() {
        let _ = writeln!(out, "e {} {} {}", e.u, e.v, e.length);
    }
    out
}

/// Dispatches on the header keyword.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let first = content_lines(text).next().map(|(_, f)| f[0].to_string());
    match first.as_deref() {
        Some("metric") => parse_metric(text).map(Instance::Metric),
        Some("graph") => parse_graph(text).map(Instance::Graph),
        _ => Err(parse_err(1, "expected a `metric` or `graph` header")),
    }
}

pub fn write_instance(inst: &Instance) -> String {
    match inst {
        Instance::Graph(g) => write_graph(g),
        Instance::Metric(m) => write_metric(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{exponential_star, random_euclidean};

    #[test]
    fn metric_round_trip_is_exact() {
        let m = random_euclidean(12, 3, 7);
        let text = write_metric(&m);
        assert_eq!(parse_metric(&text).unwrap(), m);
        assert_eq!(write_metric(&parse_metric(&text).unwrap()), text);
    }

    #[test]
    fn graph_round_trip() {
        let g = exponential_star(5);
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# star\ngraph 3\n\ne 0 1 2  # first\ne 0 2 4\n").unwrap();
        assert_eq!(g.n_edges(), 2);
        let m = parse_metric("metric 2\nd 0 1 1.5\n").unwrap();
        assert_eq!(m.d(1, 0), 1.5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse_graph("graph 2\ne 0 5 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("graph 2\ne 0 1 -1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_metric("metric 3\nd 0 1 1\n"), Err(Error::InvalidMetric(_))));
        assert!(matches!(parse_metric("metric 2\nd 1 0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_metric("metric 2\nd 0 1 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_instance("points 3\n"), Err(Error::Parse { line: 1, .. })));
    }
}
