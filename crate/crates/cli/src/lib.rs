//! Experiment driver: generate an instance, run one pipeline, verify it,
//! and render a deterministic report.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use convex_completion::closure::{
    audit_with_metric, conv_sample_metric, long_edge_audit, packing_witness_in, AuditWitness, ConvexClosure,
    PackingCertificate,
};
use convex_completion::completion::{complete_tree, verify_completion};
use convex_completion::doubling::{estimate_dimension, DimensionEstimate, DEFAULT_EXACT_MAX_N};
use convex_completion::instances::{
    crossing_midpoint_packing, lcp_crossing_check, star_lb_certificate, Family, Instance, InstanceSpec,
};
use convex_completion::io::{parse_instance, write_graph};
use convex_completion::metric::StretchReport;
use convex_completion::spanner::build_spanner;
use convex_completion::{shortest_path_metric, Epsilon, FiniteMetric, WeightedGraph};

/// Sampled closures larger than this are thinned (fewer samples per edge)
/// so the dimension estimate stays tractable.
pub const CONV_SAMPLE_MAX_POINTS: usize = 400;

pub const DEFAULT_SAMPLES_PER_EDGE: usize = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] convex_completion::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input or configuration, 1 for failures inside a pipeline.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(convex_completion::Error::Parse { .. } | convex_completion::Error::InvalidEpsilon(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Spanner,
    CompleteTree,
    AuditOnly,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Spanner => "spanner",
            Pipeline::CompleteTree => "complete-tree",
            Pipeline::AuditOnly => "audit-only",
        }
    }
}

impl FromStr for Pipeline {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "spanner" => Ok(Pipeline::Spanner),
            "complete-tree" => Ok(Pipeline::CompleteTree),
            "audit-only" | "audit" => Ok(Pipeline::AuditOnly),
            other => Err(CliError::Config(format!("unknown pipeline `{other}`"))),
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Generated(InstanceSpec),
    File(PathBuf),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Generated(spec) => write!(f, "{spec}"),
            Source::File(p) => write!(f, "file={}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub epsilon: f64,
    pub pipeline: Pipeline,
    pub samples_per_edge: usize,
    pub exact_max_n: usize,
}

impl RunConfig {
    pub fn new(source: Source, pipeline: Pipeline, epsilon: f64) -> Self {
        RunConfig {
            source,
            epsilon,
            pipeline,
            samples_per_edge: DEFAULT_SAMPLES_PER_EDGE,
            exact_max_n: DEFAULT_EXACT_MAX_N,
        }
    }

    pub fn epsilon(&self) -> CliResult<Epsilon> {
        Epsilon::new(self.epsilon).map_err(|_| {
            CliError::Config(format!("epsilon must lie in (0, 1/4], got {}", self.epsilon))
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        self.epsilon()?;
        if let Source::Generated(spec) = &self.source {
            spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }
}

/// `pipeline=<..> epsilon=<..> [samples=<..>] [exact_max_n=<..>]` followed
/// by instance keys (`family=.. n=..`) or `file=<path>`.
impl FromStr for RunConfig {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        let mut pipeline = None;
        let mut epsilon = None;
        let mut samples = DEFAULT_SAMPLES_PER_EDGE;
        let mut exact_max_n = DEFAULT_EXACT_MAX_N;
        let mut file = None;
        let mut rest = Vec::new();
        for tok in s.split_whitespace() {
            let Some((key, value)) = tok.split_once('=') else {
                return Err(CliError::Config(format!("expected key=value, got `{tok}`")));
            };
            let bad = |what: &str| CliError::Config(format!("`{key}` expects {what}, got `{value}`"));
            match key {
                "pipeline" => pipeline = Some(value.parse()?),
                "epsilon" => epsilon = Some(value.parse::<f64>().map_err(|_| bad("a number"))?),
                "samples" => samples = value.parse().map_err(|_| bad("a count"))?,
                "exact_max_n" => exact_max_n = value.parse().map_err(|_| bad("a count"))?,
                "file" => file = Some(PathBuf::from(value)),
                _ => rest.push(tok),
            }
        }
        let source = match file {
            Some(path) if rest.is_empty() => Source::File(path),
            Some(_) => return Err(CliError::Config("file= excludes instance keys".into())),
            None => Source::Generated(rest.join(" ").parse().map_err(|e: convex_completion::Error| {
                CliError::Config(e.to_string())
            })?),
        };
        let config = RunConfig {
            source,
            epsilon: epsilon.ok_or_else(|| CliError::Config("missing epsilon=".into()))?,
            pipeline: pipeline.ok_or_else(|| CliError::Config("missing pipeline=".into()))?,
            samples_per_edge: samples,
            exact_max_n,
        };
        config.validate()?;
        Ok(config)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pipeline={} epsilon={} samples={} exact_max_n={} {}",
            self.pipeline, self.epsilon, self.samples_per_edge, self.exact_max_n, self.source
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchSummary {
    pub min: f64,
    pub max: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub pass: bool,
    pub violation: Option<(usize, usize, f64)>,
}

impl From<&StretchReport> for StretchSummary {
    fn from(r: &StretchReport) -> Self {
        StretchSummary {
            min: r.min_ratio,
            max: r.max_ratio,
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            pass: r.pass,
            violation: r.violation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DimSummary {
    pub input_upper: Option<f64>,
    pub input_lower: Option<f64>,
    pub conv_sampled_upper: Option<f64>,
    pub conv_sampled_lower: Option<f64>,
    pub conv_samples_per_edge: Option<usize>,
    pub conv_sample_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub name: String,
    pub size: usize,
    pub verified: bool,
    pub dim_lower: f64,
    pub min_pairwise: f64,
    pub max_pairwise: f64,
    pub max_center_distance: f64,
}

impl CertificateSummary {
    pub fn new(name: &str, c: &PackingCertificate) -> Self {
        CertificateSummary {
            name: name.to_string(),
            size: c.points.len(),
            verified: c.verified,
            dim_lower: c.dim_lower(),
            min_pairwise: c.measured_min_pairwise,
            max_pairwise: c.measured_max_pairwise,
            max_center_distance: c.measured_max_center_distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingSummary {
    pub present: usize,
    pub total: usize,
    pub missing: Option<(usize, usize)>,
    /// The stretch guarantee forces every crossing edge at this epsilon.
    pub required: bool,
}

/// Everything a run computes. Reproducible bit-for-bit from the config;
/// timings live in [`RunOutput`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: String,
    pub pipeline: Pipeline,
    pub family: Option<Family>,
    pub n: usize,
    pub epsilon: f64,
    pub seed: Option<u64>,
    pub scale: Option<f64>,
    pub output_vertices: Option<usize>,
    pub output_edges: Option<usize>,
    pub stretch: Option<StretchSummary>,
    pub max_degree: Option<usize>,
    pub tree_preserved: Option<bool>,
    pub long_edge_max: Option<usize>,
    pub long_edge_witness: Option<AuditWitness>,
    pub dim: DimSummary,
    pub crossing: Option<CrossingSummary>,
    pub certificates: Vec<CertificateSummary>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub timings_ms: BTreeMap<String, f64>,
    /// Output graph in file format, when the pipeline builds one.
    pub artifact: Option<String>,
    pub sidecar: Option<String>,
}

struct Timer(BTreeMap<String, f64>);

impl Timer {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

fn load(source: &Source) -> CliResult<Instance> {
    match source {
        Source::Generated(spec) => Ok(spec.generate()?),
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(parse_instance(&text)?)
        }
    }
}

/// Sample density and size actually used for a closure of `g`.
fn conv_sampling(g: &WeightedGraph, requested: usize) -> Option<(usize, usize)> {
    let n = g.n_vertices();
    if n > CONV_SAMPLE_MAX_POINTS {
        return None;
    }
    let m = g.n_edges().max(1);
    let s = requested.min((CONV_SAMPLE_MAX_POINTS - n) / m);
    Some((s, n + s * g.n_edges()))
}

fn conv_dimension(g: &WeightedGraph, requested: usize, exact_max_n: usize, dim: &mut DimSummary) -> CliResult<()> {
    if let Some((s, points)) = conv_sampling(g, requested) {
        let closure = ConvexClosure::new(g)?;
        let est = estimate_dimension(&conv_sample_metric(&closure, s), exact_max_n);
        dim.conv_sampled_upper = est.dim_upper();
        dim.conv_sampled_lower = est.dim_lower();
        dim.conv_samples_per_edge = Some(s);
        dim.conv_sample_points = Some(points);
    }
    Ok(())
}

fn input_dimension(m: &FiniteMetric, exact_max_n: usize, dim: &mut DimSummary) -> DimensionEstimate {
    let est = estimate_dimension(m, exact_max_n);
    dim.input_upper = est.dim_upper();
    dim.input_lower = est.dim_lower();
    est
}

fn require_graph(inst: Instance, pipeline: Pipeline) -> CliResult<WeightedGraph> {
    match inst {
        Instance::Graph(g) => Ok(g),
        Instance::Metric(_) => Err(CliError::Config(format!("pipeline {pipeline} needs a graph instance"))),
    }
}

pub fn run(config: &RunConfig) -> CliResult<RunOutput> {
    config.validate()?;
    let eps = config.epsilon()?;
    let mut timer = Timer(BTreeMap::new());
    let inst = timer.time("load", || load(&config.source))?;
    let spec = match &config.source {
        Source::Generated(s) => Some(s.clone()),
        Source::File(_) => None,
    };
    let family = spec.as_ref().map(|s| s.family);
    let seed = spec
        .as_ref()
        .filter(|s| matches!(s.family, Family::EuclideanRandom | Family::RandomTree))
        .map(|s| s.seed);
    let mut report = RunReport {
        config: config.to_string(),
        pipeline: config.pipeline,
        family,
        n: 0,
        epsilon: config.epsilon,
        seed,
        scale: None,
        output_vertices: None,
        output_edges: None,
        stretch: None,
        max_degree: None,
        tree_preserved: None,
        long_edge_max: None,
        long_edge_witness: None,
        dim: DimSummary::default(),
        crossing: None,
        certificates: Vec::new(),
        pass: true,
    };
    let mut artifact = None;
    let mut sidecar = None;

    match config.pipeline {
        Pipeline::Spanner => {
            let metric = match inst {
                Instance::Metric(m) => m,
                Instance::Graph(g) => shortest_path_metric(&g)?,
            };
            report.n = metric.len();
            timer.time("input_dimension", || input_dimension(&metric, config.exact_max_n, &mut report.dim));
            let sp = timer.time("spanner", || build_spanner(&metric, eps))?;
            report.scale = Some(sp.net_tree.scale());
            report.output_vertices = Some(sp.graph.n_vertices());
            report.output_edges = Some(sp.graph.n_edges());
            report.max_degree = Some(sp.max_degree);
            report.stretch = Some((&sp.stretch).into());
            report.pass &= sp.stretch.pass;
            timer.time("conv_dimension", || {
                conv_dimension(&sp.graph, config.samples_per_edge, config.exact_max_n, &mut report.dim)
            })?;
            if let Some(s) = spec.as_ref().filter(|s| s.family == Family::LcpHypercube) {
                let cr = lcp_crossing_check(&sp.graph, s.p)?;
                let required = eps.value() <= 0.5f64.powi(s.p as i32 + 1);
                report.pass &= !required || cr.complete();
                report.crossing = Some(CrossingSummary {
                    present: cr.present,
                    total: cr.total,
                    missing: cr.missing,
                    required,
                });
                if cr.complete() {
                    let cert = timer.time("certificates", || crossing_midpoint_packing(&sp.graph, s.p))?;
                    report.pass &= cert.verified;
                    report.certificates.push(CertificateSummary::new("crossing-midpoints", &cert));
                }
            }
            artifact = Some(write_graph(&sp.graph));
            sidecar = Some(sp.meta_lines());
        }
        Pipeline::CompleteTree => {
            let g = require_graph(inst, config.pipeline)?;
            report.n = g.n_vertices();
            let base = shortest_path_metric(&g)?;
            timer.time("input_dimension", || input_dimension(&base, config.exact_max_n, &mut report.dim));
            let c = timer.time("completion", || complete_tree(&g, eps))?;
            report.scale = Some(c.scale);
            report.output_vertices = Some(c.output.n_vertices());
            report.output_edges = Some(c.output.n_edges());
            report.max_degree = Some(c.output.max_degree());
            let v = timer.time("verify", || verify_completion(&g, &c, eps, None, config.exact_max_n))?;
            report.stretch = Some((&v.stretch).into());
            report.tree_preserved = v.tree_preserved;
            report.long_edge_max = Some(v.audit.max_count);
            report.long_edge_witness = v.audit.witness.clone();
            report.pass &= v.pass;
            timer.time("conv_dimension", || {
                conv_dimension(&c.output, config.samples_per_edge, config.exact_max_n, &mut report.dim)
            })?;
            if family == Some(Family::ExponentialStar) {
                match star_lb_certificate(&c, eps) {
                    Ok(cert) => {
                        report.pass &= cert.verified;
                        report.certificates.push(CertificateSummary::new("star-geodesic", &cert));
                    }
                    Err(convex_completion::Error::TooFewLeaves { .. }) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            artifact = Some(write_graph(&c.output));
            sidecar = Some(c.sidecar_lines());
        }
        Pipeline::AuditOnly => {
            let g = require_graph(inst, config.pipeline)?;
            report.n = g.n_vertices();
            let base = shortest_path_metric(&g)?;
            timer.time("input_dimension", || input_dimension(&base, config.exact_max_n, &mut report.dim));
            let audit = timer.time("audit", || audit_with_metric(&g, &base));
            report.long_edge_max = Some(audit.max_count);
            if let Some(w) = &audit.witness {
                let closure = ConvexClosure::new(&g)?;
                let cert = packing_witness_in(&closure, w.u, w.r)?;
                report.pass &= cert.verified;
                report.certificates.push(CertificateSummary::new("long-edge-packing", &cert));
            }
            report.long_edge_witness = audit.witness;
            timer.time("conv_dimension", || {
                conv_dimension(&g, config.samples_per_edge, config.exact_max_n, &mut report.dim)
            })?;
        }
    }
    Ok(RunOutput {
        report,
        timings_ms: timer.0,
        artifact,
        sidecar,
    })
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), |v| v.to_string())
}

impl RunReport {
    /// `key = value` lines, then list blocks. This is the hashable part
    /// of the text report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("config", self.config.clone());
        kv("pipeline", self.pipeline.to_string());
        kv("family", opt(&self.family));
        kv("n", self.n.to_string());
        kv("epsilon", self.epsilon.to_string());
        kv("seed", opt(&self.seed));
        kv("scale", opt(&self.scale));
        kv("output.vertices", opt(&self.output_vertices));
        kv("output.edges", opt(&self.output_edges));
        if let Some(s) = &self.stretch {
            kv("stretch.min", s.min.to_string());
            kv("stretch.max", s.max.to_string());
            kv("stretch.lower_bound", s.lower_bound.to_string());
            kv("stretch.upper_bound", s.upper_bound.to_string());
            kv("stretch.pass", s.pass.to_string());
            kv(
                "stretch.violation",
                s.violation.map_or_else(|| "-".into(), |(i, j, r)| format!("{i} {j} {r}")),
            );
        }
        kv("max_degree", opt(&self.max_degree));
        kv("tree_preserved", opt(&self.tree_preserved));
        kv("long_edge.max", opt(&self.long_edge_max));
        if let Some(w) = &self.long_edge_witness {
            kv("long_edge.witness.u", w.u.to_string());
            kv("long_edge.witness.r", w.r.to_string());
        }
        let d = &self.dim;
        kv("dim.input_upper", opt(&d.input_upper));
        kv("dim.input_lower", opt(&d.input_lower));
        kv("dim.conv_sampled_upper", opt(&d.conv_sampled_upper));
        kv("dim.conv_sampled_lower", opt(&d.conv_sampled_lower));
        kv("dim.conv_samples_per_edge", opt(&d.conv_samples_per_edge));
        kv("dim.conv_sample_points", opt(&d.conv_sample_points));
        if let Some(c) = &self.crossing {
            kv("crossing.present", c.present.to_string());
            kv("crossing.total", c.total.to_string());
            kv("crossing.missing", c.missing.map_or_else(|| "-".into(), |(x, y)| format!("{x} {y}")));
            kv("crossing.required", c.required.to_string());
        }
        kv("pass", self.pass.to_string());
        if let Some(w) = &self.long_edge_witness {
            let _ = writeln!(out, "\n[long_edge.witness.edges]");
            for e in &w.edges {
                let _ = writeln!(out, "- {e}");
            }
        }
        for c in &self.certificates {
            let _ = writeln!(out, "\n[certificate.{}]", c.name);
            let _ = writeln!(out, "size = {}", c.size);
            let _ = writeln!(out, "verified = {}", c.verified);
            let _ = writeln!(out, "dim_lower = {}", c.dim_lower);
            let _ = writeln!(out, "min_pairwise = {}", c.min_pairwise);
            let _ = writeln!(out, "max_pairwise = {}", c.max_pairwise);
            let _ = writeln!(out, "max_center_distance = {}", c.max_center_distance);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `(metric-name, value)` pairs for plotting; absent fields are skipped.
    pub fn plot_values(&self) -> Vec<(&'static str, f64)> {
        let d = &self.dim;
        let mut rows = vec![
            ("stretch_min", self.stretch.as_ref().map(|s| s.min)),
            ("stretch_max", self.stretch.as_ref().map(|s| s.max)),
            ("max_degree", self.max_degree.map(|v| v as f64)),
            ("output_edges", self.output_edges.map(|v| v as f64)),
            ("long_edge_max", self.long_edge_max.map(|v| v as f64)),
            ("dim_input_upper", d.input_upper),
            ("dim_input_lower", d.input_lower),
            ("dim_conv_sampled_upper", d.conv_sampled_upper),
            ("dim_conv_sampled_lower", d.conv_sampled_lower),
        ];
        for c in &self.certificates {
            let name: &'static str = match c.name.as_str() {
                "star-geodesic" => "certificate_star_size",
                "crossing-midpoints" => "certificate_crossing_size",
                _ => "certificate_packing_size",
            };
            rows.push((name, Some(c.size as f64)));
        }
        rows.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}

impl RunOutput {
    /// Full text report: the hashable section, then timings.
    pub fn to_text(&self) -> String {
        let mut out = self.report.to_text();
        out.push_str("\n[timings_ms]  # not reproducible\n");
        for (k, v) in &self.timings_ms {
            let _ = writeln!(out, "{k} = {v:.3}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            report: &'a RunReport,
            timings_ms: &'a BTreeMap<String, f64>,
        }
        serde_json::to_string_pretty(&Doc {
            report: &self.report,
            timings_ms: &self.timings_ms,
        })
        .expect("report serializes")
    }
}

/// Tab-separated `family n epsilon metric value` rows, sorted.
pub fn emit_plot_data(reports: &[RunReport]) -> String {
    let mut rows: Vec<(String, usize, f64, &str, f64)> = Vec::new();
    for r in reports {
        let family = r.family.map_or_else(|| "file".to_string(), |f| f.to_string());
        for (name, value) in r.plot_values() {
            rows.push((family.clone(), r.n, r.epsilon, name, value));
        }
    }
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
            .then(a.3.cmp(b.3))
            .then(a.4.total_cmp(&b.4))
    });
    let mut out = String::from("family\tn\tepsilon\tmetric\tvalue\n");
    for (f, n, e, k, v) in rows {
        let _ = writeln!(out, "{f}\t{n}\t{e}\t{k}\t{v}");
    }
    out
}

/// Long-edge audit of a graph, for the `audit` subcommand on files.
pub fn audit_graph(g: &WeightedGraph) -> CliResult<convex_completion::closure::AuditResult> {
    Ok(long_edge_audit(g)?)
}
