use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use convex_completion::completion::complete_tree;
use convex_completion::doubling::{estimate_dimension, DEFAULT_EXACT_MAX_N};
use convex_completion::instances::{
    crossing_midpoint_packing, exponential_star, lcp_crossing_check, lcp_metric, star_lb_certificate, Family,
    Instance, InstanceSpec,
};
use convex_completion::io::{parse_instance, write_instance};
use convex_completion::spanner::build_spanner;
use convex_completion::{shortest_path_metric, Epsilon};
use convex_completion_cli::{
    emit_plot_data, run, CertificateSummary, CliError, CliResult, Pipeline, RunConfig, RunOutput, Source,
    DEFAULT_SAMPLES_PER_EDGE,
};

#[derive(Parser)]
#[command(name = "convex-complete", version, about = "Spanners and tree completions of doubling metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Read a `metric` or `graph` file instead of generating.
    #[arg(long)]
    input: Option<PathBuf>,
    /// exponential-star | lcp-hypercube | euclidean-random | random-tree
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    p: u32,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InstanceArgs {
    fn source(&self) -> CliResult<Source> {
        match (&self.input, &self.family) {
            (Some(path), None) => Ok(Source::File(path.clone())),
            (None, Some(family)) => {
                let family: Family = family.parse()?;
                let spec = InstanceSpec {
                    family,
                    n: self.n,
                    p: self.p,
                    dim: self.dim,
                    seed: self.seed,
                };
                spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
                Ok(Source::Generated(spec))
            }
            _ => Err(CliError::Config("give exactly one of --input or --family".into())),
        }
    }

    fn load(&self) -> CliResult<Instance> {
        match self.source()? {
            Source::Generated(spec) => Ok(spec.generate()?),
            Source::File(path) => Ok(parse_instance(&read(&path)?)?),
        }
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_EDGE)]
    samples_per_edge: usize,
    #[arg(long, default_value_t = DEFAULT_EXACT_MAX_N)]
    exact_dim_max_n: usize,
    /// Output graph path; sidecar, text report and JSON report are written
    /// next to it.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build and verify a (1+eps)-spanner.
    Spanner(RunArgs),
    /// Build and verify a tree completion.
    CompleteTree(RunArgs),
    /// Long-edge audit of a graph.
    Audit(RunArgs),
    /// Doubling-dimension bounds of an instance.
    Dim {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = DEFAULT_EXACT_MAX_N)]
        exact_dim_max_n: usize,
    },
    /// Geodesic packing in the convex closure of a completed star.
    CertifyStar {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1.0 / 1024.0)]
        epsilon: f64,
    },
    /// Crossing edges and midpoint packing of the lcp-metric spanner.
    CertifyLcp {
        #[arg(long, default_value_t = 4)]
        p: u32,
        /// Defaults to 2^-(p+1).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run a batch of `key=value` configs and write reports plus plot data.
    Report {
        /// e.g. "pipeline=spanner epsilon=0.25 family=euclidean-random n=50 seed=1"
        #[arg(long = "run", required = true)]
        runs: Vec<String>,
        #[arg(long)]
        output: PathBuf,
    },
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_pipeline(args: &RunArgs, pipeline: Pipeline) -> CliResult<bool> {
    let config = RunConfig {
        source: args.instance.source()?,
        epsilon: args.epsilon,
        pipeline,
        samples_per_edge: args.samples_per_edge,
        exact_max_n: args.exact_dim_max_n,
    };
    let out: RunOutput = run(&config)?;
    print!("{}", out.to_text());
    if let Some(path) = &args.output {
        if let Some(graph) = &out.artifact {
            write(path, graph)?;
        }
        if let Some(side) = &out.sidecar {
            write(&with_suffix(path, ".sidecar"), side)?;
        }
        write(&with_suffix(path, ".report.txt"), &out.to_text())?;
        write(&with_suffix(path, ".report.json"), &out.to_json())?;
    }
    Ok(out.report.pass)
}

fn print_certificate(c: &CertificateSummary) {
    println!("certificate = {}", c.name);
    println!("size = {}", c.size);
    println!("verified = {}", c.verified);
    println!("dim_lower = {}", c.dim_lower);
    println!("min_pairwise = {}", c.min_pairwise);
    println!("max_pairwise = {}", c.max_pairwise);
    println!("max_center_distance = {}", c.max_center_distance);
}

fn execute(cmd: Command) -> CliResult<bool> {
    match cmd {
        Command::Gen { instance, output } => {
            let text = write_instance(&instance.load()?);
            match output {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Spanner(args) => run_pipeline(&args, Pipeline::Spanner),
        Command::CompleteTree(args) => run_pipeline(&args, Pipeline::CompleteTree),
        Command::Audit(args) => run_pipeline(&args, Pipeline::AuditOnly),
        Command::Dim {
            instance,
            exact_dim_max_n,
        } => {
            let metric = match instance.load()? {
                Instance::Metric(m) => m,
                Instance::Graph(g) => shortest_path_metric(&g)?,
            };
            let est = estimate_dimension(&metric, exact_dim_max_n);
            let show = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
            println!("n = {}", metric.len());
            println!("lambda_upper = {}", est.lambda_upper().map_or_else(|| "-".into(), |v| v.to_string()));
            println!("dim_upper = {}", show(est.dim_upper()));
            println!("dim_lower = {}", show(est.dim_lower()));
            println!("mode = {}", est.mode().map_or_else(|| "-".into(), |m| format!("{m:?}")));
            Ok(true)
        }
        Command::CertifyStar { n, epsilon } => {
            let eps = Epsilon::new(epsilon).map_err(|e| CliError::Config(e.to_string()))?;
            let c = complete_tree(&exponential_star(n), eps)?;
            let cert = star_lb_certificate(&c, eps)?;
            print_certificate(&CertificateSummary::new("star-geodesic", &cert));
            Ok(cert.verified)
        }
        Command::CertifyLcp { p, epsilon } => {
            if !(1..=12).contains(&p) {
                return Err(CliError::Config("p must lie in 1..=12".into()));
            }
            let eps = epsilon.unwrap_or(0.5f64.powi(p as i32 + 1));
            let eps = Epsilon::new(eps).map_err(|e| CliError::Config(e.to_string()))?;
            let sp = build_spanner(&lcp_metric(p), eps)?;
            let cr = lcp_crossing_check(&sp.graph, p)?;
            println!("crossing.present = {}", cr.present);
            println!("crossing.total = {}", cr.total);
            println!(
                "crossing.missing = {}",
                cr.missing.map_or_else(|| "-".into(), |(x, y)| format!("{x} {y}"))
            );
            let mut ok = cr.complete() && sp.stretch.pass;
            if cr.complete() {
                let cert = crossing_midpoint_packing(&sp.graph, p)?;
                print_certificate(&CertificateSummary::new("crossing-midpoints", &cert));
                ok &= cert.verified;
            }
            Ok(ok)
        }
        Command::Report { runs, output } => {
            fs::create_dir_all(&output).map_err(|source| CliError::Io {
                path: output.clone(),
                source,
            })?;
            let mut reports = Vec::new();
            let mut ok = true;
            for (k, line) in runs.iter().enumerate() {
                let out = run(&line.parse::<RunConfig>()?)?;
                write(&output.join(format!("report-{k:03}.txt")), &out.to_text())?;
                write(&output.join(format!("report-{k:03}.json")), &out.to_json())?;
                ok &= out.report.pass;
                reports.push(out.report);
            }
            write(&output.join("plot.tsv"), &emit_plot_data(&reports))?;
            println!("reports = {}", reports.len());
            println!("pass = {ok}");
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
