//! `dcgraphs`: exact counts, asymptotic estimates and random samples of
//! graphs whose degrees lie in a prescribed set.
//!
//! Exit status: 0 success, 1 usage error, 2 infeasible instance,
//! 3 sampler attempts exhausted.

mod render;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcgraphs::analytic::{feasibility, marked_weight_exact, mg_asymptotic, phi, sg_asymptotic, AsymptoticCount};
use dcgraphs::samplers::default_max_attempts;
use dcgraphs::{
    boltzmann_tune, mg_total_weight, stream_rng, BoltzmannSampler, DegreeSet, Multigraph, SampleReport,
    SamplerError, SamplerState,
};
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "dcgraphs", version, about = "Graphs and multigraphs with degrees in a prescribed set")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact total compensation-factor weight of the multigraphs.
    CountExact(InstanceArgs),
    /// Saddle-point estimate of the multigraph weight.
    CountAsymptotic(InstanceArgs),
    /// Saddle-point estimate of the number of simple graphs.
    SgEstimate(InstanceArgs),
    /// Exact marked-multigraph sum at rational (u, v).
    Marked(MarkedArgs),
    /// Random simple graphs (or multigraphs) with exactly m edges.
    Sample(SampleArgs),
    /// Random multigraphs from i.i.d. Boltzmann degrees.
    Boltzmann(BoltzmannArgs),
    /// Exact vs asymptotic multigraph weight along n, 2n, 4n, ... at fixed 2m/n.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    /// Degree set: `d1,d2,...`, `min=k`, `even` or `odd`.
    #[arg(long)]
    degrees: DegreeSet,
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// Number of edges.
    #[arg(long)]
    m: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MarkedArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Weight per marked double edge, e.g. `-1` or `2/3`.
    #[arg(long, allow_hyphen_values = true)]
    u: BigRational,
    /// Weight per marked loop.
    #[arg(long, allow_hyphen_values = true)]
    v: BigRational,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Edgelist,
    Tsv,
}

#[derive(Args, Debug)]
struct SamplingArgs {
    #[arg(long, default_value_t = 1)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Edgelist)]
    format: Format,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Emit multigraphs without rejecting loops and multiple edges.
    #[arg(long)]
    allow_multi: bool,
    /// Pairing attempts per sample before giving up.
    #[arg(long)]
    max_attempts: Option<u64>,
}

#[derive(Args, Debug)]
struct BoltzmannArgs {
    #[arg(long)]
    degrees: DegreeSet,
    #[arg(long)]
    n: usize,
    /// Boltzmann parameter.
    #[arg(long, conflicts_with = "mean", required_unless_present = "mean")]
    x: Option<f64>,
    /// Target mean degree; the parameter is tuned to it.
    #[arg(long)]
    mean: Option<f64>,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Rungs of the ladder; rung k uses (n 2^k, m 2^k).
    #[arg(long, default_value_t = 5)]
    steps: u32,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Infeasible(String),
    Exhausted(SampleReport),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SamplerError> for CliError {
    fn from(e: SamplerError) -> Self {
        match e {
            SamplerError::Infeasible(reason) => CliError::Infeasible(reason),
            SamplerError::AttemptsExhausted(report) => CliError::Exhausted(report),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Infeasible(reason)) => {
            println!("{}", json!({"feasible": false, "reason": reason}));
            ExitCode::from(2)
        }
        Err(CliError::Exhausted(report)) => {
            println!("{}", json!({"error": "sampler attempts exhausted", "report": render::report_json(&report)}));
            ExitCode::from(3)
        }
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json(path: &Option<PathBuf>, value: &Value) -> Result<(), CliError> {
    let mut out = sink(path)?;
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json"))?;
    out.flush()?;
    Ok(())
}

fn require_feasible(a: &InstanceArgs) -> Result<(), CliError> {
    let f = feasibility(&a.degrees, a.n, a.m);
    if f.is_feasible() {
        Ok(())
    } else {
        Err(CliError::Infeasible(f.to_string()))
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::CountExact(a) => {
            require_feasible(&a)?;
            let weight = mg_total_weight(&a.degrees, a.n, a.m);
            if weight.is_zero() {
                return Err(CliError::Infeasible("no multigraph has this degree constraint".into()));
            }
            let mut v = render::instance_json("count-exact", &a.degrees, a.n, a.m);
            let exact = weight.as_exact().expect("exact weight");
            v["feasible"] = json!(true);
            v["weight"] = json!(render::rational(exact));
            render::add_magnitude(&mut v, weight.ln());
            emit_json(&a.output, &v)
        }
        Command::CountAsymptotic(a) => asymptotic("count-asymptotic", &a, mg_asymptotic),
        Command::SgEstimate(a) => asymptotic("sg-estimate", &a, sg_asymptotic),
        Command::Marked(args) => {
            let a = &args.instance;
            require_feasible(a)?;
            let value = marked_weight_exact(&a.degrees, a.n, a.m, &args.u, &args.v)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let mut v = render::instance_json("marked", &a.degrees, a.n, a.m);
            v["u"] = json!(render::rational(&args.u));
            v["v"] = json!(render::rational(&args.v));
            v["value"] = json!(render::rational(&value));
            emit_json(&a.output, &v)
        }
        Command::Sample(args) => sample(args),
        Command::Boltzmann(args) => boltzmann(args),
        Command::Report(args) => report(args),
    }
}

fn asymptotic(
    name: &str,
    a: &InstanceArgs,
    estimate: fn(&DegreeSet, usize, usize) -> Result<AsymptoticCount, dcgraphs::AnalyticError>,
) -> Result<(), CliError> {
    require_feasible(a)?;
    let count = estimate(&a.degrees, a.n, a.m).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut v = render::instance_json(name, &a.degrees, a.n, a.m);
    render::add_asymptotic(&mut v, &count);
    emit_json(&a.output, &v)
}

fn build_pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn sample(args: SampleArgs) -> Result<(), CliError> {
    let a = &args.instance;
    let s = &args.sampling;
    let state = SamplerState::new(&a.degrees, a.n, a.m)?;
    let max_attempts = args.max_attempts.unwrap_or_else(|| default_max_attempts(&a.degrees, a.n, a.m));
    if max_attempts == 0 {
        return Err(CliError::Usage("--max-attempts must be at least 1".into()));
    }
    let pool = build_pool(s.jobs)?;
    let results: Vec<Result<(Multigraph, SampleReport), SamplerError>> = pool.install(|| {
        (0..s.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(s.seed, i);
                if args.allow_multi {
                    let g = state.sample_multigraph(&mut rng);
                    Ok((g, SampleReport { samples_requested: 1, samples_produced: 1, ..Default::default() }))
                } else {
                    state.sample_simple_graph(&mut rng, max_attempts)
                }
            })
            .collect()
    });
    let mut report = SampleReport::default();
    let mut graphs = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok((g, rep)) => {
                report.merge(&rep);
                graphs.push(g);
            }
            Err(SamplerError::AttemptsExhausted(rep)) => {
                report.merge(&rep);
                return Err(CliError::Exhausted(report));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut v = render::instance_json("sample", &a.degrees, a.n, a.m);
    v["allow_multi"] = json!(args.allow_multi);
    v["seed"] = json!(s.seed);
    let report_json = render::report_json(&report);
    write_samples(&a.output, s.format, v, &graphs, report_json)
}

fn boltzmann(args: BoltzmannArgs) -> Result<(), CliError> {
    let s = &args.sampling;
    let x = match (args.x, args.mean) {
        (Some(x), _) => x,
        (None, Some(target)) => boltzmann_tune(&args.degrees, target).map_err(|e| CliError::Usage(e.to_string()))?,
        (None, None) => unreachable!("clap requires one of --x, --mean"),
    };
    let sampler = BoltzmannSampler::new(&args.degrees, x)?;
    let pool = build_pool(s.jobs)?;
    let results: Vec<Result<(Multigraph, SampleReport), SamplerError>> = pool.install(|| {
        (0..s.samples)
            .into_par_iter()
            .map(|i| sampler.sample(args.n, &mut stream_rng(s.seed, i)))
            .collect()
    });
    let mut report = SampleReport::default();
    let mut graphs = Vec::with_capacity(results.len());
    for r in results {
        let (g, rep) = r?;
        report.merge(&rep);
        graphs.push(g);
    }
    let vertices: usize = graphs.iter().map(Multigraph::vertex_count).sum();
    let half_edges: usize = graphs.iter().map(|g| 2 * g.edge_count()).sum();
    let mut report_json = render::report_json(&report);
    report_json["x"] = json!(x);
    report_json["mean_degree"] = if vertices > 0 { json!(half_edges as f64 / vertices as f64) } else { Value::Null };
    report_json["expected_mean_degree"] = match phi(&args.degrees, x) {
        Ok(mean) => json!(mean),
        Err(_) => json!(args.degrees.valuation() as f64),
    };
    let v = json!({
        "command": "boltzmann",
        "degrees": args.degrees.to_string(),
        "n": args.n,
        "seed": s.seed,
    });
    write_samples(&args.output, s.format, v, &graphs, report_json)
}

fn write_samples(
    path: &Option<PathBuf>,
    format: Format,
    mut header: Value,
    graphs: &[Multigraph],
    report: Value,
) -> Result<(), CliError> {
    let mut out = sink(path)?;
    match format {
        Format::Json => {
            header["graphs"] = Value::Array(graphs.iter().map(render::graph_json).collect());
            header["report"] = report;
            writeln!(out, "{}", serde_json::to_string_pretty(&header).expect("json"))?;
        }
        Format::Edgelist => {
            for (i, g) in graphs.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                write!(out, "{}", g.to_edge_list())?;
            }
            writeln!(out, "# report {}", report)?;
        }
        Format::Tsv => {
            writeln!(out, "sample\tu\tv")?;
            for (i, g) in graphs.iter().enumerate() {
                for (u, v) in g.edge_sequence() {
                    writeln!(out, "{i}\t{u}\t{v}")?;
                }
            }
            writeln!(out, "# report {}", report)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn report(args: ReportArgs) -> Result<(), CliError> {
    let a = &args.instance;
    require_feasible(a)?;
    let mut out = sink(&a.output)?;
    writeln!(out, "n\tm\tln_exact\tln_asymptotic\trelative_error\tln_simple_estimate")?;
    for k in 0..args.steps {
        let scale = 1usize << k;
        let (n, m) = (a.n * scale, a.m * scale);
        let exact = mg_total_weight(&a.degrees, n, m).ln();
        let mg = mg_asymptotic(&a.degrees, n, m).map_err(|e| CliError::Usage(e.to_string()))?;
        let sg = sg_asymptotic(&a.degrees, n, m).map_err(|e| CliError::Usage(e.to_string()))?;
        let err = ((mg.log_value - exact).exp() - 1.0).abs();
        writeln!(out, "{n}\t{m}\t{exact:.12}\t{:.12}\t{err:.6e}\t{:.12}", mg.log_value, sg.log_value)?;
    }
    out.flush()?;
    Ok(())
}
