//! `ricci-uniform`: curvature, prescribed-curvature flow, and
//! constant-curvature uniformization on finite weighted graphs.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical failure, 3 existence
//! condition failed on a command that requires it.

mod report;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ricci_core::curvature::{
    curvature_vector, edge_curvature_alpha, CurvatureError, CurvatureMethod, MethodSelector,
};
use ricci_core::flow::{
    self, average_curvature, convergence_report, integrate, FlowError, FlowOptions,
    PrescribedCurvature, Termination,
};
use ricci_core::graph::builders::{builtin, BUILTIN_NAMES};
use ricci_core::graph::{parse_graph, Graph, GraphError, WeightVector};
use ricci_core::uniformize::{
    check_condition_brute, check_condition_flow, classify_constant_weight, solve_constant_weights,
    DensityCertificate, NewtonOptions, UniformizeError, BRUTE_FORCE_VERTEX_LIMIT,
};

use report::{
    CertificateSection, CurvatureReport, CurvatureRow, FlowReport, GraphSection, HeavyEdge,
    InfoReport, OptionsSection, SolutionSection, StratifySection, TargetSection, UniformizeReport,
    VerificationSection,
};

#[derive(Parser)]
#[command(
    name = "ricci-uniform",
    version,
    about = "Ricci curvature, curvature flow, and uniformization on weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph summary: size, girth, classification, existence certificate
    Info(RunArgs),
    /// Per-edge curvature table for the chosen weights
    Curvature(RunArgs),
    /// Integrate the prescribed-curvature flow on the edge weights
    Flow(RunArgs),
    /// Solve for constant-curvature weights (girth >= 6)
    Uniformize(RunArgs),
}

#[derive(Args)]
#[command(group = ArgGroup::new("source").required(true).multiple(false))]
struct RunArgs {
    /// Graph file: edge list (`u v [weight]` per line) or JSON
    #[arg(long, value_name = "FILE", group = "source")]
    graph: Option<PathBuf>,

    /// Named builtin graph (see `--builtin help` for the list)
    #[arg(long, value_name = "NAME", group = "source")]
    builtin: Option<String>,

    /// Curvature target: `zero`, `average`, or a file of `edge value` lines
    #[arg(long, value_name = "SPEC", default_value = "average")]
    target: String,

    /// Macro time step of the integrator
    #[arg(long, value_name = "F", default_value_t = 1e-2)]
    dt: f64,

    /// Integration horizon
    #[arg(long = "t-max", value_name = "F", default_value_t = 30.0)]
    t_max: f64,

    /// Convergence tolerance on the max-norm curvature residual
    #[arg(long, value_name = "F", default_value_t = 1e-8)]
    tol: f64,

    /// Record every N-th macro step in the trajectory
    #[arg(long = "sample-every", value_name = "N", default_value_t = 10)]
    sample_every: usize,

    /// Seed for random initial weights
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Draw initial weights uniformly from [0.5, 1.5] instead of using
    /// unit/file weights
    #[arg(long = "random-init")]
    random_init: bool,

    /// Write a two-panel SVG (weights and curvatures over time)
    #[arg(long, value_name = "FILE.svg")]
    plot: Option<PathBuf>,

    /// Write the sampled trajectory as CSV
    #[arg(long, value_name = "FILE.csv")]
    csv: Option<PathBuf>,

    /// List edges whose final weight exceeds this threshold
    #[arg(long, value_name = "F")]
    stratify: Option<f64>,

    /// Cross-check curvature against an independent method
    #[arg(long)]
    verify: bool,

    /// Write the report to a file instead of stdout
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

/// Failure modes mapped to process exit codes.
enum Failure {
    /// Exit 1: unreadable/invalid input, bad option values, girth gates.
    Input(String),
    /// Exit 2: a numerical method could not complete.
    Numerical(String),
    /// Exit 3: the existence condition failed on a command that requires
    /// it. The report (with witness) has already been emitted.
    ConditionFailed,
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<CurvatureError> for Failure {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::Girth { .. } | CurvatureError::AlphaRange(_) => {
                Failure::Input(e.to_string())
            }
            CurvatureError::Lp(_) | CurvatureError::Numerical(_) => {
                Failure::Numerical(e.to_string())
            }
        }
    }
}

impl From<FlowError> for Failure {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Curvature(inner) => inner.into(),
            FlowError::Options(_) | FlowError::Dimension { .. } => Failure::Input(e.to_string()),
        }
    }
}

impl From<UniformizeError> for Failure {
    fn from(e: UniformizeError) -> Self {
        match e {
            UniformizeError::Flow(inner) => inner.into(),
            UniformizeError::TooLarge { .. }
            | UniformizeError::Degenerate(_)
            | UniformizeError::NotApplicable { .. }
            | UniformizeError::Consistency { .. } => Failure::Input(e.to_string()),
            UniformizeError::Divergence { .. } | UniformizeError::Verification(_) => {
                Failure::Numerical(e.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::ConditionFailed) => {
            eprintln!("existence condition failed; the report carries a densest-subset witness");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Info(args) => cmd_info(&args),
        Command::Curvature(args) => cmd_curvature(&args),
        Command::Flow(args) => cmd_flow(&args),
        Command::Uniformize(args) => cmd_uniformize(&args),
    }
}

// ---------------------------------------------------------------------------
// Input plumbing
// ---------------------------------------------------------------------------

/// Loads the graph plus its baseline weights (file weights for `--graph`,
/// unit weights for builtins) and a display name.
fn load_graph(args: &RunArgs) -> Result<(Graph, WeightVector, String), Failure> {
    if let Some(path) = &args.graph {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        let (graph, weights) = parse_graph(&text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        Ok((graph, weights, path.display().to_string()))
    } else {
        let name = args.builtin.as_deref().expect("clap enforces the source group");
        let graph = builtin(name).ok_or_else(|| {
            Failure::Input(format!(
                "unknown builtin `{name}`; available: {}",
                BUILTIN_NAMES.join(", ")
            ))
        })?;
        let weights = WeightVector::unit(graph.edge_count());
        Ok((graph, weights, name.to_string()))
    }
}

/// Baseline or seeded-random initial weights, per `--random-init`.
fn initial_weights(args: &RunArgs, graph: &Graph, baseline: WeightVector) -> WeightVector {
    if !args.random_init {
        return baseline;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    WeightVector::new(
        (0..graph.edge_count())
            .map(|_| rng.gen_range(0.5..1.5))
            .collect(),
    )
    .expect("uniform draws from [0.5, 1.5] are positive")
}

fn flow_options(args: &RunArgs) -> Result<FlowOptions, Failure> {
    for (name, value) in [("--dt", args.dt), ("--t-max", args.t_max), ("--tol", args.tol)] {
        if !value.is_finite() || value <= 0.0 {
            return Err(Failure::Input(format!(
                "{name} must be a positive finite number, got {value}"
            )));
        }
    }
    if args.sample_every == 0 {
        return Err(Failure::Input("--sample-every must be at least 1".into()));
    }
    Ok(FlowOptions {
        dt: args.dt,
        t_max: args.t_max,
        tol: args.tol,
        sample_every: args.sample_every,
    })
}

fn parse_target(spec: &str, graph: &Graph) -> Result<PrescribedCurvature, Failure> {
    match spec {
        "zero" => Ok(PrescribedCurvature::zero(graph.edge_count())),
        "average" => Ok(PrescribedCurvature::average(graph)?),
        path => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::Input(format!(
                    "--target must be `zero`, `average`, or a readable file; \
                     cannot read `{path}`: {e}"
                ))
            })?;
            let mut values: Vec<Option<f64>> = vec![None; graph.edge_count()];
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let bad = |message: String| {
                    Failure::Input(format!("{path}:{}: {message}", lineno + 1))
                };
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() != 2 {
                    return Err(bad(format!(
                        "expected `edge_index value`, found {} tokens",
                        tokens.len()
                    )));
                }
                let edge: usize = tokens[0]
                    .parse()
                    .map_err(|e| bad(format!("bad edge index `{}`: {e}", tokens[0])))?;
                let value: f64 = tokens[1]
                    .parse()
                    .map_err(|e| bad(format!("bad value `{}`: {e}", tokens[1])))?;
                if edge >= graph.edge_count() {
                    return Err(bad(format!(
                        "edge index {edge} out of range for {} edges",
                        graph.edge_count()
                    )));
                }
                if values[edge].replace(value).is_some() {
                    return Err(bad(format!("duplicate entry for edge {edge}")));
                }
            }
            let values: Vec<f64> = values
                .into_iter()
                .enumerate()
                .map(|(e, v)| {
                    v.ok_or_else(|| Failure::Input(format!("{path}: missing value for edge {e}")))
                })
                .collect::<Result<_, _>>()?;
            Ok(PrescribedCurvature::custom(values))
        }
    }
}

/// Serializes a report as pretty JSON to `--report FILE` or stdout.
fn emit_report<T: Serialize>(document: &T, dest: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(document)
        .map_err(|e| Failure::Numerical(format!("report serialization failed: {e}")))?;
    text.push('\n');
    match dest {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn endpoints_of(graph: &Graph, edge: usize) -> [String; 2] {
    let (u, v) = graph.endpoints(edge);
    [graph.label(u), graph.label(v)]
}

/// Existence certificate via the exhaustive checker when it fits, the
/// max-flow checker beyond that.
fn certificate_for(graph: &Graph) -> Result<DensityCertificate, Failure> {
    if graph.vertex_count() <= BRUTE_FORCE_VERTEX_LIMIT {
        Ok(check_condition_brute(graph)?)
    } else {
        Ok(check_condition_flow(graph)?)
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_info(args: &RunArgs) -> Result<(), Failure> {
    let (graph, _, name) = load_graph(args)?;
    let certificate = certificate_for(&graph)?;
    let document = InfoReport {
        command: "info",
        graph: GraphSection::new(&name, &graph),
        average_curvature: average_curvature(&graph).ok(),
        classification: classify_constant_weight(&graph),
        certificate: CertificateSection::from(&certificate),
    };
    emit_report(&document, args.report.as_deref())
}

fn cmd_curvature(args: &RunArgs) -> Result<(), Failure> {
    let (graph, baseline, name) = load_graph(args)?;
    let weights = initial_weights(args, &graph, baseline);
    let kappa = curvature_vector(&graph, &weights, MethodSelector::Auto)?;

    // Cross-check: the closed form (girth >= 6) is verified against the
    // Lipschitz LP; short-girth graphs (already on the LP) are verified
    // against the lazy-random-walk oracle near idleness 1.
    let verification = if args.verify {
        let (reference_method, reference) = if kappa.method() == CurvatureMethod::ClosedForm {
            let lp = curvature_vector(&graph, &weights, MethodSelector::LipschitzLp)?;
            (CurvatureMethod::LipschitzLp, lp.values().to_vec())
        } else {
            let alpha: Vec<f64> = (0..graph.edge_count())
                .map(|e| edge_curvature_alpha(&graph, &weights, e, 0.99))
                .collect::<Result<_, _>>()?;
            (CurvatureMethod::AlphaOracle, alpha)
        };
        Some((reference_method, reference))
    } else {
        None
    };

    let rows: Vec<CurvatureRow> = (0..graph.edge_count())
        .map(|e| CurvatureRow {
            edge: e,
            endpoints: endpoints_of(&graph, e),
            weight: weights[e],
            curvature: kappa.get(e),
            cross_method_delta: verification
                .as_ref()
                .map(|(_, reference)| (kappa.get(e) - reference[e]).abs()),
        })
        .collect();
    let document = CurvatureReport {
        command: "curvature",
        graph: GraphSection::new(&name, &graph),
        method: kappa.method(),
        total_curvature: kappa.sum(),
        verification: verification.map(|(reference_method, reference)| VerificationSection {
            reference_method,
            max_delta: kappa
                .values()
                .iter()
                .zip(&reference)
                .fold(0.0, |acc, (a, b)| acc.max((a - b).abs())),
        }),
        rows,
    };
    emit_report(&document, args.report.as_deref())
}

fn cmd_flow(args: &RunArgs) -> Result<(), Failure> {
    let (graph, baseline, name) = load_graph(args)?;
    let weights = initial_weights(args, &graph, baseline);
    let target = parse_target(&args.target, &graph)?;
    let options = flow_options(args)?;
    let trajectory = integrate(&graph, &weights, &target, &options)?;

    if let Some(path) = &args.csv {
        let mut buffer = Vec::new();
        flow::write_csv(&mut buffer, &trajectory)
            .map_err(|e| Failure::Numerical(format!("CSV encoding failed: {e}")))?;
        fs::write(path, buffer)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &args.plot {
        let document = render_flow_plot(&graph, &trajectory, &target);
        fs::write(path, document)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }

    let final_weights = trajectory.final_weights();
    let stratify = args.stratify.map(|threshold| StratifySection {
        threshold,
        edges: flow::heavy_edges(&final_weights, threshold)
            .into_iter()
            .map(|e| HeavyEdge {
                edge: e,
                endpoints: endpoints_of(&graph, e),
                weight: final_weights[e],
            })
            .collect(),
    });

    let document = FlowReport {
        command: "flow",
        graph: GraphSection::new(&name, &graph),
        target: TargetSection {
            kind: target.kind(),
            constant: target.constant_value(),
            values: target.values().to_vec(),
        },
        options: OptionsSection {
            dt: options.dt,
            t_max: options.t_max,
            tol: options.tol,
            sample_every: options.sample_every,
        },
        initial_weights: weights.values().to_vec(),
        termination: trajectory.termination,
        steps: trajectory.steps,
        potential_drop: trajectory.potential_drop,
        convergence: convergence_report(&trajectory, &target, options.tol),
        final_weights: final_weights.values().to_vec(),
        final_curvature: trajectory.final_kappa().to_vec(),
        stratify,
    };
    emit_report(&document, args.report.as_deref())?;

    if let Termination::StepFailure { t } = trajectory.termination {
        return Err(Failure::Numerical(format!(
            "integration stalled at t = {t}: step halving reached the minimum step size"
        )));
    }
    Ok(())
}

fn render_flow_plot(graph: &Graph, trajectory: &flow::FlowTrajectory, target: &PrescribedCurvature) -> String {
    let m = graph.edge_count();
    let series = |extract: &dyn Fn(&flow::FlowSample, usize) -> f64| -> Vec<svg::Series> {
        (0..m)
            .map(|e| {
                let (u, v) = graph.endpoints(e);
                svg::Series {
                    label: format!("({},{})", graph.label(u), graph.label(v)),
                    points: trajectory
                        .samples
                        .iter()
                        .map(|s| (s.t, extract(s, e)))
                        .collect(),
                }
            })
            .collect()
    };
    let panels = [
        svg::Panel {
            title: "edge weights".into(),
            series: series(&|s, e| s.log_weights[e].exp()),
            reference: None,
        },
        svg::Panel {
            title: "edge curvatures".into(),
            series: series(&|s, e| s.kappa[e]),
            reference: target
                .constant_value()
                .map(|v| (v, format!("target {v:.4}"))),
        },
    ];
    svg::render(&panels)
}

fn cmd_uniformize(args: &RunArgs) -> Result<(), Failure> {
    let (graph, _, name) = load_graph(args)?;
    if !graph.has_min_girth(6) {
        return Err(Failure::Input(format!(
            "uniformize requires girth >= 6; graph has girth {}",
            graph.girth().expect("short girth implies a cycle")
        )));
    }
    let certificate = certificate_for(&graph)?;
    let graph_section = GraphSection::new(&name, &graph);
    let classification = classify_constant_weight(&graph);

    if !certificate.satisfied {
        let document = UniformizeReport {
            command: "uniformize",
            graph: graph_section,
            certificate: CertificateSection::from(&certificate),
            classification,
            solution: None,
        };
        emit_report(&document, args.report.as_deref())?;
        return Err(Failure::ConditionFailed);
    }

    let solution = solve_constant_weights(&graph, &NewtonOptions::default())?;
    let kappa = curvature_vector(&graph, &solution.weights, MethodSelector::Auto)?;
    let constant_curvature = average_curvature(&graph)?;
    let curvature_residual = kappa
        .values()
        .iter()
        .fold(0.0_f64, |acc, &k| acc.max((k - constant_curvature).abs()));

    let document = UniformizeReport {
        command: "uniformize",
        graph: graph_section,
        certificate: CertificateSection::from(&certificate),
        classification,
        solution: Some(SolutionSection {
            potentials: solution.potentials.clone(),
            masses: solution.masses.clone(),
            weights: solution.weights.values().to_vec(),
            gradient_norm: solution.gradient_norm,
            iterations: solution.iterations,
            constant_curvature,
            curvature_residual,
        }),
    };
    emit_report(&document, args.report.as_deref())
}
