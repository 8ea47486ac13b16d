//! Structured JSON reports: one self-contained document per command,
//! serialized with stable field order so identical runs are byte-identical.

use ricci_core::curvature::CurvatureMethod;
use ricci_core::flow::{ConvergenceReport, TargetKind, Termination};
use ricci_core::graph::Graph;
use ricci_core::rational::Rational;
use ricci_core::uniformize::{DensityCertificate, DensityMethod, WeightClass};
use serde::Serialize;

#[derive(Serialize)]
pub struct GraphSection {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    /// `None` for trees (no cycle at all).
    pub girth: Option<usize>,
    pub edge_list: Vec<[String; 2]>,
}

impl GraphSection {
    pub fn new(name: &str, graph: &Graph) -> Self {
        GraphSection {
            name: name.to_string(),
            vertices: graph.vertex_count(),
            edges: graph.edge_count(),
            girth: graph.girth(),
            edge_list: graph
                .edges()
                .iter()
                .map(|&(u, v)| [graph.label(u), graph.label(v)])
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct CertificateSection {
    pub satisfied: bool,
    pub global_density: Rational,
    pub max_proper_density: Rational,
    /// Vertices of a densest proper subset when the condition fails.
    pub witness: Option<Vec<usize>>,
    pub method: DensityMethod,
}

impl From<&DensityCertificate> for CertificateSection {
    fn from(cert: &DensityCertificate) -> Self {
        CertificateSection {
            satisfied: cert.satisfied,
            global_density: cert.global_density,
            max_proper_density: cert.max_proper_density,
            witness: cert.witness.as_ref().map(|w| w.vertices()),
            method: cert.method,
        }
    }
}

#[derive(Serialize)]
pub struct InfoReport {
    pub command: &'static str,
    pub graph: GraphSection,
    /// `2(|V|/|E| - 1)`; only meaningful (and only emitted) at girth >= 6.
    pub average_curvature: Option<f64>,
    pub classification: WeightClass,
    pub certificate: CertificateSection,
}

#[derive(Serialize)]
pub struct CurvatureRow {
    pub edge: usize,
    pub endpoints: [String; 2],
    pub weight: f64,
    pub curvature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_method_delta: Option<f64>,
}

#[derive(Serialize)]
pub struct VerificationSection {
    pub reference_method: CurvatureMethod,
    pub max_delta: f64,
}

#[derive(Serialize)]
pub struct CurvatureReport {
    pub command: &'static str,
    pub graph: GraphSection,
    pub method: CurvatureMethod,
    pub rows: Vec<CurvatureRow>,
    pub total_curvature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSection>,
}

#[derive(Serialize)]
pub struct TargetSection {
    pub kind: TargetKind,
    /// Present when every edge shares one target value.
    pub constant: Option<f64>,
    pub values: Vec<f64>,
}

#[derive(Serialize)]
pub struct OptionsSection {
    pub dt: f64,
    pub t_max: f64,
    pub tol: f64,
    pub sample_every: usize,
}

#[derive(Serialize)]
pub struct HeavyEdge {
    pub edge: usize,
    pub endpoints: [String; 2],
    pub weight: f64,
}

#[derive(Serialize)]
pub struct StratifySection {
    pub threshold: f64,
    pub edges: Vec<HeavyEdge>,
}

#[derive(Serialize)]
pub struct FlowReport {
    pub command: &'static str,
    pub graph: GraphSection,
    pub target: TargetSection,
    pub options: OptionsSection,
    pub initial_weights: Vec<f64>,
    pub termination: Termination,
    pub steps: usize,
    pub potential_drop: f64,
    pub convergence: ConvergenceReport,
    pub final_weights: Vec<f64>,
    pub final_curvature: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stratify: Option<StratifySection>,
}

#[derive(Serialize)]
pub struct SolutionSection {
    /// Zero-mean vertex potentials at the minimizer.
    pub potentials: Vec<f64>,
    pub masses: Vec<f64>,
    pub weights: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// The shared curvature value of the recovered weights.
    pub constant_curvature: f64,
    /// `max_e |kappa_e - constant_curvature|` under the recovered weights.
    pub curvature_residual: f64,
}

#[derive(Serialize)]
pub struct UniformizeReport {
    pub command: &'static str,
    pub graph: GraphSection,
    pub certificate: CertificateSection,
    pub classification: WeightClass,
    /// `None` when the existence condition fails: no solve is attempted.
    pub solution: Option<SolutionSection>,
}
