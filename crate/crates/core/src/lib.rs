#![forbid(unsafe_code)]

//! Coarse Ricci curvature on finite weighted graphs, the prescribed-curvature
//! Ricci flow on edge weights, and existence/solution of constant-curvature
//! weights via a convex potential.
//!
//! Module map:
//! - [`graph`]: graph representation, file formats, builders, hop metric.
//! - [`lp`]: a self-contained two-phase dense simplex solver.
//! - [`curvature`]: per-edge curvature (closed form, Lipschitz dual LP, lazy
//!   random-walk oracle) and the curvature Jacobian in log-weight coordinates.
//! - [`flow`]: RK4 integration of the prescribed-curvature flow, gauge
//!   transforms, convergence reports.
//! - [`uniformize`]: exact edge-density certificates (brute force and
//!   max-flow), constant-weight classification, and the convex potential
//!   whose minimizer yields constant-curvature weights.
//! - [`rational`]: exact rational arithmetic backing the density decisions.
//!
//! All distances are hop (unweighted shortest-path) distances; edge weights
//! enter only through vertex masses, never through the metric.

pub mod curvature;
pub mod flow;
pub mod graph;
pub mod lp;
mod maxflow;
pub mod rational;
pub mod uniformize;

pub use curvature::{
    curvature_jacobian, curvature_vector, CurvatureError, CurvatureJacobian, CurvatureMethod,
    CurvatureVector, MethodSelector,
};
pub use flow::{
    average_curvature, convergence_report, integrate, ConvergenceReport, FlowError, FlowOptions,
    FlowSample, FlowTrajectory, PrescribedCurvature, TargetKind, Termination,
};
pub use graph::{Graph, GraphError, SubsetStats, VertexSubset, WeightVector};
pub use rational::Rational;
pub use uniformize::{
    attainability_probe, check_condition_brute, check_condition_flow, classify_constant_weight,
    solve_constant_weights, DensityCertificate, DensityMethod, NewtonOptions,
    UniformizationResult, UniformizeError, WeightClass,
};
