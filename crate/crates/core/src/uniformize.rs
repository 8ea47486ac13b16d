//! Existence and construction of constant-curvature weights.
//!
//! **Existence** is decided by a density condition: constant-curvature
//! weights exist iff every proper non-empty vertex subset `S` satisfies
//! `|E(S)|/|S| < |E|/|V|` strictly. Two checkers produce an exact-rational
//! [`DensityCertificate`]: an exhaustive subset enumeration (small graphs)
//! and a max-flow method (any size) that repeatedly solves a
//! densest-subgraph decision problem at exact rational thresholds.
//!
//! **Construction** minimizes the smooth convex functional
//!
//! ```text
//! H(g) = (|E|/|V|) sum_z g(z) + 1/2 sum_x sum_{y~x} psi(g(y)-g(x))
//!        - 1/2 sum_z d(z) g(z),        psi(t) = ln(1 + e^t)
//! ```
//!
//! over zero-mean vertex potentials. At the minimizer the masses
//! `m(x) = e^{g(x)}` recover the weights via
//! `w(x,y) = (|V|/|E|) m(x)m(y)/(m(x)+m(y))`, which have constant curvature
//! equal to the average curvature. When the density condition fails, `H` has
//! a recession direction and the damped Newton iteration diverges; the
//! iterate-norm guard turns that into a reported [`UniformizeError::Divergence`].

use crate::flow::{
    convergence_report, integrate, ConvergenceReport, FlowError, FlowOptions, PrescribedCurvature,
};
use crate::graph::{Graph, VertexSubset, WeightVector};
use crate::maxflow::FlowNetwork;
use crate::rational::Rational;
use serde::Serialize;
use thiserror::Error;

/// Largest vertex count accepted by the exhaustive checker.
pub const BRUTE_FORCE_VERTEX_LIMIT: usize = 24;

#[derive(Debug, Error)]
pub enum UniformizeError {
    #[error("graph has {got} vertices; the exhaustive check caps at {limit}")]
    TooLarge { limit: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("operation requires girth >= 6; graph has girth {girth:?}")]
    NotApplicable { girth: Option<usize> },
    #[error(
        "Newton iteration diverged after {iterations} iterations \
         (|gradient| = {gradient_norm:.3e}, |potential| = {potential_norm:.3e}); \
         constant-curvature weights most likely do not exist"
    )]
    Divergence {
        iterations: usize,
        gradient_norm: f64,
        potential_norm: f64,
    },
    #[error("target curvature is inconsistent: sum deviates from 2(|V|-|E|) by {gap:.3e}")]
    Consistency { gap: f64 },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Which algorithm produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    BruteForce,
    MaxFlow,
}

/// Outcome of the existence check, with exact rational densities.
#[derive(Debug, Clone)]
pub struct DensityCertificate {
    /// True iff every proper non-empty subset is strictly sparser than the
    /// whole graph — exactly when constant-curvature weights exist.
    pub satisfied: bool,
    /// `|E|/|V|`.
    pub global_density: Rational,
    /// Largest density among proper non-empty subsets.
    pub max_proper_density: Rational,
    /// A densest proper subset when the condition fails; absent otherwise.
    pub witness: Option<VertexSubset>,
    pub method: DensityMethod,
}

fn subset_density(graph: &Graph, vertices: &[usize]) -> Rational {
    let subset = VertexSubset::new(graph, vertices.iter().copied());
    Rational::new(subset.internal_edges() as i64, subset.size() as i64)
}

fn require_at_least_two_vertices(graph: &Graph) -> Result<(), UniformizeError> {
    if graph.vertex_count() < 2 {
        return Err(UniformizeError::Degenerate(
            "density condition needs at least two vertices".into(),
        ));
    }
    Ok(())
}

/// Candidate subset tracked during enumeration: exact density plus the
/// bitmask, merged by (density desc, mask asc) so the result is independent
/// of work partitioning.
#[derive(Clone, Copy)]
struct BestMask {
    density: Rational,
    mask: u32,
}

fn better(a: BestMask, b: BestMask) -> BestMask {
    if b.density > a.density || (b.density == a.density && b.mask < a.mask) {
        b
    } else {
        a
    }
}

fn evaluate_mask(adjacency_masks: &[u32], mask: u32) -> BestMask {
    let size = mask.count_ones();
    let mut incidences = 0_u32;
    let mut bits = mask;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        incidences += (adjacency_masks[v] & mask).count_ones();
        bits &= bits - 1;
    }
    BestMask {
        density: Rational::new((incidences / 2) as i64, size as i64),
        mask,
    }
}

/// Exhaustive existence check over all proper non-empty subsets; exact
/// rational comparisons throughout. Capped at [`BRUTE_FORCE_VERTEX_LIMIT`]
/// vertices.
pub fn check_condition_brute(graph: &Graph) -> Result<DensityCertificate, UniformizeError> {
    require_at_least_two_vertices(graph)?;
    let n = graph.vertex_count();
    if n > BRUTE_FORCE_VERTEX_LIMIT {
        return Err(UniformizeError::TooLarge {
            limit: BRUTE_FORCE_VERTEX_LIMIT,
            got: n,
        });
    }
    let adjacency_masks: Vec<u32> = (0..n)
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .fold(0_u32, |acc, &(u, _)| acc | (1 << u))
        })
        .collect();
    let full = (1_u32 << n) - 1;

    // Non-empty proper subsets = masks 1 .. full (exclusive).
    let best = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (1..full)
                .into_par_iter()
                .map(|mask| evaluate_mask(&adjacency_masks, mask))
                .reduce_with(better)
                .expect("at least one proper subset exists")
        }
        #[cfg(not(feature = "parallel"))]
        {
            (1..full)
                .map(|mask| evaluate_mask(&adjacency_masks, mask))
                .reduce(better)
                .expect("at least one proper subset exists")
        }
    };

    let global_density = Rational::new(graph.edge_count() as i64, n as i64);
    let satisfied = best.density < global_density;
    let witness = (!satisfied).then(|| {
        VertexSubset::new(graph, (0..n).filter(|&v| best.mask & (1 << v) != 0))
    });
    Ok(DensityCertificate {
        satisfied,
        global_density,
        max_proper_density: best.density,
        witness,
        method: DensityMethod::BruteForce,
    })
}

/// Densest subgraph among subsets avoiding `excluded`, by Dinkelbach
/// iteration: starting from the full remainder, repeatedly test "is there a
/// subset strictly denser than p/q?" with an exact integer max-flow
/// construction, and ratchet the threshold up to the answer.
fn densest_excluding(graph: &Graph, excluded: usize) -> (Rational, Vec<usize>) {
    let n = graph.vertex_count();
    let members: Vec<usize> = (0..n).filter(|&v| v != excluded).collect();
    let edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| u != excluded && v != excluded)
        .collect();
    let edge_total = edges.len() as i64;
    let mut degree = vec![0_i64; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }

    let mut best_set = members.clone();
    let mut best_density = Rational::new(edge_total, members.len() as i64);
    loop {
        let (p, q) = (best_density.num(), best_density.den());
        // Nodes: graph vertices (excluded one simply unused), source n,
        // sink n+1. For the source side {s} + S the cut capacity is
        // q*m*|W| + 2(p|S| - q|E(S)|), so an improving subset exists iff
        // the max flow is strictly below q*m*|W|.
        let source = n;
        let sink = n + 1;
        let mut net = FlowNetwork::new(n + 2);
        for &v in &members {
            net.add_edge(source, v, q * edge_total);
            net.add_edge(v, sink, q * edge_total + 2 * p - q * degree[v]);
        }
        for &(u, v) in &edges {
            net.add_edge(u, v, q);
            net.add_edge(v, u, q);
        }
        let flow = net.max_flow(source, sink);
        if flow >= q * edge_total * members.len() as i64 {
            return (best_density, best_set);
        }
        let side = net.min_cut_source_side(source);
        let improved: Vec<usize> = members.iter().copied().filter(|&v| side[v]).collect();
        let density = subset_density(graph, &improved);
        debug_assert!(density > best_density, "threshold test must strictly improve");
        best_density = density;
        best_set = improved;
    }
}

/// Max-flow existence check, exact at any size: every proper subset omits
/// some vertex, so the maximum proper density is the maximum over `v` of the
/// densest subgraph avoiding `v`.
pub fn check_condition_flow(graph: &Graph) -> Result<DensityCertificate, UniformizeError> {
    require_at_least_two_vertices(graph)?;
    let n = graph.vertex_count();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for excluded in 0..n {
        let (density, set) = densest_excluding(graph, excluded);
        if best.as_ref().is_none_or(|(d, _)| density > *d) {
            best = Some((density, set));
        }
    }
    let (max_proper_density, witness_vertices) = best.expect("n >= 2 gives candidates");
    let global_density = Rational::new(graph.edge_count() as i64, n as i64);
    let satisfied = max_proper_density < global_density;
    Ok(DensityCertificate {
        satisfied,
        global_density,
        max_proper_density,
        witness: (!satisfied)
            .then(|| VertexSubset::new(graph, witness_vertices.iter().copied())),
        method: DensityMethod::MaxFlow,
    })
}

/// Structural class of graphs whose constant-curvature weights are constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightClass {
    Regular(usize),
    /// Bipartite with constant degree on each side: `(a, b)` where `a` is
    /// the degree on the side containing vertex 0.
    SemiRegularBipartite(usize, usize),
    Neither,
}

/// Detects regularity, then semi-regular bipartiteness by 2-coloring.
pub fn classify_constant_weight(graph: &Graph) -> WeightClass {
    let n = graph.vertex_count();
    let degrees: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    if degrees.iter().all(|&d| d == degrees[0]) {
        return WeightClass::Regular(degrees[0]);
    }
    // BFS 2-coloring.
    let mut color = vec![usize::MAX; n];
    color[0] = 0;
    let mut queue = std::collections::VecDeque::from([0_usize]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in graph.neighbors(u) {
            if color[v] == usize::MAX {
                color[v] = 1 - color[u];
                queue.push_back(v);
            } else if color[v] == color[u] {
                return WeightClass::Neither;
            }
        }
    }
    let side_degree = |side: usize| -> Option<usize> {
        let mut found = None;
        for v in 0..n {
            if color[v] == side {
                match found {
                    None => found = Some(degrees[v]),
                    Some(d) if d != degrees[v] => return None,
                    _ => {}
                }
            }
        }
        found
    };
    match (side_degree(0), side_degree(1)) {
        (Some(a), Some(b)) => WeightClass::SemiRegularBipartite(a, b),
        _ => WeightClass::Neither,
    }
}

/// `ln(1 + e^t)` in the overflow-safe branch form.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Logistic function `1/(1 + e^{-t})`; saturates gracefully at both ends.
fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Value and gradient of the convex functional `H` at vertex potentials `g`.
/// The gradient at `x` is `|E|/|V| - sum_{y~x} 1/(1 + e^{g(x)-g(y)})` and
/// always sums to zero over the vertices.
pub fn evaluate_h(graph: &Graph, potentials: &[f64]) -> (f64, Vec<f64>) {
    let n = graph.vertex_count();
    assert_eq!(potentials.len(), n, "one potential per vertex");
    let ratio = graph.edge_count() as f64 / n as f64;
    let mut value = 0.0;
    let mut gradient = vec![0.0; n];
    for x in 0..n {
        let gx = potentials[x];
        value += ratio * gx - 0.5 * graph.degree(x) as f64 * gx;
        let mut incoming = 0.0;
        for &(y, _) in graph.neighbors(x) {
            value += 0.5 * softplus(potentials[y] - gx);
            incoming += sigmoid(potentials[y] - gx); // = 1/(1+e^{g(x)-g(y)})
        }
        gradient[x] = ratio - incoming;
    }
    (value, gradient)
}

/// Hessian of `H`: a weighted Laplacian with edge weights
/// `sigma'(g(x)-g(y))`, symmetric, PSD, kernel containing the ones vector.
pub fn hessian_h(graph: &Graph, potentials: &[f64]) -> Vec<Vec<f64>> {
    let n = graph.vertex_count();
    assert_eq!(potentials.len(), n, "one potential per vertex");
    let mut h = vec![vec![0.0; n]; n];
    for x in 0..n {
        for &(y, _) in graph.neighbors(x) {
            let s = sigmoid(potentials[x] - potentials[y]);
            let coupling = s * (1.0 - s);
            h[x][y] -= coupling;
            h[x][x] += coupling;
        }
    }
    h
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Success threshold on `max |grad H|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Abort with a divergence report once `max |g|` exceeds this bound.
    /// When the density condition fails, `H` has a recession direction along
    /// which the gradient also decays, so a gradient test alone would
    /// eventually "succeed" at a meaningless point; the iterate bound is
    /// what detects non-existence reliably.
    pub divergence_bound: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 100,
            divergence_bound: 15.0,
        }
    }
}

/// Constant-curvature weights plus the potentials that generate them.
#[derive(Debug, Clone)]
pub struct UniformizationResult {
    /// Zero-mean vertex potentials `g*`.
    pub potentials: Vec<f64>,
    /// Vertex masses `e^{g*}`.
    pub masses: Vec<f64>,
    /// Recovered weights `(|V|/|E|) m(x)m(y)/(m(x)+m(y))` in edge order.
    pub weights: WeightVector,
    /// Final `max |grad H|`.
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Solves `A s = b` by Gaussian elimination with partial pivoting;
/// `None` when the system is numerically singular.
fn gaussian_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col].clone();
        for row in col + 1..n {
            let factor = a[row][col] / pivot[col];
            if factor == 0.0 {
                continue;
            }
            for (entry, &p) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *entry -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn recenter(g: &mut [f64]) {
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    for v in g.iter_mut() {
        *v -= mean;
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Minimizes `H` by damped Newton from `g = 0` on the zero-mean subspace and
/// recovers the constant-curvature weights. Requires girth >= 6 (where the
/// recovered weights provably have curvature equal to the average
/// curvature). Divergence is the practical non-existence signal; the density
/// certificate is the authoritative answer.
pub fn solve_constant_weights(
    graph: &Graph,
    options: &NewtonOptions,
) -> Result<UniformizationResult, UniformizeError> {
    if !graph.has_min_girth(6) {
        return Err(UniformizeError::NotApplicable {
            girth: graph.girth(),
        });
    }
    require_at_least_two_vertices(graph)?;
    let n = graph.vertex_count();
    let mut g = vec![0.0; n];
    let (mut value, mut gradient) = evaluate_h(graph, &g);

    let mut iterations = 0;
    loop {
        let gradient_norm = inf_norm(&gradient);
        if gradient_norm <= options.tol {
            recenter(&mut g);
            let masses: Vec<f64> = g.iter().map(|x| x.exp()).collect();
            let ratio = n as f64 / graph.edge_count() as f64;
            let weights = WeightVector::new(
                graph
                    .edges()
                    .iter()
                    .map(|&(x, y)| ratio * masses[x] * masses[y] / (masses[x] + masses[y]))
                    .collect(),
            )
            .expect("recovered weights are positive");
            return Ok(UniformizationResult {
                potentials: g,
                masses,
                weights,
                gradient_norm,
                iterations,
            });
        }
        if inf_norm(&g) > options.divergence_bound || iterations >= options.max_iter {
            return Err(UniformizeError::Divergence {
                iterations,
                gradient_norm,
                potential_norm: inf_norm(&g),
            });
        }

        // Newton direction on the zero-mean subspace: adding the rank-one
        // projector onto the ones-direction makes the Laplacian-like Hessian
        // invertible without disturbing the zero-mean component (the
        // right-hand side sums to zero, so the solution stays zero-mean).
        let hessian = hessian_h(graph, &g);
        let shift = 1.0 / n as f64;
        let system: Vec<Vec<f64>> = hessian
            .iter()
            .map(|row| row.iter().map(|&v| v + shift).collect())
            .collect();
        let rhs: Vec<f64> = gradient.iter().map(|&v| -v).collect();
        let Some(direction) = gaussian_solve(system, rhs) else {
            return Err(UniformizeError::Verification(
                "Newton system was numerically singular".into(),
            ));
        };

        // Damping: halve until H strictly decreases. Near the minimum the
        // theoretical decrease drops below double-precision rounding noise
        // while the gradient still contracts quadratically, so a step that
        // at least halves the gradient without raising H beyond the noise
        // floor is also accepted.
        let noise_floor = 1e-14 * (1.0 + value.abs());
        let mut lambda = 1.0;
        let mut halvings = 0;
        loop {
            let mut trial: Vec<f64> = g
                .iter()
                .zip(&direction)
                .map(|(gi, di)| gi + lambda * di)
                .collect();
            recenter(&mut trial);
            let (trial_value, trial_gradient) = evaluate_h(graph, &trial);
            let strict_decrease = trial_value < value;
            let gradient_contraction = trial_value <= value + noise_floor
                && inf_norm(&trial_gradient) <= 0.5 * gradient_norm;
            if strict_decrease || gradient_contraction {
                g = trial;
                value = trial_value;
                gradient = trial_gradient;
                break;
            }
            halvings += 1;
            if halvings > 60 {
                return Err(UniformizeError::Divergence {
                    iterations,
                    gradient_norm,
                    potential_norm: inf_norm(&g),
                });
            }
            lambda *= 0.5;
        }
        iterations += 1;
    }
}

/// Empirically probes whether a prescribed target is attainable by running
/// the flow from unit weights and analyzing convergence. Converging proves
/// attainability (the limit realizes the target, verified to 1e-6);
/// `converged = false` only means "unattained within the horizon" and is
/// deliberately inconclusive.
pub fn attainability_probe(
    graph: &Graph,
    target: &PrescribedCurvature,
    options: &FlowOptions,
) -> Result<ConvergenceReport, UniformizeError> {
    if !graph.has_min_girth(6) {
        return Err(UniformizeError::NotApplicable {
            girth: graph.girth(),
        });
    }
    let gap = target.consistency_gap(graph);
    if gap.abs() > 1e-9 {
        return Err(UniformizeError::Consistency { gap });
    }
    let trajectory = integrate(
        graph,
        &WeightVector::unit(graph.edge_count()),
        target,
        options,
    )?;
    let report = convergence_report(&trajectory, target, options.tol);
    if report.converged && report.residual > 1e-6 {
        return Err(UniformizeError::Verification(format!(
            "converged flag with residual {} above the 1e-6 attainability bar",
            report.residual
        )));
    }
    Ok(report)
}
