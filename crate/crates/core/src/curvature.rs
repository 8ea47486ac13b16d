//! Coarse Ricci curvature of edges in a weighted graph, computed three ways:
//!
//! - **Closed form** (girth >= 6): `kappa(x,y) = 2 w_xy (1/m(x) + 1/m(y)) - 2`
//!   where `m(x)` is the vertex mass (sum of incident edge weights). On
//!   graphs without short cycles the optimal transport plan is forced, and
//!   the curvature collapses to this local expression.
//! - **Lipschitz dual LP** (any graph): the limit-free formulation
//!   `kappa(x,y) = min { Lap f(x) - Lap f(y) : f 1-Lipschitz, f(y)-f(x)=1 }`
//!   with `Lap f(x) = (1/m(x)) sum_z w_xz (f(z) - f(x))`. Per-edge Lipschitz
//!   constraints suffice because the metric is the hop metric.
//! - **Lazy random-walk oracle**: for idleness `alpha` in (0,1), transport
//!   cost between the one-step lazy measures, rescaled by `1/(1-alpha)`.
//!   Near `alpha = 1` this stabilizes at the curvature and serves as an
//!   independent cross-check on the other two routes.
//!
//! The curvature Jacobian `d kappa_i / d r_j` in log-weight coordinates
//! `r = ln w` drives the flow analysis: it is symmetric, has zero row sums,
//! and is positive semidefinite with kernel spanned by the all-ones vector.

use crate::graph::{Graph, WeightVector};
use crate::lp::{self, LinearProgram, LpError, LpSolution, Relation};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("operation requires girth >= {required}; graph has girth {actual:?}")]
    Girth {
        required: usize,
        actual: Option<usize>,
    },
    #[error("idleness parameter must lie in (0, 1), got {0}")]
    AlphaRange(f64),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("curvature solve failed: {0}")]
    Numerical(String),
}

/// Which computation produced a curvature value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureMethod {
    ClosedForm,
    LipschitzLp,
    AlphaOracle,
}

/// Caller-facing method choice; `Auto` picks the closed form when the girth
/// permits and the LP otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodSelector {
    #[default]
    Auto,
    ClosedForm,
    LipschitzLp,
}

/// Per-edge curvatures tagged with the method that produced them.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureVector {
    values: Vec<f64>,
    method: CurvatureMethod,
}

impl CurvatureVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> CurvatureMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.values[edge]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

fn require_girth(graph: &Graph, required: usize) -> Result<(), CurvatureError> {
    if graph.has_min_girth(required) {
        Ok(())
    } else {
        Err(CurvatureError::Girth {
            required,
            actual: graph.girth(),
        })
    }
}

/// Closed-form curvature of one edge; requires girth >= 6.
pub fn edge_curvature_closed_form(
    graph: &Graph,
    weights: &WeightVector,
    edge: usize,
) -> Result<f64, CurvatureError> {
    require_girth(graph, 6)?;
    let (x, y) = graph.endpoints(edge);
    let mx = graph.vertex_mass(weights, x);
    let my = graph.vertex_mass(weights, y);
    Ok(2.0 * weights[edge] * (1.0 / mx + 1.0 / my) - 2.0)
}

/// Builds the Lipschitz dual program for one edge. With `all_pairs` set the
/// 1-Lipschitz condition is imposed on every vertex pair at its hop
/// distance; otherwise only on edges, which is equivalent under the hop
/// metric (shortest paths chain the per-edge bounds).
fn build_lipschitz_lp(
    graph: &Graph,
    weights: &WeightVector,
    edge: usize,
    all_pairs: bool,
) -> LinearProgram {
    let n = graph.vertex_count();
    let (x, y) = graph.endpoints(edge);
    let mx = graph.vertex_mass(weights, x);
    let my = graph.vertex_mass(weights, y);

    // Objective: Lap f(x) - Lap f(y), linear in the f values.
    let mut objective = vec![0.0; n];
    for &(z, e) in graph.neighbors(x) {
        objective[z] += weights[e] / mx;
        objective[x] -= weights[e] / mx;
    }
    for &(z, e) in graph.neighbors(y) {
        objective[z] -= weights[e] / my;
        objective[y] += weights[e] / my;
    }

    let mut lp = LinearProgram::minimize(objective);

    // Normalization: f(y) - f(x) = 1 and the gauge f(x) = 0.
    let mut row = vec![0.0; n];
    row[y] = 1.0;
    row[x] = -1.0;
    lp.constrain(row, Relation::Eq, 1.0);
    let mut gauge = vec![0.0; n];
    gauge[x] = 1.0;
    lp.constrain(gauge, Relation::Eq, 0.0);

    let mut lipschitz_pair = |u: usize, v: usize, dist: f64| {
        let mut row = vec![0.0; n];
        row[u] = 1.0;
        row[v] = -1.0;
        lp.constrain(row.clone(), Relation::Le, dist);
        for c in row.iter_mut() {
            *c = -*c;
        }
        lp.constrain(row, Relation::Le, dist);
    };

    if all_pairs {
        for u in 0..n {
            let dist = graph.bfs_distances(u);
            for (v, &d) in dist.iter().enumerate().skip(u + 1) {
                lipschitz_pair(u, v, d as f64);
            }
        }
    } else {
        for &(u, v) in graph.edges() {
            lipschitz_pair(u, v, 1.0);
        }
    }
    lp
}

/// Curvature of one edge via the limit-free Lipschitz dual LP. Valid on any
/// connected weighted graph.
pub fn edge_curvature_lp(
    graph: &Graph,
    weights: &WeightVector,
    edge: usize,
) -> Result<f64, CurvatureError> {
    let lp = build_lipschitz_lp(graph, weights, edge, false);
    match lp::solve(&lp)? {
        LpSolution::Optimal { value, .. } => Ok(value),
        other => Err(CurvatureError::Numerical(format!(
            "Lipschitz dual LP returned {other:?} for edge {edge}"
        ))),
    }
}

/// Transport-based curvature at idleness `alpha`: rescaled cost of moving
/// the lazy one-step measure at `x` onto the one at `y`.
pub fn edge_curvature_alpha(
    graph: &Graph,
    weights: &WeightVector,
    edge: usize,
    alpha: f64,
) -> Result<f64, CurvatureError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CurvatureError::AlphaRange(alpha));
    }
    let (x, y) = graph.endpoints(edge);

    // Lazy measure: mass alpha at the center, (1-alpha) w_xz / m(x) at each
    // neighbor z. Support lists keep the center first.
    let lazy_measure = |center: usize| -> (Vec<usize>, Vec<f64>) {
        let m = graph.vertex_mass(weights, center);
        let mut support = vec![center];
        let mut mass = vec![alpha];
        for &(z, e) in graph.neighbors(center) {
            support.push(z);
            mass.push((1.0 - alpha) * weights[e] / m);
        }
        (support, mass)
    };
    let (sx, mu_x) = lazy_measure(x);
    let (sy, mu_y) = lazy_measure(y);

    // Hop-distance costs between the supports.
    let cost: Vec<Vec<f64>> = sx
        .iter()
        .map(|&u| {
            let dist = graph.bfs_distances(u);
            sy.iter().map(|&v| dist[v] as f64).collect()
        })
        .collect();

    // Transport plan variables A[i][j] >= 0 flattened row-major; marginals
    // fixed to the two measures.
    let (rows, cols) = (sx.len(), sy.len());
    let objective: Vec<f64> = cost.iter().flatten().copied().collect();
    let mut lp = LinearProgram::minimize(objective);
    for v in 0..rows * cols {
        lp.set_bounds(v, Some(0.0), None);
    }
    for i in 0..rows {
        let mut row = vec![0.0; rows * cols];
        for j in 0..cols {
            row[i * cols + j] = 1.0;
        }
        lp.constrain(row, Relation::Eq, mu_x[i]);
    }
    for j in 0..cols {
        let mut row = vec![0.0; rows * cols];
        for i in 0..rows {
            row[i * cols + j] = 1.0;
        }
        lp.constrain(row, Relation::Eq, mu_y[j]);
    }

    let transport_cost = match lp::solve(&lp)? {
        LpSolution::Optimal { value, .. } => value,
        other => {
            return Err(CurvatureError::Numerical(format!(
                "transport LP returned {other:?} for edge {edge}"
            )))
        }
    };
    // d(x, y) = 1 for an edge.
    Ok((1.0 - transport_cost) / (1.0 - alpha))
}

fn closed_form_values(graph: &Graph, weights: &WeightVector) -> Vec<f64> {
    let masses = graph.vertex_masses(weights);
    graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(x, y))| 2.0 * weights[e] * (1.0 / masses[x] + 1.0 / masses[y]) - 2.0)
        .collect()
}

fn lp_values(graph: &Graph, weights: &WeightVector) -> Result<Vec<f64>, CurvatureError> {
    let edge_count = graph.edge_count();
    // Each edge's LP is independent, so this is the crate's main
    // data-parallel site.
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..edge_count)
            .into_par_iter()
            .map(|e| edge_curvature_lp(graph, weights, e))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..edge_count)
            .map(|e| edge_curvature_lp(graph, weights, e))
            .collect()
    }
}

/// Computes all edge curvatures. `Auto` uses the closed form when
/// girth >= 6 and the Lipschitz LP otherwise.
pub fn curvature_vector(
    graph: &Graph,
    weights: &WeightVector,
    selector: MethodSelector,
) -> Result<CurvatureVector, CurvatureError> {
    assert_eq!(
        weights.len(),
        graph.edge_count(),
        "weight vector length must match edge count"
    );
    let method = match selector {
        MethodSelector::Auto => {
            if graph.has_min_girth(6) {
                CurvatureMethod::ClosedForm
            } else {
                CurvatureMethod::LipschitzLp
            }
        }
        MethodSelector::ClosedForm => CurvatureMethod::ClosedForm,
        MethodSelector::LipschitzLp => CurvatureMethod::LipschitzLp,
    };
    let values = match method {
        CurvatureMethod::ClosedForm => {
            require_girth(graph, 6)?;
            closed_form_values(graph, weights)
        }
        CurvatureMethod::LipschitzLp => lp_values(graph, weights)?,
        CurvatureMethod::AlphaOracle => unreachable!("selector never picks the oracle"),
    };
    Ok(CurvatureVector { values, method })
}

/// Dense symmetric matrix `J_ij = d kappa_i / d r_j` in log-weight
/// coordinates, for girth >= 6 where the closed form applies.
#[derive(Debug, Clone)]
pub struct CurvatureJacobian {
    dim: usize,
    data: Vec<f64>,
}

impl CurvatureJacobian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// `z^T J z`; nonnegative up to roundoff since the matrix is a sum of
    /// weighted graph Laplacians of the line-graph incidence structure.
    pub fn quadratic_form(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.dim);
        let mut acc = 0.0;
        for (i, &zi) in z.iter().enumerate() {
            for (j, &zj) in z.iter().enumerate() {
                acc += zi * self.get(i, j) * zj;
            }
        }
        acc
    }
}

/// Assembles the curvature Jacobian: for edges `e_i`, `e_j` sharing exactly
/// the endpoint `u`, `J_ij = -2 w_i w_j / m(u)^2`; the diagonal is the
/// negated off-diagonal row sum, which makes every row sum vanish exactly.
pub fn curvature_jacobian(
    graph: &Graph,
    weights: &WeightVector,
) -> Result<CurvatureJacobian, CurvatureError> {
    require_girth(graph, 6)?;
    let m = graph.edge_count();
    let masses = graph.vertex_masses(weights);
    let mut data = vec![0.0; m * m];
    for (u, &mass) in masses.iter().enumerate() {
        let scale = 2.0 / (mass * mass);
        let incident = graph.neighbors(u);
        for (a, &(_, ea)) in incident.iter().enumerate() {
            for &(_, eb) in incident.iter().skip(a + 1) {
                let c = scale * weights[ea] * weights[eb];
                data[ea * m + eb] -= c;
                data[eb * m + ea] -= c;
            }
        }
    }
    for i in 0..m {
        let off_sum: f64 = (0..m).filter(|&j| j != i).map(|j| data[i * m + j]).sum();
        data[i * m + i] = -off_sum;
    }
    Ok(CurvatureJacobian { dim: m, data })
}
