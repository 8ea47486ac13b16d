//! Prescribed-curvature flow on edge weights.
//!
//! The flow evolves log-weights `r = ln w` by `dr_i/dt = -(kappa_i(e^r) -
//! kappa*_i)`, which keeps weights positive unconditionally and, on graphs of
//! girth >= 6, is the gradient flow of a convex potential. Integration is
//! classic fixed-step RK4 on a uniform macro grid, with recursive step
//! halving whenever a step would move any `r_i` by more than
//! [`MAX_LOG_STEP`]; halving below [`MIN_STEP`] terminates the run with the
//! partial trajectory.
//!
//! Two gauge transforms re-express a solved trajectory as a solution of the
//! classical flow `dw_i/dt = -kappa_i w_i` (multiply by `e^{-t kappa*_i}`)
//! and of the normalized flow whose weights sum to one at every time.

use crate::curvature::{curvature_vector, CurvatureError, MethodSelector};
use crate::graph::{Graph, WeightVector};
use serde::Serialize;
use std::io::{self, Write};
use thiserror::Error;

/// Largest per-step change of any log-weight before the step is halved.
pub const MAX_LOG_STEP: f64 = 0.5;
/// Smallest micro step the halving guard will attempt.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("invalid integrator options: {0}")]
    Options(String),
    #[error("target has {got} entries but the graph has {expected} edges")]
    Dimension { expected: usize, got: usize },
}

/// Average curvature `2(|V|/|E| - 1)`: the only constant target consistent
/// with the total-curvature identity on girth >= 6 graphs.
pub fn average_curvature(graph: &Graph) -> Result<f64, CurvatureError> {
    if !graph.has_min_girth(6) {
        return Err(CurvatureError::Girth {
            required: 6,
            actual: graph.girth(),
        });
    }
    Ok(2.0 * (graph.vertex_count() as f64 / graph.edge_count() as f64 - 1.0))
}

/// How a prescribed target was specified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Zero,
    Average,
    Custom,
}

/// Per-edge target curvatures `kappa*`.
#[derive(Debug, Clone, Serialize)]
pub struct PrescribedCurvature {
    values: Vec<f64>,
    kind: TargetKind,
}

impl PrescribedCurvature {
    pub fn zero(edge_count: usize) -> Self {
        PrescribedCurvature {
            values: vec![0.0; edge_count],
            kind: TargetKind::Zero,
        }
    }

    /// Constant target at the graph's average curvature; girth >= 6 only.
    pub fn average(graph: &Graph) -> Result<Self, CurvatureError> {
        let kappa_bar = average_curvature(graph)?;
        Ok(PrescribedCurvature {
            values: vec![kappa_bar; graph.edge_count()],
            kind: TargetKind::Average,
        })
    }

    pub fn custom(values: Vec<f64>) -> Self {
        PrescribedCurvature {
            values,
            kind: TargetKind::Custom,
        }
    }

    pub fn constant(edge_count: usize, value: f64) -> Self {
        PrescribedCurvature {
            values: vec![value; edge_count],
            kind: TargetKind::Custom,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The common value when every entry agrees exactly.
    pub fn constant_value(&self) -> Option<f64> {
        let first = *self.values.first()?;
        self.values
            .iter()
            .all(|&v| v == first)
            .then_some(first)
    }

    /// `sum(kappa*) - 2(|V| - |E|)`: zero is required for the flow to
    /// conserve the total log-weight on girth >= 6 graphs.
    pub fn consistency_gap(&self, graph: &Graph) -> f64 {
        let sum: f64 = self.values.iter().sum();
        sum - 2.0 * (graph.vertex_count() as f64 - graph.edge_count() as f64)
    }
}

/// Right-hand side `-(kappa(e^r) - kappa*)` at log-weights `r`.
pub fn flow_rhs(
    graph: &Graph,
    r: &[f64],
    target: &PrescribedCurvature,
) -> Result<Vec<f64>, FlowError> {
    if target.len() != graph.edge_count() {
        return Err(FlowError::Dimension {
            expected: graph.edge_count(),
            got: target.len(),
        });
    }
    let kappa = curvature_vector(graph, &WeightVector::from_logs(r), MethodSelector::Auto)?;
    Ok(kappa
        .values()
        .iter()
        .zip(target.values())
        .map(|(k, t)| -(k - t))
        .collect())
}

/// `sum (kappa_i - kappa*_i)^2`: the quantity driven monotonically to zero
/// by the flow on girth >= 6 graphs.
pub fn lyapunov(kappa: &[f64], target: &PrescribedCurvature) -> f64 {
    assert_eq!(kappa.len(), target.len(), "length mismatch");
    kappa
        .iter()
        .zip(target.values())
        .map(|(k, t)| (k - t) * (k - t))
        .sum()
}

#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Macro step; also the sampling grid resolution.
    pub dt: f64,
    /// Integration horizon.
    pub t_max: f64,
    /// Early-exit tolerance on `max |kappa - kappa*|`, checked at macro
    /// boundaries. Negative disables early termination (useful for probing
    /// equilibria whose residual is exactly zero).
    pub tol: f64,
    /// Record a sample every this many macro steps.
    pub sample_every: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            dt: 1e-2,
            t_max: 30.0,
            tol: 1e-8,
            sample_every: 10,
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    /// Residual dropped to the tolerance at time `t`.
    Converged { t: f64 },
    /// Horizon reached without meeting the tolerance.
    TimeLimit,
    /// Step halving hit [`MIN_STEP`] at time `t`; the trajectory holds all
    /// progress up to that point.
    StepFailure { t: f64 },
}

/// One recorded state of a run.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub t: f64,
    pub log_weights: Vec<f64>,
    pub kappa: Vec<f64>,
    pub lyapunov: f64,
}

impl FlowSample {
    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|r| r.exp()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
    pub termination: Termination,
    /// Accepted micro steps (>= macro steps when halving occurred).
    pub steps: usize,
    /// Accumulated line integral of `(kappa - kappa*) . dr` along the
    /// trajectory (trapezoid rule per accepted step). On girth >= 6 graphs
    /// this is the exact change of the flow's convex potential, so it is
    /// nonpositive along solutions.
    pub potential_drop: f64,
}

impl FlowTrajectory {
    pub fn final_sample(&self) -> &FlowSample {
        self.samples.last().expect("trajectory is never empty")
    }

    pub fn final_weights(&self) -> WeightVector {
        WeightVector::from_logs(&self.final_sample().log_weights)
    }

    pub fn final_kappa(&self) -> &[f64] {
        &self.final_sample().kappa
    }

    pub fn converged(&self) -> bool {
        matches!(self.termination, Termination::Converged { .. })
    }
}

struct Driver<'a> {
    graph: &'a Graph,
    target: &'a [f64],
}

impl<'a> Driver<'a> {
    /// Curvature at log-weights `r`, or `None` when the state is out of
    /// floating-point range (treated like an oversized step).
    fn kappa_at(&self, r: &[f64]) -> Result<Option<Vec<f64>>, FlowError> {
        if r.iter().any(|x| !x.is_finite()) {
            return Ok(None);
        }
        let kappa = curvature_vector(self.graph, &WeightVector::from_logs(r), MethodSelector::Auto)?;
        Ok(Some(kappa.values().to_vec()))
    }

    fn rhs_from(&self, kappa: &[f64]) -> Vec<f64> {
        kappa
            .iter()
            .zip(self.target)
            .map(|(k, t)| t - k)
            .collect()
    }

    /// One RK4 step of size `h`, halving recursively when the increment is
    /// too large. Returns false when halving bottoms out; `state` then holds
    /// the last committed point.
    fn try_step(&self, state: &mut State, h: f64) -> Result<bool, FlowError> {
        let n = state.r.len();
        let halve = |this: &Self, state: &mut State| -> Result<bool, FlowError> {
            if 0.5 * h < MIN_STEP {
                return Ok(false);
            }
            Ok(this.try_step(state, 0.5 * h)? && this.try_step(state, 0.5 * h)?)
        };

        let k1 = self.rhs_from(&state.kappa);
        let probe = |base: &[f64], dir: &[f64], scale: f64| -> Vec<f64> {
            base.iter()
                .zip(dir)
                .map(|(r, d)| r + scale * d)
                .collect::<Vec<f64>>()
        };

        let Some(kap2) = self.kappa_at(&probe(&state.r, &k1, 0.5 * h))? else {
            return halve(self, state);
        };
        let k2 = self.rhs_from(&kap2);
        let Some(kap3) = self.kappa_at(&probe(&state.r, &k2, 0.5 * h))? else {
            return halve(self, state);
        };
        let k3 = self.rhs_from(&kap3);
        let Some(kap4) = self.kappa_at(&probe(&state.r, &k3, h))? else {
            return halve(self, state);
        };
        let k4 = self.rhs_from(&kap4);

        let mut delta = vec![0.0; n];
        let mut max_abs = 0.0_f64;
        for i in 0..n {
            delta[i] = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !delta[i].is_finite() {
                return halve(self, state);
            }
            max_abs = max_abs.max(delta[i].abs());
        }
        if max_abs > MAX_LOG_STEP {
            return halve(self, state);
        }

        let r_new: Vec<f64> = state.r.iter().zip(&delta).map(|(r, d)| r + d).collect();
        let Some(kappa_new) = self.kappa_at(&r_new)? else {
            return halve(self, state);
        };
        for i in 0..n {
            let z_old = state.kappa[i] - self.target[i];
            let z_new = kappa_new[i] - self.target[i];
            state.potential_drop += 0.5 * (z_old + z_new) * delta[i];
        }
        state.r = r_new;
        state.kappa = kappa_new;
        state.t += h;
        state.steps += 1;
        Ok(true)
    }
}

struct State {
    t: f64,
    r: Vec<f64>,
    kappa: Vec<f64>,
    steps: usize,
    potential_drop: f64,
}

impl State {
    fn residual_inf(&self, target: &[f64]) -> f64 {
        self.kappa
            .iter()
            .zip(target)
            .map(|(k, t)| (k - t).abs())
            .fold(0.0, f64::max)
    }

    fn sample(&self, target: &PrescribedCurvature) -> FlowSample {
        FlowSample {
            t: self.t,
            log_weights: self.r.clone(),
            kappa: self.kappa.clone(),
            lyapunov: lyapunov(&self.kappa, target),
        }
    }
}

/// Integrates the prescribed-curvature flow from `w0` and samples the
/// trajectory on the macro grid (`t = 0`, every `sample_every`-th boundary,
/// and always the final state).
pub fn integrate(
    graph: &Graph,
    w0: &WeightVector,
    target: &PrescribedCurvature,
    options: &FlowOptions,
) -> Result<FlowTrajectory, FlowError> {
    if w0.len() != graph.edge_count() {
        return Err(FlowError::Dimension {
            expected: graph.edge_count(),
            got: w0.len(),
        });
    }
    if target.len() != graph.edge_count() {
        return Err(FlowError::Dimension {
            expected: graph.edge_count(),
            got: target.len(),
        });
    }
    if !(options.dt > 0.0 && options.dt.is_finite()) {
        return Err(FlowError::Options(format!("dt must be positive, got {}", options.dt)));
    }
    if !(options.t_max > 0.0 && options.t_max.is_finite()) {
        return Err(FlowError::Options(format!(
            "t_max must be positive, got {}",
            options.t_max
        )));
    }
    if options.sample_every == 0 {
        return Err(FlowError::Options("sample_every must be at least 1".into()));
    }

    let driver = Driver {
        graph,
        target: target.values(),
    };
    let mut state = State {
        t: 0.0,
        r: w0.logs(),
        kappa: driver
            .kappa_at(&w0.logs())?
            .expect("initial weights are finite by construction"),
        steps: 0,
        potential_drop: 0.0,
    };

    let mut samples = vec![state.sample(target)];
    if options.tol >= 0.0 && state.residual_inf(target.values()) <= options.tol {
        return Ok(FlowTrajectory {
            samples,
            termination: Termination::Converged { t: 0.0 },
            steps: 0,
            potential_drop: 0.0,
        });
    }

    // Macro boundaries at k*dt, plus a short final step when t_max is not a
    // multiple of dt.
    let full_steps = (options.t_max / options.dt + 1e-9).floor() as usize;
    let remainder = options.t_max - full_steps as f64 * options.dt;
    let total_boundaries = full_steps + usize::from(remainder > 1e-12);

    let mut last_sampled_t = 0.0_f64;
    let mut push_sample = |state: &State, samples: &mut Vec<FlowSample>| {
        if state.t > last_sampled_t {
            samples.push(state.sample(target));
            last_sampled_t = state.t;
        }
    };

    let mut termination = Termination::TimeLimit;
    for k in 1..=total_boundaries {
        let boundary = if k <= full_steps {
            k as f64 * options.dt
        } else {
            options.t_max
        };
        let h = boundary - state.t;
        if !driver.try_step(&mut state, h)? {
            termination = Termination::StepFailure { t: state.t };
            break;
        }
        state.t = boundary; // keep the grid exact; try_step accumulated the same value up to roundoff
        if options.tol >= 0.0 && state.residual_inf(target.values()) <= options.tol {
            termination = Termination::Converged { t: state.t };
            break;
        }
        if k % options.sample_every == 0 {
            push_sample(&state, &mut samples);
        }
    }
    push_sample(&state, &mut samples);

    Ok(FlowTrajectory {
        samples,
        termination,
        steps: state.steps,
        potential_drop: state.potential_drop,
    })
}

fn transform_samples<F>(traj: &FlowTrajectory, f: F) -> FlowTrajectory
where
    F: Fn(&FlowSample) -> Vec<f64>,
{
    FlowTrajectory {
        samples: traj
            .samples
            .iter()
            .map(|s| FlowSample {
                t: s.t,
                log_weights: f(s),
                kappa: s.kappa.clone(),
                lyapunov: s.lyapunov,
            })
            .collect(),
        termination: traj.termination,
        steps: traj.steps,
        potential_drop: traj.potential_drop,
    }
}

/// Re-expresses a trajectory as a solution of the classical flow
/// `dw_i/dt = -kappa_i w_i` via `w~_i(t) = e^{-t kappa*_i} w_i(t)`.
///
/// Curvature and Lyapunov samples are carried over unchanged; for constant
/// targets the transform is a uniform rescaling at each time, which leaves
/// the (scale-invariant) curvature untouched, so they remain exact.
pub fn gauge_to_unnormalized(
    traj: &FlowTrajectory,
    target: &PrescribedCurvature,
) -> FlowTrajectory {
    transform_samples(traj, |s| {
        s.log_weights
            .iter()
            .zip(target.values())
            .map(|(r, k)| r - s.t * k)
            .collect()
    })
}

/// Re-expresses a trajectory as a solution of the normalized flow: the
/// classical-gauge weights divided by their sum, which therefore sum to one
/// at every sample.
pub fn gauge_to_normalized(traj: &FlowTrajectory, target: &PrescribedCurvature) -> FlowTrajectory {
    transform_samples(traj, |s| {
        let shifted: Vec<f64> = s
            .log_weights
            .iter()
            .zip(target.values())
            .map(|(r, k)| r - s.t * k)
            .collect();
        // log-sum-exp, stabilized by the maximum.
        let peak = shifted.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let lse = peak + shifted.iter().map(|r| (r - peak).exp()).sum::<f64>().ln();
        shifted.iter().map(|r| r - lse).collect()
    })
}

/// Post-hoc convergence analysis of a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// Final `max |kappa - kappa*|`.
    pub residual: f64,
    /// Final time of the run.
    pub t_final: f64,
    /// Slope of the least-squares line through `(t, ln ||kappa - kappa*||_2)`
    /// over the fitted window; negative means exponential decay.
    pub rate: Option<f64>,
    /// Coefficient of determination of that fit.
    pub fit_r_squared: Option<f64>,
    /// Number of samples in the fitted window.
    pub fit_samples: usize,
    /// Present only when converged.
    pub limit_weights: Option<WeightVector>,
    pub limit_curvature: Option<Vec<f64>>,
}

/// Fits the empirical decay rate over the final half of the samples whose
/// residual norm exceeds 1e-12, and judges convergence against `tol`.
pub fn convergence_report(
    traj: &FlowTrajectory,
    target: &PrescribedCurvature,
    tol: f64,
) -> ConvergenceReport {
    let last = traj.final_sample();
    let residual = last
        .kappa
        .iter()
        .zip(target.values())
        .map(|(k, t)| (k - t).abs())
        .fold(0.0, f64::max);
    let converged = residual <= tol;

    let points: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter_map(|s| {
            let norm = s.lyapunov.sqrt();
            (norm > 1e-12).then(|| (s.t, norm.ln()))
        })
        .collect();
    let window = &points[points.len() / 2..];
    let (rate, fit_r_squared) = fit_line(window);

    ConvergenceReport {
        converged,
        residual,
        t_final: last.t,
        rate,
        fit_r_squared,
        fit_samples: window.len(),
        limit_weights: converged.then(|| WeightVector::from_logs(&last.log_weights)),
        limit_curvature: converged.then(|| last.kappa.clone()),
    }
}

/// Ordinary least squares through `points`; returns `(slope, r_squared)`.
/// Needs at least three points with distinct abscissae.
fn fit_line(points: &[(f64, f64)]) -> (Option<f64>, Option<f64>) {
    if points.len() < 3 {
        return (None, None);
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut var_t = 0.0;
    let mut cov = 0.0;
    let mut var_y = 0.0;
    for &(t, y) in points {
        var_t += (t - mean_t) * (t - mean_t);
        cov += (t - mean_t) * (y - mean_y);
        var_y += (y - mean_y) * (y - mean_y);
    }
    if var_t < 1e-30 {
        return (None, None);
    }
    let slope = cov / var_t;
    let r_squared = if var_y < 1e-30 {
        1.0 // a horizontal line explains a constant series perfectly
    } else {
        (cov * cov) / (var_t * var_y)
    };
    (Some(slope), Some(r_squared))
}

/// Writes the trajectory as CSV: `t,omega_<i>...,kappa_<i>...,lyapunov`, one
/// row per sample, edges in graph order.
pub fn write_csv<W: Write>(out: &mut W, traj: &FlowTrajectory) -> io::Result<()> {
    let m = traj.final_sample().log_weights.len();
    let mut header = String::from("t");
    for i in 0..m {
        header.push_str(&format!(",omega_{i}"));
    }
    for i in 0..m {
        header.push_str(&format!(",kappa_{i}"));
    }
    header.push_str(",lyapunov");
    writeln!(out, "{header}")?;
    for s in &traj.samples {
        let mut row = format!("{}", s.t);
        for w in s.weights() {
            row.push_str(&format!(",{w}"));
        }
        for k in &s.kappa {
            row.push_str(&format!(",{k}"));
        }
        row.push_str(&format!(",{}", s.lyapunov));
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Edge indices whose weight exceeds `threshold`: the bottleneck filter used
/// to read off structurally heavy edges from a final state.
pub fn heavy_edges(weights: &WeightVector, threshold: f64) -> Vec<usize> {
    weights
        .values()
        .iter()
        .enumerate()
        .filter_map(|(i, &w)| (w > threshold).then_some(i))
        .collect()
}
