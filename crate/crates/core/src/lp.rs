//! A self-contained dense linear-programming solver.
//!
//! Two-phase primal simplex on a dense tableau with Bland's anti-cycling
//! pivot rule. Supports minimization with `<=`, `=`, `>=` rows and optional
//! per-variable lower/upper bounds (variables are free by default). The
//! solver is deterministic: identical inputs take identical pivot sequences.
//!
//! Problems in this crate are small (tens of rows), so a dense tableau with
//! `O(m n)` pivots is the simplest robust choice; no external numerical
//! library is involved.

use thiserror::Error;

/// Pivoting tolerance: entries smaller than this are treated as zero.
pub const EPSILON: f64 = 1e-9;

const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("numerical failure in simplex: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization problem `min c.x` over rows `a_i.x (<=|=|>=) b_i` with
/// optional box bounds per variable.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    bounds: Vec<(Option<f64>, Option<f64>)>,
}

impl LinearProgram {
    /// Starts a minimization of `objective . x` with all variables free.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            bounds: vec![(None, None); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width mismatch");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) {
        self.bounds[var] = (lower, upper);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// How each original variable maps into the nonnegative standard form.
#[derive(Clone, Copy)]
enum ColMap {
    /// `x = offset + y`, `y >= 0`.
    Shifted { col: usize, offset: f64 },
    /// `x = offset - y`, `y >= 0`.
    Mirrored { col: usize, offset: f64 },
    /// `x = y_pos - y_neg`, both `>= 0`.
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// `m` rows of `width + 1` entries; the final entry is the rhs.
    rows: Vec<Vec<f64>>,
    /// Reduced-cost row of `width + 1` entries; final entry is minus the
    /// current objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = 1.0 / self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x *= inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x -= factor * p;
                    if x.abs() < 1e-13 {
                        *x = 0.0;
                    }
                }
            }
        }
        let factor = self.cost[c];
        if factor != 0.0 {
            for (x, &p) in self.cost.iter_mut().zip(&pivot_row) {
                *x -= factor * p;
                if x.abs() < 1e-13 {
                    *x = 0.0;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations under Bland's rule, allowing only columns
    /// `< col_limit` to enter. Returns `false` when an entering column has
    /// no positive row entry (unbounded direction).
    fn bland_loop(&mut self, col_limit: usize) -> Result<bool, LpError> {
        for _ in 0..MAX_ITERATIONS {
            // Entering: lowest-index column with negative reduced cost.
            let entering = (0..col_limit).find(|&j| self.cost[j] < -EPSILON);
            let Some(c) = entering else {
                return Ok(true);
            };
            // Leaving: minimum ratio; ties broken by smallest basis index.
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > EPSILON {
                    let ratio = self.rows[i][self.width] / a;
                    let better = match best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - EPSILON
                                || (ratio < br + EPSILON && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(false),
            }
        }
        Err(LpError::Numerical("simplex iteration limit reached".into()))
    }
}

/// Solves the program, reporting optimality, infeasibility, or
/// unboundedness. The returned point satisfies every constraint to within
/// `1e-9` (verified; violations raise an error instead of returning silently
/// wrong output).
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let n = lp.num_vars();

    // Map variables into nonnegative standard form.
    let mut maps = Vec::with_capacity(n);
    let mut n_std = 0;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new(); // (std column, bound)
    for &(lower, upper) in &lp.bounds {
        match (lower, upper) {
            (Some(l), Some(u)) => {
                if u < l {
                    return Ok(LpSolution::Infeasible);
                }
                maps.push(ColMap::Shifted { col: n_std, offset: l });
                upper_rows.push((n_std, u - l));
                n_std += 1;
            }
            (Some(l), None) => {
                maps.push(ColMap::Shifted { col: n_std, offset: l });
                n_std += 1;
            }
            (None, Some(u)) => {
                maps.push(ColMap::Mirrored { col: n_std, offset: u });
                n_std += 1;
            }
            (None, None) => {
                maps.push(ColMap::Split {
                    pos: n_std,
                    neg: n_std + 1,
                });
                n_std += 2;
            }
        }
    }

    // Standard-form rows: transformed constraints, then bound rows.
    struct StdRow {
        coeffs: Vec<f64>,
        relation: Relation,
        rhs: f64,
    }
    let mut std_rows = Vec::new();
    for con in &lp.constraints {
        let mut coeffs = vec![0.0; n_std];
        let mut rhs = con.rhs;
        for (j, &a) in con.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                ColMap::Shifted { col, offset } => {
                    coeffs[col] += a;
                    rhs -= a * offset;
                }
                ColMap::Mirrored { col, offset } => {
                    coeffs[col] -= a;
                    rhs -= a * offset;
                }
                ColMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        std_rows.push(StdRow {
            coeffs,
            relation: con.relation,
            rhs,
        });
    }
    for &(col, bound) in &upper_rows {
        let mut coeffs = vec![0.0; n_std];
        coeffs[col] = 1.0;
        std_rows.push(StdRow {
            coeffs,
            relation: Relation::Le,
            rhs: bound,
        });
    }

    let m = std_rows.len();
    let n_slack = std_rows
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count();
    let width = n_std + n_slack + m; // structural + slack + artificial
    let art_start = n_std + n_slack;

    // Assemble the phase-1 tableau with one artificial variable per row.
    let mut rows = Vec::with_capacity(m);
    let mut slack_idx = n_std;
    for (i, r) in std_rows.iter().enumerate() {
        let mut row = vec![0.0; width + 1];
        row[..n_std].copy_from_slice(&r.coeffs);
        match r.relation {
            Relation::Le => {
                row[slack_idx] = 1.0;
                slack_idx += 1;
            }
            Relation::Ge => {
                row[slack_idx] = -1.0;
                slack_idx += 1;
            }
            Relation::Eq => {}
        }
        row[width] = r.rhs;
        if row[width] < 0.0 {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        row[art_start + i] = 1.0;
        rows.push(row);
    }

    // Phase-1 reduced costs: minimize the sum of artificials, which start
    // basic, so the reduced cost of column j is -sum_i rows[i][j] for
    // non-artificial columns and 0 for artificial ones.
    let mut cost = vec![0.0; width + 1];
    for j in 0..width + 1 {
        if j >= art_start && j < width {
            continue;
        }
        cost[j] = -rows.iter().map(|r| r[j]).sum::<f64>();
    }
    let mut tab = Tableau {
        rows,
        cost,
        basis: (art_start..art_start + m).collect(),
        width,
    };

    tab.bland_loop(art_start)?;
    let phase1_value = -tab.cost[width];
    if phase1_value > 1e-7 {
        return Ok(LpSolution::Infeasible);
    }

    // Drive remaining artificials out of the basis; rows that cannot pivot
    // on any structural or slack column are redundant and dropped.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= art_start {
            let col = (0..art_start).find(|&j| tab.rows[i][j].abs() > EPSILON);
            match col {
                Some(c) => tab.pivot(i, c),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase-2 reduced costs from the real objective, priced through the
    // current basis.
    let mut c_std = vec![0.0; width];
    for (j, &cj) in lp.objective.iter().enumerate() {
        match maps[j] {
            ColMap::Shifted { col, .. } => c_std[col] += cj,
            ColMap::Mirrored { col, .. } => c_std[col] -= cj,
            ColMap::Split { pos, neg } => {
                c_std[pos] += cj;
                c_std[neg] -= cj;
            }
        }
    }
    let mut cost = vec![0.0; width + 1];
    for j in 0..width + 1 {
        let direct = if j < width { c_std[j] } else { 0.0 };
        let priced: f64 = tab
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| c_std[tab.basis[i]] * row[j])
            .sum();
        cost[j] = direct - priced;
    }
    tab.cost = cost;

    if !tab.bland_loop(art_start)? {
        return Ok(LpSolution::Unbounded);
    }

    // Read the standard-form solution off the basis and map it back.
    let mut y = vec![0.0; width];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.rows[i][tab.width];
    }
    let mut point = vec![0.0; n];
    for (j, map) in maps.iter().enumerate() {
        point[j] = match *map {
            ColMap::Shifted { col, offset } => offset + y[col],
            ColMap::Mirrored { col, offset } => offset - y[col],
            ColMap::Split { pos, neg } => y[pos] - y[neg],
        };
    }
    let value: f64 = lp
        .objective
        .iter()
        .zip(&point)
        .map(|(c, x)| c * x)
        .sum();

    verify_feasible(lp, &point)?;
    Ok(LpSolution::Optimal { value, point })
}

/// Refuses to return a point that violates the input program.
fn verify_feasible(lp: &LinearProgram, point: &[f64]) -> Result<(), LpError> {
    for (i, con) in lp.constraints.iter().enumerate() {
        let lhs: f64 = con.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
        let tol = 1e-9 * (1.0 + con.rhs.abs());
        let violated = match con.relation {
            Relation::Le => lhs > con.rhs + tol,
            Relation::Eq => (lhs - con.rhs).abs() > tol,
            Relation::Ge => lhs < con.rhs - tol,
        };
        if violated {
            return Err(LpError::Numerical(format!(
                "constraint {i} violated by {:.3e}",
                (lhs - con.rhs).abs()
            )));
        }
    }
    for (j, &(lower, upper)) in lp.bounds.iter().enumerate() {
        if let Some(l) = lower {
            if point[j] < l - 1e-9 {
                return Err(LpError::Numerical(format!("lower bound {j} violated")));
            }
        }
        if let Some(u) = upper {
            if point[j] > u + 1e-9 {
                return Err(LpError::Numerical(format!("upper bound {j} violated")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(sol: LpSolution) -> (f64, Vec<f64>) {
        match sol {
            LpSolution::Optimal { value, point } => (value, point),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    /// Transport between (0.7, 0.3) and (0.3, 0.7) at mutual distance 1.
    /// The only freedom is how much mass crosses, and 0.4 must cross.
    fn transport_2x2() -> LinearProgram {
        // Variables: A11, A12, A21, A22 (row = source, col = target).
        let mut lp = LinearProgram::minimize(vec![0.0, 1.0, 1.0, 0.0]);
        for v in 0..4 {
            lp.set_bounds(v, Some(0.0), None);
        }
        lp.constrain(vec![1.0, 1.0, 0.0, 0.0], Relation::Eq, 0.7);
        lp.constrain(vec![0.0, 0.0, 1.0, 1.0], Relation::Eq, 0.3);
        lp.constrain(vec![1.0, 0.0, 1.0, 0.0], Relation::Eq, 0.3);
        lp.constrain(vec![0.0, 1.0, 0.0, 1.0], Relation::Eq, 0.7);
        lp
    }

    #[test]
    fn transport_instance_enumerated_by_hand() {
        // With A11 = t, the marginals force A12 = 0.7-t, A21 = 0.3-t... the
        // plan is a line segment; enumerating endpoints t in {0, 0.3} gives
        // costs 1.0 and 0.4, so the optimum is 0.4.
        let (value, point) = optimal(solve(&transport_2x2()).unwrap());
        assert!((value - 0.4).abs() < 1e-9);
        let row_sums = [point[0] + point[1], point[2] + point[3]];
        assert!((row_sums[0] - 0.7).abs() < 1e-9);
        assert!((row_sums[1] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn weak_duality_against_a_lipschitz_potential() {
        // f = (0, 1) is 1-Lipschitz for the 2-point metric; its integral
        // difference 0.7 - 0.3 = 0.4 lower-bounds the transport cost.
        let (value, _) = optimal(solve(&transport_2x2()).unwrap());
        let f = [0.0f64, 1.0];
        let lower: f64 = (f[0] * 0.7 + f[1] * 0.3) - (f[0] * 0.3 + f[1] * 0.7);
        assert!(value >= lower.abs() - 1e-9);
    }

    #[test]
    fn detects_infeasibility() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.set_bounds(0, Some(0.0), None);
        lp.constrain(vec![1.0], Relation::Le, -1.0);
        assert_eq!(solve(&lp).unwrap(), LpSolution::Infeasible);

        // Contradictory box bounds short-circuit.
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.set_bounds(0, Some(2.0), Some(1.0));
        assert_eq!(solve(&lp).unwrap(), LpSolution::Infeasible);
    }

    #[test]
    fn detects_unboundedness() {
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.set_bounds(0, Some(0.0), None);
        assert_eq!(solve(&lp).unwrap(), LpSolution::Unbounded);

        // A free variable with no constraints at all.
        let lp = LinearProgram::minimize(vec![1.0]);
        assert_eq!(solve(&lp).unwrap(), LpSolution::Unbounded);
    }

    #[test]
    fn handles_free_variables_and_equalities() {
        // min x + y with x - y = 3 and x + y >= 1; free otherwise.
        // Unbounded? No: x + y >= 1 binds from below, so optimum is 1.
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, -1.0], Relation::Eq, 3.0);
        lp.constrain(vec![1.0, 1.0], Relation::Ge, 1.0);
        let (value, point) = optimal(solve(&lp).unwrap());
        assert!((value - 1.0).abs() < 1e-9);
        assert!((point[0] - point[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn respects_box_bounds() {
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.set_bounds(0, Some(0.0), Some(2.5));
        let (value, point) = optimal(solve(&lp).unwrap());
        assert!((value + 2.5).abs() < 1e-9);
        assert!((point[0] - 2.5).abs() < 1e-9);

        // Upper bound only: x <= 4, minimize -x.
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.set_bounds(0, None, Some(4.0));
        let (value, _) = optimal(solve(&lp).unwrap());
        assert!((value + 4.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_redundant_rows_terminate_under_blands_rule() {
        // Duplicate and implied rows create degenerate vertices; Bland's
        // rule must still terminate at the optimum.
        let mut lp = LinearProgram::minimize(vec![-1.0, -1.0]);
        for v in 0..2 {
            lp.set_bounds(v, Some(0.0), None);
        }
        lp.constrain(vec![1.0, 1.0], Relation::Le, 1.0);
        lp.constrain(vec![1.0, 1.0], Relation::Le, 1.0);
        lp.constrain(vec![2.0, 2.0], Relation::Le, 2.0);
        lp.constrain(vec![1.0, 0.0], Relation::Le, 1.0);
        let (value, _) = optimal(solve(&lp).unwrap());
        assert!((value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_equality_rows_are_dropped() {
        // The three equalities have rank 2; phase 1 must discard the
        // dependent row instead of failing.
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        for v in 0..2 {
            lp.set_bounds(v, Some(0.0), None);
        }
        lp.constrain(vec![1.0, 0.0], Relation::Eq, 1.0);
        lp.constrain(vec![0.0, 1.0], Relation::Eq, 2.0);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 3.0);
        let (value, point) = optimal(solve(&lp).unwrap());
        assert!((value - 3.0).abs() < 1e-9);
        assert!((point[0] - 1.0).abs() < 1e-9);
        assert!((point[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn identical_inputs_give_identical_outputs() {
        let lp = transport_2x2();
        let a = optimal(solve(&lp).unwrap());
        let b = optimal(solve(&lp).unwrap());
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        let bits = |p: &[f64]| p.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.1), bits(&b.1));
    }
}
