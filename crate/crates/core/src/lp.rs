//! Dense two-phase primal simplex.
//!
//! Programs have the form
//!
//! ```text
//! minimize    c·x
//! subject to  A_eq x  = b_eq
//!             A_ub x <= b_ub
//!             x >= 0
//! ```
//!
//! Pricing is Dantzig's rule; after a run of degenerate pivots the solver
//! switches to Bland's rule for the rest of the phase. Everything is dense and
//! evaluated in a fixed order, so identical programs give bit-identical
//! outcomes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    eq_rows: Vec<Vec<f64>>,
    eq_rhs: Vec<f64>,
    ub_rows: Vec<Vec<f64>>,
    ub_rhs: Vec<f64>,
}

impl LinearProgram {
    /// Empty program in `num_vars` non-negative variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            ub_rows: Vec::new(),
            ub_rhs: Vec::new(),
        }
    }

    /// `minimize v` over `(q, v) >= 0` subject to `E q = rhs` and
    /// `r·q <= v` for every bound row `r`. The bound variable is the last one.
    pub fn min_bound(eq_rows: &[Vec<f64>], eq_rhs: &[f64], bound_rows: &[Vec<f64>]) -> Result<Self> {
        let n = eq_rows.first().or(bound_rows.first()).map_or(0, Vec::len);
        let mut lp = LinearProgram::new(n + 1);
        lp.objective[n] = 1.0;
        if eq_rows.len() != eq_rhs.len() {
            return Err(Error::domain("equality rows and right-hand side differ in length"));
        }
        for (row, &rhs) in eq_rows.iter().zip(eq_rhs) {
            let mut r = row.clone();
            r.push(0.0);
            lp.add_equality(r, rhs)?;
        }
        for row in bound_rows {
            let mut r = row.clone();
            r.push(-1.0);
            lp.add_inequality(r, 0.0)?;
        }
        Ok(lp)
    }

    pub fn set_objective(&mut self, c: Vec<f64>) -> Result<()> {
        self.check_row(&c, 0.0)?;
        self.objective = c;
        Ok(())
    }

    pub fn add_equality(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        self.check_row(&row, rhs)?;
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        Ok(())
    }

    pub fn add_inequality(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        self.check_row(&row, rhs)?;
        self.ub_rows.push(row);
        self.ub_rhs.push(rhs);
        Ok(())
    }

    fn check_row(&self, row: &[f64], rhs: f64) -> Result<()> {
        if row.len() != self.num_vars {
            return Err(Error::domain(format!(
                "row has {} coefficients, program has {} variables",
                row.len(),
                self.num_vars
            )));
        }
        if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite coefficient in linear program"));
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_equalities(&self) -> usize {
        self.eq_rows.len()
    }

    pub fn num_inequalities(&self) -> usize {
        self.ub_rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    /// Largest violation of any constraint (including `x >= 0`) at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |r: &[f64]| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let eq = self.eq_rows.iter().zip(&self.eq_rhs).map(|(r, b)| (dot(r) - b).abs());
        let ub = self.ub_rows.iter().zip(&self.ub_rhs).map(|(r, b)| (dot(r) - b).max(0.0));
        let nonneg = x.iter().map(|v| (-v).max(0.0));
        eq.chain(ub).chain(nonneg).fold(0.0, f64::max)
    }

    /// Checks a Farkas certificate `y` (equality rows first, then inequality
    /// rows): `y·A_j <= tol` for every column, `y_i <= tol` on inequality rows,
    /// and `y·b > tol`. Such a `y` proves the constraints have no solution.
    pub fn is_infeasibility_certificate(&self, y: &[f64], tol: f64) -> bool {
        let m_eq = self.eq_rows.len();
        if y.len() != m_eq + self.ub_rows.len() {
            return false;
        }
        let rows = self.eq_rows.iter().chain(&self.ub_rows);
        let rhs: f64 = self.eq_rhs.iter().chain(&self.ub_rhs).zip(y).map(|(b, yi)| b * yi).sum();
        let mut cols = vec![0.0; self.num_vars];
        for (row, yi) in rows.zip(y) {
            for (c, a) in cols.iter_mut().zip(row) {
                *c += yi * a;
            }
        }
        rhs > tol && cols.iter().all(|&c| c <= tol) && y[m_eq..].iter().all(|&v| v <= tol)
    }

    /// Dual objective `b·y` if `y` is dual feasible within `tol`, else `None`.
    pub fn dual_bound(&self, y: &[f64], tol: f64) -> Option<f64> {
        let m_eq = self.eq_rows.len();
        if y.len() != m_eq + self.ub_rows.len() || y[m_eq..].iter().any(|&v| v > tol) {
            return None;
        }
        let mut reduced = self.objective.clone();
        for (row, yi) in self.eq_rows.iter().chain(&self.ub_rows).zip(y) {
            for (c, a) in reduced.iter_mut().zip(row) {
                *c -= yi * a;
            }
        }
        if reduced.iter().any(|&c| c < -tol) {
            return None;
        }
        Some(self.eq_rhs.iter().chain(&self.ub_rhs).zip(y).map(|(b, yi)| b * yi).sum())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Objective value; `NaN` unless optimal.
    pub objective: f64,
    /// Primal solution; empty unless optimal.
    pub solution: Vec<f64>,
    /// Dual multipliers (equality rows, then inequality rows) when optimal,
    /// a Farkas certificate when infeasible.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Phase-one objective above which the program is declared infeasible.
    pub feasibility_tol: f64,
    /// Reduced cost below `-optimality_tol` qualifies a column to enter.
    pub optimality_tol: f64,
    /// Smallest pivot magnitude accepted by the ratio test.
    pub pivot_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-11,
            pivot_tol: 1e-9,
            degenerate_limit: 50,
            max_iterations: 100_000,
        }
    }
}

pub fn solve(program: &LinearProgram) -> Result<LpOutcome> {
    solve_with(program, &SolverOptions::default())
}

pub fn solve_with(program: &LinearProgram, options: &SolverOptions) -> Result<LpOutcome> {
    Tableau::build(program).run(program, options)
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `(rows + 1) × (cols + 1)`; last row holds reduced costs, last column
    /// the right-hand side.
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Column holding the initial identity for each row.
    identity_col: Vec<usize>,
    /// `±1` applied to each row to make its right-hand side non-negative.
    row_sign: Vec<f64>,
    num_vars: usize,
    first_artificial: usize,
    iterations: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m_eq = lp.eq_rows.len();
        let m_ub = lp.ub_rows.len();
        let rows = m_eq + m_ub;
        let n = lp.num_vars;
        let row_sign: Vec<f64> =
            lp.eq_rhs.iter().chain(&lp.ub_rhs).map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        // rows needing an artificial: equalities and sign-flipped inequalities
        let needs_art: Vec<bool> = (0..rows).map(|i| i < m_eq || row_sign[i] < 0.0).collect();
        let first_artificial = n + m_ub;
        let cols = first_artificial + needs_art.iter().filter(|&&b| b).count();
        let width = cols + 1;
        let mut data = vec![0.0; (rows + 1) * width];
        let mut identity_col = vec![0; rows];
        let mut next_art = first_artificial;
        for i in 0..rows {
            let sign = row_sign[i];
            let (row, rhs) =
                if i < m_eq { (&lp.eq_rows[i], lp.eq_rhs[i]) } else { (&lp.ub_rows[i - m_eq], lp.ub_rhs[i - m_eq]) };
            let base = i * width;
            for (j, &a) in row.iter().enumerate() {
                data[base + j] = sign * a;
            }
            if i >= m_eq {
                data[base + n + (i - m_eq)] = sign;
            }
            if needs_art[i] {
                data[base + next_art] = 1.0;
                identity_col[i] = next_art;
                next_art += 1;
            } else {
                identity_col[i] = n + (i - m_eq);
            }
            data[base + cols] = sign * rhs;
        }
        Tableau {
            rows,
            cols,
            data,
            basis: identity_col.clone(),
            identity_col,
            row_sign,
            num_vars: n,
            first_artificial,
            iterations: 0,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    /// Loads `cost` into the reduced-cost row, pricing out the current basis.
    fn load_costs(&mut self, cost: &[f64]) {
        let width = self.cols + 1;
        let obj = self.rows * width;
        for j in 0..width {
            self.data[obj + j] = if j < self.cols { cost[j] } else { 0.0 };
        }
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..width {
                    self.data[obj + j] -= cb * self.data[i * width + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.cols + 1;
        let p = self.at(r, c);
        for j in 0..width {
            self.data[r * width + j] /= p;
        }
        self.data[r * width + c] = 1.0;
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * width + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..width {
                let v = self.data[i * width + j] - f * self.data[r * width + j];
                self.data[i * width + j] = if v.abs() < 1e-14 { 0.0 } else { v };
            }
            self.data[i * width + c] = 0.0;
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Runs simplex iterations over columns `< allowed_cols`. Returns `false`
    /// when the objective is unbounded below.
    fn optimize(&mut self, allowed_cols: usize, options: &SolverOptions) -> Result<bool> {
        let obj_row = self.rows;
        let mut bland = false;
        let mut degenerate_run = 0usize;
        let mut budget = options.max_iterations;
        loop {
            // entering column
            let mut enter = None;
            let mut best = -options.optimality_tol;
            for j in 0..allowed_cols {
                let d = self.at(obj_row, j);
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else { return Ok(true) };

            // ratio test, ties broken on the smallest basic index
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > options.pivot_tol {
                    let ratio = self.rhs(i).max(0.0) / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li]) {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, ratio)) = leave else { return Ok(false) };

            if ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > options.degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);

            budget -= 1;
            if budget == 0 {
                if bland {
                    return Err(Error::Numerical(format!(
                        "simplex did not terminate after {} iterations with Bland's rule",
                        self.iterations
                    )));
                }
                bland = true;
                budget = options.max_iterations;
            }
        }
    }

    /// Duals of the original rows from the reduced costs of identity columns
    /// under `cost`.
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                let j = self.identity_col[i];
                self.row_sign[i] * (cost[j] - self.at(self.rows, j))
            })
            .collect()
    }

    fn run(mut self, lp: &LinearProgram, options: &SolverOptions) -> Result<LpOutcome> {
        let has_artificials = self.first_artificial < self.cols;
        if has_artificials {
            let mut phase1 = vec![0.0; self.cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = 1.0;
            }
            self.load_costs(&phase1);
            // phase one is bounded below by zero
            self.optimize(self.cols, options)?;
            let infeasibility = -self.at(self.rows, self.cols);
            if infeasibility > options.feasibility_tol {
                return Ok(LpOutcome {
                    status: LpStatus::Infeasible,
                    objective: f64::NAN,
                    solution: Vec::new(),
                    duals: self.duals(&phase1),
                    iterations: self.iterations,
                });
            }
            // drive artificials out of the basis where possible
            for i in 0..self.rows {
                if self.basis[i] >= self.first_artificial {
                    let col = (0..self.first_artificial)
                        .filter(|&j| self.at(i, j).abs() > options.pivot_tol)
                        .max_by(|&a, &b| self.at(i, a).abs().total_cmp(&self.at(i, b).abs()).then(b.cmp(&a)));
                    if let Some(j) = col {
                        self.pivot(i, j);
                    }
                }
            }
        }

        let mut cost = vec![0.0; self.cols];
        cost[..self.num_vars].copy_from_slice(&lp.objective);
        self.load_costs(&cost);
        if !self.optimize(self.first_artificial, options)? {
            return Ok(LpOutcome {
                status: LpStatus::Unbounded,
                objective: f64::NAN,
                solution: Vec::new(),
                duals: Vec::new(),
                iterations: self.iterations,
            });
        }
        let mut solution = vec![0.0; self.num_vars];
        for i in 0..self.rows {
            if self.basis[i] < self.num_vars {
                solution[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        let objective = lp.objective.iter().zip(&solution).map(|(c, x)| c * x).sum();
        Ok(LpOutcome {
            status: LpStatus::Optimal,
            objective,
            solution,
            duals: self.duals(&cost),
            iterations: self.iterations,
        })
    }
}
