//! Deterministic strategies of the outcome-dependent causal model and the
//! linear programs built on them.
//!
//! With influence from Alice's outcome to Bob's (`AtoB`), a hidden value `λ`
//! fixes `a = f_A(x)` and `b = f_B(a, y)`; there are
//! `o_a^m_x · o_b^(o_a·m_y)` such strategies. `BtoA` is the mirror image,
//! `b = f_B(y)` and `a = f_A(b, x)`.
//!
//! Strategies are enumerated in lexicographic order of their concatenated
//! response tables, source table first and the last entry varying fastest:
//! for `AtoB` that is `f_A(0..m_x)` followed by `f_B(a, y)` in `(a, y)`
//! row-major order. Weight vectors returned by the LPs use this order.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};
use crate::inequalities::{BellFunctional, ChshReport};
use crate::lp::{self, LinearProgram, LpStatus, SolverOptions};

/// Default limit on the number of enumerated strategies.
pub const DEFAULT_STRATEGY_CAP: u128 = 1_000_000;
/// Per-entry tolerance on `T q = p`.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Alice's outcome may influence Bob's.
    AtoB,
    /// Bob's outcome may influence Alice's.
    BtoA,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::AtoB => "AtoB",
            Direction::BtoA => "BtoA",
        })
    }
}

/// Response functions for one hidden-variable value.
///
/// For `AtoB`, `f_a[x]` and `f_b[a * m_y + y]`. For `BtoA`, `f_b[y]` and
/// `f_a[b * m_x + x]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub direction: Direction,
    pub f_a: Vec<usize>,
    pub f_b: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn a_to_b(f_a: Vec<usize>, f_b: Vec<usize>) -> Self {
        DeterministicStrategy { direction: Direction::AtoB, f_a, f_b }
    }

    pub fn b_to_a(f_a: Vec<usize>, f_b: Vec<usize>) -> Self {
        DeterministicStrategy { direction: Direction::BtoA, f_a, f_b }
    }

    /// Outcome pair `(a, b)` for settings `(x, y)`.
    #[inline]
    pub fn outcome(&self, scenario: &Scenario, x: usize, y: usize) -> (usize, usize) {
        match self.direction {
            Direction::AtoB => {
                let a = self.f_a[x];
                (a, self.f_b[a * scenario.m_y + y])
            }
            Direction::BtoA => {
                let b = self.f_b[y];
                (self.f_a[b * scenario.m_x + x], b)
            }
        }
    }

    /// Bob's response to a forced Alice outcome; only defined for `AtoB`.
    pub fn bob_response(&self, scenario: &Scenario, a: usize, y: usize) -> Option<usize> {
        match self.direction {
            Direction::AtoB => Some(self.f_b[a * scenario.m_y + y]),
            Direction::BtoA => None,
        }
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let (len_a, len_b) = table_lengths(scenario, self.direction);
        if self.f_a.len() != len_a || self.f_b.len() != len_b {
            return Err(Error::domain(format!(
                "{} strategy tables have lengths ({}, {}), scenario {scenario} needs ({len_a}, {len_b})",
                self.direction,
                self.f_a.len(),
                self.f_b.len()
            )));
        }
        if self.f_a.iter().any(|&a| a >= scenario.o_a) || self.f_b.iter().any(|&b| b >= scenario.o_b) {
            return Err(Error::domain("strategy table entry outside the outcome range"));
        }
        Ok(())
    }
}

fn table_lengths(s: &Scenario, direction: Direction) -> (usize, usize) {
    match direction {
        Direction::AtoB => (s.m_x, s.o_a * s.m_y),
        Direction::BtoA => (s.o_b * s.m_x, s.m_y),
    }
}

/// `o_a^m_x · o_b^(o_a m_y)` for `AtoB`, the mirrored count for `BtoA`.
pub fn strategy_count(scenario: &Scenario, direction: Direction) -> Option<u128> {
    let pow = |base: usize, exp: usize| (base as u128).checked_pow(u32::try_from(exp).ok()?);
    match direction {
        Direction::AtoB => {
            pow(scenario.o_a, scenario.m_x)?.checked_mul(pow(scenario.o_b, scenario.o_a * scenario.m_y)?)
        }
        Direction::BtoA => {
            pow(scenario.o_b, scenario.m_y)?.checked_mul(pow(scenario.o_a, scenario.o_b * scenario.m_x)?)
        }
    }
}

/// Decodes strategy number `index` of the documented enumeration order.
pub fn strategy_at(scenario: &Scenario, direction: Direction, mut index: u128) -> DeterministicStrategy {
    let (len_a, len_b) = table_lengths(scenario, direction);
    let mut f_a = vec![0; len_a];
    let mut f_b = vec![0; len_b];
    // the dependent table holds the least significant digits
    let (first, first_radix, second, second_radix) = match direction {
        Direction::AtoB => (&mut f_a, scenario.o_a, &mut f_b, scenario.o_b),
        Direction::BtoA => (&mut f_b, scenario.o_b, &mut f_a, scenario.o_a),
    };
    for slot in second.iter_mut().rev() {
        *slot = (index % second_radix as u128) as usize;
        index /= second_radix as u128;
    }
    for slot in first.iter_mut().rev() {
        *slot = (index % first_radix as u128) as usize;
        index /= first_radix as u128;
    }
    DeterministicStrategy { direction, f_a, f_b }
}

pub fn enumerate_strategies(scenario: &Scenario, direction: Direction) -> Result<Vec<DeterministicStrategy>> {
    enumerate_strategies_capped(scenario, direction, DEFAULT_STRATEGY_CAP)
}

pub fn enumerate_strategies_capped(
    scenario: &Scenario,
    direction: Direction,
    cap: u128,
) -> Result<Vec<DeterministicStrategy>> {
    let count = strategy_count(scenario, direction).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::Size { count, cap });
    }
    Ok((0..count as u64).into_par_iter().map(|i| strategy_at(scenario, direction, i as u128)).collect())
}

/// Deterministic behavior `p(a,b|x,y) = δ_{a,f_A} δ_{b,f_B}`.
pub fn strategy_behavior(strategy: &DeterministicStrategy, scenario: &Scenario) -> Result<Behavior> {
    strategy.validate(scenario)?;
    Behavior::from_fn(*scenario, |a, b, x, y| if strategy.outcome(scenario, x, y) == (a, b) { 1.0 } else { 0.0 })
}

/// The 0/1 matrix `T` mapping strategy weights to behaviors.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyMatrix {
    scenario: Scenario,
    /// For each strategy, the row indices holding a one, ordered by `(x, y)`.
    columns: Vec<Vec<usize>>,
}

impl StrategyMatrix {
    pub fn new(scenario: Scenario, strategies: &[DeterministicStrategy]) -> Self {
        let columns = strategies
            .iter()
            .map(|s| {
                let mut rows = Vec::with_capacity(scenario.m_x * scenario.m_y);
                for x in 0..scenario.m_x {
                    for y in 0..scenario.m_y {
                        let (a, b) = s.outcome(&scenario, x, y);
                        rows.push(scenario.index(a, b, x, y));
                    }
                }
                rows
            })
            .collect();
        StrategyMatrix { scenario, columns }
    }

    pub fn rows(&self) -> usize {
        self.scenario.len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        u8::from(self.columns[col].contains(&row))
    }

    pub fn column_sum(&self, col: usize) -> usize {
        self.columns[col].len()
    }

    /// Dense rows of `T`.
    pub fn dense_rows(&self) -> Vec<Vec<f64>> {
        let mut rows = vec![vec![0.0; self.cols()]; self.rows()];
        for (lambda, col) in self.columns.iter().enumerate() {
            for &j in col {
                rows[j][lambda] = 1.0;
            }
        }
        rows
    }

    /// `T q` as a behavior.
    pub fn apply(&self, weights: &[f64]) -> Result<Behavior> {
        if weights.len() != self.cols() {
            return Err(Error::domain("weight vector length does not match strategy count"));
        }
        let mut table = vec![0.0; self.rows()];
        for (col, &w) in self.columns.iter().zip(weights) {
            for &j in col {
                table[j] += w;
            }
        }
        Behavior::new(self.scenario, table)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AceStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AceResult {
    /// Minimal average causal effect; `None` when infeasible.
    pub value: Option<f64>,
    /// Optimal strategy weights in enumeration order; empty when infeasible.
    pub weights: Vec<f64>,
    pub status: AceStatus,
    /// Farkas certificate over the rows `(T, normalization)` when infeasible.
    pub certificate: Vec<f64>,
}

/// Coefficient rows `δ_{b,f_B(a,y)} - δ_{b,f_B(a',y)}` (both signs) over
/// every instance `(b, y, a ≠ a')`.
pub fn ace_rows(scenario: &Scenario, strategies: &[DeterministicStrategy]) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for a in 0..scenario.o_a {
        for a2 in (a + 1)..scenario.o_a {
            for y in 0..scenario.m_y {
                for b in 0..scenario.o_b {
                    let row: Vec<f64> = strategies
                        .iter()
                        .map(|s| {
                            let hit =
                                |aa| s.bob_response(scenario, aa, y).map_or(0.0, |bb| f64::from(u8::from(bb == b)));
                            hit(a) - hit(a2)
                        })
                        .collect();
                    rows.push(row.iter().map(|v| -v).collect());
                    rows.push(row);
                }
            }
        }
    }
    rows
}

fn ace_program(behavior: &Behavior, strategies: &[DeterministicStrategy]) -> Result<LinearProgram> {
    let scenario = behavior.scenario();
    let matrix = StrategyMatrix::new(scenario, strategies);
    let mut eq_rows = matrix.dense_rows();
    let mut rhs = behavior.as_slice().to_vec();
    eq_rows.push(vec![1.0; strategies.len()]);
    rhs.push(1.0);
    LinearProgram::min_bound(&eq_rows, &rhs, &ace_rows(&scenario, strategies))
}

/// Minimal average causal effect `A → B` over all `AtoB` models reproducing
/// `behavior` exactly (within [`FEASIBILITY_TOL`]).
pub fn min_ace(behavior: &Behavior) -> Result<AceResult> {
    let strategies = enumerate_strategies(&behavior.scenario(), Direction::AtoB)?;
    let program = ace_program(behavior, &strategies)?;
    let options = SolverOptions { feasibility_tol: FEASIBILITY_TOL, ..SolverOptions::default() };
    let outcome = lp::solve_with(&program, &options)?;
    match outcome.status {
        LpStatus::Optimal => {
            let n = strategies.len();
            Ok(AceResult {
                value: Some(outcome.objective.max(0.0)),
                weights: outcome.solution[..n].to_vec(),
                status: AceStatus::Optimal,
                certificate: Vec::new(),
            })
        }
        LpStatus::Infeasible => Ok(AceResult {
            value: None,
            weights: Vec::new(),
            status: AceStatus::Infeasible,
            certificate: outcome.duals[..=behavior.scenario().len()].to_vec(),
        }),
        LpStatus::Unbounded => Err(Error::Numerical("ACE program reported unbounded".into())),
    }
}

/// Replaces Alice's marginals by their average over Bob's settings, keeping
/// each conditional `p(b|a,x,y)`. Returns the projected behavior and the
/// max-norm distance moved.
pub fn project_no_signalling_to_alice(behavior: &Behavior) -> Result<(Behavior, f64)> {
    let s = behavior.scenario();
    let projected = Behavior::from_fn(s, |a, b, x, y| {
        let target = (0..s.m_y).map(|yy| behavior.marginal_a(a, x, yy)).sum::<f64>() / s.m_y as f64;
        let current = behavior.marginal_a(a, x, y);
        if current > 0.0 {
            behavior.p(a, b, x, y) * target / current
        } else {
            target / s.o_b as f64
        }
    })?;
    let distance = projected.distance(behavior);
    Ok((projected, distance))
}

/// [`min_ace`] after projecting finite-count frequencies onto the
/// no-signalling-toward-Alice subspace. Also returns the projection distance.
pub fn min_ace_empirical(behavior: &Behavior) -> Result<(AceResult, f64)> {
    let (projected, distance) = project_no_signalling_to_alice(behavior)?;
    Ok((min_ace(&projected)?, distance))
}

/// `max[0, (S2 - 2)/2]`.
pub fn ace_closed_form(report: &ChshReport) -> f64 {
    ((report.s2 - 2.0) / 2.0).max(0.0)
}

/// Equal mixture of the two deterministic strategies
/// `a = x, b = a(y ⊕ 1)` and `a = x ⊕ 1, b = y(a ⊕ 1) ⊕ a`.
pub fn pr_box_model() -> ExplicitModel {
    let s = Scenario::CHSH;
    let first = DeterministicStrategy::a_to_b(vec![0, 1], table_ab(&s, |a, y| a * (y ^ 1)));
    let second = DeterministicStrategy::a_to_b(vec![1, 0], table_ab(&s, |a, y| (y * (a ^ 1)) ^ a));
    ExplicitModel { scenario: s, components: vec![(first, 0.5), (second, 0.5)] }
}

/// The PR box `p(a,b|x,y) = ½ δ_{a⊕b, xy}`.
pub fn pr_box() -> Behavior {
    pr_box_model().behavior().expect("PR strategies are valid")
}

fn table_ab(s: &Scenario, f: impl Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut t = Vec::with_capacity(s.o_a * s.m_y);
    for a in 0..s.o_a {
        for y in 0..s.m_y {
            t.push(f(a, y));
        }
    }
    t
}

/// A hidden-variable model given as weighted deterministic strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitModel {
    pub scenario: Scenario,
    pub components: Vec<(DeterministicStrategy, f64)>,
}

impl ExplicitModel {
    pub fn new(scenario: Scenario, components: Vec<(DeterministicStrategy, f64)>) -> Result<Self> {
        let total: f64 = components.iter().map(|(_, w)| w).sum();
        if components.iter().any(|(_, w)| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("model weights must be non-negative and sum to 1 (sum {total})")));
        }
        for (s, _) in &components {
            s.validate(&scenario)?;
        }
        Ok(ExplicitModel { scenario, components })
    }

    /// Observable behavior `sum_λ p(λ) δ_{a,f_A} δ_{b,f_B}`.
    pub fn behavior(&self) -> Result<Behavior> {
        let s = self.scenario;
        let mut table = vec![0.0; s.len()];
        for (strategy, w) in &self.components {
            for x in 0..s.m_x {
                for y in 0..s.m_y {
                    let (a, b) = strategy.outcome(&s, x, y);
                    table[s.index(a, b, x, y)] += w;
                }
            }
        }
        Behavior::new(s, table)
    }
}

/// Direct causal effect `sup_{b,y,a,a'} sum_λ p(λ) |δ_{b,f_B(a,y,λ)} - δ_{b,f_B(a',y,λ)}|`.
///
/// Strategies without an `A → B` dependence contribute nothing.
pub fn direct_causal_effect(model: &ExplicitModel) -> f64 {
    let s = model.scenario;
    let mut best: f64 = 0.0;
    for a in 0..s.o_a {
        for a2 in (a + 1)..s.o_a {
            for y in 0..s.m_y {
                for b in 0..s.o_b {
                    let shift: f64 = model
                        .components
                        .iter()
                        .map(|(st, w)| match (st.bob_response(&s, a, y), st.bob_response(&s, a2, y)) {
                            (Some(r1), Some(r2)) if (r1 == b) != (r2 == b) => *w,
                            _ => 0.0,
                        })
                        .sum();
                    best = best.max(shift);
                }
            }
        }
    }
    best
}

/// Per-vertex functional values over one strategy set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexScan {
    pub direction: Direction,
    pub count: usize,
    pub max_value: i32,
    /// `(strategy index, value)` for every vertex exceeding the bound.
    pub violations: Vec<(usize, i32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexBoundReport {
    pub functional: BellFunctional,
    pub scenario: Scenario,
    pub bound: f64,
    pub scans: Vec<VertexScan>,
}

impl VertexBoundReport {
    pub fn max_value(&self) -> i32 {
        self.scans.iter().map(|s| s.max_value).max().unwrap_or(i32::MIN)
    }

    pub fn holds(&self) -> bool {
        self.scans.iter().all(|s| s.violations.is_empty())
    }
}

/// Evaluates `functional` exactly on every vertex of both strategy sets.
pub fn verify_vertex_bound(scenario: &Scenario, functional: BellFunctional, bound: f64) -> Result<VertexBoundReport> {
    scenario.expect(functional.scenario())?;
    let mut scans = Vec::new();
    for direction in [Direction::AtoB, Direction::BtoA] {
        let strategies = enumerate_strategies(scenario, direction)?;
        let values: Vec<i32> = strategies
            .par_iter()
            .map(|s| functional.evaluate_deterministic(|x, y| s.outcome(scenario, x, y)))
            .collect();
        let violations =
            values.iter().enumerate().filter(|(_, &v)| f64::from(v) > bound).map(|(i, &v)| (i, v)).collect();
        scans.push(VertexScan {
            direction,
            count: strategies.len(),
            max_value: values.iter().copied().max().unwrap_or(i32::MIN),
            violations,
        });
    }
    Ok(VertexBoundReport { functional, scenario: *scenario, bound, scans })
}

/// S3 on all 512 + 512 vertices of the three-setting scenario.
pub fn verify_s3_bound() -> Result<VertexBoundReport> {
    verify_vertex_bound(&Scenario::THREE_SETTING, BellFunctional::S3, BellFunctional::S3.bound())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Membership {
    /// Weights over the `AtoB` and `BtoA` strategy sets.
    Member { a_to_b: Vec<f64>, b_to_a: Vec<f64> },
    /// Farkas vector `y` over rows `(a,b,x,y)` plus normalization: every
    /// vertex `t` satisfies `y·(t, 1) <= 0` while the behavior gives `> 0`.
    NonMember { certificate: Vec<f64> },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Feasibility of `behavior` as a convex mixture of both influence directions.
pub fn mixture_membership(behavior: &Behavior) -> Result<Membership> {
    let scenario = behavior.scenario();
    let forward = enumerate_strategies(&scenario, Direction::AtoB)?;
    let backward = enumerate_strategies(&scenario, Direction::BtoA)?;
    let all: Vec<DeterministicStrategy> = forward.iter().chain(&backward).cloned().collect();
    let matrix = StrategyMatrix::new(scenario, &all);
    let mut program = LinearProgram::new(all.len());
    for (row, &p) in matrix.dense_rows().into_iter().zip(behavior.as_slice()) {
        program.add_equality(row, p)?;
    }
    program.add_equality(vec![1.0; all.len()], 1.0)?;
    let options = SolverOptions { feasibility_tol: FEASIBILITY_TOL, ..SolverOptions::default() };
    let outcome = lp::solve_with(&program, &options)?;
    match outcome.status {
        LpStatus::Optimal => {
            let (a, b) = outcome.solution.split_at(forward.len());
            Ok(Membership::Member { a_to_b: a.to_vec(), b_to_a: b.to_vec() })
        }
        LpStatus::Infeasible => Ok(Membership::NonMember { certificate: outcome.duals }),
        LpStatus::Unbounded => Err(Error::Numerical("feasibility program reported unbounded".into())),
    }
}

/// CSV with one strategy per row: `f_A` entries then `f_B` entries.
pub fn strategies_csv(scenario: &Scenario, direction: Direction, strategies: &[DeterministicStrategy]) -> String {
    let mut header = Vec::new();
    match direction {
        Direction::AtoB => {
            header.extend((0..scenario.m_x).map(|x| format!("fA_x{x}")));
            for a in 0..scenario.o_a {
                header.extend((0..scenario.m_y).map(|y| format!("fB_a{a}_y{y}")));
            }
        }
        Direction::BtoA => {
            for b in 0..scenario.o_b {
                header.extend((0..scenario.m_x).map(|x| format!("fA_b{b}_x{x}")));
            }
            header.extend((0..scenario.m_y).map(|y| format!("fB_y{y}")));
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for s in strategies {
        let cells: Vec<String> = s.f_a.iter().chain(&s.f_b).map(usize::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Column name of entry `(a, b, x, y)` in coordinate CSVs.
fn coordinate_name(a: usize, b: usize, x: usize, y: usize) -> String {
    format!("p_a{a}_b{b}_x{x}_y{y}")
}

/// CSV of behavior coordinates, one vertex per row, columns in table order.
pub fn coordinates_csv(behaviors: &[Behavior]) -> Result<String> {
    let scenario = behaviors.first().map(Behavior::scenario).ok_or_else(|| Error::domain("no vertices to export"))?;
    let mut out = String::new();
    let mut names = Vec::with_capacity(scenario.len());
    for a in 0..scenario.o_a {
        for b in 0..scenario.o_b {
            for x in 0..scenario.m_x {
                for y in 0..scenario.m_y {
                    names.push(coordinate_name(a, b, x, y));
                }
            }
        }
    }
    out.push_str(&names.join(","));
    out.push('\n');
    for v in behaviors {
        if v.scenario() != scenario {
            return Err(Error::domain("vertices from different scenarios"));
        }
        let cells: Vec<String> = v.as_slice().iter().map(|p| format!("{p}")).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    Ok(out)
}

/// Parses a coordinate CSV written by [`coordinates_csv`].
pub fn parse_coordinates_csv(text: &str) -> Result<Vec<Behavior>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty vertex file".into()))?;
    let mut dims = [0usize; 4];
    let mut parsed = Vec::new();
    for name in header.split(',') {
        let name = name.trim();
        let idx = parse_coordinate_name(name).ok_or_else(|| Error::Parse(format!("bad column `{name}`")))?;
        for k in 0..4 {
            dims[k] = dims[k].max(idx[k] + 1);
        }
        parsed.push(idx);
    }
    let scenario = Scenario::new(dims[2], dims[3], dims[0], dims[1])?;
    if parsed.len() != scenario.len() {
        return Err(Error::Parse(format!(
            "header has {} columns, scenario {scenario} needs {}",
            parsed.len(),
            scenario.len()
        )));
    }
    lines
        .enumerate()
        .map(|(line_no, line)| {
            let values: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("vertex row {}: {e}", line_no + 1)))?;
            if values.len() != parsed.len() {
                return Err(Error::Parse(format!("vertex row {} has {} cells", line_no + 1, values.len())));
            }
            let mut table = vec![0.0; scenario.len()];
            for (&[a, b, x, y], v) in parsed.iter().zip(values) {
                table[scenario.index(a, b, x, y)] = v;
            }
            Behavior::new(scenario, table)
        })
        .collect()
}

fn parse_coordinate_name(name: &str) -> Option<[usize; 4]> {
    let rest = name.strip_prefix("p_a")?;
    let (a, rest) = rest.split_once("_b")?;
    let (b, rest) = rest.split_once("_x")?;
    let (x, y) = rest.split_once("_y")?;
    Some([a.parse().ok()?, b.parse().ok()?, x.parse().ok()?, y.parse().ok()?])
}
