//! Exact linear programming over the rationals.
//!
//! A dense two-phase simplex with Bland's pivoting rule. All variables are
//! nonnegative. No floating point is involved at any stage, so feasibility
//! verdicts and zero/positive classifications are exact.

use std::cell::RefCell;
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coefficients,
            relation,
            rhs,
        }
    }

    fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self
            .coefficients
            .iter()
            .zip(x)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, v)| a * v)
            .sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Constraints over nonnegative variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearProgram {
    pub variables: Vec<String>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible,
    Optimal {
        value: Rational,
        witness: Vec<Rational>,
    },
    Unbounded,
}

impl LpOutcome {
    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Feasible(w) | LpOutcome::Optimal { witness: w, .. } => Some(w),
            _ => None,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            LpOutcome::Feasible(_) => "feasible",
            LpOutcome::Infeasible => "infeasible",
            LpOutcome::Optimal { .. } => "optimal",
            LpOutcome::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(variables: Vec<String>) -> Self {
        LinearProgram {
            variables,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints
            .push(Constraint::new(coefficients, relation, rhs));
    }

    pub fn with(mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        self.push(coefficients, relation, rhs);
        self
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    /// Exact substitution check, including nonnegativity.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.variables.len()
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(x))
    }

    fn validate(&self) -> Result<()> {
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != self.variables.len() {
                return Err(Error::MalformedProgram(format!(
                    "constraint {k} has {} coefficients for {} variables",
                    c.coefficients.len(),
                    self.variables.len()
                )));
            }
        }
        Ok(())
    }

    pub fn render(&self) -> Vec<String> {
        self.constraints
            .iter()
            .map(|c| {
                let mut line = String::new();
                for (a, name) in c.coefficients.iter().zip(&self.variables) {
                    if a.is_zero() {
                        continue;
                    }
                    let sign = if a.is_negative() { '-' } else { '+' };
                    let _ = write!(line, "{sign}{} {name} ", format_rational(&a.abs()));
                }
                if line.is_empty() {
                    line.push_str("0 ");
                }
                let _ = write!(line, "{} {}", c.relation.symbol(), format_rational(&c.rhs));
                line
            })
            .collect()
    }
}

pub fn solve_feasibility(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_feasibility_with_stats(lp).map(|(o, _)| o)
}

pub fn solve_feasibility_with_stats(lp: &LinearProgram) -> Result<(LpOutcome, SolveStats)> {
    lp.validate()?;
    let mut tableau = Tableau::new(lp);
    let outcome = if tableau.phase_one() {
        LpOutcome::Feasible(tableau.primal())
    } else {
        LpOutcome::Infeasible
    };
    let stats = SolveStats {
        pivots: tableau.pivots,
    };
    record(lp, "feasibility", None, &outcome, stats);
    Ok((outcome, stats))
}

pub fn optimize(
    lp: &LinearProgram,
    objective: &[Rational],
    direction: Direction,
) -> Result<LpOutcome> {
    optimize_with_stats(lp, objective, direction).map(|(o, _)| o)
}

pub fn optimize_with_stats(
    lp: &LinearProgram,
    objective: &[Rational],
    direction: Direction,
) -> Result<(LpOutcome, SolveStats)> {
    lp.validate()?;
    if objective.len() != lp.variables.len() {
        return Err(Error::MalformedProgram(format!(
            "objective has {} coefficients for {} variables",
            objective.len(),
            lp.variables.len()
        )));
    }
    let mut tableau = Tableau::new(lp);
    let outcome = if !tableau.phase_one() {
        LpOutcome::Infeasible
    } else {
        let costs: Vec<Rational> = match direction {
            Direction::Minimize => objective.to_vec(),
            Direction::Maximize => objective.iter().map(|c| -c).collect(),
        };
        if tableau.phase_two(&costs) {
            let witness = tableau.primal();
            let value = dot(objective, &witness);
            LpOutcome::Optimal { value, witness }
        } else {
            LpOutcome::Unbounded
        }
    };
    let stats = SolveStats {
        pivots: tableau.pivots,
    };
    let kind = match direction {
        Direction::Minimize => "minimize",
        Direction::Maximize => "maximize",
    };
    record(lp, kind, Some(objective), &outcome, stats);
    Ok((outcome, stats))
}

/// A feasible point on which every tracked form is positive whenever any
/// feasible point makes it positive.
///
/// Each tracked form is maximized separately and the optimal vertices are
/// averaged with equal weights. Tracked forms must have nonnegative
/// coefficients (they are masses), so a positive form stays positive in the
/// average. Returns the point and, per form, whether it is positive there.
pub fn max_support_solution(
    lp: &LinearProgram,
    tracked: &[Vec<Rational>],
) -> Result<(Vec<Rational>, Vec<bool>)> {
    if tracked.iter().flatten().any(|c| c.is_negative()) {
        return Err(Error::MalformedProgram(
            "tracked forms must have nonnegative coefficients".into(),
        ));
    }
    let base = match solve_feasibility(lp)? {
        LpOutcome::Feasible(w) => w,
        _ => return Err(Error::Infeasible),
    };
    let mut points: Vec<Vec<Rational>> = Vec::with_capacity(tracked.len());
    for form in tracked {
        match optimize(lp, form, Direction::Maximize)? {
            LpOutcome::Optimal { witness, .. } => points.push(witness),
            LpOutcome::Unbounded => {
                let capped = lp
                    .clone()
                    .with(form.clone(), Relation::Le, crate::rational::one());
                match optimize(&capped, form, Direction::Maximize)? {
                    LpOutcome::Optimal { witness, .. } => points.push(witness),
                    other => {
                        return Err(Error::Structural(format!(
                            "capped maximization returned {}",
                            other.status()
                        )))
                    }
                }
            }
            _ => return Err(Error::Infeasible),
        }
    }
    if points.is_empty() {
        points.push(base);
    }
    let weight = Rational::new(1.into(), points.len().into());
    let mut average = vec![Rational::zero(); lp.variables.len()];
    for p in &points {
        for (acc, v) in average.iter_mut().zip(p) {
            *acc += v * &weight;
        }
    }
    let flags = tracked
        .iter()
        .map(|form| dot(form, &average).is_positive())
        .collect();
    Ok((average, flags))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

struct Tableau {
    /// Rows of `[A | b]` in canonical form with respect to `basis`.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    structural: usize,
    /// Columns at or beyond this index are artificial.
    artificial_start: usize,
    columns: usize,
    pivots: usize,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.variables.len();
        // Orient every row so that its right-hand side is nonnegative.
        let oriented: Vec<(Vec<Rational>, Relation, Rational)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    (
                        c.coefficients.iter().map(|a| -a).collect(),
                        c.relation.flipped(),
                        -c.rhs.clone(),
                    )
                } else {
                    (c.coefficients.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();
        let slacks = oriented
            .iter()
            .filter(|(_, r, _)| *r != Relation::Eq)
            .count();
        let artificials = oriented
            .iter()
            .filter(|(_, r, _)| *r != Relation::Le)
            .count();
        let artificial_start = n + slacks;
        let columns = artificial_start + artificials;

        let mut rows = Vec::with_capacity(oriented.len());
        let mut basis = Vec::with_capacity(oriented.len());
        let (mut next_slack, mut next_artificial) = (n, artificial_start);
        for (coefficients, relation, rhs) in oriented {
            let mut row = coefficients;
            row.resize(columns + 1, Rational::zero());
            row[columns] = rhs;
            match relation {
                Relation::Le => {
                    row[next_slack] = crate::rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -crate::rational::one();
                    next_slack += 1;
                    row[next_artificial] = crate::rational::one();
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
                Relation::Eq => {
                    row[next_artificial] = crate::rational::one();
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            rows,
            basis,
            structural: n,
            artificial_start,
            columns,
            pivots: 0,
        }
    }

    /// Drives the artificial variables to zero. Returns `false` if the
    /// constraints are infeasible.
    fn phase_one(&mut self) -> bool {
        if self.artificial_start == self.columns {
            return true;
        }
        let costs: Vec<Rational> = (0..self.columns)
            .map(|j| {
                if j >= self.artificial_start {
                    crate::rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        let bounded = self.run(&costs, self.columns);
        debug_assert!(bounded, "phase one is bounded below by zero");
        let infeasibility: Rational = self
            .rows
            .iter()
            .zip(&self.basis)
            .filter(|(_, b)| **b >= self.artificial_start)
            .map(|(row, _)| row[self.columns].clone())
            .sum();
        if infeasibility.is_positive() {
            return false;
        }
        // Pivot remaining (zero-valued) artificials out of the basis, dropping
        // rows that turn out to be redundant.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.artificial_start {
                match (0..self.artificial_start).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => {
                        self.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
        true
    }

    /// Minimizes `costs` (over structural variables) after phase one.
    /// Returns `false` if unbounded.
    fn phase_two(&mut self, costs: &[Rational]) -> bool {
        let mut full = costs.to_vec();
        full.resize(self.columns, Rational::zero());
        self.run(&full, self.artificial_start)
    }

    /// Bland's rule simplex over columns `0..allowed`.
    fn run(&mut self, costs: &[Rational], allowed: usize) -> bool {
        let rhs = self.columns;
        loop {
            let mut is_basic = vec![false; self.columns];
            for b in &self.basis {
                is_basic[*b] = true;
            }
            let entering = (0..allowed).filter(|j| !is_basic[*j]).find(|&j| {
                let mut reduced = costs[j].clone();
                for (row, b) in self.rows.iter().zip(&self.basis) {
                    if !costs[*b].is_zero() && !row[j].is_zero() {
                        reduced -= &costs[*b] * &row[j];
                    }
                }
                reduced.is_negative()
            });
            let Some(j) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[j];
                let better = match &leaving {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((i, _)) = leaving else {
                return false;
            };
            self.pivot(i, j);
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        self.pivots += 1;
        let pivot = self.rows[r][j].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let factor = row[j].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = j;
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.structural];
        for (row, b) in self.rows.iter().zip(&self.basis) {
            if *b < self.structural {
                x[*b] = row[self.columns].clone();
            }
        }
        x
    }
}

/// One solved linear program, as captured by [`trace::capture`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpRecord {
    pub kind: String,
    pub variables: Vec<String>,
    pub constraints: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<Vec<String>>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    pub pivots: usize,
}

thread_local! {
    static TRACE: RefCell<Option<Vec<LpRecord>>> = const { RefCell::new(None) };
}

fn record(
    lp: &LinearProgram,
    kind: &str,
    objective: Option<&[Rational]>,
    outcome: &LpOutcome,
    stats: SolveStats,
) {
    TRACE.with(|t| {
        if let Some(records) = t.borrow_mut().as_mut() {
            records.push(LpRecord {
                kind: kind.to_string(),
                variables: lp.variables.clone(),
                constraints: lp.render(),
                objective: objective.map(|o| o.iter().map(format_rational).collect()),
                status: outcome.status().to_string(),
                value: match outcome {
                    LpOutcome::Optimal { value, .. } => Some(format_rational(value)),
                    _ => None,
                },
                witness: outcome
                    .witness()
                    .map(|w| w.iter().map(format_rational).collect()),
                pivots: stats.pivots,
            });
        }
    });
}

pub mod trace {
    use super::{LpRecord, TRACE};

    /// Runs `f`, collecting every linear program solved on this thread.
    pub fn capture<R>(f: impl FnOnce() -> R) -> (R, Vec<LpRecord>) {
        let previous = TRACE.with(|t| t.borrow_mut().replace(Vec::new()));
        let result = f();
        let records = TRACE.with(|t| {
            let mut slot = t.borrow_mut();
            let mine = slot.take().unwrap_or_default();
            *slot = previous;
            mine
        });
        (result, records)
    }
}
