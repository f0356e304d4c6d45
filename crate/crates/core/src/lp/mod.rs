//! Exact rational linear programming.
//!
//! Problems are stated over named variables with sparse linear functionals.
//! [`solve_lp`] runs a two-phase simplex with Bland's rule, so every result is
//! an exact vertex optimum (or an exact infeasible/unbounded verdict).

mod generation;
mod hull;
mod simplex;
mod text;

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::rational::Rational;

pub use generation::{solve_with_generation, GenerationOutcome, DEFAULT_GENERATION_LIMIT};
pub use hull::{is_functional_fixed, relative_interior_point, AffineHull};
pub use simplex::solve_lp;
pub use text::to_lp_text;

pub type VarId = usize;

/// `Σ coefficient·var + constant`, with zero coefficients omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearFunctional {
    coefficients: BTreeMap<VarId, Rational>,
    constant: Rational,
}

impl LinearFunctional {
    pub fn zero() -> Self {
        LinearFunctional::default()
    }

    pub fn constant(value: Rational) -> Self {
        LinearFunctional {
            coefficients: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn var(id: VarId) -> Self {
        LinearFunctional::zero().with_term(id, Rational::from_integer(1.into()))
    }

    pub fn sum_of(ids: impl IntoIterator<Item = VarId>) -> Self {
        let mut f = LinearFunctional::zero();
        for id in ids {
            f.add_term(id, &Rational::from_integer(1.into()));
        }
        f
    }

    pub fn with_term(mut self, id: VarId, coefficient: Rational) -> Self {
        self.add_term(id, &coefficient);
        self
    }

    pub fn add_term(&mut self, id: VarId, coefficient: &Rational) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.coefficients.entry(id).or_insert_with(Rational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.coefficients.remove(&id);
        }
    }

    pub fn with_constant(mut self, value: Rational) -> Self {
        self.add_constant(&value);
        self
    }

    pub fn add_constant(&mut self, value: &Rational) {
        self.constant += value;
    }

    pub fn coefficients(&self) -> &BTreeMap<VarId, Rational> {
        &self.coefficients
    }

    pub fn coefficient(&self, id: VarId) -> Rational {
        self.coefficients.get(&id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    /// True when no variable has a nonzero coefficient.
    pub fn is_constant(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.coefficients.keys().next_back().copied()
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .fold(self.constant.clone(), |acc, (&id, c)| acc + c * &point[id])
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return LinearFunctional::zero();
        }
        LinearFunctional {
            coefficients: self
                .coefficients
                .iter()
                .map(|(&id, c)| (id, c * factor))
                .collect(),
            constant: &self.constant * factor,
        }
    }

    /// Replaces variable `id` by the constant `value`.
    pub fn substitute(&self, id: VarId, value: &Rational) -> Self {
        let mut out = self.clone();
        if let Some(c) = out.coefficients.remove(&id) {
            out.constant += c * value;
        }
        out
    }
}

impl Add for &LinearFunctional {
    type Output = LinearFunctional;

    fn add(self, other: &LinearFunctional) -> LinearFunctional {
        let mut out = self.clone();
        for (&id, c) in &other.coefficients {
            out.add_term(id, c);
        }
        out.constant += &other.constant;
        out
    }
}

impl Sub for &LinearFunctional {
    type Output = LinearFunctional;

    fn sub(self, other: &LinearFunctional) -> LinearFunctional {
        self + &-other
    }
}

impl Neg for &LinearFunctional {
    type Output = LinearFunctional;

    fn neg(self) -> LinearFunctional {
        LinearFunctional {
            coefficients: self.coefficients.iter().map(|(&id, c)| (id, -c)).collect(),
            constant: -&self.constant,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `lhs relation rhs`; the constant of `lhs` counts toward the left side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: LinearFunctional,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(lhs: LinearFunctional, relation: Relation, rhs: Rational) -> Self {
        Constraint { lhs, relation, rhs }
    }

    pub fn le(lhs: LinearFunctional, rhs: Rational) -> Self {
        Constraint::new(lhs, Relation::Le, rhs)
    }

    pub fn eq(lhs: LinearFunctional, rhs: Rational) -> Self {
        Constraint::new(lhs, Relation::Eq, rhs)
    }

    pub fn ge(lhs: LinearFunctional, rhs: Rational) -> Self {
        Constraint::new(lhs, Relation::Ge, rhs)
    }

    /// Signed slack: `lhs - rhs` for `≥`, `rhs - lhs` for `≤` and `=`.
    /// Nonnegative exactly when an inequality holds.
    pub fn slack(&self, point: &[Rational]) -> Rational {
        let value = self.lhs.eval(point);
        match self.relation {
            Relation::Ge => value - &self.rhs,
            Relation::Le | Relation::Eq => &self.rhs - value,
        }
    }

    pub fn is_satisfied(&self, point: &[Rational]) -> bool {
        let slack = self.slack(point);
        match self.relation {
            Relation::Eq => slack.is_zero(),
            _ => !slack.is_negative(),
        }
    }

    /// The same constraint with `lhs - rhs` on the left and zero on the right,
    /// oriented so that the inequality reads `≥ 0`.
    pub fn as_ge_zero(&self) -> LinearFunctional {
        let mut f = self.lhs.clone();
        f.add_constant(&-&self.rhs);
        match self.relation {
            Relation::Le => -&f,
            _ => f,
        }
    }

    pub fn substitute(&self, id: VarId, value: &Rational) -> Self {
        Constraint::new(self.lhs.substitute(id, value), self.relation, self.rhs.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    names: Vec<String>,
    nonneg: Vec<bool>,
    pub objective: LinearFunctional,
    pub sense: Sense,
    pub constraints: Vec<Constraint>,
}

impl Default for LpProblem {
    fn default() -> Self {
        LpProblem::new(Sense::Maximize)
    }
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        LpProblem {
            names: Vec::new(),
            nonneg: Vec::new(),
            objective: LinearFunctional::zero(),
            sense,
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, nonneg: bool) -> VarId {
        self.names.push(name.into());
        self.nonneg.push(nonneg);
        self.names.len() - 1
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.names[id]
    }

    pub fn is_nonneg(&self, id: VarId) -> bool {
        self.nonneg[id]
    }

    pub fn set_objective(&mut self, sense: Sense, objective: LinearFunctional) {
        self.sense = sense;
        self.objective = objective;
    }

    pub fn add(&mut self, constraint: Constraint) -> usize {
        debug_assert!(constraint.lhs.max_var().is_none_or(|v| v < self.var_count()));
        self.constraints.push(constraint);
        self.constraints.len() - 1
    }

    /// Every constraint plus the nonnegativity bounds, as explicit rows.
    pub fn all_constraints(&self) -> Vec<Constraint> {
        let mut out = self.constraints.clone();
        out.extend(self.bound_constraints());
        out
    }

    pub fn bound_constraints(&self) -> Vec<Constraint> {
        (0..self.var_count())
            .filter(|&id| self.nonneg[id])
            .map(|id| Constraint::ge(LinearFunctional::var(id), Rational::zero()))
            .collect()
    }

    /// A copy with the same variables and no constraints.
    pub fn same_variables(&self) -> Self {
        LpProblem {
            names: self.names.clone(),
            nonneg: self.nonneg.clone(),
            objective: LinearFunctional::zero(),
            sense: Sense::Maximize,
            constraints: Vec::new(),
        }
    }

    pub fn is_feasible_point(&self, point: &[Rational]) -> bool {
        point.len() == self.var_count()
            && self.constraints.iter().all(|c| c.is_satisfied(point))
            && (0..self.var_count()).all(|id| !self.nonneg[id] || !point[id].is_negative())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Indexed by variable id; empty unless optimal.
    pub point: Vec<Rational>,
    pub value: Rational,
    /// One multiplier per constraint with `objective = Σ dual·lhs` plus bound
    /// terms; empty unless optimal.
    pub duals: Vec<Rational>,
}

impl LpSolution {
    pub(crate) fn without_point(status: LpStatus) -> Self {
        LpSolution {
            status,
            point: Vec::new(),
            value: Rational::zero(),
            duals: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn functional_arithmetic() {
        let f = LinearFunctional::var(0).with_term(1, int(2));
        let g = LinearFunctional::var(0).with_term(2, int(-1));
        let d = &f - &g;
        assert_eq!(d.coefficients().len(), 2);
        assert_eq!(d.coefficient(0), int(0));
        assert_eq!(d.eval(&[int(5), int(1), int(3)]), int(5));
        let h = f.substitute(1, &ratio(1, 2));
        assert_eq!(h.constant_term(), &int(1));
        assert_eq!(h.scaled(&int(3)).coefficient(0), int(3));
    }

    #[test]
    fn constraint_slack_orientation() {
        let c = Constraint::le(LinearFunctional::var(0), int(3));
        assert_eq!(c.slack(&[int(1)]), int(2));
        assert_eq!(c.as_ge_zero().eval(&[int(1)]), int(2));
        let e = Constraint::eq(LinearFunctional::var(0), int(1));
        assert!(e.is_satisfied(&[int(1)]));
        assert!(!e.is_satisfied(&[int(2)]));
    }
}
