//! Two-phase tableau simplex with Bland's rule.
//!
//! The problems solved here have few variables and many constraints, so the
//! simplex runs on the dual: the tableau has one row per primal variable and
//! one column per primal constraint. The primal point is read back from the
//! final basis inverse, and the dual solution gives the constraint
//! multipliers for free.

use num_traits::{One, Signed, Zero};

use super::{LpProblem, LpSolution, LpStatus, Relation, Sense};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug)]
enum Origin {
    /// Constraint index and the sign applied to put it in `≤` form.
    Constraint(usize, bool),
    Bound,
}

struct Row {
    coefficients: Vec<Rational>,
    rhs: Rational,
    equality: bool,
    origin: Origin,
}

fn normalize(problem: &LpProblem) -> Vec<Row> {
    let n = problem.var_count();
    let mut rows = Vec::with_capacity(problem.constraints.len() + n);
    for (index, c) in problem.constraints.iter().enumerate() {
        let mut coefficients = vec![Rational::zero(); n];
        for (&id, value) in c.lhs.coefficients() {
            coefficients[id] = value.clone();
        }
        let mut rhs = &c.rhs - c.lhs.constant_term();
        let negate = c.relation == Relation::Ge;
        if negate {
            coefficients.iter_mut().for_each(|v| *v = -&*v);
            rhs = -rhs;
        }
        rows.push(Row {
            coefficients,
            rhs,
            equality: c.relation == Relation::Eq,
            origin: Origin::Constraint(index, negate),
        });
    }
    for id in 0..n {
        if problem.is_nonneg(id) {
            let mut coefficients = vec![Rational::zero(); n];
            coefficients[id] = -Rational::one();
            rows.push(Row {
                coefficients,
                rhs: Rational::zero(),
                equality: false,
                origin: Origin::Bound,
            });
        }
    }
    rows
}

/// Dense tableau for `min cost·y  s.t.  G y = target, y ≥ 0` with one
/// artificial column per row appended after the structural columns.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(columns: &[Vec<Rational>], target: &[Rational]) -> (Self, Vec<bool>) {
        let m = target.len();
        let structural = columns.len();
        let mut flipped = vec![false; m];
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for r in 0..m {
            let flip = target[r].is_negative();
            flipped[r] = flip;
            let mut row = Vec::with_capacity(structural + m);
            for col in columns {
                row.push(if flip { -&col[r] } else { col[r].clone() });
            }
            for a in 0..m {
                row.push(if a == r { Rational::one() } else { Rational::zero() });
            }
            rows.push(row);
            rhs.push(target[r].abs());
        }
        let basis = (structural..structural + m).collect();
        (Tableau { rows, rhs, basis }, flipped)
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let pivot = self.rows[p][q].clone();
        if !pivot.is_one() {
            let inv = pivot.recip();
            for v in self.rows[p].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[p] *= &inv;
        }
        let support: Vec<usize> = (0..self.rows[p].len())
            .filter(|&j| !self.rows[p][j].is_zero())
            .collect();
        let pivot_row = self.rows[p].clone();
        let pivot_rhs = self.rhs[p].clone();
        for r in 0..self.rows.len() {
            if r == p || self.rows[r][q].is_zero() {
                continue;
            }
            let factor = self.rows[r][q].clone();
            let row = &mut self.rows[r];
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
            if !pivot_rhs.is_zero() {
                self.rhs[r] -= &factor * &pivot_rhs;
            }
        }
        self.basis[p] = q;
    }

    /// Minimizes `cost` over columns `< enter_limit` using Bland's rule.
    fn optimize(&mut self, cost: &[Rational], enter_limit: usize) -> Outcome {
        let m = self.rows.len();
        loop {
            let basic_cost: Vec<&Rational> = self.basis.iter().map(|&b| &cost[b]).collect();
            let mut is_basic = vec![false; self.rows[0].len()];
            for &b in &self.basis {
                is_basic[b] = true;
            }
            let entering = (0..enter_limit).find(|&j| {
                if is_basic[j] {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for r in 0..m {
                    let a = &self.rows[r][j];
                    if !a.is_zero() && !basic_cost[r].is_zero() {
                        reduced -= basic_cost[r] * a;
                    }
                }
                reduced.is_negative()
            });
            let Some(q) = entering else {
                return Outcome::Optimal;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..m {
                let a = &self.rows[r][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leaving {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio || (ratio == *best_ratio && self.basis[r] < self.basis[*best])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((p, _)) => self.pivot(p, q),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .fold(Rational::zero(), |acc, (&b, v)| acc + &cost[b] * v)
    }
}

enum DualOutcome {
    Optimal { y: Vec<Rational>, pi: Vec<Rational> },
    Infeasible,
    Unbounded,
}

/// Solves `min cost·y  s.t.  Σ y_j columns_j = target, y ≥ 0`, returning the
/// optimal `y` and the equality multipliers `pi`.
fn solve_standard(columns: &[Vec<Rational>], cost: &[Rational], target: &[Rational]) -> DualOutcome {
    let m = target.len();
    let structural = columns.len();
    let (mut tableau, flipped) = Tableau::new(columns, target);

    let mut phase_one = vec![Rational::zero(); structural + m];
    for c in phase_one.iter_mut().skip(structural) {
        *c = Rational::one();
    }
    tableau.optimize(&phase_one, structural + m);
    if tableau.value(&phase_one).is_positive() {
        return DualOutcome::Infeasible;
    }
    for r in 0..m {
        if tableau.basis[r] >= structural {
            if let Some(q) = (0..structural).find(|&j| !tableau.rows[r][j].is_zero()) {
                tableau.pivot(r, q);
            }
        }
    }

    let mut phase_two = cost.to_vec();
    phase_two.extend((0..m).map(|_| Rational::zero()));
    if let Outcome::Unbounded = tableau.optimize(&phase_two, structural) {
        return DualOutcome::Unbounded;
    }

    let mut y = vec![Rational::zero(); structural];
    for (r, &b) in tableau.basis.iter().enumerate() {
        if b < structural {
            y[b] = tableau.rhs[r].clone();
        }
    }
    let mut pi = vec![Rational::zero(); m];
    for (j, p) in pi.iter_mut().enumerate() {
        let mut value = Rational::zero();
        for r in 0..m {
            let c = &phase_two[tableau.basis[r]];
            let inv = &tableau.rows[r][structural + j];
            if !c.is_zero() && !inv.is_zero() {
                value += c * inv;
            }
        }
        *p = if flipped[j] { -value } else { value };
    }
    DualOutcome::Optimal { y, pi }
}

/// Exact optimum of `problem`.
pub fn solve_lp(problem: &LpProblem) -> LpSolution {
    let n = problem.var_count();
    if n == 0 {
        return solve_constant(problem);
    }
    let rows = normalize(problem);
    let maximize = problem.sense == Sense::Maximize;
    let mut target = vec![Rational::zero(); n];
    for (&id, c) in problem.objective.coefficients() {
        target[id] = if maximize { c.clone() } else { -c };
    }

    let mut columns = Vec::new();
    let mut cost = Vec::new();
    let mut owner = Vec::new();
    for (index, row) in rows.iter().enumerate() {
        columns.push(row.coefficients.clone());
        cost.push(row.rhs.clone());
        owner.push((index, true));
        if row.equality {
            columns.push(row.coefficients.iter().map(|v| -v).collect());
            cost.push(-&row.rhs);
            owner.push((index, false));
        }
    }

    match solve_standard(&columns, &cost, &target) {
        DualOutcome::Infeasible => {
            let zero = vec![Rational::zero(); n];
            let status = match solve_standard(&columns, &cost, &zero) {
                DualOutcome::Optimal { .. } => LpStatus::Unbounded,
                _ => LpStatus::Infeasible,
            };
            LpSolution::without_point(status)
        }
        DualOutcome::Unbounded => LpSolution::without_point(LpStatus::Infeasible),
        DualOutcome::Optimal { y, pi } => {
            let mut duals = vec![Rational::zero(); problem.constraints.len()];
            for (j, value) in y.iter().enumerate() {
                if value.is_zero() {
                    continue;
                }
                let (index, positive) = owner[j];
                if let Origin::Constraint(c, negated) = rows[index].origin {
                    let mut d = if positive { value.clone() } else { -value };
                    if negated {
                        d = -d;
                    }
                    if !maximize {
                        d = -d;
                    }
                    duals[c] += d;
                }
            }
            let value = problem.objective.eval(&pi);
            assert!(
                problem.is_feasible_point(&pi),
                "simplex returned an infeasible point"
            );
            LpSolution {
                status: LpStatus::Optimal,
                point: pi,
                value,
                duals,
            }
        }
    }
}

fn solve_constant(problem: &LpProblem) -> LpSolution {
    if problem.constraints.iter().all(|c| c.is_satisfied(&[])) {
        LpSolution {
            status: LpStatus::Optimal,
            point: Vec::new(),
            value: problem.objective.constant_term().clone(),
            duals: vec![Rational::zero(); problem.constraints.len()],
        }
    } else {
        LpSolution::without_point(LpStatus::Infeasible)
    }
}
