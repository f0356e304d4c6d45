//! Implicit equalities, relative-interior points and fixedness tests for
//! explicitly listed polyhedra.

use num_traits::{One, Signed, Zero};

use super::{solve_lp, Constraint, LinearFunctional, LpProblem, LpStatus, Relation, Sense};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// The affine hull of a nonempty polyhedron `{x : constraints}` together with
/// a point of its relative interior.
#[derive(Clone, Debug)]
pub struct AffineHull {
    var_count: usize,
    /// Reduced row echelon form of the hull equations: `row·x = rhs`.
    rows: Vec<Row>,
    pivots: Vec<usize>,
    point: Vec<Rational>,
    implicit: Vec<bool>,
}

fn problem_over(var_count: usize, constraints: &[Constraint]) -> LpProblem {
    let mut p = LpProblem::new(Sense::Maximize);
    for id in 0..var_count {
        p.add_var(format!("v{id}"), false);
    }
    for c in constraints {
        p.add(c.clone());
    }
    p
}

impl AffineHull {
    /// Detects the implicit equalities of the system and builds the hull.
    ///
    /// Each pass maximizes `δ ≤ 1` with every undecided inequality required to
    /// have slack at least `δ`. A positive optimum gives a relative-interior
    /// point. A zero optimum comes with multipliers summing to one over the
    /// undecided rows whose weighted slack vanishes on the set, so every row
    /// with a nonzero multiplier is an implicit equality. Rows that reduce to
    /// a constant modulo the known equalities are decided without an LP, so
    /// there are at most `var_count + 1` passes.
    pub fn compute(var_count: usize, constraints: &[Constraint]) -> Result<Self> {
        let mut implicit: Vec<bool> = constraints.iter().map(|c| c.relation == Relation::Eq).collect();
        let mut undecided: Vec<usize> = (0..constraints.len()).filter(|&i| !implicit[i]).collect();
        let (mut rows, mut pivots) = reduce(var_count, equation_rows(var_count, constraints, &implicit));
        loop {
            // drop rows that are constant on the current affine hull
            let mut infeasible = false;
            undecided.retain(|&i| {
                let slack = constraints[i].as_ge_zero();
                match residual_constant(var_count, &rows, &pivots, &slack) {
                    None => true,
                    Some(value) => {
                        if value.is_negative() {
                            infeasible = true;
                        }
                        implicit[i] = value.is_zero();
                        false
                    }
                }
            });
            if infeasible {
                return Err(Error::Infeasible);
            }

            let mut p = problem_over(var_count, &[]);
            let delta = p.add_var("delta", false);
            for (row, rhs) in &rows {
                p.add(Constraint::eq(functional_of(row), rhs.clone()));
            }
            for &i in &undecided {
                let slack = constraints[i].as_ge_zero();
                p.add(Constraint::ge(&slack - &LinearFunctional::var(delta), Rational::zero()));
            }
            let cap = p.add(Constraint::le(LinearFunctional::var(delta), Rational::one()));
            // rows of constant slack still have to hold
            for (i, c) in constraints.iter().enumerate() {
                if implicit[i] || !undecided.contains(&i) {
                    p.add(c.clone());
                }
            }
            if undecided.is_empty() {
                p.constraints.truncate(cap);
                p.add(Constraint::eq(LinearFunctional::var(delta), Rational::zero()));
            }
            p.objective = LinearFunctional::var(delta);
            let solution = solve_lp(&p);
            match solution.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => return Err(Error::Infeasible),
                LpStatus::Unbounded => return Err(Error::invariant("hull LP is unbounded")),
            }
            if solution.value.is_negative() {
                return Err(Error::Infeasible);
            }
            if undecided.is_empty() || solution.value.is_positive() {
                let mut point = solution.point;
                point.truncate(var_count);
                let hull = AffineHull {
                    var_count,
                    rows,
                    pivots,
                    point,
                    implicit,
                };
                hull.verify(constraints)?;
                return Ok(hull);
            }
            let first = rows.len();
            let newly: Vec<usize> = undecided
                .iter()
                .enumerate()
                .filter(|(k, _)| !solution.duals[first + k].is_zero())
                .map(|(_, &i)| i)
                .collect();
            if newly.is_empty() {
                return Err(Error::invariant("zero hull optimum without a certificate"));
            }
            for &i in &newly {
                implicit[i] = true;
            }
            undecided.retain(|i| !newly.contains(i));
            (rows, pivots) = reduce(var_count, equation_rows(var_count, constraints, &implicit));
        }
    }

    fn verify(&self, constraints: &[Constraint]) -> Result<()> {
        for (i, c) in constraints.iter().enumerate() {
            let slack = c.slack(&self.point);
            let ok = if self.implicit[i] { slack.is_zero() } else { slack.is_positive() };
            if !ok {
                return Err(Error::invariant(format!(
                    "relative interior point has wrong slack on constraint {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn point(&self) -> &[Rational] {
        &self.point
    }

    pub fn dimension(&self) -> usize {
        self.var_count - self.rows.len()
    }

    /// Whether input constraint `index` holds with equality on the whole set.
    pub fn is_implicit(&self, index: usize) -> bool {
        self.implicit[index]
    }

    /// The common value of `f` over the set, or `None` if `f` varies on it.
    pub fn fixed_value(&self, f: &LinearFunctional) -> Option<Rational> {
        residual_constant(self.var_count, &self.rows, &self.pivots, f).map(|_| f.eval(&self.point))
    }

    /// A basis of the hull as equality constraints.
    pub fn equations(&self) -> Vec<Constraint> {
        self.rows
            .iter()
            .map(|(row, rhs)| Constraint::eq(functional_of(row), rhs.clone()))
            .collect()
    }
}

type Row = (Vec<Rational>, Rational);

fn functional_of(row: &[Rational]) -> LinearFunctional {
    let mut f = LinearFunctional::zero();
    for (id, v) in row.iter().enumerate() {
        f.add_term(id, v);
    }
    f
}

fn equation_rows(var_count: usize, constraints: &[Constraint], implicit: &[bool]) -> Vec<Row> {
    constraints
        .iter()
        .zip(implicit)
        .filter(|(_, &imp)| imp)
        .map(|(c, _)| {
            let mut row = vec![Rational::zero(); var_count];
            for (&id, v) in c.lhs.coefficients() {
                row[id] = v.clone();
            }
            (row, &c.rhs - c.lhs.constant_term())
        })
        .collect()
}

/// If `f` is constant on `{row·x = rhs}`, that constant.
fn residual_constant(var_count: usize, rows: &[Row], pivots: &[usize], f: &LinearFunctional) -> Option<Rational> {
    let mut residual = vec![Rational::zero(); var_count];
    for (&id, v) in f.coefficients() {
        residual[id] = v.clone();
    }
    let mut constant = f.constant_term().clone();
    for ((row, rhs), &p) in rows.iter().zip(pivots) {
        if residual[p].is_zero() {
            continue;
        }
        let factor = residual[p].clone();
        for (r, a) in residual.iter_mut().zip(row) {
            if !a.is_zero() {
                *r -= &factor * a;
            }
        }
        constant += &factor * rhs;
    }
    residual.iter().all(Zero::is_zero).then_some(constant)
}

fn reduce(var_count: usize, mut rows: Vec<Row>) -> (Vec<Row>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..var_count {
        let Some(found) = (rank..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = rows[rank].0[col].recip();
        for v in rows[rank].0.iter_mut() {
            *v *= &inv;
        }
        rows[rank].1 *= &inv;
        let (pivot_row, pivot_rhs) = rows[rank].clone();
        for (r, (row, rhs)) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (a, b) in row.iter_mut().zip(&pivot_row) {
                if !b.is_zero() {
                    *a -= &factor * b;
                }
            }
            *rhs -= &factor * &pivot_rhs;
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// A point satisfying every implicit equality of the system exactly and every
/// other inequality strictly.
pub fn relative_interior_point(var_count: usize, constraints: &[Constraint]) -> Result<Vec<Rational>> {
    Ok(AffineHull::compute(var_count, constraints)?.point)
}

/// `Some(c)` iff `f` equals `c` everywhere on the (nonempty) polyhedron,
/// decided by maximizing and minimizing `f`.
pub fn is_functional_fixed(
    var_count: usize,
    constraints: &[Constraint],
    f: &LinearFunctional,
) -> Result<Option<Rational>> {
    let mut p = problem_over(var_count, constraints);
    let mut extremes = Vec::with_capacity(2);
    for sense in [Sense::Maximize, Sense::Minimize] {
        p.set_objective(sense, f.clone());
        let solution = solve_lp(&p);
        match solution.status {
            LpStatus::Optimal => extremes.push(solution.value),
            LpStatus::Unbounded => return Ok(None),
            LpStatus::Infeasible => return Err(Error::Infeasible),
        }
    }
    Ok((extremes[0] == extremes[1]).then(|| extremes.swap_remove(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn x(id: usize) -> LinearFunctional {
        LinearFunctional::var(id)
    }

    #[test]
    fn unit_interval_interior() {
        let cs = [Constraint::ge(x(0), int(0)), Constraint::le(x(0), int(1))];
        let p = relative_interior_point(1, &cs).unwrap();
        assert!(p[0] > int(0) && p[0] < int(1));
    }

    #[test]
    fn singleton_is_its_own_interior() {
        let cs = [Constraint::eq(x(0), int(2))];
        assert_eq!(relative_interior_point(1, &cs).unwrap(), vec![int(2)]);
        let squeezed = [Constraint::ge(x(0), int(2)), Constraint::le(x(0), int(2))];
        let hull = AffineHull::compute(1, &squeezed).unwrap();
        assert_eq!(hull.point(), &[int(2)]);
        assert!(hull.is_implicit(0) && hull.is_implicit(1));
        assert_eq!(hull.dimension(), 0);
    }

    #[test]
    fn simplex_face_detection() {
        // x, y ≥ 0, x + y ≤ 1, y ≤ 0  →  the segment {(t, 0)}
        let cs = [
            Constraint::ge(x(0), int(0)),
            Constraint::ge(x(1), int(0)),
            Constraint::le(LinearFunctional::sum_of([0, 1]), int(1)),
            Constraint::le(x(1), int(0)),
        ];
        let hull = AffineHull::compute(2, &cs).unwrap();
        assert_eq!(hull.dimension(), 1);
        assert!(!hull.is_implicit(0) && hull.is_implicit(1) && !hull.is_implicit(2));
        assert_eq!(hull.fixed_value(&x(1)), Some(int(0)));
        assert_eq!(hull.fixed_value(&x(0)), None);
        assert_eq!(hull.point()[1], int(0));
    }

    #[test]
    fn fixedness_on_a_sum_constraint() {
        let total = LinearFunctional::sum_of(0..5);
        let mut cs = vec![Constraint::eq(total.clone(), int(3))];
        cs.extend((0..5).map(|i| Constraint::ge(x(i), int(0))));
        assert_eq!(is_functional_fixed(5, &cs, &total).unwrap(), Some(int(3)));
        assert_eq!(is_functional_fixed(5, &cs, &x(0)).unwrap(), None);
        let hull = AffineHull::compute(5, &cs).unwrap();
        assert_eq!(hull.fixed_value(&total), Some(int(3)));
        assert_eq!(hull.fixed_value(&x(0)), None);
        assert!(hull.point().iter().all(|v| *v > int(0)));
        assert_eq!(total.eval(hull.point()), int(3));
        assert_eq!(hull.dimension(), 4);
    }

    #[test]
    fn large_slacks_do_not_cut_the_set() {
        // the only point is x = 5, whose slack on x ≥ 0 exceeds 1
        let cs = [Constraint::ge(x(0), int(0)), Constraint::ge(x(0), int(5)), Constraint::le(x(0), int(5))];
        let hull = AffineHull::compute(1, &cs).unwrap();
        assert_eq!(hull.point(), &[int(5)]);
        assert!(!hull.is_implicit(0));
    }

    #[test]
    fn unbounded_functional_is_not_fixed() {
        let cs = [Constraint::ge(x(0), int(0))];
        assert_eq!(is_functional_fixed(1, &cs, &x(0)).unwrap(), None);
    }

    #[test]
    fn infeasible_system_is_an_error() {
        let cs = [Constraint::ge(x(0), int(1)), Constraint::le(x(0), int(0))];
        assert!(matches!(AffineHull::compute(1, &cs), Err(Error::Infeasible)));
    }
}
