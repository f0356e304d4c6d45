//! Cutting-plane driver for LPs with an implicitly described constraint family.

use super::{solve_lp, Constraint, LpProblem, LpSolution};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const DEFAULT_GENERATION_LIMIT: usize = 10_000;

#[derive(Clone, Debug)]
pub struct GenerationOutcome {
    pub solution: LpSolution,
    /// The input problem with every generated constraint appended.
    pub problem: LpProblem,
    pub generated: usize,
}

/// Solves `problem` plus the constraints `separator` produces on demand.
///
/// The separator is handed the current optimum and returns a violated member
/// of the family, or `None` to certify the point feasible for all of it. A
/// returned constraint that the point already satisfies is a contract
/// violation. An intermediate unbounded or infeasible relaxation is reported
/// as the final status.
pub fn solve_with_generation<F>(problem: &LpProblem, mut separator: F, limit: usize) -> Result<GenerationOutcome>
where
    F: FnMut(&[Rational]) -> Result<Option<Constraint>>,
{
    let mut problem = problem.clone();
    let mut generated = 0;
    loop {
        let solution = solve_lp(&problem);
        if !solution.is_optimal() {
            return Ok(GenerationOutcome {
                solution,
                problem,
                generated,
            });
        }
        match separator(&solution.point)? {
            None => {
                return Ok(GenerationOutcome {
                    solution,
                    problem,
                    generated,
                })
            }
            Some(cut) => {
                if cut.is_satisfied(&solution.point) {
                    return Err(Error::SeparatorContract);
                }
                if generated == limit {
                    return Err(Error::BoundExceeded {
                        what: "constraint generation rounds",
                        size: generated + 1,
                        limit,
                    });
                }
                problem.add(cut);
                generated += 1;
            }
        }
    }
}
