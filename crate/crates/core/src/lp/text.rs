//! Plain-text LP dumps for debugging.

use std::fmt::Write;

use num_traits::{Signed, Zero};

use super::{LinearFunctional, LpProblem, Relation, Sense};
use crate::rational::format_rational;

fn functional_text(problem: &LpProblem, f: &LinearFunctional) -> String {
    let mut out = String::new();
    for (&id, c) in f.coefficients() {
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        let _ = write!(out, "{} {}", format_rational(&c.abs()), problem.name(id));
    }
    if !f.constant_term().is_zero() || out.is_empty() {
        if out.is_empty() {
            out = format_rational(f.constant_term());
        } else {
            let c = f.constant_term();
            let sign = if c.is_negative() { "-" } else { "+" };
            let _ = write!(out, " {sign} {}", format_rational(&c.abs()));
        }
    }
    out
}

/// Objective, constraints and bounds, one per line, rationals as `p/q`.
pub fn to_lp_text(problem: &LpProblem) -> String {
    let mut out = String::new();
    let sense = match problem.sense {
        Sense::Maximize => "maximize",
        Sense::Minimize => "minimize",
    };
    let _ = writeln!(out, "{sense}: {}", functional_text(problem, &problem.objective));
    let _ = writeln!(out, "subject to");
    for (i, c) in problem.constraints.iter().enumerate() {
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(
            out,
            "  c{i}: {} {rel} {}",
            functional_text(problem, &c.lhs),
            format_rational(&c.rhs)
        );
    }
    let _ = writeln!(out, "bounds");
    for id in 0..problem.var_count() {
        if problem.is_nonneg(id) {
            let _ = writeln!(out, "  {} >= 0", problem.name(id));
        } else {
            let _ = writeln!(out, "  {} free", problem.name(id));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Constraint;
    use crate::rational::{int, ratio};

    #[test]
    fn dump_format() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var("x", true);
        let e = p.add_var("eps", false);
        p.objective = LinearFunctional::var(e);
        p.add(Constraint::ge(LinearFunctional::var(x).with_term(e, int(-1)), ratio(-2, 5)));
        let text = to_lp_text(&p);
        assert_eq!(
            text,
            "maximize: 1 eps\nsubject to\n  c0: 1 x - 1 eps >= -2/5\nbounds\n  x >= 0\n  eps free\n"
        );
    }
}
