//! Optimal dual solutions of Edmonds' matching LP and laminar uncrossing.
//!
//! The primal `max c·x` over the matching polytope is solved with degree rows
//! and odd-set rows added lazily (most violated first), and the dual is read
//! off the final LP. Uncrossing then rewrites the odd-set part into a laminar
//! family without changing the objective or losing feasibility.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::max_weight_matching;
use crate::error::{Error, Result};
use crate::game::{Coalition, EdgeId, GameInstance, NodeId};
use crate::lp::{solve_lp, Constraint, LinearFunctional, LpProblem, Sense};
use crate::rational::Rational;

/// Largest support (in nodes) scanned for violated odd sets.
pub const DEFAULT_ODD_SET_NODE_LIMIT: usize = 16;
const UNCROSS_STEP_LIMIT: usize = 100_000;

/// A dual solution `(y, z)`: one value per node and weighted odd sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingDual {
    pub y: Vec<Rational>,
    /// Odd sets of size at least 3 with positive weight, sorted by set.
    pub z: Vec<(Coalition, Rational)>,
}

fn half_floor(size: usize) -> Rational {
    Rational::from_integer(((size - 1) / 2).into())
}

impl MatchingDual {
    pub fn zero(n: usize) -> Self {
        MatchingDual {
            y: vec![Rational::zero(); n],
            z: Vec::new(),
        }
    }

    /// `Σ y_v + Σ (|S| - 1)/2 · z_S`.
    pub fn objective(&self) -> Rational {
        let mut total = self.y.iter().fold(Rational::zero(), |acc, v| acc + v);
        for (set, weight) in &self.z {
            total += half_floor(set.len()) * weight;
        }
        total
    }

    /// `y_u + y_v + Σ_{S ⊇ {u,v}} z_S - c(uv)`.
    pub fn edge_slack(&self, game: &GameInstance, costs: &[Rational], edge: EdgeId) -> Rational {
        let e = game.edge(edge);
        let mut total = &self.y[e.u] + &self.y[e.v] - &costs[edge];
        for (set, weight) in &self.z {
            if set.contains(e.u) && set.contains(e.v) {
                total += weight;
            }
        }
        total
    }

    pub fn is_feasible(&self, game: &GameInstance, costs: &[Rational]) -> bool {
        self.y.iter().all(|v| !v.is_negative())
            && self.z.iter().all(|(s, w)| w.is_positive() && s.len() >= 3 && s.len() % 2 == 1)
            && (0..game.edge_count()).all(|e| !self.edge_slack(game, costs, e).is_negative())
    }

    /// Nodes with `y_v > 0`.
    pub fn positive_nodes(&self) -> Coalition {
        Coalition::from_nodes((0..self.y.len()).filter(|&v| self.y[v].is_positive()))
    }

    pub fn support(&self) -> Vec<Coalition> {
        self.z.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn is_laminar(&self) -> bool {
        let sets = self.support();
        sets.iter().enumerate().all(|(i, a)| {
            sets[i + 1..]
                .iter()
                .all(|b| a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a))
        })
    }
}

/// Node sets that are pairwise disjoint or nested, with the parent of each
/// set (the smallest member strictly containing it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminarFamily {
    pub sets: Vec<Coalition>,
    pub parent: Vec<Option<usize>>,
}

impl LaminarFamily {
    pub fn new(mut sets: Vec<Coalition>) -> Result<Self> {
        sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        sets.dedup();
        for (i, a) in sets.iter().enumerate() {
            if a.len() < 3 || a.len() % 2 == 0 {
                return Err(Error::invariant(format!("laminar member {a} is not an odd set of size ≥ 3")));
            }
            for b in &sets[i + 1..] {
                if !(a.is_disjoint(b) || b.is_subset(a)) {
                    return Err(Error::invariant(format!("sets {a} and {b} cross")));
                }
            }
        }
        // Sorted by decreasing size, so the last container seen is the smallest.
        let parent = (0..sets.len())
            .map(|i| (0..i).rev().find(|&j| sets[i].is_subset(&sets[j])))
            .collect();
        Ok(LaminarFamily { sets, parent })
    }

    pub fn empty() -> Self {
        LaminarFamily {
            sets: Vec::new(),
            parent: Vec::new(),
        }
    }

    /// Inclusion-wise maximal members, in ascending order of their smallest node.
    pub fn maximal_sets(&self) -> Vec<Coalition> {
        let mut out: Vec<Coalition> = self
            .sets
            .iter()
            .zip(&self.parent)
            .filter(|(_, p)| p.is_none())
            .map(|(s, _)| s.clone())
            .collect();
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Most violated odd-set inequality `x(E(S)) ≤ (|S|-1)/2` for the fractional
/// point `x` over the listed edges, if any.
fn most_violated_odd_set(
    game: &GameInstance,
    edges: &[EdgeId],
    x: &[Rational],
    node_limit: usize,
) -> Result<Option<Coalition>> {
    let support: Vec<NodeId> = {
        let mut nodes: Vec<NodeId> = edges
            .iter()
            .zip(x)
            .filter(|(_, v)| v.is_positive())
            .flat_map(|(&id, _)| {
                let e = game.edge(id);
                [e.u, e.v]
            })
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    };
    if support.len() > node_limit {
        return Err(Error::BoundExceeded {
            what: "odd-set separation (support nodes)",
            size: support.len(),
            limit: node_limit,
        });
    }
    let local: BTreeMap<NodeId, usize> = support.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let weighted: Vec<(u32, &Rational)> = edges
        .iter()
        .zip(x)
        .filter(|(_, v)| v.is_positive())
        .map(|(&id, v)| {
            let e = game.edge(id);
            ((1u32 << local[&e.u]) | (1u32 << local[&e.v]), v)
        })
        .collect();
    let mut best: Option<(Rational, u32)> = None;
    for mask in 1u32..(1u32 << support.len()) {
        let size = mask.count_ones() as usize;
        if size < 3 || size % 2 == 0 {
            continue;
        }
        let inside = weighted
            .iter()
            .filter(|(m, _)| m & mask == *m)
            .fold(Rational::zero(), |acc, (_, v)| acc + *v);
        let violation = inside - half_floor(size);
        if violation.is_positive() && best.as_ref().is_none_or(|(b, _)| violation > *b) {
            best = Some((violation, mask));
        }
    }
    Ok(best.map(|(_, mask)| {
        Coalition::from_nodes((0..support.len()).filter(|i| mask >> i & 1 == 1).map(|i| support[i]))
    }))
}

/// An optimal dual of the matching LP for `costs`, with laminar odd-set support.
pub fn optimal_duals(game: &GameInstance, costs: &[Rational], node_limit: usize) -> Result<MatchingDual> {
    let n = game.node_count();
    let edges: Vec<EdgeId> = (0..game.edge_count()).filter(|&e| costs[e].is_positive()).collect();
    if edges.is_empty() {
        return Ok(MatchingDual::zero(n));
    }
    let mut p = LpProblem::new(Sense::Maximize);
    for &id in &edges {
        p.add_var(format!("x{id}"), true);
    }
    let mut objective = LinearFunctional::zero();
    for (var, &id) in edges.iter().enumerate() {
        objective.add_term(var, &costs[id]);
    }
    p.objective = objective;
    let edge_vars_in = |set: &dyn Fn(NodeId, NodeId) -> bool| {
        LinearFunctional::sum_of(edges.iter().enumerate().filter_map(|(var, &id)| {
            let e = game.edge(id);
            set(e.u, e.v).then_some(var)
        }))
    };
    for v in 0..n {
        let row = edge_vars_in(&|a, b| a == v || b == v);
        p.add(Constraint::le(row, Rational::one()));
    }
    let mut odd_sets: Vec<Coalition> = Vec::new();
    let solution = loop {
        let solution = solve_lp(&p);
        if !solution.is_optimal() {
            return Err(Error::invariant("matching LP is not optimal"));
        }
        match most_violated_odd_set(game, &edges, &solution.point, node_limit)? {
            None => break solution,
            Some(set) => {
                let row = edge_vars_in(&|a, b| set.contains(a) && set.contains(b));
                p.add(Constraint::le(row, half_floor(set.len())));
                odd_sets.push(set);
            }
        }
    };

    let optimum = max_weight_matching(game, costs).value;
    if solution.value != optimum {
        return Err(Error::invariant(format!(
            "matching LP optimum {} differs from maximum matching {}",
            solution.value, optimum
        )));
    }
    let mut dual = MatchingDual {
        y: solution.duals[..n].to_vec(),
        z: odd_sets
            .into_iter()
            .zip(&solution.duals[n..])
            .filter(|(_, w)| w.is_positive())
            .map(|(s, w)| (s, w.clone()))
            .collect(),
    };
    dual.z.sort();
    let dual = uncross(dual)?;
    if !dual.is_feasible(game, costs) || dual.objective() != optimum {
        return Err(Error::invariant("uncrossed matching dual lost feasibility or optimality"));
    }
    Ok(dual)
}

fn crossing_pair(z: &BTreeMap<Coalition, Rational>) -> Option<(Coalition, Coalition)> {
    let sets: Vec<&Coalition> = z.keys().collect();
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if !(a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)) {
                return Some(((*a).clone(), (*b).clone()));
            }
        }
    }
    None
}

fn credit(z: &mut BTreeMap<Coalition, Rational>, set: Coalition, amount: &Rational) {
    // Sets of size 1 have coefficient 0 and cover no edge.
    if set.len() >= 3 {
        *z.entry(set).or_insert_with(Rational::zero) += amount;
    }
}

/// Rewrites crossing odd sets until the support of `z` is laminar.
///
/// For crossing `S, T` with `δ = min(z_S, z_T)`: if `|S ∩ T|` is odd, move `δ`
/// to `S ∩ T` and `S ∪ T`; otherwise move it to `S \ T`, `T \ S` and add `δ` to
/// `y` on `S ∩ T`. Both moves keep every edge covered at least as much and
/// leave the objective unchanged.
pub fn uncross(dual: MatchingDual) -> Result<MatchingDual> {
    let MatchingDual { mut y, z } = dual;
    let mut z: BTreeMap<Coalition, Rational> = z.into_iter().filter(|(_, w)| w.is_positive()).collect();
    let mut steps = 0;
    while let Some((s, t)) = crossing_pair(&z) {
        steps += 1;
        if steps > UNCROSS_STEP_LIMIT {
            return Err(Error::invariant("uncrossing did not terminate"));
        }
        let delta = std::cmp::min(&z[&s], &z[&t]).clone();
        for key in [&s, &t] {
            let w = z.get_mut(key).expect("present");
            *w -= &delta;
            if w.is_zero() {
                z.remove(key);
            }
        }
        let common = s.intersection(&t);
        if common.len() % 2 == 1 {
            credit(&mut z, common, &delta);
            credit(&mut z, s.union(&t), &delta);
        } else {
            credit(&mut z, s.difference(&t), &delta);
            credit(&mut z, t.difference(&s), &delta);
            for &v in common.nodes() {
                y[v] += &delta;
            }
        }
    }
    Ok(MatchingDual {
        y,
        z: z.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Allocation, GameFormat};
    use crate::rational::{int, ratio};

    fn load(text: &str) -> GameInstance {
        GameInstance::load(text.as_bytes(), GameFormat::Edgelist).unwrap()
    }

    #[test]
    fn five_cycle_dual_is_one_blossom() {
        let g = load("5 5\n1 2 2\n2 3 1\n3 4 1\n4 5 1\n1 5 2\n");
        let x = Allocation::new(vec![ratio(7, 5), ratio(2, 5), ratio(2, 5), ratio(2, 5), ratio(2, 5)]);
        let c = g.reduced_weights(&x);
        let d = optimal_duals(&g, &c, 16).unwrap();
        assert!(d.y.iter().all(Zero::is_zero));
        assert_eq!(d.z, vec![(Coalition::from_nodes(0..5), ratio(1, 5))]);
        assert_eq!(d.objective(), ratio(2, 5));
    }

    #[test]
    fn triangle_dual() {
        let g = load("3 3\n1 2 1\n2 3 1\n1 3 1\n");
        let c = vec![ratio(1, 3); 3];
        let d = optimal_duals(&g, &c, 16).unwrap();
        assert!(d.y.iter().all(Zero::is_zero));
        assert_eq!(d.z, vec![(Coalition::from_nodes(0..3), ratio(1, 3))]);
    }

    #[test]
    fn nonpositive_costs_give_zero_dual() {
        let g = load("3 3\n1 2 1\n2 3 1\n1 3 1\n");
        let c = vec![int(0), int(-1), int(0)];
        assert_eq!(optimal_duals(&g, &c, 16).unwrap(), MatchingDual::zero(3));
    }

    #[test]
    fn uncross_keeps_laminar_input() {
        let d = MatchingDual {
            y: vec![int(0); 5],
            z: vec![(Coalition::from_nodes(0..3), int(1)), (Coalition::from_nodes(0..5), int(1))],
        };
        assert_eq!(uncross(d.clone()).unwrap(), d);
    }

    #[test]
    fn uncross_odd_intersection() {
        // S = {0,1,2,3,4}, T = {2,3,4,5,6}: |S ∩ T| = 3 is odd
        let s = Coalition::from_nodes(0..5);
        let t = Coalition::from_nodes(2..7);
        let d = MatchingDual {
            y: vec![int(0); 7],
            z: vec![(s, int(1)), (t, int(1))],
        };
        let before = d.objective();
        let u = uncross(d).unwrap();
        assert!(u.is_laminar());
        assert_eq!(u.objective(), before);
        assert_eq!(u.z, vec![(Coalition::from_nodes(0..7), int(1)), (Coalition::from_nodes(2..5), int(1))]);
    }

    #[test]
    fn uncross_even_intersection() {
        // S = {0,1,2,3,4}, T = {3,4,5,6,7}: |S ∩ T| = 2
        let s = Coalition::from_nodes(0..5);
        let t = Coalition::from_nodes(3..8);
        let d = MatchingDual {
            y: vec![int(0); 8],
            z: vec![(s, ratio(1, 2)), (t, ratio(1, 2))],
        };
        let u = uncross(d.clone()).unwrap();
        assert!(u.is_laminar());
        assert_eq!(u.objective(), d.objective());
        assert_eq!(u.y[3], ratio(1, 2));
        assert_eq!(u.y[4], ratio(1, 2));
    }

    #[test]
    fn laminar_family_parents() {
        let f = LaminarFamily::new(vec![
            Coalition::from_nodes(0..3),
            Coalition::from_nodes(0..7),
            Coalition::from_nodes(8..11),
        ])
        .unwrap();
        assert_eq!(f.sets[0], Coalition::from_nodes(0..7));
        assert_eq!(f.parent, vec![None, Some(0), None]);
        assert_eq!(f.maximal_sets(), vec![Coalition::from_nodes(0..7), Coalition::from_nodes(8..11)]);
        assert!(LaminarFamily::new(vec![Coalition::from_nodes(0..3), Coalition::from_nodes(2..5)]).is_err());
        assert!(LaminarFamily::new(vec![Coalition::from_nodes(0..4)]).is_err());
    }
}
