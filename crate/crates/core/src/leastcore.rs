//! The leastcore LP over matchings, universal allocations, and the
//! decomposition (maximal blossoms, representatives, reference matching and
//! edge classes) that parameterizes the compact nucleolus LPs.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{excess, Allocation, Coalition, EdgeId, GameInstance, Matching, NodeId};
use crate::lp::{
    solve_with_generation, AffineHull, Constraint, LinearFunctional, LpProblem, LpStatus, Sense,
};
use crate::matching::{
    enumerate_matchings, max_weight_matching, max_weight_matching_exposing,
    max_weight_matching_forcing_edge, optimal_duals, optimal_matchings, total_value, LaminarFamily,
    MatchingDual,
};
use crate::options::SolveOptions;
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeastcoreResult {
    /// The leastcore value: the largest `ε` with `x(M) ≥ w(M) + ε` for all matchings.
    pub epsilon1: Rational,
    pub witness: Allocation,
    /// Matchings whose constraints were generated during the solve.
    pub generated_constraints: Vec<Matching>,
    /// `ν(V)`.
    pub total_value: Rational,
}

/// An LP over `x_v ≥ 0` (ids `0..n`) plus a free `eps` (id `n`), with `x(V) = ν`.
pub(crate) fn allocation_problem(game: &GameInstance, nu: &Rational) -> LpProblem {
    let mut p = LpProblem::new(Sense::Maximize);
    for v in game.nodes() {
        p.add_var(format!("x[{}]", game.label(v)), true);
    }
    p.add(Constraint::eq(LinearFunctional::sum_of(game.nodes()), nu.clone()));
    p
}

/// `x(V(M))` as a functional over node variables.
pub fn matching_functional(game: &GameInstance, matching: &Matching) -> LinearFunctional {
    LinearFunctional::sum_of(matching.covered_nodes(game).nodes().iter().copied())
}

/// `x(V(M)) - eps ≥ w(M)` with `eps` at variable id `eps_var`.
fn matching_row(game: &GameInstance, matching: &Matching, eps_var: usize) -> Constraint {
    let f = matching_functional(game, matching).with_term(eps_var, -Rational::from_integer(1.into()));
    Constraint::ge(f, matching.weight(game))
}

fn allocation_of(game: &GameInstance, point: &[Rational]) -> Allocation {
    Allocation::new(point[..game.node_count()].to_vec())
}

/// Solves the leastcore LP with the matching constraints separated by a
/// maximum weight matching under `c(uv) = w(uv) - x(u) - x(v)`.
pub fn solve_leastcore(game: &GameInstance, options: &SolveOptions) -> Result<LeastcoreResult> {
    let nu = total_value(game);
    let mut p = allocation_problem(game, &nu);
    let eps = p.add_var("eps", false);
    p.objective = LinearFunctional::var(eps);
    // the empty matching
    p.add(Constraint::le(LinearFunctional::var(eps), Rational::zero()));

    let mut generated = Vec::new();
    let outcome = solve_with_generation(
        &p,
        |point| {
            let x = allocation_of(game, point);
            let best = max_weight_matching(game, &game.reduced_weights(&x));
            if best.value > -&point[eps] {
                let row = matching_row(game, &best.matching, eps);
                generated.push(best.matching);
                Ok(Some(row))
            } else {
                Ok(None)
            }
        },
        options.generation_limit,
    )?;
    if outcome.solution.status != LpStatus::Optimal {
        return Err(Error::invariant("leastcore LP is not optimal"));
    }
    let point = outcome.solution.point;
    Ok(LeastcoreResult {
        epsilon1: point[eps].clone(),
        witness: allocation_of(game, &point),
        generated_constraints: generated,
        total_value: nu,
    })
}

impl LeastcoreResult {
    pub fn to_json(&self, game: &GameInstance) -> Value {
        json!({
            "epsilon1": format_rational(&self.epsilon1),
            "core_empty": core_is_empty(self),
            "witness": self.witness.to_label_map(game),
            "total_value": format_rational(&self.total_value),
            "generated_constraints": self.generated_constraints.len(),
        })
    }
}

/// The core is empty iff the leastcore value is negative.
pub fn core_is_empty(result: &LeastcoreResult) -> bool {
    result.epsilon1.is_negative()
}

/// `P₁(ε)` over node variables `0..n`, listing one row per nonempty matching.
pub fn explicit_leastcore_constraints(
    game: &GameInstance,
    nu: &Rational,
    epsilon: &Rational,
    matchings: &[Matching],
) -> Vec<Constraint> {
    let mut rows = vec![Constraint::eq(LinearFunctional::sum_of(game.nodes()), nu.clone())];
    rows.extend(
        game.nodes()
            .map(|v| Constraint::ge(LinearFunctional::var(v), Rational::zero())),
    );
    rows.extend(
        matchings
            .iter()
            .filter(|m| !m.is_empty())
            .map(|m| Constraint::ge(matching_functional(game, m), m.weight(game) + epsilon)),
    );
    rows
}

/// All matchings `M` with `ex(x*, M) = ε₁`; for a universal `x*` these are
/// exactly the universal matchings.
pub fn universal_matchings(
    game: &GameInstance,
    x_star: &Allocation,
    epsilon1: &Rational,
    limit: usize,
) -> Result<Vec<Matching>> {
    Ok(enumerate_matchings(game, limit)?
        .into_iter()
        .filter(|m| &excess(game, x_star, m) == epsilon1)
        .collect())
}

#[derive(Clone, Debug)]
pub struct UniversalAllocation {
    pub allocation: Allocation,
    /// Listed when the game is within the enumeration bound.
    pub universal_matchings: Option<Vec<Matching>>,
    /// Affine hull of the explicit leastcore polytope (enumeration path only).
    pub hull: Option<AffineHull>,
}

/// A leastcore point whose tight matchings are exactly the universal ones.
///
/// Within the enumeration bound this is a relative-interior point of the
/// explicit leastcore polytope. Above it, a leastcore point is refined by
/// averaging with maximizers of the excess of each tight matching that is not
/// tight everywhere, which removes that matching from the tight set.
pub fn universal_allocation(
    game: &GameInstance,
    leastcore: &LeastcoreResult,
    options: &SolveOptions,
) -> Result<UniversalAllocation> {
    if game.edge_count() <= options.enumeration_limit {
        let matchings = enumerate_matchings(game, options.enumeration_limit)?;
        let rows = explicit_leastcore_constraints(game, &leastcore.total_value, &leastcore.epsilon1, &matchings);
        let hull = AffineHull::compute(game.node_count(), &rows)?;
        let allocation = Allocation::new(hull.point().to_vec());
        let universal = matchings
            .into_iter()
            .filter(|m| excess(game, &allocation, m) == leastcore.epsilon1)
            .collect();
        return Ok(UniversalAllocation {
            allocation,
            universal_matchings: Some(universal),
            hull: Some(hull),
        });
    }
    Ok(UniversalAllocation {
        allocation: refine_universal(game, leastcore, options)?,
        universal_matchings: None,
        hull: None,
    })
}

/// Maximizes `f` over the implicitly described `P₁(ε₁)`.
fn maximize_over_leastcore(
    game: &GameInstance,
    leastcore: &LeastcoreResult,
    f: LinearFunctional,
    options: &SolveOptions,
) -> Result<Vec<Rational>> {
    let mut p = allocation_problem(game, &leastcore.total_value);
    p.objective = f;
    let target = -&leastcore.epsilon1;
    let outcome = solve_with_generation(
        &p,
        |point| {
            let x = Allocation::new(point.to_vec());
            let best = max_weight_matching(game, &game.reduced_weights(&x));
            Ok((best.value > target).then(|| {
                Constraint::ge(
                    matching_functional(game, &best.matching),
                    best.matching.weight(game) + &leastcore.epsilon1,
                )
            }))
        },
        options.generation_limit,
    )?;
    if outcome.solution.status != LpStatus::Optimal {
        return Err(Error::invariant("excess maximization over the leastcore failed"));
    }
    Ok(outcome.solution.point)
}

fn refine_universal(game: &GameInstance, leastcore: &LeastcoreResult, options: &SolveOptions) -> Result<Allocation> {
    let half = Rational::new(1.into(), 2.into());
    let mut x = leastcore.witness.clone();
    let mut proven: BTreeSet<Matching> = BTreeSet::new();
    loop {
        let tight = optimal_matchings(game, &game.reduced_weights(&x), options.optimal_matching_cap)?;
        let Some(candidate) = tight.into_iter().find(|m| !proven.contains(m)) else {
            return Ok(x);
        };
        let f = matching_functional(game, &candidate);
        let best = maximize_over_leastcore(game, leastcore, f.clone(), options)?;
        if f.eval(&best) > candidate.weight(game) + &leastcore.epsilon1 {
            x = x.blend(&Allocation::new(best), &half);
        } else {
            proven.insert(candidate);
        }
    }
}

/// The optimal face of the matching polytope under `c = w - x*`, described by
/// an optimal laminar dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDescription {
    pub dual: MatchingDual,
    /// Nodes with positive node dual; covered by every optimal matching.
    pub positive_dual_nodes: Coalition,
    /// Support of the odd-set duals; every optimal matching is near-perfect on each.
    pub laminar: LaminarFamily,
    /// Edges with positive dual slack; no optimal matching uses them.
    pub slack_edges: Vec<EdgeId>,
}

pub fn build_face_description(
    game: &GameInstance,
    x_star: &Allocation,
    core_empty: bool,
    options: &SolveOptions,
) -> Result<FaceDescription> {
    let costs = game.reduced_weights(x_star);
    let dual = optimal_duals(game, &costs, options.odd_set_node_limit)?;
    let positive = dual.positive_nodes();
    if core_empty && !positive.is_empty() {
        return Err(Error::invariant(format!(
            "nodes {positive} have positive duals on an empty-core game; every node must be exposable"
        )));
    }
    let laminar = LaminarFamily::new(dual.support())?;
    let slack_edges = (0..game.edge_count())
        .filter(|&e| dual.edge_slack(game, &costs, e).is_positive())
        .collect();
    Ok(FaceDescription {
        dual,
        positive_dual_nodes: positive,
        laminar,
        slack_edges,
    })
}

/// Everything the compact nucleolus LPs are built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub epsilon1: Rational,
    pub total_value: Rational,
    pub x_star: Allocation,
    pub face: FaceDescription,
    /// Inclusion-wise maximal laminar sets, ascending by smallest node.
    pub maximal_sets: Vec<Coalition>,
    /// Lowest node of each maximal set.
    pub representatives: Vec<NodeId>,
    /// A universal matching covering exactly the maximal sets minus their representatives.
    pub reference_matching: Matching,
    /// Edges with at most one end in each maximal set.
    pub outside_edges: Vec<EdgeId>,
    /// Edges lying in some universal matching.
    pub universal_edges: Vec<EdgeId>,
    pub universal_matchings: Option<Vec<Matching>>,
}

fn edge_labels(game: &GameInstance, edges: &[EdgeId]) -> Vec<[String; 2]> {
    edges
        .iter()
        .map(|&e| {
            let edge = game.edge(e);
            [game.label(edge.u).to_string(), game.label(edge.v).to_string()]
        })
        .collect()
}

impl Decomposition {
    /// Index of the maximal set containing `node`, if any.
    pub fn set_of(&self, node: NodeId) -> Option<usize> {
        self.maximal_sets.iter().position(|s| s.contains(node))
    }

    /// Label-based dump; rationals as canonical `p/q` strings.
    pub fn to_json(&self, game: &GameInstance) -> Value {
        let laminar: Vec<Vec<String>> = self.face.laminar.sets.iter().map(|s| s.labels(game)).collect();
        let maximal: Vec<Vec<String>> = self.maximal_sets.iter().map(|s| s.labels(game)).collect();
        let representatives: Vec<&str> = self.representatives.iter().map(|&v| game.label(v)).collect();
        json!({
            "epsilon1": format_rational(&self.epsilon1),
            "x_star": self.x_star.to_label_map(game),
            "laminar": laminar,
            "maximal_sets": maximal,
            "representatives": representatives,
            "m_star": edge_labels(game, self.reference_matching.edges()),
            "e_plus": edge_labels(game, &self.outside_edges),
            "e_star": edge_labels(game, &self.universal_edges),
            "positive_dual_nodes": self.face.positive_dual_nodes.labels(game),
            "slack_edges": edge_labels(game, &self.face.slack_edges),
        })
    }
}

fn invariant(clause: &str) -> Error {
    Error::invariant(format!("decomposition: {clause}"))
}

pub fn build_decomposition(
    game: &GameInstance,
    leastcore: &LeastcoreResult,
    universal: &UniversalAllocation,
    face: FaceDescription,
    options: &SolveOptions,
) -> Result<Decomposition> {
    let x_star = universal.allocation.clone();
    let costs = game.reduced_weights(&x_star);
    let optimum = max_weight_matching(game, &costs).value;
    if optimum != -&leastcore.epsilon1 {
        return Err(invariant("x* is not in the leastcore (reduced optimum differs from -ε₁)"));
    }
    let maximal_sets = face.laminar.maximal_sets();
    let representatives: Vec<NodeId> = maximal_sets.iter().map(|s| s.nodes()[0]).collect();

    let exposures = options.execution.map(&representatives, |&v| {
        max_weight_matching_exposing(game, &costs, v)
    });
    let mut pieces = Vec::new();
    for (set, exposed) in maximal_sets.iter().zip(&exposures) {
        if exposed.value != optimum {
            return Err(invariant("no universal matching exposes a representative"));
        }
        pieces.extend(
            exposed
                .matching
                .edges()
                .iter()
                .copied()
                .filter(|&e| set.contains(game.edge(e).u) && set.contains(game.edge(e).v)),
        );
    }
    let reference_matching = Matching::new(game, pieces).map_err(|_| invariant("reference pieces overlap"))?;
    let expected_cover = Coalition::from_nodes(
        maximal_sets
            .iter()
            .zip(&representatives)
            .flat_map(|(s, &v)| s.nodes().iter().copied().filter(move |&u| u != v)),
    );
    if reference_matching.covered_nodes(game) != expected_cover {
        return Err(invariant("reference matching does not cover exactly the maximal sets minus representatives"));
    }
    if excess(game, &x_star, &reference_matching) != leastcore.epsilon1 {
        return Err(invariant("reference matching is not tight"));
    }

    let outside_edges: Vec<EdgeId> = (0..game.edge_count())
        .filter(|&e| {
            let edge = game.edge(e);
            !maximal_sets.iter().any(|s| s.contains(edge.u) && s.contains(edge.v))
        })
        .collect();
    let edge_ids: Vec<EdgeId> = (0..game.edge_count()).collect();
    let forced = options.execution.map(&edge_ids, |&e| {
        max_weight_matching_forcing_edge(game, &costs, e).value == optimum
    });
    let universal_edges: Vec<EdgeId> = edge_ids.into_iter().filter(|&e| forced[e]).collect();

    if let Some(list) = &universal.universal_matchings {
        let union: BTreeSet<EdgeId> = list.iter().flat_map(|m| m.edges().iter().copied()).collect();
        if union != universal_edges.iter().copied().collect() {
            return Err(invariant("forced-edge test disagrees with the union of universal matchings"));
        }
    }
    Ok(Decomposition {
        epsilon1: leastcore.epsilon1.clone(),
        total_value: leastcore.total_value.clone(),
        x_star,
        face,
        maximal_sets,
        representatives,
        reference_matching,
        outside_edges,
        universal_edges,
        universal_matchings: universal.universal_matchings.clone(),
    })
}

/// Leastcore, universal allocation, face and decomposition in one call.
/// Requires an empty core.
pub fn decompose(game: &GameInstance, options: &SolveOptions) -> Result<(LeastcoreResult, Decomposition)> {
    let leastcore = solve_leastcore(game, options)?;
    if !core_is_empty(&leastcore) {
        return Err(Error::invariant("decomposition requires an empty core"));
    }
    let universal = universal_allocation(game, &leastcore, options)?;
    let face = build_face_description(game, &universal.allocation, true, options)?;
    let decomposition = build_decomposition(game, &leastcore, &universal, face, options)?;
    Ok((leastcore, decomposition))
}

/// Whether `x` lies in `P₁(ε)`: checked by one maximum weight matching.
pub fn in_leastcore(game: &GameInstance, x: &Allocation, epsilon: &Rational) -> bool {
    x.is_nonnegative()
        && x.total() == total_value(game)
        && max_weight_matching(game, &game.reduced_weights(x)).value <= -epsilon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameFormat;
    use crate::rational::{int, ratio};

    fn load(text: &str) -> GameInstance {
        GameInstance::load(text.as_bytes(), GameFormat::Edgelist).unwrap()
    }

    fn five_cycle() -> GameInstance {
        load("5 5\n1 2 2\n2 3 1\n3 4 1\n4 5 1\n1 5 2\n")
    }

    fn triangle() -> GameInstance {
        load("3 3\n1 2 1\n2 3 1\n1 3 1\n")
    }

    fn two_triangles() -> GameInstance {
        load("6 6\n1 2 1\n2 3 1\n1 3 1\n4 5 1\n5 6 1\n4 6 1\n")
    }

    #[test]
    fn leastcore_values() {
        let o = SolveOptions::default();
        let r = solve_leastcore(&five_cycle(), &o).unwrap();
        assert_eq!(r.epsilon1, ratio(-2, 5));
        assert!(core_is_empty(&r));
        let k2 = solve_leastcore(&load("2 1\n1 2 1\n"), &o).unwrap();
        assert_eq!(k2.epsilon1, int(0));
        assert!(!core_is_empty(&k2));
        let t = solve_leastcore(&triangle(), &o).unwrap();
        assert_eq!(t.epsilon1, ratio(-1, 3));
        assert!(core_is_empty(&t));
    }

    #[test]
    fn five_cycle_universal_structure() {
        let g = five_cycle();
        let o = SolveOptions::default();
        let (lc, d) = decompose(&g, &o).unwrap();
        assert_eq!(lc.epsilon1, ratio(-2, 5));
        let universal = d.universal_matchings.clone().unwrap();
        assert_eq!(universal.len(), 5);
        assert!(universal.iter().all(|m| m.len() == 2));
        assert!(d.face.positive_dual_nodes.is_empty());
        assert_eq!(d.face.laminar.sets, vec![Coalition::from_nodes(0..5)]);
        assert!(d.face.slack_edges.is_empty());
        assert_eq!(d.representatives, vec![0]);
        assert!(d.outside_edges.is_empty());
        assert_eq!(d.universal_edges, vec![0, 1, 2, 3, 4]);
        let m23 = g.find_edge(1, 2).unwrap();
        let m45 = g.find_edge(3, 4).unwrap();
        assert_eq!(d.reference_matching, Matching::new(&g, [m23, m45]).unwrap());
    }

    #[test]
    fn triangle_structure() {
        let g = triangle();
        let (_, d) = decompose(&g, &SolveOptions::default()).unwrap();
        assert_eq!(d.x_star, Allocation::new(vec![ratio(1, 3); 3]));
        assert_eq!(d.universal_matchings.as_ref().unwrap().len(), 3);
        assert_eq!(d.face.laminar.sets, vec![Coalition::from_nodes(0..3)]);
        assert_eq!(d.reference_matching.endpoints(&g), vec![(1, 2)]);
        assert_eq!(d.universal_edges.len(), 3);
    }

    #[test]
    fn two_triangles_structure() {
        let g = two_triangles();
        let (lc, d) = decompose(&g, &SolveOptions::default()).unwrap();
        assert_eq!(lc.epsilon1, ratio(-2, 3));
        assert_eq!(d.maximal_sets, vec![Coalition::from_nodes(0..3), Coalition::from_nodes(3..6)]);
        assert_eq!(d.reference_matching.len(), 2);
        assert!(d.outside_edges.is_empty());
    }

    #[test]
    fn fallback_matches_relative_interior_tight_set() {
        let g = five_cycle();
        let o = SolveOptions::default();
        let lc = solve_leastcore(&g, &o).unwrap();
        let small = universal_allocation(&g, &lc, &o.with_enumeration_limit(0)).unwrap();
        let x = small.allocation;
        let tight = universal_matchings(&g, &x, &lc.epsilon1, 24).unwrap();
        assert_eq!(tight.len(), 5);
        assert!(in_leastcore(&g, &x, &lc.epsilon1));
    }
}
