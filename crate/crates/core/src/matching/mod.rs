//! Maximum weight matchings under arbitrary (possibly negative) edge costs,
//! graph-surgery variants, optimal duals, and matching enumeration.
//!
//! Costs are indexed by edge id. Edges with nonpositive cost never improve a
//! matching, so both solvers only look at positive-cost edges and the empty
//! matching is always a candidate.

mod blossom;
mod dual;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{Coalition, EdgeId, GameInstance, Matching, NodeId};
use crate::rational::Rational;

pub use dual::{optimal_duals, uncross, LaminarFamily, MatchingDual, DEFAULT_ODD_SET_NODE_LIMIT};

/// Positive-cost edge count up to which the exhaustive solver is used.
pub const ENUMERATIVE_EDGE_LIMIT: usize = 16;
/// Default bound on `|E|` for [`enumerate_matchings`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingResult {
    pub matching: Matching,
    pub value: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Solver {
    Auto,
    Blossom,
    Enumerative,
}

fn candidate_edges(game: &GameInstance, costs: &[Rational], allowed: &[bool]) -> Vec<EdgeId> {
    game.edges()
        .iter()
        .enumerate()
        .filter(|(id, e)| allowed[e.u] && allowed[e.v] && costs[*id].is_positive())
        .map(|(id, _)| id)
        .collect()
}

fn best_on(game: &GameInstance, costs: &[Rational], allowed: &[bool], solver: Solver) -> MatchingResult {
    let candidates = candidate_edges(game, costs, allowed);
    let use_blossom = match solver {
        Solver::Auto => candidates.len() > ENUMERATIVE_EDGE_LIMIT,
        Solver::Blossom => true,
        Solver::Enumerative => false,
    };
    let mut ids = if use_blossom {
        blossom_on(game, costs, &candidates)
    } else {
        branch_and_bound(game, costs, &candidates)
    };
    ids.sort_unstable();
    let matching = Matching::from_sorted_unchecked(ids);
    let value = matching.cost(costs);
    MatchingResult { matching, value }
}

fn blossom_on(game: &GameInstance, costs: &[Rational], candidates: &[EdgeId]) -> Vec<EdgeId> {
    let edges: Vec<(usize, usize, Rational)> = candidates
        .iter()
        .map(|&id| {
            let e = game.edge(id);
            (e.u, e.v, costs[id].clone())
        })
        .collect();
    let mates = blossom::max_weight_mates(game.node_count(), &edges);
    candidates
        .iter()
        .filter(|&&id| {
            let e = game.edge(id);
            mates[e.u] == Some(e.v)
        })
        .copied()
        .collect()
}

/// Exhaustive include/exclude search with a sum-of-remaining-costs bound.
fn branch_and_bound(game: &GameInstance, costs: &[Rational], candidates: &[EdgeId]) -> Vec<EdgeId> {
    struct Search<'a> {
        game: &'a GameInstance,
        costs: &'a [Rational],
        edges: &'a [EdgeId],
        suffix: Vec<Rational>,
        used: Vec<bool>,
        chosen: Vec<EdgeId>,
        best: Vec<EdgeId>,
        best_value: Rational,
    }

    impl Search<'_> {
        fn go(&mut self, index: usize, value: Rational) {
            if value > self.best_value {
                self.best_value = value.clone();
                self.best = self.chosen.clone();
            }
            if index == self.edges.len() || &value + &self.suffix[index] <= self.best_value {
                return;
            }
            let id = self.edges[index];
            let e = self.game.edge(id);
            if !self.used[e.u] && !self.used[e.v] {
                self.used[e.u] = true;
                self.used[e.v] = true;
                self.chosen.push(id);
                self.go(index + 1, &value + &self.costs[id]);
                self.chosen.pop();
                self.used[e.u] = false;
                self.used[e.v] = false;
            }
            self.go(index + 1, value);
        }
    }

    let mut suffix = vec![Rational::zero(); candidates.len() + 1];
    for i in (0..candidates.len()).rev() {
        suffix[i] = &suffix[i + 1] + &costs[candidates[i]];
    }
    let mut search = Search {
        game,
        costs,
        edges: candidates,
        suffix,
        used: vec![false; game.node_count()],
        chosen: Vec::new(),
        best: Vec::new(),
        best_value: Rational::zero(),
    };
    search.go(0, Rational::zero());
    search.best
}

fn everyone(game: &GameInstance) -> Vec<bool> {
    vec![true; game.node_count()]
}

/// Maximum `c(M)` over all matchings `M` (the empty matching included).
pub fn max_weight_matching(game: &GameInstance, costs: &[Rational]) -> MatchingResult {
    best_on(game, costs, &everyone(game), Solver::Auto)
}

/// [`max_weight_matching`] forced through the blossom algorithm.
pub fn max_weight_matching_blossom(game: &GameInstance, costs: &[Rational]) -> MatchingResult {
    best_on(game, costs, &everyone(game), Solver::Blossom)
}

/// [`max_weight_matching`] forced through exhaustive search.
pub fn max_weight_matching_enumerative(game: &GameInstance, costs: &[Rational]) -> MatchingResult {
    best_on(game, costs, &everyone(game), Solver::Enumerative)
}

/// Best matching inside `G[nodes]`.
pub fn max_weight_matching_within(game: &GameInstance, costs: &[Rational], nodes: &Coalition) -> MatchingResult {
    let mut allowed = vec![false; game.node_count()];
    for &v in nodes.nodes() {
        allowed[v] = true;
    }
    best_on(game, costs, &allowed, Solver::Auto)
}

/// `ν(S)`: maximum weight of a matching inside `G[S]`.
pub fn coalition_value(game: &GameInstance, coalition: &Coalition) -> Rational {
    max_weight_matching_within(game, &game.weights(), coalition).value
}

/// `ν(V)`.
pub fn total_value(game: &GameInstance) -> Rational {
    max_weight_matching(game, &game.weights()).value
}

/// Best matching containing edge `edge`: `c(edge)` plus the optimum of the
/// graph with both endpoints deleted.
pub fn max_weight_matching_forcing_edge(game: &GameInstance, costs: &[Rational], edge: EdgeId) -> MatchingResult {
    let e = game.edge(edge);
    let mut allowed = everyone(game);
    allowed[e.u] = false;
    allowed[e.v] = false;
    let rest = best_on(game, costs, &allowed, Solver::Auto);
    let mut ids = rest.matching.edges().to_vec();
    ids.push(edge);
    ids.sort_unstable();
    MatchingResult {
        matching: Matching::from_sorted_unchecked(ids),
        value: rest.value + &costs[edge],
    }
}

/// Best matching leaving `node` exposed: the optimum of `G - node`.
pub fn max_weight_matching_exposing(game: &GameInstance, costs: &[Rational], node: NodeId) -> MatchingResult {
    let mut allowed = everyone(game);
    allowed[node] = false;
    best_on(game, costs, &allowed, Solver::Auto)
}

/// Every matching of the game, the empty one included, each exactly once.
pub fn enumerate_matchings(game: &GameInstance, limit: usize) -> Result<Vec<Matching>> {
    if game.edge_count() > limit {
        return Err(Error::BoundExceeded {
            what: "matching enumeration (edges)",
            size: game.edge_count(),
            limit,
        });
    }
    fn go(game: &GameInstance, index: usize, used: &mut [bool], chosen: &mut Vec<EdgeId>, out: &mut Vec<Matching>) {
        if index == game.edge_count() {
            out.push(Matching::from_sorted_unchecked(chosen.clone()));
            return;
        }
        go(game, index + 1, used, chosen, out);
        let e = game.edge(index);
        if !used[e.u] && !used[e.v] {
            used[e.u] = true;
            used[e.v] = true;
            chosen.push(index);
            go(game, index + 1, used, chosen, out);
            chosen.pop();
            used[e.u] = false;
            used[e.v] = false;
        }
    }
    let mut out = Vec::new();
    go(game, 0, &mut vec![false; game.node_count()], &mut Vec::new(), &mut out);
    out.sort();
    Ok(out)
}

/// All matchings attaining the optimum of `costs`, found by branching on the
/// lowest undecided node and pruning with exact optima of the remaining graph.
pub fn optimal_matchings(game: &GameInstance, costs: &[Rational], cap: usize) -> Result<Vec<Matching>> {
    let target = max_weight_matching(game, costs).value;
    let mut out = Vec::new();
    let mut allowed = everyone(game);
    let mut chosen = Vec::new();
    optimal_rec(game, costs, &target, Rational::zero(), &mut allowed, &mut chosen, &mut out, cap)?;
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn optimal_rec(
    game: &GameInstance,
    costs: &[Rational],
    target: &Rational,
    value: Rational,
    allowed: &mut Vec<bool>,
    chosen: &mut Vec<EdgeId>,
    out: &mut Vec<Matching>,
    cap: usize,
) -> Result<()> {
    let rest = best_on(game, costs, allowed, Solver::Auto).value;
    if &(&value + &rest) < target {
        return Ok(());
    }
    let next = (0..game.node_count()).find(|&v| {
        allowed[v]
            && game
                .edges()
                .iter()
                .any(|e| e.touches(v) && allowed[e.other(v)])
    });
    let Some(v) = next else {
        if &value == target {
            if out.len() == cap {
                return Err(Error::BoundExceeded {
                    what: "optimal matching enumeration",
                    size: cap + 1,
                    limit: cap,
                });
            }
            let mut ids = chosen.clone();
            ids.sort_unstable();
            out.push(Matching::from_sorted_unchecked(ids));
        }
        return Ok(());
    };
    allowed[v] = false;
    optimal_rec(game, costs, target, value.clone(), allowed, chosen, out, cap)?;
    for (id, e) in game.edges().iter().enumerate() {
        if e.touches(v) && allowed[e.other(v)] {
            let u = e.other(v);
            allowed[u] = false;
            chosen.push(id);
            optimal_rec(game, costs, target, &value + &costs[id], allowed, chosen, out, cap)?;
            chosen.pop();
            allowed[u] = true;
        }
    }
    allowed[v] = true;
    Ok(())
}
