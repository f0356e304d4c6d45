//! Ground truth by exhaustive enumeration: coalition values, the
//! coalition-level Maschler scheme, sorted excess vectors, prekernel checks,
//! and the cardinality properties of universal matchings. Only for small
//! games; everything here is exponential in the node count.

use std::cmp::Ordering;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{excess, Allocation, Coalition, GameInstance, Matching};
use crate::leastcore::Decomposition;
use crate::lp::{solve_lp, Constraint, LinearFunctional, LpProblem, LpStatus, Sense};
use crate::maschler::{Item, ItemKind, Method, NucleolusResult, Scheme};
use crate::matching::{enumerate_matchings, LaminarFamily};
use crate::options::SolveOptions;
use crate::rational::{int, Rational};

/// Largest game the coalition-level routines accept.
pub const ORACLE_NODE_LIMIT: usize = 12;

/// Edge bound for the restricted cardinality check.
pub const CARDINALITY_EDGE_LIMIT: usize = 16;

fn check_size(game: &GameInstance) -> Result<()> {
    if game.node_count() > ORACLE_NODE_LIMIT {
        return Err(Error::BoundExceeded {
            what: "oracle node count",
            size: game.node_count(),
            limit: ORACLE_NODE_LIMIT,
        });
    }
    Ok(())
}

/// `ν(S)` for every coalition, indexed by node bitmask.
#[derive(Clone, Debug)]
pub struct CoalitionTable {
    node_count: usize,
    values: Vec<Rational>,
}

impl CoalitionTable {
    /// Dynamic program over masks: the lowest node of `S` is either left
    /// unmatched or matched to a neighbour inside `S`.
    pub fn new(game: &GameInstance) -> Result<Self> {
        check_size(game)?;
        let n = game.node_count();
        let mut neighbours: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
        for e in game.edges() {
            neighbours[e.u].push((e.v, e.weight.clone()));
            neighbours[e.v].push((e.u, e.weight.clone()));
        }
        let mut values = vec![Rational::zero(); 1 << n];
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << low);
            let mut best = values[rest].clone();
            for (other, w) in &neighbours[low] {
                if rest >> other & 1 == 1 {
                    let candidate = w + &values[rest & !(1 << other)];
                    if candidate > best {
                        best = candidate;
                    }
                }
            }
            values[mask] = best;
        }
        Ok(CoalitionTable { node_count: n, values })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn value(&self, mask: usize) -> &Rational {
        &self.values[mask]
    }

    pub fn total_value(&self) -> &Rational {
        &self.values[(1 << self.node_count) - 1]
    }

    /// Masks of all proper nonempty coalitions, ascending.
    pub fn proper_masks(&self) -> std::ops::Range<usize> {
        1..(1usize << self.node_count).saturating_sub(1).max(1)
    }

    pub fn excess(&self, x: &Allocation, mask: usize) -> Rational {
        mask_sum(x, mask) - &self.values[mask]
    }
}

fn mask_sum(x: &Allocation, mask: usize) -> Rational {
    (0..x.len())
        .filter(|v| mask >> v & 1 == 1)
        .fold(Rational::zero(), |acc, v| acc + x.value(v))
}

fn mask_functional(mask: usize, n: usize) -> LinearFunctional {
    LinearFunctional::sum_of((0..n).filter(|v| mask >> v & 1 == 1))
}

/// The nucleolus by Maschler's scheme over every proper nonempty coalition.
pub fn brute_nucleolus(game: &GameInstance, options: &SolveOptions) -> Result<NucleolusResult> {
    let table = CoalitionTable::new(game)?;
    brute_nucleolus_with(&table, options)
}

pub fn brute_nucleolus_with(table: &CoalitionTable, options: &SolveOptions) -> Result<NucleolusResult> {
    let n = table.node_count();
    let items = table
        .proper_masks()
        .map(|mask| Item {
            kind: ItemKind::Coalition(Coalition::from_mask(mask as u64)),
            functional: mask_functional(mask, n).with_constant(-table.value(mask)),
        })
        .collect();
    let scheme = Scheme {
        node_count: n,
        total_value: table.total_value().clone(),
        items,
        offset: Rational::zero(),
        options,
    };
    scheme.run(scheme.initial_state()?, Method::BruteForce)
}

/// The excesses `x(S) - ν(S)` of all proper nonempty coalitions, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaVector {
    pub sorted_excesses: Vec<Rational>,
}

impl ThetaVector {
    pub fn new(table: &CoalitionTable, x: &Allocation) -> Self {
        let mut sorted_excesses: Vec<Rational> = table.proper_masks().map(|m| table.excess(x, m)).collect();
        sorted_excesses.sort();
        ThetaVector { sorted_excesses }
    }
}

impl PartialOrd for ThetaVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ThetaVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sorted_excesses.cmp(&other.sorted_excesses)
    }
}

/// Lexicographic comparison of sorted excess vectors; `Greater` means `x`
/// is preferred by the nucleolus.
pub fn theta_compare(table: &CoalitionTable, x: &Allocation, y: &Allocation) -> Ordering {
    ThetaVector::new(table, x).cmp(&ThetaVector::new(table, y))
}

/// Whether every pair of players has equal maximum surplus against each other,
/// where the surplus of `i` over `j` is `max ν(S) - x(S)` over coalitions
/// containing `i` but not `j`.
pub fn prekernel_check(table: &CoalitionTable, x: &Allocation) -> bool {
    let n = table.node_count();
    let mut surplus = vec![vec![None::<Rational>; n]; n];
    for mask in table.proper_masks() {
        let s = -table.excess(x, mask);
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for j in (0..n).filter(|j| mask >> j & 1 == 0) {
                let slot = &mut surplus[i][j];
                if slot.as_ref().is_none_or(|best| &s > best) {
                    *slot = Some(s.clone());
                }
            }
        }
    }
    (0..n).all(|i| (0..i).all(|j| surplus[i][j] == surplus[j][i]))
}

/// Seeded Erdős–Rényi game: each pair is an edge with probability 1/2 and
/// weights are uniform integers in `1..=10`.
pub fn random_game(seed: u64, node_count: usize) -> GameInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_game_with(&mut rng, node_count)
}

pub fn random_game_with(rng: &mut impl Rng, node_count: usize) -> GameInstance {
    let mut edges = Vec::new();
    for u in 0..node_count {
        for v in u + 1..node_count {
            if rng.gen_bool(0.5) {
                edges.push((u, v, int(rng.gen_range(1..=10))));
            }
        }
    }
    GameInstance::with_numbered_nodes(node_count, edges).expect("generated edges are valid")
}

/// A random nonnegative allocation summing to `total`.
pub fn random_allocation(rng: &mut impl Rng, node_count: usize, total: &Rational) -> Allocation {
    let shares: Vec<i64> = (0..node_count).map(|_| rng.gen_range(0..=100)).collect();
    let sum: i64 = shares.iter().sum();
    if sum == 0 {
        let each = total / int(node_count as i64);
        return Allocation::new(vec![each; node_count]);
    }
    Allocation::new(shares.iter().map(|&s| total * int(s) / int(sum)).collect())
}

/// Whether some `M' ⊆ M*` has the same number of edges as `matching` inside
/// every maximal set and excess at most that of `matching`.
pub fn verify_cardinality_lemma(game: &GameInstance, dec: &Decomposition, x: &Allocation, matching: &Matching) -> bool {
    let counts: Vec<usize> = dec
        .maximal_sets
        .iter()
        .map(|s| matching.count_inside(game, s))
        .collect();
    let target = excess(game, x, matching);
    let reference = dec.reference_matching.edges();
    (0usize..1 << reference.len()).any(|mask| {
        let chosen: Vec<_> = (0..reference.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| reference[k])
            .collect();
        let sub = Matching::from_sorted_unchecked(chosen);
        dec.maximal_sets
            .iter()
            .zip(&counts)
            .all(|(s, &count)| sub.count_inside(game, s) == count)
            && excess(game, x, &sub) <= target
    })
}

/// Matchings lying inside the union of the maximal sets, the ones the
/// cardinality lemma speaks about.
pub fn eligible_matchings(game: &GameInstance, dec: &Decomposition, limit: usize) -> Result<Vec<Matching>> {
    Ok(enumerate_matchings(game, limit)?
        .into_iter()
        .filter(|m| {
            m.edges().iter().all(|&e| {
                let edge = game.edge(e);
                dec.maximal_sets.iter().any(|s| s.contains(edge.u) && s.contains(edge.v))
            })
        })
        .collect())
}

/// Checks, for costs `costs` and size `t`, that the LP over the matching
/// polytope cut by `x(E) = t` attains the best `t`-edge matching value, and,
/// when the LP dual has zero node part and laminar odd-set support, that
/// some edge of a best `t`-edge matching leaves a best `(t-1)`-edge matching.
/// Without any `t`-edge matching the LP must be infeasible.
pub fn verify_restricted_cardinality_polytope(game: &GameInstance, costs: &[Rational], t: usize) -> Result<bool> {
    if game.edge_count() > CARDINALITY_EDGE_LIMIT {
        return Err(Error::BoundExceeded {
            what: "edge count",
            size: game.edge_count(),
            limit: CARDINALITY_EDGE_LIMIT,
        });
    }
    check_size(game)?;
    let matchings = enumerate_matchings(game, CARDINALITY_EDGE_LIMIT)?;
    let best_of = |size: usize| {
        matchings
            .iter()
            .filter(|m| m.len() == size)
            .max_by(|a, b| a.cost(costs).cmp(&b.cost(costs)))
    };
    let best = best_of(t);
    if t == 0 {
        return Ok(best.is_some_and(|m| m.cost(costs).is_zero()));
    }

    let n = game.node_count();
    let mut p = LpProblem::new(Sense::Maximize);
    for e in 0..game.edge_count() {
        p.add_var(format!("e{e}"), true);
    }
    let mut objective = LinearFunctional::zero();
    for (e, c) in costs.iter().enumerate() {
        objective.add_term(e, c);
    }
    p.objective = objective;
    for v in game.nodes() {
        let incident = (0..game.edge_count()).filter(|&e| game.edge(e).touches(v));
        p.add(Constraint::le(LinearFunctional::sum_of(incident), int(1)));
    }
    let mut odd_sets = Vec::new();
    for mask in 1u64..1 << n {
        let size = mask.count_ones() as usize;
        if size >= 3 && size % 2 == 1 {
            let set = Coalition::from_mask(mask);
            let inside = game.induced_edges(&set);
            p.add(Constraint::le(LinearFunctional::sum_of(inside), int((size as i64 - 1) / 2)));
            odd_sets.push(set);
        }
    }
    p.add(Constraint::eq(LinearFunctional::sum_of(0..game.edge_count()), int(t as i64)));
    let solution = solve_lp(&p);
    let Some(best) = best else {
        // no matching has t edges, so the cut polytope must be empty
        return Ok(solution.status == LpStatus::Infeasible);
    };
    if solution.status != LpStatus::Optimal || solution.value != best.cost(costs) {
        return Ok(false);
    }
    if t < 2 {
        return Ok(true);
    }

    let node_duals_vanish = solution.duals[..n].iter().all(Zero::is_zero);
    let support: Vec<Coalition> = odd_sets
        .iter()
        .zip(&solution.duals[n..n + odd_sets.len()])
        .filter(|(_, d)| !d.is_zero())
        .map(|(s, _)| s.clone())
        .collect();
    if !node_duals_vanish || LaminarFamily::new(support).is_err() {
        return Ok(true);
    }
    let next_best = best_of(t - 1).map(|m| m.cost(costs));
    Ok(best.edges().iter().any(|&e| {
        let rest = Matching::from_sorted_unchecked(best.edges().iter().copied().filter(|&f| f != e).collect());
        Some(rest.cost(costs)) == next_best
    }))
}
