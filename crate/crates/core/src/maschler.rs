//! Maschler's scheme: a chain of LPs that raises the worst excess level by
//! level, pinning every item whose value is constant on the optimal set, until
//! a single allocation remains.
//!
//! The empty-core path runs the chain over node and edge items derived from
//! the decomposition; the non-empty-core path uses singletons and edges.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{Allocation, Coalition, EdgeId, GameInstance, NodeId};
use crate::leastcore::{
    build_decomposition, build_face_description, core_is_empty, matching_functional,
    solve_leastcore, universal_allocation, Decomposition, LeastcoreResult,
};
use crate::lp::{is_functional_fixed, solve_lp, AffineHull, Constraint, LinearFunctional, LpProblem, LpStatus, Sense};
use crate::matching::total_value;
use crate::options::SolveOptions;
use crate::rational::{format_rational, Rational};

/// What an item's functional measures.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemKind {
    /// `x(v)`.
    Node(NodeId),
    /// `ex(x, e)` for an edge with at most one end in each maximal set.
    OutsideEdge(EdgeId),
    /// `-ex(x, e)` for an edge lying in some universal matching.
    UniversalEdge(EdgeId),
    /// `ex(x, e)` for any edge.
    Edge(EdgeId),
    /// `x(S) - ν(S)`.
    Coalition(Coalition),
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ItemKind::Node(v) => write!(f, "node {v}"),
            ItemKind::OutsideEdge(e) => write!(f, "outside edge {e}"),
            ItemKind::UniversalEdge(e) => write!(f, "universal edge {e}"),
            ItemKind::Edge(e) => write!(f, "edge {e}"),
            ItemKind::Coalition(s) => write!(f, "coalition {s}"),
        }
    }
}

/// A functional of the allocation bounded below by `ε + offset` while unfixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub kind: ItemKind,
    pub functional: LinearFunctional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Compact,
    BruteForce,
    NonemptyCore,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Compact => "compact",
            Method::BruteForce => "bruteforce",
            Method::NonemptyCore => "nonempty_core",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NucleolusResult {
    pub allocation: Allocation,
    pub rounds: usize,
    pub epsilons: Vec<Rational>,
    pub method: Method,
    /// Number of coordinates `x(v)` still free after each round.
    pub unfixed_coordinates: Vec<usize>,
    /// Dimension of the optimal set after each round.
    pub dimensions: Vec<usize>,
}

impl NucleolusResult {
    pub fn to_json(&self, game: &GameInstance) -> Value {
        json!({
            "allocation": self.allocation.to_label_map(game),
            "epsilons": self.epsilons.iter().map(format_rational).collect::<Vec<_>>(),
            "rounds": self.rounds,
            "method": self.method.name(),
        })
    }
}

/// The scheme after round `round`: the optimal set `P_j(ε_j)` and the items
/// pinned on it.
#[derive(Clone, Debug)]
pub struct MaschlerState {
    pub round: usize,
    pub epsilons: Vec<Rational>,
    /// `P_j(ε_j)` over the node variables.
    pub active_constraints: Vec<Constraint>,
    pub hull: AffineHull,
    /// Item index → pinned value.
    pub fixed_items: BTreeMap<usize, Rational>,
}

impl MaschlerState {
    pub fn unfixed_coordinates(&self, node_count: usize) -> usize {
        (0..node_count)
            .filter(|&v| self.hull.fixed_value(&LinearFunctional::var(v)).is_none())
            .count()
    }

    pub fn is_singleton(&self) -> bool {
        self.hull.dimension() == 0
    }
}

/// A chain of LPs over a fixed item family.
pub struct Scheme<'a> {
    pub node_count: usize,
    pub total_value: Rational,
    pub items: Vec<Item>,
    /// Unfixed items satisfy `functional ≥ ε + offset`.
    pub offset: Rational,
    pub options: &'a SolveOptions,
}

fn allocation_rows(node_count: usize, total: &Rational) -> Vec<Constraint> {
    let mut rows = vec![Constraint::eq(LinearFunctional::sum_of(0..node_count), total.clone())];
    rows.extend((0..node_count).map(|v| Constraint::ge(LinearFunctional::var(v), Rational::zero())));
    rows
}

impl Scheme<'_> {
    /// The state before any round: just `{x ≥ 0, x(V) = ν}`.
    pub fn initial_state(&self) -> Result<MaschlerState> {
        let rows = allocation_rows(self.node_count, &self.total_value);
        self.state_from(0, Vec::new(), rows)
    }

    /// Pins every item constant on the polytope `rows`.
    pub fn state_from(&self, round: usize, epsilons: Vec<Rational>, rows: Vec<Constraint>) -> Result<MaschlerState> {
        let hull = AffineHull::compute(self.node_count, &rows)?;
        let values = self
            .options
            .execution
            .map(&self.items, |item| hull.fixed_value(&item.functional));
        let fixed_items = values
            .into_iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .collect();
        Ok(MaschlerState {
            round,
            epsilons,
            active_constraints: rows,
            hull,
            fixed_items,
        })
    }

    /// Solves the next LP: maximize `ε` over the previous affine hull with every
    /// unfixed item at least `ε + offset`.
    pub fn advance_round(&self, state: &MaschlerState) -> Result<MaschlerState> {
        if state.is_singleton() {
            return Err(Error::invariant("advance_round called on a single point"));
        }
        let round = state.round + 1;
        if round > self.node_count {
            return Err(Error::invariant(format!("round {round} exceeds the node count")));
        }
        let mut p = LpProblem::new(Sense::Maximize);
        for v in 0..self.node_count {
            p.add_var(format!("x{v}"), true);
        }
        let eps = p.add_var("eps", false);
        p.objective = LinearFunctional::var(eps);
        p.add(Constraint::eq(LinearFunctional::sum_of(0..self.node_count), self.total_value.clone()));
        for c in state.hull.equations() {
            p.add(c);
        }
        let unfixed: Vec<usize> = (0..self.items.len())
            .filter(|i| !state.fixed_items.contains_key(i))
            .collect();
        for &i in &unfixed {
            let f = self.items[i].functional.clone().with_term(eps, -Rational::one());
            p.add(Constraint::ge(f, self.offset.clone()));
        }
        let solution = solve_lp(&p);
        if solution.status != LpStatus::Optimal {
            return Err(Error::invariant(format!("round {round} LP is {:?}", solution.status)));
        }
        let epsilon = solution.point[eps].clone();
        if let Some(last) = state.epsilons.last() {
            if &epsilon <= last {
                return Err(Error::invariant(format!("round {round} did not raise the excess level")));
            }
        }

        let mut rows = allocation_rows(self.node_count, &self.total_value);
        rows.extend(state.hull.equations());
        let floor = &epsilon + &self.offset;
        rows.extend(
            unfixed
                .iter()
                .map(|&i| Constraint::ge(self.items[i].functional.clone(), floor.clone())),
        );
        let mut epsilons = state.epsilons.clone();
        epsilons.push(epsilon);
        let next = self.state_from(round, epsilons, rows)?;
        for (i, value) in &state.fixed_items {
            if next.fixed_items.get(i) != Some(value) {
                return Err(Error::invariant(format!("item {} lost its pinned value", self.items[*i].kind)));
            }
        }
        Ok(next)
    }

    /// Advances from `state` until a single point remains.
    pub fn run(&self, mut state: MaschlerState, method: Method) -> Result<NucleolusResult> {
        let mut unfixed = Vec::new();
        let mut dimensions = Vec::new();
        if state.round > 0 {
            unfixed.push(state.unfixed_coordinates(self.node_count));
            dimensions.push(state.hull.dimension());
        }
        while !state.is_singleton() {
            state = self.advance_round(&state)?;
            unfixed.push(state.unfixed_coordinates(self.node_count));
            dimensions.push(state.hull.dimension());
        }
        Ok(NucleolusResult {
            allocation: Allocation::new(state.hull.point().to_vec()),
            rounds: state.round,
            epsilons: state.epsilons,
            method,
            unfixed_coordinates: unfixed,
            dimensions,
        })
    }
}

/// Re-checks every pinned item of `state` with a max/min LP pair.
pub fn verify_fixed_items(scheme: &Scheme<'_>, state: &MaschlerState) -> Result<bool> {
    let checks = scheme.options.execution.map_range(scheme.items.len(), |i| {
        is_functional_fixed(scheme.node_count, &state.active_constraints, &scheme.items[i].functional)
    });
    for (i, check) in checks.into_iter().enumerate() {
        if check? != state.fixed_items.get(&i).cloned() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn edge_excess(game: &GameInstance, e: EdgeId) -> LinearFunctional {
    let edge = game.edge(e);
    LinearFunctional::sum_of([edge.u, edge.v]).with_constant(-&edge.weight)
}

/// Items of the compact chain: outside edges, then nodes, then universal
/// edges, each ascending.
pub fn compact_items(game: &GameInstance, dec: &Decomposition) -> Vec<Item> {
    let mut items: Vec<Item> = dec
        .outside_edges
        .iter()
        .map(|&e| Item {
            kind: ItemKind::OutsideEdge(e),
            functional: edge_excess(game, e),
        })
        .collect();
    items.extend(game.nodes().map(|v| Item {
        kind: ItemKind::Node(v),
        functional: LinearFunctional::var(v),
    }));
    items.extend(dec.universal_edges.iter().map(|&e| Item {
        kind: ItemKind::UniversalEdge(e),
        functional: -&edge_excess(game, e),
    }));
    items
}

/// The compact leastcore LP over node variables plus a free `eps` (last id).
pub fn compact_p1_problem(game: &GameInstance, dec: &Decomposition) -> LpProblem {
    let mut p = LpProblem::new(Sense::Maximize);
    for v in game.nodes() {
        p.add_var(format!("x[{}]", game.label(v)), true);
    }
    let eps = p.add_var("eps", false);
    p.objective = LinearFunctional::var(eps);
    for (set, &rep) in dec.maximal_sets.iter().zip(&dec.representatives) {
        for &u in set.nodes().iter().filter(|&&u| u != rep) {
            let f = LinearFunctional::var(u).with_term(rep, -Rational::one());
            p.add(Constraint::eq(f, dec.x_star.value(u) - dec.x_star.value(rep)));
        }
    }
    for &e in &dec.universal_edges {
        p.add(Constraint::le(edge_excess(game, e), Rational::zero()));
    }
    for &e in &dec.outside_edges {
        p.add(Constraint::ge(edge_excess(game, e), Rational::zero()));
    }
    let reference = matching_functional(game, &dec.reference_matching).with_term(eps, -Rational::one());
    p.add(Constraint::eq(reference, dec.reference_matching.weight(game)));
    p.add(Constraint::eq(LinearFunctional::sum_of(game.nodes()), dec.total_value.clone()));
    p
}

/// Solves the compact leastcore LP and checks its value against `ε₁`.
pub fn compact_p1(game: &GameInstance, dec: &Decomposition) -> Result<(LpProblem, Rational)> {
    let p = compact_p1_problem(game, dec);
    let solution = solve_lp(&p);
    if solution.status != LpStatus::Optimal {
        return Err(Error::invariant(format!("compact leastcore LP is {:?}", solution.status)));
    }
    let value = solution.value;
    if value != dec.epsilon1 {
        return Err(Error::invariant(format!(
            "compact leastcore value {value} differs from the leastcore value {}",
            dec.epsilon1
        )));
    }
    Ok((p, value))
}

/// The chain over the compact item family, starting from the compact
/// leastcore polytope.
pub fn run_compact_from(game: &GameInstance, dec: &Decomposition, options: &SolveOptions) -> Result<NucleolusResult> {
    let (p, epsilon1) = compact_p1(game, dec)?;
    let eps = game.node_count();
    let rows: Vec<Constraint> = p
        .all_constraints()
        .iter()
        .map(|c| c.substitute(eps, &epsilon1))
        .collect();
    let scheme = Scheme {
        node_count: game.node_count(),
        total_value: dec.total_value.clone(),
        items: compact_items(game, dec),
        offset: -&epsilon1,
        options,
    };
    let state = scheme.state_from(1, vec![epsilon1], rows)?;
    scheme.run(state, Method::Compact)
}

pub fn run_compact(game: &GameInstance, options: &SolveOptions) -> Result<NucleolusResult> {
    let leastcore = solve_leastcore(game, options)?;
    if !core_is_empty(&leastcore) {
        return Err(Error::invariant("the compact chain requires an empty core"));
    }
    let dec = decomposition_for(game, &leastcore, options)?;
    run_compact_from(game, &dec, options)
}

/// Universal allocation, face description and decomposition for an empty-core game.
pub fn decomposition_for(
    game: &GameInstance,
    leastcore: &LeastcoreResult,
    options: &SolveOptions,
) -> Result<Decomposition> {
    let universal = universal_allocation(game, leastcore, options)?;
    let face = build_face_description(game, &universal.allocation, true, options)?;
    build_decomposition(game, leastcore, &universal, face, options)
}

/// Singleton and edge items; an item spanning every node is dropped since
/// its excess is zero by efficiency.
pub fn nonempty_core_items(game: &GameInstance) -> Vec<Item> {
    let n = game.node_count();
    let mut items: Vec<Item> = game
        .nodes()
        .filter(|_| n > 1)
        .map(|v| Item {
            kind: ItemKind::Node(v),
            functional: LinearFunctional::var(v),
        })
        .collect();
    items.extend((0..game.edge_count()).filter(|_| n > 2).map(|e| Item {
        kind: ItemKind::Edge(e),
        functional: edge_excess(game, e),
    }));
    items
}

pub fn run_nonempty_core(game: &GameInstance, options: &SolveOptions) -> Result<NucleolusResult> {
    let scheme = Scheme {
        node_count: game.node_count(),
        total_value: total_value(game),
        items: nonempty_core_items(game),
        offset: Rational::zero(),
        options,
    };
    scheme.run(scheme.initial_state()?, Method::NonemptyCore)
}

/// The nucleolus, dispatching on whether the core is empty.
pub fn nucleolus(game: &GameInstance, options: &SolveOptions) -> Result<NucleolusResult> {
    let leastcore = solve_leastcore(game, options)?;
    if core_is_empty(&leastcore) {
        let dec = decomposition_for(game, &leastcore, options)?;
        run_compact_from(game, &dec, options)
    } else {
        run_nonempty_core(game, options)
    }
}
