//! Game instances, matchings, coalitions and allocations.
//!
//! A game is an undirected graph with nonnegative rational edge weights.
//! Nodes are dense 0-based ids; the user-facing labels are kept separately
//! and only used for I/O.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, sum, Rational};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: Rational,
}

impl Edge {
    pub fn touches(&self, node: NodeId) -> bool {
        self.u == node || self.v == node
    }

    pub fn other(&self, node: NodeId) -> NodeId {
        if self.u == node {
            self.v
        } else {
            self.u
        }
    }
}

/// Input encodings accepted by [`GameInstance::load`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameFormat {
    Json,
    Edgelist,
}

/// The game `(G, w)`: a simple undirected graph with nonnegative weights.
///
/// Edges are stored canonically (`u < v`, sorted lexicographically), so an
/// edge id is stable for a given graph regardless of input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameInstance {
    labels: Vec<String>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<(NodeId, NodeId), EdgeId>,
}

impl GameInstance {
    pub fn new(labels: Vec<String>, edges: Vec<(NodeId, NodeId, Rational)>) -> Result<Self> {
        let n = labels.len();
        let mut seen = BTreeSet::new();
        let mut canonical = Vec::with_capacity(edges.len());
        for (a, b, weight) in edges {
            for index in [a, b] {
                if index >= n {
                    return Err(Error::NodeOutOfRange { index, count: n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(labels[a].clone()));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if weight.is_negative() {
                return Err(Error::NegativeWeight {
                    u: labels[u].clone(),
                    v: labels[v].clone(),
                    weight: format_rational(&weight),
                });
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge {
                    u: labels[u].clone(),
                    v: labels[v].clone(),
                });
            }
            canonical.push(Edge { u, v, weight });
        }
        canonical.sort_by_key(|e| (e.u, e.v));
        let edge_index = canonical
            .iter()
            .enumerate()
            .map(|(id, e)| ((e.u, e.v), id))
            .collect();
        Ok(GameInstance {
            labels,
            edges: canonical,
            edge_index,
        })
    }

    /// A game on nodes labelled `"1"..="n"` from 0-based edge triples.
    pub fn with_numbered_nodes(n: usize, edges: Vec<(NodeId, NodeId, Rational)>) -> Result<Self> {
        let labels = (1..=n).map(|i| i.to_string()).collect();
        GameInstance::new(labels, edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.labels.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn find_edge(&self, a: NodeId, b: NodeId) -> Option<EdgeId> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edge_index.get(&key).copied()
    }

    pub fn weights(&self) -> Vec<Rational> {
        self.edges.iter().map(|e| e.weight.clone()).collect()
    }

    /// Edge ids with both endpoints in `coalition`.
    pub fn induced_edges(&self, coalition: &Coalition) -> Vec<EdgeId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| coalition.contains(e.u) && coalition.contains(e.v))
            .map(|(id, _)| id)
            .collect()
    }

    /// Reduced weights `c(uv) = w(uv) - x(u) - x(v)`.
    pub fn reduced_weights(&self, x: &Allocation) -> Vec<Rational> {
        self.edges
            .iter()
            .map(|e| &e.weight - x.value(e.u) - x.value(e.v))
            .collect()
    }

    pub fn load(input: &[u8], format: GameFormat) -> Result<Self> {
        let text = std::str::from_utf8(input).map_err(|_| Error::parse(0, "input is not UTF-8"))?;
        match format {
            GameFormat::Json => parse_json(text),
            GameFormat::Edgelist => parse_edgelist(text),
        }
    }

    /// JSON encoding in the same schema [`GameInstance::load`] reads.
    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| json!({"u": e.u, "v": e.v, "w": format_rational(&e.weight)}))
            .collect();
        json!({"nodes": self.labels, "edges": edges})
    }

    /// Edgelist encoding (1-based node numbers; labels are not preserved).
    pub fn to_edgelist(&self) -> String {
        let mut out = format!("{} {}\n", self.node_count(), self.edge_count());
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.u + 1, e.v + 1, format_rational(&e.weight)));
        }
        out
    }

    pub fn save(&self, format: GameFormat) -> String {
        match format {
            GameFormat::Json => serde_json::to_string_pretty(&self.to_json()).expect("serializable"),
            GameFormat::Edgelist => self.to_edgelist(),
        }
    }

    /// The same game with node `i` renamed to `perm[i]` (labels follow nodes).
    pub fn permuted(&self, perm: &[NodeId]) -> Result<Self> {
        let mut labels = vec![String::new(); self.node_count()];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = self.labels[old].clone();
        }
        let edges = self
            .edges
            .iter()
            .map(|e| (perm[e.u], perm[e.v], e.weight.clone()))
            .collect();
        GameInstance::new(labels, edges)
    }
}

fn parse_weight(value: &Value, line: usize) -> Result<Rational> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(Error::parse(line, format!("weight must be a number or string, got {other}"))),
    };
    parse_rational(&text).map_err(|m| Error::parse(line, m))
}

fn parse_json(text: &str) -> Result<GameInstance> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let nodes = root
        .get("nodes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(0, "missing \"nodes\" array"))?;
    let labels = nodes
        .iter()
        .map(|n| match n {
            Value::String(s) => Ok(s.clone()),
            Value::Number(k) => Ok(k.to_string()),
            other => Err(Error::parse(0, format!("node label must be a string, got {other}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let raw_edges = root
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(0, "missing \"edges\" array"))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (i, e) in raw_edges.iter().enumerate() {
        let endpoint = |key: &str| -> Result<usize> {
            e.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::parse(0, format!("edge {i}: missing integer field {key:?}")))
        };
        let u = endpoint("u")?;
        let v = endpoint("v")?;
        let w = e
            .get("w")
            .ok_or_else(|| Error::parse(0, format!("edge {i}: missing field \"w\"")))?;
        edges.push((u, v, parse_weight(w, 0)?));
    }
    GameInstance::new(labels, edges)
}

fn parse_edgelist(text: &str) -> Result<GameInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (header_line, header) = lines.next().ok_or_else(|| Error::parse(1, "empty edgelist"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::parse(header_line, "header must be \"n m\""));
    }
    let count = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::parse(header_line, format!("bad count {s:?}")))
    };
    let n = count(fields[0])?;
    let m = count(fields[1])?;
    let mut edges = Vec::with_capacity(m);
    for (line_no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::parse(line_no, "edge line must be \"u v w\""));
        }
        let node = |s: &str| -> Result<usize> {
            let k: usize = s
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad node {s:?}")))?;
            if k == 0 || k > n {
                return Err(Error::NodeOutOfRange { index: k, count: n });
            }
            Ok(k - 1)
        };
        let w = parse_rational(parts[2]).map_err(|msg| Error::parse(line_no, msg))?;
        edges.push((node(parts[0])?, node(parts[1])?, w));
    }
    if edges.len() != m {
        return Err(Error::parse(0, format!("header declares {m} edges, found {}", edges.len())));
    }
    GameInstance::with_numbered_nodes(n, edges)
}

/// A set of edges, no two sharing an endpoint. Stored sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching(Vec<EdgeId>);

impl Matching {
    pub fn empty() -> Self {
        Matching(Vec::new())
    }

    pub fn new(game: &GameInstance, edges: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let mut ids: Vec<EdgeId> = edges.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        let mut owner: BTreeMap<NodeId, EdgeId> = BTreeMap::new();
        for &id in &ids {
            let e = game.edge(id);
            for node in [e.u, e.v] {
                if let Some(&prev) = owner.get(&node) {
                    return Err(Error::NotAMatching(prev, id));
                }
                owner.insert(node, id);
            }
        }
        Ok(Matching(ids))
    }

    /// Skips validation; callers guarantee disjointness.
    pub(crate) fn from_sorted_unchecked(ids: Vec<EdgeId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Matching(ids)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, edge: EdgeId) -> bool {
        self.0.binary_search(&edge).is_ok()
    }

    /// `V(M)`, sorted.
    pub fn covered_nodes(&self, game: &GameInstance) -> Coalition {
        Coalition::from_nodes(self.0.iter().flat_map(|&id| {
            let e = game.edge(id);
            [e.u, e.v]
        }))
    }

    pub fn covers(&self, game: &GameInstance, node: NodeId) -> bool {
        self.0.iter().any(|&id| game.edge(id).touches(node))
    }

    /// `w(M)`.
    pub fn weight(&self, game: &GameInstance) -> Rational {
        sum(self.0.iter().map(|&id| &game.edge(id).weight))
    }

    /// `c(M)` for an arbitrary edge cost vector.
    pub fn cost(&self, costs: &[Rational]) -> Rational {
        sum(self.0.iter().map(|&id| &costs[id]))
    }

    /// Number of member edges with both ends in `coalition`.
    pub fn count_inside(&self, game: &GameInstance, coalition: &Coalition) -> usize {
        self.0
            .iter()
            .filter(|&&id| {
                let e = game.edge(id);
                coalition.contains(e.u) && coalition.contains(e.v)
            })
            .count()
    }

    pub fn endpoints(&self, game: &GameInstance) -> Vec<(NodeId, NodeId)> {
        self.0
            .iter()
            .map(|&id| {
                let e = game.edge(id);
                (e.u, e.v)
            })
            .collect()
    }
}

/// A set of players `S ⊆ V`, stored as sorted node ids. May be empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(Vec<NodeId>);

impl Coalition {
    pub fn empty() -> Self {
        Coalition(Vec::new())
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut v: Vec<NodeId> = nodes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Coalition(v)
    }

    pub fn all(game: &GameInstance) -> Self {
        Coalition(game.nodes().collect())
    }

    pub fn from_mask(mask: u64) -> Self {
        Coalition((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    /// Bitmask form; `None` when some member id is 64 or larger.
    pub fn mask(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(0u64, |acc, &v| (v < 64).then(|| acc | 1 << v))
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &Coalition) -> bool {
        self.0.iter().all(|&v| !other.contains(v))
    }

    pub fn intersection(&self, other: &Coalition) -> Coalition {
        Coalition(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition::from_nodes(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn difference(&self, other: &Coalition) -> Coalition {
        Coalition(self.0.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn labels(&self, game: &GameInstance) -> Vec<String> {
        self.0.iter().map(|&v| game.label(v).to_string()).collect()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A payoff vector indexed by node id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation(Vec<Rational>);

impl Allocation {
    pub fn new(values: Vec<Rational>) -> Self {
        Allocation(values)
    }

    pub fn zeros(n: usize) -> Self {
        Allocation(vec![Rational::zero(); n])
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self, node: NodeId) -> &Rational {
        &self.0[node]
    }

    /// `x(V)`.
    pub fn total(&self) -> Rational {
        sum(&self.0)
    }

    /// `x(S)`.
    pub fn of(&self, coalition: &Coalition) -> Rational {
        sum(coalition.nodes().iter().map(|&v| &self.0[v]))
    }

    /// `x(M) = x(V(M))`.
    pub fn of_matching(&self, game: &GameInstance, matching: &Matching) -> Rational {
        matching
            .edges()
            .iter()
            .map(|&id| {
                let e = game.edge(id);
                &self.0[e.u] + &self.0[e.v]
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|v| !v.is_negative())
    }

    /// `t·self + (1 - t)·other`.
    pub fn blend(&self, other: &Allocation, t: &Rational) -> Allocation {
        let s = Rational::from_integer(1.into()) - t;
        Allocation(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| t * a + &s * b)
                .collect(),
        )
    }

    /// Label-keyed map with canonical rational strings; keys sort lexicographically.
    pub fn to_label_map(&self, game: &GameInstance) -> BTreeMap<String, String> {
        game.nodes()
            .map(|v| (game.label(v).to_string(), format_rational(&self.0[v])))
            .collect()
    }

    pub fn from_label_map(game: &GameInstance, map: &BTreeMap<String, String>) -> Result<Self> {
        let mut values = Vec::with_capacity(game.node_count());
        for v in game.nodes() {
            let text = map
                .get(game.label(v))
                .ok_or_else(|| Error::parse(0, format!("missing value for node {}", game.label(v))))?;
            values.push(parse_rational(text).map_err(|m| Error::parse(0, m))?);
        }
        Ok(Allocation(values))
    }
}

/// `ex(x, M) = x(V(M)) - w(M)`.
pub fn excess(game: &GameInstance, x: &Allocation, matching: &Matching) -> Rational {
    x.of_matching(game, matching) - matching.weight(game)
}

/// `x(S) - ν(S)`, with `ν(S)` supplied by the caller.
pub fn coalition_excess(x: &Allocation, coalition: &Coalition, coalition_value: &Rational) -> Rational {
    x.of(coalition) - coalition_value
}

/// `sym(x, S) = x(S) - x*(S)`.
pub fn sym(x: &Allocation, x_star: &Allocation, coalition: &Coalition) -> Rational {
    x.of(coalition) - x_star.of(coalition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    pub(crate) fn five_cycle() -> GameInstance {
        let text = "5 5\n1 2 2\n2 3 1\n3 4 1\n4 5 1\n1 5 2\n";
        GameInstance::load(text.as_bytes(), GameFormat::Edgelist).unwrap()
    }

    fn nucleolus_five_cycle() -> Allocation {
        Allocation::new(vec![ratio(7, 5), ratio(2, 5), ratio(2, 5), ratio(2, 5), ratio(2, 5)])
    }

    #[test]
    fn loads_five_cycle_edgelist() {
        let g = five_cycle();
        assert_eq!(g.node_count(), 5);
        let w: Vec<Rational> = g.edges().iter().map(|e| e.weight.clone()).collect();
        // canonical order: 12, 15, 23, 34, 45
        assert_eq!(w, vec![int(2), int(2), int(1), int(1), int(1)]);
        assert_eq!(g.find_edge(4, 0), Some(1));
    }

    #[test]
    fn loads_k2_and_json_fraction() {
        let k2 = GameInstance::load(b"2 1\n1 2 1\n", GameFormat::Edgelist).unwrap();
        assert_eq!(k2.edge_count(), 1);
        assert_eq!(k2.edge(0).weight, int(1));

        let json = r#"{"nodes": ["a", "b"], "edges": [{"u": 0, "v": 1, "w": "3/2"}]}"#;
        let g = GameInstance::load(json.as_bytes(), GameFormat::Json).unwrap();
        assert_eq!(g.edge(0).weight, ratio(3, 2));
        assert_eq!(g.label(1), "b");

        let json = r#"{"nodes": ["a", "b"], "edges": [{"u": 1, "v": 0, "w": 2}]}"#;
        let g = GameInstance::load(json.as_bytes(), GameFormat::Json).unwrap();
        assert_eq!((g.edge(0).u, g.edge(0).v), (0, 1));
        let json = r#"{"nodes": ["a", "b"], "edges": [{"u": 1, "v": 0, "w": "0.25"}]}"#;
        let g = GameInstance::load(json.as_bytes(), GameFormat::Json).unwrap();
        assert_eq!(g.edge(0).weight, ratio(1, 4));
    }

    #[test]
    fn distinct_diagnostics() {
        let dup = GameInstance::load(b"3 2\n1 2 1\n2 1 3\n", GameFormat::Edgelist);
        assert!(matches!(dup, Err(Error::DuplicateEdge { .. })));
        let lp = GameInstance::load(b"3 1\n2 2 1\n", GameFormat::Edgelist);
        assert!(matches!(lp, Err(Error::SelfLoop(_))));
        let neg = GameInstance::load(b"3 1\n1 2 -1\n", GameFormat::Edgelist);
        assert!(matches!(neg, Err(Error::NegativeWeight { .. })));
        let bad = GameInstance::load(b"3 1\n1 2 x\n", GameFormat::Edgelist);
        assert!(matches!(bad, Err(Error::Parse { line: 2, .. })));
        let range = GameInstance::load(b"2 1\n1 3 1\n", GameFormat::Edgelist);
        assert!(matches!(range, Err(Error::NodeOutOfRange { .. })));
        let count = GameInstance::load(b"2 2\n1 2 1\n", GameFormat::Edgelist);
        assert!(matches!(count, Err(Error::Parse { .. })));
        let json = GameInstance::load(b"{\"nodes\": [\"a\"]", GameFormat::Json);
        assert!(matches!(json, Err(Error::Parse { .. })));
    }

    #[test]
    fn matching_validation() {
        let g = five_cycle();
        assert!(Matching::new(&g, [2, 4]).is_ok());
        assert!(matches!(Matching::new(&g, [0, 1]), Err(Error::NotAMatching(0, 1))));
    }

    #[test]
    fn excess_examples() {
        let g = five_cycle();
        let x = nucleolus_five_cycle();
        let m = Matching::new(&g, [g.find_edge(1, 2).unwrap(), g.find_edge(3, 4).unwrap()]).unwrap();
        assert_eq!(excess(&g, &x, &m), ratio(-2, 5));
        assert_eq!(excess(&g, &x, &Matching::empty()), int(0));
        let m12 = Matching::new(&g, [g.find_edge(0, 1).unwrap()]).unwrap();
        assert_eq!(excess(&g, &x, &m12), ratio(-1, 5));
    }

    #[test]
    fn coalition_excess_examples() {
        let x = nucleolus_five_cycle();
        let s = Coalition::from_nodes([1, 2, 3, 4]);
        assert_eq!(coalition_excess(&x, &s, &int(2)), ratio(-2, 5));
        assert_eq!(coalition_excess(&x, &Coalition::empty(), &int(0)), int(0));
        let third = Allocation::new(vec![ratio(1, 3); 3]);
        assert_eq!(coalition_excess(&third, &Coalition::from_nodes([0, 1]), &int(1)), ratio(-1, 3));
    }

    #[test]
    fn sym_examples() {
        let x = nucleolus_five_cycle();
        let all = Coalition::from_nodes(0..5);
        assert_eq!(sym(&x, &x, &Coalition::from_nodes([0, 3])), int(0));
        let mut bumped = x.clone().into_values();
        bumped[0] += ratio(1, 10);
        let bumped = Allocation::new(bumped);
        assert_eq!(sym(&bumped, &x, &Coalition::from_nodes([0])), ratio(1, 10));
        let other = Allocation::new(vec![int(1), ratio(1, 2), ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        assert_eq!(sym(&other, &x, &all), int(0));
    }

    #[test]
    fn label_map_round_trip() {
        let g = five_cycle();
        let x = nucleolus_five_cycle();
        let map = x.to_label_map(&g);
        assert_eq!(map["1"], "7/5");
        assert_eq!(Allocation::from_label_map(&g, &map).unwrap(), x);
    }

    #[test]
    fn permutation_moves_edges() {
        let g = five_cycle();
        let p = g.permuted(&[4, 3, 2, 1, 0]).unwrap();
        assert_eq!(p.edge_count(), 5);
        let e = p.find_edge(4, 3).unwrap();
        assert_eq!(p.edge(e).weight, int(2));
        assert_eq!(p.label(4), "1");
    }
}
