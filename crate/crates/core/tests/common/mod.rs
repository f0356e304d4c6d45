#![allow(dead_code)]

use matchnuc::rational::{int, ratio};
use matchnuc::{GameInstance, Rational};
use proptest::prelude::*;

/// Small games with rational weights in `[0, 10]`, possibly zero-weight edges.
pub fn small_game(max_nodes: usize) -> impl Strategy<Value = GameInstance> {
    (2..=max_nodes).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let count = pairs.len();
        proptest::collection::vec((any::<bool>(), 0i64..=20, 1i64..=2), count).prop_map(move |choices| {
            let edges = pairs
                .iter()
                .zip(choices)
                .filter(|(_, (keep, _, _))| *keep)
                .map(|(&(u, v), (_, num, den))| (u, v, ratio(num, den)))
                .collect();
            GameInstance::with_numbered_nodes(n, edges).unwrap()
        })
    })
}

/// Edge costs of either sign, for the surgery and dual routines.
pub fn signed_costs(edge_count: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-10i64..=10, 1i64..=3), edge_count)
        .prop_map(|v| v.into_iter().map(|(n, d)| ratio(n, d)).collect())
}

pub fn five_cycle() -> GameInstance {
    GameInstance::with_numbered_nodes(
        5,
        vec![(0, 1, int(2)), (1, 2, int(1)), (2, 3, int(1)), (3, 4, int(1)), (0, 4, int(2))],
    )
    .unwrap()
}
