mod common;

use common::{signed_costs, small_game};
use matchnuc::game::Matching;
use matchnuc::matching::{
    enumerate_matchings, max_weight_matching, max_weight_matching_blossom, max_weight_matching_enumerative,
    max_weight_matching_exposing, max_weight_matching_forcing_edge, optimal_duals, optimal_matchings,
    DEFAULT_ODD_SET_NODE_LIMIT,
};
use matchnuc::rational::int;
use matchnuc::GameInstance;
use proptest::prelude::*;

fn brute_best(game: &GameInstance, costs: &[matchnuc::Rational]) -> matchnuc::Rational {
    enumerate_matchings(game, 64)
        .unwrap()
        .iter()
        .map(|m| m.cost(costs))
        .max()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blossom_matches_enumeration(game in small_game(8)) {
        let w = game.weights();
        let blossom = max_weight_matching_blossom(&game, &w);
        let enumerative = max_weight_matching_enumerative(&game, &w);
        prop_assert_eq!(&blossom.value, &enumerative.value);
        prop_assert_eq!(blossom.matching.weight(&game), blossom.value.clone());
        prop_assert_eq!(&blossom.value, &brute_best(&game, &w));
    }

    #[test]
    fn signed_costs_and_surgery((game, costs) in small_game(7).prop_flat_map(|g| {
        let m = g.edge_count();
        (Just(g), signed_costs(m))
    })) {
        let best = max_weight_matching(&game, &costs);
        prop_assert_eq!(&best.value, &brute_best(&game, &costs));
        let all = enumerate_matchings(&game, 64).unwrap();
        for e in 0..game.edge_count() {
            let forced = max_weight_matching_forcing_edge(&game, &costs, e);
            prop_assert!(forced.matching.contains(e));
            let expected = all.iter().filter(|m| m.contains(e)).map(|m| m.cost(&costs)).max().unwrap();
            prop_assert_eq!(forced.value, expected);
        }
        for v in game.nodes() {
            let exposed = max_weight_matching_exposing(&game, &costs, v);
            prop_assert!(!exposed.matching.covers(&game, v));
            let expected = all.iter().filter(|m| !m.covers(&game, v)).map(|m| m.cost(&costs)).max().unwrap();
            prop_assert_eq!(exposed.value, expected);
        }
        let optimal = optimal_matchings(&game, &costs, 100_000).unwrap();
        let expected: Vec<&Matching> = all.iter().filter(|m| m.cost(&costs) == best.value).collect();
        prop_assert_eq!(optimal.iter().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn duals_certify_optimality((game, costs) in small_game(7).prop_flat_map(|g| {
        let m = g.edge_count();
        (Just(g), signed_costs(m))
    })) {
        let dual = optimal_duals(&game, &costs, DEFAULT_ODD_SET_NODE_LIMIT).unwrap();
        prop_assert!(dual.is_feasible(&game, &costs));
        prop_assert!(dual.is_laminar());
        prop_assert_eq!(dual.objective(), max_weight_matching(&game, &costs).value);
        // complementary slackness against every optimal matching
        for m in optimal_matchings(&game, &costs, 100_000).unwrap() {
            for &e in m.edges() {
                prop_assert!(dual.edge_slack(&game, &costs, e) == int(0));
            }
            for (set, _) in &dual.z {
                prop_assert_eq!(2 * m.count_inside(&game, set) + 1, set.len());
            }
            for v in dual.positive_nodes().nodes() {
                prop_assert!(m.covers(&game, *v));
            }
        }
    }
}

#[test]
fn enumeration_counts() {
    // a triangle has the empty matching plus three single edges
    let t = GameInstance::with_numbered_nodes(3, vec![(0, 1, int(1)), (1, 2, int(1)), (0, 2, int(1))]).unwrap();
    assert_eq!(enumerate_matchings(&t, 16).unwrap().len(), 4);
    assert_eq!(enumerate_matchings(&common::five_cycle(), 16).unwrap().len(), 11);
    assert!(enumerate_matchings(&common::five_cycle(), 4).is_err());
}
