mod common;

use std::cmp::Ordering;

use matchnuc::leastcore::{core_is_empty, in_leastcore, solve_leastcore};
use matchnuc::maschler::{decomposition_for, nucleolus};
use matchnuc::oracle::{
    brute_nucleolus, eligible_matchings, prekernel_check, random_allocation, random_game, random_game_with,
    theta_compare, verify_cardinality_lemma, verify_restricted_cardinality_polytope, CoalitionTable, ThetaVector,
    CARDINALITY_EDGE_LIMIT,
};
use matchnuc::{Allocation, SolveOptions};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn brute_nucleolus_characterization(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let game = random_game_with(&mut rng, n);
        let o = SolveOptions::default();
        let x = brute_nucleolus(&game, &o).unwrap().allocation;
        let table = CoalitionTable::new(&game).unwrap();
        prop_assert!(prekernel_check(&table, &x));
        let lc = solve_leastcore(&game, &o).unwrap();
        prop_assert!(in_leastcore(&game, &x, &lc.epsilon1));
        for _ in 0..200 {
            let y = random_allocation(&mut rng, n, table.total_value());
            prop_assert_ne!(theta_compare(&table, &x, &y), Ordering::Less);
        }
        let theta = ThetaVector::new(&table, &x);
        prop_assert_eq!(theta.sorted_excesses.len(), (1usize << n) - 2);
        prop_assert!(theta.sorted_excesses.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn brute_nucleolus_relabeling(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let game = random_game_with(&mut rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let o = SolveOptions::default();
        let base = brute_nucleolus(&game, &o).unwrap().allocation;
        let moved = brute_nucleolus(&game.permuted(&perm).unwrap(), &o).unwrap().allocation;
        let back = Allocation::new((0..n).map(|v| moved.value(perm[v]).clone()).collect());
        prop_assert_eq!(back, base);
    }
}

#[test]
fn cardinality_properties_on_random_games() {
    let o = SolveOptions::default();
    let mut checked = 0;
    for seed in 0..60 {
        let game = random_game(seed, 5 + (seed as usize % 3));
        if game.edge_count() > CARDINALITY_EDGE_LIMIT {
            continue;
        }
        let lc = solve_leastcore(&game, &o).unwrap();
        if !core_is_empty(&lc) {
            continue;
        }
        checked += 1;
        let dec = decomposition_for(&game, &lc, &o).unwrap();
        let x = nucleolus(&game, &o).unwrap().allocation;
        for m in eligible_matchings(&game, &dec, CARDINALITY_EDGE_LIMIT).unwrap() {
            assert!(verify_cardinality_lemma(&game, &dec, &dec.x_star, &m), "seed {seed}");
            assert!(verify_cardinality_lemma(&game, &dec, &x, &m), "seed {seed}");
        }
        let costs = game.reduced_weights(&dec.x_star);
        for t in 0..=game.node_count() / 2 {
            assert!(verify_restricted_cardinality_polytope(&game, &costs, t).unwrap(), "seed {seed} t {t}");
        }
    }
    assert!(checked >= 3, "only {checked} empty-core games");
}

#[test]
fn size_bounds_are_enforced() {
    let game = random_game(1, 13);
    assert!(CoalitionTable::new(&game).is_err());
    assert!(brute_nucleolus(&game, &SolveOptions::default()).is_err());
}

#[test]
fn five_cycle_restricted_cardinality() {
    let game = common::five_cycle();
    let x = nucleolus(&game, &SolveOptions::default()).unwrap().allocation;
    let costs = game.reduced_weights(&x);
    assert!(verify_restricted_cardinality_polytope(&game, &costs, 2).unwrap());
}
