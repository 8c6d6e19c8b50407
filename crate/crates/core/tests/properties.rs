use num_bigint::BigUint;
use proptest::prelude::*;

use stablecut::exact::{solve_pseudo, solve_pseudo_with, PseudoOptions};
use stablecut::graph::{cut_weight, is_stable, Cut, WeightedGraph};
use stablecut::oracle::{brute_min_stable_cut, enumerate_stable_cuts, local_search, Pivot};
use stablecut::treedec::{heuristic_decompose, make_nice, Strategy as Heuristic};

fn graph() -> impl Strategy<Value = WeightedGraph> {
    (1usize..=7).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        proptest::collection::vec(proptest::option::weighted(0.5, 1u32..=20), m).prop_map(
            move |ws| {
                let edges = pairs
                    .iter()
                    .zip(ws)
                    .filter_map(|(&(u, v), w)| w.map(|w| (u, v, w)));
                WeightedGraph::new(n, edges).unwrap()
            },
        )
    })
}

fn graph_and_cut() -> impl Strategy<Value = (WeightedGraph, Cut)> {
    graph().prop_flat_map(|g| {
        let n = g.vertex_count();
        (
            Just(g),
            proptest::collection::vec(any::<bool>(), n).prop_map(Cut::new),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn complement_keeps_weight_and_stability((g, c) in graph_and_cut()) {
        let f = c.flipped();
        prop_assert_eq!(cut_weight(&g, &c).unwrap(), cut_weight(&g, &f).unwrap());
        prop_assert_eq!(is_stable(&g, &c).unwrap(), is_stable(&g, &f).unwrap());
    }

    #[test]
    fn stable_cuts_carry_half_the_weight(g in graph()) {
        let total = g.total_weight();
        for (c, w) in enumerate_stable_cuts(&g).unwrap() {
            prop_assert!(is_stable(&g, &c).unwrap());
            prop_assert!(w * 2u32 >= total);
        }
    }

    #[test]
    fn pruning_rules_do_not_change_the_optimum(g in graph()) {
        let nd = make_nice(&heuristic_decompose(&g, Heuristic::MinFill)).unwrap();
        let plain = PseudoOptions { dominance: false, saturation: false, early_prune: false };
        let (a, _) = solve_pseudo_with(&g, &nd, plain).unwrap();
        let b = solve_pseudo(&g, &nd).unwrap();
        prop_assert_eq!(&a.weight, &b.weight);
        prop_assert_eq!(a.weight, brute_min_stable_cut(&g).unwrap().weight);
    }

    #[test]
    fn local_search_ends_stable_within_the_flip_budget(
        (g, c) in graph_and_cut(),
        seed in any::<u64>(),
    ) {
        let start = cut_weight(&g, &c).unwrap();
        for pivot in [Pivot::FirstImprovement, Pivot::BestImprovement] {
            let out = local_search(&g, &c, pivot, seed).unwrap();
            prop_assert!(is_stable(&g, &out.cut).unwrap());
            prop_assert!(out.weight >= start);
            prop_assert!(BigUint::from(out.flips) <= g.total_weight());
        }
    }
}
