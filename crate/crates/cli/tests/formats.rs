use proptest::prelude::*;

use stablecut::approx::ExtendedInstance;
use stablecut::graph::{Cut, WeightedGraph};
use stablecut::treedec::{heuristic_decompose, Strategy as Heuristic};
use stablecut_cli::format::*;

fn graph() -> impl Strategy<Value = WeightedGraph> {
    (1usize..=8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        proptest::collection::vec(proptest::option::weighted(0.4, 1u64..=u64::MAX), m).prop_map(
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn graph_round_trip(g in graph()) {
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), GraphInput::Plain(g));
    }

    #[test]
    fn extended_round_trip(g in graph(), seed in any::<u64>()) {
        let s = (0..g.edge_count() as u64)
            .map(|i| ((seed ^ i) % 97 + 1, (seed.rotate_left(i as u32)) % 1000))
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        let ext = ExtendedInstance::new(g, s).unwrap();
        prop_assert_eq!(parse_graph(&write_extended(&ext)).unwrap(), GraphInput::Extended(ext));
    }

    #[test]
    fn decomposition_round_trip(g in graph(), min_fill in any::<bool>()) {
        let h = if min_fill { Heuristic::MinFill } else { Heuristic::MinDegree };
        let td = heuristic_decompose(&g, h);
        let n = g.vertex_count();
        prop_assert_eq!(parse_td(&write_td(&td, n)).unwrap(), (td, n));
    }

    #[test]
    fn cut_round_trip(sides in proptest::collection::vec(any::<bool>(), 0..40)) {
        let c = Cut::new(sides);
        prop_assert_eq!(parse_cut(&write_cut(&c)).unwrap(), c);
    }
}
