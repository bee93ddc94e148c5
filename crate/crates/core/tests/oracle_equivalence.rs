use proptest::prelude::*;
use smst_core::cascade::forest_edge_sets;
use smst_core::oracle::{oracle_successive_msts, WeightedEdge};

fn instance() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize)>)> {
    (2usize..=50, 1usize..=5).prop_flat_map(|(n, k)| {
        let pair = (0..n, 0..n).prop_filter("no loops", |(u, v)| u != v);
        (Just(n), Just(k), prop::collection::vec(pair, 0..=4 * k * n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cascade_matches_repeated_kruskal((n, k, pairs) in instance()) {
        let weighted: Vec<WeightedEdge> = pairs
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| WeightedEdge { u, v, weight: i as f64 })
            .collect();
        let oracle = oracle_successive_msts(n, &weighted, k);
        let cascade = forest_edge_sets(n, k, &pairs);
        for (level, tree) in oracle.trees.iter().enumerate() {
            prop_assert_eq!(&cascade[level], tree);
        }
        // the first level the oracle could not complete is a non-spanning
        // forest in the cascade too
        if let Some(level) = oracle.incomplete_level {
            prop_assert!(cascade[level - 1].len() + 1 < n);
        }
    }
}

#[test]
fn equal_weights_follow_stream_order() {
    // a 4-cycle offered twice: the second copy of each edge goes one level down
    let pairs = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 0),
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 0),
    ];
    let weighted: Vec<WeightedEdge> = pairs
        .iter()
        .map(|&(u, v)| WeightedEdge { u, v, weight: 1.0 })
        .collect();
    let oracle = oracle_successive_msts(4, &weighted, 2);
    assert_eq!(oracle.trees, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    assert_eq!(forest_edge_sets(4, 2, &pairs)[..2], oracle.trees[..]);
}
