mod common;

use common::{floyd, is_tree, leading_distances, ratio_range};
use convex_completion::completion::complete_tree;
use convex_completion::instances::{random_euclidean, random_tree};
use convex_completion::io::{parse_graph, parse_metric, write_graph, write_metric};
use convex_completion::metric::{greedy_net, verify_stretch};
use convex_completion::net_tree::{level_radius, validate_net_tree, NetTree};
use convex_completion::spanner::build_spanner;
use convex_completion::{shortest_path_metric, Epsilon};
use proptest::prelude::*;

fn epsilon() -> impl Strategy<Value = Epsilon> {
    prop_oneof![Just(0.25), Just(0.125), Just(0.1)].prop_map(|e| Epsilon::new(e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn greedy_net_packs_and_covers(n in 1usize..40, seed in any::<u64>(), r in 0.01f64..0.8) {
        let m = random_euclidean(n, 2, seed);
        let net = greedy_net(&m, r);
        for (a, &x) in net.iter().enumerate() {
            for &y in &net[a + 1..] {
                prop_assert!(m.d(x, y) > r);
            }
        }
        for p in 0..n {
            prop_assert!(net.iter().any(|&x| m.d(p, x) <= r));
        }
    }

    #[test]
    fn net_tree_levels_nest(n in 1usize..30, seed in any::<u64>(), e in epsilon()) {
        let m = random_euclidean(n, 2, seed);
        let t = NetTree::build(&m, e);
        prop_assert!(validate_net_tree(&t, &m).pass);
        for i in 1..=t.top_level() {
            let below: Vec<usize> = t.labels(i - 1).collect();
            prop_assert!(t.labels(i).all(|l| below.contains(&l)));
        }
        let s = t.scaled_metric();
        for v in 0..n {
            let k = t.istar(v).unwrap();
            prop_assert!(t.labels(k).any(|l| l == v));
            prop_assert!(k == t.top_level() || t.labels(k + 1).all(|l| l != v));
            for i in 0..=t.top_level() {
                let a = t.level_ancestor_label(v, i).unwrap();
                prop_assert!(s.d(v, a) <= 2.0 * level_radius(i) - 2.0 + 1e-9 * level_radius(i));
            }
        }
    }

    #[test]
    fn spanner_stretch_is_sound(n in 2usize..40, seed in any::<u64>(), e in epsilon()) {
        let m = random_euclidean(n, 2, seed);
        let sp = build_spanner(&m, e).unwrap();
        let (lo, hi) = ratio_range(&m, &leading_distances(&sp.graph, n));
        prop_assert!(lo >= 1.0 - 1e-9);
        prop_assert!(hi <= (1.0 + e.value()) * (1.0 + 1e-9));
        prop_assert!(sp.stretch.pass);
    }

    #[test]
    fn completion_keeps_trees_and_stretch(n in 1usize..40, seed in any::<u64>(), e in epsilon()) {
        let g = random_tree(n, seed);
        let c = complete_tree(&g, e).unwrap();
        prop_assert!(is_tree(&c.output));
        let base = shortest_path_metric(&g).unwrap();
        let (lo, hi) = ratio_range(&base, &leading_distances(&c.output, n));
        let up = 1.0 + e.value();
        prop_assert!(n < 2 || (lo >= (1.0 / up) * (1.0 - 1e-9) && hi <= up * (1.0 + 1e-9)));
        for l in &c.lifted {
            let tu = (0..n).find(|&u| c.tail_vertex(u, l.level) == Some(l.new_u));
            prop_assert!(tu.is_some());
        }
    }

    #[test]
    fn shortest_path_metric_matches_floyd(n in 1usize..25, seed in any::<u64>()) {
        let g = random_tree(n, seed);
        let m = shortest_path_metric(&g).unwrap();
        let d = floyd(&g);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((m.d(i, j) - d[i][j]).abs() <= 1e-9 * d[i][j].max(1.0));
            }
        }
        prop_assert!(verify_stretch(&m, &m, 0.0, false).unwrap().pass);
    }

    #[test]
    fn text_formats_round_trip(n in 1usize..20, seed in any::<u64>()) {
        let g = random_tree(n, seed);
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        let m = random_euclidean(n, 3, seed);
        prop_assert_eq!(parse_metric(&write_metric(&m)).unwrap(), m);
    }
}
