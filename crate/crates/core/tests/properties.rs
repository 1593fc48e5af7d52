use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selcol_core::clique::max_clique;
use selcol_core::coloring::{brute_force_selcol, chromatic_number, DEFAULT_SELECTION_BUDGET};
use selcol_core::io::{parse_instance, write_instance};
use selcol_core::lp::gap_percent;
use selcol_core::perfect::is_perfect;
use selcol_core::perfectgen::{default_library, density_reachable, generate_partition, generate_perfect, GenConfig};
use selcol_core::selcol::{solve, Method, SolveOptions, Subproblem};
use selcol_core::{Graph, SelColInstance};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut it = bits.into_iter();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if it.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn instance_strategy(max_n: usize) -> impl Strategy<Value = SelColInstance> {
    (graph_strategy(max_n), any::<u64>(), 1usize..=3).prop_map(|(g, seed, hi)| {
        let n = g.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let clusters = generate_partition(n, 1, hi.min(n), &mut rng).unwrap();
        SelColInstance::new(g, clusters).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_text_roundtrips(inst in instance_strategy(16)) {
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(write_instance(&back), text);
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn partitions_respect_bounds(n in 1usize..60, lo in 1usize..6, extra in 0usize..4, seed: u64) {
        let hi = lo + extra;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match generate_partition(n, lo, hi, &mut rng) {
            Err(_) => prop_assert!(hi > n),
            Ok(p) => {
                let total: usize = p.iter().map(|c| c.len()).sum();
                prop_assert_eq!(total, n);
                for c in &p {
                    prop_assert!(c.len() >= lo.min(n) && c.len() < hi + lo);
                }
                prop_assert!(SelColInstance::new(Graph::empty(n), p).is_ok());
            }
        }
    }

    #[test]
    fn clique_never_exceeds_coloring(g in graph_strategy(14)) {
        let k = max_clique(&g, None, 0);
        let c = chromatic_number(&g, None);
        prop_assert!(g.is_clique(k.clique.as_slice()));
        prop_assert!(c.coloring.is_proper(&g));
        prop_assert!(k.size <= c.chromatic_number().unwrap());
    }

    #[test]
    fn general_mode_equals_enumeration(inst in instance_strategy(11)) {
        let (best, _) = brute_force_selcol(&inst, DEFAULT_SELECTION_BUDGET).unwrap();
        let r = solve(&inst, Method::CutplaneGeneral, &SolveOptions::with_time_limit(60.0)).unwrap();
        prop_assert_eq!(r.optimum(), Some(best));
        prop_assert!(r.lower_bound <= r.upper_bound);
    }

    #[test]
    fn perfect_mode_equals_enumeration_on_perfect_graphs(inst in instance_strategy(11)) {
        prop_assume!(is_perfect(&inst.graph).unwrap());
        let (best, _) = brute_force_selcol(&inst, DEFAULT_SELECTION_BUDGET).unwrap();
        let opts = SolveOptions::with_time_limit(60.0);
        let r = solve(&inst, Method::CutplanePerfect(Subproblem::Mcs), &opts).unwrap();
        prop_assert_eq!(r.optimum(), Some(best));
    }

    #[test]
    fn generator_hits_size_density_and_perfection(n in 4usize..=12, rho in 0.1f64..0.9, seed: u64) {
        prop_assume!(density_reachable(n, rho, 0.025));
        let g = generate_perfect(&GenConfig::new(n, rho, seed), default_library()).unwrap();
        prop_assert_eq!(g.n(), n);
        prop_assert!((g.edge_density().unwrap() - rho).abs() < 0.025);
        prop_assert!(is_perfect(&g).unwrap());
    }

    #[test]
    fn gap_formula(ub in 1u32..100, drop in 0u32..100) {
        let ub = ub as f64;
        let lb = (ub - drop as f64).max(0.0);
        let g = gap_percent(ub, lb);
        prop_assert!((g - (ub - lb) / ub * 100.0).abs() <= 1e-9 * g.abs().max(1.0));
        prop_assert!((0.0..=100.0).contains(&g));
    }
}
