//! Property tests over randomly generated instances.

use proptest::prelude::*;

use ipmu::instance::{generate, Arc, ArcCount, GenSpec, Instance, InstanceKind};
use ipmu::oracle::knapsack_vertex_oracle;
use ipmu::paths::PathCache;
use ipmu::search::hamming;
use ipmu::upgrade::{evaluate, relax_edges, ArcWeights};

fn gen_spec_strategy() -> impl Strategy<Value = GenSpec> {
    (5usize..=14, 2usize..=4, any::<bool>(), 0u64..1000, 0.0f64..80.0).prop_map(
        |(n, p_raw, correlated, seed, budget)| {
            let p = p_raw.min(n - 1);
            let gamma = n * (n - 1);
            let m = (n + seed as usize % (gamma - n + 1)).min(gamma);
            GenSpec::new(
                n,
                ArcCount::Count(m),
                p,
                budget,
                if correlated { InstanceKind::Correlated } else { InstanceKind::Random },
                seed,
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(spec in gen_spec_strategy()) {
        let instance = generate(&spec).unwrap();
        let text = instance.to_text();
        let reparsed = Instance::parse(&text).unwrap();
        prop_assert_eq!(&reparsed, &instance);
        prop_assert_eq!(reparsed.to_text(), text);
    }

    #[test]
    fn generated_instances_validate_clean(spec in gen_spec_strategy()) {
        let instance = generate(&spec).unwrap();
        prop_assert!(instance.validate().is_empty());
    }

    #[test]
    fn plans_respect_budget_and_caps(spec in gen_spec_strategy(), pick in any::<u64>()) {
        let instance = generate(&spec).unwrap();
        let cache = PathCache::compute(&instance).unwrap();
        let size = 1 + (pick as usize) % instance.p;
        let medians: Vec<usize> = (0..size).map(|k| 1 + (pick as usize + 3 * k) % instance.n).collect();
        let sol = evaluate(&instance, &cache, &medians).unwrap();
        let spent: f64 = sol.plan.b.iter().sum();
        prop_assert!(spent <= instance.budget + 1e-12);
        for (arc, &b) in sol.plan.b.iter().enumerate() {
            prop_assert!(b >= 0.0 && b <= instance.arcs[arc].u);
        }
        prop_assert!(sol.objective <= sol.base_cost + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hamming_is_symmetric_and_bounded(
        a in proptest::collection::btree_set(1usize..30, 4),
        b in proptest::collection::btree_set(1usize..30, 4),
    ) {
        let a: Vec<usize> = a.into_iter().collect();
        let b: Vec<usize> = b.into_iter().collect();
        let d_ab = hamming(&a, &b).unwrap();
        let d_ba = hamming(&b, &a).unwrap();
        prop_assert_eq!(d_ab, d_ba);
        prop_assert!(d_ab <= 4);
        prop_assert_eq!(d_ab == 0, a == b);
    }

    #[test]
    fn greedy_knapsack_matches_vertex_oracle(
        weights in proptest::collection::vec(0.0f64..10.0, 1..=10),
        caps in proptest::collection::vec(0.0f64..8.0, 10),
        budget_frac in 0.0f64..1.3,
    ) {
        let m = weights.len();
        let caps = &caps[..m];
        let budget = budget_frac * caps.iter().sum::<f64>();
        let arcs: Vec<Arc> = caps
            .iter()
            .enumerate()
            .map(|(k, &cap)| Arc::new(1, k + 2, 1.0, cap + 1.0, cap))
            .collect();
        let instance = Instance::new(m + 1, 1, budget, vec![1.0; m + 1], arcs);
        let w = ArcWeights { w: weights };
        let greedy = relax_edges(&instance, &w);
        let vertex = knapsack_vertex_oracle(&instance, &w).unwrap();
        prop_assert!((greedy.gain - vertex.gain).abs() <= 1e-9);
    }
}
