use itertools::Itertools;
use percolab_core::coupling::{
    coupled_descents, coupled_fitness_uniformity, coupling_report, count_paths_within, diamonds,
    min_descents_distribution_check, two_diamond_graph, verify_apriori_equivalence,
};
use percolab_core::fpp::{CostDistribution, CostField};
use percolab_core::graph::{GraphModel, VertexId};
use percolab_core::landscape::{accessible_set, count_accessible_paths, FitnessLandscape};
use percolab_core::rng::substream;
use percolab_core::Execution;

#[test]
fn coupled_fitnesses_are_uniform_and_uncorrelated() {
    let g = GraphModel::hypercube(3).unwrap();
    for (i, alpha) in [0.0, 0.3, 0.9].into_iter().enumerate() {
        let r = coupled_fitness_uniformity(&g, alpha, 100_000, 40 + i as u64, Execution::Parallel)
            .unwrap();
        assert!(r.min_ks_p_value > 1e-3, "alpha {alpha}: {:?}", r.ks_p_values);
        assert!(r.max_abs_correlation < r.correlation_bound, "alpha {alpha}: {}", r.max_abs_correlation);
    }
}

#[test]
fn descent_distributions_match() {
    let g = GraphModel::hypercube(3).unwrap();
    let r = min_descents_distribution_check(&g, 0.5, VertexId::ones(3), 10_000, 11, Execution::Parallel)
        .unwrap();
    assert!(r.p_value > 0.01, "{r:?}");
}

#[test]
fn descents_equal_floor_of_passage_time_per_sample() {
    for n in 2..=6 {
        let g = GraphModel::hypercube(n).unwrap();
        for seed in 0..200 {
            let c = CostField::sample_site(&g, CostDistribution::Uniform01, &mut substream(seed, n.into()));
            for target in g.vertices() {
                let (d, f) = coupled_descents(&g, &c, 0.4, target).unwrap();
                assert_eq!(d, f);
            }
        }
    }
}

#[test]
fn two_diamond_never_has_three_accessible_paths() {
    let g = two_diamond_graph();
    let sink = VertexId(diamonds::SINK);
    let mut seen = [false; 5];
    for ranks in (1..=7u32).permutations(7) {
        let fitness = ranks.iter().map(|&r| f64::from(r) / 8.0).collect();
        let l = FitnessLandscape::from_values(g.clone(), fitness, None, None).unwrap();
        let k = count_accessible_paths(&l, sink, false).unwrap();
        let k: usize = k.try_into().unwrap();
        seen[k] = true;
    }
    assert_eq!(seen, [true, true, true, false, true]);

    // yet three paths can have reduced passage time within 1
    let c = CostField::site(&g, vec![0.0, 0.1, 0.5, 0.1, 0.1, 0.45, 0.3], CostDistribution::Uniform01)
        .unwrap();
    assert_eq!(count_paths_within(&g, &c, sink, 1.0).unwrap(), 3);
}

#[test]
fn coupling_holds_on_trees_and_explicit_graphs() {
    let tree = GraphModel::regular_tree(3, 4).unwrap();
    let oriented = GraphModel::oriented_hypercube(5).unwrap();
    for g in [&tree, &oriented] {
        for seed in 0..200 {
            let c = CostField::sample_site(g, CostDistribution::Uniform01, &mut substream(seed, 3));
            for alpha in [0.0, 0.25, 0.75] {
                assert!(coupling_report(g, &c, alpha).unwrap().equal);
            }
        }
    }
}

#[test]
fn accessible_set_matches_dfs_oracle_on_q3() {
    // brute force: a vertex is accessible iff some simple path to it is increasing
    fn dfs(l: &FitnessLandscape, v: VertexId, seen: &mut Vec<bool>, on: &mut Vec<VertexId>) {
        seen[v.index()] = true;
        for w in l.graph().out_neighbors(v) {
            if !on.contains(&w) && l.fitness(w) > l.fitness(v) {
                on.push(w);
                dfs(l, w, seen, on);
                on.pop();
            }
        }
    }
    let g = GraphModel::hypercube(3).unwrap();
    for seed in 0..1000 {
        let l = percolab_core::landscape::sample_landscape(&g, &mut substream(seed, 2), None, None)
            .unwrap();
        let mut seen = vec![false; 8];
        dfs(&l, VertexId::ZERO, &mut seen, &mut vec![VertexId::ZERO]);
        assert_eq!(accessible_set(&l).mask(), &seen[..]);
    }
}

#[test]
fn apriori_equivalence_on_every_target() {
    let g = GraphModel::hypercube(4).unwrap();
    for seed in 0..100 {
        for top in g.vertices().skip(1) {
            let mut rng = substream(seed, top.0.into());
            assert!(verify_apriori_equivalence(&g, top, 0.2, &mut rng).unwrap());
        }
    }
}
