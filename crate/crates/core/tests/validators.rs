//! Statistical and arithmetic validators on small instances.

use dynmatch_core::oracle::{
    audit_sparsification, clique_plus_matching, count_3_augmentable, find_pivot_level, max_matching_exact,
    validate_partition_augmentation, validate_vertex_sampling, GadgetFamily, SamplingInstance,
};
use dynmatch_core::{EdgeKey, InstanceConfig, LevelMap, MatchingState, Rank};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sampling_bound_on_complete_bipartite() {
    let inst = SamplingInstance::complete_bipartite(8, 1);
    let check = validate_vertex_sampling(&inst, 0.25, 100_000, 2);
    assert_eq!(check.bound, 1.0);
    assert!(check.pass, "{check:?}");
}

#[test]
fn sampling_bound_on_random_bipartite() {
    for seed in 0..6 {
        let inst = SamplingInstance::random(20, 24, 0.15, seed);
        for p in [0.1, 0.3] {
            let check = validate_vertex_sampling(&inst, p, 10_000, seed);
            assert!(check.pass, "seed {seed} p {p}: {check:?}");
        }
    }
}

#[test]
fn pivot_level_exists_on_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let levels = rng.gen_range(2..=4);
        // Mix uniform sizes with geometrically skewed ones.
        let sizes: Vec<u64> = (0..levels)
            .map(|_| match rng.gen_range(0..3) {
                0 => rng.gen_range(0..1000),
                1 => 1u64 << rng.gen_range(0..40),
                _ => 0,
            })
            .collect();
        if sizes.iter().all(|&s| s == 0) {
            continue;
        }
        let pivot = find_pivot_level(&sizes).unwrap_or_else(|e| panic!("{sizes:?}: {e}"));
        assert!((1..=levels).contains(&pivot.level));
    }
}

#[test]
fn clique_pm_base_edges_are_mostly_3_augmentable() {
    let half = 50;
    let edges = clique_plus_matching(half);
    let n = 2 * half;
    let opt = max_matching_exact(n, &edges).unwrap();
    assert_eq!(opt.size, half);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let m0 = MatchingState::build_static(n, edges.iter().map(|&e| (e, Rank::new(rng.gen(), e)))).matching();
        let mu = opt.size as f64;
        let delta = m0.len() as f64 / mu - 0.5;
        let count = count_3_augmentable(n, &m0, &opt.witness);
        assert!(count as f64 >= (0.5 - 3.0 * delta) * mu, "count {count}, |M_0| {}", m0.len());
    }
}

#[test]
fn sparsification_small_scale() {
    let thresholds: Vec<f64> = (2..=8).map(|k| 0.5f64.powi(k)).collect();
    let report = audit_sparsification(500, 5000, 5, &thresholds, 1, 4.0);
    assert!(report.pass, "{report:?}");
    assert!(report.thresholds.windows(2).all(|w| w[0].max_degree <= w[1].max_degree));
}

#[test]
fn partition_augmentation_small_family() {
    let family = GadgetFamily::new(500, 1, 2, 16, 2, 7);
    let report = validate_partition_augmentation(&family, 60, 1, 0.01).unwrap();
    assert_eq!(report.slice_size, 500);
    assert_eq!(report.augmentable_fraction, 1.0);
    assert!(report.check.pass, "{report:?}");
}

proptest! {
    #[test]
    fn levels_partition_the_rank_space(value in any::<u64>(), delta in 2u32..5000, levels in 1u32..6) {
        let map = LevelMap::new(&InstanceConfig::new(4, delta, levels, 0));
        let r = Rank::new(value, EdgeKey::of(0, 1));
        let i = map.level_of_rank(r);
        prop_assert!((1..=levels as usize).contains(&i));
        prop_assert!(value <= map.threshold(i - 1));
        if i < levels as usize {
            prop_assert!(value > map.threshold(i));
        }
        // Exactly one level claims the rank.
        let claims = (1..=levels as usize)
            .filter(|&j| value <= map.threshold(j - 1) && (j == levels as usize || value > map.threshold(j)))
            .count();
        prop_assert_eq!(claims, 1);
    }

    #[test]
    fn level_is_monotone_in_rank(a in any::<u64>(), b in any::<u64>()) {
        let map = LevelMap::new(&InstanceConfig::new(4, 64, 3, 0));
        let (lo, hi) = (a.min(b), a.max(b));
        let key = EdgeKey::of(0, 1);
        prop_assert!(map.level_of_rank(Rank::new(lo, key)) >= map.level_of_rank(Rank::new(hi, key)));
    }
}
