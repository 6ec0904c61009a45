//! The maintained level structure against its from-scratch reconstruction.

mod common;

use std::collections::BTreeSet;

use dynmatch_core::oracle::{diff_pipeline, max_matching_exact, static_reference, static_reference_of};
use dynmatch_core::{EdgeKey, Instance, InstanceConfig, Pipeline, Update, VertexId};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn replay_against_reference(n: u32, delta: u32, levels: u32, steps: usize, seed: u64) {
    let config = InstanceConfig::new(n, delta, levels, 10_000 + seed);
    let mut p = Pipeline::new(config).unwrap();
    for (t, u) in common::churn(n, delta, steps, 0.35, seed).into_iter().enumerate() {
        p.handle_update(u).unwrap();
        let reference = static_reference_of(p.instance());
        if let Some(diff) = diff_pipeline(&p, &reference) {
            panic!("seed {seed} step {t} ({u:?}): {diff}");
        }
    }
}

#[test]
fn two_levels_n32_matches_reference_after_every_update() {
    for seed in 0..6 {
        replay_against_reference(32, 16, 2, 200, seed);
    }
}

#[test]
fn three_levels_matches_reference() {
    for seed in 0..4 {
        replay_against_reference(48, 16, 3, 300, 100 + seed);
    }
}

#[test]
fn one_level_and_tight_cap_match_reference() {
    for seed in 0..4 {
        replay_against_reference(24, 4, 1, 200, 200 + seed);
        replay_against_reference(24, 3, 4, 200, 300 + seed);
    }
}

#[test]
fn dense_small_graph_matches_reference() {
    // Near-complete graphs exercise long cascades and many role flips.
    for seed in 0..4 {
        replay_against_reference(12, 11, 2, 400, 400 + seed);
    }
}

#[test]
fn bulk_build_matches_reference_and_arrival_order_is_irrelevant() {
    let mut inst = Instance::new(InstanceConfig::new(32, 16, 2, 77)).unwrap();
    for u in common::churn(32, 16, 150, 0.0, 5) {
        let Update::Insert(a, b) = u else { unreachable!() };
        inst.admit_edge(a, b).unwrap();
    }
    let reference = static_reference_of(&inst);
    let built = Pipeline::from_instance(inst.clone());
    assert_eq!(diff_pipeline(&built, &reference), None);

    // Same records and tapes, admitted in a shuffled order.
    let mut records: Vec<_> = inst.records().cloned().collect();
    records.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    let mut shuffled = Instance::new(inst.config().clone()).unwrap();
    for r in records {
        shuffled.admit_record(r).unwrap();
    }
    assert_eq!(static_reference_of(&shuffled), reference);
    assert_eq!(
        static_reference(inst.config(), inst.tapes(), inst.records().collect::<Vec<_>>().into_iter().rev()),
        reference
    );
}

#[test]
fn levels_below_the_updated_slice_never_move() {
    let (n, delta, levels) = (64, 16, 3);
    for seed in 0..5 {
        let mut p = Pipeline::new(InstanceConfig::new(n, delta, levels, 500 + seed)).unwrap();
        let mut checked = 0;
        for u in common::churn(n, delta, 500, 0.35, 600 + seed) {
            let (a, b) = match u {
                Update::Insert(a, b) | Update::Delete(a, b) => (a, b),
            };
            let f = EdgeKey::new(a, b).unwrap();
            let before = p.levels().to_vec();
            let was_in_base = p.base().is_matched(f);
            let report = p.handle_update(u).unwrap();
            let in_base = match u {
                Update::Insert(..) => p.base().is_matched(f),
                Update::Delete(..) => was_in_base,
            };
            if !in_base {
                assert!(report.base.is_empty());
                continue;
            }
            let rank = match u {
                Update::Insert(..) => p.base().rank(f).unwrap(),
                Update::Delete(..) => before_rank(&report, f),
            };
            let j = p.instance().level_of_rank(rank);
            assert_eq!(report.trigger_level, Some(j));
            for k in j + 1..=levels as usize {
                assert_eq!(p.level(k), &before[k - 1], "level {k} moved after update in level {j}");
                assert_eq!(report.level_mutations[k - 1], 0);
            }
            checked += 1;
        }
        assert!(checked > 0);
    }
}

fn before_rank(report: &dynmatch_core::UpdateReport, f: EdgeKey) -> dynmatch_core::Rank {
    let r = report.base.min_rank.unwrap();
    assert_eq!(r.tiebreak(), f);
    r
}

#[test]
fn candidate_scan_covers_every_second_stage_edge() {
    let (n, delta, levels) = (48u32, 16, 3u32);
    let mut p = Pipeline::new(InstanceConfig::new(n, delta, levels, 42)).unwrap();
    for u in common::churn(n, delta, 300, 0.3, 43) {
        p.handle_update(u).unwrap();
        for v in (0..n).map(VertexId) {
            for j in 1..=levels as usize {
                let alpha = p.instance().level_map().alpha(j);
                let scanned: BTreeSet<EdgeKey> = p.base().neighbors_above(v, alpha).into_iter().map(|(e, _)| e).collect();
                for i in 1..=j {
                    for e in p.level(i).second_stage.incident(v) {
                        assert!(scanned.contains(&e), "G_{i} edge {e} at {v:?} missed by the scan at alpha of level {j}");
                    }
                }
            }
        }
    }
}

#[test]
fn stored_roles_match_recomputation() {
    let (n, delta, levels) = (40u32, 8, 2u32);
    let mut p = Pipeline::new(InstanceConfig::new(n, delta, levels, 8)).unwrap();
    for u in common::churn(n, delta, 300, 0.4, 9) {
        p.handle_update(u).unwrap();
        for v in (0..n).map(VertexId) {
            for i in 1..=levels as usize {
                assert_eq!(p.level(i).roles[v.index()], p.role_of(v, i));
            }
        }
    }
}

#[test]
fn answer_is_at_least_base_and_base_is_half_optimal() {
    let (n, delta) = (40u32, 8);
    let mut p = Pipeline::new(InstanceConfig::new(n, delta, 2, 3)).unwrap();
    for u in common::churn(n, delta, 400, 0.35, 4) {
        p.handle_update(u).unwrap();
        let edges: Vec<EdgeKey> = p.instance().records().map(|r| r.key).collect();
        let mu = max_matching_exact(n as usize, &edges).unwrap().size;
        assert!(p.answer_size() >= p.base().size());
        assert!(2 * p.base().size() >= mu);
    }
}

#[test]
fn empty_and_single_edge_answers() {
    let mut p = Pipeline::new(InstanceConfig::new(5, 4, 2, 1)).unwrap();
    assert!(p.current_answer().is_empty());
    p.handle_update(Update::insert(3, 1)).unwrap();
    assert_eq!(p.current_answer(), vec![EdgeKey::of(1, 3)]);
    p.handle_update(Update::delete(1, 3)).unwrap();
    assert!(p.current_answer().is_empty());
}

#[test]
fn heavy_sampling_exercises_second_stage_and_still_matches() {
    let mut mutations = 0;
    let mut matched_second_stage = 0;
    for (seed, levels) in [(0u64, 2u32), (1, 3), (2, 2), (3, 3)] {
        let config = InstanceConfig::new(64, 16, levels, 900 + seed).with_sample_p(0.12);
        let mut p = Pipeline::new(config).unwrap();
        for (t, u) in common::churn(64, 16, 500, 0.35, 950 + seed).into_iter().enumerate() {
            let report = p.handle_update(u).unwrap();
            mutations += report.level_mutations.iter().sum::<usize>();
            matched_second_stage += p.levels().iter().map(|l| l.second_stage.size()).sum::<usize>();
            if let Some(diff) = diff_pipeline(&p, &static_reference_of(p.instance())) {
                panic!("seed {seed} step {t}: {diff}");
            }
        }
    }
    assert!(mutations > 100, "only {mutations} second-stage mutations");
    assert!(matched_second_stage > 100);
}
