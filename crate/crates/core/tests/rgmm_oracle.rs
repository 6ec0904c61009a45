//! Dynamic greedy maintenance checked against from-scratch recomputation.

use std::collections::BTreeMap;

use dynmatch_core::{EdgeKey, MatchingState, Rank, VertexId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Textbook greedy over a rank-sorted edge list, sharing no code with the
/// library. Returns the matched set and the eliminator rank of every edge.
fn naive_greedy(n: usize, edges: &BTreeMap<EdgeKey, Rank>) -> (Vec<EdgeKey>, BTreeMap<EdgeKey, Rank>) {
    let mut order: Vec<(Rank, EdgeKey)> = edges.iter().map(|(&k, &r)| (r, k)).collect();
    order.sort();
    let mut taken = vec![false; n];
    let mut matched = Vec::new();
    for &(_, e) in &order {
        let (u, v) = (e.lo().index(), e.hi().index());
        if !taken[u] && !taken[v] {
            taken[u] = true;
            taken[v] = true;
            matched.push(e);
        }
    }
    // Eliminator: the lowest-rank matched edge sharing an endpoint with e.
    let mut elim = BTreeMap::new();
    for &e in edges.keys() {
        let best = matched
            .iter()
            .filter(|m| m.contains(e.lo()) || m.contains(e.hi()))
            .map(|m| edges[m])
            .min()
            .expect("maximality: every edge touches a matched edge");
        elim.insert(e, best);
    }
    matched.sort();
    (matched, elim)
}

fn check_against_naive(state: &MatchingState, n: usize, edges: &BTreeMap<EdgeKey, Rank>) {
    let (matched, elim) = naive_greedy(n, edges);
    assert_eq!(state.matching(), matched);
    for (e, r) in elim {
        assert_eq!(state.eliminator_rank(e), Some(r), "eliminator of {e}");
    }
}

fn random_stream(n: u32, steps: usize, seed: u64) -> Vec<(bool, EdgeKey, Rank)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present: Vec<EdgeKey> = Vec::new();
    let mut out = Vec::new();
    for _ in 0..steps {
        if !present.is_empty() && rng.gen_bool(0.4) {
            let i = rng.gen_range(0..present.len());
            let e = present.swap_remove(i);
            out.push((false, e, Rank::ZERO));
        } else {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            let Some(e) = EdgeKey::new(VertexId(u), VertexId(v)) else { continue };
            if present.contains(&e) {
                continue;
            }
            present.push(e);
            out.push((true, e, Rank::new(rng.gen(), e)));
        }
    }
    out
}

fn replay_and_check(n: u32, steps: usize, seed: u64) {
    let mut state = MatchingState::new(n as usize);
    let mut edges = BTreeMap::new();
    for (ins, e, r) in random_stream(n, steps, seed) {
        let before = state.matching();
        let delta = if ins {
            edges.insert(e, r);
            state.apply_insert(e, r).unwrap()
        } else {
            edges.remove(&e);
            state.apply_delete(e).unwrap()
        };
        let rebuilt = MatchingState::build_static(n as usize, edges.iter().map(|(&k, &r)| (k, r)));
        assert_eq!(state, rebuilt, "seed {seed}: dynamic state diverged");
        // Applying the delta to the old matching gives the new one.
        let mut applied: Vec<EdgeKey> = before.into_iter().filter(|e| !delta.left.contains(e)).collect();
        applied.extend(delta.joined.iter().copied());
        applied.sort();
        assert_eq!(applied, state.matching());
        assert!(delta.left.iter().all(|e| !delta.joined.contains(e)));
    }
    check_against_naive(&state, n as usize, &edges);
}

#[test]
fn eight_vertex_streams_match_static() {
    for seed in 0..40 {
        replay_and_check(8, 50, seed);
    }
}

#[test]
fn denser_streams_match_static() {
    for seed in 0..5 {
        replay_and_check(40, 600, 1000 + seed);
    }
}

#[test]
fn build_static_agrees_with_naive_greedy() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let n = 12;
        let mut edges = BTreeMap::new();
        for _ in 0..30 {
            if let Some(e) = EdgeKey::new(VertexId(rng.gen_range(0..n)), VertexId(rng.gen_range(0..n))) {
                edges.insert(e, Rank::new(rng.gen(), e));
            }
        }
        let s = MatchingState::build_static(n as usize, edges.iter().map(|(&k, &r)| (k, r)));
        check_against_naive(&s, n as usize, &edges);
    }
}

/// Edges whose eliminator rank was below the updated edge's rank keep their
/// matching status and eliminator.
#[test]
fn updates_are_localized_above_the_updated_rank() {
    let n = 30u32;
    let mut state = MatchingState::new(n as usize);
    for (ins, e, r) in random_stream(n, 800, 77) {
        let before = state.clone();
        let pivot = if ins { r } else { state.rank(e).unwrap() };
        if ins {
            state.apply_insert(e, r).unwrap();
        } else {
            state.apply_delete(e).unwrap();
        }
        for (f, _) in before.edges() {
            if f == e {
                continue;
            }
            let old = before.eliminator_rank(f).unwrap();
            if old < pivot {
                assert_eq!(state.eliminator_rank(f), Some(old));
                assert_eq!(state.is_matched(f), before.is_matched(f));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximal_and_eliminator_is_min_incident_matched(seed in any::<u64>(), n in 3u32..16, steps in 1usize..120) {
        let mut state = MatchingState::new(n as usize);
        for (ins, e, r) in random_stream(n, steps, seed) {
            if ins { state.apply_insert(e, r).unwrap(); } else { state.apply_delete(e).unwrap(); }
        }
        for (e, r) in state.edges() {
            let ku = state.matched_rank(e.lo());
            let kv = state.matched_rank(e.hi());
            prop_assert!(!(ku.is_one() && kv.is_one()), "edge {} has two free endpoints", e);
            prop_assert_eq!(state.eliminator_rank(e), Some(ku.min(kv)));
            prop_assert_eq!(state.eliminator_rank(e) == Some(r), state.is_matched(e));
        }
    }
}
