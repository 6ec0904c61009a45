//! The union matcher against the exact oracle and an independent
//! short-augmenting-path enumerator.

use std::collections::BTreeSet;

use dynmatch_core::final_match::{FinalMatcher, UnionDelta};
use dynmatch_core::oracle::max_matching_exact;
use dynmatch_core::{EdgeKey, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every simple alternating path from a free vertex with at most
/// `max_edges` edges, searched by plain recursion over the union edge list.
fn has_short_path(n: usize, union: &[EdgeKey], answer: &[EdgeKey], max_edges: usize) -> bool {
    let mut adj = vec![Vec::new(); n];
    for e in union {
        adj[e.lo().index()].push(e.hi().index());
        adj[e.hi().index()].push(e.lo().index());
    }
    let mut mate = vec![None; n];
    for e in answer {
        mate[e.lo().index()] = Some(e.hi().index());
        mate[e.hi().index()] = Some(e.lo().index());
    }
    fn dfs(x: usize, len: usize, max: usize, on: &mut Vec<bool>, adj: &[Vec<usize>], mate: &[Option<usize>]) -> bool {
        // x is reached by a matched edge (or is the start); take a free edge.
        for &y in &adj[x] {
            if on[y] || mate[x] == Some(y) || len + 1 > max {
                continue;
            }
            match mate[y] {
                None => return true,
                Some(z) if !on[z] && len + 2 <= max => {
                    on[y] = true;
                    on[z] = true;
                    let found = dfs(z, len + 2, max, on, adj, mate);
                    on[y] = false;
                    on[z] = false;
                    if found {
                        return true;
                    }
                }
                _ => {}
            }
        }
        false
    }
    let mut on = vec![false; n];
    (0..n).filter(|&a| mate[a].is_none()).any(|a| {
        on[a] = true;
        let f = dfs(a, 0, max_edges, &mut on, &adj, &mate);
        on[a] = false;
        f
    })
}

/// Random churn of `sources` independent matchings on `n` vertices.
fn churn_union(n: u32, sources: usize, depth: usize, steps: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fm = FinalMatcher::new(n as usize, sources, depth);
    let mut matchings: Vec<BTreeSet<EdgeKey>> = vec![BTreeSet::new(); sources];
    for step in 0..steps {
        let i = rng.gen_range(0..sources);
        let delta = if !matchings[i].is_empty() && rng.gen_bool(0.45) {
            let e = *matchings[i].iter().nth(rng.gen_range(0..matchings[i].len())).unwrap();
            matchings[i].remove(&e);
            UnionDelta::left(i, e)
        } else {
            let used: BTreeSet<u32> = matchings[i].iter().flat_map(|e| [e.lo().0, e.hi().0]).collect();
            let free: Vec<u32> = (0..n).filter(|v| !used.contains(v)).collect();
            if free.len() < 2 {
                continue;
            }
            let a = free[rng.gen_range(0..free.len())];
            let b = free[rng.gen_range(0..free.len())];
            let Some(e) = EdgeKey::new(VertexId(a), VertexId(b)) else { continue };
            matchings[i].insert(e);
            UnionDelta::joined(i, e)
        };
        fm.union_apply(delta).unwrap();

        let union: Vec<EdgeKey> = matchings.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
        assert_eq!(fm.union_edges(), union);
        assert!(fm.max_degree() <= sources);
        let answer = fm.matching();
        let mut used = vec![false; n as usize];
        for e in &answer {
            assert!(union.binary_search(e).is_ok(), "answer edge {e} not in union");
            assert!(!used[e.lo().index()] && !used[e.hi().index()]);
            used[e.lo().index()] = true;
            used[e.hi().index()] = true;
        }
        assert!(!has_short_path(n as usize, &union, &answer, 2 * depth - 1), "step {step}: short augmenting path left");
        let mu = max_matching_exact(n as usize, &union).unwrap().size;
        assert!(
            answer.len() * (depth + 1) >= mu * depth,
            "step {step}: |answer| = {} below {depth}/{} of μ = {mu}",
            answer.len(),
            depth + 1
        );
        assert!(answer.len() >= matchings[0].len());
    }
}

#[test]
fn degree_four_union_on_64_vertices() {
    for seed in 0..6 {
        churn_union(64, 4, 4, 1500, seed);
    }
}

#[test]
fn shallow_search_still_meets_its_contract() {
    for seed in 0..6 {
        churn_union(40, 3, 1, 800, 100 + seed);
        churn_union(40, 3, 2, 800, 200 + seed);
    }
}

#[test]
fn multiplicity_errors_are_reported() {
    let mut fm = FinalMatcher::new(4, 2, 2);
    let e = EdgeKey::of(0, 1);
    assert!(fm.union_apply(UnionDelta::left(0, e)).is_err());
    fm.union_apply(UnionDelta::joined(0, e)).unwrap();
    assert!(fm.union_apply(UnionDelta::joined(0, e)).is_err());
    fm.union_apply(UnionDelta::joined(1, e)).unwrap();
    assert_eq!(fm.multiplicity(e), 2);
    assert!(fm.union_apply(UnionDelta::joined(5, e)).is_err());
}
