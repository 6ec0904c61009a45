//! The blossom oracle against brute force, Hopcroft-Karp and known values.

use dynmatch_core::oracle::{augmenting_path, max_matching_bipartite, max_matching_exact, max_matching_warm};
use dynmatch_core::{EdgeKey, VertexId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximum matching by exhaustive branching on the lowest free vertex.
fn brute_force(n: usize, edges: &[EdgeKey]) -> usize {
    fn go(v: usize, n: usize, adj: &[Vec<usize>], used: &mut [bool]) -> usize {
        let Some(v) = (v..n).find(|&x| !used[x]) else { return 0 };
        used[v] = true;
        let mut best = go(v + 1, n, adj, used);
        for &u in &adj[v] {
            if !used[u] {
                used[u] = true;
                best = best.max(1 + go(v + 1, n, adj, used));
                used[u] = false;
            }
        }
        used[v] = false;
        best
    }
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.lo().index()].push(e.hi().index());
        adj[e.hi().index()].push(e.lo().index());
    }
    go(0, n, &adj, &mut vec![false; n])
}

fn is_matching_of(n: usize, edges: &[EdgeKey], m: &[EdgeKey]) -> bool {
    let mut used = vec![false; n];
    m.iter().all(|e| {
        let ok = edges.contains(e) && !used[e.lo().index()] && !used[e.hi().index()];
        used[e.lo().index()] = true;
        used[e.hi().index()] = true;
        ok
    })
}

fn random_edges(n: u32, m: usize, rng: &mut impl Rng) -> Vec<EdgeKey> {
    let mut out = Vec::new();
    while out.len() < m {
        if let Some(e) = EdgeKey::new(VertexId(rng.gen_range(0..n)), VertexId(rng.gen_range(0..n))) {
            if !out.contains(&e) {
                out.push(e);
            }
        }
    }
    out
}

fn petersen() -> Vec<EdgeKey> {
    let mut e = Vec::new();
    for i in 0..5u32 {
        e.push(EdgeKey::of(i, (i + 1) % 5));
        e.push(EdgeKey::of(i, i + 5));
        e.push(EdgeKey::of(5 + i, 5 + (i + 2) % 5));
    }
    e
}

#[test]
fn petersen_has_a_perfect_matching() {
    let r = max_matching_exact(10, &petersen()).unwrap();
    assert_eq!(r.size, 5);
    assert_eq!(brute_force(10, &petersen()), 5);
    assert!(is_matching_of(10, &petersen(), &r.witness));
}

#[test]
fn agrees_with_brute_force_up_to_14_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..400 {
        let n = rng.gen_range(2..=14u32);
        let max_m = (n * (n - 1) / 2) as usize;
        let m = rng.gen_range(0..=max_m);
        let edges = random_edges(n, m, &mut rng);
        let r = max_matching_exact(n as usize, &edges).unwrap();
        assert_eq!(r.size, brute_force(n as usize, &edges), "edges {edges:?}");
        assert!(is_matching_of(n as usize, &edges, &r.witness));
        assert!(augmenting_path(n as usize, &edges, &r.witness).is_none());
    }
}

#[test]
fn returned_augmenting_paths_are_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.gen_range(4..=30u32);
        let edges = random_edges(n, rng.gen_range(3..=(2 * n as usize).min((n * (n - 1) / 2) as usize)), &mut rng);
        // Any maximal matching from a random order.
        let mut order = edges.clone();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut used = vec![false; n as usize];
        let m: Vec<EdgeKey> = order
            .into_iter()
            .filter(|e| {
                let free = !used[e.lo().index()] && !used[e.hi().index()];
                if free {
                    used[e.lo().index()] = true;
                    used[e.hi().index()] = true;
                }
                free
            })
            .collect();
        let mu = max_matching_exact(n as usize, &edges).unwrap().size;
        match augmenting_path(n as usize, &edges, &m) {
            None => assert_eq!(m.len(), mu),
            Some(path) => {
                assert!(m.len() < mu);
                assert_eq!(path.len() % 2, 0);
                let mut seen = std::collections::BTreeSet::new();
                assert!(path.iter().all(|v| seen.insert(*v)), "path repeats a vertex");
                assert!(!used[path[0].index()] && !used[path[path.len() - 1].index()]);
                for (i, w) in path.windows(2).enumerate() {
                    let e = EdgeKey::new(w[0], w[1]).unwrap();
                    assert!(edges.contains(&e));
                    assert_eq!(m.contains(&e), i % 2 == 1);
                }
            }
        }
    }
}

#[test]
fn warm_start_from_a_stale_matching_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 200u32;
    let mut edges = random_edges(n, 300, &mut rng);
    let mut warm = max_matching_exact(n as usize, &edges).unwrap().witness;
    for _ in 0..200 {
        if rng.gen_bool(0.5) {
            edges.swap_remove(rng.gen_range(0..edges.len()));
        } else {
            edges.extend(random_edges(n, 1, &mut rng).into_iter().filter(|e| !edges.contains(e)).collect::<Vec<_>>());
        }
        let w = max_matching_warm(n as usize, &edges, &warm, 2000).unwrap();
        let cold = max_matching_exact(n as usize, &edges).unwrap();
        assert_eq!(w.size, cold.size);
        warm = w.witness;
    }
}

#[test]
fn bipartite_fast_path_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let (a, b) = (rng.gen_range(1..20u32), rng.gen_range(1..20u32));
        let mut edges = Vec::new();
        for x in 0..a {
            for y in 0..b {
                if rng.gen_bool(0.2) {
                    edges.push(EdgeKey::of(x, a + y));
                }
            }
        }
        let n = (a + b) as usize;
        let left: Vec<bool> = (0..n).map(|v| v < a as usize).collect();
        let hk = max_matching_bipartite(n, &edges, &left).unwrap();
        assert!(is_matching_of(n, &edges, &hk.witness));
        assert_eq!(hk.size, max_matching_exact(n, &edges).unwrap().size);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn odd_cycles_and_paths(k in 1usize..40) {
        let cycle: Vec<EdgeKey> = (0..2 * k + 1).map(|i| EdgeKey::of(i as u32, ((i + 1) % (2 * k + 1)) as u32)).collect();
        prop_assert_eq!(max_matching_exact(2 * k + 1, &cycle).unwrap().size, k);
        let path: Vec<EdgeKey> = (0..2 * k - 1).map(|i| EdgeKey::of(i as u32, i as u32 + 1)).collect();
        prop_assert_eq!(max_matching_exact(2 * k, &path).unwrap().size, k);
    }
}
