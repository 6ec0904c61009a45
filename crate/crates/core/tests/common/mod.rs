#![allow(dead_code)]

use std::collections::BTreeSet;

use dynmatch_core::{EdgeKey, Update, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Replay-valid random churn on `n` vertices under degree cap `delta`,
/// deleting with probability `p_del` when any edge is present.
pub fn churn(n: u32, delta: u32, steps: usize, p_del: f64, seed: u64) -> Vec<Update> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present: Vec<EdgeKey> = Vec::new();
    let mut set = BTreeSet::new();
    let mut degree = vec![0u32; n as usize];
    let mut out = Vec::with_capacity(steps);
    while out.len() < steps {
        if !present.is_empty() && rng.gen_bool(p_del) {
            let e = present.swap_remove(rng.gen_range(0..present.len()));
            set.remove(&e);
            degree[e.lo().index()] -= 1;
            degree[e.hi().index()] -= 1;
            out.push(Update::Delete(e.lo(), e.hi()));
        } else {
            let Some(e) = EdgeKey::new(VertexId(rng.gen_range(0..n)), VertexId(rng.gen_range(0..n))) else {
                continue;
            };
            if set.contains(&e) || degree[e.lo().index()] >= delta || degree[e.hi().index()] >= delta {
                continue;
            }
            set.insert(e);
            present.push(e);
            degree[e.lo().index()] += 1;
            degree[e.hi().index()] += 1;
            out.push(Update::Insert(e.lo(), e.hi()));
        }
    }
    out
}
