//! Degree audit of eliminator-filtered subgraphs under random rankings.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::rank::{EdgeKey, Rank};
use crate::rgmm::MatchingState;

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdAudit {
    pub threshold: f64,
    /// Maximum over trials of the filtered subgraph's max degree.
    pub max_degree: usize,
    /// `max_degree / (threshold⁻¹ · ln n)`.
    pub fitted_c: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub gate_c: f64,
    pub thresholds: Vec<ThresholdAudit>,
    /// Largest fitted constant over all positive thresholds.
    pub fitted_c: f64,
    pub pass: bool,
}

/// Max degree of `{e : eliminator_rank(e) > threshold}` in `state`.
pub fn filtered_max_degree(state: &MatchingState, threshold: f64) -> usize {
    if threshold >= 1.0 {
        return 0;
    }
    let floor = Rank::floor(Rank::fixed_from_f64(threshold));
    let mut degree = vec![0usize; state.n()];
    for (e, _) in state.edges() {
        if state.eliminator_rank(e).expect("present") > floor {
            degree[e.lo().index()] += 1;
            degree[e.hi().index()] += 1;
        }
    }
    degree.into_iter().max().unwrap_or(0)
}

/// `m` distinct uniform edges on `n` vertices.
pub fn random_graph(n: usize, m: usize, rng: &mut impl Rng) -> Vec<EdgeKey> {
    let pairs = n * (n - 1) / 2;
    assert!(m <= pairs, "cannot place {m} edges on {n} vertices");
    let mut out: Vec<EdgeKey> = sample(rng, pairs, m).into_iter().map(|i| pair_of(n, i)).collect();
    out.sort();
    out
}

fn pair_of(n: usize, mut i: usize) -> EdgeKey {
    let mut u = 0;
    while i >= n - 1 - u {
        i -= n - 1 - u;
        u += 1;
    }
    EdgeKey::of(u as u32, (u + 1 + i) as u32)
}

pub fn audit_sparsification(
    n: usize,
    m: usize,
    trials: usize,
    thresholds: &[f64],
    seed: u64,
    gate_c: f64,
) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = vec![0usize; thresholds.len()];
    for _ in 0..trials.max(1) {
        let edges = random_graph(n, m, &mut rng);
        let state = MatchingState::build_static(n, edges.iter().map(|&e| (e, Rank::new(rng.gen(), e))));
        for (w, &p) in worst.iter_mut().zip(thresholds) {
            *w = (*w).max(filtered_max_degree(&state, p));
        }
    }
    let ln_n = (n as f64).ln();
    let per: Vec<ThresholdAudit> = thresholds
        .iter()
        .zip(&worst)
        .map(|(&p, &d)| {
            let scale = ln_n / p;
            ThresholdAudit {
                threshold: p,
                max_degree: d,
                fitted_c: if p > 0.0 { d as f64 / scale } else { f64::NAN },
                bound: gate_c * scale,
            }
        })
        .collect();
    let fitted_c = per
        .iter()
        .filter(|t| t.threshold > 0.0)
        .map(|t| t.fitted_c)
        .fold(0.0, f64::max);
    let pass = per.iter().all(|t| t.threshold <= 0.0 || t.max_degree as f64 <= t.bound);
    AuditReport { seed, n, m, trials, gate_c, thresholds: per, fitted_c, pass }
}

/// Max degree of a plain edge list.
pub fn max_degree(n: usize, edges: &[EdgeKey]) -> usize {
    let mut degree = vec![0usize; n];
    for e in edges {
        for v in e.endpoints() {
            degree[v.index()] += 1;
        }
    }
    degree.into_iter().max().unwrap_or(0)
}
