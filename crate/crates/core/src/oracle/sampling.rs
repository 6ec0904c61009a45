//! Greedy matching under vertex subsampling of one side of a bipartite graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::exact::max_matching_bipartite;
use crate::oracle::{BoundCheck, Estimate};
use crate::rank::{EdgeKey, Rank};

/// A bipartite graph `(V, U, E)` with a ranking and a fixed matching `M`.
#[derive(Clone, Debug)]
pub struct SamplingInstance {
    pub n: usize,
    /// `true` for vertices of `V`, the subsampled side.
    pub in_v: Vec<bool>,
    pub edges: Vec<(EdgeKey, Rank)>,
    pub matching: Vec<EdgeKey>,
}

impl SamplingInstance {
    pub fn v_size(&self) -> usize {
        self.in_v.iter().filter(|&&b| b).count()
    }

    /// `p(|M| − 2p|V|)`.
    pub fn lower_bound(&self, p: f64) -> f64 {
        p * (self.matching.len() as f64 - 2.0 * p * self.v_size() as f64)
    }

    /// `K_{k,k}` with `V = 0..k`, a perfect matching `i - (k+i)` and random ranks.
    pub fn complete_bipartite(k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                let e = EdgeKey::of(a as u32, (k + b) as u32);
                edges.push((e, Rank::new(rng.gen(), e)));
            }
        }
        SamplingInstance {
            n: 2 * k,
            in_v: (0..2 * k).map(|v| v < k).collect(),
            edges,
            matching: (0..k).map(|a| EdgeKey::of(a as u32, (k + a) as u32)).collect(),
        }
    }

    /// Random bipartite graph on `nv + nu` vertices with edge density
    /// `density`, random ranks, and a maximum matching as `M`.
    pub fn random(nv: usize, nu: usize, density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = nv + nu;
        let mut edges = Vec::new();
        for a in 0..nv {
            for b in nv..n {
                if rng.gen_bool(density) {
                    let e = EdgeKey::of(a as u32, b as u32);
                    edges.push((e, Rank::new(rng.gen(), e)));
                }
            }
        }
        let in_v: Vec<bool> = (0..n).map(|v| v < nv).collect();
        let keys: Vec<EdgeKey> = edges.iter().map(|&(e, _)| e).collect();
        let matching = max_matching_bipartite(n, &keys, &in_v).expect("small instance").witness;
        SamplingInstance { n, in_v, edges, matching }
    }
}

/// Monte Carlo estimate of `E_W[X]` against `p(|M| − 2p|V|)`.
pub fn validate_vertex_sampling(inst: &SamplingInstance, p: f64, trials: usize, seed: u64) -> BoundCheck {
    let mut order = inst.edges.clone();
    order.sort_by_key(|&(_, r)| r);
    let v_of = |e: EdgeKey| if inst.in_v[e.lo().index()] { e.lo() } else { e.hi() };
    let m_vertices: Vec<usize> = inst.matching.iter().map(|&e| v_of(e).index()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_w = vec![false; inst.n];
    let mut taken = vec![false; inst.n];
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        for v in 0..inst.n {
            in_w[v] = inst.in_v[v] && rng.gen::<f64>() < p;
            taken[v] = false;
        }
        for &(e, _) in &order {
            let v = v_of(e).index();
            let u = e.other(v_of(e)).index();
            if in_w[v] && !taken[v] && !taken[u] {
                taken[v] = true;
                taken[u] = true;
            }
        }
        samples.push(m_vertices.iter().filter(|&&v| taken[v]).count() as f64);
    }
    BoundCheck::new(Estimate::from_samples(&samples), inst.lower_bound(p))
}
