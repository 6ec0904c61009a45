//! Validators for the approximation analysis: per-level augmentation on a
//! controlled gadget family, the pivot-level construction, and counting
//! 3-augmentable edges.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::OracleError;
use crate::graph::{Instance, InstanceConfig};
use crate::oracle::reference::static_reference_of;
use crate::oracle::{BoundCheck, Estimate};
use crate::rank::{EdgeKey, Rank, VertexId};

/// `((1 − δ)p/4 − 4p²)`, the expected fraction of a slice whose edges get
/// both endpoints matched at their level.
pub fn partition_bound_coefficient(p: f64, delta: f64) -> f64 {
    (1.0 - delta) * p / 4.0 - 4.0 * p * p
}

/// Disjoint paths `a − b − c − d` (vertex IDs `4g..4g+4`) plus noise edges
/// from each gadget's middle vertices to other gadgets' ends.
#[derive(Clone, Debug, Serialize)]
pub struct GadgetFamily {
    pub gadgets: usize,
    pub levels: u32,
    pub delta_cap: u32,
    pub sample_p: f64,
    /// Level whose slice receives every middle edge.
    pub target_level: usize,
    pub noise: Vec<EdgeKey>,
}

impl GadgetFamily {
    pub fn new(gadgets: usize, noise_per_gadget: usize, levels: u32, delta_cap: u32, target_level: usize, seed: u64) -> Self {
        assert!(gadgets >= 2 && (1..=levels as usize).contains(&target_level));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut degree = vec![0u32; 4 * gadgets];
        for g in 0..gadgets {
            degree[4 * g] = 1;
            degree[4 * g + 1] = 2;
            degree[4 * g + 2] = 2;
            degree[4 * g + 3] = 1;
        }
        let mut noise = BTreeSet::new();
        for g in 0..gadgets {
            for _ in 0..noise_per_gadget {
                let x = 4 * g + rng.gen_range(1..3);
                let h = (g + rng.gen_range(1..gadgets)) % gadgets;
                let y = 4 * h + if rng.gen_bool(0.5) { 0 } else { 3 };
                let e = EdgeKey::of(x as u32, y as u32);
                if degree[x] < delta_cap && degree[y] < delta_cap && noise.insert(e) {
                    degree[x] += 1;
                    degree[y] += 1;
                }
            }
        }
        GadgetFamily {
            gadgets,
            levels,
            delta_cap,
            sample_p: crate::graph::DEFAULT_SAMPLE_P,
            target_level,
            noise: noise.into_iter().collect(),
        }
    }

    pub fn with_sample_p(mut self, p: f64) -> Self {
        self.sample_p = p;
        self
    }

    pub fn middle(&self, g: usize) -> EdgeKey {
        EdgeKey::of(4 * g as u32 + 1, 4 * g as u32 + 2)
    }

    /// `{ab, cd}` over all gadgets: a perfect matching of the family.
    pub fn optimum(&self) -> Vec<EdgeKey> {
        (0..self.gadgets as u32)
            .flat_map(|g| [EdgeKey::of(4 * g, 4 * g + 1), EdgeKey::of(4 * g + 2, 4 * g + 3)])
            .collect()
    }

    /// Instance with fresh tapes from `algo_seed`. Middle edges get the
    /// lowest `π_0` ranks, inside the target level; every other edge ranks
    /// above all of them.
    pub fn instance(&self, algo_seed: u64) -> Result<Instance, OracleError> {
        let config = InstanceConfig::new(4 * self.gadgets as u32, self.delta_cap, self.levels, algo_seed)
            .with_sample_p(self.sample_p);
        let mut inst = Instance::new(config)?;
        let map = inst.level_map().clone();
        let lo = if self.target_level == self.levels as usize { 0 } else { map.threshold(self.target_level) };
        let hi = map.threshold(self.target_level - 1);
        // Middle ranks fill the bottom hundredth of the target interval.
        let top = lo + (hi - lo) / 100;
        let mut rng = ChaCha8Rng::seed_from_u64(algo_seed ^ 0x9e37_79b9_7f4a_7c15);
        for g in 0..self.gadgets {
            let e = self.middle(g);
            let mut rec = inst.draw_record(e);
            rec.ranks[0] = Rank::new(rng.gen_range(lo + 1..=top), e);
            inst.admit_record(rec)?;
        }
        let others = self
            .optimum()
            .into_iter()
            .chain(self.noise.iter().copied())
            .collect::<Vec<_>>();
        for e in others {
            let mut rec = inst.draw_record(e);
            rec.ranks[0] = Rank::new(rng.gen_range(top + 1..u64::MAX), e);
            inst.admit_record(rec)?;
        }
        Ok(inst)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AugmentationReport {
    pub check: BoundCheck,
    pub coefficient: f64,
    pub slice_size: usize,
    /// Fraction of slice edges that were 3-augmentable, minimum over trials.
    pub augmentable_fraction: f64,
}

/// Monte Carlo over the level randomness: count slice edges with both
/// endpoints matched at the target level, against `coefficient · |S_i|`
/// where the coefficient uses `hypothesis_delta`.
pub fn validate_partition_augmentation(
    family: &GadgetFamily,
    trials: usize,
    seed: u64,
    hypothesis_delta: f64,
) -> Result<AugmentationReport, OracleError> {
    let level = family.target_level;
    let opt = family.optimum();
    let mut samples = Vec::with_capacity(trials);
    let mut slice_size = 0;
    let mut augmentable_fraction: f64 = 1.0;
    for t in 0..trials {
        let inst = family.instance(seed.wrapping_add(t as u64))?;
        let reference = static_reference_of(&inst);
        let state = &reference.levels[level - 1];
        slice_size = state.members.len();
        let aug: BTreeSet<EdgeKey> = three_augmentable(inst.n(), &reference.base.matching(), &opt)
            .into_iter()
            .collect();
        let in_slice_aug = state.members.iter().filter(|e| aug.contains(e)).count();
        augmentable_fraction = augmentable_fraction.min(in_slice_aug as f64 / slice_size.max(1) as f64);
        let both = state
            .members
            .iter()
            .filter(|e| {
                state.second_stage.matched_edge(e.lo()).is_some() && state.second_stage.matched_edge(e.hi()).is_some()
            })
            .count();
        samples.push(both as f64);
    }
    let coefficient = partition_bound_coefficient(family.sample_p, hypothesis_delta);
    Ok(AugmentationReport {
        check: BoundCheck::new(Estimate::from_samples(&samples), coefficient * slice_size as f64),
        coefficient,
        slice_size,
        augmentable_fraction,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PivotLevel {
    pub level: usize,
}

/// `a · 2^shift ≥ b` without overflow.
fn scaled_ge(a: u64, shift: u32, b: u64) -> bool {
    if a == 0 {
        return b == 0;
    }
    if shift >= 64 {
        return true;
    }
    (a as u128) << shift >= b as u128
}

/// Smallest level `i` with `|S_i| ≥ 2^{12i − 13L} |M_0|`, checked against
/// both pivot inequalities: `|S_i| ≥ 2^{−13L}|M_0|` and
/// `|S_i| > 2^{11} Σ_{j<i} |S_j|`.
pub fn find_pivot_level(sizes: &[u64]) -> Result<PivotLevel, OracleError> {
    let levels = sizes.len() as u32;
    let total: u64 = sizes.iter().sum();
    if total == 0 {
        return Err(OracleError::EmptyBase);
    }
    let level = (1..=levels)
        .find(|&i| scaled_ge(sizes[i as usize - 1], 13 * levels - 12 * i, total))
        .ok_or(OracleError::NoPivot)? as usize;
    let s = sizes[level - 1];
    if !scaled_ge(s, 13 * levels, total) {
        return Err(OracleError::PivotInequality { level, which: "size" });
    }
    let below: u128 = sizes[..level - 1].iter().map(|&x| x as u128).sum();
    if (s as u128) <= (below << 11) {
        return Err(OracleError::PivotInequality { level, which: "dominance" });
    }
    Ok(PivotLevel { level })
}

fn mates(n: usize, matching: &[EdgeKey]) -> Vec<Option<VertexId>> {
    let mut mate = vec![None; n];
    for e in matching {
        mate[e.lo().index()] = Some(e.hi());
        mate[e.hi().index()] = Some(e.lo());
    }
    mate
}

/// Edges `bc ∈ M_0` that sit in the middle of a path `a − b − c − d` of
/// `OPT ⊕ M_0` with `ab, cd ∈ OPT` and `a, d` free in `M_0`.
pub fn three_augmentable(n: usize, m0: &[EdgeKey], opt: &[EdgeKey]) -> Vec<EdgeKey> {
    let base = mates(n, m0);
    let o = mates(n, opt);
    m0.iter()
        .copied()
        .filter(|e| match (o[e.lo().index()], o[e.hi().index()]) {
            (Some(a), Some(d)) => base[a.index()].is_none() && base[d.index()].is_none(),
            _ => false,
        })
        .collect()
}

pub fn count_3_augmentable(n: usize, m0: &[EdgeKey], opt: &[EdgeKey]) -> usize {
    three_augmentable(n, m0, opt).len()
}

/// A clique on `0..half` with a pendant edge `i - (i + half)` at every clique
/// vertex.
pub fn clique_plus_matching(half: usize) -> Vec<EdgeKey> {
    let mut out = Vec::new();
    for i in 0..half {
        for j in i + 1..half {
            out.push(EdgeKey::of(i as u32, j as u32));
        }
        out.push(EdgeKey::of(i as u32, (i + half) as u32));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_at_three_percent() {
        assert!((partition_bound_coefficient(0.03, 0.01) - 0.003825).abs() < 1e-12);
        assert!(partition_bound_coefficient(0.03, 1.0) <= 0.0);
    }

    #[test]
    fn pivot_examples() {
        assert_eq!(find_pivot_level(&[0, 10]).unwrap().level, 2);
        assert_eq!(find_pivot_level(&[10, 0]).unwrap().level, 1);
        assert_eq!(find_pivot_level(&[0, 0]), Err(OracleError::EmptyBase));
    }

    #[test]
    fn three_path_counts_once() {
        let m0 = [EdgeKey::of(1, 2)];
        let opt = [EdgeKey::of(0, 1), EdgeKey::of(2, 3)];
        assert_eq!(count_3_augmentable(4, &m0, &opt), 1);
        assert_eq!(count_3_augmentable(4, &opt, &opt), 0);
    }

    #[test]
    fn gadget_slice_is_all_middles() {
        let fam = GadgetFamily::new(20, 1, 2, 16, 2, 5);
        let inst = fam.instance(9).unwrap();
        let r = static_reference_of(&inst);
        let middles: Vec<EdgeKey> = (0..20).map(|g| fam.middle(g)).collect();
        assert_eq!(r.base.matching(), middles);
        assert_eq!(r.levels[1].members.iter().copied().collect::<Vec<_>>(), middles);
        assert_eq!(count_3_augmentable(inst.n(), &middles, &fam.optimum()), 20);
    }

    #[test]
    fn clique_pm_shape() {
        let e = clique_plus_matching(4);
        assert_eq!(e.len(), 6 + 4);
    }
}
