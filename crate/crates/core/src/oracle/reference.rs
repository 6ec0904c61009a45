//! From-scratch construction of the whole level structure.
//!
//! Each step is computed directly from its definition over the current edge
//! set and random tape, without reusing any incremental bookkeeping: a naive
//! greedy pass for `M_0`, set comprehensions for `U_i`, `V'^A_i`, `V'^B_i` and
//! the side splits, an edge filter for `G_i`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::OracleError;
use crate::graph::{EdgeRecord, Instance, InstanceConfig, LevelMap, Side, VertexTape};
use crate::oracle::exact::{max_matching_exact, ExactMatchingResult};
use crate::pipeline::{Pipeline, VertexRole};
use crate::rank::{EdgeKey, Rank, VertexId};
use crate::rgmm::MatchingState;

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceLevel {
    pub members: BTreeSet<EdgeKey>,
    pub roles: Vec<VertexRole>,
    pub second_stage: MatchingState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceState {
    pub base: MatchingState,
    /// Level `i` at index `i - 1`.
    pub levels: Vec<ReferenceLevel>,
}

impl ReferenceState {
    /// Edges of `M_0 ∪ M_1 ∪ ... ∪ M_L`, deduplicated and sorted.
    pub fn union_edges(&self) -> Vec<EdgeKey> {
        let mut all: BTreeSet<EdgeKey> = self.base.matching().into_iter().collect();
        for level in &self.levels {
            all.extend(level.second_stage.matching());
        }
        all.into_iter().collect()
    }

    /// Maximum matching of the union, the reference's final answer.
    pub fn answer(&self) -> Result<ExactMatchingResult, OracleError> {
        max_matching_exact(self.base.n(), &self.union_edges())
    }
}

fn naive_greedy(n: usize, edges: &[(EdgeKey, Rank)]) -> Vec<Option<EdgeKey>> {
    let mut order = edges.to_vec();
    order.sort_by_key(|&(_, r)| r);
    let mut matched: Vec<Option<EdgeKey>> = vec![None; n];
    for (e, _) in order {
        if matched[e.lo().index()].is_none() && matched[e.hi().index()].is_none() {
            matched[e.lo().index()] = Some(e);
            matched[e.hi().index()] = Some(e);
        }
    }
    matched
}

/// The full level structure of the given graph and tapes.
pub fn static_reference<'a, I>(config: &InstanceConfig, tapes: &[VertexTape], records: I) -> ReferenceState
where
    I: IntoIterator<Item = &'a EdgeRecord>,
{
    let records: Vec<&EdgeRecord> = records.into_iter().collect();
    let n = config.n as usize;
    let levels = config.levels as usize;
    let map = LevelMap::new(config);

    let base_edges: Vec<(EdgeKey, Rank)> = records.iter().map(|r| (r.key, r.rank(0))).collect();
    let m0 = naive_greedy(n, &base_edges);
    let base = MatchingState::build_static(n, base_edges.iter().copied());

    let by_key: BTreeMap<EdgeKey, &EdgeRecord> = records.iter().map(|r| (r.key, *r)).collect();
    let m0_edges: BTreeSet<EdgeKey> = m0.iter().flatten().copied().collect();
    debug_assert_eq!(base.matching(), m0_edges.iter().copied().collect::<Vec<_>>());
    let m0_records: Vec<&EdgeRecord> = m0_edges.iter().map(|e| by_key[e]).collect();
    let slice_of = |r: &EdgeRecord| map.level_of_rank(r.rank(0));

    let mut out = Vec::with_capacity(levels);
    for i in 1..=levels {
        let members: BTreeSet<EdgeKey> =
            m0_records.iter().filter(|r| slice_of(r) == i).map(|r| r.key).collect();

        // U_i: unmatched in M_0 or matched by an edge of S_1..S_{i-1}.
        let mut in_u = vec![true; n];
        for r in &m0_records {
            if slice_of(r) >= i {
                in_u[r.key.lo().index()] = false;
                in_u[r.key.hi().index()] = false;
            }
        }
        // V^A_i / V^B_i by ID order, V'_i by the level's sample bit.
        let mut va_prime = vec![false; n];
        let mut vb_prime = vec![false; n];
        for r in m0_records.iter().filter(|r| slice_of(r) == i && r.is_sampled(i)) {
            va_prime[r.key.lo().index()] = true;
            vb_prime[r.key.hi().index()] = true;
        }
        let side = |v: usize| tapes[v].side(i);
        let ua = |v: usize| in_u[v] && side(v) == Side::A;
        let ub = |v: usize| in_u[v] && side(v) == Side::B;

        let roles: Vec<VertexRole> = (0..n)
            .map(|v| {
                if va_prime[v] {
                    VertexRole::VaPrime
                } else if vb_prime[v] {
                    VertexRole::VbPrime
                } else if ua(v) {
                    VertexRole::Ua
                } else if ub(v) {
                    VertexRole::Ub
                } else {
                    VertexRole::Absent
                }
            })
            .collect();

        let in_g = |a: usize, b: usize| (va_prime[a] && ua(b)) || (vb_prime[a] && ub(b));
        let g_edges: Vec<(EdgeKey, Rank)> = records
            .iter()
            .filter(|r| {
                let (a, b) = (r.key.lo().index(), r.key.hi().index());
                in_g(a, b) || in_g(b, a)
            })
            .map(|r| (r.key, r.rank(i)))
            .collect();
        out.push(ReferenceLevel {
            members,
            roles,
            second_stage: MatchingState::build_static(n, g_edges),
        });
    }
    ReferenceState { base, levels: out }
}

pub fn static_reference_of(instance: &Instance) -> ReferenceState {
    static_reference(instance.config(), instance.tapes(), instance.records())
}

/// The first difference between a maintained pipeline and the reference, if
/// any.
pub fn diff_pipeline(pipeline: &Pipeline, reference: &ReferenceState) -> Option<String> {
    if pipeline.base() != &reference.base {
        return Some(format!(
            "M_0 differs: maintained {:?}, reference {:?}",
            pipeline.base().matching(),
            reference.base.matching()
        ));
    }
    for (level, want) in pipeline.levels().iter().zip(&reference.levels) {
        let i = level.level;
        if level.members != want.members {
            return Some(format!("S_{i} differs: {:?} vs {:?}", level.members, want.members));
        }
        if let Some(v) = (0..want.roles.len()).find(|&v| level.roles[v] != want.roles[v]) {
            return Some(format!(
                "role of vertex {v} at level {i}: {:?} vs {:?}",
                level.roles[v], want.roles[v]
            ));
        }
        if level.second_stage != want.second_stage {
            let have: Vec<EdgeKey> = level.second_stage.edges().map(|(e, _)| e).collect();
            let need: Vec<EdgeKey> = want.second_stage.edges().map(|(e, _)| e).collect();
            return Some(format!("G_{i} differs: edges {have:?} vs {need:?}"));
        }
    }
    let union: Vec<EdgeKey> = pipeline.final_matcher().union_edges();
    if union != reference.union_edges() {
        return Some(format!("union differs: {union:?} vs {:?}", reference.union_edges()));
    }
    None
}

/// Role of `v` at `level` read off the reference, for spot checks.
pub fn reference_role(reference: &ReferenceState, v: VertexId, level: usize) -> VertexRole {
    reference.levels[level - 1].roles[v.index()]
}
