//! The maintained level structure and its update procedure.
//!
//! State per level `i ∈ 1..=L`: the slice `S_i` of `M_0` whose `π_0` ranks
//! fall in the level's interval, the role of every vertex (`V'^A_i`,
//! `V'^B_i`, `U^A_i`, `U^B_i` or absent), the second-stage graph `G_i` on the
//! `V' × U` pairs with its greedy matching `M_i` under `π_i`. The answer is a
//! near-maximum matching of `M_0 ∪ M_1 ∪ ... ∪ M_L`.
//!
//! An edge update runs four steps:
//! 1. update `M_0`; if it did not change, add or remove the edge itself in
//!    whichever `G_i` it belongs to;
//! 2. recompute the roles of every endpoint of a changed `M_0` edge;
//! 3. drop all `G_i` edges at vertices that left a role, then for vertices
//!    that gained one scan their base neighbours with eliminator rank at
//!    least `α` and insert the qualifying pairs;
//! 4. forward every change of `M_0..M_L` to the final matcher.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::error::PipelineError;
use crate::final_match::{AnswerDelta, FinalMatcher, UnionDelta};
use crate::graph::{Instance, InstanceConfig, Side};
use crate::rank::{EdgeKey, Rank, VertexId};
use crate::rgmm::{DeltaList, MatchingState};

/// Membership of a vertex in the second-stage graph of one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VertexRole {
    /// Lower-ID endpoint of a sampled `S_i` edge.
    VaPrime,
    /// Higher-ID endpoint of a sampled `S_i` edge.
    VbPrime,
    /// Unmatched in `M_0`, or matched by a higher-rank level; side A.
    Ua,
    /// As `Ua`, side B.
    Ub,
    Absent,
}

impl VertexRole {
    /// Role of `v` at `level` given its `M_0` edge.
    ///
    /// `matched` is `(edge, ℓ_v, sampled)` where `ℓ_v` is the level of the
    /// edge and `sampled` its sample bit at `level`; `None` means unmatched.
    pub fn at_level(
        v: VertexId,
        level: usize,
        matched: Option<(EdgeKey, usize, bool)>,
        side: Side,
    ) -> VertexRole {
        let lv = matched.map_or(0, |(_, l, _)| l);
        if lv < level {
            match side {
                Side::A => VertexRole::Ua,
                Side::B => VertexRole::Ub,
            }
        } else if lv == level {
            let (edge, _, sampled) = matched.expect("ℓ_v > 0 implies matched");
            if !sampled {
                VertexRole::Absent
            } else if v == edge.lo() {
                VertexRole::VaPrime
            } else {
                VertexRole::VbPrime
            }
        } else {
            VertexRole::Absent
        }
    }

    pub fn is_present(self) -> bool {
        self != VertexRole::Absent
    }

    /// Whether an edge between roles `a` and `b` belongs to `G_i`.
    pub fn pairs_with(self, other: VertexRole) -> bool {
        use VertexRole::*;
        matches!(
            (self, other),
            (VaPrime, Ua) | (Ua, VaPrime) | (VbPrime, Ub) | (Ub, VbPrime)
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelState {
    pub level: usize,
    /// `S_i`.
    pub members: BTreeSet<EdgeKey>,
    /// `G_i` with its greedy matching `M_i` under `π_i`.
    pub second_stage: MatchingState,
    /// Role of each vertex at this level.
    pub roles: Vec<VertexRole>,
}

/// A role change emitted by step 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoleChange {
    pub vertex: VertexId,
    pub level: usize,
    pub old: VertexRole,
    pub new: VertexRole,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Update {
    Insert(VertexId, VertexId),
    Delete(VertexId, VertexId),
}

impl Update {
    pub fn insert(u: u32, v: u32) -> Update {
        Update::Insert(VertexId(u), VertexId(v))
    }

    pub fn delete(u: u32, v: u32) -> Update {
        Update::Delete(VertexId(u), VertexId(v))
    }
}

/// What one update changed, with probe counters.
#[derive(Clone, Debug, Default)]
pub struct UpdateReport {
    pub edge: Option<EdgeKey>,
    /// Changes to `M_0`.
    pub base: DeltaList,
    /// Changes to `M_i`, index `i - 1`, concatenated over all operations
    /// applied to `G_i` during the update.
    pub levels: Vec<DeltaList>,
    /// Edge insertions plus deletions applied to each `G_i`, index `i - 1`.
    pub level_mutations: Vec<usize>,
    pub answer: AnswerDelta,
    /// Level of the smallest-rank changed `M_0` edge, when `M_0` changed.
    pub trigger_level: Option<usize>,
    pub role_changes: usize,
    /// Sum of candidate-list sizes `|L_v|` scanned in step 3.
    pub candidate_total: usize,
    /// Cascade queue pops over all greedy matchings touched.
    pub queue_pops: usize,
    pub elapsed_ns: u64,
}

impl UpdateReport {
    fn record_level(&mut self, level: usize, delta: &DeltaList) {
        let slot = &mut self.levels[level - 1];
        slot.left.extend_from_slice(&delta.left);
        slot.joined.extend_from_slice(&delta.joined);
        if let Some(r) = delta.min_rank {
            slot.min_rank = Some(slot.min_rank.map_or(r, |m| m.min(r)));
        }
        slot.queue_pops += delta.queue_pops;
        self.queue_pops += delta.queue_pops;
        self.level_mutations[level - 1] += 1;
    }
}

#[derive(Clone, Debug)]
pub struct Pipeline {
    instance: Instance,
    base: MatchingState,
    levels: Vec<LevelState>,
    answer: FinalMatcher,
}

fn union_events(matching: usize, delta: &DeltaList, out: &mut Vec<UnionDelta>) {
    out.extend(delta.left.iter().map(|&e| UnionDelta::left(matching, e)));
    out.extend(delta.joined.iter().map(|&e| UnionDelta::joined(matching, e)));
}

impl Pipeline {
    pub fn new(config: InstanceConfig) -> Result<Pipeline, PipelineError> {
        Ok(Pipeline::from_instance(Instance::new(config)?))
    }

    /// Builds every structure from scratch for the edges already present in
    /// `instance`.
    pub fn from_instance(instance: Instance) -> Pipeline {
        let n = instance.n();
        let levels_n = instance.levels();
        let base = MatchingState::build_static(n, instance.records().map(|r| (r.key, r.rank(0))));
        let mut pipeline = Pipeline {
            answer: FinalMatcher::new(n, levels_n + 1, instance.config().augment_depth()),
            levels: (1..=levels_n)
                .map(|level| LevelState {
                    level,
                    members: BTreeSet::new(),
                    second_stage: MatchingState::new(n),
                    roles: vec![VertexRole::Absent; n],
                })
                .collect(),
            base,
            instance,
        };
        for e in pipeline.base.matching() {
            let level = pipeline.level_of_base_edge(e);
            pipeline.levels[level - 1].members.insert(e);
        }
        for v in 0..n as u32 {
            for level in 1..=levels_n {
                let role = pipeline.role_of(VertexId(v), level);
                pipeline.levels[level - 1].roles[v as usize] = role;
            }
        }
        for level in 1..=levels_n {
            let roles = &pipeline.levels[level - 1].roles;
            let edges: Vec<(EdgeKey, Rank)> = pipeline
                .instance
                .records()
                .filter(|r| roles[r.key.lo().index()].pairs_with(roles[r.key.hi().index()]))
                .map(|r| (r.key, r.rank(level)))
                .collect();
            pipeline.levels[level - 1].second_stage = MatchingState::build_static(n, edges);
        }
        let mut events = Vec::new();
        for e in pipeline.base.matching() {
            events.push(UnionDelta::joined(0, e));
        }
        for (i, level) in pipeline.levels.iter().enumerate() {
            for e in level.second_stage.matching() {
                events.push(UnionDelta::joined(i + 1, e));
            }
        }
        pipeline
            .answer
            .apply_batch(&events)
            .expect("fresh union accepts each matching edge once");
        pipeline
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn base(&self) -> &MatchingState {
        &self.base
    }

    /// Level `i ∈ 1..=L`.
    pub fn level(&self, i: usize) -> &LevelState {
        &self.levels[i - 1]
    }

    pub fn levels(&self) -> &[LevelState] {
        &self.levels
    }

    pub fn final_matcher(&self) -> &FinalMatcher {
        &self.answer
    }

    /// The answer: a near-maximum matching of `M_0 ∪ ... ∪ M_L`.
    pub fn current_answer(&self) -> Vec<EdgeKey> {
        self.answer.matching()
    }

    pub fn answer_size(&self) -> usize {
        self.answer.size()
    }

    fn level_of_base_edge(&self, e: EdgeKey) -> usize {
        let rank = self.base.rank(e).expect("edge of M_0 is present");
        self.instance.level_of_rank(rank)
    }

    /// Role of `v` at `level` recomputed from its current `M_0` edge.
    pub fn role_of(&self, v: VertexId, level: usize) -> VertexRole {
        let matched = self.base.matched_edge(v).map(|e| {
            let record = self.instance.record(e).expect("matched edge is present");
            (e, self.instance.level_of_rank(record.rank(0)), record.is_sampled(level))
        });
        VertexRole::at_level(v, level, matched, self.instance.tape(v).side(level))
    }

    pub fn handle_update(&mut self, update: Update) -> Result<UpdateReport, PipelineError> {
        let start = Instant::now();
        let levels_n = self.levels.len();
        let mut report = UpdateReport {
            levels: vec![DeltaList::default(); levels_n],
            level_mutations: vec![0; levels_n],
            ..UpdateReport::default()
        };
        let mut events = Vec::new();

        // Step 1.
        match update {
            Update::Insert(u, v) => {
                let record = self.instance.admit_edge(u, v)?;
                let key = record.key;
                report.edge = Some(key);
                report.base = self.base.apply_insert(key, record.rank(0))?;
                if report.base.is_empty() {
                    for level in 1..=levels_n {
                        let roles = &self.levels[level - 1].roles;
                        if roles[u.index()].pairs_with(roles[v.index()]) {
                            self.level_insert(level, key, record.rank(level), &mut report, &mut events)?;
                        }
                    }
                }
            }
            Update::Delete(u, v) => {
                let record = self.instance.retire_edge(u, v)?;
                let key = record.key;
                report.edge = Some(key);
                report.base = self.base.apply_delete(key)?;
                for level in 1..=levels_n {
                    if self.levels[level - 1].second_stage.contains(key) {
                        self.level_delete(level, key, &mut report, &mut events)?;
                    }
                }
            }
        }
        report.queue_pops += report.base.queue_pops;
        union_events(0, &report.base, &mut events);

        if !report.base.is_empty() {
            let base_delta = report.base.clone();
            for &e in &base_delta.left {
                for level in &mut self.levels {
                    level.members.remove(&e);
                }
            }
            for &e in &base_delta.joined {
                let level = self.level_of_base_edge(e);
                self.levels[level - 1].members.insert(e);
            }
            // Step 2.
            let changes = self.update_roles(&base_delta.touched_vertices());
            report.role_changes = changes.len();
            // Step 3.
            let floor = base_delta.min_rank.expect("non-empty delta has a rank");
            let trigger = self.instance.level_of_rank(floor);
            report.trigger_level = Some(trigger);
            let alpha = self.instance.level_map().alpha(trigger);
            self.rebuild_memberships(&changes, alpha, &mut report, &mut events)?;
        }

        // Step 4.
        report.answer = self.answer.apply_batch(&events)?;
        report.elapsed_ns = start.elapsed().as_nanos() as u64;
        Ok(report)
    }

    /// Recomputes the roles of `changed` at every level, stores them, and
    /// returns the differences.
    fn update_roles(&mut self, changed: &BTreeSet<VertexId>) -> Vec<RoleChange> {
        let mut out = Vec::new();
        for &v in changed {
            for level in 1..=self.levels.len() {
                let new = self.role_of(v, level);
                let old = std::mem::replace(&mut self.levels[level - 1].roles[v.index()], new);
                if old != new {
                    out.push(RoleChange { vertex: v, level, old, new });
                }
            }
        }
        out
    }

    fn rebuild_memberships(
        &mut self,
        changes: &[RoleChange],
        alpha: Rank,
        report: &mut UpdateReport,
        events: &mut Vec<UnionDelta>,
    ) -> Result<(), PipelineError> {
        for level in 1..=self.levels.len() {
            for c in changes.iter().filter(|c| c.level == level && c.old.is_present()) {
                let incident: Vec<EdgeKey> = self.levels[level - 1].second_stage.incident(c.vertex).collect();
                for e in incident {
                    self.level_delete(level, e, report, events)?;
                }
            }
        }
        for level in 1..=self.levels.len() {
            for c in changes.iter().filter(|c| c.level == level && c.new.is_present()) {
                let v = c.vertex;
                let candidates = self.base.neighbors_above(v, alpha);
                report.candidate_total += candidates.len();
                for (e, _) in candidates {
                    let u = e.other(v);
                    let state = &self.levels[level - 1];
                    if !c.new.pairs_with(state.roles[u.index()]) || state.second_stage.contains(e) {
                        continue;
                    }
                    let rank = self.instance.record(e).expect("base edge is present").rank(level);
                    self.level_insert(level, e, rank, report, events)?;
                }
            }
        }
        Ok(())
    }

    fn level_insert(
        &mut self,
        level: usize,
        e: EdgeKey,
        rank: Rank,
        report: &mut UpdateReport,
        events: &mut Vec<UnionDelta>,
    ) -> Result<(), PipelineError> {
        let delta = self.levels[level - 1].second_stage.apply_insert(e, rank)?;
        union_events(level, &delta, events);
        report.record_level(level, &delta);
        Ok(())
    }

    fn level_delete(
        &mut self,
        level: usize,
        e: EdgeKey,
        report: &mut UpdateReport,
        events: &mut Vec<UnionDelta>,
    ) -> Result<(), PipelineError> {
        let delta = self.levels[level - 1].second_stage.apply_delete(e)?;
        union_events(level, &delta, events);
        report.record_level(level, &delta);
        Ok(())
    }
}
