//! Near-maximum matching of the union `M_0 ∪ M_1 ∪ ... ∪ M_L`.
//!
//! The union has maximum degree `L + 1`, so short augmenting paths can be
//! enumerated exhaustively: from a free vertex, an alternating path branches
//! only on its unmatched steps. After every batch of union changes the
//! matcher searches all free vertices within distance `2k - 1` of a changed
//! vertex and augments until no augmenting path of length `<= 2k - 1`
//! remains anywhere, which gives `|answer| >= k/(k+1) · μ(union)`.
//!
//! It also keeps the answer at least as large as `M_0` (matching 0 of the
//! union): any component of `answer ⊕ M_0` with more `M_0` edges is an
//! augmenting path of the answer, and it is flipped regardless of length.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::FinalMatchError;
use crate::rank::{EdgeKey, VertexId};

/// One edge joining or leaving matching `matching` of the union.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnionDelta {
    pub matching: usize,
    pub edge: EdgeKey,
    pub joined: bool,
}

impl UnionDelta {
    pub fn joined(matching: usize, edge: EdgeKey) -> Self {
        UnionDelta { matching, edge, joined: true }
    }

    pub fn left(matching: usize, edge: EdgeKey) -> Self {
        UnionDelta { matching, edge, joined: false }
    }
}

/// Net change of the answer matching over one batch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnswerDelta {
    pub left: Vec<EdgeKey>,
    pub joined: Vec<EdgeKey>,
    /// Augmenting-path searches started during the repair.
    pub searches: usize,
}

impl AnswerDelta {
    fn join(&mut self, e: EdgeKey) {
        if let Some(i) = self.left.iter().position(|&x| x == e) {
            self.left.swap_remove(i);
        } else {
            self.joined.push(e);
        }
    }

    fn leave(&mut self, e: EdgeKey) {
        if let Some(i) = self.joined.iter().position(|&x| x == e) {
            self.joined.swap_remove(i);
        } else {
            self.left.push(e);
        }
    }
}

#[derive(Clone, Debug)]
pub struct FinalMatcher {
    sources: usize,
    depth: usize,
    /// Bit `i` set iff the edge is currently in `M_i`.
    membership: HashMap<EdgeKey, u64>,
    adj: Vec<Vec<VertexId>>,
    mate: Vec<Option<VertexId>>,
    base_mate: Vec<Option<VertexId>>,
    size: usize,
}

impl FinalMatcher {
    /// Union of `sources` matchings over `n` vertices, repaired to exclude
    /// augmenting paths of length `<= 2 * depth - 1`.
    pub fn new(n: usize, sources: usize, depth: usize) -> Self {
        assert!((1..=64).contains(&sources), "between 1 and 64 matchings supported");
        assert!(depth >= 1, "augmenting depth must be positive");
        FinalMatcher {
            sources,
            depth,
            membership: HashMap::new(),
            adj: vec![Vec::new(); n],
            mate: vec![None; n],
            base_mate: vec![None; n],
            size: 0,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mate(&self, v: VertexId) -> Option<VertexId> {
        self.mate[v.index()]
    }

    /// Answer matching in key order.
    pub fn matching(&self) -> Vec<EdgeKey> {
        let mut out: Vec<EdgeKey> = self
            .mate
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.filter(|m| m.index() > i).map(|m| EdgeKey::of(i as u32, m.0)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Union edges in key order.
    pub fn union_edges(&self) -> Vec<EdgeKey> {
        let mut out: Vec<EdgeKey> = self.membership.keys().copied().collect();
        out.sort_unstable();
        out
    }

    /// Number of matchings currently containing `e`.
    pub fn multiplicity(&self, e: EdgeKey) -> u32 {
        self.membership.get(&e).map_or(0, |m| m.count_ones())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v.index()]
    }

    /// Applies one union change.
    pub fn union_apply(&mut self, delta: UnionDelta) -> Result<AnswerDelta, FinalMatchError> {
        self.apply_batch(std::slice::from_ref(&delta))
    }

    /// Applies a batch of union changes in order, then repairs once.
    pub fn apply_batch(&mut self, deltas: &[UnionDelta]) -> Result<AnswerDelta, FinalMatchError> {
        let mut out = AnswerDelta::default();
        let mut dirty = BTreeSet::new();
        for d in deltas {
            if d.matching >= self.sources {
                return Err(FinalMatchError::BadSource(d.matching));
            }
            let bit = 1u64 << d.matching;
            let (u, v) = (d.edge.lo(), d.edge.hi());
            if d.joined {
                let mask = self.membership.entry(d.edge).or_insert(0);
                if *mask & bit != 0 {
                    return Err(FinalMatchError::Overflow { edge: d.edge, matching: d.matching });
                }
                let fresh = *mask == 0;
                *mask |= bit;
                if fresh {
                    self.adj[u.index()].push(v);
                    self.adj[v.index()].push(u);
                }
                if d.matching == 0 {
                    self.base_mate[u.index()] = Some(v);
                    self.base_mate[v.index()] = Some(u);
                }
            } else {
                let Some(mask) = self.membership.get_mut(&d.edge).filter(|m| **m & bit != 0) else {
                    return Err(FinalMatchError::Underflow { edge: d.edge, matching: d.matching });
                };
                *mask &= !bit;
                if *mask == 0 {
                    self.membership.remove(&d.edge);
                    self.adj[u.index()].retain(|&w| w != v);
                    self.adj[v.index()].retain(|&w| w != u);
                    if self.mate[u.index()] == Some(v) {
                        self.unmatch(u, v, &mut out);
                    }
                }
                if d.matching == 0 {
                    self.base_mate[u.index()] = None;
                    self.base_mate[v.index()] = None;
                }
            }
            dirty.insert(u);
            dirty.insert(v);
        }
        self.repair(dirty, &mut out);
        Ok(out)
    }

    fn unmatch(&mut self, u: VertexId, v: VertexId, out: &mut AnswerDelta) {
        self.mate[u.index()] = None;
        self.mate[v.index()] = None;
        self.size -= 1;
        out.leave(EdgeKey::of(u.0, v.0));
    }

    fn match_pair(&mut self, u: VertexId, v: VertexId, out: &mut AnswerDelta) {
        self.mate[u.index()] = Some(v);
        self.mate[v.index()] = Some(u);
        self.size += 1;
        out.join(EdgeKey::of(u.0, v.0));
    }

    fn repair(&mut self, mut dirty: BTreeSet<VertexId>, out: &mut AnswerDelta) {
        let mut trace_from = dirty.clone();
        loop {
            while !dirty.is_empty() {
                let ball = self.ball(&dirty, 2 * self.depth - 1);
                let mut changed = BTreeSet::new();
                for a in ball {
                    if self.mate[a.index()].is_some() {
                        continue;
                    }
                    out.searches += 1;
                    if let Some(path) = self.short_augmenting_path(a) {
                        self.augment(&path, out);
                        changed.extend(path);
                    }
                }
                trace_from.extend(changed.iter().copied());
                dirty = changed;
            }
            for v in std::mem::take(&mut trace_from) {
                if let Some(path) = self.base_surplus_path(v) {
                    self.augment(&path, out);
                    dirty.extend(path);
                }
            }
            if dirty.is_empty() {
                break;
            }
            trace_from = dirty.clone();
        }
    }

    /// Vertices within `radius` hops of `seeds`, sorted.
    fn ball(&self, seeds: &BTreeSet<VertexId>, radius: usize) -> Vec<VertexId> {
        let mut seen: HashMap<VertexId, usize> = seeds.iter().map(|&v| (v, 0)).collect();
        let mut queue: VecDeque<VertexId> = seeds.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            let d = seen[&x];
            if d == radius {
                continue;
            }
            for &y in &self.adj[x.index()] {
                if let Entry::Vacant(slot) = seen.entry(y) {
                    slot.insert(d + 1);
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<VertexId> = seen.into_keys().collect();
        out.sort_unstable();
        out
    }

    /// Exhaustive search for an augmenting path of length `<= 2k - 1` that
    /// starts at free vertex `a`. Returns its vertices in order.
    pub fn short_augmenting_path(&self, a: VertexId) -> Option<Vec<VertexId>> {
        if self.mate[a.index()].is_some() {
            return None;
        }
        let mut path = vec![a];
        self.extend_path(&mut path, 2 * self.depth - 1).then_some(path)
    }

    fn extend_path(&self, path: &mut Vec<VertexId>, budget: usize) -> bool {
        let x = *path.last().expect("non-empty path");
        let skip = self.mate[x.index()];
        for &y in &self.adj[x.index()] {
            if Some(y) == skip || path.contains(&y) {
                continue;
            }
            match self.mate[y.index()] {
                None => {
                    path.push(y);
                    return true;
                }
                Some(z) if budget >= 3 && !path.contains(&z) => {
                    path.push(y);
                    path.push(z);
                    if self.extend_path(path, budget - 2) {
                        return true;
                    }
                    path.truncate(path.len() - 2);
                }
                Some(_) => {}
            }
        }
        false
    }

    fn augment(&mut self, path: &[VertexId], out: &mut AnswerDelta) {
        for pair in path[1..path.len() - 1].chunks(2) {
            self.unmatch(pair[0], pair[1], out);
        }
        for pair in path.chunks(2) {
            self.match_pair(pair[0], pair[1], out);
        }
    }

    /// The component of `answer ⊕ M_0` through `v`, if it is a path whose
    /// two end edges both come from `M_0`.
    fn base_surplus_path(&self, v: VertexId) -> Option<Vec<VertexId>> {
        let in_answer = |x: VertexId| self.mate[x.index()].filter(|&y| self.base_mate[x.index()] != Some(y));
        let in_base = |x: VertexId| self.base_mate[x.index()].filter(|&y| self.mate[x.index()] != Some(y));
        // Walk from v starting with the given kind of edge; returns the
        // vertices reached and the kind of the last edge taken.
        let walk = |start_with_base: bool| -> Option<(Vec<VertexId>, Option<bool>)> {
            let mut seq = Vec::new();
            let mut cur = v;
            let mut base = start_with_base;
            let mut last = None;
            loop {
                let next = if base { in_base(cur) } else { in_answer(cur) };
                let Some(next) = next else { break };
                if next == v {
                    return None; // cycle
                }
                seq.push(next);
                last = Some(base);
                cur = next;
                base = !base;
            }
            Some((seq, last))
        };
        let (fwd, fwd_last) = walk(true)?;
        let (back, back_last) = walk(false)?;
        // An end edge of the component: the last edge of a walk, or the
        // first edge of the other walk when that walk is empty.
        let end_fwd = fwd_last.or(if back.is_empty() { None } else { Some(false) });
        let end_back = back_last.or(if fwd.is_empty() { None } else { Some(true) });
        if end_fwd != Some(true) || end_back != Some(true) {
            return None;
        }
        let mut path: Vec<VertexId> = back.into_iter().rev().collect();
        path.push(v);
        path.extend(fwd);
        Some(path)
    }

    /// True if some free vertex still starts a short augmenting path.
    pub fn has_short_augmenting_path(&self) -> bool {
        (0..self.mate.len() as u32)
            .map(VertexId)
            .any(|a| self.short_augmenting_path(a).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(u: u32, v: u32) -> EdgeKey {
        EdgeKey::of(u, v)
    }

    #[test]
    fn first_edge_is_matched() {
        let mut f = FinalMatcher::new(4, 2, 2);
        let d = f.union_apply(UnionDelta::joined(0, k(1, 2))).unwrap();
        assert_eq!(d.joined, vec![k(1, 2)]);
        assert_eq!(f.matching(), vec![k(1, 2)]);
    }

    #[test]
    fn multiplicity_counts_and_errors() {
        let mut f = FinalMatcher::new(4, 3, 2);
        f.union_apply(UnionDelta::joined(0, k(0, 1))).unwrap();
        f.union_apply(UnionDelta::joined(2, k(0, 1))).unwrap();
        assert_eq!(f.multiplicity(k(0, 1)), 2);
        assert_eq!(
            f.union_apply(UnionDelta::joined(2, k(0, 1))),
            Err(FinalMatchError::Overflow { edge: k(0, 1), matching: 2 })
        );
        f.union_apply(UnionDelta::left(0, k(0, 1))).unwrap();
        assert_eq!(f.matching(), vec![k(0, 1)]);
        f.union_apply(UnionDelta::left(2, k(0, 1))).unwrap();
        assert!(f.matching().is_empty());
        assert_eq!(
            f.union_apply(UnionDelta::left(1, k(0, 1))),
            Err(FinalMatchError::Underflow { edge: k(0, 1), matching: 1 })
        );
        assert_eq!(f.union_apply(UnionDelta::joined(5, k(0, 1))), Err(FinalMatchError::BadSource(5)));
    }

    #[test]
    fn removal_finds_replacement() {
        // Path 0-1-2: answer holds one of the two edges; removing it leaves
        // the other.
        let mut f = FinalMatcher::new(3, 2, 2);
        f.apply_batch(&[UnionDelta::joined(0, k(0, 1)), UnionDelta::joined(1, k(1, 2))]).unwrap();
        assert_eq!(f.size(), 1);
        let held = f.matching()[0];
        let src = if held == k(0, 1) { 0 } else { 1 };
        let d = f.union_apply(UnionDelta::left(src, held)).unwrap();
        assert_eq!(d.left, vec![held]);
        assert_eq!(f.size(), 1);
        assert_ne!(f.matching()[0], held);
    }

    #[test]
    fn length_three_path_is_augmented() {
        // a-b-c-d with bc first: matched to 1, then ab and cd make a 3-path.
        let mut f = FinalMatcher::new(4, 3, 2);
        f.union_apply(UnionDelta::joined(0, k(1, 2))).unwrap();
        f.union_apply(UnionDelta::joined(1, k(0, 1))).unwrap();
        assert_eq!(f.size(), 1);
        f.union_apply(UnionDelta::joined(2, k(2, 3))).unwrap();
        assert_eq!(f.matching(), vec![k(0, 1), k(2, 3)]);
        assert!(!f.has_short_augmenting_path());
    }

    #[test]
    fn long_base_surplus_path_is_flipped() {
        // depth 1 only removes length-1 paths, but M_0 = {01, 23, 45} must
        // still win against the alternating answer {12, 34}.
        let mut f = FinalMatcher::new(6, 2, 1);
        f.apply_batch(&[UnionDelta::joined(1, k(1, 2)), UnionDelta::joined(1, k(3, 4))]).unwrap();
        assert_eq!(f.size(), 2);
        f.apply_batch(&[
            UnionDelta::joined(0, k(0, 1)),
            UnionDelta::joined(0, k(2, 3)),
            UnionDelta::joined(0, k(4, 5)),
        ])
        .unwrap();
        assert_eq!(f.size(), 3);
    }
}
