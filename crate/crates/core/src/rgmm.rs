//! Random-greedy maximal matching under edge insertions and deletions.
//!
//! [`MatchingState`] holds the greedy matching `FMM(G, π)` of one graph and
//! ranking together with, for every vertex, the rank of its matched edge
//! (`k(v)`, or [`Rank::ONE`] when unmatched) and an index of its incident
//! edges keyed by eliminator rank. Because every present edge has at least one
//! matched endpoint, the eliminator rank of `uv` is simply `min(k(u), k(v))`.
//!
//! Updates run a cascade that re-simulates the greedy process from the rank of
//! the updated edge upward, touching only vertices whose match changes:
//!
//! * a vertex that loses its matched edge at time `τ` becomes *open*; its
//!   candidate edges are the incident edges whose (pre-update) eliminator rank
//!   is at least `τ` and whose own rank exceeds `τ`, visited in rank order;
//! * candidates are popped from one priority queue in increasing rank order, so
//!   when a candidate of rank `s` pops, every edge below `s` is settled and
//!   the greedy rule can be applied exactly: the edge joins iff both endpoints
//!   are still open at `s`, evicting any higher-rank edge the far endpoint
//!   still holds from before the update.
//!
//! Joins are final when they happen, so a cascade never undoes its own work.
//! Afterwards only edges incident to a changed vertex with eliminator rank at
//! least the cascade's starting rank can have a new eliminator; those are
//! re-keyed with a range scan.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use crate::error::MatchingError;
use crate::rank::{EdgeKey, Rank, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct EdgeSlot {
    rank: Rank,
    eliminator: Rank,
}

/// Edges that left and joined the matching during one update, in the order
/// the cascade settled them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaList {
    pub left: Vec<EdgeKey>,
    pub joined: Vec<EdgeKey>,
    /// Smallest rank among the edges in `left` and `joined`.
    pub min_rank: Option<Rank>,
    /// Candidate pops performed by the cascade.
    pub queue_pops: usize,
}

impl DeltaList {
    pub fn is_empty(&self) -> bool {
        self.left.is_empty() && self.joined.is_empty()
    }

    /// Number of matching edges changed (the adjustment complexity).
    pub fn len(&self) -> usize {
        self.left.len() + self.joined.len()
    }

    /// Endpoints of all changed edges, deduplicated and sorted.
    pub fn touched_vertices(&self) -> BTreeSet<VertexId> {
        self.left
            .iter()
            .chain(&self.joined)
            .flat_map(|e| e.endpoints())
            .collect()
    }

    fn note_rank(&mut self, r: Rank) {
        self.min_rank = Some(self.min_rank.map_or(r, |m| m.min(r)));
    }
}

/// Greedy matching of one graph under one ranking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingState {
    edges: BTreeMap<EdgeKey, EdgeSlot>,
    matched_edge: Vec<Option<EdgeKey>>,
    matched_rank: Vec<Rank>,
    elim_index: Vec<BTreeMap<(Rank, EdgeKey), VertexId>>,
    size: usize,
}

/// Candidate edges of one vertex that was freed during a cascade.
struct OpenList {
    candidates: Vec<(Rank, EdgeKey)>,
    cursor: usize,
}

impl MatchingState {
    /// Empty graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        MatchingState {
            edges: BTreeMap::new(),
            matched_edge: vec![None; n],
            matched_rank: vec![Rank::ONE; n],
            elim_index: vec![BTreeMap::new(); n],
            size: 0,
        }
    }

    /// Greedy matching computed from scratch: scan edges by increasing rank,
    /// keep each edge whose endpoints are both still free.
    pub fn build_static<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (EdgeKey, Rank)>,
    {
        let mut state = MatchingState::new(n);
        let mut sorted: Vec<(Rank, EdgeKey)> = edges.into_iter().map(|(k, r)| (r, k)).collect();
        sorted.sort_unstable();
        for &(rank, key) in &sorted {
            let (u, v) = (key.lo().index(), key.hi().index());
            if state.matched_edge[u].is_none() && state.matched_edge[v].is_none() {
                state.matched_edge[u] = Some(key);
                state.matched_edge[v] = Some(key);
                state.matched_rank[u] = rank;
                state.matched_rank[v] = rank;
                state.size += 1;
            }
        }
        for &(rank, key) in &sorted {
            let eliminator = state.eliminator_of(key);
            state.edges.insert(key, EdgeSlot { rank, eliminator });
            state.elim_index[key.lo().index()].insert((eliminator, key), key.hi());
            state.elim_index[key.hi().index()].insert((eliminator, key), key.lo());
        }
        state
    }

    pub fn n(&self) -> usize {
        self.matched_edge.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, key: EdgeKey) -> bool {
        self.edges.contains_key(&key)
    }

    pub fn rank(&self, key: EdgeKey) -> Option<Rank> {
        self.edges.get(&key).map(|s| s.rank)
    }

    pub fn eliminator_rank(&self, key: EdgeKey) -> Option<Rank> {
        self.edges.get(&key).map(|s| s.eliminator)
    }

    pub fn matched_edge(&self, v: VertexId) -> Option<EdgeKey> {
        self.matched_edge[v.index()]
    }

    /// `k(v)`: rank of `v`'s matched edge, or [`Rank::ONE`].
    pub fn matched_rank(&self, v: VertexId) -> Rank {
        self.matched_rank[v.index()]
    }

    pub fn is_matched(&self, key: EdgeKey) -> bool {
        self.matched_edge[key.lo().index()] == Some(key)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.elim_index[v.index()].len()
    }

    /// Present edges with their ranks, in key order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeKey, Rank)> + '_ {
        self.edges.iter().map(|(&k, s)| (k, s.rank))
    }

    /// Matched edges in key order.
    pub fn matching(&self) -> Vec<EdgeKey> {
        let mut out: Vec<EdgeKey> = self
            .matched_edge
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.filter(|e| e.lo().index() == i))
            .collect();
        out.sort_unstable();
        out
    }

    /// Incident edges of `v` with eliminator rank `>= threshold`, by range
    /// scan of the eliminator index.
    pub fn neighbors_above(&self, v: VertexId, threshold: Rank) -> Vec<(EdgeKey, Rank)> {
        self.elim_index[v.index()]
            .range((threshold, EdgeKey::MIN)..)
            .map(|(&(r, k), _)| (k, r))
            .collect()
    }

    /// All incident edges of `v`.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = EdgeKey> + '_ {
        self.elim_index[v.index()].keys().map(|&(_, k)| k)
    }

    fn eliminator_of(&self, key: EdgeKey) -> Rank {
        self.matched_rank[key.lo().index()].min(self.matched_rank[key.hi().index()])
    }

    fn set_match(&mut self, key: EdgeKey, rank: Rank) {
        for w in key.endpoints() {
            self.matched_edge[w.index()] = Some(key);
            self.matched_rank[w.index()] = rank;
        }
        self.size += 1;
    }

    fn clear_match(&mut self, key: EdgeKey) {
        for w in key.endpoints() {
            self.matched_edge[w.index()] = None;
            self.matched_rank[w.index()] = Rank::ONE;
        }
        self.size -= 1;
    }

    /// Inserts `key` with rank `rank` and repairs the matching.
    pub fn apply_insert(&mut self, key: EdgeKey, rank: Rank) -> Result<DeltaList, MatchingError> {
        if self.edges.contains_key(&key) {
            return Err(MatchingError::Duplicate(key));
        }
        self.edges.insert(key, EdgeSlot { rank, eliminator: Rank::ONE });
        let mut cascade = Cascade::default();
        let (u, v) = (key.lo(), key.hi());
        if self.matched_rank(u) > rank && self.matched_rank(v) > rank {
            for w in [u, v] {
                if let Some(old) = self.matched_edge(w) {
                    self.evict(old, w, rank, &mut cascade);
                }
            }
            self.set_match(key, rank);
            cascade.delta.joined.push(key);
            cascade.delta.note_rank(rank);
        }
        self.run(&mut cascade);
        self.reindex(&cascade.delta);
        let eliminator = self.eliminator_of(key);
        self.edges.get_mut(&key).expect("just inserted").eliminator = eliminator;
        self.elim_index[u.index()].insert((eliminator, key), v);
        self.elim_index[v.index()].insert((eliminator, key), u);
        Ok(cascade.delta)
    }

    /// Deletes `key` and repairs the matching.
    pub fn apply_delete(&mut self, key: EdgeKey) -> Result<DeltaList, MatchingError> {
        let slot = self.edges.remove(&key).ok_or(MatchingError::NotFound(key))?;
        let (u, v) = (key.lo(), key.hi());
        self.elim_index[u.index()].remove(&(slot.eliminator, key));
        self.elim_index[v.index()].remove(&(slot.eliminator, key));
        let mut cascade = Cascade::default();
        if self.is_matched(key) {
            self.clear_match(key);
            cascade.delta.left.push(key);
            cascade.delta.note_rank(slot.rank);
            self.open(u, slot.rank, &mut cascade);
            self.open(v, slot.rank, &mut cascade);
        }
        self.run(&mut cascade);
        self.reindex(&cascade.delta);
        Ok(cascade.delta)
    }

    /// Removes matched edge `edge` on behalf of a lower-rank edge settling at
    /// `at` on endpoint `keeper`; the far endpoint is opened.
    fn evict(&mut self, edge: EdgeKey, keeper: VertexId, at: Rank, cascade: &mut Cascade) {
        let rank = self.matched_rank(keeper);
        self.clear_match(edge);
        cascade.delta.left.push(edge);
        cascade.delta.note_rank(rank);
        self.open(edge.other(keeper), at, cascade);
    }

    /// Registers `x` as open from time `at` and queues its first candidate.
    fn open(&mut self, x: VertexId, at: Rank, cascade: &mut Cascade) {
        let mut candidates: Vec<(Rank, EdgeKey)> = self.elim_index[x.index()]
            .range((at, EdgeKey::MIN)..)
            .filter_map(|(&(_, k), _)| {
                let r = self.edges[&k].rank;
                (r > at).then_some((r, k))
            })
            .collect();
        candidates.sort_unstable();
        if let Some(&(r, _)) = candidates.first() {
            cascade.queue.push(Reverse((r, x)));
        }
        cascade.open.insert(x, OpenList { candidates, cursor: 0 });
    }

    fn run(&mut self, cascade: &mut Cascade) {
        while let Some(Reverse((s, x))) = cascade.queue.pop() {
            cascade.delta.queue_pops += 1;
            // Matched below `s` means settled for good.
            if self.matched_rank(x) < s {
                continue;
            }
            let list = &cascade.open[&x];
            let (rank, edge) = list.candidates[list.cursor];
            debug_assert_eq!(rank, s);
            let y = edge.other(x);
            if self.matched_rank(y) > s {
                if let Some(old) = self.matched_edge(y) {
                    self.evict(old, y, s, cascade);
                }
                self.set_match(edge, s);
                cascade.delta.joined.push(edge);
                cascade.delta.note_rank(s);
            } else {
                let list = cascade.open.get_mut(&x).expect("open vertex");
                list.cursor += 1;
                if let Some(&(next, _)) = list.candidates.get(list.cursor) {
                    cascade.queue.push(Reverse((next, x)));
                }
            }
        }
    }

    /// Re-keys eliminator entries after a cascade. Only edges at a changed
    /// vertex with eliminator rank `>= min_rank` can move.
    fn reindex(&mut self, delta: &DeltaList) {
        let Some(floor) = delta.min_rank else { return };
        for w in delta.touched_vertices() {
            let stale: Vec<((Rank, EdgeKey), VertexId)> = self.elim_index[w.index()]
                .range((floor, EdgeKey::MIN)..)
                .map(|(&k, &y)| (k, y))
                .collect();
            for ((old, key), y) in stale {
                let new = self.eliminator_of(key);
                if new == old {
                    continue;
                }
                self.elim_index[w.index()].remove(&(old, key));
                self.elim_index[y.index()].remove(&(old, key));
                self.elim_index[w.index()].insert((new, key), y);
                self.elim_index[y.index()].insert((new, key), w);
                self.edges.get_mut(&key).expect("indexed edge").eliminator = new;
            }
        }
    }
}

#[derive(Default)]
struct Cascade {
    queue: BinaryHeap<Reverse<(Rank, VertexId)>>,
    open: HashMap<VertexId, OpenList>,
    delta: DeltaList,
}
