//! Dynamic graph storage over a fixed vertex universe, plus the random tape.
//!
//! Every vertex draws its per-level partition coins once, at construction.
//! Every edge draws its per-level ranks and sample bits when it arrives; a
//! deleted and re-inserted edge gets fresh randomness. All draws come from a
//! single ChaCha stream seeded by `algo_seed`, so replaying the same update
//! sequence reproduces every record bit for bit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::rank::{EdgeKey, Rank, VertexId};

/// Default edge-sampling probability of the second stage.
pub const DEFAULT_SAMPLE_P: f64 = 0.03;

/// Which half of `U_i` (and which `V'` side) a vertex falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub n: u32,
    /// Declared degree capacity Δ. Insertions beyond it are rejected.
    pub delta_cap: u32,
    /// Number of levels L; the level granularity is ε = 1/L.
    pub levels: u32,
    pub sample_p: f64,
    /// Slack of the final matcher. `None` means augmenting-path depth `L + 1`.
    pub final_eps: Option<f64>,
    pub algo_seed: u64,
}

impl InstanceConfig {
    pub fn new(n: u32, delta_cap: u32, levels: u32, algo_seed: u64) -> Self {
        InstanceConfig {
            n,
            delta_cap,
            levels,
            sample_p: DEFAULT_SAMPLE_P,
            final_eps: None,
            algo_seed,
        }
    }

    pub fn with_sample_p(mut self, p: f64) -> Self {
        self.sample_p = p;
        self
    }

    pub fn with_final_eps(mut self, eps: f64) -> Self {
        self.final_eps = Some(eps);
        self
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.n == 0 {
            return Err(GraphError::Config("vertex count must be positive".into()));
        }
        if self.delta_cap < 1 {
            return Err(GraphError::Config("degree capacity must be at least 1".into()));
        }
        if self.levels < 1 {
            return Err(GraphError::Config("at least one level is required".into()));
        }
        if !(self.sample_p > 0.0 && self.sample_p < 0.125) {
            return Err(GraphError::Config(format!(
                "sample probability {} outside (0, 1/8)",
                self.sample_p
            )));
        }
        if let Some(eps) = self.final_eps {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(GraphError::Config(format!("final slack {eps} outside (0, 1]")));
            }
        }
        Ok(())
    }

    /// Half-length bound `k` of the final matcher: no augmenting path of
    /// length `<= 2k - 1` survives a repair.
    pub fn augment_depth(&self) -> usize {
        match self.final_eps {
            Some(eps) => (1.0 / eps).ceil().max(1.0) as usize,
            None => self.levels as usize + 1,
        }
    }

    /// Level thresholds `t_0 = 1 > t_1 > ... > t_L`, `t_i = Δ^(-i/L)`, in
    /// fixed point.
    pub fn thresholds(&self) -> Vec<u64> {
        let delta = self.delta_cap as f64;
        let l = self.levels as f64;
        (0..=self.levels)
            .map(|i| {
                if i == 0 {
                    u64::MAX
                } else {
                    Rank::fixed_from_f64(delta.powf(-(i as f64) / l))
                }
            })
            .collect()
    }
}

/// Partition coins of one vertex, `partition[i - 1]` for level `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexTape {
    pub partition: Vec<Side>,
}

impl VertexTape {
    #[inline]
    pub fn side(&self, level: usize) -> Side {
        self.partition[level - 1]
    }
}

/// Everything drawn for one arrival of an edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub key: EdgeKey,
    /// `ranks[i]` is the rank in ranking `π_i`, `i ∈ 0..=L`.
    pub ranks: Vec<Rank>,
    /// `sampled[i - 1]` is the sample bit of level `i`.
    pub sampled: Vec<bool>,
}

impl EdgeRecord {
    #[inline]
    pub fn rank(&self, level: usize) -> Rank {
        self.ranks[level]
    }

    #[inline]
    pub fn is_sampled(&self, level: usize) -> bool {
        self.sampled[level - 1]
    }
}

/// Maps ranks of `π_0` to levels and back.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMap {
    thresholds: Vec<u64>,
}

impl LevelMap {
    pub fn new(config: &InstanceConfig) -> Self {
        LevelMap { thresholds: config.thresholds() }
    }

    pub fn levels(&self) -> usize {
        self.thresholds.len() - 1
    }

    /// Fixed-point threshold `t_i`.
    pub fn threshold(&self, i: usize) -> u64 {
        self.thresholds[i]
    }

    /// Level `i` with `r ∈ (t_i, t_{i-1}]` for `i < L`, otherwise `L`.
    pub fn level_of_rank(&self, r: Rank) -> usize {
        let last = self.levels();
        (1..last)
            .find(|&i| r.value() > self.thresholds[i])
            .unwrap_or(last)
    }

    /// Inclusive lower bound on eliminator ranks that can matter to levels
    /// `1..=j`: `t_j` for `j < L`, zero for `j = L`.
    pub fn alpha(&self, j: usize) -> Rank {
        if j >= self.levels() {
            Rank::ZERO
        } else {
            Rank::floor(self.thresholds[j])
        }
    }
}

/// A dynamic graph with degree capacity and its random tapes.
#[derive(Clone, Debug)]
pub struct Instance {
    config: InstanceConfig,
    level_map: LevelMap,
    tapes: Vec<VertexTape>,
    edges: BTreeMap<EdgeKey, EdgeRecord>,
    degree: Vec<u32>,
    rng: ChaCha8Rng,
}

impl Instance {
    pub fn new(config: InstanceConfig) -> Result<Instance, GraphError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.algo_seed);
        let levels = config.levels as usize;
        let tapes = (0..config.n)
            .map(|_| VertexTape {
                partition: (0..levels)
                    .map(|_| if rng.gen::<bool>() { Side::A } else { Side::B })
                    .collect(),
            })
            .collect();
        Ok(Instance {
            level_map: LevelMap::new(&config),
            degree: vec![0; config.n as usize],
            edges: BTreeMap::new(),
            tapes,
            rng,
            config,
        })
    }

    pub fn config(&self) -> &InstanceConfig {
        &self.config
    }

    pub fn level_map(&self) -> &LevelMap {
        &self.level_map
    }

    pub fn levels(&self) -> usize {
        self.config.levels as usize
    }

    pub fn n(&self) -> usize {
        self.config.n as usize
    }

    pub fn tapes(&self) -> &[VertexTape] {
        &self.tapes
    }

    pub fn tape(&self, v: VertexId) -> &VertexTape {
        &self.tapes[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> u32 {
        self.degree[v.index()]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, key: EdgeKey) -> bool {
        self.edges.contains_key(&key)
    }

    pub fn record(&self, key: EdgeKey) -> Option<&EdgeRecord> {
        self.edges.get(&key)
    }

    /// Present edges in key order.
    pub fn records(&self) -> impl Iterator<Item = &EdgeRecord> + '_ {
        self.edges.values()
    }

    pub fn level_of_rank(&self, r: Rank) -> usize {
        self.level_map.level_of_rank(r)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.index() >= self.n() {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.config.n })
        } else {
            Ok(())
        }
    }

    /// Checks that `{u, v}` could be inserted, without drawing randomness.
    pub fn check_admissible(&self, u: VertexId, v: VertexId) -> Result<EdgeKey, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let key = EdgeKey::new(u, v).ok_or(GraphError::Loop(u))?;
        if self.edges.contains_key(&key) {
            return Err(GraphError::Duplicate(key));
        }
        for w in key.endpoints() {
            if self.degree[w.index()] >= self.config.delta_cap {
                return Err(GraphError::Capacity { vertex: w, delta: self.config.delta_cap });
            }
        }
        Ok(key)
    }

    /// Inserts `{u, v}` with fresh ranks and sample bits.
    pub fn admit_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeRecord, GraphError> {
        let key = self.check_admissible(u, v)?;
        let record = self.draw_record(key);
        self.degree[key.lo().index()] += 1;
        self.degree[key.hi().index()] += 1;
        self.edges.insert(key, record.clone());
        Ok(record)
    }

    /// Draws a fresh record for `key` from the instance's stream without
    /// inserting it.
    pub fn draw_record(&mut self, key: EdgeKey) -> EdgeRecord {
        let levels = self.levels();
        let ranks = (0..=levels).map(|_| Rank::new(self.rng.gen(), key)).collect();
        let p = self.config.sample_p;
        let sampled = (0..levels).map(|_| self.rng.gen::<f64>() < p).collect();
        EdgeRecord { key, ranks, sampled }
    }

    /// Removes `{u, v}` and hands back its record.
    pub fn retire_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeRecord, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let key = EdgeKey::new(u, v).ok_or(GraphError::Loop(u))?;
        let record = self.edges.remove(&key).ok_or(GraphError::NotFound(key))?;
        self.degree[key.lo().index()] -= 1;
        self.degree[key.hi().index()] -= 1;
        Ok(record)
    }

    /// Inserts a record with externally chosen randomness. Used by oracle
    /// constructions that must pin ranks; capacity is still enforced.
    pub fn admit_record(&mut self, record: EdgeRecord) -> Result<(), GraphError> {
        let key = self.check_admissible(record.key.lo(), record.key.hi())?;
        let levels = self.levels();
        if record.ranks.len() != levels + 1 || record.sampled.len() != levels {
            return Err(GraphError::Config(format!(
                "record for {key} has the wrong number of levels"
            )));
        }
        if record.ranks.iter().any(|r| r.tiebreak() != key) {
            return Err(GraphError::Config(format!("record for {key} carries foreign ranks")));
        }
        self.degree[key.lo().index()] += 1;
        self.degree[key.hi().index()] += 1;
        self.edges.insert(key, record);
        Ok(())
    }
}
