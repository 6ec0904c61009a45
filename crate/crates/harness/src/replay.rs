//! Replays a stream through the pipeline and records per-update metrics.

use std::io::Write;
use std::time::Instant;

use dynmatch_core::oracle::max_matching_warm;
use dynmatch_core::{EdgeKey, InstanceConfig, OracleError, Pipeline, PipelineError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stream::{check_replay_valid, vertex_count, StreamError, StreamEvent};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("event {seq}: {source}")]
    Pipeline { seq: usize, source: PipelineError },
    #[error("event {seq}: exact oracle: {source}")]
    Oracle { seq: usize, source: OracleError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug)]
pub struct ReplayConfig {
    /// Vertex count; inferred from the stream when absent.
    pub n: Option<u32>,
    pub delta: u32,
    pub levels: u32,
    pub algo_seed: u64,
    /// Compute `μ` exactly every this many updates; 0 disables the oracle.
    pub oracle_every: usize,
    pub sample_p: Option<f64>,
}

impl ReplayConfig {
    pub fn new(delta: u32, levels: u32, algo_seed: u64) -> Self {
        ReplayConfig { n: None, delta, levels, algo_seed, oracle_every: 100, sample_p: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub seq: usize,
    pub m0: usize,
    pub answer: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_ratio: Option<f64>,
    /// Edges that left or joined `M_0`.
    pub m0_delta: usize,
    /// Edges that left or joined each `M_i`, lowest level first.
    pub level_deltas: Vec<usize>,
    pub candidate_total: usize,
    pub queue_pops: usize,
    pub nanos: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub updates: usize,
    pub oracle_checks: usize,
    pub mean_ns: f64,
    pub p50_ns: u64,
    pub p99_ns: u64,
    pub max_ns: u64,
    pub mean_adjustment: f64,
    pub max_adjustment: usize,
    pub min_ratio: f64,
    pub final_ratio: f64,
    pub mean_ratio: f64,
    /// Mean of `|M_0| / μ` over the same checkpoints.
    pub mean_base_ratio: f64,
}

impl Summary {
    pub fn from_records(records: &[MetricsRecord]) -> Summary {
        if records.is_empty() {
            return Summary::default();
        }
        let mut nanos: Vec<u64> = records.iter().map(|r| r.nanos).collect();
        nanos.sort_unstable();
        let pct = |q: f64| nanos[((nanos.len() - 1) as f64 * q).round() as usize];
        let checked: Vec<&MetricsRecord> = records.iter().filter(|r| r.ratio.is_some()).collect();
        let mean = |f: &dyn Fn(&MetricsRecord) -> f64| {
            if checked.is_empty() {
                0.0
            } else {
                checked.iter().map(|r| f(r)).sum::<f64>() / checked.len() as f64
            }
        };
        Summary {
            updates: records.len(),
            oracle_checks: checked.len(),
            mean_ns: nanos.iter().sum::<u64>() as f64 / nanos.len() as f64,
            p50_ns: pct(0.5),
            p99_ns: pct(0.99),
            max_ns: *nanos.last().unwrap(),
            mean_adjustment: records.iter().map(|r| r.m0_delta).sum::<usize>() as f64 / records.len() as f64,
            max_adjustment: records.iter().map(|r| r.m0_delta).max().unwrap(),
            min_ratio: if checked.is_empty() { 0.0 } else { checked.iter().filter_map(|r| r.ratio).fold(f64::INFINITY, f64::min) },
            final_ratio: checked.last().and_then(|r| r.ratio).unwrap_or(0.0),
            mean_ratio: mean(&|r| r.ratio.unwrap()),
            mean_base_ratio: mean(&|r| r.base_ratio.unwrap()),
        }
    }
}

/// Replays `events`, handing each record to `sink` as it is produced.
pub fn replay_with<F>(events: &[StreamEvent], config: &ReplayConfig, mut sink: F) -> Result<Summary, ReplayError>
where
    F: FnMut(&MetricsRecord) -> Result<(), ReplayError>,
{
    let n = config.n.unwrap_or_else(|| vertex_count(events).max(1));
    check_replay_valid(events, n, config.delta)?;
    let mut instance = InstanceConfig::new(n, config.delta, config.levels, config.algo_seed);
    if let Some(p) = config.sample_p {
        instance = instance.with_sample_p(p);
    }
    let mut pipeline = Pipeline::new(instance).map_err(|source| ReplayError::Pipeline { seq: 0, source })?;
    let mut warm: Vec<EdgeKey> = Vec::new();
    let mut records = Vec::with_capacity(events.len());
    for (seq, ev) in events.iter().enumerate() {
        let start = Instant::now();
        let report = pipeline.handle_update(ev.update()).map_err(|source| ReplayError::Pipeline { seq, source })?;
        let nanos = start.elapsed().as_nanos() as u64;
        let m0 = pipeline.base().size();
        let answer = pipeline.answer_size();
        let mu = if config.oracle_every > 0 && (seq + 1) % config.oracle_every == 0 {
            let edges: Vec<EdgeKey> = pipeline.instance().records().map(|r| r.key).collect();
            let exact = max_matching_warm(n as usize, &edges, &warm, usize::MAX)
                .map_err(|source| ReplayError::Oracle { seq, source })?;
            warm = exact.witness;
            Some(exact.size)
        } else {
            None
        };
        let ratio_of = |x: usize| mu.map(|m| if m == 0 { 1.0 } else { x as f64 / m as f64 });
        let record = MetricsRecord {
            seq,
            m0,
            answer,
            mu,
            ratio: ratio_of(answer),
            base_ratio: ratio_of(m0),
            m0_delta: report.base.len(),
            level_deltas: report.levels.iter().map(|d| d.len()).collect(),
            candidate_total: report.candidate_total,
            queue_pops: report.queue_pops,
            nanos,
        };
        sink(&record)?;
        records.push(record);
    }
    Ok(Summary::from_records(&records))
}

/// Replays `events`, writing one JSON metrics line per update to `out`.
pub fn replay<W: Write>(events: &[StreamEvent], config: &ReplayConfig, out: &mut W) -> Result<Summary, ReplayError> {
    replay_with(events, config, |r| {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
        Ok(())
    })
}
