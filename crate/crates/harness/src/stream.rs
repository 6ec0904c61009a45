//! Oblivious update streams.
//!
//! A stream is fully materialized from the adversary seed before any
//! algorithm randomness exists. On disk it is one JSON object per line,
//! `{"op":"ins"|"del","u":int,"v":int}`.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use dynmatch_core::{EdgeKey, Update, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("invalid stream spec: {0}")]
    Spec(String),
    #[error("event {seq}: {reason}")]
    Invalid { seq: usize, reason: String },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "ins")]
    Insert,
    #[serde(rename = "del")]
    Delete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamEvent {
    pub op: Op,
    pub u: u32,
    pub v: u32,
}

impl StreamEvent {
    pub fn insert(e: EdgeKey) -> Self {
        StreamEvent { op: Op::Insert, u: e.lo().0, v: e.hi().0 }
    }

    pub fn delete(e: EdgeKey) -> Self {
        StreamEvent { op: Op::Delete, u: e.lo().0, v: e.hi().0 }
    }

    pub fn update(&self) -> Update {
        let (u, v) = (VertexId(self.u), VertexId(self.v));
        match self.op {
            Op::Insert => Update::Insert(u, v),
            Op::Delete => Update::Delete(u, v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    ErdosChurn,
    SlidingWindow,
    CliquePm,
    BipartiteChurn,
    File(PathBuf),
}

impl std::str::FromStr for Generator {
    type Err = StreamError;

    fn from_str(s: &str) -> Result<Self, StreamError> {
        Ok(match s {
            "erdos-churn" => Generator::ErdosChurn,
            "sliding-window" => Generator::SlidingWindow,
            "clique-pm" => Generator::CliquePm,
            "bipartite-churn" => Generator::BipartiteChurn,
            other => match other.strip_prefix("file:") {
                Some(path) => Generator::File(PathBuf::from(path)),
                None => return Err(StreamError::Spec(format!("unknown generator {other}"))),
            },
        })
    }
}

#[derive(Clone, Debug)]
pub struct StreamSpec {
    pub generator: Generator,
    pub n: u32,
    pub delta: u32,
    /// Total number of events; for `clique-pm`, the churn after construction.
    pub length: usize,
    pub adversary_seed: u64,
    /// Leading insert-only events of the churn generators; defaults to half
    /// the length.
    pub warmup: Option<usize>,
    /// Deletion probability once warmed up.
    pub p_delete: f64,
    /// Window of `sliding-window`; defaults to `n`.
    pub window: Option<usize>,
}

impl StreamSpec {
    pub fn new(generator: Generator, n: u32, delta: u32, length: usize, adversary_seed: u64) -> Self {
        StreamSpec { generator, n, delta, length, adversary_seed, warmup: None, p_delete: 0.5, window: None }
    }
}

/// Present edges with degrees, supporting uniform sampling of present edges.
struct EdgeBag {
    degree: Vec<u32>,
    delta: u32,
    list: Vec<EdgeKey>,
    set: BTreeSet<EdgeKey>,
}

impl EdgeBag {
    fn new(n: u32, delta: u32) -> Self {
        EdgeBag { degree: vec![0; n as usize], delta, list: Vec::new(), set: BTreeSet::new() }
    }

    fn admissible(&self, e: EdgeKey) -> bool {
        !self.set.contains(&e) && self.degree[e.lo().index()] < self.delta && self.degree[e.hi().index()] < self.delta
    }

    fn insert(&mut self, e: EdgeKey) {
        self.set.insert(e);
        self.list.push(e);
        self.degree[e.lo().index()] += 1;
        self.degree[e.hi().index()] += 1;
    }

    fn remove_at(&mut self, i: usize) -> EdgeKey {
        let e = self.list.swap_remove(i);
        self.set.remove(&e);
        self.degree[e.lo().index()] -= 1;
        self.degree[e.hi().index()] -= 1;
        e
    }

    fn remove(&mut self, e: EdgeKey) {
        let i = self.list.iter().position(|&x| x == e).expect("present");
        self.remove_at(i);
    }
}

const ATTEMPTS: usize = 10_000;

fn draw_edge(rng: &mut ChaCha8Rng, bag: &EdgeBag, pick: impl Fn(&mut ChaCha8Rng) -> (u32, u32)) -> Option<EdgeKey> {
    (0..ATTEMPTS).find_map(|_| {
        let (u, v) = pick(rng);
        EdgeKey::new(VertexId(u), VertexId(v)).filter(|&e| bag.admissible(e))
    })
}

fn churn(spec: &StreamSpec, rng: &mut ChaCha8Rng, pick: impl Fn(&mut ChaCha8Rng) -> (u32, u32)) -> Result<Vec<StreamEvent>, StreamError> {
    let warmup = spec.warmup.unwrap_or(spec.length / 2);
    let mut bag = EdgeBag::new(spec.n, spec.delta);
    let mut out = Vec::with_capacity(spec.length);
    while out.len() < spec.length {
        let delete = out.len() >= warmup && !bag.list.is_empty() && rng.gen_bool(spec.p_delete);
        if delete {
            let i = rng.gen_range(0..bag.list.len());
            out.push(StreamEvent::delete(bag.remove_at(i)));
        } else {
            let Some(e) = draw_edge(rng, &bag, &pick) else {
                if bag.list.is_empty() {
                    return Err(StreamError::Spec("no admissible edge exists".into()));
                }
                let i = rng.gen_range(0..bag.list.len());
                out.push(StreamEvent::delete(bag.remove_at(i)));
                continue;
            };
            bag.insert(e);
            out.push(StreamEvent::insert(e));
        }
    }
    Ok(out)
}

pub fn generate_stream(spec: &StreamSpec) -> Result<Vec<StreamEvent>, StreamError> {
    if spec.n < 2 && !matches!(spec.generator, Generator::File(_)) {
        return Err(StreamError::Spec("need at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.adversary_seed);
    let n = spec.n;
    match &spec.generator {
        Generator::ErdosChurn => churn(spec, &mut rng, |r| (r.gen_range(0..n), r.gen_range(0..n))),
        Generator::BipartiteChurn => {
            let half = n / 2;
            churn(spec, &mut rng, |r| (r.gen_range(0..half), r.gen_range(half..n)))
        }
        Generator::SlidingWindow => sliding_window(spec, &mut rng),
        Generator::CliquePm => clique_pm(spec, &mut rng),
        Generator::File(path) => {
            let events = read_stream(path)?;
            check_replay_valid(&events, spec.n, spec.delta)?;
            Ok(events)
        }
    }
}

/// Step `t` inserts a fresh edge, preceded from step `w` on by deleting the
/// edge inserted at step `t − w`.
fn sliding_window(spec: &StreamSpec, rng: &mut ChaCha8Rng) -> Result<Vec<StreamEvent>, StreamError> {
    let w = spec.window.unwrap_or(spec.n as usize).max(1);
    let n = spec.n;
    let mut bag = EdgeBag::new(n, spec.delta);
    let mut inserted: Vec<EdgeKey> = Vec::new();
    let mut out = Vec::with_capacity(spec.length);
    let mut t = 0;
    while out.len() < spec.length {
        if t >= w {
            let old = inserted[t - w];
            bag.remove(old);
            out.push(StreamEvent::delete(old));
            if out.len() == spec.length {
                break;
            }
        }
        let e = draw_edge(rng, &bag, |r| (r.gen_range(0..n), r.gen_range(0..n)))
            .ok_or_else(|| StreamError::Spec(format!("window {w} does not fit under degree cap {}", spec.delta)))?;
        bag.insert(e);
        inserted.push(e);
        out.push(StreamEvent::insert(e));
        t += 1;
    }
    Ok(out)
}

/// A clique on the first half of the vertices with one pendant edge per
/// clique vertex, followed by `length` churn events on clique edges.
fn clique_pm(spec: &StreamSpec, rng: &mut ChaCha8Rng) -> Result<Vec<StreamEvent>, StreamError> {
    if !spec.n.is_multiple_of(2) {
        return Err(StreamError::Spec("clique-pm needs an even vertex count".into()));
    }
    let half = spec.n / 2;
    if spec.delta < half {
        return Err(StreamError::Spec(format!(
            "clique-pm on {} vertices needs degree cap at least {half}, got {}",
            spec.n, spec.delta
        )));
    }
    let mut out = Vec::new();
    for i in 0..half {
        for j in i + 1..half {
            out.push(StreamEvent::insert(EdgeKey::of(i, j)));
        }
    }
    for i in 0..half {
        out.push(StreamEvent::insert(EdgeKey::of(i, i + half)));
    }
    if half < 2 {
        return Ok(out);
    }
    let clique_edges = (half as usize) * (half as usize - 1) / 2;
    let mut absent: Vec<EdgeKey> = Vec::new();
    let mut removed = BTreeSet::new();
    for _ in 0..spec.length {
        let delete = absent.is_empty() || (absent.len() < clique_edges && rng.gen_bool(0.5));
        if delete {
            let e = loop {
                let pair = (VertexId(rng.gen_range(0..half)), VertexId(rng.gen_range(0..half)));
                if let Some(e) = EdgeKey::new(pair.0, pair.1).filter(|e| !removed.contains(e)) {
                    break e;
                }
            };
            removed.insert(e);
            absent.push(e);
            out.push(StreamEvent::delete(e));
        } else {
            let e = absent.swap_remove(rng.gen_range(0..absent.len()));
            removed.remove(&e);
            out.push(StreamEvent::insert(e));
        }
    }
    Ok(out)
}

/// Checks that the stream never deletes an absent edge, never inserts a
/// present one or a loop, and never exceeds the degree cap.
pub fn check_replay_valid(events: &[StreamEvent], n: u32, delta: u32) -> Result<(), StreamError> {
    let mut bag = EdgeBag::new(n, delta);
    for (seq, ev) in events.iter().enumerate() {
        let invalid = |reason: String| StreamError::Invalid { seq, reason };
        if ev.u >= n || ev.v >= n {
            return Err(invalid(format!("vertex outside 0..{n}")));
        }
        let e = EdgeKey::new(VertexId(ev.u), VertexId(ev.v)).ok_or_else(|| invalid("self-loop".into()))?;
        match ev.op {
            Op::Insert => {
                if bag.set.contains(&e) {
                    return Err(invalid(format!("{e} inserted twice")));
                }
                if !bag.admissible(e) {
                    return Err(invalid(format!("{e} exceeds degree cap {delta}")));
                }
                bag.insert(e);
            }
            Op::Delete => {
                if !bag.set.contains(&e) {
                    return Err(invalid(format!("{e} deleted while absent")));
                }
                bag.remove(e);
            }
        }
    }
    Ok(())
}

/// One past the largest vertex ID in the stream.
pub fn vertex_count(events: &[StreamEvent]) -> u32 {
    events.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0)
}

pub fn write_stream(path: &Path, events: &[StreamEvent]) -> Result<(), StreamError> {
    let mut w = BufWriter::new(File::create(path)?);
    for ev in events {
        serde_json::to_writer(&mut w, ev).map_err(|source| StreamError::Parse { line: 0, source })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stream(path: &Path) -> Result<Vec<StreamEvent>, StreamError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| StreamError::Parse { line: i + 1, source })?);
    }
    Ok(out)
}
