//! Validation suites: replay audits against the oracles plus the
//! statistical and arithmetic validators, each reduced to a pass/fail gate.

use std::time::Instant;

use dynmatch_core::oracle::{
    audit_sparsification, diff_pipeline, find_pivot_level, max_matching_warm, static_reference_of,
    validate_partition_augmentation, validate_vertex_sampling, GadgetFamily, SamplingInstance, SE_ALLOWANCE,
};
use dynmatch_core::{EdgeKey, InstanceConfig, MatchingState, OracleError, Pipeline, PipelineError, Update};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::stream::{generate_stream, Generator, StreamError, StreamEvent, StreamSpec};

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub const SUITES: [&str; 7] = [
    "equivalence",
    "sparsification",
    "sampling-lemma",
    "partition-augmentation",
    "pivot-level",
    "level-stability",
    "final-approx",
];

/// Which checks [`audit_replay`] runs after every update.
#[derive(Clone, Copy, Debug, Default)]
pub struct Checks {
    /// `M_0` equals the greedy matching built from scratch.
    pub base_static: bool,
    /// The full level structure equals the static reference.
    pub reference: bool,
    /// Levels above the updated slice are untouched.
    pub stability: bool,
    /// `M_0` maximal and `|answer| ≥ |M_0| ≥ μ/2` with exact `μ`.
    pub bounds: bool,
    /// No short augmenting path in the union and the `k/(k+1)` bound.
    pub final_matcher: bool,
}

impl Checks {
    pub fn all() -> Self {
        Checks { base_static: true, reference: true, stability: true, bounds: true, final_matcher: true }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReplayAudit {
    pub updates: usize,
    pub base_mismatches: usize,
    pub reference_mismatches: usize,
    /// First reference difference, with its step.
    pub first_difference: Option<String>,
    pub stability_checks: usize,
    pub stability_violations: usize,
    pub maximality_violations: usize,
    pub bound_violations: usize,
    pub short_path_violations: usize,
    pub union_bound_violations: usize,
    /// Smallest `|answer| / μ(union)` seen.
    pub min_union_ratio: f64,
    /// `|M_0|` changes per update.
    pub base_deltas: Vec<usize>,
    /// Time in the pipeline plus the from-scratch `M_0` comparisons.
    pub base_check_ns: u64,
}

impl ReplayAudit {
    pub fn violations(&self) -> usize {
        self.base_mismatches
            + self.reference_mismatches
            + self.stability_violations
            + self.maximality_violations
            + self.bound_violations
            + self.short_path_violations
            + self.union_bound_violations
    }
}

/// Whether some alternating path of at most `max_edges` edges joins two free
/// vertices, found by exhaustive depth-first search.
pub fn has_short_augmenting_path(n: usize, edges: &[EdgeKey], matching: &[EdgeKey], max_edges: usize) -> bool {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.lo().index()].push(e.hi().index());
        adj[e.hi().index()].push(e.lo().index());
    }
    let mut mate = vec![None; n];
    for e in matching {
        mate[e.lo().index()] = Some(e.hi().index());
        mate[e.hi().index()] = Some(e.lo().index());
    }
    fn extend(x: usize, len: usize, max: usize, on: &mut [bool], adj: &[Vec<usize>], mate: &[Option<usize>]) -> bool {
        if len + 1 > max {
            return false;
        }
        for &y in &adj[x] {
            if on[y] || mate[x] == Some(y) {
                continue;
            }
            match mate[y] {
                None => return true,
                Some(z) if !on[z] => {
                    on[y] = true;
                    on[z] = true;
                    let found = extend(z, len + 2, max, on, adj, mate);
                    on[y] = false;
                    on[z] = false;
                    if found {
                        return true;
                    }
                }
                _ => {}
            }
        }
        false
    }
    let mut on = vec![false; n];
    (0..n).filter(|&a| mate[a].is_none()).any(|a| {
        on[a] = true;
        let found = extend(a, 0, max_edges, &mut on, &adj, &mate);
        on[a] = false;
        found
    })
}

fn is_maximal(state: &MatchingState) -> bool {
    state
        .edges()
        .all(|(e, _)| state.matched_edge(e.lo()).is_some() || state.matched_edge(e.hi()).is_some())
}

/// Replays `events` on a fresh pipeline and runs `checks` after each update.
pub fn audit_replay(events: &[StreamEvent], config: InstanceConfig, checks: Checks) -> Result<ReplayAudit, ValidateError> {
    let n = config.n as usize;
    let levels = config.levels as usize;
    let mut p = Pipeline::new(config)?;
    let mut audit = ReplayAudit { min_union_ratio: f64::INFINITY, ..Default::default() };
    let mut warm: Vec<EdgeKey> = Vec::new();
    let mut warm_union: Vec<EdgeKey> = Vec::new();
    for (t, ev) in events.iter().enumerate() {
        let update = ev.update();
        let f = match update {
            Update::Insert(a, b) | Update::Delete(a, b) => EdgeKey::new(a, b).expect("no loops"),
        };
        let before = checks.stability.then(|| p.levels().to_vec());
        let old_rank = p.base().is_matched(f).then(|| p.base().rank(f)).flatten();

        let start = Instant::now();
        let report = p.handle_update(update)?;
        audit.base_check_ns += start.elapsed().as_nanos() as u64;
        audit.updates += 1;
        audit.base_deltas.push(report.base.len());

        if checks.base_static {
            let start = Instant::now();
            let fresh = MatchingState::build_static(n, p.instance().records().map(|r| (r.key, r.rank(0))));
            if &fresh != p.base() {
                audit.base_mismatches += 1;
            }
            audit.base_check_ns += start.elapsed().as_nanos() as u64;
        }
        if checks.reference {
            if let Some(diff) = diff_pipeline(&p, &static_reference_of(p.instance())) {
                audit.reference_mismatches += 1;
                audit.first_difference.get_or_insert_with(|| format!("step {t}: {diff}"));
            }
        }
        if let Some(before) = before {
            // The slice of the updated edge: its rank before a deletion,
            // after an insertion.
            let rank = match update {
                Update::Insert(..) => p.base().is_matched(f).then(|| p.base().rank(f)).flatten(),
                Update::Delete(..) => old_rank,
            };
            if let Some(rank) = rank {
                let j = p.instance().level_of_rank(rank);
                audit.stability_checks += 1;
                let moved = (j + 1..=levels).any(|k| p.level(k) != &before[k - 1] || report.level_mutations[k - 1] != 0);
                if moved {
                    audit.stability_violations += 1;
                }
            }
        }
        if checks.bounds {
            if !is_maximal(p.base()) {
                audit.maximality_violations += 1;
            }
            let edges: Vec<EdgeKey> = p.instance().records().map(|r| r.key).collect();
            let exact = max_matching_warm(n, &edges, &warm, usize::MAX)?;
            let m0 = p.base().size();
            if p.answer_size() < m0 || 2 * m0 < exact.size {
                audit.bound_violations += 1;
            }
            warm = exact.witness;
        }
        if checks.final_matcher {
            let fm = p.final_matcher();
            let k = fm.depth();
            let union = fm.union_edges();
            let answer = fm.matching();
            if has_short_augmenting_path(n, &union, &answer, 2 * k - 1) {
                audit.short_path_violations += 1;
            }
            let exact = max_matching_warm(n, &union, &warm_union, usize::MAX)?;
            if answer.len() * (k + 1) < exact.size * k {
                audit.union_bound_violations += 1;
            }
            if exact.size > 0 {
                audit.min_union_ratio = audit.min_union_ratio.min(answer.len() as f64 / exact.size as f64);
            }
            warm_union = exact.witness;
        }
    }
    if !audit.min_union_ratio.is_finite() {
        audit.min_union_ratio = 1.0;
    }
    Ok(audit)
}

/// Parameters shared by the suites; unset fields take suite defaults.
#[derive(Clone, Debug, Default)]
pub struct SuiteParams {
    pub n: Option<u32>,
    pub delta: Option<u32>,
    pub levels: Option<u32>,
    pub updates: Option<usize>,
    pub seeds: Option<u64>,
    pub trials: Option<usize>,
    pub sample_p: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub details: Value,
}

fn churn_stream(n: u32, delta: u32, updates: usize, seed: u64) -> Result<Vec<StreamEvent>, ValidateError> {
    Ok(generate_stream(&StreamSpec::new(Generator::ErdosChurn, n, delta, updates, seed))?)
}

/// Audits `seeds` churn replays at each level count, summing the audits.
fn replay_suite(params: &SuiteParams, checks: Checks, defaults: (u32, u32, usize, u64)) -> Result<(Value, usize), ValidateError> {
    let n = params.n.unwrap_or(defaults.0);
    let delta = params.delta.unwrap_or(defaults.1);
    let updates = params.updates.unwrap_or(defaults.2);
    let seeds = params.seeds.unwrap_or(defaults.3);
    let level_counts: Vec<u32> = params.levels.map_or(vec![2, 3], |l| vec![l]);
    let mut runs = Vec::new();
    let mut violations = 0;
    for s in 0..seeds {
        let events = churn_stream(n, delta, updates, params.seed.wrapping_add(s))?;
        for &levels in &level_counts {
            let mut config = InstanceConfig::new(n, delta, levels, params.seed.wrapping_add(1_000_003 * (s + 1)));
            if let Some(p) = params.sample_p {
                config = config.with_sample_p(p);
            }
            let audit = audit_replay(&events, config, checks)?;
            violations += audit.violations();
            runs.push(json!({
                "seed": s,
                "levels": levels,
                "updates": audit.updates,
                "violations": audit.violations(),
                "stability_checks": audit.stability_checks,
                "min_union_ratio": audit.min_union_ratio,
                "first_difference": audit.first_difference,
            }));
        }
    }
    Ok((json!({ "n": n, "delta": delta, "updates": updates, "runs": runs, "violations": violations }), violations))
}

pub fn run_suite(suite: &str, params: &SuiteParams) -> Result<SuiteReport, ValidateError> {
    let (pass, details) = match suite {
        "equivalence" => {
            let checks = Checks { base_static: true, reference: true, bounds: true, ..Default::default() };
            let (details, violations) = replay_suite(params, checks, (32, 16, 200, 10))?;
            (violations == 0, details)
        }
        "level-stability" => {
            let checks = Checks { stability: true, ..Default::default() };
            let (details, violations) = replay_suite(params, checks, (64, 16, 500, 10))?;
            (violations == 0, details)
        }
        "final-approx" => {
            let checks = Checks { final_matcher: true, ..Default::default() };
            let (details, violations) = replay_suite(params, checks, (64, 16, 500, 10))?;
            (violations == 0, details)
        }
        "sparsification" => {
            let thresholds: Vec<f64> = (2..=8).map(|k| 0.5f64.powi(k)).collect();
            let n = params.n.unwrap_or(2000) as usize;
            let m = params.updates.unwrap_or(20_000);
            let report = audit_sparsification(n, m, params.trials.unwrap_or(30), &thresholds, params.seed, 4.0);
            (report.pass, serde_json::to_value(&report).expect("serializable"))
        }
        "sampling-lemma" => {
            let trials = params.trials.unwrap_or(10_000);
            let instances = params.seeds.unwrap_or(20);
            let (pass, details) = sampling_suite(instances, trials, params.seed);
            (pass, details)
        }
        "partition-augmentation" => {
            let family = GadgetFamily::new(5000, 1, params.levels.unwrap_or(2), 16, params.levels.unwrap_or(2) as usize, params.seed)
                .with_sample_p(params.sample_p.unwrap_or(0.03));
            let report = validate_partition_augmentation(&family, params.trials.unwrap_or(200), params.seed, 0.01)?;
            (report.check.pass, serde_json::to_value(&report).expect("serializable"))
        }
        "pivot-level" => {
            let (failures, vectors) = pivot_suite(params.trials.unwrap_or(10_000), params.seed);
            (failures.is_empty(), json!({ "vectors": vectors, "failures": failures }))
        }
        other => return Err(ValidateError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport { suite: suite.to_string(), pass, details })
}

/// `K_{8,8}` at `p = 1/4`, then `instances` random bipartite graphs on at
/// most 64 vertices at `p ∈ {0.1, 0.3}`.
pub fn sampling_suite(instances: u64, trials: usize, seed: u64) -> (bool, Value) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![("K8,8".to_string(), 0.25, validate_vertex_sampling(&SamplingInstance::complete_bipartite(8, seed), 0.25, trials, seed))];
    for i in 0..instances {
        let nv = rng.gen_range(4..=32);
        let nu = rng.gen_range(4..=64 - nv);
        let density = rng.gen_range(0.05..0.5);
        let inst = SamplingInstance::random(nv, nu, density, seed.wrapping_add(i));
        for p in [0.1, 0.3] {
            let check = validate_vertex_sampling(&inst, p, trials, rng.gen());
            checks.push((format!("random #{i} |V|={nv} |U|={nu} density={density:.2}"), p, check));
        }
    }
    let pass = checks.iter().all(|(_, _, c)| c.pass);
    let worst = checks
        .iter()
        .map(|(_, _, c)| (c.estimate.mean - c.bound) / c.estimate.std_err.max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    let rows: Vec<Value> = checks
        .iter()
        .map(|(name, p, c)| json!({ "instance": name, "p": p, "mean": c.estimate.mean, "std_err": c.estimate.std_err, "bound": c.bound, "pass": c.pass }))
        .collect();
    (pass, json!({ "trials": trials, "checks": rows, "worst_margin_in_se": worst, "allowance_se": SE_ALLOWANCE }))
}

/// Random size vectors for `L ∈ {2, 3, 4}`; returns the failing vectors and
/// the number tried.
pub fn pivot_suite(vectors: usize, seed: u64) -> (Vec<Vec<u64>>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut tried = 0;
    while tried < vectors {
        let levels = rng.gen_range(2..=4);
        let sizes: Vec<u64> = (0..levels)
            .map(|_| match rng.gen_range(0..4) {
                0 => rng.gen_range(0..1000),
                1 => 1u64 << rng.gen_range(0..48),
                2 => rng.gen_range(0..u32::MAX as u64),
                _ => 0,
            })
            .collect();
        if sizes.iter().all(|&s| s == 0) {
            continue;
        }
        tried += 1;
        if find_pivot_level(&sizes).is_err() {
            failures.push(sizes);
        }
    }
    (failures, tried)
}
