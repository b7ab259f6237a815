//! Load and consensus benchmark harness.
//!
//! `run_load` saturates one node with virtual concurrent clients (threads in
//! this process) and reports wall time, ok/err counts and throughput per
//! (operation, client count) cell as CSV `op,clients,total_ms,ok_count,
//! err_count,tps`. `run_consensus_compare` times kafka_style against
//! proof-of-work commits across node counts 10..100 and emits CSV
//! `backend,node_count,round,millis` plus a gnuplot-friendly means file.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::time::Instant;

use crate::abac::{ObjectAttrs, PolicyDraft, SubjectAttrs, SubjectRole};
use crate::contracts::ContractResult;
use crate::ledger::ContractId;
use crate::membership::Role;
use crate::node::{Node, NodeError};
use crate::ordering::{
    measure_consensus_samples, Backend, ConsensusSample, OrderingConfig,
};

/// Global nonce so repeated runs against one node never reuse target names.
static BENCH_SEQ: AtomicU64 = AtomicU64::new(0);

const BENCH_ADMIN: &str = "bench-admin";
const BENCH_DOCTOR: &str = "bench-doctor";
const BENCH_DEPT: &str = "bench";
/// Far-future policy expiry so load-test grants never lapse mid-run.
const FAR_FUTURE: u64 = 1 << 40;
/// Reused-target pool size for query/update/check workloads.
const POOL_MAX: usize = 500;
const SEED_WORKERS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchOp {
    PscAdd,
    PscUpdate,
    PscQuery,
    PscDelete,
    RscAdd,
    RscUpdate,
    RscQuery,
    RscDelete,
    AscCheck,
}

impl BenchOp {
    pub const ALL: [BenchOp; 9] = [
        BenchOp::PscAdd,
        BenchOp::PscUpdate,
        BenchOp::PscQuery,
        BenchOp::PscDelete,
        BenchOp::RscAdd,
        BenchOp::RscUpdate,
        BenchOp::RscQuery,
        BenchOp::RscDelete,
        BenchOp::AscCheck,
    ];
}

impl std::fmt::Display for BenchOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BenchOp::PscAdd => "PSC.Add",
            BenchOp::PscUpdate => "PSC.Update",
            BenchOp::PscQuery => "PSC.Query",
            BenchOp::PscDelete => "PSC.Delete",
            BenchOp::RscAdd => "RSC.Add",
            BenchOp::RscUpdate => "RSC.Update",
            BenchOp::RscQuery => "RSC.Query",
            BenchOp::RscDelete => "RSC.Delete",
            BenchOp::AscCheck => "ASC.Check",
        })
    }
}

impl std::str::FromStr for BenchOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PSC.Add" => Ok(BenchOp::PscAdd),
            "PSC.Update" => Ok(BenchOp::PscUpdate),
            "PSC.Query" => Ok(BenchOp::PscQuery),
            "PSC.Delete" => Ok(BenchOp::PscDelete),
            "RSC.Add" => Ok(BenchOp::RscAdd),
            "RSC.Update" => Ok(BenchOp::RscUpdate),
            "RSC.Query" => Ok(BenchOp::RscQuery),
            "RSC.Delete" => Ok(BenchOp::RscDelete),
            "ASC.Check" => Ok(BenchOp::AscCheck),
            other => Err(format!("unknown op {other:?}")),
        }
    }
}

/// One workload: a single operation swept across client counts.
#[derive(Debug, Clone)]
pub struct LoadProfile {
    pub client_counts: Vec<usize>,
    pub op: BenchOp,
    pub ops_per_client: usize,
    pub payload_bytes: usize,
    /// Consecutive sweeps pooled into each cell's measurement. Sub-second
    /// read cells need a longer sampling window for stable throughput
    /// numbers; 1 is plenty for ordered (mutating) operations.
    pub samples: usize,
}

impl LoadProfile {
    pub fn new(op: BenchOp) -> Self {
        Self {
            client_counts: vec![200, 400, 600, 800, 1000],
            op,
            ops_per_client: 10,
            payload_bytes: 1024,
            samples: 1,
        }
    }

    fn validate(&self) -> Result<(), NodeError> {
        if self.client_counts.is_empty() {
            return Err(NodeError::BadRequest("client_counts must be non-empty".into()));
        }
        if !self.client_counts.windows(2).all(|w| w[0] < w[1]) {
            return Err(NodeError::BadRequest("client_counts must be ascending".into()));
        }
        if self.ops_per_client < 1 {
            return Err(NodeError::BadRequest("ops_per_client must be >= 1".into()));
        }
        Ok(())
    }
}

/// Measured result for one (op, clients) cell.
#[derive(Debug, Clone)]
pub struct LoadCell {
    pub op: BenchOp,
    pub clients: usize,
    pub total_ms: f64,
    pub ok_count: u64,
    pub err_count: u64,
    pub tps: f64,
    pub mean_latency_ms: f64,
}

#[derive(Clone)]
enum Job {
    PolicyAdd(PolicyDraft),
    PolicyUpdate(PolicyDraft),
    PolicyQuery(SubjectAttrs, ObjectAttrs),
    PolicyDelete(SubjectAttrs, ObjectAttrs),
    RecordAdd(String, Vec<u8>),
    RecordUpdate(String, Vec<u8>),
    RecordQuery(String),
    RecordDelete(String),
    AccessCheck(String),
}

fn subject_for(user: &str) -> SubjectAttrs {
    SubjectAttrs::new(user, SubjectRole::Doctor, BENCH_DEPT)
}

fn policy_draft(user: &str, record: &str, end_time: u64) -> PolicyDraft {
    PolicyDraft::new(subject_for(user), ObjectAttrs::new(record), true, 0, end_time)
}

fn payload_for(id: &str, bytes: usize) -> Vec<u8> {
    let mut v = id.as_bytes().to_vec();
    v.resize(bytes.max(id.len()), 0x5a);
    v
}

fn run_job(node: &Node, job: &Job) -> Result<ContractResult, NodeError> {
    match job {
        Job::PolicyAdd(d) => node.add_policy(BENCH_ADMIN, d),
        Job::PolicyUpdate(d) => node.update_policy(BENCH_ADMIN, d),
        // queries travel as signed client requests, like any SDK client's
        Job::PolicyQuery(s, o) => {
            let args = vec![
                s.canonical_text().into_bytes(),
                o.canonical_text().into_bytes(),
            ];
            let request = node.request(BENCH_DOCTOR, ContractId::Psc, "QueryPolicy", &args)?;
            node.submit_invoke(request)
        }
        Job::PolicyDelete(s, o) => node.delete_policy(BENCH_ADMIN, s, o),
        Job::RecordAdd(id, content) => node.add_record(BENCH_DOCTOR, id, content),
        Job::RecordUpdate(id, content) => node.update_record(BENCH_DOCTOR, id, content),
        Job::RecordQuery(id) => {
            let args = vec![id.as_bytes().to_vec()];
            let request = node.request(BENCH_DOCTOR, ContractId::Rsc, "QueryRecord", &args)?;
            node.submit_invoke(request)
        }
        Job::RecordDelete(id) => node.delete_record(BENCH_DOCTOR, id),
        Job::AccessCheck(record) => {
            node.check_access(BENCH_DOCTOR, SubjectRole::Doctor, BENCH_DEPT, record)
        }
    }
}

/// Run jobs across `workers` threads. All workers are spawned and parked on
/// a barrier first, so the measured wall clock covers request traffic only,
/// not thread setup. Returns (ok, err, wall seconds, mean latency ms).
fn run_concurrent(
    node: &Arc<Node>,
    jobs: Vec<Vec<Job>>,
) -> (u64, u64, f64, f64) {
    let ok = Arc::new(AtomicU64::new(0));
    let err = Arc::new(AtomicU64::new(0));
    let latency_micros = Arc::new(AtomicU64::new(0));
    let barrier = Arc::new(std::sync::Barrier::new(jobs.len() + 1));
    let handles: Vec<_> = jobs
        .into_iter()
        .map(|chunk| {
            let node = Arc::clone(node);
            let ok = Arc::clone(&ok);
            let err = Arc::clone(&err);
            let lat = Arc::clone(&latency_micros);
            let barrier = Arc::clone(&barrier);
            std::thread::spawn(move || {
                barrier.wait();
                for job in chunk {
                    let t0 = Instant::now();
                    let outcome = run_job(&node, &job);
                    lat.fetch_add(t0.elapsed().as_micros() as u64, AtomicOrdering::Relaxed);
                    match outcome {
                        Ok(r) if r.is_ok() => ok.fetch_add(1, AtomicOrdering::Relaxed),
                        _ => err.fetch_add(1, AtomicOrdering::Relaxed),
                    };
                }
            })
        })
        .collect();
    barrier.wait();
    let started = Instant::now();
    for h in handles {
        let _ = h.join();
    }
    let wall = started.elapsed().as_secs_f64();
    let ok_n = ok.load(AtomicOrdering::Relaxed);
    let err_n = err.load(AtomicOrdering::Relaxed);
    let total = (ok_n + err_n).max(1);
    let mean_ms = latency_micros.load(AtomicOrdering::Relaxed) as f64 / total as f64 / 1000.0;
    (ok_n, err_n, wall, mean_ms)
}

// round-robin so no worker ends up with a long sequential tail
fn chunk_jobs(jobs: Vec<Job>, workers: usize) -> Vec<Vec<Job>> {
    let mut out: Vec<Vec<Job>> = (0..workers).map(|_| Vec::new()).collect();
    for (i, job) in jobs.into_iter().enumerate() {
        out[i % workers].push(job);
    }
    out.retain(|chunk| !chunk.is_empty());
    out
}

fn ensure_bench_identities(node: &Node) -> Result<(), NodeError> {
    if node.identity(BENCH_ADMIN).is_none() {
        node.register_identity(BENCH_ADMIN, Role::Admin, BENCH_DEPT)?;
    }
    if node.identity(BENCH_DOCTOR).is_none() {
        node.register_identity(BENCH_DOCTOR, Role::Doctor, BENCH_DEPT)?;
    }
    Ok(())
}

/// Seed `count` target entities through the normal pipeline, in parallel.
fn seed(node: &Arc<Node>, jobs: Vec<Job>) -> Result<(), NodeError> {
    let total = jobs.len();
    if total == 0 {
        return Ok(());
    }
    let t0 = Instant::now();
    let workers = SEED_WORKERS.min(total);
    let (ok, err, _, _) = run_concurrent(node, chunk_jobs(jobs, workers));
    if err > 0 {
        return Err(NodeError::Internal(format!(
            "seeding failed: {err} of {} ops errored (ok {ok})",
            total
        )));
    }
    eprintln!("    seeded {total} targets in {:.1?}", t0.elapsed());
    Ok(())
}

/// Build this cell's jobs, seeding whatever targets the op consumes.
fn prepare_jobs(
    node: &Arc<Node>,
    op: BenchOp,
    total_ops: usize,
    payload_bytes: usize,
) -> Result<Vec<Job>, NodeError> {
    let run = BENCH_SEQ.fetch_add(1, AtomicOrdering::Relaxed);
    let tag = |i: usize| format!("lb{run}x{i}");
    match op {
        BenchOp::PscAdd => Ok((0..total_ops)
            .map(|i| Job::PolicyAdd(policy_draft(&tag(i), &tag(i), FAR_FUTURE)))
            .collect()),
        BenchOp::PscUpdate | BenchOp::PscQuery => {
            let pool = POOL_MAX.min(total_ops);
            seed(
                node,
                (0..pool)
                    .map(|i| Job::PolicyAdd(policy_draft(&tag(i), &tag(i), FAR_FUTURE)))
                    .collect(),
            )?;
            Ok((0..total_ops)
                .map(|i| {
                    let t = tag(i % pool);
                    if op == BenchOp::PscUpdate {
                        // unique end time keeps every update distinct
                        Job::PolicyUpdate(policy_draft(&t, &t, FAR_FUTURE + 1 + i as u64))
                    } else {
                        Job::PolicyQuery(subject_for(&t), ObjectAttrs::new(&t))
                    }
                })
                .collect())
        }
        BenchOp::PscDelete => {
            seed(
                node,
                (0..total_ops)
                    .map(|i| Job::PolicyAdd(policy_draft(&tag(i), &tag(i), FAR_FUTURE)))
                    .collect(),
            )?;
            Ok((0..total_ops)
                .map(|i| Job::PolicyDelete(subject_for(&tag(i)), ObjectAttrs::new(&tag(i))))
                .collect())
        }
        BenchOp::RscAdd => Ok((0..total_ops)
            .map(|i| Job::RecordAdd(tag(i), payload_for(&tag(i), payload_bytes)))
            .collect()),
        BenchOp::RscUpdate | BenchOp::RscQuery => {
            let pool = POOL_MAX.min(total_ops);
            seed(
                node,
                (0..pool)
                    .map(|i| Job::RecordAdd(tag(i), payload_for(&tag(i), payload_bytes)))
                    .collect(),
            )?;
            Ok((0..total_ops)
                .map(|i| {
                    let t = tag(i % pool);
                    if op == BenchOp::RscUpdate {
                        let fresh = format!("{t}v{i}");
                        Job::RecordUpdate(t, payload_for(&fresh, payload_bytes))
                    } else {
                        Job::RecordQuery(t)
                    }
                })
                .collect())
        }
        BenchOp::RscDelete => {
            seed(
                node,
                (0..total_ops)
                    .map(|i| Job::RecordAdd(tag(i), payload_for(&tag(i), payload_bytes)))
                    .collect(),
            )?;
            Ok((0..total_ops).map(|i| Job::RecordDelete(tag(i))).collect())
        }
        BenchOp::AscCheck => {
            let pool = POOL_MAX.min(total_ops);
            seed(
                node,
                (0..pool)
                    .map(|i| Job::RecordAdd(tag(i), payload_for(&tag(i), payload_bytes)))
                    .collect(),
            )?;
            seed(
                node,
                (0..pool)
                    .map(|i| Job::PolicyAdd(policy_draft(BENCH_DOCTOR, &tag(i), FAR_FUTURE)))
                    .collect(),
            )?;
            Ok((0..total_ops).map(|i| Job::AccessCheck(tag(i % pool))).collect())
        }
    }
}

/// Sweep one operation across the profile's client counts. Each cell spawns
/// `clients` threads issuing `ops_per_client` requests; seeding happens
/// before the timer starts. Failed ops are counted, never retried.
pub fn run_load(node: &Arc<Node>, profile: &LoadProfile) -> Result<Vec<LoadCell>, NodeError> {
    profile.validate()?;
    ensure_bench_identities(node)?;
    let mut cells = Vec::new();
    for &clients in &profile.client_counts {
        let total_ops = clients * profile.ops_per_client;
        let (mut ok, mut err, mut wall, mut weighted_latency) = (0u64, 0u64, 0f64, 0f64);
        for _ in 0..profile.samples.max(1) {
            let jobs = prepare_jobs(node, profile.op, total_ops, profile.payload_bytes)?;
            debug_assert_eq!(jobs.len(), total_ops);
            let chunks = chunk_jobs(jobs, clients);
            let (ok_1, err_1, wall_1, latency_1) = run_concurrent(node, chunks);
            ok += ok_1;
            err += err_1;
            wall += wall_1;
            weighted_latency += latency_1 * (ok_1 + err_1) as f64;
        }
        cells.push(LoadCell {
            op: profile.op,
            clients,
            total_ms: wall * 1000.0,
            ok_count: ok,
            err_count: err,
            tps: ok as f64 / wall,
            mean_latency_ms: weighted_latency / (ok + err).max(1) as f64,
        });
    }
    Ok(cells)
}

pub fn write_load_csv(path: &Path, cells: &[LoadCell]) -> std::io::Result<()> {
    let mut out = String::from("op,clients,total_ms,ok_count,err_count,tps\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{:.3},{},{},{:.3}\n",
            c.op, c.clients, c.total_ms, c.ok_count, c.err_count, c.tps
        ));
    }
    std::fs::write(path, out)
}

/// Time both backends over node counts 10..100 step 10.
pub fn run_consensus_compare(base: &OrderingConfig, rounds: usize) -> Vec<ConsensusSample> {
    let kafka = OrderingConfig {
        backend: Backend::KafkaStyle,
        ..base.clone()
    };
    let pow = OrderingConfig {
        backend: Backend::Pow,
        ..base.clone()
    };
    let mut samples = measure_consensus_samples(&kafka, rounds);
    samples.extend(measure_consensus_samples(&pow, rounds));
    samples
}

pub fn mean_by_node_count(samples: &[ConsensusSample], backend: Backend) -> Vec<(usize, f64)> {
    (10..=100)
        .step_by(10)
        .map(|nc| {
            let xs: Vec<f64> = samples
                .iter()
                .filter(|s| s.backend == backend && s.node_count == nc)
                .map(|s| s.millis)
                .collect();
            (nc, xs.iter().sum::<f64>() / xs.len().max(1) as f64)
        })
        .collect()
}

pub fn write_consensus_csv(path: &Path, samples: &[ConsensusSample]) -> std::io::Result<()> {
    let mut out = String::from("backend,node_count,round,millis\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{:.3}\n",
            s.backend, s.node_count, s.round, s.millis
        ));
    }
    std::fs::write(path, out)
}

/// Gnuplot-friendly means: `node_count kafka_mean_ms pow_mean_ms` rows.
pub fn write_consensus_gnuplot(path: &Path, samples: &[ConsensusSample]) -> std::io::Result<()> {
    let kafka = mean_by_node_count(samples, Backend::KafkaStyle);
    let pow = mean_by_node_count(samples, Backend::Pow);
    let mut out = String::from("# node_count kafka_mean_ms pow_mean_ms\n");
    for ((nc, k), (_, p)) in kafka.iter().zip(&pow) {
        out.push_str(&format!("{nc} {k:.3} {p:.3}\n"));
    }
    std::fs::write(path, out)
}
