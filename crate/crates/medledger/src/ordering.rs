//! Ordering service: serializes endorsed transactions into blocks.
//!
//! Two interchangeable backends seal a block once it is cut:
//!
//! * `kafka_style` — one leader appends to the log after a single broadcast
//!   round to `node_count` followers; each follower's ack latency is drawn
//!   uniformly from [1, 5] ms and the round completes at the slowest ack.
//! * `pow` — a real nonce search over SHA256(header ++ nonce) until the
//!   hash has the configured number of leading zero bits.
//!
//! Blocks are cut at `max_txs_per_block` or when `batch_timeout` elapses,
//! whichever comes first; arrival order is preserved and no empty block is
//! ever emitted.

use std::collections::HashSet;
use std::path::Path;
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use rand::Rng;
use thiserror::Error;

use crate::contracts;
use crate::ledger::{Block, Ledger, Transaction, BLOCK_LOG_FILE};
use crate::membership::{unix_now, Ca, Role};

#[derive(Debug, Error)]
pub enum OrderingError {
    #[error("Duplicate: transaction was already submitted")]
    Duplicate,
    #[error("QueueClosed: ordering service is shut down")]
    QueueClosed,
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    KafkaStyle,
    Pow,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::KafkaStyle => "kafka_style",
            Backend::Pow => "pow",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kafka_style" => Ok(Backend::KafkaStyle),
            "pow" => Ok(Backend::Pow),
            other => Err(format!("unknown backend {other:?}")),
        }
    }
}

/// Ordering parameters; also the `config.txt` schema (`key = value` lines:
/// backend, max_txs_per_block, batch_timeout_ms, pow_difficulty_bits,
/// node_count — unknown keys are left to other readers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingConfig {
    pub backend: Backend,
    pub max_txs_per_block: usize,
    pub batch_timeout: Duration,
    /// Leading zero bits a PoW seal must reach. The default is calibrated so
    /// desk-scale mining stays around a quarter of a second while exceeding
    /// the kafka_style commit latency by well over an order of magnitude
    /// even on small-sample means.
    pub pow_difficulty_bits: u32,
    pub node_count: usize,
}

impl Default for OrderingConfig {
    fn default() -> Self {
        Self {
            backend: Backend::KafkaStyle,
            max_txs_per_block: 10,
            batch_timeout: Duration::from_millis(250),
            pow_difficulty_bits: 19,
            node_count: 4,
        }
    }
}

impl OrderingConfig {
    pub fn validate(&self) -> Result<(), OrderingError> {
        if self.max_txs_per_block < 1 {
            return Err(OrderingError::Config("max_txs_per_block must be >= 1".into()));
        }
        if !(1..=32).contains(&self.pow_difficulty_bits) {
            return Err(OrderingError::Config("pow_difficulty_bits must be in [1, 32]".into()));
        }
        if !(1..=100).contains(&self.node_count) {
            return Err(OrderingError::Config("node_count must be in [1, 100]".into()));
        }
        Ok(())
    }

    /// Parse from `key = value` text; keys this module does not own are
    /// ignored so the node can share the same file.
    pub fn parse(text: &str) -> Result<Self, OrderingError> {
        let mut cfg = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| OrderingError::Config(format!("line {}: not key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let bad = |what: &str| OrderingError::Config(format!("line {}: bad {what}: {v:?}", no + 1));
            match k {
                "backend" => cfg.backend = v.parse().map_err(|_| bad("backend"))?,
                "max_txs_per_block" => {
                    cfg.max_txs_per_block = v.parse().map_err(|_| bad("max_txs_per_block"))?
                }
                "batch_timeout_ms" => {
                    cfg.batch_timeout =
                        Duration::from_millis(v.parse().map_err(|_| bad("batch_timeout_ms"))?)
                }
                "pow_difficulty_bits" => {
                    cfg.pow_difficulty_bits = v.parse().map_err(|_| bad("pow_difficulty_bits"))?
                }
                "node_count" => cfg.node_count = v.parse().map_err(|_| bad("node_count"))?,
                _ => {}
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        format!(
            "backend = {}\nmax_txs_per_block = {}\nbatch_timeout_ms = {}\npow_difficulty_bits = {}\nnode_count = {}\n",
            self.backend,
            self.max_txs_per_block,
            self.batch_timeout.as_millis(),
            self.pow_difficulty_bits,
            self.node_count
        )
    }
}

/// True iff `hash` has at least `bits` leading zero bits.
pub fn meets_difficulty(hash: &[u8; 32], bits: u32) -> bool {
    let full = (bits / 8) as usize;
    if hash[..full].iter().any(|&b| b != 0) {
        return false;
    }
    let rem = bits % 8;
    if rem == 0 {
        return true;
    }
    hash[full] >> (8 - rem) == 0
}

/// Result of a nonce search.
#[derive(Debug, Clone, Copy)]
pub struct PowSeal {
    pub nonce: u64,
    pub attempts: u64,
}

/// Search nonces from 0 upward until SHA256(header ++ nonce) meets the
/// difficulty. Real work, every attempt hashes the full header.
pub fn mine(header: &[u8], difficulty_bits: u32) -> PowSeal {
    let mut nonce = 0u64;
    loop {
        let hash = Block::hash_with_nonce(header, nonce);
        if meets_difficulty(&hash, difficulty_bits) {
            return PowSeal {
                nonce,
                attempts: nonce + 1,
            };
        }
        nonce += 1;
    }
}

/// Duration of one broadcast round: the slowest of `node_count` follower
/// acks, each drawn uniformly from [1, 5] ms.
pub fn replication_round(node_count: usize, rng: &mut impl Rng) -> Duration {
    let mut worst = 0f64;
    for _ in 0..node_count {
        let ack = rng.gen_range(1.0..=5.0);
        if ack > worst {
            worst = ack;
        }
    }
    Duration::from_secs_f64(worst / 1000.0)
}

/// Seal a block the kafka_style way: FIFO order, then block until the
/// simulated replication round to `node_count` followers completes.
pub fn cut_block_kafka(
    height: u64,
    prev_hash: [u8; 32],
    timestamp: u64,
    pending: Vec<Transaction>,
    node_count: usize,
    rng: &mut impl Rng,
) -> Block {
    assert!(!pending.is_empty(), "never cut an empty block");
    std::thread::sleep(replication_round(node_count, rng));
    Block::seal(height, prev_hash, timestamp, 0, pending)
}

/// Seal a block by proof of work: the stored nonce satisfies the difficulty
/// predicate on the block header, and the block hash is that same digest.
pub fn cut_block_pow(
    height: u64,
    prev_hash: [u8; 32],
    timestamp: u64,
    pending: Vec<Transaction>,
    difficulty_bits: u32,
) -> (Block, PowSeal) {
    assert!(!pending.is_empty(), "never cut an empty block");
    let header = Block::header_bytes(height, &prev_hash, timestamp, pending.iter().map(|t| t.tx_id));
    let seal = mine(&header, difficulty_bits);
    (
        Block::seal(height, prev_hash, timestamp, seal.nonce, pending),
        seal,
    )
}

/// Pure cut policy: size or timeout, whichever first, FIFO within a batch.
pub struct BlockCutter {
    max_txs: usize,
    timeout: Duration,
    pending: Vec<Transaction>,
    deadline: Option<Instant>,
}

impl BlockCutter {
    pub fn new(max_txs: usize, timeout: Duration) -> Self {
        Self {
            max_txs,
            timeout,
            pending: Vec::new(),
            deadline: None,
        }
    }

    /// Enqueue a transaction; returns a batch when the size cut triggers.
    pub fn push(&mut self, tx: Transaction, now: Instant) -> Option<Vec<Transaction>> {
        if self.pending.is_empty() {
            self.deadline = Some(now + self.timeout);
        }
        self.pending.push(tx);
        if self.pending.len() >= self.max_txs {
            self.take_batch()
        } else {
            None
        }
    }

    /// Cut on timeout. Never yields an empty batch.
    pub fn tick(&mut self, now: Instant) -> Option<Vec<Transaction>> {
        match self.deadline {
            Some(d) if now >= d && !self.pending.is_empty() => self.take_batch(),
            _ => None,
        }
    }

    /// Drain whatever is pending (used on shutdown).
    pub fn flush(&mut self) -> Option<Vec<Transaction>> {
        if self.pending.is_empty() {
            None
        } else {
            self.take_batch()
        }
    }

    pub fn time_until_deadline(&self, now: Instant) -> Option<Duration> {
        self.deadline
            .filter(|_| !self.pending.is_empty())
            .map(|d| d.saturating_duration_since(now))
    }

    fn take_batch(&mut self) -> Option<Vec<Transaction>> {
        self.deadline = None;
        Some(std::mem::take(&mut self.pending))
    }
}

struct Submission<R> {
    tx: Transaction,
    reply: mpsc::Sender<R>,
}

/// Threaded ordering front end: many submitters, one batcher, one committer.
/// The committer closure owns sealing and ledger writes; this service owns
/// batching, duplicate rejection and result routing.
pub struct OrderingService<R: Send + 'static> {
    sender: Option<mpsc::Sender<Submission<R>>>,
    seen: Arc<Mutex<HashSet<[u8; 32]>>>,
    handle: Option<JoinHandle<()>>,
}

impl<R: Send + 'static> OrderingService<R> {
    /// `commit` receives each cut batch in order and returns one result per
    /// transaction, keyed by tx id.
    pub fn start(
        config: &OrderingConfig,
        already_committed: HashSet<[u8; 32]>,
        mut commit: impl FnMut(Vec<Transaction>) -> Vec<([u8; 32], R)> + Send + 'static,
    ) -> Self {
        let (sender, receiver) = mpsc::channel::<Submission<R>>();
        let mut cutter = BlockCutter::new(config.max_txs_per_block, config.batch_timeout);
        let handle = std::thread::spawn(move || {
            let mut waiting: std::collections::HashMap<[u8; 32], mpsc::Sender<R>> =
                std::collections::HashMap::new();
            let deliver = |batch: Vec<Transaction>,
                               waiting: &mut std::collections::HashMap<[u8; 32], mpsc::Sender<R>>,
                               commit: &mut dyn FnMut(Vec<Transaction>) -> Vec<([u8; 32], R)>| {
                for (tx_id, result) in commit(batch) {
                    if let Some(reply) = waiting.remove(&tx_id) {
                        let _ = reply.send(result);
                    }
                }
            };
            loop {
                let wait = cutter
                    .time_until_deadline(Instant::now())
                    .unwrap_or(Duration::from_secs(3600));
                match receiver.recv_timeout(wait) {
                    Ok(sub) => {
                        waiting.insert(sub.tx.tx_id, sub.reply);
                        if let Some(batch) = cutter.push(sub.tx, Instant::now()) {
                            deliver(batch, &mut waiting, &mut commit);
                        }
                    }
                    Err(mpsc::RecvTimeoutError::Timeout) => {
                        if let Some(batch) = cutter.tick(Instant::now()) {
                            deliver(batch, &mut waiting, &mut commit);
                        }
                    }
                    Err(mpsc::RecvTimeoutError::Disconnected) => {
                        // flush so every accepted tx still lands in a block
                        if let Some(batch) = cutter.flush() {
                            deliver(batch, &mut waiting, &mut commit);
                        }
                        break;
                    }
                }
            }
        });
        Self {
            sender: Some(sender),
            seen: Arc::new(Mutex::new(already_committed)),
            handle: Some(handle),
        }
    }

    /// Enqueue a transaction exactly once; the receiver resolves with the
    /// committed result.
    pub fn submit(&self, tx: Transaction) -> Result<mpsc::Receiver<R>, OrderingError> {
        {
            let mut seen = self.seen.lock().expect("ordering seen-set poisoned");
            if !seen.insert(tx.tx_id) {
                return Err(OrderingError::Duplicate);
            }
        }
        let (reply, receiver) = mpsc::channel();
        let sender = self.sender.as_ref().ok_or(OrderingError::QueueClosed)?;
        if sender.send(Submission { tx, reply }).is_err() {
            return Err(OrderingError::QueueClosed);
        }
        Ok(receiver)
    }

    /// Stop accepting submissions, flush pending work and join the thread.
    pub fn shutdown(&mut self) {
        self.sender.take();
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

impl<R: Send + 'static> Drop for OrderingService<R> {
    fn drop(&mut self) {
        self.shutdown();
    }
}

/// One timed commit in a consensus measurement.
#[derive(Debug, Clone, Copy)]
pub struct ConsensusSample {
    pub backend: Backend,
    pub node_count: usize,
    pub round: usize,
    pub millis: f64,
}

/// Time `rounds` block commits per node count in {10, 20, ..., 100} under
/// the configured backend. Each commit seals a block of no-op transactions
/// (prepared and signed outside the timed window) and appends it to a
/// throwaway ledger; both backends pay one replication broadcast round so
/// the comparison isolates the sealing work.
pub fn measure_consensus_samples(
    config: &OrderingConfig,
    rounds: usize,
) -> Vec<ConsensusSample> {
    assert!(rounds >= 1);
    let mut rng = rand::thread_rng();
    let mut samples = Vec::new();
    for node_count in (10..=100).step_by(10) {
        let dir = tempfile::tempdir().expect("temp dir for consensus run");
        let mut ca = Ca::in_memory();
        ca.register_identity("orderer", Role::Admin, "sys").expect("register orderer");
        let mut exec = contracts::executor();
        let mut ledger =
            Ledger::open(&dir.path().join(BLOCK_LOG_FILE), &mut exec).expect("open ledger");
        ledger
            .append_block(&Block::genesis(unix_now(), Vec::new()), &mut exec)
            .expect("genesis");

        for round in 0..rounds {
            let txs: Vec<Transaction> = (0..config.max_txs_per_block)
                .map(|i| {
                    let args = vec![format!("probe-{node_count}-{round}-{i}").into_bytes()];
                    let payload = Transaction::invocation_payload(
                        crate::ledger::ContractId::Rsc,
                        "QueryRecord",
                        &args,
                    );
                    let envelope = ca.sign("orderer", &payload).expect("sign probe tx");
                    Transaction::new(
                        crate::ledger::TxKind::Invoke,
                        crate::ledger::ContractId::Rsc,
                        "QueryRecord",
                        args,
                        "orderer",
                        unix_now(),
                        envelope,
                    )
                })
                .collect();

            let height = ledger.next_height();
            let prev = ledger.tip_hash();
            let ts = unix_now();
            let start = Instant::now();
            let block = match config.backend {
                Backend::KafkaStyle => {
                    cut_block_kafka(height, prev, ts, txs, node_count, &mut rng)
                }
                Backend::Pow => {
                    let (block, _seal) =
                        cut_block_pow(height, prev, ts, txs, config.pow_difficulty_bits);
                    std::thread::sleep(replication_round(node_count, &mut rng));
                    block
                }
            };
            ledger.append_block(&block, &mut exec).expect("append measured block");
            samples.push(ConsensusSample {
                backend: config.backend,
                node_count,
                round,
                millis: start.elapsed().as_secs_f64() * 1000.0,
            });
        }
    }
    samples
}

/// Mean commit time per node count under the configured backend.
pub fn measure_consensus(config: &OrderingConfig, rounds: usize) -> Vec<(usize, f64)> {
    let samples = measure_consensus_samples(config, rounds);
    (10..=100)
        .step_by(10)
        .map(|nc| {
            let of_nc: Vec<f64> = samples
                .iter()
                .filter(|s| s.node_count == nc)
                .map(|s| s.millis)
                .collect();
            (nc, of_nc.iter().sum::<f64>() / of_nc.len() as f64)
        })
        .collect()
}

/// Load an ordering config from a file, defaulting when the file is absent.
pub fn load_config(path: &Path) -> Result<OrderingConfig, OrderingError> {
    if !path.exists() {
        return Ok(OrderingConfig::default());
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| OrderingError::Config(format!("read {}: {e}", path.display())))?;
    OrderingConfig::parse(&text)
}
