//! Hash-chained block log plus the versioned world state derived from it.
//!
//! Blocks are persisted as `u32 length || canonical block bytes` records in
//! `blocks.log`. World state is an in-memory map rebuilt by re-executing the
//! log on open, so state is always a pure function of the log. Deletes are
//! tombstones; committed blocks are never rewritten.
//!
//! Hash layout:
//!   tx_id      = SHA256(kind ++ contract ++ method ++ args ++ submitter ++ timestamp)
//!   block_hash = SHA256(height ++ prev_hash ++ timestamp ++ tx_ids ++ nonce)
//! The nonce participates in the block hash so that a proof-of-work seal and
//! the chain link are the same value and every persisted byte is covered.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::{CodecError, Reader, Writer};
use crate::membership::{Ca, SignedEnvelope};

pub const BLOCK_LOG_FILE: &str = "blocks.log";

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("ChainMismatch: block does not extend the current tip")]
    ChainMismatch,
    #[error("InvalidBlock: {0}")]
    InvalidBlock(String),
    #[error("DuplicateTx: transaction {0} was already committed")]
    DuplicateTx(String),
    #[error("KeyNotFound: {0}")]
    KeyNotFound(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TxKind {
    Deploy,
    Invoke,
}

impl TxKind {
    fn as_u8(self) -> u8 {
        match self {
            TxKind::Deploy => 0,
            TxKind::Invoke => 1,
        }
    }

    fn from_u8(v: u8) -> Result<Self, CodecError> {
        match v {
            0 => Ok(TxKind::Deploy),
            1 => Ok(TxKind::Invoke),
            _ => Err(CodecError::Malformed("tx kind")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContractId {
    Psc,
    Asc,
    Rsc,
}

impl ContractId {
    fn as_u8(self) -> u8 {
        match self {
            ContractId::Psc => 0,
            ContractId::Asc => 1,
            ContractId::Rsc => 2,
        }
    }

    fn from_u8(v: u8) -> Result<Self, CodecError> {
        match v {
            0 => Ok(ContractId::Psc),
            1 => Ok(ContractId::Asc),
            2 => Ok(ContractId::Rsc),
            _ => Err(CodecError::Malformed("contract id")),
        }
    }
}

impl fmt::Display for ContractId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContractId::Psc => "PSC",
            ContractId::Asc => "ASC",
            ContractId::Rsc => "RSC",
        })
    }
}

impl FromStr for ContractId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PSC" => Ok(ContractId::Psc),
            "ASC" => Ok(ContractId::Asc),
            "RSC" => Ok(ContractId::Rsc),
            other => Err(format!("unknown contract {other:?}")),
        }
    }
}

/// A contract invocation carried by the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub tx_id: [u8; 32],
    pub kind: TxKind,
    pub contract: ContractId,
    pub method: String,
    pub args: Vec<Vec<u8>>,
    pub submitter: String,
    pub envelope: SignedEnvelope,
    pub timestamp: u64,
}

impl Transaction {
    pub fn new(
        kind: TxKind,
        contract: ContractId,
        method: &str,
        args: Vec<Vec<u8>>,
        submitter: &str,
        timestamp: u64,
        envelope: SignedEnvelope,
    ) -> Self {
        let tx_id = Self::compute_id(kind, contract, method, &args, submitter, timestamp);
        Self {
            tx_id,
            kind,
            contract,
            method: method.to_string(),
            args,
            submitter: submitter.to_string(),
            envelope,
            timestamp,
        }
    }

    /// Canonical preimage of the tx id: every field except the envelope.
    pub fn id_preimage(
        kind: TxKind,
        contract: ContractId,
        method: &str,
        args: &[Vec<u8>],
        submitter: &str,
        timestamp: u64,
    ) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_u8(kind.as_u8());
        w.put_u8(contract.as_u8());
        w.put_str(method);
        w.put_u32(args.len() as u32);
        for a in args {
            w.put_bytes(a);
        }
        w.put_str(submitter);
        w.put_u64(timestamp);
        w.into_bytes()
    }

    pub fn compute_id(
        kind: TxKind,
        contract: ContractId,
        method: &str,
        args: &[Vec<u8>],
        submitter: &str,
        timestamp: u64,
    ) -> [u8; 32] {
        Sha256::digest(Self::id_preimage(kind, contract, method, args, submitter, timestamp)).into()
    }

    /// The bytes a client signs: the invocation triple, independent of the
    /// node-assigned kind and timestamp.
    pub fn invocation_payload(contract: ContractId, method: &str, args: &[Vec<u8>]) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_u8(contract.as_u8());
        w.put_str(method);
        w.put_u32(args.len() as u32);
        for a in args {
            w.put_bytes(a);
        }
        w.into_bytes()
    }

    /// Decode an invocation payload back into (contract, method, args).
    pub fn parse_invocation(
        payload: &[u8],
    ) -> Result<(ContractId, String, Vec<Vec<u8>>), CodecError> {
        let mut r = Reader::new(payload);
        let contract = ContractId::from_u8(r.u8()?)?;
        let method = r.string()?;
        let n = r.u32()? as usize;
        if n > 1 << 20 {
            return Err(CodecError::Malformed("arg count"));
        }
        let mut args = Vec::with_capacity(n);
        for _ in 0..n {
            args.push(r.bytes()?);
        }
        r.finish()?;
        Ok((contract, method, args))
    }

    fn encode(&self, w: &mut Writer) {
        w.put_fixed(&self.tx_id);
        w.put_u8(self.kind.as_u8());
        w.put_u8(self.contract.as_u8());
        w.put_str(&self.method);
        w.put_u32(self.args.len() as u32);
        for a in &self.args {
            w.put_bytes(a);
        }
        w.put_str(&self.submitter);
        w.put_u64(self.timestamp);
        w.put_bytes(&self.envelope.payload);
        w.put_str(&self.envelope.signer);
        w.put_bytes(&self.envelope.signature);
    }

    fn decode(r: &mut Reader) -> Result<Self, CodecError> {
        let tx_id = r.fixed32()?;
        let kind = TxKind::from_u8(r.u8()?)?;
        let contract = ContractId::from_u8(r.u8()?)?;
        let method = r.string()?;
        let n = r.u32()? as usize;
        if n > 1 << 20 {
            return Err(CodecError::Malformed("arg count"));
        }
        let mut args = Vec::with_capacity(n);
        for _ in 0..n {
            args.push(r.bytes()?);
        }
        let submitter = r.string()?;
        let timestamp = r.u64()?;
        let envelope = SignedEnvelope {
            payload: r.bytes()?,
            signer: r.string()?,
            signature: r.bytes()?,
        };
        Ok(Self {
            tx_id,
            kind,
            contract,
            method,
            args,
            submitter,
            envelope,
            timestamp,
        })
    }

    /// Structural self-consistency: stored id matches the recomputed one and
    /// the envelope wraps exactly this invocation under the submitter's name.
    pub fn check_integrity(&self) -> Result<(), LedgerError> {
        let want = Self::compute_id(
            self.kind,
            self.contract,
            &self.method,
            &self.args,
            &self.submitter,
            self.timestamp,
        );
        if want != self.tx_id {
            return Err(LedgerError::InvalidBlock("tx id mismatch".into()));
        }
        if self.envelope.payload
            != Self::invocation_payload(self.contract, &self.method, &self.args)
        {
            return Err(LedgerError::InvalidBlock("envelope payload mismatch".into()));
        }
        if self.envelope.signer != self.submitter {
            return Err(LedgerError::InvalidBlock("envelope signer mismatch".into()));
        }
        Ok(())
    }
}

/// One sealed block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub height: u64,
    pub prev_hash: [u8; 32],
    pub timestamp: u64,
    pub nonce: u64,
    pub txs: Vec<Transaction>,
    pub block_hash: [u8; 32],
}

impl Block {
    /// Header preimage: height ++ prev_hash ++ timestamp ++ concatenated
    /// tx ids. The nonce is appended separately by `hash_with_nonce`.
    pub fn header_bytes(
        height: u64,
        prev_hash: &[u8; 32],
        timestamp: u64,
        tx_ids: impl IntoIterator<Item = [u8; 32]>,
    ) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_u64(height);
        w.put_fixed(prev_hash);
        w.put_u64(timestamp);
        for id in tx_ids {
            w.put_fixed(&id);
        }
        w.into_bytes()
    }

    pub fn hash_with_nonce(header: &[u8], nonce: u64) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(header);
        h.update(nonce.to_be_bytes());
        h.finalize().into()
    }

    pub fn seal(
        height: u64,
        prev_hash: [u8; 32],
        timestamp: u64,
        nonce: u64,
        txs: Vec<Transaction>,
    ) -> Self {
        let header = Self::header_bytes(height, &prev_hash, timestamp, txs.iter().map(|t| t.tx_id));
        let block_hash = Self::hash_with_nonce(&header, nonce);
        Self {
            height,
            prev_hash,
            timestamp,
            nonce,
            txs,
            block_hash,
        }
    }

    pub fn genesis(timestamp: u64, txs: Vec<Transaction>) -> Self {
        Self::seal(0, [0u8; 32], timestamp, 0, txs)
    }

    pub fn header(&self) -> Vec<u8> {
        Self::header_bytes(
            self.height,
            &self.prev_hash,
            self.timestamp,
            self.txs.iter().map(|t| t.tx_id),
        )
    }

    pub fn verify_hash(&self) -> bool {
        Self::hash_with_nonce(&self.header(), self.nonce) == self.block_hash
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_u64(self.height);
        w.put_fixed(&self.prev_hash);
        w.put_u64(self.timestamp);
        w.put_u64(self.nonce);
        w.put_u32(self.txs.len() as u32);
        for tx in &self.txs {
            tx.encode(&mut w);
        }
        w.put_fixed(&self.block_hash);
        w.into_bytes()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(bytes);
        let height = r.u64()?;
        let prev_hash = r.fixed32()?;
        let timestamp = r.u64()?;
        let nonce = r.u64()?;
        let n = r.u32()? as usize;
        if n > 1 << 20 {
            return Err(CodecError::Malformed("tx count"));
        }
        let mut txs = Vec::with_capacity(n);
        for _ in 0..n {
            txs.push(Transaction::decode(&mut r)?);
        }
        let block_hash = r.fixed32()?;
        r.finish()?;
        Ok(Self {
            height,
            prev_hash,
            timestamp,
            nonce,
            txs,
            block_hash,
        })
    }
}

/// Position of a write: (block height, tx index within the block).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Version {
    pub height: u64,
    pub tx_index: u32,
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.height, self.tx_index)
    }
}

/// Latest committed value for a key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEntry {
    pub key: String,
    pub value: Vec<u8>,
    pub version: Version,
    pub deleted: bool,
}

/// One committed write to a key; `value == None` marks a tombstone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryEntry {
    pub version: Version,
    pub value: Option<Vec<u8>>,
    pub tx_id: [u8; 32],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WriteOp {
    Put { key: String, value: Vec<u8> },
    Delete { key: String },
}

impl WriteOp {
    pub fn key(&self) -> &str {
        match self {
            WriteOp::Put { key, .. } | WriteOp::Delete { key } => key,
        }
    }
}

pub type WriteSet = Vec<WriteOp>;

/// Per-transaction execution view: committed state, plus writes from earlier
/// transactions in the same block, plus this transaction's own buffered
/// writes. Contracts only ever touch state through this.
pub struct TxContext<'a> {
    committed: &'a BTreeMap<String, StateEntry>,
    block_overlay: &'a HashMap<String, Option<Vec<u8>>>,
    own: HashMap<String, Option<Vec<u8>>>,
    writes: WriteSet,
    /// Block timestamp at commit — the deterministic "current time".
    pub now: u64,
}

impl<'a> TxContext<'a> {
    pub fn new(
        committed: &'a BTreeMap<String, StateEntry>,
        block_overlay: &'a HashMap<String, Option<Vec<u8>>>,
        now: u64,
    ) -> Self {
        Self {
            committed,
            block_overlay,
            own: HashMap::new(),
            writes: Vec::new(),
            now,
        }
    }

    /// Read-your-writes lookup; absent or tombstoned keys are `KeyNotFound`.
    pub fn get_state(&self, key: &str) -> Result<Vec<u8>, LedgerError> {
        if let Some(v) = self.own.get(key) {
            return v.clone().ok_or_else(|| LedgerError::KeyNotFound(key.to_string()));
        }
        if let Some(v) = self.block_overlay.get(key) {
            return v.clone().ok_or_else(|| LedgerError::KeyNotFound(key.to_string()));
        }
        match self.committed.get(key) {
            Some(e) if !e.deleted => Ok(e.value.clone()),
            _ => Err(LedgerError::KeyNotFound(key.to_string())),
        }
    }

    pub fn put_state(&mut self, key: &str, value: Vec<u8>) {
        self.own.insert(key.to_string(), Some(value.clone()));
        self.writes.push(WriteOp::Put {
            key: key.to_string(),
            value,
        });
    }

    pub fn delete_state(&mut self, key: &str) {
        self.own.insert(key.to_string(), None);
        self.writes.push(WriteOp::Delete {
            key: key.to_string(),
        });
    }

    /// Writes buffered so far, in application order.
    pub fn writes(&self) -> &[WriteOp] {
        &self.writes
    }

    pub fn into_writes(self) -> WriteSet {
        self.writes
    }
}

/// The executor invoked for every transaction at commit and during replay.
/// It must be deterministic in (tx, visible state, block timestamp).
pub type Executor<'e> = dyn FnMut(&Transaction, &mut TxContext) + 'e;

/// Block log plus derived world state.
pub struct Ledger {
    path: PathBuf,
    file: BufWriter<File>,
    tip_hash: [u8; 32],
    next_height: u64,
    state: BTreeMap<String, StateEntry>,
    history: HashMap<String, Vec<HistoryEntry>>,
    tx_ids: HashSet<[u8; 32]>,
}

impl Ledger {
    /// Open the log at `path` (creating it if absent) and rebuild world
    /// state by re-executing every block through `exec`.
    pub fn open(path: &Path, exec: &mut Executor) -> Result<Self, LedgerError> {
        let records = if path.exists() {
            read_log_records(path)?
        } else {
            Vec::new()
        };
        let file = BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?);
        let mut ledger = Self {
            path: path.to_path_buf(),
            file,
            tip_hash: [0u8; 32],
            next_height: 0,
            state: BTreeMap::new(),
            history: HashMap::new(),
            tx_ids: HashSet::new(),
        };
        for bytes in records {
            let block = Block::decode(&bytes)?;
            ledger.apply_block(&block, exec)?;
        }
        Ok(ledger)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Height of the committed tip; `None` before genesis.
    pub fn height(&self) -> Option<u64> {
        self.next_height.checked_sub(1)
    }

    pub fn next_height(&self) -> u64 {
        self.next_height
    }

    pub fn tip_hash(&self) -> [u8; 32] {
        self.tip_hash
    }

    pub fn contains_tx(&self, tx_id: &[u8; 32]) -> bool {
        self.tx_ids.contains(tx_id)
    }

    pub fn committed_tx_ids(&self) -> HashSet<[u8; 32]> {
        self.tx_ids.clone()
    }

    /// Validate `block` against the tip, execute it, persist it, and apply
    /// its write sets to world state in order.
    pub fn append_block(&mut self, block: &Block, exec: &mut Executor) -> Result<(), LedgerError> {
        self.validate_block(block)?;
        let encoded = block.encode();
        self.file.write_all(&(encoded.len() as u32).to_be_bytes())?;
        self.file.write_all(&encoded)?;
        self.file.flush()?;
        self.apply_block(block, exec)
    }

    fn validate_block(&self, block: &Block) -> Result<(), LedgerError> {
        if block.height != self.next_height {
            return Err(LedgerError::InvalidBlock(format!(
                "height {}, expected {}",
                block.height, self.next_height
            )));
        }
        if block.prev_hash != self.tip_hash {
            return Err(LedgerError::ChainMismatch);
        }
        if !block.verify_hash() {
            return Err(LedgerError::InvalidBlock("block hash mismatch".into()));
        }
        let mut seen = HashSet::new();
        for tx in &block.txs {
            tx.check_integrity()?;
            if self.tx_ids.contains(&tx.tx_id) || !seen.insert(tx.tx_id) {
                return Err(LedgerError::DuplicateTx(hex::encode(tx.tx_id)));
            }
        }
        Ok(())
    }

    /// Execute and fold a block into state (shared by append and replay).
    fn apply_block(&mut self, block: &Block, exec: &mut Executor) -> Result<(), LedgerError> {
        self.validate_block(block)?;
        let mut overlay: HashMap<String, Option<Vec<u8>>> = HashMap::new();
        let mut write_sets: Vec<WriteSet> = Vec::with_capacity(block.txs.len());
        for tx in &block.txs {
            let mut ctx = TxContext::new(&self.state, &overlay, block.timestamp);
            exec(tx, &mut ctx);
            let writes = ctx.into_writes();
            for op in &writes {
                let v = match op {
                    WriteOp::Put { value, .. } => Some(value.clone()),
                    WriteOp::Delete { .. } => None,
                };
                overlay.insert(op.key().to_string(), v);
            }
            write_sets.push(writes);
        }
        for (i, writes) in write_sets.into_iter().enumerate() {
            let version = Version {
                height: block.height,
                tx_index: i as u32,
            };
            let tx_id = block.txs[i].tx_id;
            for op in writes {
                match op {
                    WriteOp::Put { key, value } => {
                        self.history.entry(key.clone()).or_default().push(HistoryEntry {
                            version,
                            value: Some(value.clone()),
                            tx_id,
                        });
                        self.state.insert(
                            key.clone(),
                            StateEntry {
                                key,
                                value,
                                version,
                                deleted: false,
                            },
                        );
                    }
                    WriteOp::Delete { key } => {
                        self.history.entry(key.clone()).or_default().push(HistoryEntry {
                            version,
                            value: None,
                            tx_id,
                        });
                        self.state.insert(
                            key.clone(),
                            StateEntry {
                                key,
                                value: Vec::new(),
                                version,
                                deleted: true,
                            },
                        );
                    }
                }
            }
            self.tx_ids.insert(tx_id);
        }
        self.tip_hash = block.block_hash;
        self.next_height = block.height + 1;
        Ok(())
    }

    /// Build an execution view over committed state, e.g. for read-only
    /// contract methods that bypass ordering.
    pub fn execution_context<'a>(
        &'a self,
        overlay: &'a HashMap<String, Option<Vec<u8>>>,
        now: u64,
    ) -> TxContext<'a> {
        TxContext::new(&self.state, overlay, now)
    }

    /// Latest committed value; tombstoned and never-written keys both miss.
    pub fn get_state(&self, key: &str) -> Result<&[u8], LedgerError> {
        match self.state.get(key) {
            Some(e) if !e.deleted => Ok(&e.value),
            _ => Err(LedgerError::KeyNotFound(key.to_string())),
        }
    }

    pub fn state_entry(&self, key: &str) -> Option<&StateEntry> {
        self.state.get(key)
    }

    /// All committed writes to `key` in chain order, tombstones included.
    pub fn get_history(&self, key: &str) -> &[HistoryEntry] {
        self.history.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Live (non-tombstoned) entries whose key starts with `prefix`.
    pub fn scan_prefix<'s>(
        &'s self,
        prefix: &'s str,
    ) -> impl Iterator<Item = (&'s str, &'s [u8])> + 's {
        self.state
            .range(prefix.to_string()..)
            .take_while(move |(k, _)| k.starts_with(prefix))
            .filter(|(_, e)| !e.deleted)
            .map(|(k, e)| (k.as_str(), e.value.as_slice()))
    }

    /// Digest over the full world state including versions and tombstones.
    pub fn state_fingerprint(&self) -> [u8; 32] {
        let mut w = Writer::new();
        for (key, e) in &self.state {
            w.put_str(key);
            w.put_bytes(&e.value);
            w.put_u64(e.version.height);
            w.put_u32(e.version.tx_index);
            w.put_u8(e.deleted as u8);
        }
        Sha256::digest(w.into_bytes()).into()
    }

    /// Digest over live key/value pairs only (no versions): two runs that
    /// committed the same writes in different block shapes compare equal.
    pub fn value_fingerprint(&self) -> [u8; 32] {
        let mut w = Writer::new();
        for (key, e) in &self.state {
            if !e.deleted {
                w.put_str(key);
                w.put_bytes(&e.value);
            }
        }
        Sha256::digest(w.into_bytes()).into()
    }
}

/// Read raw record payloads from a block log. Fails on torn records.
fn read_log_records(path: &Path) -> Result<Vec<Vec<u8>>, LedgerError> {
    let mut data = Vec::new();
    File::open(path)?.read_to_end(&mut data)?;
    let mut records = Vec::new();
    let mut pos = 0usize;
    while pos < data.len() {
        if pos + 4 > data.len() {
            return Err(LedgerError::InvalidBlock("torn length prefix".into()));
        }
        let len =
            u32::from_be_bytes([data[pos], data[pos + 1], data[pos + 2], data[pos + 3]]) as usize;
        pos += 4;
        if pos + len > data.len() {
            return Err(LedgerError::InvalidBlock("torn block record".into()));
        }
        records.push(data[pos..pos + len].to_vec());
        pos += len;
    }
    Ok(records)
}

/// Decode every block in a log file (no state execution).
pub fn read_blocks(path: &Path) -> Result<Vec<Block>, LedgerError> {
    read_log_records(path)?
        .iter()
        .map(|b| Block::decode(b).map_err(LedgerError::from))
        .collect()
}

/// Verify a persisted chain: strict decode, height sequence, prev-hash
/// links, recomputed block and tx hashes, and envelope/tx consistency.
/// With a CA, envelope signatures are verified and deploy transactions must
/// be admin-signed. Any failure, including undecodable bytes, returns false.
/// A log truncated at a record boundary verifies as its prefix.
pub fn verify_log(path: &Path, ca: Option<&Ca>) -> bool {
    let records = match read_log_records(path) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let mut prev = [0u8; 32];
    for (i, bytes) in records.iter().enumerate() {
        let block = match Block::decode(bytes) {
            Ok(b) => b,
            Err(_) => return false,
        };
        if block.height != i as u64 || block.prev_hash != prev || !block.verify_hash() {
            return false;
        }
        for tx in &block.txs {
            if tx.check_integrity().is_err() {
                return false;
            }
            if let Some(ca) = ca {
                if !ca.verify(&tx.envelope).unwrap_or(false) {
                    return false;
                }
                if tx.kind == TxKind::Deploy && !ca.is_admin(&tx.submitter) {
                    return false;
                }
            }
        }
        prev = block.block_hash;
    }
    true
}
