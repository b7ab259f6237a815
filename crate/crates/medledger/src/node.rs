//! The transaction pipeline: client request → signature and role checks →
//! contract execution → ordering → commit.
//!
//! Read-only methods (QueryPolicy, QueryRecord, Ping, and CheckAccess when
//! it has nothing to write) run against the committed snapshot and never
//! create blocks. Mutations are ordered, committed, and only then answered,
//! so a caller always observes its own committed effect. Record content
//! travels to the blob store on the node side before ordering; transactions
//! carry only the text address.
//!
//! Data directory layout: `blocks.log`, `identities.tsv`, `wallet.tsv`,
//! `blobs/`, `config.txt`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};
use std::time::Duration;

use thiserror::Error;

use crate::abac::{AccessRequest, ObjectAttrs, PolicyDraft, SubjectAttrs, SubjectRole};
use crate::content_store::{ContentAddress, ContentStore, StoreError};
use crate::contracts::{self, ContractResult, Registry};
use crate::ledger::{
    Block, ContractId, HistoryEntry, Ledger, LedgerError, Transaction, TxKind, BLOCK_LOG_FILE,
};
use crate::membership::{unix_now, Ca, Identity, MembershipError, Role, SignedEnvelope};
use crate::ordering::{
    cut_block_kafka, cut_block_pow, Backend, OrderingConfig, OrderingError, OrderingService,
};

pub const CONFIG_FILE: &str = "config.txt";
pub const BLOB_DIR: &str = "blobs";

/// Commit-time model of the replaced document-store write path: every put
/// pays a base latency plus a per-byte transfer cost, deletes (no body) only
/// the base. The committer sleeps the block's total once per block.
const STATE_WRITE_BASE_MICROS: u64 = 100;
const STATE_WRITE_MICROS_PER_BYTE: u64 = 5;

#[derive(Debug, Error)]
pub enum NodeError {
    #[error("AuthFailed: {0}")]
    AuthFailed(String),
    #[error("BadRequest: {0}")]
    BadRequest(String),
    #[error("ConfigError: {0}")]
    ConfigError(String),
    #[error(transparent)]
    Membership(#[from] MembershipError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error("Internal: {0}")]
    Internal(String),
}

/// Network bootstrap parameters.
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub peer_count: usize,
    pub ordering: OrderingConfig,
    pub genesis_contracts: Vec<ContractId>,
    pub bootstrap_admin: String,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            peer_count: 4,
            ordering: OrderingConfig::default(),
            genesis_contracts: vec![ContractId::Psc, ContractId::Asc, ContractId::Rsc],
            bootstrap_admin: "admin".to_string(),
        }
    }
}

impl NetworkConfig {
    fn validate(&self) -> Result<(), NodeError> {
        if self.peer_count < 1 {
            return Err(NodeError::ConfigError("peer_count must be >= 1".into()));
        }
        if self.bootstrap_admin.is_empty() {
            return Err(NodeError::ConfigError("bootstrap_admin must be set".into()));
        }
        self.ordering
            .validate()
            .map_err(|e| NodeError::ConfigError(e.to_string()))
    }

    fn to_text(&self) -> String {
        format!("{}peer_count = {}\n", self.ordering.to_text(), self.peer_count)
    }
}

/// A signed invocation as it arrives from a client: the envelope payload is
/// the canonical (contract, method, args) encoding.
#[derive(Debug, Clone)]
pub struct ClientRequest {
    pub envelope: SignedEnvelope,
}

/// One in-process node: CA, ledger, blob store and ordering service.
pub struct Node {
    data_dir: PathBuf,
    config: NetworkConfig,
    ca: Arc<RwLock<Ca>>,
    ledger: Arc<RwLock<Ledger>>,
    store: Arc<ContentStore>,
    ordering: OrderingService<ContractResult>,
}

impl Node {
    /// Initialize a fresh network in `data_dir`, or resume cleanly when the
    /// directory already holds a valid chain. A half-written or corrupt
    /// directory is a ConfigError.
    pub fn bootstrap(data_dir: &Path, config: NetworkConfig) -> Result<Self, NodeError> {
        std::fs::create_dir_all(data_dir).map_err(|e| NodeError::ConfigError(e.to_string()))?;
        let log_path = data_dir.join(BLOCK_LOG_FILE);
        let initialized = log_path.exists()
            && std::fs::metadata(&log_path).map(|m| m.len() > 0).unwrap_or(false);
        if initialized {
            return Self::open(data_dir);
        }
        config.validate()?;
        std::fs::write(data_dir.join(CONFIG_FILE), config.to_text())
            .map_err(|e| NodeError::ConfigError(e.to_string()))?;

        let mut ca = Ca::open(data_dir)?;
        if ca.identity(&config.bootstrap_admin).is_none() {
            ca.register_identity(&config.bootstrap_admin, Role::Admin, "system")?;
        }

        let mut exec = contracts::executor();
        let mut ledger = Ledger::open(&log_path, &mut exec)
            .map_err(|e| NodeError::ConfigError(format!("ledger: {e}")))?;

        // genesis block carries one deploy transaction per contract
        let ts = unix_now();
        let deploys: Vec<Transaction> = config
            .genesis_contracts
            .iter()
            .map(|&contract| {
                let payload = Transaction::invocation_payload(contract, "Init", &[]);
                let envelope = ca.sign(&config.bootstrap_admin, &payload)?;
                Ok(Transaction::new(
                    TxKind::Deploy,
                    contract,
                    "Init",
                    Vec::new(),
                    &config.bootstrap_admin,
                    ts,
                    envelope,
                ))
            })
            .collect::<Result<_, MembershipError>>()?;
        ledger.append_block(&Block::genesis(ts, deploys), &mut exec)?;

        Self::assemble(data_dir, config, ca, ledger)
    }

    /// Open an already-initialized node directory.
    pub fn open(data_dir: &Path) -> Result<Self, NodeError> {
        let log_path = data_dir.join(BLOCK_LOG_FILE);
        if !log_path.exists() {
            return Err(NodeError::ConfigError(format!(
                "{} is not an initialized data directory",
                data_dir.display()
            )));
        }
        let config_text = std::fs::read_to_string(data_dir.join(CONFIG_FILE)).unwrap_or_default();
        let ordering = OrderingConfig::parse(&config_text)
            .map_err(|e| NodeError::ConfigError(e.to_string()))?;
        let peer_count = config_text
            .lines()
            .filter_map(|l| l.split_once('='))
            .find(|(k, _)| k.trim() == "peer_count")
            .and_then(|(_, v)| v.trim().parse().ok())
            .unwrap_or(4);
        let config = NetworkConfig {
            peer_count,
            ordering,
            ..NetworkConfig::default()
        };

        let ca = Ca::open(data_dir)?;
        let mut exec = contracts::executor();
        let ledger = Ledger::open(&log_path, &mut exec)
            .map_err(|e| NodeError::ConfigError(format!("corrupt chain: {e}")))?;
        if ledger.height().is_none() {
            return Err(NodeError::ConfigError("empty block log".into()));
        }
        Self::assemble(data_dir, config, ca, ledger)
    }

    fn assemble(
        data_dir: &Path,
        config: NetworkConfig,
        ca: Ca,
        ledger: Ledger,
    ) -> Result<Self, NodeError> {
        let store = Arc::new(ContentStore::open(&data_dir.join(BLOB_DIR))?);
        let committed = ledger.committed_tx_ids();
        let ledger = Arc::new(RwLock::new(ledger));
        let ordering = Self::start_ordering(&config.ordering, committed, Arc::clone(&ledger));
        Ok(Self {
            data_dir: data_dir.to_path_buf(),
            config,
            ca: Arc::new(RwLock::new(ca)),
            ledger,
            store,
            ordering,
        })
    }

    fn start_ordering(
        config: &OrderingConfig,
        committed: std::collections::HashSet<[u8; 32]>,
        ledger: Arc<RwLock<Ledger>>,
    ) -> OrderingService<ContractResult> {
        let backend = config.backend;
        let node_count = config.node_count;
        let difficulty = config.pow_difficulty_bits;
        OrderingService::start(config, committed, move |batch: Vec<Transaction>| {
            let mut rng = rand::thread_rng();
            // this closure is the single writer, so tip cannot move under us
            let (height, prev) = {
                let guard = ledger.read().expect("ledger lock");
                (guard.next_height(), guard.tip_hash())
            };
            let ts = unix_now();
            let tx_ids: Vec<[u8; 32]> = batch.iter().map(|t| t.tx_id).collect();
            let block = match backend {
                Backend::KafkaStyle => cut_block_kafka(height, prev, ts, batch, node_count, &mut rng),
                Backend::Pow => cut_block_pow(height, prev, ts, batch, difficulty).0,
            };
            let mut results: Vec<([u8; 32], ContractResult)> = Vec::new();
            let mut model_micros = 0u64;
            let outcome = {
                let mut guard = ledger.write().expect("ledger lock");
                guard.append_block(&block, &mut |tx, ctx| {
                    let result = Registry::execute(tx, ctx);
                    for op in ctx.writes() {
                        model_micros += STATE_WRITE_BASE_MICROS;
                        if let crate::ledger::WriteOp::Put { value, .. } = op {
                            model_micros += STATE_WRITE_MICROS_PER_BYTE * value.len() as u64;
                        }
                    }
                    results.push((tx.tx_id, result));
                })
            };
            if let Err(e) = outcome {
                let message = format!("commit failed: {e}");
                return tx_ids
                    .into_iter()
                    .map(|id| (id, ContractResult::err("Internal", &message)))
                    .collect();
            }
            std::thread::sleep(Duration::from_micros(model_micros));
            results
        })
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn register_identity(
        &self,
        user_id: &str,
        role: Role,
        department: &str,
    ) -> Result<Identity, NodeError> {
        let mut ca = self.ca.write().expect("ca lock");
        Ok(ca.register_identity(user_id, role, department)?)
    }

    pub fn identity(&self, user_id: &str) -> Option<Identity> {
        self.ca.read().expect("ca lock").identity(user_id).cloned()
    }

    /// Build a signed request for `(contract, method, args)` as `signer`.
    pub fn request(
        &self,
        signer: &str,
        contract: ContractId,
        method: &str,
        args: &[Vec<u8>],
    ) -> Result<ClientRequest, NodeError> {
        let payload = Transaction::invocation_payload(contract, method, args);
        let envelope = self.ca.read().expect("ca lock").sign(signer, &payload)?;
        Ok(ClientRequest { envelope })
    }

    /// The wire surface: verify, gate, and dispatch a signed invocation.
    pub fn submit_invoke(&self, request: ClientRequest) -> Result<ContractResult, NodeError> {
        let envelope = request.envelope;
        {
            let ca = self.ca.read().expect("ca lock");
            match ca.verify(&envelope) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(NodeError::AuthFailed("signature does not verify".into()))
                }
                Err(MembershipError::UnknownSigner(s)) => {
                    return Err(NodeError::AuthFailed(format!("unknown signer {s:?}")))
                }
                Err(e) => return Err(e.into()),
            }
        }
        let (contract, method, args) = Transaction::parse_invocation(&envelope.payload)
            .map_err(|e| NodeError::BadRequest(format!("undecodable invocation: {e}")))?;
        self.role_gate(&envelope.signer, contract, &method)?;
        self.dispatch(envelope, contract, &method, args)
    }

    /// Mutations of the policy contract are admin-only, checked before any
    /// transaction reaches the ordering queue.
    fn role_gate(&self, signer: &str, contract: ContractId, method: &str) -> Result<(), NodeError> {
        let is_psc_mutation = contract == ContractId::Psc
            && matches!(method, "AddPolicy" | "DeletePolicy" | "UpdatePolicy");
        if is_psc_mutation && !self.ca.read().expect("ca lock").is_admin(signer) {
            return Err(NodeError::AuthFailed(format!(
                "{contract}.{method} requires an admin identity"
            )));
        }
        Ok(())
    }

    fn dispatch(
        &self,
        envelope: SignedEnvelope,
        contract: ContractId,
        method: &str,
        args: Vec<Vec<u8>>,
    ) -> Result<ContractResult, NodeError> {
        match (contract, method) {
            (ContractId::Psc, "QueryPolicy") | (_, "Ping") => {
                Ok(self.execute_read(contract, method, &args))
            }
            (ContractId::Rsc, "QueryRecord") => {
                let pointer = self.execute_read(contract, method, &args);
                if !pointer.is_ok() {
                    return Ok(pointer);
                }
                self.fetch_payload(pointer)
            }
            (ContractId::Asc, "CheckAccess") => self.check_access_flow(envelope, args),
            (ContractId::Psc, "AddPolicy" | "UpdatePolicy" | "DeletePolicy")
            | (ContractId::Rsc, "AddRecord" | "UpdateRecord" | "DeleteRecord") => {
                self.invoke_ordered(envelope, contract, method, args)
            }
            (c, m) => Ok(ContractResult::err("UnknownMethod", &format!("{c}.{m}"))),
        }
    }

    /// Execute a read-only method against the committed snapshot. Reads
    /// never produce a block; any writes a method buffers here are dropped.
    fn execute_read(&self, contract: ContractId, method: &str, args: &[Vec<u8>]) -> ContractResult {
        let tx = Self::synthetic_tx(contract, method, args.to_vec());
        let overlay = HashMap::new();
        let guard = self.ledger.read().expect("ledger lock");
        let mut ctx = guard.execution_context(&overlay, unix_now());
        Registry::execute(&tx, &mut ctx)
    }

    /// Replace a record-pointer result's payload (the address) with the blob
    /// bytes it points to, verifying content integrity on the way out.
    fn fetch_payload(&self, pointer: ContractResult) -> Result<ContractResult, NodeError> {
        let Some(addr_bytes) = pointer.payload.as_deref() else {
            return Ok(ContractResult::err("NotFound", "record pointer carries no address"));
        };
        let text = String::from_utf8_lossy(addr_bytes).to_string();
        let address = match ContentAddress::from_text(&text) {
            Ok(a) => a,
            Err(e) => return Ok(ContractResult::err("BadAddress", &e.to_string())),
        };
        match self.store.get(&address) {
            Ok(bytes) => Ok(ContractResult::ok_with(&pointer.message, bytes)),
            Err(StoreError::NotFound(a)) => Ok(ContractResult::err("NotFound", &a)),
            Err(StoreError::CorruptBlob(a)) => Ok(ContractResult::err("CorruptBlob", &a)),
            Err(e) => Err(e.into()),
        }
    }

    /// CheckAccess: evaluate speculatively on committed state. A plain
    /// allow/deny writes nothing and returns straight away (allow also
    /// fetches the record bytes); an expired policy must tombstone itself,
    /// so that one case is re-executed through ordering.
    fn check_access_flow(
        &self,
        envelope: SignedEnvelope,
        args: Vec<Vec<u8>>,
    ) -> Result<ContractResult, NodeError> {
        let speculative = self.execute_read(ContractId::Asc, "CheckAccess", &args);
        match speculative.code() {
            "Expired" => self.invoke_ordered(envelope, ContractId::Asc, "CheckAccess", args),
            _ if speculative.is_ok() => {
                // grant: resolve the record bytes; denials never get here
                let request = args
                    .first()
                    .and_then(|a| String::from_utf8(a.clone()).ok())
                    .and_then(|t| AccessRequest::parse_canonical_text(&t).ok())
                    .ok_or_else(|| NodeError::BadRequest("unreadable access request".into()))?;
                let pointer =
                    self.execute_read(ContractId::Rsc, "QueryRecord", &[request.object.record_id.into_bytes()]);
                if !pointer.is_ok() {
                    return Ok(pointer);
                }
                let fetched = self.fetch_payload(pointer)?;
                if !fetched.is_ok() {
                    return Ok(fetched);
                }
                Ok(ContractResult::ok_with(
                    &speculative.message,
                    fetched.payload.unwrap_or_default(),
                ))
            }
            _ => Ok(speculative),
        }
    }

    /// Order a mutation and wait for its committed result. Timestamps are
    /// wall-clock seconds; when an identical invocation lands in the same
    /// second the timestamp is advanced so the transaction id stays unique.
    fn invoke_ordered(
        &self,
        envelope: SignedEnvelope,
        contract: ContractId,
        method: &str,
        args: Vec<Vec<u8>>,
    ) -> Result<ContractResult, NodeError> {
        // capture pre-state for node-side blob maintenance
        let old_address = match (contract, method) {
            (ContractId::Rsc, "UpdateRecord" | "DeleteRecord") => {
                args.first().and_then(|rid| self.committed_record_address(rid))
            }
            _ => None,
        };

        let mut timestamp = unix_now();
        let receiver = loop {
            let tx = Transaction::new(
                TxKind::Invoke,
                contract,
                method,
                args.clone(),
                &envelope.signer,
                timestamp,
                envelope.clone(),
            );
            match self.ordering.submit(tx) {
                Ok(rx) => break rx,
                Err(OrderingError::Duplicate) => {
                    if timestamp > unix_now() + 8 {
                        return Err(NodeError::Ordering(OrderingError::Duplicate));
                    }
                    timestamp += 1;
                }
                Err(e) => return Err(e.into()),
            }
        };
        let result = receiver
            .recv()
            .map_err(|_| NodeError::Internal("commit pipeline dropped the result".into()))?;

        if result.is_ok() {
            if let Some(old) = old_address {
                let keep = match (contract, method) {
                    // update: drop the superseded blob unless re-added
                    (ContractId::Rsc, "UpdateRecord") => {
                        self.committed_record_address(&args[0]) == Some(old)
                    }
                    _ => false,
                };
                if !keep {
                    let _ = self.store.remove(&old);
                }
            }
        }
        Ok(result)
    }

    fn committed_record_address(&self, record_id_arg: &[u8]) -> Option<ContentAddress> {
        let record_id = String::from_utf8(record_id_arg.to_vec()).ok()?;
        let key = contracts::record_state_key(&record_id);
        let guard = self.ledger.read().expect("ledger lock");
        let value = guard.get_state(&key).ok()?;
        ContentAddress::from_text(&String::from_utf8_lossy(value)).ok()
    }

    fn synthetic_tx(contract: ContractId, method: &str, args: Vec<Vec<u8>>) -> Transaction {
        let envelope = SignedEnvelope {
            payload: Transaction::invocation_payload(contract, method, &args),
            signer: "(read)".to_string(),
            signature: Vec::new(),
        };
        Transaction::new(TxKind::Invoke, contract, method, args, "(read)", 0, envelope)
    }

    // ----- high-level operations (CLI / FFI / bench surface) -----

    pub fn add_policy(&self, signer: &str, draft: &PolicyDraft) -> Result<ContractResult, NodeError> {
        let args = vec![draft.canonical_text().into_bytes()];
        self.signed_invoke(signer, ContractId::Psc, "AddPolicy", args)
    }

    pub fn update_policy(
        &self,
        signer: &str,
        draft: &PolicyDraft,
    ) -> Result<ContractResult, NodeError> {
        let args = vec![draft.canonical_text().into_bytes()];
        self.signed_invoke(signer, ContractId::Psc, "UpdatePolicy", args)
    }

    pub fn delete_policy(
        &self,
        signer: &str,
        subject: &SubjectAttrs,
        object: &ObjectAttrs,
    ) -> Result<ContractResult, NodeError> {
        let args = vec![
            subject.canonical_text().into_bytes(),
            object.canonical_text().into_bytes(),
        ];
        self.signed_invoke(signer, ContractId::Psc, "DeletePolicy", args)
    }

    /// Read-only policy lookup; does not order a transaction.
    pub fn query_policy(
        &self,
        subject: &SubjectAttrs,
        object: &ObjectAttrs,
    ) -> Result<ContractResult, NodeError> {
        let args = vec![
            subject.canonical_text().into_bytes(),
            object.canonical_text().into_bytes(),
        ];
        Ok(self.execute_read(ContractId::Psc, "QueryPolicy", &args))
    }

    /// Store the content off chain, then order the pointer write.
    pub fn add_record(
        &self,
        signer: &str,
        record_id: &str,
        content: &[u8],
    ) -> Result<ContractResult, NodeError> {
        if self.committed_record_address(record_id.as_bytes()).is_some() {
            return Ok(ContractResult::err("Exists", "a record with this id exists"));
        }
        let (address, existed) = self.store.put_with_status(content)?;
        let args = vec![record_id.as_bytes().to_vec(), address.to_text().into_bytes()];
        let result = self.signed_invoke(signer, ContractId::Rsc, "AddRecord", args)?;
        if !result.is_ok() && !existed {
            let _ = self.store.remove(&address);
        }
        Ok(result)
    }

    pub fn update_record(
        &self,
        signer: &str,
        record_id: &str,
        content: &[u8],
    ) -> Result<ContractResult, NodeError> {
        if self.committed_record_address(record_id.as_bytes()).is_none() {
            return Ok(ContractResult::err("NotFound", "no record with this id"));
        }
        let (address, existed) = self.store.put_with_status(content)?;
        let args = vec![record_id.as_bytes().to_vec(), address.to_text().into_bytes()];
        let result = self.signed_invoke(signer, ContractId::Rsc, "UpdateRecord", args)?;
        if !result.is_ok() && !existed {
            let _ = self.store.remove(&address);
        }
        Ok(result)
    }

    pub fn delete_record(&self, signer: &str, record_id: &str) -> Result<ContractResult, NodeError> {
        let args = vec![record_id.as_bytes().to_vec()];
        self.signed_invoke(signer, ContractId::Rsc, "DeleteRecord", args)
    }

    /// Full record fetch: pointer from state, bytes from the blob store.
    pub fn query_record(&self, record_id: &str) -> Result<ContractResult, NodeError> {
        let args = vec![record_id.as_bytes().to_vec()];
        let pointer = self.execute_read(ContractId::Rsc, "QueryRecord", &args);
        if !pointer.is_ok() {
            return Ok(pointer);
        }
        self.fetch_payload(pointer)
    }

    /// Evaluate an access request as `user_id`; a grant returns the record
    /// bytes, a denial or missing policy never touches the blob store.
    pub fn check_access(
        &self,
        user_id: &str,
        role: SubjectRole,
        department: &str,
        record_id: &str,
    ) -> Result<ContractResult, NodeError> {
        let request = AccessRequest::new(
            SubjectAttrs::new(user_id, role, department),
            ObjectAttrs::new(record_id),
            unix_now(),
        );
        let args = vec![request.canonical_text().into_bytes()];
        self.signed_invoke(user_id, ContractId::Asc, "CheckAccess", args)
    }

    pub fn ping(&self, contract: ContractId) -> ContractResult {
        self.execute_read(contract, "Ping", &[])
    }

    fn signed_invoke(
        &self,
        signer: &str,
        contract: ContractId,
        method: &str,
        args: Vec<Vec<u8>>,
    ) -> Result<ContractResult, NodeError> {
        let request = self.request(signer, contract, method, &args)?;
        self.submit_invoke(request)
    }

    // ----- ledger surface -----

    /// Full chain verification straight from disk: hashes, links, envelope
    /// consistency and signatures against the identity registry.
    pub fn verify_chain(&self) -> bool {
        let ca = self.ca.read().expect("ca lock");
        crate::ledger::verify_log(&self.data_dir.join(BLOCK_LOG_FILE), Some(&ca))
    }

    pub fn history(&self, key: &str) -> Vec<HistoryEntry> {
        self.ledger.read().expect("ledger lock").get_history(key).to_vec()
    }

    pub fn ledger_height(&self) -> Option<u64> {
        self.ledger.read().expect("ledger lock").height()
    }

    pub fn state_fingerprint(&self) -> [u8; 32] {
        self.ledger.read().expect("ledger lock").state_fingerprint()
    }

    pub fn value_fingerprint(&self) -> [u8; 32] {
        self.ledger.read().expect("ledger lock").value_fingerprint()
    }

    /// Snapshot of all live committed policies (the brute-force scan input).
    pub fn committed_policies(&self) -> Vec<crate::abac::Policy> {
        let guard = self.ledger.read().expect("ledger lock");
        guard
            .scan_prefix("PSC:")
            .filter_map(|(_, v)| std::str::from_utf8(v).ok().map(str::to_string))
            .filter_map(|t| crate::abac::Policy::parse_canonical_text(&t).ok())
            .collect()
    }

    pub fn content_store(&self) -> &ContentStore {
        &self.store
    }

    /// Stop the ordering pipeline and flush pending work.
    pub fn shutdown(mut self) {
        self.ordering.shutdown();
    }
}
