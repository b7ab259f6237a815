//! The three smart contracts: PSC (policy), ASC (access) and RSC (record),
//! executed deterministically against ledger state.
//!
//! Every method is a pure function of (arguments, visible state, block
//! time): role checks happen in the node pipeline before ordering, and blob
//! bytes never enter a transaction — record content is stored off chain and
//! only its text address is carried in the args. Methods are addressed by
//! `(contract, method)` strings: PSC.{AddPolicy, DeletePolicy, UpdatePolicy,
//! QueryPolicy}, ASC.CheckAccess, RSC.{AddRecord, DeleteRecord,
//! UpdateRecord, QueryRecord}, plus Init (deploy) and Ping on each.

use sha2::{Digest, Sha256};

use crate::abac::{self, AccessRequest, Decision, ObjectAttrs, PolicyDraft, SubjectAttrs};
use crate::ledger::{ContractId, LedgerError, Transaction, TxContext, TxKind};

/// Ok message returned by a granted access check.
pub const VALID_REQUEST: &str = "valid request!";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Error,
}

/// Outcome of one contract invocation. Errors carry their code as the first
/// token of the message (`"Exists: ..."`), which is what the CLI reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractResult {
    pub status: Status,
    pub message: String,
    pub payload: Option<Vec<u8>>,
}

impl ContractResult {
    pub fn ok(message: &str) -> Self {
        Self {
            status: Status::Ok,
            message: message.to_string(),
            payload: None,
        }
    }

    pub fn ok_with(message: &str, payload: Vec<u8>) -> Self {
        Self {
            status: Status::Ok,
            message: message.to_string(),
            payload: Some(payload),
        }
    }

    pub fn err(code: &str, detail: &str) -> Self {
        Self {
            status: Status::Error,
            message: if detail.is_empty() {
                code.to_string()
            } else {
                format!("{code}: {detail}")
            },
            payload: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    /// Error code: the message up to the first ':'.
    pub fn code(&self) -> &str {
        self.message.split(':').next().unwrap_or("").trim()
    }
}

/// World-state key for a policy: the policy id under the PSC namespace.
pub fn policy_state_key(subject: &SubjectAttrs, object: &ObjectAttrs) -> String {
    format!("PSC:{}", hex::encode(abac::policy_id(subject, object)))
}

/// World-state key for a record pointer: SHA256(record_id) under RSC.
pub fn record_state_key(record_id: &str) -> String {
    format!("RSC:{}", hex::encode(Sha256::digest(record_id.as_bytes())))
}

/// Deployment marker key for a contract.
pub fn deploy_marker_key(contract: ContractId) -> String {
    format!("SYS:deployed/{contract}")
}

/// Stateless dispatcher for all three contracts.
pub struct Registry;

impl Registry {
    /// Execute `tx` against the context. Deterministic; never touches the
    /// blob store or the identity registry.
    pub fn execute(tx: &Transaction, ctx: &mut TxContext) -> ContractResult {
        Self::execute_parts(tx.kind, tx.contract, &tx.method, &tx.args, ctx)
    }

    /// Method dispatch on borrowed parts (read paths skip building a
    /// transaction altogether).
    pub fn execute_parts(
        kind: TxKind,
        contract: ContractId,
        method: &str,
        args: &[Vec<u8>],
        ctx: &mut TxContext,
    ) -> ContractResult {
        if kind == TxKind::Deploy {
            return Self::deploy(contract, method, ctx);
        }
        match (contract, method) {
            (ContractId::Psc, "AddPolicy") => Self::psc_add_policy(args, ctx),
            (ContractId::Psc, "DeletePolicy") => Self::psc_delete_policy(args, ctx),
            (ContractId::Psc, "UpdatePolicy") => Self::psc_update_policy(args, ctx),
            (ContractId::Psc, "QueryPolicy") => Self::psc_query_policy(args, ctx),
            (ContractId::Asc, "CheckAccess") => Self::asc_check_access(args, ctx),
            (ContractId::Rsc, "AddRecord") => Self::rsc_add_record(args, ctx),
            (ContractId::Rsc, "UpdateRecord") => Self::rsc_update_record(args, ctx),
            (ContractId::Rsc, "DeleteRecord") => Self::rsc_delete_record(args, ctx),
            (ContractId::Rsc, "QueryRecord") => Self::rsc_query_record(args, ctx),
            (contract, "Ping") => Self::ping(contract, ctx),
            (contract, method) => {
                ContractResult::err("UnknownMethod", &format!("{contract}.{method}"))
            }
        }
    }

    fn deploy(contract: ContractId, method: &str, ctx: &mut TxContext) -> ContractResult {
        if method != "Init" {
            return ContractResult::err("UnknownMethod", method);
        }
        ctx.put_state(&deploy_marker_key(contract), b"1".to_vec());
        ContractResult::ok(&format!("{contract} initialized"))
    }

    fn ping(contract: ContractId, ctx: &TxContext) -> ContractResult {
        match ctx.get_state(&deploy_marker_key(contract)) {
            Ok(_) => ContractResult::ok(&format!("{contract} pong")),
            Err(_) => ContractResult::err("NotDeployed", &contract.to_string()),
        }
    }

    fn one_arg(args: &[Vec<u8>]) -> Result<String, ContractResult> {
        if args.len() != 1 {
            return Err(ContractResult::err("BadArgs", "expected 1 argument"));
        }
        String::from_utf8(args[0].clone())
            .map_err(|_| ContractResult::err("BadArgs", "argument is not utf-8"))
    }

    fn two_args(args: &[Vec<u8>]) -> Result<(String, String), ContractResult> {
        if args.len() != 2 {
            return Err(ContractResult::err("BadArgs", "expected 2 arguments"));
        }
        let a = String::from_utf8(args[0].clone())
            .map_err(|_| ContractResult::err("BadArgs", "argument is not utf-8"))?;
        let b = String::from_utf8(args[1].clone())
            .map_err(|_| ContractResult::err("BadArgs", "argument is not utf-8"))?;
        Ok((a, b))
    }

    fn parse_policy(text: &str) -> Result<PolicyDraft, ContractResult> {
        PolicyDraft::parse_canonical_text(text)
            .map_err(|e| ContractResult::err("BadPolicy", &e))
    }

    fn parse_subject_object(
        subject_text: &str,
        object_text: &str,
    ) -> Result<(SubjectAttrs, ObjectAttrs), ContractResult> {
        // reuse the policy parser by assembling a throwaway draft
        let text = format!("{subject_text}{object_text}allow=0\ncreateTime=0\nendTime=0\n");
        let draft = PolicyDraft::parse_canonical_text(&text)
            .map_err(|e| ContractResult::err("BadArgs", &e))?;
        Ok((draft.subject, draft.object))
    }

    /// PSC.AddPolicy(canonical policy text): validate, hash, write. Adding
    /// an existing (subject, object) pair is an error — updates must go
    /// through UpdatePolicy.
    fn psc_add_policy(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let text = match Self::one_arg(args) {
            Ok(t) => t,
            Err(e) => return e,
        };
        let draft = match Self::parse_policy(&text) {
            Ok(d) => d,
            Err(e) => return e,
        };
        if !abac::check_policy(&draft) {
            return ContractResult::err("BadPolicy", "policy attributes are incomplete or invalid");
        }
        let key = policy_state_key(&draft.subject, &draft.object);
        if ctx.get_state(&key).is_ok() {
            return ContractResult::err("Exists", "a policy for this subject and object exists");
        }
        ctx.put_state(&key, draft.canonical_text().into_bytes());
        ContractResult::ok("policy added")
    }

    /// PSC.DeletePolicy(subject text, object text): recompute the id, check
    /// presence, tombstone.
    fn psc_delete_policy(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let (subject_text, object_text) = match Self::two_args(args) {
            Ok(v) => v,
            Err(e) => return e,
        };
        let (subject, object) = match Self::parse_subject_object(&subject_text, &object_text) {
            Ok(v) => v,
            Err(e) => return e,
        };
        let key = policy_state_key(&subject, &object);
        if ctx.get_state(&key).is_err() {
            return ContractResult::err("NotFound", "no policy for this subject and object");
        }
        ctx.delete_state(&key);
        ContractResult::ok("policy deleted")
    }

    /// PSC.UpdatePolicy(canonical policy text): delete the old entry and
    /// re-add under the same id, so history shows both writes.
    fn psc_update_policy(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let text = match Self::one_arg(args) {
            Ok(t) => t,
            Err(e) => return e,
        };
        let draft = match Self::parse_policy(&text) {
            Ok(d) => d,
            Err(e) => return e,
        };
        if !abac::check_policy(&draft) {
            return ContractResult::err("BadPolicy", "policy attributes are incomplete or invalid");
        }
        let key = policy_state_key(&draft.subject, &draft.object);
        if ctx.get_state(&key).is_err() {
            return ContractResult::err("NotFound", "no policy for this subject and object");
        }
        ctx.delete_state(&key);
        ctx.put_state(&key, draft.canonical_text().into_bytes());
        ContractResult::ok("policy updated")
    }

    /// PSC.QueryPolicy(subject text, object text): read-only.
    fn psc_query_policy(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let (subject_text, object_text) = match Self::two_args(args) {
            Ok(v) => v,
            Err(e) => return e,
        };
        let (subject, object) = match Self::parse_subject_object(&subject_text, &object_text) {
            Ok(v) => v,
            Err(e) => return e,
        };
        match ctx.get_state(&policy_state_key(&subject, &object)) {
            Ok(value) => ContractResult::ok_with("policy found", value),
            Err(LedgerError::KeyNotFound(_)) => {
                ContractResult::err("NoPolicy", "no policy for this subject and object")
            }
            Err(e) => ContractResult::err("StateError", &e.to_string()),
        }
    }

    /// ASC.CheckAccess(canonical request text): look up the matching policy
    /// and apply the decision rule at the block time. An expired policy is
    /// denied and deleted in the same execution — the only write ASC ever
    /// performs.
    fn asc_check_access(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let text = match Self::one_arg(args) {
            Ok(t) => t,
            Err(e) => return e,
        };
        let request = match AccessRequest::parse_canonical_text(&text) {
            Ok(r) => r,
            Err(e) => return ContractResult::err("BadArgs", &e),
        };
        let key = policy_state_key(&request.subject, &request.object);
        let stored = match ctx.get_state(&key) {
            Ok(v) => v,
            Err(_) => {
                return ContractResult::err("NoPolicy", "no policy supports this request")
            }
        };
        let policy = match String::from_utf8(stored)
            .ok()
            .and_then(|t| abac::Policy::parse_canonical_text(&t).ok())
        {
            Some(p) => p,
            None => return ContractResult::err("BadPolicy", "stored policy is unreadable"),
        };
        let now = ctx.now;
        if policy.environment.end_time <= now {
            // expired: deny and drop the stale policy
            ctx.delete_state(&key);
            return ContractResult::err("Expired", "policy has expired and was removed");
        }
        match abac::evaluate(&policy, &request, now) {
            Decision::Allow => ContractResult::ok(VALID_REQUEST),
            Decision::Deny => ContractResult::err("Denied", "policy denies this request"),
        }
    }

    /// RSC.AddRecord(record_id, address text): write the pointer.
    fn rsc_add_record(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let (record_id, address) = match Self::two_args(args) {
            Ok(v) => v,
            Err(e) => return e,
        };
        if record_id.is_empty() {
            return ContractResult::err("BadArgs", "record id is empty");
        }
        let key = record_state_key(&record_id);
        if ctx.get_state(&key).is_ok() {
            return ContractResult::err("Exists", "a record with this id exists");
        }
        ctx.put_state(&key, address.into_bytes());
        ContractResult::ok("record added")
    }

    /// RSC.UpdateRecord(record_id, new address text): overwrite the pointer
    /// (the add path with the existence check inverted).
    fn rsc_update_record(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let (record_id, address) = match Self::two_args(args) {
            Ok(v) => v,
            Err(e) => return e,
        };
        let key = record_state_key(&record_id);
        if ctx.get_state(&key).is_err() {
            return ContractResult::err("NotFound", "no record with this id");
        }
        ctx.put_state(&key, address.into_bytes());
        ContractResult::ok("record updated")
    }

    /// RSC.DeleteRecord(record_id): tombstone the pointer. The blob itself
    /// is removed by the node after commit.
    fn rsc_delete_record(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let record_id = match Self::one_arg(args) {
            Ok(t) => t,
            Err(e) => return e,
        };
        let key = record_state_key(&record_id);
        if ctx.get_state(&key).is_err() {
            return ContractResult::err("NotFound", "no record with this id");
        }
        ctx.delete_state(&key);
        ContractResult::ok("record deleted")
    }

    /// RSC.QueryRecord(record_id): read-only, returns the stored address.
    fn rsc_query_record(args: &[Vec<u8>], ctx: &mut TxContext) -> ContractResult {
        let record_id = match Self::one_arg(args) {
            Ok(t) => t,
            Err(e) => return e,
        };
        match ctx.get_state(&record_state_key(&record_id)) {
            Ok(value) => ContractResult::ok_with("record found", value),
            Err(_) => ContractResult::err("NotFound", "no record with this id"),
        }
    }
}

/// The executor closure shape the ledger replays through.
pub fn executor() -> impl FnMut(&Transaction, &mut TxContext) {
    |tx, ctx| {
        let _ = Registry::execute(tx, ctx);
    }
}
