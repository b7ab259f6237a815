//! C ABI over the medledger node: opaque handle, status codes, byte buffers.
//!
//! Conventions:
//! * every function taking a `*mut MedNode` requires a handle obtained from
//!   `med_node_bootstrap` or `med_node_open` that has not been closed;
//! * strings are NUL-terminated UTF-8; byte payloads travel as `MedBuffer`
//!   and must be released with `med_buffer_free`;
//! * any non-`MED_STATUS_OK` return leaves a human-readable message in
//!   `med_last_error()` (thread-local, valid until the next call).

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::path::Path;
use std::str::FromStr;

use libc::{c_char, c_int};

use medledger::abac::{ObjectAttrs, PolicyDraft, SubjectAttrs, SubjectRole};
use medledger::contracts::ContractResult;
use medledger::membership::Role;
use medledger::node::{NetworkConfig, Node, NodeError};

/// Status codes mirrored into the generated header.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedStatus {
    Ok = 0,
    ContractError = 1,
    AuthFailed = 2,
    NotFound = 3,
    Exists = 4,
    NoPolicy = 5,
    Denied = 6,
    Expired = 7,
    BadRequest = 8,
    ConfigError = 9,
    IoError = 10,
    Internal = 11,
    NullArgument = 12,
}

/// Opaque node handle.
pub struct MedNode {
    node: Node,
}

/// A heap buffer handed across the boundary; free with `med_buffer_free`.
#[repr(C)]
pub struct MedBuffer {
    pub data: *mut u8,
    pub len: usize,
}

impl MedBuffer {
    fn empty() -> Self {
        Self {
            data: std::ptr::null_mut(),
            len: 0,
        }
    }

    fn from_vec(mut v: Vec<u8>) -> Self {
        v.shrink_to_fit();
        let len = v.len();
        let data = v.as_mut_ptr();
        std::mem::forget(v);
        Self { data, len }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let cleaned = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

/// Message for the most recent failing call on this thread. Never NULL; the
/// pointer stays valid until the next medledger call on the same thread.
#[no_mangle]
pub extern "C" fn med_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn status_for_code(code: &str) -> MedStatus {
    match code {
        "Exists" => MedStatus::Exists,
        "NotFound" => MedStatus::NotFound,
        "NoPolicy" => MedStatus::NoPolicy,
        "Denied" => MedStatus::Denied,
        "Expired" => MedStatus::Expired,
        "BadPolicy" | "BadArgs" | "BadAddress" => MedStatus::BadRequest,
        "CorruptBlob" => MedStatus::IoError,
        _ => MedStatus::ContractError,
    }
}

fn status_for_node_error(e: &NodeError) -> MedStatus {
    use medledger::content_store::StoreError;
    use medledger::membership::MembershipError;
    match e {
        NodeError::AuthFailed(_) => MedStatus::AuthFailed,
        NodeError::BadRequest(_) => MedStatus::BadRequest,
        NodeError::ConfigError(_) => MedStatus::ConfigError,
        NodeError::Membership(MembershipError::DuplicateIdentity(_)) => MedStatus::Exists,
        NodeError::Membership(MembershipError::UnknownSigner(_)) => MedStatus::AuthFailed,
        NodeError::Store(StoreError::NotFound(_)) => MedStatus::NotFound,
        NodeError::Store(_) => MedStatus::IoError,
        _ => MedStatus::Internal,
    }
}

/// Fold a node call into (status, last_error, optional payload out).
fn complete(
    outcome: Result<ContractResult, NodeError>,
    out: *mut MedBuffer,
) -> MedStatus {
    match outcome {
        Ok(result) if result.is_ok() => {
            if !out.is_null() {
                let buffer = result
                    .payload
                    .map(MedBuffer::from_vec)
                    .unwrap_or_else(MedBuffer::empty);
                unsafe { out.write(buffer) };
            }
            set_last_error("");
            MedStatus::Ok
        }
        Ok(result) => {
            set_last_error(&result.message);
            if !out.is_null() {
                unsafe { out.write(MedBuffer::empty()) };
            }
            status_for_code(result.code())
        }
        Err(e) => {
            set_last_error(&e.to_string());
            if !out.is_null() {
                unsafe { out.write(MedBuffer::empty()) };
            }
            status_for_node_error(&e)
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, MedStatus> {
    if ptr.is_null() {
        set_last_error("null string argument");
        return Err(MedStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("string argument is not valid UTF-8");
        MedStatus::BadRequest
    })
}

unsafe fn node_ref<'a>(handle: *mut MedNode) -> Result<&'a MedNode, MedStatus> {
    if handle.is_null() {
        set_last_error("null node handle");
        return Err(MedStatus::NullArgument);
    }
    Ok(&*handle)
}

fn subject_role_of(s: &str) -> Result<SubjectRole, MedStatus> {
    SubjectRole::from_str(s).map_err(|e| {
        set_last_error(&e);
        MedStatus::BadRequest
    })
}

unsafe fn open_impl(data_dir: *const c_char, bootstrap: bool) -> *mut MedNode {
    let Ok(dir) = cstr(data_dir) else {
        return std::ptr::null_mut();
    };
    let opened = if bootstrap {
        Node::bootstrap(Path::new(dir), NetworkConfig::default())
    } else {
        Node::open(Path::new(dir))
    };
    match opened {
        Ok(node) => {
            set_last_error("");
            Box::into_raw(Box::new(MedNode { node }))
        }
        Err(e) => {
            set_last_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Initialize (or resume) a node in `data_dir` with default configuration.
/// Returns NULL on failure; see `med_last_error`.
///
/// # Safety
/// `data_dir` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn med_node_bootstrap(data_dir: *const c_char) -> *mut MedNode {
    open_impl(data_dir, true)
}

/// Open an already-initialized node directory. Returns NULL on failure.
///
/// # Safety
/// `data_dir` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn med_node_open(data_dir: *const c_char) -> *mut MedNode {
    open_impl(data_dir, false)
}

/// Shut the node down and release the handle. NULL is a no-op.
///
/// # Safety
/// `handle` must come from `med_node_bootstrap`/`med_node_open` and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn med_node_close(handle: *mut MedNode) {
    if !handle.is_null() {
        let boxed = Box::from_raw(handle);
        boxed.node.shutdown();
    }
}

/// Release a buffer returned by a query. Zeroed/NULL buffers are no-ops.
///
/// # Safety
/// `buffer` must be exactly as returned, and released at most once.
#[no_mangle]
pub unsafe extern "C" fn med_buffer_free(buffer: MedBuffer) {
    if !buffer.data.is_null() {
        drop(Vec::from_raw_parts(buffer.data, buffer.len, buffer.len));
    }
}

/// Register an identity. `role` is "admin", "doctor" or "patient".
///
/// # Safety
/// Pointer arguments as documented at module level.
#[no_mangle]
pub unsafe extern "C" fn med_register_identity(
    handle: *mut MedNode,
    user_id: *const c_char,
    role: *const c_char,
    department: *const c_char,
) -> MedStatus {
    let (node, user, role, dept) = match (|| {
        Ok((
            node_ref(handle)?,
            cstr(user_id)?,
            cstr(role)?,
            cstr(department)?,
        ))
    })() {
        Ok(v) => v,
        Err(s) => return s,
    };
    let role = match Role::from_str(role) {
        Ok(r) => r,
        Err(e) => {
            set_last_error(&e);
            return MedStatus::BadRequest;
        }
    };
    match node.node.register_identity(user, role, dept) {
        Ok(_) => {
            set_last_error("");
            MedStatus::Ok
        }
        Err(e) => {
            set_last_error(&e.to_string());
            status_for_node_error(&e)
        }
    }
}

unsafe fn policy_args(
    user: *const c_char,
    role: *const c_char,
    department: *const c_char,
    record_id: *const c_char,
) -> Result<(SubjectAttrs, ObjectAttrs), MedStatus> {
    let subject = SubjectAttrs::new(
        cstr(user)?,
        subject_role_of(cstr(role)?)?,
        cstr(department)?,
    );
    let object = ObjectAttrs::new(cstr(record_id)?);
    Ok((subject, object))
}

/// Add an access policy (admin signer required). `allow` is 1 or 0.
///
/// # Safety
/// Pointer arguments as documented at module level.
#[no_mangle]
pub unsafe extern "C" fn med_policy_add(
    handle: *mut MedNode,
    signer: *const c_char,
    user: *const c_char,
    role: *const c_char,
    department: *const c_char,
    record_id: *const c_char,
    allow: c_int,
    create_time: u64,
    end_time: u64,
) -> MedStatus {
    let (node, signer) = match (|| Ok((node_ref(handle)?, cstr(signer)?)))() {
        Ok(v) => v,
        Err(s) => return s,
    };
    let (subject, object) = match policy_args(user, role, department, record_id) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let draft = PolicyDraft::new(subject, object, allow != 0, create_time, end_time);
    complete(node.node.add_policy(signer, &draft), std::ptr::null_mut())
}

/// Update the permission/environment of an existing policy.
///
/// # Safety
/// Pointer arguments as documented at module level.
#[no_mangle]
pub unsafe extern "C" fn med_policy_update(
    handle: *mut MedNode,
    signer: *const c_char,
    user: *const c_char,
    role: *const c_char,
    department: *const c_char,
    record_id: *const c_char,
    allow: c_int,
    create_time: u64,
    end_time: u64,
) -> MedStatus {
    let (node, signer) = match (|| Ok((node_ref(handle)?, cstr(signer)?)))() {
        Ok(v) => v,
        Err(s) => return s,
    };
    let (subject, object) = match policy_args(user, role, department, record_id) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let draft = PolicyDraft::new(subject, object, allow != 0, create_time, end_time);
    complete(node.node.update_policy(signer, &draft), std::ptr::null_mut())
}

/// Delete the policy for a subject/object pair.
///
/// # Safety
/// Pointer arguments as documented at module level.
#[no_mangle]
pub unsafe extern "C" fn med_policy_delete(
    handle: *mut MedNode,
    signer: *const c_char,
    user: *const c_char,
    role: *const c_char,
    department: *const c_char,
    record_id: *const c_char,
) -> MedStatus {
    let (node, signer) = match (|| Ok((node_ref(handle)?, cstr(signer)?)))() {
        Ok(v) => v,
        Err(s) => return s,
    };
    let (subject, object) = match policy_args(user, role, department, record_id) {
        Ok(v) => v,
        Err(s) => return s,
    };
    complete(
        node.node.delete_policy(signer, &subject, &object),
        std::ptr::null_mut(),
    )
}

/// Query a policy; on success `out` receives its canonical text form.
///
/// # Safety
/// Pointer arguments as documented at module level; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn med_policy_query(
    handle: *mut MedNode,
    user: *const c_char,
    role: *const c_char,
    department: *const c_char,
    record_id: *const c_char,
    out: *mut MedBuffer,
) -> MedStatus {
    let node = match node_ref(handle) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let (subject, object) = match policy_args(user, role, department, record_id) {
        Ok(v) => v,
        Err(s) => return s,
    };
    complete(node.node.query_policy(&subject, &object), out)
}

/// Store record content off chain and commit its address on chain.
///
/// # Safety
/// `content` must point to `content_len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn med_record_add(
    handle: *mut MedNode,
    signer: *const c_char,
    record_id: *const c_char,
    content: *const u8,
    content_len: usize,
) -> MedStatus {
    let (node, signer, record_id) =
        match (|| Ok((node_ref(handle)?, cstr(signer)?, cstr(record_id)?)))() {
            Ok(v) => v,
            Err(s) => return s,
        };
    if content.is_null() && content_len > 0 {
        set_last_error("null content with non-zero length");
        return MedStatus::NullArgument;
    }
    let bytes = if content_len == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(content, content_len)
    };
    complete(node.node.add_record(signer, record_id, bytes), std::ptr::null_mut())
}

/// Replace a record's content (new blob stored, pointer rewritten).
///
/// # Safety
/// `content` must point to `content_len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn med_record_update(
    handle: *mut MedNode,
    signer: *const c_char,
    record_id: *const c_char,
    content: *const u8,
    content_len: usize,
) -> MedStatus {
    let (node, signer, record_id) =
        match (|| Ok((node_ref(handle)?, cstr(signer)?, cstr(record_id)?)))() {
            Ok(v) => v,
            Err(s) => return s,
        };
    if content.is_null() && content_len > 0 {
        set_last_error("null content with non-zero length");
        return MedStatus::NullArgument;
    }
    let bytes = if content_len == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(content, content_len)
    };
    complete(
        node.node.update_record(signer, record_id, bytes),
        std::ptr::null_mut(),
    )
}

/// Delete a record pointer and its blob.
///
/// # Safety
/// Pointer arguments as documented at module level.
#[no_mangle]
pub unsafe extern "C" fn med_record_delete(
    handle: *mut MedNode,
    signer: *const c_char,
    record_id: *const c_char,
) -> MedStatus {
    let (node, signer, record_id) =
        match (|| Ok((node_ref(handle)?, cstr(signer)?, cstr(record_id)?)))() {
            Ok(v) => v,
            Err(s) => return s,
        };
    complete(node.node.delete_record(signer, record_id), std::ptr::null_mut())
}

/// Fetch a record's full content into `out`.
///
/// # Safety
/// Pointer arguments as documented at module level; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn med_record_query(
    handle: *mut MedNode,
    record_id: *const c_char,
    out: *mut MedBuffer,
) -> MedStatus {
    let (node, record_id) = match (|| Ok((node_ref(handle)?, cstr(record_id)?)))() {
        Ok(v) => v,
        Err(s) => return s,
    };
    complete(node.node.query_record(record_id), out)
}

/// Evaluate an access request as (user, role, department) on `record_id`.
/// A grant returns MED_STATUS_OK and, when `out` is non-NULL, the record
/// bytes; denials report MED_STATUS_DENIED / _EXPIRED / _NO_POLICY.
///
/// # Safety
/// Pointer arguments as documented at module level; `out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn med_access_check(
    handle: *mut MedNode,
    user: *const c_char,
    role: *const c_char,
    department: *const c_char,
    record_id: *const c_char,
    out: *mut MedBuffer,
) -> MedStatus {
    let node = match node_ref(handle) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let (user, role, dept, record_id) = match (|| {
        Ok((cstr(user)?, cstr(role)?, cstr(department)?, cstr(record_id)?))
    })() {
        Ok(v) => v,
        Err(s) => return s,
    };
    let role = match subject_role_of(role) {
        Ok(r) => r,
        Err(s) => return s,
    };
    complete(node.node.check_access(user, role, dept, record_id), out)
}

/// Verify the persisted chain (hashes, links, signatures). Returns 1 when
/// valid, 0 when corrupt, -1 on a null handle.
///
/// # Safety
/// `handle` as documented at module level.
#[no_mangle]
pub unsafe extern "C" fn med_ledger_verify(handle: *mut MedNode) -> c_int {
    match node_ref(handle) {
        Ok(node) => {
            let ok = node.node.verify_chain();
            set_last_error(if ok { "" } else { "chain verification failed" });
            ok as c_int
        }
        Err(_) => -1,
    }
}

/// Height of the committed tip, or -1 for an empty chain / null handle.
///
/// # Safety
/// `handle` as documented at module level.
#[no_mangle]
pub unsafe extern "C" fn med_ledger_height(handle: *mut MedNode) -> i64 {
    match node_ref(handle) {
        Ok(node) => node.node.ledger_height().map(|h| h as i64).unwrap_or(-1),
        Err(_) => -1,
    }
}
