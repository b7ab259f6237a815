//! Attribute model and the pure access decision rule.
//!
//! A policy is the quadruple (subject, object, permission, environment);
//! a request carries subject and object attributes plus its request time.
//! Policies are identified by SHA-256 over the canonical subject+object
//! text, so updating permission or environment never changes the id.
//!
//! Canonical text form (also the on-chain value and CLI format): `key=value`
//! lines in fixed order userId, role, department, recordId, allow,
//! createTime, endTime; integers are decimal seconds since the epoch.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

/// Role of a requesting subject. Administrators manage the chain but do not
/// appear in access policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubjectRole {
    Doctor,
    Patient,
}

impl fmt::Display for SubjectRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubjectRole::Doctor => "doctor",
            SubjectRole::Patient => "patient",
        })
    }
}

impl FromStr for SubjectRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "doctor" => Ok(SubjectRole::Doctor),
            "patient" => Ok(SubjectRole::Patient),
            other => Err(format!("unknown subject role {other:?}")),
        }
    }
}

/// Subject attributes: who is asking.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubjectAttrs {
    pub user_id: String,
    pub role: SubjectRole,
    pub department: String,
}

impl SubjectAttrs {
    pub fn new(user_id: &str, role: SubjectRole, department: &str) -> Self {
        Self {
            user_id: user_id.to_string(),
            role,
            department: department.to_string(),
        }
    }

    pub fn canonical_text(&self) -> String {
        format!(
            "userId={}\nrole={}\ndepartment={}\n",
            self.user_id, self.role, self.department
        )
    }

    fn is_valid(&self) -> bool {
        field_ok(&self.user_id) && field_ok(&self.department)
    }
}

/// Object attributes: which record.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectAttrs {
    pub record_id: String,
}

impl ObjectAttrs {
    pub fn new(record_id: &str) -> Self {
        Self {
            record_id: record_id.to_string(),
        }
    }

    pub fn canonical_text(&self) -> String {
        format!("recordId={}\n", self.record_id)
    }

    fn is_valid(&self) -> bool {
        field_ok(&self.record_id)
    }
}

/// Permission bit: 1 = allow, 0 = deny.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermissionAttr {
    pub allow: bool,
}

/// Environment attributes: policy validity window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvironmentAttrs {
    pub create_time: u64,
    pub end_time: u64,
}

/// A policy before its id is derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyDraft {
    pub subject: SubjectAttrs,
    pub object: ObjectAttrs,
    pub permission: PermissionAttr,
    pub environment: EnvironmentAttrs,
}

/// A complete policy with its derived id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub subject: SubjectAttrs,
    pub object: ObjectAttrs,
    pub permission: PermissionAttr,
    pub environment: EnvironmentAttrs,
    pub policy_id: [u8; 32],
}

/// An access request: subject, object and the request-side time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessRequest {
    pub subject: SubjectAttrs,
    pub object: ObjectAttrs,
    pub requested_at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Allow,
    Deny,
}

fn field_ok(s: &str) -> bool {
    !s.is_empty() && !s.contains('\n') && !s.contains('\t')
}

/// Validity check: all four attribute groups present and well-formed.
pub fn check_policy(draft: &PolicyDraft) -> bool {
    draft.subject.is_valid()
        && draft.object.is_valid()
        && draft.environment.create_time <= draft.environment.end_time
}

/// Policy id: SHA-256 over the concatenated canonical subject and object
/// text. Independent of permission and environment.
pub fn policy_id(subject: &SubjectAttrs, object: &ObjectAttrs) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(subject.canonical_text().as_bytes());
    h.update(object.canonical_text().as_bytes());
    h.finalize().into()
}

/// The decision rule: allow iff the permission bit is set and the policy has
/// not expired at `now` (strict: `end_time == now` already denies). Matching
/// of subject/object is done by id lookup before this is called; `now` is a
/// parameter so replays stay deterministic.
pub fn evaluate(policy: &Policy, _request: &AccessRequest, now: u64) -> Decision {
    if policy.permission.allow && policy.environment.end_time > now {
        Decision::Allow
    } else {
        Decision::Deny
    }
}

impl PolicyDraft {
    pub fn new(
        subject: SubjectAttrs,
        object: ObjectAttrs,
        allow: bool,
        create_time: u64,
        end_time: u64,
    ) -> Self {
        Self {
            subject,
            object,
            permission: PermissionAttr { allow },
            environment: EnvironmentAttrs {
                create_time,
                end_time,
            },
        }
    }

    pub fn into_policy(self) -> Policy {
        let policy_id = policy_id(&self.subject, &self.object);
        Policy {
            subject: self.subject,
            object: self.object,
            permission: self.permission,
            environment: self.environment,
            policy_id,
        }
    }

    pub fn canonical_text(&self) -> String {
        format!(
            "{}{}allow={}\ncreateTime={}\nendTime={}\n",
            self.subject.canonical_text(),
            self.object.canonical_text(),
            u8::from(self.permission.allow),
            self.environment.create_time,
            self.environment.end_time
        )
    }

    /// Parse the canonical text form back into a draft.
    pub fn parse_canonical_text(text: &str) -> Result<Self, String> {
        let fields = parse_kv_lines(
            text,
            &[
                "userId",
                "role",
                "department",
                "recordId",
                "allow",
                "createTime",
                "endTime",
            ],
        )?;
        let role = SubjectRole::from_str(&fields[1])?;
        let allow = match fields[4].as_str() {
            "1" => true,
            "0" => false,
            other => return Err(format!("allow must be 0 or 1, got {other:?}")),
        };
        Ok(PolicyDraft {
            subject: SubjectAttrs {
                user_id: fields[0].clone(),
                role,
                department: fields[2].clone(),
            },
            object: ObjectAttrs {
                record_id: fields[3].clone(),
            },
            permission: PermissionAttr { allow },
            environment: EnvironmentAttrs {
                create_time: parse_u64(&fields[5], "createTime")?,
                end_time: parse_u64(&fields[6], "endTime")?,
            },
        })
    }
}

impl Policy {
    pub fn canonical_text(&self) -> String {
        PolicyDraft {
            subject: self.subject.clone(),
            object: self.object.clone(),
            permission: self.permission,
            environment: self.environment,
        }
        .canonical_text()
    }

    pub fn parse_canonical_text(text: &str) -> Result<Self, String> {
        Ok(PolicyDraft::parse_canonical_text(text)?.into_policy())
    }
}

impl AccessRequest {
    pub fn new(subject: SubjectAttrs, object: ObjectAttrs, requested_at: u64) -> Self {
        Self {
            subject,
            object,
            requested_at,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.subject.is_valid() && self.object.is_valid()
    }

    pub fn canonical_text(&self) -> String {
        format!(
            "{}{}requestedAt={}\n",
            self.subject.canonical_text(),
            self.object.canonical_text(),
            self.requested_at
        )
    }

    pub fn parse_canonical_text(text: &str) -> Result<Self, String> {
        let fields = parse_kv_lines(
            text,
            &["userId", "role", "department", "recordId", "requestedAt"],
        )?;
        Ok(AccessRequest {
            subject: SubjectAttrs {
                user_id: fields[0].clone(),
                role: SubjectRole::from_str(&fields[1])?,
                department: fields[2].clone(),
            },
            object: ObjectAttrs {
                record_id: fields[3].clone(),
            },
            requested_at: parse_u64(&fields[4], "requestedAt")?,
        })
    }
}

fn parse_u64(s: &str, name: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("{name} is not an integer: {s:?}"))
}

fn parse_kv_lines(text: &str, keys: &[&str]) -> Result<Vec<String>, String> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != keys.len() {
        return Err(format!("expected {} lines, got {}", keys.len(), lines.len()));
    }
    let mut out = Vec::with_capacity(keys.len());
    for (line, key) in lines.iter().zip(keys) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {line:?} is not key=value"))?;
        if k != *key {
            return Err(format!("expected key {key:?}, got {k:?}"));
        }
        out.push(v.to_string());
    }
    Ok(out)
}
