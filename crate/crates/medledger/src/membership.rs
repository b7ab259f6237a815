//! Membership service: stands in for the certificate authority of a
//! permissioned network. Issues Ed25519 signing identities bound to a role
//! and department, verifies envelopes, and persists the registry as a TSV
//! file (`user_id<TAB>role<TAB>department<TAB>base58(public_key)`).
//!
//! Private keys live in a separate `wallet.tsv` so a later process can keep
//! signing as a registered identity; the public registry file never carries
//! key material beyond verification keys.

use std::collections::HashMap;
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use thiserror::Error;

pub const IDENTITY_FILE: &str = "identities.tsv";
pub const WALLET_FILE: &str = "wallet.tsv";

/// Seconds since the Unix epoch.
pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Error)]
pub enum MembershipError {
    #[error("DuplicateIdentity: user {0:?} is already registered")]
    DuplicateIdentity(String),
    #[error("UnknownSigner: user {0:?} is not registered")]
    UnknownSigner(String),
    #[error("identity store is read-only (no private key for {0:?})")]
    NoPrivateKey(String),
    #[error("malformed identity store line {0}: {1}")]
    Parse(usize, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Admin,
    Doctor,
    Patient,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Admin => "admin",
            Role::Doctor => "doctor",
            Role::Patient => "patient",
        };
        f.write_str(s)
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "admin" => Ok(Role::Admin),
            "doctor" => Ok(Role::Doctor),
            "patient" => Ok(Role::Patient),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

/// Public identity record as issued by the CA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    pub user_id: String,
    pub role: Role,
    pub department: String,
    pub public_key: [u8; 32],
    pub issued_at: u64,
}

/// A signed payload: the signature binds `payload` to the signer's
/// registered verification key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedEnvelope {
    pub payload: Vec<u8>,
    pub signer: String,
    pub signature: Vec<u8>,
}

/// Certificate authority: identity registry plus the signing-key wallet.
pub struct Ca {
    identities: HashMap<String, Identity>,
    keys: HashMap<String, SigningKey>,
    dir: Option<PathBuf>,
}

impl Ca {
    /// Volatile CA with no backing files.
    pub fn in_memory() -> Self {
        Self {
            identities: HashMap::new(),
            keys: HashMap::new(),
            dir: None,
        }
    }

    /// Open (or start) a CA persisted under `dir`. Missing files mean an
    /// empty registry; malformed lines are errors.
    pub fn open(dir: &Path) -> Result<Self, MembershipError> {
        let mut ca = Self {
            identities: HashMap::new(),
            keys: HashMap::new(),
            dir: Some(dir.to_path_buf()),
        };
        let id_path = dir.join(IDENTITY_FILE);
        let mut issued: HashMap<String, u64> = HashMap::new();
        let wallet_path = dir.join(WALLET_FILE);
        if wallet_path.exists() {
            for (no, line) in std::fs::read_to_string(&wallet_path)?.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let mut parts = line.split('\t');
                let (user, seed, at) = (parts.next(), parts.next(), parts.next());
                let (user, seed, at) = match (user, seed, at) {
                    (Some(u), Some(s), Some(a)) => (u, s, a),
                    _ => return Err(MembershipError::Parse(no + 1, line.to_string())),
                };
                let seed_bytes: [u8; 32] = bs58::decode(seed)
                    .into_vec()
                    .ok()
                    .and_then(|v| v.try_into().ok())
                    .ok_or_else(|| MembershipError::Parse(no + 1, line.to_string()))?;
                let issued_at: u64 = at
                    .parse()
                    .map_err(|_| MembershipError::Parse(no + 1, line.to_string()))?;
                ca.keys.insert(user.to_string(), SigningKey::from_bytes(&seed_bytes));
                issued.insert(user.to_string(), issued_at);
            }
        }
        if id_path.exists() {
            for (no, line) in std::fs::read_to_string(&id_path)?.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 4 {
                    return Err(MembershipError::Parse(no + 1, line.to_string()));
                }
                let role = Role::from_str(fields[1])
                    .map_err(|_| MembershipError::Parse(no + 1, line.to_string()))?;
                let public_key: [u8; 32] = bs58::decode(fields[3])
                    .into_vec()
                    .ok()
                    .and_then(|v| v.try_into().ok())
                    .ok_or_else(|| MembershipError::Parse(no + 1, line.to_string()))?;
                let user_id = fields[0].to_string();
                let issued_at = issued.get(&user_id).copied().unwrap_or(0);
                ca.identities.insert(
                    user_id.clone(),
                    Identity {
                        user_id,
                        role,
                        department: fields[2].to_string(),
                        public_key,
                        issued_at,
                    },
                );
            }
        }
        Ok(ca)
    }

    /// Issue a fresh signing key pair for `user_id` and record the public key.
    pub fn register_identity(
        &mut self,
        user_id: &str,
        role: Role,
        department: &str,
    ) -> Result<Identity, MembershipError> {
        if self.identities.contains_key(user_id) {
            return Err(MembershipError::DuplicateIdentity(user_id.to_string()));
        }
        let key = SigningKey::generate(&mut rand::rngs::OsRng);
        let identity = Identity {
            user_id: user_id.to_string(),
            role,
            department: department.to_string(),
            public_key: key.verifying_key().to_bytes(),
            issued_at: unix_now(),
        };
        if let Some(dir) = &self.dir {
            append_line(
                &dir.join(IDENTITY_FILE),
                &format!(
                    "{}\t{}\t{}\t{}\n",
                    identity.user_id,
                    identity.role,
                    identity.department,
                    bs58::encode(identity.public_key).into_string()
                ),
            )?;
            append_line(
                &dir.join(WALLET_FILE),
                &format!(
                    "{}\t{}\t{}\n",
                    identity.user_id,
                    bs58::encode(key.to_bytes()).into_string(),
                    identity.issued_at
                ),
            )?;
        }
        self.keys.insert(user_id.to_string(), key);
        self.identities.insert(user_id.to_string(), identity.clone());
        Ok(identity)
    }

    /// Sign `payload` as `user_id`. The CA holds the wallet, so signing is
    /// keyed by user rather than by passing key material around.
    pub fn sign(&self, user_id: &str, payload: &[u8]) -> Result<SignedEnvelope, MembershipError> {
        if !self.identities.contains_key(user_id) {
            return Err(MembershipError::UnknownSigner(user_id.to_string()));
        }
        let key = self
            .keys
            .get(user_id)
            .ok_or_else(|| MembershipError::NoPrivateKey(user_id.to_string()))?;
        let signature = key.sign(payload);
        Ok(SignedEnvelope {
            payload: payload.to_vec(),
            signer: user_id.to_string(),
            signature: signature.to_bytes().to_vec(),
        })
    }

    /// True iff the envelope's signature is valid for its payload under the
    /// signer's registered public key.
    pub fn verify(&self, envelope: &SignedEnvelope) -> Result<bool, MembershipError> {
        let identity = self
            .identities
            .get(&envelope.signer)
            .ok_or_else(|| MembershipError::UnknownSigner(envelope.signer.clone()))?;
        let Ok(vk) = VerifyingKey::from_bytes(&identity.public_key) else {
            return Ok(false);
        };
        let Ok(sig_bytes) = <[u8; 64]>::try_from(envelope.signature.as_slice()) else {
            return Ok(false);
        };
        let sig = Signature::from_bytes(&sig_bytes);
        Ok(vk.verify(&envelope.payload, &sig).is_ok())
    }

    pub fn identity(&self, user_id: &str) -> Option<&Identity> {
        self.identities.get(user_id)
    }

    pub fn role_of(&self, user_id: &str) -> Option<Role> {
        self.identities.get(user_id).map(|i| i.role)
    }

    pub fn is_admin(&self, user_id: &str) -> bool {
        self.role_of(user_id) == Some(Role::Admin)
    }

    pub fn identities(&self) -> impl Iterator<Item = &Identity> {
        self.identities.values()
    }
}

fn append_line(path: &Path, line: &str) -> std::io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(line.as_bytes())?;
    f.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn register_and_roundtrip() {
        let mut ca = Ca::in_memory();
        let id = ca.register_identity("d001", Role::Doctor, "cardiology").unwrap();
        assert_eq!(id.user_id, "d001");
        assert_eq!(id.role, Role::Doctor);

        let env = ca.sign("d001", b"tx").unwrap();
        assert!(ca.verify(&env).unwrap());
    }

    #[test]
    fn duplicate_identity_rejected() {
        let mut ca = Ca::in_memory();
        ca.register_identity("d001", Role::Doctor, "cardiology").unwrap();
        let err = ca.register_identity("d001", Role::Admin, "it").unwrap_err();
        assert!(matches!(err, MembershipError::DuplicateIdentity(_)));
    }

    #[test]
    fn empty_payload_signs_and_verifies() {
        let mut ca = Ca::in_memory();
        ca.register_identity("admin1", Role::Admin, "it").unwrap();
        let env = ca.sign("admin1", b"").unwrap();
        assert!(ca.verify(&env).unwrap());
    }

    #[test]
    fn tampered_payload_fails() {
        let mut ca = Ca::in_memory();
        ca.register_identity("p1", Role::Patient, "oncology").unwrap();
        let mut env = ca.sign("p1", b"hello").unwrap();
        env.payload = b"hellO".to_vec();
        assert!(!ca.verify(&env).unwrap());
    }

    #[test]
    fn flipped_signature_bit_fails() {
        let mut ca = Ca::in_memory();
        ca.register_identity("p1", Role::Patient, "oncology").unwrap();
        let mut env = ca.sign("p1", b"hello").unwrap();
        env.signature[10] ^= 0x01;
        assert!(!ca.verify(&env).unwrap());
    }

    #[test]
    fn unknown_signer_is_an_error() {
        let ca = Ca::in_memory();
        let env = SignedEnvelope {
            payload: vec![],
            signer: "ghost".into(),
            signature: vec![0; 64],
        };
        assert!(matches!(
            ca.verify(&env),
            Err(MembershipError::UnknownSigner(_))
        ));
    }

    #[test]
    fn random_payload_flips_never_verify() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut ca = Ca::in_memory();
        ca.register_identity("d9", Role::Doctor, "er").unwrap();
        let msg: Vec<u8> = (0..64).map(|_| rng.gen()).collect();
        let env = ca.sign("d9", &msg).unwrap();
        for _ in 0..200 {
            let mut tampered = env.clone();
            let byte = rng.gen_range(0..tampered.payload.len());
            let bit = rng.gen_range(0..8);
            tampered.payload[byte] ^= 1 << bit;
            assert!(!ca.verify(&tampered).unwrap());
        }
    }

    #[test]
    fn persistence_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut ca = Ca::open(dir.path()).unwrap();
            ca.register_identity("d001", Role::Doctor, "cardiology").unwrap();
            ca.register_identity("admin", Role::Admin, "it").unwrap();
        }
        let ca = Ca::open(dir.path()).unwrap();
        assert_eq!(ca.role_of("d001"), Some(Role::Doctor));
        assert!(ca.is_admin("admin"));
        // the reloaded wallet must still sign verifiable envelopes
        let env = ca.sign("d001", b"after restart").unwrap();
        assert!(ca.verify(&env).unwrap());

        // file format: exactly four tab-separated fields per line
        let text = std::fs::read_to_string(dir.path().join(IDENTITY_FILE)).unwrap();
        for line in text.lines() {
            assert_eq!(line.split('\t').count(), 4);
        }
    }
}
