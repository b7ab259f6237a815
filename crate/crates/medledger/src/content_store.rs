//! Content-addressed blob store. Full medical records live here; only their
//! addresses go on chain.
//!
//! An address is the 34-byte multihash `[0x12, 0x20] ++ SHA256(SHA256(content))`,
//! rendered as Base58 (Bitcoin alphabet) for its text form. Storage is one
//! file per blob under the store root, named by the text address — the
//! filesystem is the index. Reads re-hash the bytes and fail closed when the
//! recomputed address no longer matches.

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Multihash function code for SHA2-256 plus the 32-byte digest length.
const MULTIHASH_PREFIX: [u8; 2] = [0x12, 0x20];
pub const ADDRESS_LEN: usize = 34;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("NotFound: no blob at {0}")]
    NotFound(String),
    #[error("CorruptBlob: stored bytes at {0} no longer hash to their address")]
    CorruptBlob(String),
    #[error("BadAddress: {0}")]
    BadAddress(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// 34-byte self-describing content address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContentAddress([u8; ADDRESS_LEN]);

impl ContentAddress {
    /// Derive the address of `content`: double SHA-256, multihash-framed.
    pub fn from_content(content: &[u8]) -> Self {
        let first = Sha256::digest(content);
        let second = Sha256::digest(first);
        let mut bytes = [0u8; ADDRESS_LEN];
        bytes[..2].copy_from_slice(&MULTIHASH_PREFIX);
        bytes[2..].copy_from_slice(&second);
        Self(bytes)
    }

    /// Parse the Base58 text form; must decode to exactly 34 bytes with the
    /// SHA2-256 multihash prefix.
    pub fn from_text(text: &str) -> Result<Self, StoreError> {
        let raw = bs58::decode(text)
            .into_vec()
            .map_err(|e| StoreError::BadAddress(format!("{text:?}: {e}")))?;
        if raw.len() != ADDRESS_LEN {
            return Err(StoreError::BadAddress(format!(
                "{text:?}: decodes to {} bytes, want {ADDRESS_LEN}",
                raw.len()
            )));
        }
        if raw[..2] != MULTIHASH_PREFIX {
            return Err(StoreError::BadAddress(format!(
                "{text:?}: bad multihash prefix {:02x}{:02x}",
                raw[0], raw[1]
            )));
        }
        let mut bytes = [0u8; ADDRESS_LEN];
        bytes.copy_from_slice(&raw);
        Ok(Self(bytes))
    }

    pub fn to_text(&self) -> String {
        bs58::encode(self.0).into_string()
    }

    pub fn as_bytes(&self) -> &[u8; ADDRESS_LEN] {
        &self.0
    }
}

impl std::fmt::Display for ContentAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A stored blob plus its pin time (file mtime, seconds since epoch).
#[derive(Debug, Clone)]
pub struct Blob {
    pub content: Vec<u8>,
    pub pinned_at: u64,
}

/// Directory-backed blob store.
pub struct ContentStore {
    root: PathBuf,
}

impl ContentStore {
    pub fn open(root: &Path) -> Result<Self, StoreError> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    fn blob_path(&self, address: &ContentAddress) -> PathBuf {
        self.root.join(address.to_text())
    }

    /// Store `content`, returning its address. Idempotent: identical content
    /// maps to the same file and is written at most once.
    pub fn put(&self, content: &[u8]) -> Result<ContentAddress, StoreError> {
        Ok(self.put_with_status(content)?.0)
    }

    /// Like `put`, also reporting whether the blob already existed.
    pub fn put_with_status(&self, content: &[u8]) -> Result<(ContentAddress, bool), StoreError> {
        let address = ContentAddress::from_content(content);
        let path = self.blob_path(&address);
        if path.exists() {
            return Ok((address, true));
        }
        // write-then-rename so concurrent identical puts both land on a
        // complete file
        let tmp = self.root.join(format!(
            ".tmp-{}-{}",
            address.to_text(),
            std::process::id()
        ));
        {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(content)?;
            f.flush()?;
        }
        std::fs::rename(&tmp, &path)?;
        Ok((address, false))
    }

    /// Fetch the content at `address`, verifying it still hashes back to it.
    pub fn get(&self, address: &ContentAddress) -> Result<Vec<u8>, StoreError> {
        let path = self.blob_path(address);
        if !path.exists() {
            return Err(StoreError::NotFound(address.to_text()));
        }
        let content = std::fs::read(&path)?;
        if ContentAddress::from_content(&content) != *address {
            return Err(StoreError::CorruptBlob(address.to_text()));
        }
        Ok(content)
    }

    pub fn get_blob(&self, address: &ContentAddress) -> Result<Blob, StoreError> {
        let content = self.get(address)?;
        let pinned_at = std::fs::metadata(self.blob_path(address))?
            .modified()
            .ok()
            .and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok())
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(Blob { content, pinned_at })
    }

    /// Delete the blob unconditionally (no reference counting).
    pub fn remove(&self, address: &ContentAddress) -> Result<(), StoreError> {
        let path = self.blob_path(address);
        if !path.exists() {
            return Err(StoreError::NotFound(address.to_text()));
        }
        std::fs::remove_file(path)?;
        Ok(())
    }

    pub fn contains(&self, address: &ContentAddress) -> bool {
        self.blob_path(address).exists()
    }

    /// Number of stored blobs.
    pub fn len(&self) -> Result<usize, StoreError> {
        let mut n = 0;
        for entry in std::fs::read_dir(&self.root)? {
            let entry = entry?;
            if entry.file_type()?.is_file()
                && !entry.file_name().to_string_lossy().starts_with(".tmp-")
            {
                n += 1;
            }
        }
        Ok(n)
    }

    pub fn is_empty(&self) -> Result<bool, StoreError> {
        Ok(self.len()? == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Address of the empty blob, computed with an independent hashing tool
    /// (python hashlib + base58 over [0x12,0x20] ++ sha256(sha256(b""))).
    const EMPTY_ADDR: &str = "QmUfSxyqLvXdTRgMt8AajpFWd9EtgZ5RakhL87YUr1aBbs";
    const HELLO_WORLD_ADDR: &str = "Qmb22mDykkf6WVnKo5Qrca9j5qqjG1nVED7bd8xt4HA3QW";

    fn store() -> (tempfile::TempDir, ContentStore) {
        let dir = tempfile::tempdir().unwrap();
        let s = ContentStore::open(dir.path()).unwrap();
        (dir, s)
    }

    #[test]
    fn empty_blob_address_is_pinned() {
        let (_d, s) = store();
        let addr = s.put(b"").unwrap();
        assert_eq!(addr.to_text(), EMPTY_ADDR);
        assert_eq!(s.get(&addr).unwrap(), b"");
    }

    #[test]
    fn known_vector_hello_world() {
        assert_eq!(
            ContentAddress::from_content(b"hello world").to_text(),
            HELLO_WORLD_ADDR
        );
    }

    #[test]
    fn put_is_idempotent() {
        let (_d, s) = store();
        let a1 = s.put(b"record body").unwrap();
        let before = s.len().unwrap();
        let a2 = s.put(b"record body").unwrap();
        assert_eq!(a1, a2);
        assert_eq!(s.len().unwrap(), before);
    }

    #[test]
    fn round_trip() {
        let (_d, s) = store();
        let content = b"patient: zhang san".to_vec();
        let addr = s.put(&content).unwrap();
        assert_eq!(addr.to_text(), "QmRGD8tHXq337aDzYMUGTiiqf1U9yAKg3PUGVryC2GnNme");
        assert_eq!(s.get(&addr).unwrap(), content);
    }

    #[test]
    fn address_text_decodes_to_34_bytes() {
        let addr = ContentAddress::from_content(b"x");
        let parsed = ContentAddress::from_text(&addr.to_text()).unwrap();
        assert_eq!(parsed, addr);
        assert_eq!(parsed.as_bytes().len(), ADDRESS_LEN);
        assert_eq!(&parsed.as_bytes()[..2], &[0x12, 0x20]);
    }

    #[test]
    fn get_unknown_is_not_found() {
        let (_d, s) = store();
        let addr = ContentAddress::from_content(b"never stored");
        assert!(matches!(s.get(&addr), Err(StoreError::NotFound(_))));
    }

    #[test]
    fn corrupted_blob_fails_closed() {
        let dir = tempfile::tempdir().unwrap();
        let addr;
        {
            let s = ContentStore::open(dir.path()).unwrap();
            addr = s.put(b"sensitive record").unwrap();
        }
        // flip one byte on disk, then re-open
        let path = dir.path().join(addr.to_text());
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[3] ^= 0x20;
        std::fs::write(&path, bytes).unwrap();

        let s = ContentStore::open(dir.path()).unwrap();
        assert!(matches!(s.get(&addr), Err(StoreError::CorruptBlob(_))));
    }

    #[test]
    fn remove_then_get_is_not_found() {
        let (_d, s) = store();
        let addr = s.put(b"to be erased").unwrap();
        s.remove(&addr).unwrap();
        assert!(matches!(s.get(&addr), Err(StoreError::NotFound(_))));
        // second removal reports NotFound as well
        assert!(matches!(s.remove(&addr), Err(StoreError::NotFound(_))));
    }

    #[test]
    fn no_reference_counting() {
        let (_d, s) = store();
        s.put(b"shared").unwrap();
        let addr = s.put(b"shared").unwrap();
        s.remove(&addr).unwrap();
        assert!(matches!(s.get(&addr), Err(StoreError::NotFound(_))));
    }

    #[test]
    fn determinism_across_store_instances() {
        let (_d1, s1) = store();
        let (_d2, s2) = store();
        let a = s1.put(b"same bytes").unwrap();
        let b = s2.put(b"same bytes").unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn random_round_trips() {
        use rand::{Rng, RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let (_d, s) = store();
        for _ in 0..50 {
            let len = rng.gen_range(0..=4096);
            let mut content = vec![0u8; len];
            rng.fill_bytes(&mut content);
            let addr = s.put(&content).unwrap();
            assert_eq!(s.get(&addr).unwrap(), content);
            let raw = bs58::decode(addr.to_text()).into_vec().unwrap();
            assert_eq!(raw.len(), ADDRESS_LEN);
        }
    }
}
