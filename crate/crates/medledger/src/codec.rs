//! Canonical byte encoding used everywhere a hash preimage or a persisted
//! record is built: fields in declaration order, integers big-endian
//! fixed-width, byte strings length-prefixed with a u32, strings UTF-8.
//!
//! Decoding is strict — trailing bytes, truncation and bad UTF-8 are all
//! errors — so any mutation of persisted bytes surfaces as a decode failure
//! instead of silently re-interpreting data.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("unexpected end of input at offset {0}")]
    UnexpectedEof(usize),
    #[error("{0} trailing bytes after canonical value")]
    TrailingBytes(usize),
    #[error("invalid utf-8 in string field")]
    InvalidUtf8,
    #[error("malformed field: {0}")]
    Malformed(&'static str),
}

/// Append-only canonical writer.
#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn put_u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    /// Fixed-width field, no length prefix (hashes, keys).
    pub fn put_fixed(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }

    /// Length-prefixed byte string.
    pub fn put_bytes(&mut self, v: &[u8]) {
        self.put_u32(v.len() as u32);
        self.buf.extend_from_slice(v);
    }

    pub fn put_str(&mut self, v: &str) {
        self.put_bytes(v.as_bytes());
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// Strict canonical reader over a byte slice.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.pos + n > self.buf.len() {
            return Err(CodecError::UnexpectedEof(self.pos));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, CodecError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        let b = self.take(8)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(u64::from_be_bytes(a))
    }

    pub fn fixed(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        self.take(n)
    }

    pub fn fixed32(&mut self) -> Result<[u8; 32], CodecError> {
        let b = self.take(32)?;
        let mut a = [0u8; 32];
        a.copy_from_slice(b);
        Ok(a)
    }

    pub fn bytes(&mut self) -> Result<Vec<u8>, CodecError> {
        let n = self.u32()? as usize;
        Ok(self.take(n)?.to_vec())
    }

    pub fn string(&mut self) -> Result<String, CodecError> {
        let b = self.bytes()?;
        String::from_utf8(b).map_err(|_| CodecError::InvalidUtf8)
    }

    /// Ensure the value consumed the whole input.
    pub fn finish(self) -> Result<(), CodecError> {
        let rest = self.buf.len() - self.pos;
        if rest != 0 {
            return Err(CodecError::TrailingBytes(rest));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn roundtrip_mixed_fields() {
        let mut w = Writer::new();
        w.put_u8(7);
        w.put_u32(1000);
        w.put_u64(1_700_000_000);
        w.put_bytes(b"abc");
        w.put_str("médical");
        let bytes = w.into_bytes();

        let mut r = Reader::new(&bytes);
        assert_eq!(r.u8().unwrap(), 7);
        assert_eq!(r.u32().unwrap(), 1000);
        assert_eq!(r.u64().unwrap(), 1_700_000_000);
        assert_eq!(r.bytes().unwrap(), b"abc");
        assert_eq!(r.string().unwrap(), "médical");
        r.finish().unwrap();
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut w = Writer::new();
        w.put_u32(1);
        let mut bytes = w.into_bytes();
        bytes.push(0);
        let mut r = Reader::new(&bytes);
        r.u32().unwrap();
        assert_eq!(r.finish(), Err(CodecError::TrailingBytes(1)));
    }

    #[test]
    fn truncation_rejected() {
        let mut r = Reader::new(&[0, 0, 0, 9, b'x']);
        assert!(matches!(r.bytes(), Err(CodecError::UnexpectedEof(_))));
    }

    proptest! {
        #[test]
        fn bytes_roundtrip(v in proptest::collection::vec(any::<u8>(), 0..512)) {
            let mut w = Writer::new();
            w.put_bytes(&v);
            let bytes = w.into_bytes();
            let mut r = Reader::new(&bytes);
            prop_assert_eq!(r.bytes().unwrap(), v);
            prop_assert!(r.finish().is_ok());
        }

        #[test]
        fn ints_are_big_endian(v in any::<u64>()) {
            let mut w = Writer::new();
            w.put_u64(v);
            prop_assert_eq!(w.into_bytes(), v.to_be_bytes().to_vec());
        }
    }
}
