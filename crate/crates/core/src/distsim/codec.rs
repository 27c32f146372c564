use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Scalar, ScalarKind};

/// Bytes in the batch header: mode, scalar tag, source shard, destination
/// shard, superstep and entry count.
pub const HEADER_BYTES: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// `(u64 id, value)` pairs.
    Raw,
    /// First id as u64, then LEB128 gaps between consecutive ids, then
    /// the values.
    Delta,
}

impl Encoding {
    fn tag(self) -> u8 {
        match self {
            Encoding::Raw => 0,
            Encoding::Delta => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("stream truncated: needed {needed} bytes, {found} available")]
    Truncated { needed: usize, found: usize },
    #[error("unknown encoding mode {0}")]
    BadMode(u8),
    #[error("batch holds {found:?} values, expected {expected:?}")]
    ScalarMismatch { expected: ScalarKind, found: Option<ScalarKind> },
    #[error("varint at byte {offset} overflows 64 bits")]
    VarintOverflow { offset: usize },
    #[error("id gap {index} is zero or overflows")]
    BadDelta { index: usize },
    #[error("ids are not strictly ascending at entry {index}")]
    Unsorted { index: usize },
    #[error("{0} trailing bytes after the batch")]
    TrailingBytes(usize),
}

/// Messages from one shard to another in one superstep, one entry per
/// destination vertex in ascending id order.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageBatch<T> {
    src_shard: u32,
    dst_shard: u32,
    superstep: u32,
    entries: Vec<(u64, T)>,
}

impl<T: Scalar> MessageBatch<T> {
    pub fn new(src_shard: u32, dst_shard: u32, superstep: u32, entries: Vec<(u64, T)>) -> Result<Self, CodecError> {
        if let Some(index) = entries.windows(2).position(|w| w[0].0 >= w[1].0) {
            return Err(CodecError::Unsorted { index: index + 1 });
        }
        Ok(MessageBatch { src_shard, dst_shard, superstep, entries })
    }

    pub fn src_shard(&self) -> u32 {
        self.src_shard
    }

    pub fn dst_shard(&self) -> u32 {
        self.dst_shard
    }

    pub fn superstep(&self) -> u32 {
        self.superstep
    }

    pub fn entries(&self) -> &[(u64, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Size of the raw encoding, header included.
    pub fn raw_size(&self) -> usize {
        HEADER_BYTES + self.entries.len() * (8 + T::KIND.width())
    }
}

fn varint_len(v: u64) -> usize {
    (64 - v.max(1).leading_zeros() as usize).div_ceil(7)
}

/// Bytes the encoding spends on destination ids, excluding header and
/// values.
pub fn id_section_bytes<T: Scalar>(b: &MessageBatch<T>, mode: Encoding) -> usize {
    match (mode, b.entries.first()) {
        (Encoding::Raw, _) => 8 * b.entries.len(),
        (Encoding::Delta, None) => 0,
        (Encoding::Delta, Some(_)) => 8 + b.entries.windows(2).map(|w| varint_len(w[1].0 - w[0].0)).sum::<usize>(),
    }
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

pub fn encode_batch<T: Scalar>(b: &MessageBatch<T>, mode: Encoding) -> Vec<u8> {
    let mut out = Vec::with_capacity(b.raw_size());
    encode_entries_into(&mut out, (b.src_shard, b.dst_shard, b.superstep), &b.entries, mode);
    out
}

/// Appends one encoded batch to `out`. `entries` must have strictly
/// ascending ids.
pub(crate) fn encode_entries_into<T: Scalar>(
    out: &mut Vec<u8>,
    (src_shard, dst_shard, superstep): (u32, u32, u32),
    entries: &[(u64, T)],
    mode: Encoding,
) {
    out.push(mode.tag());
    out.push(T::KIND.tag());
    out.extend_from_slice(&src_shard.to_le_bytes());
    out.extend_from_slice(&dst_shard.to_le_bytes());
    out.extend_from_slice(&superstep.to_le_bytes());
    out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
    match mode {
        Encoding::Raw => {
            for &(id, v) in entries {
                out.extend_from_slice(&id.to_le_bytes());
                v.write_le(out);
            }
        }
        Encoding::Delta => {
            if let Some(&(first, _)) = entries.first() {
                out.extend_from_slice(&first.to_le_bytes());
                for w in entries.windows(2) {
                    put_varint(out, w[1].0 - w[0].0);
                }
                for &(_, v) in entries {
                    v.write_le(out);
                }
            }
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(CodecError::Truncated { needed: self.pos.saturating_add(n), found: self.bytes.len() });
        };
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn varint(&mut self) -> Result<u64, CodecError> {
        let start = self.pos;
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let byte = self.take(1)?[0];
            let bits = u64::from(byte & 0x7f);
            if shift == 63 && bits > 1 {
                return Err(CodecError::VarintOverflow { offset: start });
            }
            v |= bits << shift;
            if byte & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(CodecError::VarintOverflow { offset: start })
    }
}

/// Inverse of [`encode_batch`]; rejects truncated, malformed or
/// over-long streams.
pub fn decode_batch<T: Scalar>(bytes: &[u8]) -> Result<MessageBatch<T>, CodecError> {
    let mut entries = Vec::new();
    let (header, used) = decode_entries(bytes, |id, v| entries.push((id, v)))?;
    if used != bytes.len() {
        return Err(CodecError::TrailingBytes(bytes.len() - used));
    }
    let (src_shard, dst_shard, superstep) = header;
    MessageBatch::new(src_shard, dst_shard, superstep, entries)
}

/// Decodes the batch at the start of `bytes`, handing each entry to
/// `visit` in id order. Returns the `(source, destination, superstep)`
/// header and the number of bytes consumed.
pub(crate) fn decode_entries<T: Scalar>(
    bytes: &[u8],
    mut visit: impl FnMut(u64, T),
) -> Result<((u32, u32, u32), usize), CodecError> {
    let mut r = Reader { bytes, pos: 0 };
    let head = r.take(2)?;
    let mode = match head[0] {
        0 => Encoding::Raw,
        1 => Encoding::Delta,
        other => return Err(CodecError::BadMode(other)),
    };
    let scalar = ScalarKind::from_tag(head[1]);
    if scalar != Some(T::KIND) {
        return Err(CodecError::ScalarMismatch { expected: T::KIND, found: scalar });
    }
    let header = (r.u32()?, r.u32()?, r.u32()?);
    let count = r.u32()? as usize;
    let width = T::KIND.width();
    match mode {
        Encoding::Raw => {
            let mut prev = None;
            for index in 0..count {
                let id = r.u64()?;
                if prev.is_some_and(|p| p >= id) {
                    return Err(CodecError::Unsorted { index });
                }
                prev = Some(id);
                visit(id, T::read_le(r.take(width)?));
            }
        }
        Encoding::Delta if count > 0 => {
            // first pass validates the gaps and finds where values start
            let ids_start = r.pos;
            let mut id = r.u64()?;
            for index in 1..count {
                let gap = r.varint()?;
                id = id.checked_add(gap).filter(|_| gap > 0).ok_or(CodecError::BadDelta { index })?;
            }
            let mut values = Reader { bytes, pos: r.pos };
            values.take(count * width)?;
            let end = values.pos;
            let mut ids = Reader { bytes, pos: ids_start };
            values.pos = r.pos;
            let mut id = ids.u64()?;
            for index in 0..count {
                if index > 0 {
                    id += ids.varint()?;
                }
                visit(id, T::read_le(values.take(width)?));
            }
            r.pos = end;
        }
        Encoding::Delta => {}
    }
    Ok((header, r.pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn batch(ids: &[u64]) -> MessageBatch<f64> {
        MessageBatch::new(1, 2, 3, ids.iter().map(|&i| (i, i as f64 * 0.5)).collect()).unwrap()
    }

    #[test]
    fn consecutive_ids_compress() {
        let b = batch(&(100..108).collect::<Vec<_>>());
        let raw = encode_batch(&b, Encoding::Raw);
        let delta = encode_batch(&b, Encoding::Delta);
        assert_eq!(raw.len(), HEADER_BYTES + 8 * 16);
        // 8-byte first id plus seven 1-byte gaps, against 64 id bytes raw
        assert_eq!(delta.len(), HEADER_BYTES + 8 + 7 + 64);
        assert_eq!(id_section_bytes(&b, Encoding::Delta), 15);
        assert_eq!(id_section_bytes(&b, Encoding::Raw), 64);
        assert_eq!(decode_batch::<f64>(&delta).unwrap(), b);
        assert_eq!(decode_batch::<f64>(&raw).unwrap(), b);
    }

    #[test]
    fn single_and_empty() {
        let one = batch(&[42]);
        assert_eq!(encode_batch(&one, Encoding::Delta).len(), encode_batch(&one, Encoding::Raw).len());
        let empty = batch(&[]);
        assert_eq!(encode_batch(&empty, Encoding::Delta).len(), HEADER_BYTES);
        assert_eq!(decode_batch::<f64>(&encode_batch(&empty, Encoding::Delta)).unwrap(), empty);
    }

    #[test]
    fn complex_values() {
        let b = MessageBatch::new(0, 1, 0, vec![(3, Complex64::new(1.0, -2.0)), (1 << 40, Complex64::new(0.0, 5.0))]).unwrap();
        for mode in [Encoding::Raw, Encoding::Delta] {
            let bytes = encode_batch(&b, mode);
            assert_eq!(decode_batch::<Complex64>(&bytes).unwrap(), b);
            assert_eq!(bytes.len(), HEADER_BYTES + id_section_bytes(&b, mode) + 2 * 16);
            assert!(decode_batch::<f64>(&bytes).is_err());
        }
    }

    #[test]
    fn corrupt_streams_rejected() {
        let b = batch(&[1, 2, 300]);
        let bytes = encode_batch(&b, Encoding::Delta);
        for cut in 0..bytes.len() {
            assert!(decode_batch::<f64>(&bytes[..cut]).is_err(), "cut at {cut}");
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(decode_batch::<f64>(&extra), Err(CodecError::TrailingBytes(1)));
        let mut mode = bytes.clone();
        mode[0] = 9;
        assert_eq!(decode_batch::<f64>(&mode), Err(CodecError::BadMode(9)));
        let mut zero_gap = bytes.clone();
        zero_gap[HEADER_BYTES + 8] = 0;
        assert!(matches!(decode_batch::<f64>(&zero_gap), Err(CodecError::BadDelta { index: 1 })));
        let mut overflow = encode_batch(&batch(&[1, 2]), Encoding::Delta);
        let at = HEADER_BYTES + 8;
        overflow.splice(at..at + 1, [0xff; 10]);
        assert!(matches!(decode_batch::<f64>(&overflow), Err(CodecError::VarintOverflow { .. })));
        let mut unsorted = encode_batch(&batch(&[5, 6]), Encoding::Raw);
        unsorted[HEADER_BYTES..HEADER_BYTES + 8].copy_from_slice(&9u64.to_le_bytes());
        assert!(matches!(decode_batch::<f64>(&unsorted), Err(CodecError::Unsorted { .. })));
    }

    #[test]
    fn constructor_requires_ascending_ids() {
        assert!(MessageBatch::new(0, 1, 0, vec![(2, 1.0), (2, 1.0)]).is_err());
        assert!(MessageBatch::new(0, 1, 0, vec![(3, 1.0), (2, 1.0)]).is_err());
    }
}
