//! Difference-coded storage of a sorted integer run.
//!
//! A [`Chunk`] holds `count >= 1` strictly increasing integers. The first and
//! last elements stay unpacked for constant-work access; the elements after
//! the first are stored as successive differences, each written as a byte
//! varint (7 data bits per byte, least-significant group first, high bit set
//! means continuation). Elements must lie in `[0, 2^63)` so every difference
//! fits in at most 9 payload bytes.
//!
//! The empty run is represented by absence (`Option<Chunk>`), never by a
//! zero count; the associated set operations below take and return options.

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Chunk {
    count: u32,
    first: u64,
    last: u64,
    payload: Box<[u8]>,
}

impl std::fmt::Debug for Chunk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chunk")
            .field("count", &self.count)
            .field("first", &self.first)
            .field("last", &self.last)
            .field("payload_len", &self.payload.len())
            .finish()
    }
}

pub(crate) fn write_varint(out: &mut Vec<u8>, mut x: u64) {
    loop {
        let byte = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(byte);
            break;
        }
        out.push(byte | 0x80);
    }
}

pub(crate) fn read_varint(buf: &[u8], pos: &mut usize) -> Option<u64> {
    let mut shift = 0u32;
    let mut acc = 0u64;
    loop {
        let b = *buf.get(*pos)?;
        *pos += 1;
        let low = u64::from(b & 0x7f);
        if shift >= 64 || (shift == 63 && low > 1) {
            return None; // would overflow u64
        }
        acc |= low << shift;
        if b & 0x80 == 0 {
            return Some(acc);
        }
        shift += 7;
    }
}

pub(crate) fn varint_len(x: u64) -> usize {
    let bits = 64 - x.max(1).leading_zeros() as usize;
    bits.div_ceil(7)
}

impl Chunk {
    /// Encodes a non-empty, strictly increasing sequence with elements in
    /// `[0, 2^63)`.
    pub fn encode(xs: &[u64]) -> Result<Chunk> {
        if xs.is_empty() {
            return Err(Error::contract("encode: empty sequence"));
        }
        let last = *xs.last().expect("nonempty");
        if last >= 1 << 63 {
            return Err(Error::contract("encode: element out of range"));
        }
        let mut payload = Vec::new();
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::contract("encode: sequence not strictly increasing"));
            }
            write_varint(&mut payload, w[1] - w[0]);
        }
        Ok(Chunk {
            count: u32::try_from(xs.len()).expect("chunk length fits u32"),
            first: xs[0],
            last,
            payload: payload.into_boxed_slice(),
        })
    }

    /// `encode` with absence for the empty run; input must already be
    /// strictly increasing.
    pub fn from_sorted(xs: &[u64]) -> Option<Chunk> {
        if xs.is_empty() {
            None
        } else {
            Some(Chunk::encode(xs).expect("strictly increasing by construction"))
        }
    }

    /// Decodes the full element sequence, validating the payload: a
    /// truncated varint, a zero difference, trailing bytes, or a `last`
    /// mismatch all report corruption.
    pub fn decode(&self) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(self.count as usize);
        let mut cur = self.first;
        out.push(cur);
        let mut pos = 0usize;
        for _ in 1..self.count {
            let diff = read_varint(&self.payload, &mut pos)
                .ok_or_else(|| Error::CorruptChunk("truncated varint".into()))?;
            if diff == 0 {
                return Err(Error::CorruptChunk("zero difference".into()));
            }
            cur = cur
                .checked_add(diff)
                .ok_or_else(|| Error::CorruptChunk("difference overflows".into()))?;
            out.push(cur);
        }
        if pos != self.payload.len() {
            return Err(Error::CorruptChunk("trailing payload bytes".into()));
        }
        if cur != self.last {
            return Err(Error::CorruptChunk("last element mismatch".into()));
        }
        Ok(out)
    }

    pub fn len(&self) -> u64 {
        u64::from(self.count)
    }

    pub fn is_empty(&self) -> bool {
        false // count >= 1 by construction
    }

    pub fn first(&self) -> u64 {
        self.first
    }

    pub fn last(&self) -> u64 {
        self.last
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// Iterates the elements in increasing order without materializing them.
    pub fn iter(&self) -> Elements<'_> {
        Elements {
            chunk: self,
            emitted: 0,
            cur: self.first,
            pos: 0,
        }
    }

    pub fn contains(&self, e: u64) -> bool {
        if e < self.first || e > self.last {
            return false;
        }
        self.iter().any(|x| x == e)
    }

    /// Byte layout: count, first, last as varints, then the difference
    /// payload.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        write_varint(&mut out, u64::from(self.count));
        write_varint(&mut out, self.first);
        write_varint(&mut out, self.last);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn serialized_len(&self) -> usize {
        varint_len(u64::from(self.count))
            + varint_len(self.first)
            + varint_len(self.last)
            + self.payload.len()
    }

    /// Parses the byte layout written by [`Chunk::to_bytes`]; returns the
    /// chunk and the number of bytes consumed.
    pub fn from_bytes(buf: &[u8]) -> Result<(Chunk, usize)> {
        let mut pos = 0usize;
        let count = read_varint(buf, &mut pos)
            .ok_or_else(|| Error::CorruptChunk("truncated count".into()))?;
        if count == 0 {
            return Err(Error::CorruptChunk("zero count".into()));
        }
        let count =
            u32::try_from(count).map_err(|_| Error::CorruptChunk("count out of range".into()))?;
        let first = read_varint(buf, &mut pos)
            .ok_or_else(|| Error::CorruptChunk("truncated first".into()))?;
        let last = read_varint(buf, &mut pos)
            .ok_or_else(|| Error::CorruptChunk("truncated last".into()))?;
        let payload_start = pos;
        let mut cur = first;
        for _ in 1..count {
            let diff = read_varint(buf, &mut pos)
                .ok_or_else(|| Error::CorruptChunk("truncated varint".into()))?;
            if diff == 0 {
                return Err(Error::CorruptChunk("zero difference".into()));
            }
            cur = cur
                .checked_add(diff)
                .ok_or_else(|| Error::CorruptChunk("difference overflows".into()))?;
        }
        if cur != last {
            return Err(Error::CorruptChunk("last element mismatch".into()));
        }
        let chunk = Chunk {
            count,
            first,
            last,
            payload: buf[payload_start..pos].to_vec().into_boxed_slice(),
        };
        Ok((chunk, pos))
    }

    /// Partitions by `k`: elements `< k`, whether `k` is present, elements
    /// `> k`. Empty sides are absent.
    pub fn split(c: Option<&Chunk>, k: u64) -> (Option<Chunk>, bool, Option<Chunk>) {
        let Some(c) = c else {
            return (None, false, None);
        };
        // Whole-chunk fast paths via the unpacked bounds.
        if k < c.first {
            return (None, false, Some(c.clone()));
        }
        if k > c.last {
            return (Some(c.clone()), false, None);
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut found = false;
        for e in c.iter() {
            match e.cmp(&k) {
                std::cmp::Ordering::Less => left.push(e),
                std::cmp::Ordering::Equal => found = true,
                std::cmp::Ordering::Greater => right.push(e),
            }
        }
        (Chunk::from_sorted(&left), found, Chunk::from_sorted(&right))
    }

    /// Sorted deduplicating merge of two runs.
    pub fn union(a: Option<&Chunk>, b: Option<&Chunk>) -> Option<Chunk> {
        match (a, b) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => {
                let mut out = Vec::with_capacity((a.len() + b.len()) as usize);
                let mut ia = a.iter().peekable();
                let mut ib = b.iter().peekable();
                loop {
                    match (ia.peek(), ib.peek()) {
                        (Some(&x), Some(&y)) => {
                            if x < y {
                                out.push(x);
                                ia.next();
                            } else if y < x {
                                out.push(y);
                                ib.next();
                            } else {
                                out.push(x);
                                ia.next();
                                ib.next();
                            }
                        }
                        (Some(_), None) => {
                            out.extend(ia.by_ref());
                            break;
                        }
                        (None, Some(_)) => {
                            out.extend(ib.by_ref());
                            break;
                        }
                        (None, None) => break,
                    }
                }
                Chunk::from_sorted(&out)
            }
        }
    }

    /// Concatenation of two runs where everything in `a` precedes
    /// everything in `b`.
    pub fn concat(a: Option<&Chunk>, b: Option<&Chunk>) -> Option<Chunk> {
        match (a, b) {
            (None, x) | (x, None) => x.cloned(),
            (Some(a), Some(b)) => {
                debug_assert!(
                    a.last < b.first,
                    "concat ranges must be disjoint and ordered"
                );
                let mut out = Vec::with_capacity((a.len() + b.len()) as usize);
                out.extend(a.iter());
                out.extend(b.iter());
                Chunk::from_sorted(&out)
            }
        }
    }
}

pub struct Elements<'a> {
    chunk: &'a Chunk,
    emitted: u32,
    cur: u64,
    pos: usize,
}

impl Iterator for Elements<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.emitted >= self.chunk.count {
            return None;
        }
        if self.emitted > 0 {
            let diff = read_varint(&self.chunk.payload, &mut self.pos).expect("valid payload");
            debug_assert!(diff > 0);
            self.cur += diff;
        }
        self.emitted += 1;
        Some(self.cur)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.chunk.count - self.emitted) as usize;
        (rem, Some(rem))
    }
}
