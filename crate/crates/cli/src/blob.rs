//! The `DTR1` index file.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size        | field                                                  |
//! |--------|-------------|--------------------------------------------------------|
//! | 0      | 4           | magic `DTR1`                                           |
//! | 4      | 2           | format version (`1`)                                   |
//! | 6      | 1           | kind: `0` array, `1` intervals                         |
//! | 7      | 1           | reserved, zero                                         |
//! | 8      | 8           | `n`                                                    |
//! | 16     | `8n`/`16n`  | values (`i64`) or interval pairs (`u64`, `u64`)        |
//! |        | 8 + 8 + 8w  | DFUDS bit length, word count `w`, raw words            |
//! |        | 8 + 8s      | superblock count `s`, cumulative one-counts            |
//! |        | 8 + 8n      | map length `n`, closing parenthesis of each position   |
//!
//! The DFUDS section encodes the min-heap over the values (arrays) or over
//! the interval lengths. Loading rebuilds the index from the values and
//! rejects the file unless every stored section matches.

use dualtree::minheap::{build_minheap, MinHeapIndex};
use dualtree::mliq::{build_intervals, IntervalSet};
use dualtree::ParenSeq;

use crate::CliError;

pub const MAGIC: &[u8; 4] = b"DTR1";
pub const VERSION: u16 = 1;

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum Index {
    Array(MinHeapIndex<i64>),
    Intervals(IntervalSet),
}

impl Index {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Index::Array(_) => "array",
            Index::Intervals(_) => "intervals",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Index::Array(h) => h.len(),
            Index::Intervals(s) => s.len(),
        }
    }

    pub fn dfuds(&self) -> &ParenSeq {
        match self {
            Index::Array(h) => h.dfuds(),
            Index::Intervals(s) => s.heap().dfuds(),
        }
    }
}

fn put(out: &mut Vec<u8>, x: u64) {
    out.extend_from_slice(&x.to_le_bytes());
}

pub fn encode(index: &Index) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(match index {
        Index::Array(_) => 0,
        Index::Intervals(_) => 1,
    });
    out.push(0);
    put(&mut out, index.len() as u64);
    match index {
        Index::Array(h) => {
            for &v in h.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Index::Intervals(s) => {
            for (a, b) in s.intervals() {
                put(&mut out, a);
                put(&mut out, b);
            }
        }
    }
    let bits = index.dfuds().bits();
    put(&mut out, bits.len() as u64);
    put(&mut out, bits.words().len() as u64);
    for &w in bits.words() {
        put(&mut out, w);
    }
    put(&mut out, bits.superblock_counts().len() as u64);
    for &c in bits.superblock_counts() {
        put(&mut out, c);
    }
    put(&mut out, index.len() as u64);
    for m in 1..=index.len() {
        put(
            &mut out,
            index.dfuds().select0(m).expect("one close per position") as u64,
        );
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8], CliError> {
        if self.bytes.len() - self.at < n {
            return Err(corrupt(format!("truncated in {what}")));
        }
        let s = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64, CliError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    /// A count that must fit in the remaining bytes at `width` bytes each.
    fn count(&mut self, width: usize, what: &str) -> Result<usize, CliError> {
        let c = self.u64(what)?;
        let room = (self.bytes.len() - self.at) / width;
        if c > room as u64 {
            return Err(corrupt(format!("{what} count {c} exceeds the file size")));
        }
        Ok(c as usize)
    }

    fn u64s(&mut self, n: usize, what: &str) -> Result<Vec<u64>, CliError> {
        (0..n).map(|_| self.u64(what)).collect()
    }
}

fn corrupt(msg: String) -> CliError {
    CliError::Input(format!("invalid index file: {msg}"))
}

pub fn decode(bytes: &[u8]) -> Result<Index, CliError> {
    let mut r = Reader { bytes, at: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(corrupt("missing DTR1 magic".into()));
    }
    let version = u16::from_le_bytes(r.take(2, "version")?.try_into().unwrap());
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let kind = r.take(1, "kind")?[0];
    if r.take(1, "reserved byte")?[0] != 0 {
        return Err(corrupt("reserved byte is not zero".into()));
    }
    let index = match kind {
        0 => {
            let n = r.count(8, "value")?;
            let values: Vec<i64> = r.u64s(n, "values")?.into_iter().map(|x| x as i64).collect();
            Index::Array(build_minheap(&values).map_err(|e| corrupt(e.to_string()))?)
        }
        1 => {
            let n = r.count(16, "interval")?;
            let flat = r.u64s(2 * n, "intervals")?;
            let pairs: Vec<(u64, u64)> = flat.chunks(2).map(|p| (p[0], p[1])).collect();
            Index::Intervals(build_intervals(&pairs).map_err(|e| corrupt(e.to_string()))?)
        }
        k => return Err(corrupt(format!("unknown kind {k}"))),
    };
    let bits = index.dfuds().bits();
    let bit_len = r.u64("bit length")?;
    let word_count = r.count(8, "word")?;
    let words = r.u64s(word_count, "words")?;
    if bit_len != bits.len() as u64 || words != bits.words() {
        return Err(corrupt("DFUDS section does not match the values".into()));
    }
    let sample_count = r.count(8, "sample")?;
    let samples = r.u64s(sample_count, "samples")?;
    if samples != bits.superblock_counts() {
        return Err(corrupt("rank samples do not match the bits".into()));
    }
    let map_len = r.count(8, "map")?;
    let map = r.u64s(map_len, "map")?;
    let expected: Vec<u64> = (1..=index.len())
        .map(|m| index.dfuds().select0(m).unwrap() as u64)
        .collect();
    if map != expected {
        return Err(corrupt("position map does not match the bits".into()));
    }
    if r.at != bytes.len() {
        return Err(corrupt(format!("{} trailing bytes", bytes.len() - r.at)));
    }
    Ok(index)
}
