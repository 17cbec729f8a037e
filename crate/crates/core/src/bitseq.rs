//! Plain bit sequences with rank and select.
//!
//! Positions are 1-based throughout: `rank1(x)` counts ones in `1..=x`, and
//! `select1(i)` returns the position of the `i`-th one. Acceleration is a
//! cumulative count sampled every [`SUPERBLOCK_BITS`] bits; rank adds the
//! popcount of the remaining words and select binary-searches the samples
//! before scanning at most one superblock.

use crate::error::{Error, Result};

pub const SUPERBLOCK_BITS: usize = 512;
const WORDS_PER_SUPERBLOCK: usize = SUPERBLOCK_BITS / 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSeq {
    words: Vec<u64>,
    len: usize,
    /// `superblocks[k]` = number of ones strictly before bit index `k * SUPERBLOCK_BITS`.
    superblocks: Vec<u64>,
}

impl BitSeq {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if bit {
                *words.last_mut().unwrap() |= 1 << (len % 64);
            }
            len += 1;
        }
        Self::from_words(words, len).expect("word count matches length")
    }

    /// Builds from raw little-endian-ordered words (bit `k` of the sequence is
    /// bit `k % 64` of word `k / 64`). Bits past `len` must be zero.
    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != len.div_ceil(64) {
            return Err(Error::contract(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        if !len.is_multiple_of(64) {
            let tail = words[words.len() - 1] >> (len % 64);
            if tail != 0 {
                return Err(Error::contract("bits set beyond the sequence length"));
            }
        }
        let mut superblocks = Vec::with_capacity(words.len() / WORDS_PER_SUPERBLOCK + 1);
        let mut acc = 0u64;
        for chunk in words.chunks(WORDS_PER_SUPERBLOCK) {
            superblocks.push(acc);
            acc += chunk.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        }
        superblocks.push(acc);
        Ok(Self {
            words,
            len,
            superblocks,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Sampled cumulative counts; the last entry is the total number of ones.
    pub fn superblock_counts(&self) -> &[u64] {
        &self.superblocks
    }

    pub fn count_ones(&self) -> usize {
        *self.superblocks.last().unwrap() as usize
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Bits used by the raw sequence plus the sampled table.
    pub fn size_in_bits(&self) -> usize {
        self.words.len() * 64 + self.superblocks.len() * 64
    }

    fn check(&self, x: usize) -> Result<()> {
        if x == 0 || x > self.len {
            Err(Error::Range {
                what: "position",
                value: x,
                len: self.len,
            })
        } else {
            Ok(())
        }
    }

    pub fn get(&self, x: usize) -> Result<bool> {
        self.check(x)?;
        Ok(self.bit(x))
    }

    #[inline]
    pub(crate) fn bit(&self, x: usize) -> bool {
        let k = x - 1;
        (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    /// Ones in `1..=x`; `x = 0` yields 0.
    #[inline]
    pub(crate) fn rank1_raw(&self, x: usize) -> usize {
        debug_assert!(x <= self.len);
        let word = x / 64;
        let sb = word / WORDS_PER_SUPERBLOCK;
        let mut count = self.superblocks[sb] as usize;
        for w in &self.words[sb * WORDS_PER_SUPERBLOCK..word] {
            count += w.count_ones() as usize;
        }
        let rem = x % 64;
        if rem != 0 {
            count += (self.words[word] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        count
    }

    pub fn rank1(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.rank1_raw(x))
    }

    pub fn rank0(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(x - self.rank1_raw(x))
    }

    pub fn rank(&self, x: usize, bit: bool) -> Result<usize> {
        if bit {
            self.rank1(x)
        } else {
            self.rank0(x)
        }
    }

    pub fn select1(&self, i: usize) -> Result<usize> {
        self.select(i, true)
    }

    pub fn select0(&self, i: usize) -> Result<usize> {
        self.select(i, false)
    }

    pub fn select(&self, i: usize, bit: bool) -> Result<usize> {
        let count = if bit {
            self.count_ones()
        } else {
            self.count_zeros()
        };
        if i == 0 || i > count {
            return Err(Error::NotFound {
                symbol: bit as u8,
                index: i,
                count,
            });
        }
        Ok(self.select_raw(i, bit))
    }

    /// Counts of `bit` strictly before superblock `sb`.
    #[inline]
    fn sampled(&self, sb: usize, bit: bool) -> usize {
        let ones = self.superblocks[sb] as usize;
        if bit {
            ones
        } else {
            (sb * SUPERBLOCK_BITS).min(self.len) - ones
        }
    }

    pub(crate) fn select_raw(&self, i: usize, bit: bool) -> usize {
        // Last superblock whose preceding count is < i.
        let sbs = self.superblocks.len() - 1;
        let (mut lo, mut hi) = (0, sbs);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.sampled(mid, bit) < i {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = i - self.sampled(lo, bit);
        let mut word = lo * WORDS_PER_SUPERBLOCK;
        loop {
            let mut w = self.words[word];
            if !bit {
                w = !w;
                let valid = self.len - word * 64;
                if valid < 64 {
                    w &= (1u64 << valid) - 1;
                }
            }
            let c = w.count_ones() as usize;
            if c >= remaining {
                for _ in 1..remaining {
                    w &= w - 1;
                }
                return word * 64 + w.trailing_zeros() as usize + 1;
            }
            remaining -= c;
            word += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> BitSeq {
        BitSeq::from_bits(s.chars().map(|c| c == '1' || c == '('))
    }

    #[test]
    fn rank_examples() {
        let b = parse("101100");
        assert_eq!(b.rank(4, true).unwrap(), 3);
        assert_eq!(b.rank(6, false).unwrap(), 3);
        assert_eq!(b.rank0(6).unwrap() + b.rank1(6).unwrap(), 6);
    }

    #[test]
    fn select_examples() {
        let b = parse("101100");
        assert_eq!(b.select(2, false).unwrap(), 5);
        assert_eq!(b.select(1, true).unwrap(), 1);
        let dfuds = parse("((()()())((()))())");
        assert_eq!(dfuds.select0(1).unwrap(), 4);
    }

    #[test]
    fn errors_are_distinct() {
        let b = parse("101100");
        assert!(matches!(b.rank1(0), Err(Error::Range { .. })));
        assert!(matches!(b.rank1(7), Err(Error::Range { .. })));
        assert!(matches!(b.select1(4), Err(Error::NotFound { .. })));
        assert!(matches!(b.select0(0), Err(Error::NotFound { .. })));
    }

    #[test]
    fn crosses_superblocks() {
        let bits: Vec<bool> = (0..3000).map(|k| k % 3 == 0 || k % 7 == 0).collect();
        let b = BitSeq::from_bits(bits.iter().copied());
        let mut ones = 0;
        for (k, &bit) in bits.iter().enumerate() {
            ones += bit as usize;
            assert_eq!(b.rank1(k + 1).unwrap(), ones);
            if bit {
                assert_eq!(b.select1(ones).unwrap(), k + 1);
            } else {
                assert_eq!(b.select0(k + 1 - ones).unwrap(), k + 1);
            }
        }
    }

    #[test]
    fn from_words_rejects_garbage_tail() {
        assert!(BitSeq::from_words(vec![0b1000], 3).is_err());
        assert!(BitSeq::from_words(vec![0, 0], 64).is_err());
        let b = BitSeq::from_words(vec![0b101], 3).unwrap();
        assert_eq!(b.count_ones(), 2);
    }

    #[test]
    fn empty_sequence() {
        let b = BitSeq::from_bits(std::iter::empty());
        assert!(b.is_empty());
        assert!(b.rank1(1).is_err());
        assert!(b.select0(1).is_err());
    }
}
