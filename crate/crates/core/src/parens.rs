//! Balanced parenthesis sequences.
//!
//! `1` is an opening and `0` a closing parenthesis. On top of [`BitSeq`] this
//! keeps, per 64-bit block, the minimum excess and its leftmost/rightmost
//! position, plus sparse tables over those block minima. Range minimum over
//! the excess array, `open` and `close` all run as: partial scan of the
//! boundary blocks, then a sparse-table lookup (or binary search over it)
//! across the full blocks in between.

use std::fmt;

use crate::bitseq::BitSeq;
use crate::error::{Error, Result};

const BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tie {
    Leftmost,
    Rightmost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightSide {
    Open,
    Close,
}

/// Result of a weighted prefix select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BpSelected {
    /// Largest position whose weighted prefix stays within the budget (0 if none).
    pub position: usize,
    /// Number of weight-carrying parentheses inside that prefix.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Weights {
    positions: Vec<usize>,
    /// `prefix[k]` = sum of the first `k + 1` weights.
    prefix: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct BlockMin {
    value: i64,
    left: usize,
    right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParenSeq {
    bits: BitSeq,
    blocks: Vec<BlockMin>,
    /// `sparse_left[k][b]`: block with the leftmost minimum among blocks `b..b + 2^k`.
    sparse_left: Vec<Vec<u32>>,
    sparse_right: Vec<Vec<u32>>,
    open_weights: Option<Weights>,
    close_weights: Option<Weights>,
}

impl ParenSeq {
    pub fn from_bitseq(bits: BitSeq) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Parse {
                position: 0,
                reason: "empty parenthesis sequence".into(),
            });
        }
        let n = bits.len();
        let mut blocks = Vec::with_capacity(n.div_ceil(BLOCK));
        let mut excess = 0i64;
        for start in (1..=n).step_by(BLOCK) {
            let end = (start + BLOCK - 1).min(n);
            let mut m = BlockMin {
                value: i64::MAX,
                left: start,
                right: start,
            };
            for x in start..=end {
                excess += if bits.bit(x) { 1 } else { -1 };
                if excess < 0 {
                    return Err(Error::Parse {
                        position: x,
                        reason: "closing parenthesis without a partner".into(),
                    });
                }
                if excess < m.value {
                    m = BlockMin {
                        value: excess,
                        left: x,
                        right: x,
                    };
                } else if excess == m.value {
                    m.right = x;
                }
            }
            blocks.push(m);
        }
        if excess != 0 {
            return Err(Error::Parse {
                position: n,
                reason: format!("{excess} unclosed parenthesis(es)"),
            });
        }
        let sparse_left = build_sparse(&blocks, Tie::Leftmost);
        let sparse_right = build_sparse(&blocks, Tie::Rightmost);
        Ok(Self {
            bits,
            blocks,
            sparse_left,
            sparse_right,
            open_weights: None,
            close_weights: None,
        })
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Result<Self> {
        Self::from_bitseq(BitSeq::from_bits(bits))
    }

    /// Parses `(`/`)` characters; no whitespace is accepted.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (k, c) in s.chars().enumerate() {
            match c {
                '(' => bits.push(true),
                ')' => bits.push(false),
                other => {
                    return Err(Error::Parse {
                        position: k + 1,
                        reason: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        Self::from_bools(bits)
    }

    pub fn bits(&self) -> &BitSeq {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_open(&self, x: usize) -> Result<bool> {
        self.bits.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len()).map(|x| self.bits.bit(x))
    }

    /// Bits for the raw sequence, rank samples, and block-minimum tables.
    pub fn size_in_bits(&self) -> usize {
        let sparse: usize = self
            .sparse_left
            .iter()
            .chain(&self.sparse_right)
            .map(|level| level.len() * 32)
            .sum();
        self.bits.size_in_bits() + self.blocks.len() * 3 * 64 + sparse
    }

    pub fn rank0(&self, x: usize) -> Result<usize> {
        self.bits.rank0(x)
    }

    pub fn rank1(&self, x: usize) -> Result<usize> {
        self.bits.rank1(x)
    }

    pub fn select0(&self, i: usize) -> Result<usize> {
        self.bits.select0(i)
    }

    pub fn select1(&self, i: usize) -> Result<usize> {
        self.bits.select1(i)
    }

    fn check(&self, x: usize) -> Result<()> {
        if x == 0 || x > self.len() {
            Err(Error::Range {
                what: "position",
                value: x,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn excess_raw(&self, x: usize) -> i64 {
        2 * self.bits.rank1_raw(x) as i64 - x as i64
    }

    pub fn excess(&self, x: usize) -> Result<i64> {
        self.check(x)?;
        Ok(self.excess_raw(x))
    }

    /// Position of the opening parenthesis matching the closing one at `x`.
    pub fn open(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        if self.bits.bit(x) {
            return Err(Error::contract(format!(
                "open({x}) needs a closing parenthesis"
            )));
        }
        Ok(self.bwd_search(x, self.excess_raw(x)) + 1)
    }

    /// Position of the closing parenthesis matching the opening one at `x`.
    pub fn close(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        if !self.bits.bit(x) {
            return Err(Error::contract(format!(
                "close({x}) needs an opening parenthesis"
            )));
        }
        Ok(self.fwd_search(x, self.excess_raw(x) - 1))
    }

    /// Smallest `y > x` with `excess(y) <= target`; exists for balanced input
    /// whenever `target < excess(x)`.
    fn fwd_search(&self, x: usize, target: i64) -> usize {
        let n = self.len();
        let bx = (x - 1) / BLOCK;
        let block_end = ((bx + 1) * BLOCK).min(n);
        let mut e = self.excess_raw(x);
        for y in x + 1..=block_end {
            e += if self.bits.bit(y) { 1 } else { -1 };
            if e <= target {
                return y;
            }
        }
        // First block after bx whose minimum reaches the target.
        let nb = self.blocks.len();
        let (mut lo, mut hi) = (bx + 1, nb - 1);
        debug_assert!(lo <= hi, "balanced sequence guarantees a partner");
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.block_range_min(bx + 1, mid, Tie::Leftmost).0 <= target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let start = lo * BLOCK + 1;
        let mut e = self.excess_raw(start - 1);
        for y in start.. {
            e += if self.bits.bit(y) { 1 } else { -1 };
            if e <= target {
                return y;
            }
        }
        unreachable!()
    }

    /// Largest `z < x` with `excess(z) <= target`, where `excess(0) = 0`.
    fn bwd_search(&self, x: usize, target: i64) -> usize {
        let bx = (x - 1) / BLOCK;
        let block_start = bx * BLOCK + 1;
        let mut e = self.excess_raw(x);
        let mut z = x;
        while z > block_start {
            e -= if self.bits.bit(z) { 1 } else { -1 };
            z -= 1;
            if e <= target {
                return z;
            }
        }
        if bx == 0 {
            return 0;
        }
        if self.block_range_min(0, bx - 1, Tie::Leftmost).0 > target {
            return 0;
        }
        let (mut lo, mut hi) = (0, bx - 1);
        // Last block e with min over e..=bx-1 reaching the target.
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.block_range_min(mid, bx - 1, Tie::Leftmost).0 <= target {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let end = ((lo + 1) * BLOCK).min(self.len());
        self.scan_back_from(end, target)
    }

    /// Walks left from `z` (inclusive) to the first position with excess <= target.
    fn scan_back_from(&self, mut z: usize, target: i64) -> usize {
        let mut e = self.excess_raw(z);
        loop {
            if e <= target {
                return z;
            }
            e -= if self.bits.bit(z) { 1 } else { -1 };
            z -= 1;
            if z == 0 {
                return 0;
            }
        }
    }

    /// Minimum over whole blocks `first..=last`: (value, position).
    fn block_range_min(&self, first: usize, last: usize, tie: Tie) -> (i64, usize) {
        let table = match tie {
            Tie::Leftmost => &self.sparse_left,
            Tie::Rightmost => &self.sparse_right,
        };
        let span = last - first + 1;
        let k = usize::BITS as usize - 1 - span.leading_zeros() as usize;
        let a = &self.blocks[table[k][first] as usize];
        let b = &self.blocks[table[k][last + 1 - (1 << k)] as usize];
        let pick_b = match tie {
            Tie::Leftmost => b.value < a.value,
            Tie::Rightmost => b.value <= a.value,
        };
        let m = if pick_b { b } else { a };
        let pos = match tie {
            Tie::Leftmost => m.left,
            Tie::Rightmost => m.right,
        };
        (m.value, pos)
    }

    fn scan_min(&self, l: usize, r: usize, tie: Tie, best: &mut Option<(i64, usize)>) {
        let mut e = self.excess_raw(l);
        for x in l..=r {
            if x > l {
                e += if self.bits.bit(x) { 1 } else { -1 };
            }
            offer(best, (e, x), tie);
        }
    }

    /// Position of the minimum excess in `l..=r`, ties broken per `tie`.
    pub fn rmq_excess(&self, l: usize, r: usize, tie: Tie) -> Result<usize> {
        self.check(l)?;
        self.check(r)?;
        if l > r {
            return Err(Error::contract(format!(
                "rmq_excess range {l}..={r} is empty"
            )));
        }
        let (bl, br) = ((l - 1) / BLOCK, (r - 1) / BLOCK);
        let mut best = None;
        if bl == br {
            self.scan_min(l, r, tie, &mut best);
        } else {
            self.scan_min(l, (bl + 1) * BLOCK, tie, &mut best);
            if bl + 1 < br {
                offer(&mut best, self.block_range_min(bl + 1, br - 1, tie), tie);
            }
            self.scan_min(br * BLOCK + 1, r, tie, &mut best);
        }
        Ok(best.unwrap().1)
    }

    /// Attaches non-negative weights to parentheses of one symbol class.
    /// Positions must be strictly increasing and carry the side's symbol.
    pub fn with_weights<I>(mut self, side: WeightSide, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, u64)>,
    {
        let mut w = Weights::default();
        let mut acc = 0u64;
        for (pos, weight) in weights {
            self.check(pos)?;
            if w.positions.last().is_some_and(|&p| p >= pos) {
                return Err(Error::contract(format!(
                    "weight positions must increase strictly (at {pos})"
                )));
            }
            if self.bits.bit(pos) != (side == WeightSide::Open) {
                return Err(Error::contract(format!(
                    "position {pos} does not carry a {side:?} parenthesis"
                )));
            }
            acc = acc
                .checked_add(weight)
                .ok_or_else(|| Error::contract("weight total overflows u64"))?;
            w.positions.push(pos);
            w.prefix.push(acc);
        }
        match side {
            WeightSide::Open => self.open_weights = Some(w),
            WeightSide::Close => self.close_weights = Some(w),
        }
        Ok(self)
    }

    pub fn has_weights(&self, side: WeightSide) -> bool {
        self.weights(side).is_some()
    }

    fn weights(&self, side: WeightSide) -> Option<&Weights> {
        match side {
            WeightSide::Open => self.open_weights.as_ref(),
            WeightSide::Close => self.close_weights.as_ref(),
        }
    }

    /// Sum of `side` weights at positions `<= x` (`x = 0` gives 0).
    pub fn weight_prefix(&self, side: WeightSide, x: usize) -> Result<u64> {
        let w = self
            .weights(side)
            .ok_or_else(|| Error::contract(format!("no {side:?} weights attached")))?;
        let k = w.positions.partition_point(|&p| p <= x);
        Ok(if k == 0 { 0 } else { w.prefix[k - 1] })
    }

    /// Largest position whose `side`-weighted prefix sum is at most `budget`.
    pub fn bpselect(&self, side: WeightSide, budget: u64) -> Result<BpSelected> {
        let w = self
            .weights(side)
            .ok_or_else(|| Error::contract(format!("no {side:?} weights attached")))?;
        let count = w.prefix.partition_point(|&s| s <= budget);
        let position = if count == w.positions.len() {
            self.len()
        } else {
            w.positions[count] - 1
        };
        Ok(BpSelected { position, count })
    }
}

fn offer(best: &mut Option<(i64, usize)>, cand: (i64, usize), tie: Tie) {
    let replace = match *best {
        None => true,
        Some((v, _)) => match tie {
            Tie::Leftmost => cand.0 < v,
            Tie::Rightmost => cand.0 <= v,
        },
    };
    if replace {
        *best = Some(cand);
    }
}

fn build_sparse(blocks: &[BlockMin], tie: Tie) -> Vec<Vec<u32>> {
    let better = |a: u32, b: u32| -> u32 {
        let (va, vb) = (blocks[a as usize].value, blocks[b as usize].value);
        match tie {
            Tie::Leftmost if vb < va => b,
            Tie::Rightmost if vb <= va => b,
            _ => a,
        }
    };
    let mut levels = vec![(0..blocks.len() as u32).collect::<Vec<_>>()];
    let mut k = 1;
    while (1 << k) <= blocks.len() {
        let prev = &levels[k - 1];
        let half = 1 << (k - 1);
        let next = (0..=blocks.len() - (1 << k))
            .map(|b| better(prev[b], prev[b + half]))
            .collect();
        levels.push(next);
        k += 1;
    }
    levels
}

impl fmt::Display for ParenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '(' } else { ')' }).collect();
        f.write_str(&s)
    }
}

impl std::str::FromStr for ParenSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
