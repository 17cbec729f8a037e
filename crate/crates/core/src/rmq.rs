//! Range minimum queries over a 2D-Min-Heap.
//!
//! Every engine answers with the leftmost position of the minimum of
//! `A[i..=j]`. The three succinct engines share the single DFUDS sequence
//! stored in [`MinHeapIndex`], which carries the same bits as BP of the hat
//! tree. All excess range-minimum calls take the leftmost minimum.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::codec::dfuds_bits;
use crate::error::{Error, Label, Result};
use crate::minheap::MinHeapIndex;
use crate::parens::{ParenSeq, Tie};
use crate::tree::OrdinalTree;

/// Primitive operations spent by a query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounters {
    pub rank: u64,
    pub select: u64,
    pub rmq_excess: u64,
    pub open: u64,
    pub close: u64,
    pub bpselect: u64,
    pub pda: u64,
}

impl OpCounters {
    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn add(&mut self, other: &OpCounters) {
        self.rank += other.rank;
        self.select += other.select;
        self.rmq_excess += other.rmq_excess;
        self.open += other.open;
        self.close += other.close;
        self.bpselect += other.bpselect;
        self.pda += other.pda;
    }
}

/// A parenthesis sequence whose primitive calls are tallied.
pub(crate) struct Counted<'a> {
    seq: &'a ParenSeq,
    ops: &'a mut OpCounters,
}

impl<'a> Counted<'a> {
    pub(crate) fn new(seq: &'a ParenSeq, ops: &'a mut OpCounters) -> Self {
        Self { seq, ops }
    }

    pub(crate) fn rank0(&mut self, x: usize) -> Result<usize> {
        self.ops.rank += 1;
        self.seq.rank0(x)
    }

    pub(crate) fn select0(&mut self, i: usize) -> Result<usize> {
        self.ops.select += 1;
        self.seq.select0(i)
    }

    pub(crate) fn rmq(&mut self, l: usize, r: usize) -> Result<usize> {
        self.ops.rmq_excess += 1;
        self.seq.rmq_excess(l, r, Tie::Leftmost)
    }

    pub(crate) fn open(&mut self, x: usize) -> Result<usize> {
        self.ops.open += 1;
        self.seq.open(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RmqEngineKind {
    FhDfuds,
    FnBp,
    PdaEngine,
    Naive,
}

impl RmqEngineKind {
    pub const ALL: [RmqEngineKind; 4] = [
        RmqEngineKind::FhDfuds,
        RmqEngineKind::FnBp,
        RmqEngineKind::PdaEngine,
        RmqEngineKind::Naive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RmqEngineKind::FhDfuds => "fh",
            RmqEngineKind::FnBp => "fn",
            RmqEngineKind::PdaEngine => "pda",
            RmqEngineKind::Naive => "naive",
        }
    }

    pub fn query<T: Ord>(
        self,
        h: &MinHeapIndex<T>,
        i: usize,
        j: usize,
        ops: &mut OpCounters,
    ) -> Result<usize> {
        match self {
            RmqEngineKind::FhDfuds => rmq_fh(h, i, j, ops),
            RmqEngineKind::FnBp => rmq_fn(h, i, j, ops),
            RmqEngineKind::PdaEngine => rmq_pda(h, i, j, ops),
            RmqEngineKind::Naive => rmq_naive(h, i, j),
        }
    }
}

impl fmt::Display for RmqEngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RmqEngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RmqEngineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::contract(format!("unknown rmq engine {s:?}")))
    }
}

fn check_range<T>(h: &MinHeapIndex<T>, i: usize, j: usize) -> Result<()> {
    h.check_position(i)?;
    h.check_position(j)?;
    if i > j {
        return Err(Error::contract(format!("range start {i} exceeds end {j}")));
    }
    Ok(())
}

/// Query on DFUDS: the minimum lies at `i` exactly when the range minimum
/// after `i`'s own parenthesis closes a child opened in `i`'s block.
pub fn rmq_fh<T>(h: &MinHeapIndex<T>, i: usize, j: usize, ops: &mut OpCounters) -> Result<usize> {
    check_range(h, i, j)?;
    if i == j {
        return Ok(i);
    }
    let mut p = Counted::new(h.dfuds(), ops);
    let l = p.select0(i + 1)?;
    let r = p.select0(j)?;
    let w1 = p.rmq(l, r)?;
    let o = p.open(w1)?;
    if p.rank0(o)? == i {
        Ok(i)
    } else {
        p.rank0(w1)
    }
}

/// Query on BP of the hat tree (the same bits as the stored DFUDS).
pub fn rmq_fn<T>(h: &MinHeapIndex<T>, i: usize, j: usize, ops: &mut OpCounters) -> Result<usize> {
    check_range(h, i, j)?;
    let mut p = Counted::new(h.dfuds(), ops);
    let l = p.select0(i)?;
    let r = p.select0(j)?;
    let w2 = p.rmq(l, r)?;
    p.rank0(w2)
}

/// Maps the positions to their nodes, takes the primal-dual ancestor, maps back.
pub fn rmq_pda<T>(h: &MinHeapIndex<T>, i: usize, j: usize, ops: &mut OpCounters) -> Result<usize> {
    check_range(h, i, j)?;
    // Position m is the node of DFT rank m + 1.
    Ok(pda_fast(h.dfuds(), i + 1, j + 1, ops)? - 1)
}

/// Linear scan; the oracle for the other engines.
pub fn rmq_naive<T: Ord>(h: &MinHeapIndex<T>, i: usize, j: usize) -> Result<usize> {
    check_range(h, i, j)?;
    let values = h.values();
    let mut best = i;
    for m in i + 1..=j {
        if values[m - 1] < values[best - 1] {
            best = m;
        }
    }
    Ok(best)
}

/// Primal-dual ancestor on the DFUDS of any tree, by DFT rank (root = 1).
/// Requires `2 <= r1 <= r2 <= node count`; returns a DFT rank.
pub fn pda_fast(dfuds: &ParenSeq, r1: usize, r2: usize, ops: &mut OpCounters) -> Result<usize> {
    let nodes = dfuds.len() / 2;
    if r1 < 2 || r2 > nodes {
        return Err(Error::contract(format!(
            "pda needs non-root nodes, got DFT ranks {r1} and {r2} of {nodes}"
        )));
    }
    if r1 > r2 {
        return Err(Error::contract(format!(
            "pda needs DFT order, got ranks {r1} > {r2}"
        )));
    }
    ops.pda += 1;
    let mut p = Counted::new(dfuds, ops);
    let l = p.select0(r1 - 1)?;
    let r = p.select0(r2 - 1)?;
    let w = p.rmq(l, r)?;
    Ok(p.rank0(w)? + 1)
}

/// An arbitrary tree prepared for [`pda_fast`] queries by label.
#[derive(Debug, Clone)]
pub struct PdaIndex {
    tree: OrdinalTree,
    dfuds: ParenSeq,
}

impl PdaIndex {
    pub fn new(tree: OrdinalTree) -> Self {
        let dfuds = ParenSeq::from_bools(dfuds_bits(&tree)).expect("DFUDS of a tree is balanced");
        Self { tree, dfuds }
    }

    pub fn tree(&self) -> &OrdinalTree {
        &self.tree
    }

    pub fn dfuds(&self) -> &ParenSeq {
        &self.dfuds
    }

    pub fn pda(&self, v1: Label, v2: Label, ops: &mut OpCounters) -> Result<Label> {
        let r1 = self.tree.dft(v1)?;
        let r2 = self.tree.dft(v2)?;
        let r = pda_fast(&self.dfuds, r1, r2, ops)?;
        Ok(self.tree.label(r - 1))
    }
}

/// Both sides of the equivalence behind the DFUDS query, for `i < j`:
/// (i) the excess at `select_0(i)` is a lower bound over
/// `[select_0(i+1), select_0(j)]`; (ii) the leftmost minimum there closes a
/// parenthesis opened in block `i`.
pub fn fh_condition_pair(dfuds: &ParenSeq, i: usize, j: usize) -> Result<(bool, bool)> {
    if i >= j {
        return Err(Error::contract(
            "the equivalence concerns ranges with i < j",
        ));
    }
    let base = dfuds.excess(dfuds.select0(i)?)?;
    let l = dfuds.select0(i + 1)?;
    let r = dfuds.select0(j)?;
    let mut lower_bound = true;
    for x in l..=r {
        if dfuds.excess(x)? < base {
            lower_bound = false;
            break;
        }
    }
    let w = dfuds.rmq_excess(l, r, Tie::Leftmost)?;
    let opened_in_block = dfuds.rank0(dfuds.open(w)?)? == i;
    Ok((lower_bound, opened_in_block))
}
