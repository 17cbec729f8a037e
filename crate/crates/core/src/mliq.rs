//! Minimum-length interval queries.
//!
//! Given intervals `(a_i, b_i)` with both endpoint sequences strictly
//! increasing, a query `(a, b)` asks for the shortest interval containing
//! `[a, b]` (leftmost on ties). The qualifying indices always form a range
//! `[i_min, i_max]`, so the answer is an RMQ over the lengths `L`.
//!
//! Two solvers locate the range. [`mliq_naive`] ranks `a` and `b` in
//! endpoint bitmaps and runs the BP-side RMQ. [`mliq_weighted`] runs one
//! weighted select on `BP(T[L])` (opening parentheses carry the gaps of `a`)
//! and one on `BP(reverse(T[L]))` (closing parentheses carry the gaps of `b`,
//! read from the right), then takes the primal-dual ancestor of the two
//! boundary nodes.

use serde::Serialize;

use crate::bitseq::BitSeq;
use crate::codec::{bp_encode, mirror};
use crate::error::{Error, Label, Result};
use crate::minheap::{build_minheap, MinHeapIndex};
use crate::parens::{ParenSeq, WeightSide};
use crate::rmq::{pda_fast, rmq_fn, OpCounters};

/// Which intervals count as containing a query `(a, b)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    /// `a_i <= a` and `b <= b_i`.
    #[default]
    Closed,
    /// `a_i < a` and `b < b_i`.
    Strict,
}

impl Containment {
    pub fn contains(self, (ai, bi): (u64, u64), a: u64, b: u64) -> bool {
        match self {
            Containment::Closed => ai <= a && b <= bi,
            Containment::Strict => ai < a && b < bi,
        }
    }
}

/// Sorted endpoint values with counting by rank.
#[derive(Debug, Clone)]
enum EndpointSet {
    /// Value `v` is bit `v + 1`.
    Dense(BitSeq),
    Sparse(Vec<u64>),
}

impl EndpointSet {
    fn new(values: &[u64]) -> Self {
        let n = values.len() as u64;
        let top = *values.last().expect("non-empty");
        if top <= 32 * n + 1024 {
            let mut bits = vec![false; top as usize + 1];
            for &v in values {
                bits[v as usize] = true;
            }
            EndpointSet::Dense(BitSeq::from_bits(bits))
        } else {
            EndpointSet::Sparse(values.to_vec())
        }
    }

    /// Number of endpoints strictly below `x`.
    fn count_below(&self, x: u64) -> usize {
        match self {
            EndpointSet::Dense(bits) => {
                let x = x.min(bits.len() as u64) as usize;
                if x == 0 {
                    0
                } else {
                    bits.rank1_raw(x)
                }
            }
            EndpointSet::Sparse(values) => values.partition_point(|&v| v < x),
        }
    }

    fn size_in_bits(&self) -> usize {
        match self {
            EndpointSet::Dense(bits) => bits.size_in_bits(),
            EndpointSet::Sparse(values) => values.len() * 64,
        }
    }

    fn is_dense(&self) -> bool {
        matches!(self, EndpointSet::Dense(_))
    }
}

#[derive(Debug, Clone)]
pub struct IntervalSet {
    a: Vec<u64>,
    b: Vec<u64>,
    heap: MinHeapIndex<u64>,
    a_set: EndpointSet,
    b_set: EndpointSet,
    /// `BP(T[L])` with open-side weights.
    t_a: ParenSeq,
    /// `BP(reverse(T[L]))` with close-side weights.
    t_b: ParenSeq,
}

/// Sizes of the stored structures, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpaceReport {
    pub intervals: usize,
    pub endpoint_bitmaps: usize,
    pub dense_bitmaps: bool,
    pub heap_dfuds: usize,
    pub weighted_parens: usize,
}

/// Boundary values computed by [`mliq_weighted_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeightedTrace {
    /// Position selected on `T_a`.
    pub w: usize,
    /// Position selected on `T_b`, mapped into `T_a` by `2n + 3 - q`.
    pub v: usize,
    pub i_min: usize,
    pub i_max: usize,
    pub answer: Option<usize>,
}

pub fn build_intervals(pairs: &[(u64, u64)]) -> Result<IntervalSet> {
    IntervalSet::new(pairs)
}

impl IntervalSet {
    pub fn new(pairs: &[(u64, u64)]) -> Result<Self> {
        let invalid = |index: usize, reason: String| Err(Error::Validation { index, reason });
        if pairs.is_empty() {
            return invalid(0, "no intervals".into());
        }
        for (k, &(ai, bi)) in pairs.iter().enumerate() {
            let i = k + 1;
            if ai > bi {
                return invalid(i, format!("start {ai} exceeds end {bi}"));
            }
            if bi == u64::MAX {
                return invalid(i, "end must stay below 2^64 - 1".into());
            }
            if k > 0 {
                let (ap, bp) = pairs[k - 1];
                if ai <= ap {
                    return invalid(i, format!("start {ai} does not exceed previous start {ap}"));
                }
                if bi <= bp {
                    return invalid(i, format!("end {bi} does not exceed previous end {bp}"));
                }
            }
        }
        let a: Vec<u64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<u64> = pairs.iter().map(|p| p.1).collect();
        let n = a.len();
        let lengths: Vec<u64> = pairs.iter().map(|&(ai, bi)| bi - ai + 1).collect();
        let heap = build_minheap(&lengths)?;

        let (bp_a, map_a) = bp_encode(heap.tree());
        let open_weights = (1..=n).map(|i| {
            let prev = if i == 1 { 0 } else { a[i - 2] };
            (map_a.open[i], a[i - 1] - prev)
        });
        let t_a = bp_a.with_weights(WeightSide::Open, open_weights)?;

        let reversed = heap.tree().reversed();
        let (bp_b, map_b) = bp_encode(&reversed);
        if bp_b != mirror(&t_a) {
            return Err(Error::contract(
                "BP of the reversed heap is not the mirror image",
            ));
        }
        // The k-th closing parenthesis of T_b belongs to node n + 1 - k.
        let sentinel = b[n - 1] + 1;
        let mut close_weights = Vec::with_capacity(n);
        for k in 1..=n {
            let p = n + 1 - k;
            let next = if p == n { sentinel } else { b[p] };
            let pos = map_b.close[reversed.index_of(Label(p as u32))?];
            close_weights.push((pos, next - b[p - 1]));
        }
        let t_b = bp_b.with_weights(WeightSide::Close, close_weights)?;

        let set = Self {
            a_set: EndpointSet::new(&a),
            b_set: EndpointSet::new(&b),
            a,
            b,
            heap,
            t_a,
            t_b,
        };
        set.check_weights(&map_a.open)?;
        Ok(set)
    }

    #[allow(clippy::needless_range_loop)]
    fn check_weights(&self, opens: &[usize]) -> Result<()> {
        let n = self.len();
        for i in 1..=n {
            if self.t_a.weight_prefix(WeightSide::Open, opens[i])? != self.a[i - 1] {
                return Err(Error::contract(format!(
                    "open-side prefix sum wrong at node {i}"
                )));
            }
            let k = n + 1 - i;
            let pos = self.t_b.select0(k)?;
            if self.b_sentinel() - self.t_b.weight_prefix(WeightSide::Close, pos)? != self.b[i - 1]
            {
                return Err(Error::contract(format!(
                    "close-side prefix sum wrong at node {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `(a_i, b_i)` for `1 <= i <= n`.
    pub fn interval(&self, i: usize) -> (u64, u64) {
        (self.a[i - 1], self.b[i - 1])
    }

    pub fn intervals(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.a.iter().copied().zip(self.b.iter().copied())
    }

    pub fn lengths(&self) -> &[u64] {
        self.heap.values()
    }

    pub fn heap(&self) -> &MinHeapIndex<u64> {
        &self.heap
    }

    pub fn t_a(&self) -> &ParenSeq {
        &self.t_a
    }

    pub fn t_b(&self) -> &ParenSeq {
        &self.t_b
    }

    /// `b_n + 1`, the end sentinel behind the close-side weights.
    pub fn b_sentinel(&self) -> u64 {
        self.b[self.len() - 1] + 1
    }

    pub fn space(&self) -> SpaceReport {
        SpaceReport {
            intervals: self.len() * 128,
            endpoint_bitmaps: self.a_set.size_in_bits() + self.b_set.size_in_bits(),
            dense_bitmaps: self.a_set.is_dense() && self.b_set.is_dense(),
            heap_dfuds: self.heap.dfuds().size_in_bits(),
            weighted_parens: self.t_a.size_in_bits() + self.t_b.size_in_bits(),
        }
    }
}

fn check_query(a: u64, b: u64) -> Result<()> {
    if a > b {
        return Err(Error::contract(format!("query start {a} exceeds end {b}")));
    }
    Ok(())
}

/// Endpoint ranks, then RMQ over the lengths.
pub fn mliq_naive(
    s: &IntervalSet,
    a: u64,
    b: u64,
    conv: Containment,
    ops: &mut OpCounters,
) -> Result<Option<usize>> {
    check_query(a, b)?;
    ops.rank += 2;
    let (i_max, i_min) = match conv {
        Containment::Closed => (
            s.a_set.count_below(a.saturating_add(1)),
            s.b_set.count_below(b) + 1,
        ),
        Containment::Strict => (
            s.a_set.count_below(a),
            s.b_set.count_below(b.saturating_add(1)) + 1,
        ),
    };
    if i_max < i_min {
        return Ok(None);
    }
    rmq_fn(&s.heap, i_min, i_max, ops).map(Some)
}

/// Two weighted selects, then one primal-dual ancestor query.
pub fn mliq_weighted(
    s: &IntervalSet,
    a: u64,
    b: u64,
    conv: Containment,
    ops: &mut OpCounters,
) -> Result<Option<usize>> {
    mliq_weighted_trace(s, a, b, conv, ops).map(|t| t.answer)
}

pub fn mliq_weighted_trace(
    s: &IntervalSet,
    a: u64,
    b: u64,
    conv: Containment,
    ops: &mut OpCounters,
) -> Result<WeightedTrace> {
    check_query(a, b)?;
    let n = s.len();
    let (budget_a, budget_b) = match conv {
        Containment::Closed => (Some(a), s.b_sentinel().checked_sub(b)),
        Containment::Strict => (
            a.checked_sub(1),
            s.b_sentinel().checked_sub(b).and_then(|x| x.checked_sub(1)),
        ),
    };
    // A missing budget means nothing qualifies on that side.
    ops.bpselect += 2;
    let (w, i_max) = match budget_a {
        Some(budget) => {
            let sel = s.t_a.bpselect(WeightSide::Open, budget)?;
            (sel.position, sel.count)
        }
        None => (0, 0),
    };
    let (q, count_b) = match budget_b {
        Some(budget) => {
            let sel = s.t_b.bpselect(WeightSide::Close, budget)?;
            (sel.position, sel.count)
        }
        None => (0, 0),
    };
    let v = 2 * n + 3 - q;
    let i_min = n + 1 - count_b;
    let answer = if i_min > i_max {
        None
    } else {
        // Interval i is the node of DFT rank i + 1 in T[L].
        Some(pda_fast(s.heap.dfuds(), i_min + 1, i_max + 1, ops)? - 1)
    };
    Ok(WeightedTrace {
        w,
        v,
        i_min,
        i_max,
        answer,
    })
}

/// Scan of every interval; the oracle.
pub fn mliq_bruteforce(
    s: &IntervalSet,
    a: u64,
    b: u64,
    conv: Containment,
) -> Result<Option<usize>> {
    check_query(a, b)?;
    let mut best: Option<(u64, usize)> = None;
    for (k, iv) in s.intervals().enumerate() {
        if conv.contains(iv, a, b) {
            let len = iv.1 - iv.0 + 1;
            if best.is_none_or(|(l, _)| len < l) {
                best = Some((len, k + 1));
            }
        }
    }
    Ok(best.map(|(_, i)| i))
}
