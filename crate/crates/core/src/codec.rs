//! BP and DFUDS encodings.
//!
//! BP writes `(` on entering a node and `)` on leaving it. DFUDS writes, per
//! node in DFT order, one `(` per child followed by a `)`, after a leading
//! `(`. In DFUDS a non-root node is identified with the closing parenthesis
//! that precedes its children's block, so the `i`-th `)` is the node of DFT
//! rank `i + 1`; the root is identified with the leading `(`.
//!
//! Decoders label nodes by DFT rank minus one, so the root is `0`.

use std::collections::HashSet;

use crate::error::{Error, Label, Result};
use crate::parens::ParenSeq;
use crate::tree::OrdinalTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Bp,
    Dfuds,
}

/// Per-node parenthesis positions, indexed by DFT rank − 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeParenMap {
    pub encoding: Encoding,
    pub labels: Vec<Label>,
    /// Opening parenthesis of each node.
    pub open: Vec<usize>,
    /// Closing parenthesis matched with `open`.
    pub close: Vec<usize>,
}

impl NodeParenMap {
    /// The parenthesis a node is identified with: `open` in BP; the
    /// designated `)` in DFUDS (leading `(` for the root).
    pub fn anchor(&self, dft_index: usize) -> usize {
        match self.encoding {
            Encoding::Bp => self.open[dft_index],
            Encoding::Dfuds if dft_index == 0 => 1,
            Encoding::Dfuds => self.close[dft_index],
        }
    }
}

pub fn bp_bits(t: &OrdinalTree) -> Vec<bool> {
    bp_with_map(t).0
}

fn bp_with_map(t: &OrdinalTree) -> (Vec<bool>, Vec<usize>, Vec<usize>) {
    let n = t.len();
    let mut bits = Vec::with_capacity(2 * n);
    let mut open = vec![0; n];
    let mut close = vec![0; n];
    // (node, entered)
    let mut stack = vec![(0usize, false)];
    while let Some((v, entered)) = stack.pop() {
        if entered {
            bits.push(false);
            close[v] = bits.len();
        } else {
            bits.push(true);
            open[v] = bits.len();
            stack.push((v, true));
            for &c in t.children_idx(v).iter().rev() {
                stack.push((c, false));
            }
        }
    }
    (bits, open, close)
}

pub fn bp_encode(t: &OrdinalTree) -> (ParenSeq, NodeParenMap) {
    let (bits, open, close) = bp_with_map(t);
    let seq = ParenSeq::from_bools(bits).expect("BP of a tree is balanced");
    let map = NodeParenMap {
        encoding: Encoding::Bp,
        labels: t.labels().to_vec(),
        open,
        close,
    };
    (seq, map)
}

pub fn dfuds_bits(t: &OrdinalTree) -> Vec<bool> {
    let mut bits = Vec::with_capacity(2 * t.len());
    bits.push(true);
    for v in 0..t.len() {
        bits.extend(std::iter::repeat_n(true, t.children_idx(v).len()));
        bits.push(false);
    }
    bits
}

pub fn dfuds_encode(t: &OrdinalTree) -> (ParenSeq, NodeParenMap) {
    let n = t.len();
    let seq = ParenSeq::from_bools(dfuds_bits(t)).expect("DFUDS of a tree is balanced");
    let mut open = vec![1; n];
    let mut close = vec![2 * n; n];
    for k in 1..n {
        close[k] = seq.select0(k).expect("one close per node");
        open[k] = seq.open(close[k]).expect("balanced");
    }
    let map = NodeParenMap {
        encoding: Encoding::Dfuds,
        labels: t.labels().to_vec(),
        open,
        close,
    };
    (seq, map)
}

pub fn bp_decode(p: &ParenSeq) -> Result<OrdinalTree> {
    let n = p.len() / 2;
    let mut parent = Vec::with_capacity(n);
    let mut stack: Vec<usize> = Vec::new();
    for (k, open) in p.iter().enumerate() {
        if open {
            if parent.len() == 1 && stack.is_empty() {
                return Err(Error::Parse {
                    position: k + 1,
                    reason: "second root: BP must be a single enclosing pair".into(),
                });
            }
            parent.push(stack.last().copied());
            stack.push(parent.len() - 1);
        } else {
            stack.pop();
        }
    }
    let labels = (0..parent.len() as u32).map(Label).collect();
    Ok(OrdinalTree::from_preorder(labels, parent))
}

pub fn dfuds_decode(p: &ParenSeq) -> Result<OrdinalTree> {
    let bits: Vec<bool> = p.iter().collect();
    if !bits[0] {
        return Err(Error::Parse {
            position: 1,
            reason: "DFUDS must start with the extra opening parenthesis".into(),
        });
    }
    let mut parent: Vec<Option<usize>> = Vec::new();
    // (node, children still to be placed)
    let mut pending: Vec<(usize, usize)> = Vec::new();
    let mut x = 1;
    while x < bits.len() {
        let node = parent.len();
        if node == 0 {
            parent.push(None);
        } else {
            let top = pending.last_mut().ok_or_else(|| Error::Parse {
                position: x + 1,
                reason: "node without a parent slot".into(),
            })?;
            parent.push(Some(top.0));
            top.1 -= 1;
            if top.1 == 0 {
                pending.pop();
            }
        }
        let mut degree = 0;
        while x < bits.len() && bits[x] {
            degree += 1;
            x += 1;
        }
        if x == bits.len() {
            return Err(Error::Parse {
                position: x,
                reason: "degree block not terminated".into(),
            });
        }
        x += 1; // the block's `)`
        if degree > 0 {
            pending.push((node, degree));
        }
    }
    if !pending.is_empty() {
        return Err(Error::Parse {
            position: bits.len(),
            reason: "announced children never appear".into(),
        });
    }
    let labels = (0..parent.len() as u32).map(Label).collect();
    Ok(OrdinalTree::from_preorder(labels, parent))
}

/// Reverse the sequence and flip every symbol.
pub fn mirror(p: &ParenSeq) -> ParenSeq {
    let bits: Vec<bool> = p.iter().collect();
    ParenSeq::from_bools(bits.into_iter().rev().map(|b| !b)).expect("mirror keeps balance")
}

/// [`mirror`] on an arbitrary (possibly unbalanced) parenthesis string.
pub fn mirror_str(s: &str) -> String {
    s.chars()
        .rev()
        .map(|c| match c {
            '(' => ')',
            ')' => '(',
            other => other,
        })
        .collect()
}

/// Tree text format: the BP string on the first line and, optionally, the
/// node labels in DFT order on the second line (space separated).
pub fn format_tree_text(t: &OrdinalTree) -> String {
    let labels: Vec<String> = t.labels().iter().map(|l| l.to_string()).collect();
    format!("{}\n{}\n", bp_encode(t).0, labels.join(" "))
}

pub fn parse_tree_text(text: &str) -> Result<OrdinalTree> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let bp_line = lines.next().ok_or_else(|| Error::Parse {
        position: 0,
        reason: "missing BP line".into(),
    })?;
    let shape = bp_decode(&ParenSeq::parse(bp_line.trim())?)?;
    let Some(label_line) = lines.next() else {
        return Ok(shape);
    };
    let mut labels = Vec::with_capacity(shape.len());
    let mut seen = HashSet::new();
    for (k, tok) in label_line.split_whitespace().enumerate() {
        let v: u32 = tok.parse().map_err(|_| Error::Parse {
            position: k + 1,
            reason: format!("label {tok:?} is not a non-negative integer"),
        })?;
        if !seen.insert(v) {
            return Err(Error::Parse {
                position: k + 1,
                reason: format!("label {v} repeated"),
            });
        }
        labels.push(Label(v));
    }
    if labels.len() != shape.len() {
        return Err(Error::Parse {
            position: labels.len(),
            reason: format!("{} labels for {} nodes", labels.len(), shape.len()),
        });
    }
    if lines.next().is_some() {
        return Err(Error::Parse {
            position: 0,
            reason: "unexpected third line".into(),
        });
    }
    let parent = (0..shape.len()).map(|k| shape.parent_idx(k)).collect();
    Ok(OrdinalTree::from_preorder(labels, parent))
}
