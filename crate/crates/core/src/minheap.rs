//! 2D-Min-Heaps.
//!
//! `T[A]` has a sentinel root (label `0`) and one node per array position
//! (label `m` for position `m`). Position `m` is attached as the rightmost
//! child of the rightmost earlier position `k` with `A[k] <= A[m]`, or of the
//! root when there is none. DFT order then coincides with array order, so the
//! node of position `m` has DFT rank `m + 1`.

use crate::codec::dfuds_bits;
use crate::duality::dual;
use crate::error::{Error, Label, Result};
use crate::parens::ParenSeq;
use crate::tree::OrdinalTree;

#[derive(Debug, Clone)]
pub struct MinHeapIndex<T> {
    values: Vec<T>,
    tree: OrdinalTree,
    /// DFUDS of the tree; the same bits as BP of its hat tree.
    dfuds: ParenSeq,
}

impl<T: Ord + Clone> MinHeapIndex<T> {
    pub fn build(values: &[T]) -> Result<Self> {
        build_minheap(values)
    }
}

impl<T> MinHeapIndex<T> {
    /// Number of array positions.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `A[m]` for `1 <= m <= n`.
    pub fn value(&self, m: usize) -> Result<&T> {
        self.check_position(m)?;
        Ok(&self.values[m - 1])
    }

    pub fn tree(&self) -> &OrdinalTree {
        &self.tree
    }

    pub fn dfuds(&self) -> &ParenSeq {
        &self.dfuds
    }

    pub fn node_of(&self, m: usize) -> Result<Label> {
        self.check_position(m)?;
        Ok(Label(m as u32))
    }

    /// Array position of a node; `None` for the sentinel root.
    pub fn position_of(&self, v: Label) -> Result<Option<usize>> {
        self.tree.index_of(v)?;
        Ok((v.0 != 0).then_some(v.0 as usize))
    }

    pub(crate) fn check_position(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.values.len() {
            return Err(Error::Range {
                what: "array position",
                value: m,
                len: self.values.len(),
            });
        }
        Ok(())
    }
}

pub fn build_minheap<T: Ord + Clone>(values: &[T]) -> Result<MinHeapIndex<T>> {
    if values.is_empty() {
        return Err(Error::contract("a min-heap needs at least one value"));
    }
    let n = values.len();
    let mut children = vec![Vec::new(); n + 1];
    // Rightmost spine of the tree built so far, as positions.
    let mut spine: Vec<usize> = Vec::new();
    for m in 1..=n {
        while let Some(&k) = spine.last() {
            if values[k - 1] <= values[m - 1] {
                break;
            }
            spine.pop();
        }
        children[spine.last().copied().unwrap_or(0)].push(m);
        spine.push(m);
    }
    let labels: Vec<Label> = (0..=n as u32).map(Label).collect();
    let tree = OrdinalTree::from_index_lists(&labels, 0, &children);
    let dfuds = ParenSeq::from_bools(dfuds_bits(&tree)).expect("DFUDS of a tree is balanced");
    Ok(MinHeapIndex {
        values: values.to_vec(),
        tree,
        dfuds,
    })
}

/// Whether `dual(T[A])` equals `T[reverse(A)]` once position `i` of the
/// reversed array is identified with position `n + 1 - i`.
pub fn reversal_dual_check<T: Ord + Clone>(values: &[T]) -> Result<bool> {
    let mut sorted = values.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::contract("values must be pairwise distinct"));
    }
    let n = values.len() as u32;
    let forward = dual(build_minheap(values)?.tree());
    let reversed: Vec<T> = values.iter().rev().cloned().collect();
    let backward =
        build_minheap(&reversed)?
            .tree()
            .relabel(|l| if l.0 == 0 { l } else { Label(n + 1 - l.0) })?;
    Ok(forward == backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::fix_t;

    const FIX_A: [i64; 8] = [2, 7, 8, 1, 6, 4, 3, 5];

    #[test]
    fn fixture_array_builds_fixture_tree() {
        let h = build_minheap(&FIX_A).unwrap();
        assert_eq!(h.tree(), &fix_t());
        assert_eq!(h.dfuds().to_string(), "((()()())((()))())");
    }

    #[test]
    fn monotone_arrays() {
        let up = build_minheap(&[1, 2, 3]).unwrap();
        assert_eq!(up.tree().to_string(), "0(1(2(3)))");
        let down = build_minheap(&[3, 2, 1]).unwrap();
        assert_eq!(down.tree().to_string(), "0(1 2 3)");
    }

    #[test]
    fn ties_attach_to_the_earlier_equal_value() {
        let h = build_minheap(&[5, 5, 5]).unwrap();
        assert_eq!(h.tree().to_string(), "0(1(2(3)))");
    }

    #[test]
    fn empty_array_is_rejected() {
        assert!(matches!(build_minheap::<i64>(&[]), Err(Error::Contract(_))));
    }

    #[test]
    fn dft_order_is_array_order() {
        let h = build_minheap(&[4, 1, 3, 3, 0, 2, 9, 1]).unwrap();
        for m in 1..=h.len() {
            assert_eq!(h.tree().dft(h.node_of(m).unwrap()).unwrap(), m + 1);
        }
        assert_eq!(h.position_of(Label(0)).unwrap(), None);
        assert!(h.node_of(9).is_err());
    }

    #[test]
    fn reversal_duality() {
        assert!(reversal_dual_check(&FIX_A).unwrap());
        assert!(reversal_dual_check(&[1]).unwrap());
        assert!(reversal_dual_check(&[3, 1, 2]).unwrap());
        assert!(matches!(
            reversal_dual_check(&[1, 2, 1]),
            Err(Error::Contract(_))
        ));
    }
}
