//! Tree duality.
//!
//! The dual `T*` keeps the node set and root of `T` and exchanges
//! parent/sibling and left/right roles:
//!
//! * the rightmost child of the root stays the rightmost child of the root;
//! * the rightmost child `v` of a non-root `u` becomes the immediate left
//!   sibling of `u`;
//! * the immediate left sibling `v` of `u` becomes the rightmost child of `u`.
//!
//! Equivalently, the dual parent of a non-root `v` is the first node after
//! `T[v]` in depth-first order (or the root if there is none), and dual
//! siblings appear in decreasing primal DFT order. Both constructions are
//! provided; [`dual`] uses the rules and [`dual_by_first_right`] the
//! characterization.

use std::collections::HashSet;

use crate::error::{Error, Label, Result};
use crate::tree::{OrdinalTree, Relative};

/// Which dual rule attached a non-root node to its dual parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum DualRule {
    /// Rightmost child of the root: stays the root's rightmost child.
    RootRightmost,
    /// Rightmost child of a non-root `u`: becomes the left sibling of `u`.
    RightmostToSibling,
    /// Immediate left sibling of `u`: becomes the rightmost child of `u`.
    SiblingToRightmost,
}

#[derive(Debug, Clone)]
pub struct DualityCertificate {
    pub original: OrdinalTree,
    pub transformed: OrdinalTree,
    /// One entry per non-root node, in the original DFT order.
    pub rules: Vec<(Label, DualRule)>,
}

impl DualityCertificate {
    /// Re-checks every recorded rule against the two trees.
    pub fn check(&self) -> Result<()> {
        let t = &self.original;
        let d = &self.transformed;
        if t.root() != d.root() || t.len() != d.len() {
            return Err(Error::contract("dual must keep the root and node set"));
        }
        for &(v, rule) in &self.rules {
            let holds = match rule {
                DualRule::RootRightmost => {
                    t.parent(v)? == Some(t.root())
                        && t.navigate(t.root(), Relative::Rmc)? == Some(v)
                        && d.navigate(d.root(), Relative::Rmc)? == Some(v)
                }
                DualRule::RightmostToSibling => {
                    let u = t.parent(v)?.expect("non-root");
                    d.navigate(u, Relative::Ils)? == Some(v)
                }
                DualRule::SiblingToRightmost => {
                    let u = t.navigate(v, Relative::Irs)?.expect("has right sibling");
                    d.navigate(u, Relative::Rmc)? == Some(v)
                }
            };
            if !holds {
                return Err(Error::contract(format!("rule {rule:?} fails at node {v}")));
            }
        }
        Ok(())
    }
}

fn rule_of(t: &OrdinalTree, idx: usize) -> DualRule {
    if t.relative_idx(idx, Relative::Irs).is_some() {
        DualRule::SiblingToRightmost
    } else if t.parent_idx(idx) == Some(0) {
        DualRule::RootRightmost
    } else {
        DualRule::RightmostToSibling
    }
}

/// Dual tree built from the local rules, with a per-node rule trace.
pub fn dual_with_certificate(t: &OrdinalTree) -> DualityCertificate {
    let n = t.len();
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, list) in lists.iter_mut().enumerate() {
        // Rightmost dual child first, then walk left via primal rightmost children.
        let mut c = if u == 0 {
            t.relative_idx(0, Relative::Rmc)
        } else {
            t.relative_idx(u, Relative::Ils)
        };
        while let Some(v) = c {
            list.push(v);
            c = t.relative_idx(v, Relative::Rmc);
        }
        list.reverse();
    }
    let transformed = OrdinalTree::from_index_lists(t.labels(), 0, &lists);
    let rules = (1..n).map(|k| (t.label(k), rule_of(t, k))).collect();
    DualityCertificate {
        original: t.clone(),
        transformed,
        rules,
    }
}

pub fn dual(t: &OrdinalTree) -> OrdinalTree {
    dual_with_certificate(t).transformed
}

/// Dual tree from the first-right characterization of dual parents; dual
/// siblings are ordered by decreasing primal DFT rank.
pub fn dual_by_first_right(t: &OrdinalTree) -> OrdinalTree {
    let n = t.len();
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (1..n).rev() {
        let p = t.first_right_idx(v).unwrap_or(0);
        lists[p].push(v);
    }
    OrdinalTree::from_index_lists(t.labels(), 0, &lists)
}

/// Internal-index form of [`dual_parent`]: the root maps to index 0.
pub fn dual_parent_idx(t: &OrdinalTree, idx: usize) -> usize {
    debug_assert!(idx != 0);
    t.first_right_idx(idx).unwrap_or(0)
}

/// Parent of `v` in the dual tree, without building it.
pub fn dual_parent(t: &OrdinalTree, v: Label) -> Result<Label> {
    let idx = t.index_of(v)?;
    if idx == 0 {
        return Err(Error::contract("the root has no dual parent"));
    }
    Ok(t.label(dual_parent_idx(t, idx)))
}

pub fn reverse(t: &OrdinalTree) -> OrdinalTree {
    t.reversed()
}

/// The reversed dual, `reverse(dual(t))`. Its BP sequence equals the DFUDS
/// sequence of `t`.
pub fn hat(t: &OrdinalTree) -> OrdinalTree {
    dual(t).reversed()
}

/// `dual(reverse(t))`; differs from [`hat`] in general.
pub fn dual_of_reverse(t: &OrdinalTree) -> OrdinalTree {
    dual(&t.reversed())
}

/// Primal-dual ancestor by direct search: the DFT-greatest dual ancestor `x`
/// of `v1` with `v1 <= x <= v2`.
pub fn pda_definitional(t: &OrdinalTree, v1: Label, v2: Label) -> Result<Label> {
    let (a, b) = (t.index_of(v1)?, t.index_of(v2)?);
    Ok(t.label(pda_definitional_idx(t, a, b)?))
}

pub fn pda_definitional_idx(t: &OrdinalTree, a: usize, b: usize) -> Result<usize> {
    if a == 0 || b == 0 {
        return Err(Error::contract("pda is undefined for the root"));
    }
    if a > b {
        return Err(Error::contract(format!(
            "pda needs v1 <= v2 in DFT order (ranks {} > {})",
            a + 1,
            b + 1
        )));
    }
    // Dual ancestors of `a` strictly increase in primal DFT order until the root.
    let mut best = a;
    let mut x = a;
    loop {
        x = dual_parent_idx(t, x);
        if x == 0 || x > b {
            break;
        }
        best = x;
    }
    debug_assert!(t.is_ancestor_idx(best, b));
    Ok(best)
}

fn labels_disjoint(t1: &OrdinalTree, t2: &OrdinalTree) -> Result<()> {
    let seen: HashSet<Label> = t2.labels().iter().copied().collect();
    if let Some(&dup) = t1.labels()[1..].iter().find(|v| seen.contains(v)) {
        return Err(Error::contract(format!("label {dup} occurs in both trees")));
    }
    Ok(())
}

/// `t1 ↷ t2`: `t2` with the root children of `t1` (and their subtrees)
/// appended under the rightmost child of `t2`'s root, which must be a leaf.
/// The root of `t1` is dropped.
pub fn join(t1: &OrdinalTree, t2: &OrdinalTree) -> Result<OrdinalTree> {
    let c = t2
        .relative_idx(0, Relative::Rmc)
        .ok_or_else(|| Error::contract("right tree's root has no children"))?;
    if !t2.children_idx(c).is_empty() {
        return Err(Error::contract(format!(
            "rightmost root child {} of the right tree is not a leaf",
            t2.label(c)
        )));
    }
    labels_disjoint(t1, t2)?;
    // Concatenate label arrays: t2 indices first, then t1's non-root nodes.
    let n2 = t2.len();
    let mut labels = t2.labels().to_vec();
    labels.extend_from_slice(&t1.labels()[1..]);
    let mut lists: Vec<Vec<usize>> = (0..n2).map(|k| t2.children_idx(k).to_vec()).collect();
    let shift = |k: usize| k + n2 - 1;
    lists[c] = t1.children_idx(0).iter().map(|&k| shift(k)).collect();
    for k in 1..t1.len() {
        lists.push(t1.children_idx(k).iter().map(|&j| shift(j)).collect());
    }
    Ok(OrdinalTree::from_index_lists(&labels, 0, &lists))
}

/// Left-associative `t1 ↷ t2 ↷ ... ↷ tn`.
pub fn join_all(trees: &[OrdinalTree]) -> Result<OrdinalTree> {
    let (first, rest) = trees
        .split_first()
        .ok_or_else(|| Error::contract("join needs at least one tree"))?;
    rest.iter().try_fold(first.clone(), |acc, t| join(&acc, t))
}

/// New root `label` whose single child is the old root.
pub fn root_prepend(label: Label, t: &OrdinalTree) -> Result<OrdinalTree> {
    if t.contains(label) {
        return Err(Error::contract(format!(
            "label {label} already in the tree"
        )));
    }
    let mut labels = vec![label];
    labels.extend_from_slice(t.labels());
    let mut lists = vec![vec![1]];
    lists.extend((0..t.len()).map(|k| t.children_idx(k).iter().map(|&c| c + 1).collect()));
    Ok(OrdinalTree::from_index_lists(&labels, 0, &lists))
}

/// Whether `a` is a quasi-subtree of `t`: an induced subtree whose
/// immediate-left-sibling relations, and rightmost-child relations at
/// non-root nodes, all hold in `t` as well.
pub fn is_quasi_subtree(a: &OrdinalTree, t: &OrdinalTree) -> Result<bool> {
    let mut map = Vec::with_capacity(a.len());
    for &v in a.labels() {
        map.push(t.index_of(v).map_err(|_| {
            Error::contract(format!("node {v} of the candidate is not in the tree"))
        })?);
    }
    for k in 1..a.len() {
        // edges of `a` must be edges of `t`
        let p = a.parent_idx(k).unwrap();
        if t.parent_idx(map[k]) != Some(map[p]) {
            return Ok(false);
        }
        if let Some(s) = a.relative_idx(k, Relative::Ils) {
            if t.relative_idx(map[k], Relative::Ils) != Some(map[s]) {
                return Ok(false);
            }
        }
    }
    for k in 1..a.len() {
        if let Some(c) = a.relative_idx(k, Relative::Rmc) {
            if t.relative_idx(map[k], Relative::Rmc) != Some(map[c]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::{fix_t, l};

    fn tree(root: u32, lists: &[(u32, &[u32])]) -> OrdinalTree {
        OrdinalTree::from_children(
            l(root),
            lists
                .iter()
                .map(|(p, cs)| (l(*p), cs.iter().map(|&c| l(c)).collect())),
        )
        .unwrap()
    }

    fn fix_tstar() -> OrdinalTree {
        tree(0, &[(0, &[8, 7, 4]), (7, &[6]), (6, &[5]), (4, &[3, 2, 1])])
    }

    fn fix_hat() -> OrdinalTree {
        tree(0, &[(0, &[4, 7, 8]), (4, &[1, 2, 3]), (7, &[6]), (6, &[5])])
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&fix_t()), fix_tstar());
        assert_eq!(dual_by_first_right(&fix_t()), fix_tstar());
        let single = OrdinalTree::single(l(5));
        assert_eq!(dual(&single), single);
        // ROOT -> a -> b  gives ROOT: [b, a]
        let chain = tree(0, &[(0, &[1]), (1, &[2])]);
        assert_eq!(dual(&chain), tree(0, &[(0, &[2, 1])]));
    }

    #[test]
    fn certificate_traces_rules() {
        let cert = dual_with_certificate(&fix_t());
        cert.check().unwrap();
        let rule = |v| cert.rules.iter().find(|(x, _)| *x == l(v)).unwrap().1;
        assert_eq!(rule(4), DualRule::RootRightmost);
        assert_eq!(rule(1), DualRule::SiblingToRightmost);
        assert_eq!(rule(7), DualRule::RightmostToSibling);
        assert_eq!(cert.rules.len(), 8);
    }

    #[test]
    fn dual_parent_examples() {
        let t = fix_t();
        assert_eq!(dual_parent(&t, l(2)).unwrap(), l(4));
        assert_eq!(dual_parent(&t, l(8)).unwrap(), l(0));
        assert_eq!(dual_parent(&t, l(5)).unwrap(), l(6));
        assert!(dual_parent(&t, l(0)).is_err());
    }

    #[test]
    fn reverse_and_hat_examples() {
        assert_eq!(reverse(&fix_tstar()), fix_hat());
        let chain = tree(0, &[(0, &[1]), (1, &[2])]);
        assert_eq!(reverse(&chain), chain);
        assert_eq!(hat(&fix_t()), fix_hat());
        assert_eq!(hat(&chain), tree(0, &[(0, &[1, 2])]));
        let single = OrdinalTree::single(l(0));
        assert_eq!(hat(&single), single);
    }

    #[test]
    fn dual_of_reverse_examples() {
        // ROOT:[a, b] reversed is ROOT:[b, a]; its dual is ROOT -> a -> b.
        let fan = tree(0, &[(0, &[1, 2])]);
        assert_eq!(dual_of_reverse(&fan), tree(0, &[(0, &[1]), (1, &[2])]));
        let single = OrdinalTree::single(l(0));
        assert_eq!(dual_of_reverse(&single), single);
        let d = dual_of_reverse(&fix_t());
        assert_eq!(d.children(l(0)).unwrap(), vec![l(3), l(2), l(1)]);
    }

    #[test]
    fn reverse_then_dual_differs_from_dual_then_reverse() {
        // ROOT:[a, b], a:[c]
        let t = tree(0, &[(0, &[1, 2]), (1, &[3])]);
        assert_eq!(hat(&t), tree(0, &[(0, &[2]), (2, &[1, 3])]));
        assert_eq!(dual_of_reverse(&t), tree(0, &[(0, &[3, 1]), (1, &[2])]));
    }

    #[test]
    fn pda_definitional_examples() {
        let t = fix_t();
        assert_eq!(pda_definitional(&t, l(2), l(5)).unwrap(), l(4));
        assert_eq!(pda_definitional(&t, l(5), l(8)).unwrap(), l(7));
        for v in 1..=8 {
            assert_eq!(pda_definitional(&t, l(v), l(v)).unwrap(), l(v));
        }
        assert!(pda_definitional(&t, l(5), l(2)).is_err());
        assert!(pda_definitional(&t, l(0), l(2)).is_err());
    }

    #[test]
    fn join_examples() {
        let t2 = tree(10, &[(10, &[11])]);
        assert_eq!(join(&OrdinalTree::single(l(0)), &t2).unwrap(), t2);
        let t1 = tree(0, &[(0, &[1, 2])]);
        assert_eq!(
            join(&t1, &t2).unwrap(),
            tree(10, &[(10, &[11]), (11, &[1, 2])])
        );
        // right tree must end in a leaf
        assert!(join(&t1, &tree(10, &[(10, &[11]), (11, &[12])])).is_err());
        assert!(join(&t1, &OrdinalTree::single(l(10))).is_err());
        assert!(join(&t1, &tree(10, &[(10, &[1])])).is_err());
    }

    #[test]
    fn join_decomposes_two_subtrees() {
        // r:[A1, A2] with A1 = 1:[2], A2 = 3:[4, 5]
        let a1 = tree(1, &[(1, &[2])]);
        let a2 = tree(3, &[(3, &[4, 5])]);
        let whole = tree(0, &[(0, &[1, 3]), (1, &[2]), (3, &[4, 5])]);
        let left = dual(&root_prepend(l(0), &a1).unwrap());
        let right = dual(&root_prepend(l(0), &a2).unwrap());
        assert_eq!(join(&left, &right).unwrap(), dual(&whole));
    }

    #[test]
    fn root_prepend_examples() {
        let t = root_prepend(l(9), &OrdinalTree::single(l(1))).unwrap();
        assert_eq!(t, tree(9, &[(9, &[1])]));
        let d = dual(&root_prepend(l(9), &fix_t()).unwrap());
        let c = d.navigate(l(9), Relative::Rmc).unwrap().unwrap();
        assert_eq!(c, l(0));
        assert!(d.children(c).unwrap().is_empty());
        assert!(root_prepend(l(3), &fix_t()).is_err());
        // FIX_T without its second root subtree
        let first = tree(0, &[(0, &[1]), (1, &[2]), (2, &[3])]);
        assert_eq!(root_prepend(l(9), &first).unwrap().len(), 5);
    }

    #[test]
    fn quasi_subtree_examples() {
        let t = fix_t();
        assert!(is_quasi_subtree(&t, &t).unwrap());
        let sub = tree(4, &[(4, &[5, 6, 7]), (7, &[8])]);
        assert!(is_quasi_subtree(&sub, &t).unwrap());
        // 4:[5, 7] claims 5 = ils(7), but in t ils(7) = 6
        let bad = tree(4, &[(4, &[5, 7])]);
        assert!(!is_quasi_subtree(&bad, &t).unwrap());
        // dropping the root's rightmost subtree is allowed
        let left = tree(0, &[(0, &[1]), (1, &[2]), (2, &[3])]);
        assert!(is_quasi_subtree(&left, &t).unwrap());
        // turning a node into a leaf keeps every remaining relation
        let leafy = tree(0, &[(0, &[1, 4]), (1, &[2])]);
        assert!(is_quasi_subtree(&leafy, &t).unwrap());
        // keeping only a non-rightmost child of a non-root node does not
        let cut = tree(0, &[(0, &[4]), (4, &[5])]);
        assert!(!is_quasi_subtree(&cut, &t).unwrap());
        // an edge that skips a generation is not induced
        let skip = tree(1, &[(1, &[3])]);
        assert!(!is_quasi_subtree(&skip, &t).unwrap());
        assert!(is_quasi_subtree(&OrdinalTree::single(l(99)), &t).is_err());
    }
}
