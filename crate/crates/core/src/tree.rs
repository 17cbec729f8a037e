//! Explicit rooted ordered trees.
//!
//! Nodes are stored in depth-first (preorder) order, so a node's internal
//! index is its DFT rank minus one and every subtree is a contiguous index
//! range. Two trees are equal when they have the same labels in the same
//! preorder with the same parents, i.e. same root, parent map and child
//! orders.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Label, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relative {
    Parent,
    /// Rightmost child.
    Rmc,
    /// Leftmost child.
    Lmc,
    /// Immediate left sibling.
    Ils,
    /// Immediate right sibling.
    Irs,
}

#[derive(Clone)]
pub struct OrdinalTree {
    labels: Vec<Label>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    /// Position of each node inside its parent's child list.
    sibling_index: Vec<usize>,
    depth: Vec<usize>,
    size: Vec<usize>,
    index: HashMap<Label, usize>,
}

impl PartialEq for OrdinalTree {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.parent == other.parent
    }
}

impl Eq for OrdinalTree {}

impl OrdinalTree {
    /// Validates and builds a tree from a parent map and per-node child orders.
    /// Nodes without children may be omitted from `child_orders`.
    pub fn build(
        parents: &HashMap<Label, Label>,
        child_orders: &HashMap<Label, Vec<Label>>,
    ) -> Result<Self> {
        let mut nodes: Vec<Label> = parents
            .iter()
            .flat_map(|(&c, &p)| [c, p])
            .chain(
                child_orders
                    .iter()
                    .flat_map(|(&p, cs)| std::iter::once(p).chain(cs.iter().copied())),
            )
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        nodes.sort_unstable();
        let roots: Vec<Label> = nodes
            .iter()
            .copied()
            .filter(|v| !parents.contains_key(v))
            .collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => {
                let node = nodes.first().copied().unwrap_or(Label(0));
                return Err(Error::InvalidTree {
                    node,
                    reason: "no root: every node has a parent".into(),
                });
            }
            [_, second, ..] => {
                return Err(Error::InvalidTree {
                    node: *second,
                    reason: format!("multiple roots ({} parentless nodes)", roots.len()),
                })
            }
        };
        let mut listed: HashMap<Label, Label> = HashMap::new();
        for (&p, cs) in child_orders {
            let mut seen = HashSet::new();
            for &c in cs {
                if !seen.insert(c) {
                    return Err(Error::InvalidTree {
                        node: p,
                        reason: format!("child {c} listed twice"),
                    });
                }
                if parents.get(&c) != Some(&p) {
                    return Err(Error::InvalidTree {
                        node: c,
                        reason: format!("listed as a child of {p} but its parent differs"),
                    });
                }
                listed.insert(c, p);
            }
        }
        for (&c, &p) in parents {
            if listed.get(&c) != Some(&p) {
                return Err(Error::InvalidTree {
                    node: c,
                    reason: format!("missing from the child order of its parent {p}"),
                });
            }
        }
        let tree = Self::from_child_lists(root, |v| {
            child_orders.get(&v).map(Vec::as_slice).unwrap_or(&[])
        });
        if tree.len() != nodes.len() {
            let reached: HashSet<Label> = tree.labels.iter().copied().collect();
            let node = nodes.into_iter().find(|v| !reached.contains(v)).unwrap();
            return Err(Error::InvalidTree {
                node,
                reason: "unreachable from the root (parent cycle)".into(),
            });
        }
        Ok(tree)
    }

    /// Builds from a root and `(node, children)` lists, validating the result.
    pub fn from_children<I>(root: Label, lists: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Label, Vec<Label>)>,
    {
        let child_orders: HashMap<Label, Vec<Label>> = lists.into_iter().collect();
        let mut parents = HashMap::new();
        for (&p, cs) in &child_orders {
            for &c in cs {
                if parents.insert(c, p).is_some() {
                    return Err(Error::InvalidTree {
                        node: c,
                        reason: "has more than one parent".into(),
                    });
                }
            }
        }
        if parents.contains_key(&root) {
            return Err(Error::InvalidTree {
                node: root,
                reason: "declared root has a parent".into(),
            });
        }
        if parents.is_empty() {
            if child_orders.keys().any(|&k| k != root) {
                return Err(Error::InvalidTree {
                    node: root,
                    reason: "nodes disconnected from the root".into(),
                });
            }
            return Ok(Self::single(root));
        }
        Self::build(&parents, &child_orders)
    }

    pub fn single(root: Label) -> Self {
        Self::from_child_lists(root, |_| &[])
    }

    /// Assembles a tree by preorder traversal from `root`. The caller guarantees
    /// the lists describe a tree (no node reachable twice).
    pub(crate) fn from_child_lists<'a, F>(root: Label, mut children_of: F) -> Self
    where
        F: FnMut(Label) -> &'a [Label],
    {
        let mut labels = Vec::new();
        let mut parent = Vec::new();
        let mut stack: Vec<(Label, Option<usize>)> = vec![(root, None)];
        let mut seen = HashSet::new();
        while let Some((v, p)) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            let idx = labels.len();
            labels.push(v);
            parent.push(p);
            for &c in children_of(v).iter().rev() {
                stack.push((c, Some(idx)));
            }
        }
        Self::from_preorder(labels, parent)
    }

    /// Preorder assembly over arbitrary node indices: `children[k]` lists the
    /// children of `labels[k]`. The lists must describe a tree rooted at `root`.
    pub(crate) fn from_index_lists(labels: &[Label], root: usize, children: &[Vec<usize>]) -> Self {
        let mut order = Vec::with_capacity(labels.len());
        let mut parent = Vec::with_capacity(labels.len());
        let mut stack: Vec<(usize, Option<usize>)> = vec![(root, None)];
        while let Some((v, p)) = stack.pop() {
            let idx = order.len();
            order.push(labels[v]);
            parent.push(p);
            for &c in children[v].iter().rev() {
                stack.push((c, Some(idx)));
            }
        }
        debug_assert_eq!(order.len(), labels.len());
        Self::from_preorder(order, parent)
    }

    /// `labels` in preorder with `parent[k] < k` for every non-root `k`.
    pub(crate) fn from_preorder(labels: Vec<Label>, parent: Vec<Option<usize>>) -> Self {
        let n = labels.len();
        let mut children = vec![Vec::new(); n];
        let mut sibling_index = vec![0; n];
        let mut depth = vec![0; n];
        for k in 1..n {
            let p = parent[k].expect("non-root node without parent");
            debug_assert!(p < k);
            sibling_index[k] = children[p].len();
            children[p].push(k);
            depth[k] = depth[p] + 1;
        }
        let mut size = vec![1; n];
        for k in (1..n).rev() {
            size[parent[k].unwrap()] += size[k];
        }
        let index = labels.iter().enumerate().map(|(k, &l)| (l, k)).collect();
        Self {
            labels,
            parent,
            children,
            sibling_index,
            depth,
            size,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> Label {
        self.labels[0]
    }

    /// Labels in DFT order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn contains(&self, v: Label) -> bool {
        self.index.contains_key(&v)
    }

    /// Internal index (DFT rank − 1) of `v`.
    pub fn index_of(&self, v: Label) -> Result<usize> {
        self.index
            .get(&v)
            .copied()
            .ok_or_else(|| Error::contract(format!("node {v} is not in the tree")))
    }

    /// 1-based depth-first rank; the root has rank 1.
    pub fn dft(&self, v: Label) -> Result<usize> {
        Ok(self.index_of(v)? + 1)
    }

    pub fn label(&self, idx: usize) -> Label {
        self.labels[idx]
    }

    pub fn parent_idx(&self, idx: usize) -> Option<usize> {
        self.parent[idx]
    }

    pub fn children_idx(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    pub fn depth_idx(&self, idx: usize) -> usize {
        self.depth[idx]
    }

    pub fn subtree_size_idx(&self, idx: usize) -> usize {
        self.size[idx]
    }

    /// Whether `a` is an ancestor of `b` (every node is its own ancestor).
    pub fn is_ancestor_idx(&self, a: usize, b: usize) -> bool {
        a <= b && b < a + self.size[a]
    }

    pub fn relative_idx(&self, idx: usize, kind: Relative) -> Option<usize> {
        match kind {
            Relative::Parent => self.parent[idx],
            Relative::Rmc => self.children[idx].last().copied(),
            Relative::Lmc => self.children[idx].first().copied(),
            Relative::Ils => {
                let p = self.parent[idx]?;
                let s = self.sibling_index[idx];
                (s > 0).then(|| self.children[p][s - 1])
            }
            Relative::Irs => {
                let p = self.parent[idx]?;
                self.children[p].get(self.sibling_index[idx] + 1).copied()
            }
        }
    }

    /// First node after `T[idx]` in DFT order, if any.
    pub fn first_right_idx(&self, idx: usize) -> Option<usize> {
        let next = idx + self.size[idx];
        (next < self.len()).then_some(next)
    }

    pub fn parent(&self, v: Label) -> Result<Option<Label>> {
        self.navigate(v, Relative::Parent)
    }

    pub fn children(&self, v: Label) -> Result<Vec<Label>> {
        let idx = self.index_of(v)?;
        Ok(self.children[idx].iter().map(|&c| self.labels[c]).collect())
    }

    pub fn depth(&self, v: Label) -> Result<usize> {
        Ok(self.depth[self.index_of(v)?])
    }

    pub fn navigate(&self, v: Label, kind: Relative) -> Result<Option<Label>> {
        let idx = self.index_of(v)?;
        Ok(self.relative_idx(idx, kind).map(|k| self.labels[k]))
    }

    /// Smallest node right of `v`'s subtree in DFT order.
    pub fn first_right(&self, v: Label) -> Result<Option<Label>> {
        let idx = self.index_of(v)?;
        if idx == 0 {
            return Err(Error::contract("first_right is undefined for the root"));
        }
        Ok(self.first_right_idx(idx).map(|k| self.labels[k]))
    }

    /// Labels of `T[v]` in DFT order.
    pub fn subtree(&self, v: Label) -> Result<Vec<Label>> {
        let idx = self.index_of(v)?;
        Ok(self.labels[idx..idx + self.size[idx]].to_vec())
    }

    /// Minimal depth over the DFT range `v1..=v2` and the DFT-greatest node
    /// attaining it.
    pub fn range_min_depth(&self, v1: Label, v2: Label) -> Result<(usize, Label)> {
        let (a, b) = (self.index_of(v1)?, self.index_of(v2)?);
        let (depth, idx) = self.range_min_depth_idx(a, b)?;
        Ok((depth, self.labels[idx]))
    }

    pub fn range_min_depth_idx(&self, a: usize, b: usize) -> Result<(usize, usize)> {
        if a == 0 || b == 0 {
            return Err(Error::contract("query ranges exclude the root"));
        }
        if a > b {
            return Err(Error::contract(format!(
                "range needs v1 <= v2 in DFT order (ranks {} > {})",
                a + 1,
                b + 1
            )));
        }
        let mut best = (usize::MAX, a);
        for k in a..=b {
            if self.depth[k] <= best.0 {
                best = (self.depth[k], k);
            }
        }
        Ok(best)
    }

    /// Same parent map with every child list reversed.
    pub fn reversed(&self) -> Self {
        let lists: Vec<Vec<usize>> = self
            .children
            .iter()
            .map(|cs| cs.iter().rev().copied().collect())
            .collect();
        Self::from_index_lists(&self.labels, 0, &lists)
    }

    /// Same shape with every label passed through `f`, which must be injective.
    pub fn relabel<F: FnMut(Label) -> Label>(&self, f: F) -> Result<Self> {
        let labels: Vec<Label> = self.labels.iter().copied().map(f).collect();
        let mut seen = HashSet::new();
        for (k, &l) in labels.iter().enumerate() {
            if !seen.insert(l) {
                return Err(Error::InvalidTree {
                    node: self.labels[k],
                    reason: format!("relabelled onto {l}, which is already taken"),
                });
            }
        }
        Ok(Self::from_preorder(labels, self.parent.clone()))
    }

    /// `(node, children)` for every node, in DFT order.
    pub fn child_lists(&self) -> Vec<(Label, Vec<Label>)> {
        (0..self.len())
            .map(|k| {
                (
                    self.labels[k],
                    self.children[k].iter().map(|&c| self.labels[c]).collect(),
                )
            })
            .collect()
    }
}

impl fmt::Debug for OrdinalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrdinalTree({self})")
    }
}

/// Nested form, e.g. `0(1(2(3)) 4(5 6 7(8)))`.
impl fmt::Display for OrdinalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for k in 0..self.len() {
            if k > 0 && self.sibling_index[k] > 0 {
                out.push(' ');
            }
            out.push_str(&self.labels[k].to_string());
            if !self.children[k].is_empty() {
                out.push('(');
            } else {
                // close every ancestor whose subtree ends here
                let mut v = k;
                while let Some(p) = self.parent[v] {
                    if self.children[p].last() != Some(&v) {
                        break;
                    }
                    out.push(')');
                    v = p;
                }
            }
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn l(x: u32) -> Label {
        Label(x)
    }

    /// Min-heap tree of `[2, 7, 8, 1, 6, 4, 3, 5]`; the root is label 0.
    pub(crate) fn fix_t() -> OrdinalTree {
        OrdinalTree::from_children(
            l(0),
            [
                (l(0), vec![l(1), l(4)]),
                (l(1), vec![l(2)]),
                (l(2), vec![l(3)]),
                (l(4), vec![l(5), l(6), l(7)]),
                (l(7), vec![l(8)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn build_fixture_orders_nodes_depth_first() {
        let t = fix_t();
        let order: Vec<u32> = t.labels().iter().map(|x| x.0).collect();
        assert_eq!(order, (0..=8).collect::<Vec<_>>());
        assert_eq!(t.depth(l(3)).unwrap(), 3);
        assert_eq!(t.to_string(), "0(1(2(3)) 4(5 6 7(8)))");
    }

    #[test]
    fn build_from_maps() {
        let parents: HashMap<_, _> = [
            (1, 0),
            (2, 1),
            (3, 2),
            (4, 0),
            (5, 4),
            (6, 4),
            (7, 4),
            (8, 7),
        ]
        .into_iter()
        .map(|(c, p)| (l(c), l(p)))
        .collect();
        let orders: HashMap<_, _> = [
            (l(0), vec![l(1), l(4)]),
            (l(1), vec![l(2)]),
            (l(2), vec![l(3)]),
            (l(4), vec![l(5), l(6), l(7)]),
            (l(7), vec![l(8)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(OrdinalTree::build(&parents, &orders).unwrap(), fix_t());
    }

    #[test]
    fn single_node() {
        let t = OrdinalTree::single(l(42));
        assert_eq!(t.len(), 1);
        assert_eq!(t.depth(l(42)).unwrap(), 0);
        assert_eq!(OrdinalTree::from_children(l(42), []).unwrap(), t);
    }

    #[test]
    fn rejects_malformed_input() {
        let parents: HashMap<_, _> = [(l(1), l(2)), (l(2), l(1))].into_iter().collect();
        let orders: HashMap<_, _> = [(l(1), vec![l(2)]), (l(2), vec![l(1)])]
            .into_iter()
            .collect();
        assert!(matches!(
            OrdinalTree::build(&parents, &orders),
            Err(Error::InvalidTree { .. })
        ));

        // cycle hanging off a valid root
        let parents: HashMap<_, _> = [(l(1), l(0)), (l(2), l(3)), (l(3), l(2))]
            .into_iter()
            .collect();
        let orders: HashMap<_, _> = [(l(0), vec![l(1)]), (l(2), vec![l(3)]), (l(3), vec![l(2)])]
            .into_iter()
            .collect();
        let err = OrdinalTree::build(&parents, &orders).unwrap_err();
        assert!(matches!(err, Error::InvalidTree { node, .. } if node == l(2) || node == l(3)));

        // two roots
        let parents: HashMap<_, _> = [(l(1), l(0)), (l(3), l(2))].into_iter().collect();
        let orders: HashMap<_, _> = [(l(0), vec![l(1)]), (l(2), vec![l(3)])]
            .into_iter()
            .collect();
        assert!(OrdinalTree::build(&parents, &orders).is_err());

        // order lists a child whose parent differs
        let parents: HashMap<_, _> = [(l(1), l(0)), (l(2), l(1))].into_iter().collect();
        let orders: HashMap<_, _> = [(l(0), vec![l(1), l(2)]), (l(1), vec![l(2)])]
            .into_iter()
            .collect();
        let err = OrdinalTree::build(&parents, &orders).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidTree {
                node: l(2),
                reason: "listed as a child of 0 but its parent differs".into()
            }
        );

        // duplicate child
        assert!(OrdinalTree::from_children(l(0), [(l(0), vec![l(1), l(1)])]).is_err());
        // child missing from its parent's order
        let parents: HashMap<_, _> = [(l(1), l(0))].into_iter().collect();
        assert!(OrdinalTree::build(&parents, &HashMap::new()).is_err());
    }

    #[test]
    fn navigation_examples() {
        let t = fix_t();
        assert_eq!(t.navigate(l(4), Relative::Rmc).unwrap(), Some(l(7)));
        assert_eq!(t.navigate(l(5), Relative::Ils).unwrap(), None);
        assert_eq!(t.navigate(l(0), Relative::Parent).unwrap(), None);
        assert_eq!(t.navigate(l(6), Relative::Irs).unwrap(), Some(l(7)));
        assert_eq!(t.navigate(l(4), Relative::Lmc).unwrap(), Some(l(5)));
        assert_eq!(t.navigate(l(0), Relative::Ils).unwrap(), None);
        assert!(t.navigate(l(99), Relative::Parent).is_err());
    }

    #[test]
    fn first_right_examples() {
        let t = fix_t();
        assert_eq!(t.first_right(l(2)).unwrap(), Some(l(4)));
        assert_eq!(t.first_right(l(8)).unwrap(), None);
        assert_eq!(t.first_right(l(5)).unwrap(), Some(l(6)));
        assert!(t.first_right(l(0)).is_err());
    }

    #[test]
    fn range_min_depth_examples() {
        let t = fix_t();
        assert_eq!(t.range_min_depth(l(2), l(5)).unwrap(), (1, l(4)));
        assert_eq!(t.range_min_depth(l(5), l(8)).unwrap(), (2, l(7)));
        for v in 1..=8 {
            let d = t.depth(l(v)).unwrap();
            assert_eq!(t.range_min_depth(l(v), l(v)).unwrap(), (d, l(v)));
        }
        assert!(t.range_min_depth(l(5), l(2)).is_err());
        assert!(t.range_min_depth(l(0), l(2)).is_err());
    }

    #[test]
    fn reversal_keeps_parents() {
        let t = fix_t();
        let r = t.reversed();
        assert_eq!(r.to_string(), "0(4(7(8) 6 5) 1(2(3)))");
        assert_eq!(r.reversed(), t);
        for v in t.labels() {
            assert_eq!(t.parent(*v).unwrap(), r.parent(*v).unwrap());
        }
    }
}
