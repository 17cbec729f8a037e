//! Seeded random inputs: trees, arrays, interval families, quasi-subtrees.
//!
//! Every generator draws from a caller-supplied [`ChaCha8Rng`], so a seed
//! fixes the whole corpus. [`item_rng`] derives an independent stream per
//! (suite, item) pair, which keeps results identical however the items are
//! spread over threads.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Label;
use crate::tree::OrdinalTree;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for item `item` of the suite tagged `suite`.
pub fn item_rng(seed: u64, suite: u32, item: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(((suite as u64) << 40) | item as u64);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeShape {
    /// Each node picks a uniformly random earlier node as parent.
    Recursive,
    /// Parents drawn from the most recent few nodes: deep, path-like trees.
    Deep,
    /// Parents drawn from the first few nodes: wide, shallow trees.
    Wide,
    /// Each node is a child of the previous one with probability 1/2, else of
    /// a random earlier node.
    Mixed,
}

impl TreeShape {
    pub const ALL: [TreeShape; 4] = [
        TreeShape::Recursive,
        TreeShape::Deep,
        TreeShape::Wide,
        TreeShape::Mixed,
    ];
}

/// Random tree with `n >= 1` nodes of the given shape. Children are inserted
/// at random positions among their siblings and labels are a random
/// injection into `0..4n`.
pub fn random_tree_shaped(rng: &mut ChaCha8Rng, n: usize, shape: TreeShape) -> OrdinalTree {
    assert!(n >= 1, "a tree has at least one node");
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for k in 1..n {
        let p = match shape {
            TreeShape::Recursive => rng.gen_range(0..k),
            TreeShape::Deep => k - 1 - rng.gen_range(0..k.min(3)),
            TreeShape::Wide => rng.gen_range(0..k.min(3)),
            TreeShape::Mixed => {
                if rng.gen_bool(0.5) {
                    k - 1
                } else {
                    rng.gen_range(0..k)
                }
            }
        };
        let at = rng.gen_range(0..=children[p].len());
        children[p].insert(at, k);
    }
    let mut pool: Vec<u32> = (0..4 * n as u32).collect();
    pool.shuffle(rng);
    let labels: Vec<Label> = pool[..n].iter().map(|&x| Label(x)).collect();
    OrdinalTree::from_index_lists(&labels, 0, &children)
}

/// Random tree with a size in `min_size..=max_size` and a random shape.
pub fn random_tree(rng: &mut ChaCha8Rng, min_size: usize, max_size: usize) -> OrdinalTree {
    let n = rng.gen_range(min_size..=max_size);
    let shape = *TreeShape::ALL.choose(rng).unwrap();
    random_tree_shaped(rng, n, shape)
}

/// Random array of length `n`. With `distinct` the values are a shuffled
/// strictly increasing sequence; otherwise they come from a small range so
/// that ties are frequent.
pub fn random_array(rng: &mut ChaCha8Rng, n: usize, distinct: bool) -> Vec<i64> {
    if distinct {
        let mut v = Vec::with_capacity(n);
        let mut x: i64 = rng.gen_range(-1000..1000);
        for _ in 0..n {
            x += rng.gen_range(1..5);
            v.push(x);
        }
        v.shuffle(rng);
        v
    } else {
        let top = (n as i64 / 4).max(1);
        (0..n).map(|_| rng.gen_range(-top..=top)).collect()
    }
}

/// Interval family with both endpoint sequences strictly increasing; the
/// gaps between consecutive starts are drawn from `1..=16`.
pub fn random_intervals(rng: &mut ChaCha8Rng, n: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(n);
    let mut a: u64 = rng.gen_range(0..16);
    let mut prev_b: Option<u64> = None;
    for _ in 0..n {
        let len = rng.gen_range(0..48);
        let b = match prev_b {
            Some(pb) => (a + len).max(pb + rng.gen_range(1..=16)),
            None => a + len,
        };
        out.push((a, b));
        prev_b = Some(b);
        a += rng.gen_range(1..=16);
    }
    out
}

/// A random quasi-subtree of `t`: the subtree of a random node `v`, keeping
/// a random contiguous run of `v`'s children, with some internal nodes
/// turned into leaves. Non-root nodes keep all or none of their children.
pub fn random_quasi_subtree(rng: &mut ChaCha8Rng, t: &OrdinalTree) -> OrdinalTree {
    let v = rng.gen_range(0..t.len());
    let kids = t.children_idx(v);
    let (lo, hi) = if kids.is_empty() {
        (0, 0)
    } else {
        let lo = rng.gen_range(0..kids.len());
        (lo, rng.gen_range(lo..=kids.len()))
    };
    let prune = rng.gen_range(0.0..0.3);
    // Collect nodes of the candidate by walking T[v] with the cut applied.
    let mut labels = vec![t.label(v)];
    let mut lists: Vec<Vec<usize>> = vec![Vec::new()];
    let mut stack: Vec<(usize, usize)> = kids[lo..hi].iter().rev().map(|&c| (c, 0)).collect();
    while let Some((x, parent_local)) = stack.pop() {
        let local = labels.len();
        labels.push(t.label(x));
        lists.push(Vec::new());
        lists[parent_local].push(local);
        if !rng.gen_bool(prune) {
            for &c in t.children_idx(x).iter().rev() {
                stack.push((c, local));
            }
        }
    }
    OrdinalTree::from_index_lists(&labels, 0, &lists)
}

/// Pieces for the root decomposition: a root label and `k >= 1` random trees
/// over labels disjoint from each other and from the root.
pub fn random_root_decomposition(
    rng: &mut ChaCha8Rng,
    k: usize,
    max_size: usize,
) -> (Label, Vec<OrdinalTree>) {
    let root = Label(0);
    let mut next = 1u32;
    let mut parts = Vec::with_capacity(k);
    for _ in 0..k {
        let t = random_tree(rng, 1, max_size);
        let base = next;
        let relabelled = t
            .relabel(|l| Label(base + l.0))
            .expect("shift is injective");
        next += 4 * t.len() as u32;
        parts.push(relabelled);
    }
    (root, parts)
}

/// The tree with root `root` whose subtrees are `parts`, left to right.
pub fn attach_under_root(root: Label, parts: &[OrdinalTree]) -> OrdinalTree {
    let mut labels = vec![root];
    let mut lists: Vec<Vec<usize>> = vec![Vec::new()];
    for part in parts {
        let off = labels.len();
        lists[0].push(off);
        labels.extend_from_slice(part.labels());
        for k in 0..part.len() {
            lists.push(part.children_idx(k).iter().map(|&c| c + off).collect());
        }
    }
    OrdinalTree::from_index_lists(&labels, 0, &lists)
}
