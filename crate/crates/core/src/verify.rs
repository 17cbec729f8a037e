//! Randomized verification suites.
//!
//! Each suite draws its inputs from [`item_rng`] streams keyed by
//! (seed, suite, item), runs the items on worker threads, and merges the
//! per-item tallies in item order, so a report depends only on the config.
//! Reports carry pass/fail counts per named check and the first failing
//! instance of each check.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codec::{
    bp_decode, bp_encode, dfuds_decode, dfuds_encode, format_tree_text, mirror, parse_tree_text,
};
use crate::duality::{
    dual, dual_by_first_right, dual_of_reverse, dual_parent_idx, dual_with_certificate, hat,
    is_quasi_subtree, join_all, pda_definitional_idx, root_prepend,
};
use crate::error::{Error, Label, Result};
use crate::gen::{
    attach_under_root, item_rng, random_array, random_intervals, random_quasi_subtree,
    random_root_decomposition, random_tree,
};
use crate::minheap::{build_minheap, reversal_dual_check, MinHeapIndex};
use crate::mliq::{
    build_intervals, mliq_bruteforce, mliq_naive, mliq_weighted, mliq_weighted_trace, Containment,
};
use crate::parens::{ParenSeq, Tie};
use crate::rmq::{rmq_fh, rmq_fn, rmq_naive, rmq_pda, OpCounters, PdaIndex};
use crate::tree::{OrdinalTree, Relative};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Rmq,
    Pda,
    Mliq,
    Join,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Identities,
        Suite::Rmq,
        Suite::Pda,
        Suite::Mliq,
        Suite::Join,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Rmq => "rmq",
            Suite::Pda => "pda",
            Suite::Mliq => "mliq",
            Suite::Join => "join",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Corpus sizes. The defaults are the full acceptance sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random trees for the identity checks.
    pub trees: usize,
    pub max_tree_size: usize,
    /// Random arrays for the min-heap checks.
    pub heap_arrays: usize,
    pub max_heap_len: usize,
    pub rmq_arrays: usize,
    pub max_array_len: usize,
    /// Range queries per array.
    pub rmq_queries: usize,
    pub pda_trees: usize,
    /// Node pairs per tree.
    pub pda_pairs: usize,
    pub interval_families: usize,
    pub max_intervals: usize,
    /// Queries per family.
    pub mliq_queries: usize,
    /// Instances of each join check.
    pub join_cases: usize,
    /// Worker threads; does not affect the report.
    #[serde(skip)]
    pub threads: usize,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            trees: 1000,
            max_tree_size: 200,
            heap_arrays: 200,
            max_heap_len: 300,
            rmq_arrays: 300,
            max_array_len: 2000,
            rmq_queries: 10_000,
            pda_trees: 500,
            pda_pairs: 100,
            interval_families: 200,
            max_intervals: 500,
            mliq_queries: 10_000,
            join_cases: 300,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    /// Sets the number of random structures in every suite.
    pub fn with_structures(mut self, count: usize) -> Self {
        self.trees = count;
        self.heap_arrays = count;
        self.rmq_arrays = count;
        self.pda_trees = count;
        self.interval_families = count;
        self.join_cases = count;
        self
    }

    /// Sets the number of queries per structure in every suite.
    pub fn with_queries(mut self, count: usize) -> Self {
        self.rmq_queries = count;
        self.pda_pairs = count;
        self.mliq_queries = count;
        self
    }

    /// Caps the size of every random structure.
    pub fn with_max_size(mut self, size: usize) -> Self {
        let size = size.max(2);
        self.max_tree_size = size;
        self.max_heap_len = size;
        self.max_array_len = size;
        self.max_intervals = size;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: u64,
    pub failed: u64,
    /// First failing instance, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }

    pub fn check(&self, suite: &str, name: &str) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| c.suite == suite && c.name == name)
    }

    pub fn suite_ok(&self, suite: Suite) -> bool {
        self.checks
            .iter()
            .filter(|c| c.suite == suite.name())
            .all(|c| c.failed == 0)
    }
}

/// Named pass/fail counters with a fixed check order.
#[derive(Debug, Clone)]
struct Tally {
    checks: Vec<Check>,
}

impl Tally {
    fn new(suite: Suite, names: &[&'static str]) -> Self {
        let checks = names
            .iter()
            .map(|&name| Check {
                suite: suite.name(),
                name,
                passed: 0,
                failed: 0,
                example: None,
            })
            .collect();
        Self { checks }
    }

    fn slot(&mut self, name: &str) -> &mut Check {
        self.checks
            .iter_mut()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("undeclared check {name}"))
    }

    fn record(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        let c = self.slot(name);
        if ok {
            c.passed += 1;
        } else {
            c.failed += 1;
            if c.example.is_none() {
                c.example = Some(detail());
            }
        }
    }

    /// Records a check that produced an error instead of a verdict.
    fn record_result(&mut self, name: &str, r: Result<bool>, detail: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(name, ok, detail),
            Err(e) => self.record(name, false, || format!("{}: {e}", detail())),
        }
    }

    fn merge(&mut self, other: Tally) {
        for (mine, theirs) in self.checks.iter_mut().zip(other.checks) {
            mine.passed += theirs.passed;
            mine.failed += theirs.failed;
            if mine.example.is_none() {
                mine.example = theirs.example;
            }
        }
    }
}

/// Runs `f` on items `0..count` across `threads` workers and merges the
/// tallies in item order.
fn run_items<F>(count: usize, threads: usize, empty: &Tally, f: F) -> Tally
where
    F: Fn(usize) -> Tally + Sync,
{
    let workers = threads.clamp(1, count.max(1));
    let mut results: Vec<(usize, Tally)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                s.spawn(move || {
                    (w..count)
                        .step_by(workers)
                        .map(|k| (k, f(k)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("verification worker panicked"))
            .collect()
    });
    results.sort_by_key(|r| r.0);
    let mut total = empty.clone();
    for (_, t) in results {
        total.merge(t);
    }
    total
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Report {
    Report {
        config: cfg.clone(),
        checks: run_suite(suite, cfg).checks,
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Report {
    let checks = Suite::ALL
        .into_iter()
        .flat_map(|s| run_suite(s, cfg).checks)
        .collect();
    Report {
        config: cfg.clone(),
        checks,
    }
}

fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Tally {
    match suite {
        Suite::Identities => identities(cfg),
        Suite::Rmq => rmq_suite(cfg),
        Suite::Pda => pda_suite(cfg),
        Suite::Mliq => mliq_suite(cfg),
        Suite::Join => join_suite(cfg),
    }
}

// Stream tags; one per input family.
const TAG_TREES: u32 = 1;
const TAG_HEAPS: u32 = 2;
const TAG_RMQ: u32 = 3;
const TAG_PDA: u32 = 4;
const TAG_MLIQ: u32 = 5;
const TAG_JOIN: u32 = 6;

/// Relabels by DFT rank − 1, the labelling produced by the decoders.
pub fn shape_of(t: &OrdinalTree) -> OrdinalTree {
    let parent = (0..t.len()).map(|k| t.parent_idx(k)).collect::<Vec<_>>();
    let mut lists = vec![Vec::new(); t.len()];
    for (k, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            lists[*p].push(k);
        }
    }
    let labels: Vec<Label> = (0..t.len() as u32).map(Label).collect();
    OrdinalTree::from_index_lists(&labels, 0, &lists)
}

/// BP string by direct recursion over the child lists.
pub fn bp_reference(t: &OrdinalTree) -> String {
    fn emit(t: &OrdinalTree, k: usize, out: &mut String) {
        out.push('(');
        for &c in t.children_idx(k) {
            emit(t, c, out);
        }
        out.push(')');
    }
    let mut s = String::with_capacity(2 * t.len());
    emit(t, 0, &mut s);
    s
}

/// DFUDS string by direct recursion over the child lists.
pub fn dfuds_reference(t: &OrdinalTree) -> String {
    fn emit(t: &OrdinalTree, k: usize, out: &mut String) {
        let kids = t.children_idx(k);
        out.extend(std::iter::repeat_n('(', kids.len()));
        out.push(')');
        for &c in kids {
            emit(t, c, out);
        }
    }
    let mut s = String::from("(");
    emit(t, 0, &mut s);
    s
}

const IDENTITY_CHECKS: &[&str] = &[
    "dual_involution",
    "dual_rules_eq_first_right",
    "dual_rule_certificate",
    "dual_parent_is_first_right",
    "dual_order_reversal",
    "dual_parent_monotone_on_ancestors",
    "subtree_inside_dual_subtree",
    "left_sibling_subtree_inside_dual_subtree",
    "depth_range_hits_dual_parent",
    "right_set_relations",
    "depth_range_split",
    "navigate_consistent",
    "reverse_keeps_parents",
    "bp_eq_mirror_of_dual_dfuds",
    "bp_of_reverse_eq_mirror",
    "dfuds_eq_bp_of_hat",
    "encoders_match_reference",
    "bp_round_trip",
    "dfuds_round_trip",
    "tree_text_round_trip",
    "bp_nesting",
    "dfuds_close_is_select",
    "sibling_excess_step",
    "rightmost_child_excess_equal",
    "worked_example",
    "heap_reversal_duality",
    "heap_dft_order",
    "heap_property",
];

fn identities(cfg: &VerifyConfig) -> Tally {
    let empty = Tally::new(Suite::Identities, IDENTITY_CHECKS);
    let mut total = empty.clone();
    worked_example(&mut total);
    total.merge(run_items(cfg.trees, cfg.threads, &empty, |k| {
        let mut tally = empty.clone();
        let mut rng = item_rng(cfg.seed, TAG_TREES, k);
        let t = random_tree(&mut rng, 1, cfg.max_tree_size.max(1));
        tree_identities(&mut tally, &t, &mut rng);
        encoding_identities(&mut tally, &t);
        tally
    }));
    total.merge(run_items(cfg.heap_arrays, cfg.threads, &empty, |k| {
        let mut tally = empty.clone();
        let mut rng = item_rng(cfg.seed, TAG_HEAPS, k);
        let n = rng.gen_range(1..=cfg.max_heap_len.max(1));
        let distinct = random_array(&mut rng, n, true);
        tally.record_result(
            "heap_reversal_duality",
            reversal_dual_check(&distinct),
            || format!("{distinct:?}"),
        );
        for values in [distinct.clone(), random_array(&mut rng, n, false)] {
            let h = build_minheap(&values).expect("non-empty");
            heap_invariants(&mut tally, &h);
        }
        tally
    }));
    total
}

fn heap_invariants(tally: &mut Tally, h: &MinHeapIndex<i64>) {
    let t = h.tree();
    let in_order = (1..=h.len()).all(|m| t.dft(Label(m as u32)).ok() == Some(m + 1));
    tally.record("heap_dft_order", in_order, || format!("{:?}", h.values()));
    let values = h.values();
    let mut heap_ok = true;
    for k in 1..t.len() {
        let m = t.label(k).0 as usize;
        let p = t.label(t.parent_idx(k).unwrap()).0 as usize;
        if p != 0 && values[p - 1] > values[m - 1] {
            heap_ok = false;
        }
    }
    tally.record("heap_property", heap_ok, || format!("{values:?}"));
}

#[allow(clippy::needless_range_loop)]
fn tree_identities(tally: &mut Tally, t: &OrdinalTree, rng: &mut ChaCha8Rng) {
    let n = t.len();
    let show = || format!("{t}");
    let d = dual(t);
    tally.record("dual_involution", dual(&d) == *t, show);
    tally.record(
        "dual_rules_eq_first_right",
        dual_by_first_right(t) == d,
        show,
    );
    let cert = dual_with_certificate(t);
    tally.record(
        "dual_rule_certificate",
        cert.check().is_ok() && cert.rules.len() == n - 1,
        show,
    );
    // Dual-tree index of each primal index.
    let dmap: Vec<usize> = (0..n).map(|k| d.index_of(t.label(k)).unwrap()).collect();
    let pa: Vec<usize> = (0..n)
        .map(|k| if k == 0 { 0 } else { dual_parent_idx(t, k) })
        .collect();

    let parents_ok = (1..n).all(|k| d.parent_idx(dmap[k]) == Some(dmap[pa[k]]));
    tally.record("dual_parent_is_first_right", parents_ok, show);

    let mut reversed_order: Vec<Label> = t.labels()[1..].to_vec();
    reversed_order.reverse();
    tally.record(
        "dual_order_reversal",
        d.labels()[1..] == reversed_order[..],
        show,
    );

    // A root dual parent ranks after every node.
    let key = |x: usize| if x == 0 { usize::MAX } else { x };
    let mut monotone = true;
    for v in 1..n {
        let mut u = t.parent_idx(v).unwrap();
        while u != 0 {
            monotone &= key(pa[v]) <= key(pa[u]);
            u = t.parent_idx(u).unwrap();
        }
    }
    tally.record("dual_parent_monotone_on_ancestors", monotone, show);

    let subtree = |x: usize| x..x + t.subtree_size_idx(x);
    let inside = (1..n).all(|v| subtree(v).all(|w| d.is_ancestor_idx(dmap[pa[v]], dmap[w])));
    tally.record("subtree_inside_dual_subtree", inside, show);

    let mut sibling_ok = true;
    for p in 0..n {
        let kids = t.children_idx(p);
        for (i, &v1) in kids.iter().enumerate() {
            for &u1 in &kids[i + 1..] {
                sibling_ok &= subtree(v1).all(|w| d.is_ancestor_idx(dmap[u1], dmap[w]));
            }
        }
    }
    tally.record("left_sibling_subtree_inside_dual_subtree", sibling_ok, show);

    let mut depth_ok = true;
    for v in 1..n {
        let p = pa[v];
        if p == 0 {
            continue;
        }
        let mut running = usize::MAX;
        for w in v..p + t.subtree_size_idx(p) {
            running = running.min(t.depth_idx(w));
            if w >= p {
                depth_ok &= running == t.depth_idx(p);
            }
        }
    }
    tally.record("depth_range_hits_dual_parent", depth_ok, show);

    let mut sets_ok = true;
    for v in 1..n {
        let (tv, rv) = (subtree(v), v + t.subtree_size_idx(v)..n);
        let mut u = t.parent_idx(v);
        while let Some(a) = u {
            let (tu, ru) = (subtree(a), a + t.subtree_size_idx(a)..n);
            sets_ok &= tv.clone().all(|x| tu.contains(&x));
            sets_ok &= ru.clone().all(|x| rv.contains(&x));
            sets_ok &= rv.clone().all(|x| tu.contains(&x) || ru.contains(&x));
            u = t.parent_idx(a);
        }
    }
    tally.record("right_set_relations", sets_ok, show);

    if n >= 2 {
        for _ in 0..20 {
            let mut pts = [
                rng.gen_range(1..n),
                rng.gen_range(1..n),
                rng.gen_range(1..n),
            ];
            pts.sort();
            let [v1, w, v2] = pts;
            let whole = t.range_min_depth_idx(v1, v2).unwrap().0;
            let left = t.range_min_depth_idx(v1, w).unwrap().0;
            let right = t.range_min_depth_idx(w, v2).unwrap().0;
            tally.record("depth_range_split", whole == left.min(right), || {
                format!("{t} ranks {} {} {}", v1 + 1, w + 1, v2 + 1)
            });
        }
    }

    let nav_ok = (0..n).all(|k| match t.relative_idx(k, Relative::Irs) {
        Some(s) => t.relative_idx(s, Relative::Ils) == Some(k),
        None => true,
    });
    tally.record("navigate_consistent", nav_ok, show);

    let r = t.reversed();
    let mut rev_ok = r.root() == t.root();
    for k in 1..n {
        let v = t.label(k);
        rev_ok &= r.parent(v).unwrap() == t.parent(v).unwrap();
        if let Some(u) = t.navigate(v, Relative::Ils).unwrap() {
            rev_ok &= r.navigate(v, Relative::Irs).unwrap() == Some(u);
        }
    }
    tally.record("reverse_keeps_parents", rev_ok, show);
}

fn encoding_identities(tally: &mut Tally, t: &OrdinalTree) {
    let n = t.len();
    let show = || format!("{t}");
    let (bp, bp_map) = bp_encode(t);
    let (dfuds, dfuds_map) = dfuds_encode(t);
    let d = dual(t);
    tally.record(
        "bp_eq_mirror_of_dual_dfuds",
        bp == mirror(&dfuds_encode(&d).0),
        show,
    );
    tally.record(
        "bp_of_reverse_eq_mirror",
        bp_encode(&t.reversed()).0 == mirror(&bp),
        show,
    );
    tally.record("dfuds_eq_bp_of_hat", dfuds == bp_encode(&hat(t)).0, show);
    tally.record(
        "encoders_match_reference",
        bp.to_string() == bp_reference(t) && dfuds.to_string() == dfuds_reference(t),
        show,
    );
    let shape = shape_of(t);
    tally.record(
        "bp_round_trip",
        bp_decode(&bp).ok() == Some(shape.clone()),
        show,
    );
    tally.record(
        "dfuds_round_trip",
        dfuds_decode(&dfuds).ok() == Some(shape),
        show,
    );
    tally.record(
        "tree_text_round_trip",
        parse_tree_text(&format_tree_text(t)).ok().as_ref() == Some(t),
        show,
    );

    let mut nest_ok = (0..n).all(|k| bp.close(bp_map.open[k]).ok() == Some(bp_map.close[k]));
    for k in 1..n {
        let p = t.parent_idx(k).unwrap();
        nest_ok &= bp_map.open[p] < bp_map.open[k]
            && bp_map.open[k] < bp_map.close[k]
            && bp_map.close[k] < bp_map.close[p];
    }
    tally.record("bp_nesting", nest_ok, show);

    // Designated closing parentheses by direct counting: the close ending the
    // block of DFT index k belongs to DFT index k + 1.
    let mut cp = vec![1usize; n];
    let mut pos = 1;
    for k in 0..n - 1 {
        pos += t.children_idx(k).len() + 1;
        cp[k + 1] = pos;
    }
    let select_ok = (1..n).all(|k| dfuds.select0(k).ok() == Some(cp[k]))
        && (0..n).all(|k| dfuds_map.anchor(k) == cp[k]);
    tally.record("dfuds_close_is_select", select_ok, show);

    let ex = |k: usize| dfuds.excess(cp[k]).unwrap();
    let mut sib_ok = true;
    let mut rmc_ok = true;
    for k in 0..n {
        if let Some(s) = t.relative_idx(k, Relative::Irs) {
            sib_ok &= ex(s) == ex(k) - 1;
        }
        if let Some(c) = t.relative_idx(k, Relative::Rmc) {
            rmc_ok &= ex(c) == ex(k);
        }
    }
    tally.record("sibling_excess_step", sib_ok, show);
    tally.record("rightmost_child_excess_equal", rmc_ok, show);
}

pub const FIX_A: [i64; 8] = [2, 7, 8, 1, 6, 4, 3, 5];
pub const FIX_BP: &str = "(((()))(()()(())))";
pub const FIX_DFUDS: &str = "((()()())((()))())";
pub const FIX_DFUDS_TSTAR: &str = "(((())()())((())))";

fn tree_from(root: u32, lists: &[(u32, &[u32])]) -> OrdinalTree {
    OrdinalTree::from_children(
        Label(root),
        lists
            .iter()
            .map(|(p, cs)| (Label(*p), cs.iter().map(|&c| Label(c)).collect())),
    )
    .expect("fixture is a tree")
}

/// The eight-element worked example, with every tree and string spelled out.
fn worked_example(tally: &mut Tally) {
    let fix_t = tree_from(
        0,
        &[
            (0, &[1, 4]),
            (1, &[2]),
            (2, &[3]),
            (4, &[5, 6, 7]),
            (7, &[8]),
        ],
    );
    let fix_tstar = tree_from(0, &[(0, &[8, 7, 4]), (7, &[6]), (6, &[5]), (4, &[3, 2, 1])]);
    let fix_hat = tree_from(0, &[(0, &[4, 7, 8]), (4, &[1, 2, 3]), (7, &[6]), (6, &[5])]);
    let h = build_minheap(&FIX_A).expect("non-empty");
    let cases = [
        ("heap tree", *h.tree() == fix_t),
        ("dual tree", dual(&fix_t) == fix_tstar),
        ("hat tree", hat(&fix_t) == fix_hat),
        (
            "BP",
            bp_reference(&fix_t) == FIX_BP && bp_encode(&fix_t).0.to_string() == FIX_BP,
        ),
        (
            "DFUDS",
            dfuds_reference(&fix_t) == FIX_DFUDS && h.dfuds().to_string() == FIX_DFUDS,
        ),
        (
            "DFUDS of dual",
            dfuds_reference(&fix_tstar) == FIX_DFUDS_TSTAR
                && dfuds_encode(&fix_tstar).0.to_string() == FIX_DFUDS_TSTAR,
        ),
        ("BP of hat", bp_encode(&fix_hat).0.to_string() == FIX_DFUDS),
        (
            "mirror",
            mirror(&ParenSeq::parse(FIX_DFUDS_TSTAR).unwrap()).to_string() == FIX_BP,
        ),
        ("reversal", reversal_dual_check(&FIX_A) == Ok(true)),
    ];
    for (what, ok) in cases {
        tally.record("worked_example", ok, || format!("{what} differs"));
    }
}

const RMQ_CHECKS: &[&str] = &[
    "fh_eq_scan",
    "fn_eq_scan",
    "pda_eq_scan",
    "fh_condition_equivalence",
    "fn_budget_exact",
    "fh_budget_bound",
];

fn rmq_suite(cfg: &VerifyConfig) -> Tally {
    let empty = Tally::new(Suite::Rmq, RMQ_CHECKS);
    run_items(cfg.rmq_arrays, cfg.threads, &empty, |k| {
        let mut tally = empty.clone();
        let mut rng = item_rng(cfg.seed, TAG_RMQ, k);
        let n = rng.gen_range(1..=cfg.max_array_len.max(1));
        let values = random_array(&mut rng, n, k % 2 == 0);
        let h = build_minheap(&values).expect("non-empty");
        let d = h.dfuds();
        let excess = SparseMin::new(excess_array(d));
        for _ in 0..cfg.rmq_queries {
            let (mut i, mut j) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            if i > j {
                std::mem::swap(&mut i, &mut j);
            }
            let expect = rmq_naive(&h, i, j).unwrap();
            let show = || format!("n={n} array#{k} ({i}, {j}) expected {expect}");
            let mut fh_ops = OpCounters::default();
            let mut fn_ops = OpCounters::default();
            let fh = rmq_fh(&h, i, j, &mut fh_ops);
            let fnb = rmq_fn(&h, i, j, &mut fn_ops);
            let pda = rmq_pda(&h, i, j, &mut OpCounters::default());
            tally.record("fh_eq_scan", fh == Ok(expect), show);
            tally.record("fn_eq_scan", fnb == Ok(expect), show);
            tally.record("pda_eq_scan", pda == Ok(expect), show);
            let fn_budget = OpCounters {
                rank: 1,
                select: 2,
                rmq_excess: 1,
                ..Default::default()
            };
            tally.record("fn_budget_exact", fn_ops == fn_budget, show);
            tally.record(
                "fh_budget_bound",
                fh_ops.select <= 2
                    && fh_ops.rmq_excess <= 1
                    && fh_ops.open <= 1
                    && fh_ops.rank <= 2
                    && fh_ops.close + fh_ops.bpselect + fh_ops.pda == 0,
                show,
            );
            if i < j {
                let verdict = (|| -> Result<bool> {
                    let l = d.select0(i + 1)?;
                    let r = d.select0(j)?;
                    let lower = excess.min(l, r) >= excess.at(d.select0(i)?);
                    let w = d.rmq_excess(l, r, Tie::Leftmost)?;
                    let opened_in_block = d.rank0(d.open(w)?)? == i;
                    Ok(lower == opened_in_block)
                })();
                tally.record_result("fh_condition_equivalence", verdict, show);
            }
        }
        tally
    })
}

/// Excess at positions `1..=n` by direct counting; index 0 is unused.
fn excess_array(p: &ParenSeq) -> Vec<i64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(0);
    let mut e = 0;
    for open in p.iter() {
        e += if open { 1 } else { -1 };
        out.push(e);
    }
    out
}

/// Range-minimum values over a plain array, by doubling table.
struct SparseMin {
    levels: Vec<Vec<i64>>,
}

impl SparseMin {
    fn new(values: Vec<i64>) -> Self {
        let mut levels = vec![values];
        let mut width = 1;
        while 2 * width <= levels[0].len() {
            let prev = levels.last().unwrap();
            let next = (0..prev.len() - width)
                .map(|k| prev[k].min(prev[k + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        Self { levels }
    }

    fn at(&self, x: usize) -> i64 {
        self.levels[0][x]
    }

    fn min(&self, l: usize, r: usize) -> i64 {
        let span = r - l + 1;
        let k = usize::BITS as usize - 1 - span.leading_zeros() as usize;
        self.levels[k][l].min(self.levels[k][r + 1 - (1 << k)])
    }
}

const PDA_CHECKS: &[&str] = &[
    "pda_fast_eq_definitional",
    "definitional_eq_rightmost_min_depth",
    "pda_membership",
    "pda_budget_exact",
];

fn pda_suite(cfg: &VerifyConfig) -> Tally {
    let empty = Tally::new(Suite::Pda, PDA_CHECKS);
    run_items(cfg.pda_trees, cfg.threads, &empty, |k| {
        let mut tally = empty.clone();
        let mut rng = item_rng(cfg.seed, TAG_PDA, k);
        let t = random_tree(&mut rng, 2, cfg.max_tree_size.max(2));
        let n = t.len();
        let d = dual(&t);
        let index = PdaIndex::new(t.clone());
        for _ in 0..cfg.pda_pairs {
            let (mut a, mut b) = (rng.gen_range(1..n), rng.gen_range(1..n));
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            let show = || format!("{t} ranks ({}, {})", a + 1, b + 1);
            let mut ops = OpCounters::default();
            let fast = index.pda(t.label(a), t.label(b), &mut ops);
            let def = pda_definitional_idx(&t, a, b).unwrap();
            tally.record("pda_fast_eq_definitional", fast == Ok(t.label(def)), show);
            let (_, rightmost) = t.range_min_depth_idx(a, b).unwrap();
            tally.record(
                "definitional_eq_rightmost_min_depth",
                def == rightmost,
                show,
            );
            let in_dual = d.is_ancestor_idx(
                d.index_of(t.label(def)).unwrap(),
                d.index_of(t.label(a)).unwrap(),
            );
            tally.record("pda_membership", in_dual && t.is_ancestor_idx(def, b), show);
            let budget = OpCounters {
                rank: 1,
                select: 2,
                rmq_excess: 1,
                pda: 1,
                ..Default::default()
            };
            tally.record("pda_budget_exact", ops == budget, show);
        }
        tally
    })
}

const MLIQ_CHECKS: &[&str] = &[
    "naive_eq_brute_closed",
    "weighted_eq_brute_closed",
    "naive_eq_brute_strict",
    "weighted_eq_brute_strict",
    "none_answers_agree",
    "naive_budget_exact",
    "weighted_budget_exact",
    "a_side_boundary_monotone",
];

fn mliq_suite(cfg: &VerifyConfig) -> Tally {
    let empty = Tally::new(Suite::Mliq, MLIQ_CHECKS);
    run_items(cfg.interval_families, cfg.threads, &empty, |k| {
        let mut tally = empty.clone();
        let mut rng = item_rng(cfg.seed, TAG_MLIQ, k);
        let n = rng.gen_range(1..=cfg.max_intervals.max(1));
        let pairs = random_intervals(&mut rng, n);
        let s = match build_intervals(&pairs) {
            Ok(s) => s,
            Err(e) => {
                tally.record("naive_eq_brute_closed", false, || {
                    format!("build failed: {e}")
                });
                return tally;
            }
        };
        let top = s.b_sentinel() + 1;
        for _ in 0..cfg.mliq_queries {
            let a = rng.gen_range(0..=top);
            let b = if rng.gen_bool(0.5) {
                (a + rng.gen_range(0..40)).min(top)
            } else {
                rng.gen_range(a..=top)
            };
            for conv in [Containment::Closed, Containment::Strict] {
                let show = || format!("family#{k} n={n} query ({a}, {b}) {conv:?}");
                let brute = mliq_bruteforce(&s, a, b, conv).unwrap();
                let mut naive_ops = OpCounters::default();
                let mut weighted_ops = OpCounters::default();
                let naive = mliq_naive(&s, a, b, conv, &mut naive_ops);
                let weighted = mliq_weighted(&s, a, b, conv, &mut weighted_ops);
                let (naive_name, weighted_name) = match conv {
                    Containment::Closed => ("naive_eq_brute_closed", "weighted_eq_brute_closed"),
                    Containment::Strict => ("naive_eq_brute_strict", "weighted_eq_brute_strict"),
                };
                tally.record(naive_name, naive == Ok(brute), show);
                tally.record(weighted_name, weighted == Ok(brute), show);
                if brute.is_none() {
                    tally.record(
                        "none_answers_agree",
                        naive == Ok(None) && weighted == Ok(None),
                        show,
                    );
                }
                let (naive_budget, weighted_budget) = mliq_budgets(brute.is_some());
                tally.record("naive_budget_exact", naive_ops == naive_budget, show);
                tally.record(
                    "weighted_budget_exact",
                    weighted_ops == weighted_budget,
                    show,
                );
            }
        }
        let mut probes: Vec<u64> = (0..50).map(|_| rng.gen_range(0..=top)).collect();
        probes.sort();
        let mut last = 0;
        let mut monotone = true;
        for a in probes {
            let w = mliq_weighted_trace(&s, a, a, Containment::Closed, &mut OpCounters::default())
                .unwrap()
                .w;
            monotone &= w >= last;
            last = w;
        }
        tally.record("a_side_boundary_monotone", monotone, || {
            format!("family#{k}")
        });
        tally
    })
}

/// Exact primitive-operation counts of the two solvers, for queries with and
/// without an answer.
pub fn mliq_budgets(answered: bool) -> (OpCounters, OpCounters) {
    let ranks_only = OpCounters {
        rank: 2,
        ..Default::default()
    };
    let rmq = OpCounters {
        rank: 1,
        select: 2,
        rmq_excess: 1,
        ..Default::default()
    };
    let mut naive = ranks_only;
    let mut weighted = OpCounters {
        bpselect: 2,
        ..Default::default()
    };
    if answered {
        naive.add(&rmq);
        weighted.add(&rmq);
        weighted.pda = 1;
    }
    (naive, weighted)
}

const JOIN_CHECKS: &[&str] = &[
    "root_decomposition",
    "prepended_dual_rmc_is_old_root_leaf",
    "quasi_subtree_recognized",
    "quasi_subtree_dual_edges_kept",
    "sibling_swap_rejected",
];

fn join_suite(cfg: &VerifyConfig) -> Tally {
    let empty = Tally::new(Suite::Join, JOIN_CHECKS);
    run_items(cfg.join_cases, cfg.threads, &empty, |k| {
        let mut tally = empty.clone();
        let mut rng = item_rng(cfg.seed, TAG_JOIN, k);
        let part_size = (cfg.max_tree_size / 4).max(1);
        let parts_count = rng.gen_range(2..=6);
        let (root, parts) = random_root_decomposition(&mut rng, parts_count, part_size);
        let t = attach_under_root(root, &parts);
        let mut duals = Vec::with_capacity(parts.len());
        for part in &parts {
            let prepended = dual(&root_prepend(root, part).expect("fresh root label"));
            let rmc = prepended.navigate(root, Relative::Rmc).unwrap();
            let leaf = rmc.is_some_and(|c| prepended.children(c).unwrap().is_empty());
            tally.record(
                "prepended_dual_rmc_is_old_root_leaf",
                leaf && rmc == Some(part.root()),
                || format!("{part}"),
            );
            duals.push(prepended);
        }
        let joined = join_all(&duals);
        tally.record(
            "root_decomposition",
            joined.as_ref() == Ok(&dual(&t)),
            || format!("{t}"),
        );

        let t = random_tree(&mut rng, 1, cfg.max_tree_size.max(1));
        let a = random_quasi_subtree(&mut rng, &t);
        let show = || format!("{a} in {t}");
        tally.record_result("quasi_subtree_recognized", is_quasi_subtree(&a, &t), show);
        let (da, dt) = (dual(&a), dual(&t));
        let kept = (1..da.len()).all(|k| {
            let p = da.parent_idx(k).unwrap();
            p == 0 || dt.parent(da.label(k)).unwrap() == Some(da.label(p))
        });
        tally.record("quasi_subtree_dual_edges_kept", kept, show);
        if let Some(swapped) = swap_some_siblings(&a, &mut rng) {
            tally.record_result(
                "sibling_swap_rejected",
                is_quasi_subtree(&swapped, &t).map(|q| !q),
                || format!("{swapped} in {t}"),
            );
        }
        tally
    })
}

/// `a` with two adjacent siblings exchanged, if any node has two children.
fn swap_some_siblings(a: &OrdinalTree, rng: &mut ChaCha8Rng) -> Option<OrdinalTree> {
    let candidates: Vec<usize> = (0..a.len())
        .filter(|&k| a.children_idx(k).len() >= 2)
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let p = candidates[rng.gen_range(0..candidates.len())];
    let mut lists: Vec<Vec<usize>> = (0..a.len()).map(|k| a.children_idx(k).to_vec()).collect();
    let i = rng.gen_range(0..lists[p].len() - 1);
    lists[p].swap(i, i + 1);
    Some(OrdinalTree::from_index_lists(a.labels(), 0, &lists))
}

/// Differential claims that are checked, never asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// `reverse(dual(t)) = dual(reverse(t))`.
    ReverseDualCommute,
    /// `DFUDS(reverse(t)) = mirror(DFUDS(t))`.
    DfudsMirror,
}

impl Claim {
    pub fn parse(s: &str) -> Option<Claim> {
        match s {
            "prop1h" | "reverse-dual-commute" => Some(Claim::ReverseDualCommute),
            "dfuds-mirror" => Some(Claim::DfudsMirror),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Claim::ReverseDualCommute => "prop1h",
            Claim::DfudsMirror => "dfuds-mirror",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub tree: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub claim: &'static str,
    pub max_nodes: usize,
    pub trees_checked: usize,
    pub holds_on: usize,
    /// Smallest counterexamples first.
    pub counterexamples: Vec<Counterexample>,
}

/// Every tree shape with `n` nodes, as BP strings.
pub fn all_shapes(n: usize) -> Vec<String> {
    fn forests(k: usize, memo: &mut Vec<Option<Vec<String>>>) -> Vec<String> {
        if let Some(done) = &memo[k] {
            return done.clone();
        }
        let mut out = Vec::new();
        if k == 0 {
            out.push(String::new());
        } else {
            // First tree takes `first` nodes, the rest form a forest.
            for first in 1..=k {
                for inner in forests(first - 1, memo) {
                    for rest in forests(k - first, memo) {
                        out.push(format!("({inner}){rest}"));
                    }
                }
            }
        }
        memo[k] = Some(out.clone());
        out
    }
    if n == 0 {
        return Vec::new();
    }
    let mut memo = vec![None; n];
    forests(n - 1, &mut memo)
        .into_iter()
        .map(|f| format!("({f})"))
        .collect()
}

/// Checks `claim` on every tree with at most `max_nodes` nodes and keeps up
/// to `keep` counterexamples.
pub fn check_claim(claim: Claim, max_nodes: usize, keep: usize) -> Result<ClaimReport> {
    if max_nodes == 0 {
        return Err(Error::contract("claims need trees with at least one node"));
    }
    let mut report = ClaimReport {
        claim: claim.name(),
        max_nodes,
        trees_checked: 0,
        holds_on: 0,
        counterexamples: Vec::new(),
    };
    for n in 1..=max_nodes {
        for bp in all_shapes(n) {
            let t = bp_decode(&ParenSeq::parse(&bp)?)?;
            let (left, right) = match claim {
                Claim::ReverseDualCommute => (hat(&t).to_string(), dual_of_reverse(&t).to_string()),
                Claim::DfudsMirror => (
                    dfuds_encode(&t.reversed()).0.to_string(),
                    mirror(&dfuds_encode(&t).0).to_string(),
                ),
            };
            report.trees_checked += 1;
            if left == right {
                report.holds_on += 1;
            } else if report.counterexamples.len() < keep {
                report.counterexamples.push(Counterexample {
                    tree: t.to_string(),
                    left,
                    right,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> VerifyConfig {
        VerifyConfig {
            threads: 3,
            ..VerifyConfig::new(seed)
                .with_structures(12)
                .with_queries(40)
                .with_max_size(40)
        }
    }

    #[test]
    fn small_runs_pass() {
        let report = run_all(&small(5));
        for c in &report.checks {
            assert_eq!(c.failed, 0, "{c:?}");
        }
        assert!(report.ok());
    }

    #[test]
    fn thread_count_does_not_change_the_report() {
        let one = VerifyConfig {
            threads: 1,
            ..small(11)
        };
        assert_eq!(run_all(&one).checks, run_all(&small(11)).checks);
    }

    #[test]
    fn every_check_is_exercised() {
        let report = run_all(&small(3));
        for c in &report.checks {
            assert!(c.passed > 0, "{} never ran", c.name);
        }
    }

    #[test]
    fn shape_counts_are_catalan() {
        let counts: Vec<usize> = (1..=6).map(|n| all_shapes(n).len()).collect();
        assert_eq!(counts, [1, 1, 2, 5, 14, 42]);
    }

    #[test]
    fn reverse_dual_claim_fails_on_four_nodes() {
        let r = check_claim(Claim::ReverseDualCommute, 4, 3).unwrap();
        assert!(!r.counterexamples.is_empty());
        assert_eq!(r.trees_checked, 1 + 1 + 2 + 5);
    }

    #[test]
    fn dfuds_mirror_claim_has_counterexamples() {
        let r = check_claim(Claim::DfudsMirror, 4, 3).unwrap();
        assert!(!r.counterexamples.is_empty());
    }

    #[test]
    fn reference_encoders_on_fixture() {
        let h = build_minheap(&FIX_A).unwrap();
        assert_eq!(bp_reference(h.tree()), FIX_BP);
        assert_eq!(dfuds_reference(h.tree()), FIX_DFUDS);
    }
}
