//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dualtree::codec::{bp_encode, dfuds_encode};
use dualtree::duality::dual;
use dualtree::minheap::build_minheap;
use dualtree::verify::{
    self, Report, Suite, VerifyConfig, FIX_A, FIX_BP, FIX_DFUDS, FIX_DFUDS_TSTAR,
};
use dualtree::{Label, OrdinalTree};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

/// Every named check passed with at least `min` instances.
fn checks_pass(report: &Report, suite: Suite, names: &[&str], min: u64) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in names {
        match report.check(suite.name(), name) {
            Some(c) => {
                ok &= c.failed == 0 && c.passed >= min;
                parts.push(format!("{name} {}/{}", c.passed, c.passed + c.failed));
                if let Some(ex) = &c.example {
                    parts.push(format!("first failure: {ex}"));
                }
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    outcome(ok, parts.join(", "))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn l(x: u32) -> Label {
    Label(x)
}

fn fixture_tree() -> OrdinalTree {
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

/// The dual of the fixture, written out by hand: each node hangs under the
/// node that follows its subtree in preorder, later nodes first.
fn fixture_dual() -> OrdinalTree {
    OrdinalTree::from_children(
        l(0),
        [
            (l(0), vec![l(8), l(7), l(4)]),
            (l(7), vec![l(6)]),
            (l(6), vec![l(5)]),
            (l(4), vec![l(3), l(2), l(1)]),
        ],
    )
    .unwrap()
}

fn bp_string(t: &OrdinalTree, v: Label, out: &mut String) {
    out.push('(');
    for c in t.children(v).unwrap() {
        bp_string(t, c, out);
    }
    out.push(')');
}

fn dfuds_string(t: &OrdinalTree) -> String {
    let mut out = String::from("(");
    let mut stack = vec![t.root()];
    while let Some(v) = stack.pop() {
        let kids = t.children(v).unwrap();
        out.push_str(&"(".repeat(kids.len()));
        out.push(')');
        stack.extend(kids.into_iter().rev());
    }
    out
}

fn criterion_3() -> Outcome {
    let t = fixture_tree();
    let heap = match build_minheap(&FIX_A) {
        Ok(h) => h,
        Err(e) => return outcome(false, e.to_string()),
    };
    let d = dual(&t);
    let mut bp = String::new();
    bp_string(&t, t.root(), &mut bp);
    let checks = [
        ("heap tree", heap.tree() == &t),
        ("dual tree", d == fixture_dual()),
        ("BP", bp == FIX_BP && bp_encode(&t).0.to_string() == FIX_BP),
        (
            "DFUDS",
            dfuds_string(&t) == FIX_DFUDS
                && dfuds_encode(&t).0.to_string() == FIX_DFUDS
                && heap.dfuds().to_string() == FIX_DFUDS,
        ),
        (
            "DFUDS of dual",
            dfuds_string(&d) == FIX_DFUDS_TSTAR
                && dfuds_encode(&d).0.to_string() == FIX_DFUDS_TSTAR,
        ),
    ];
    let failing: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failing.is_empty() {
        outcome(true, format!("{FIX_BP} {FIX_DFUDS} {FIX_DFUDS_TSTAR}"))
    } else {
        outcome(false, format!("mismatch: {}", failing.join(", ")))
    }
}

fn criterion_10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_dualtree"))
            .args(["verify", "all", "--seed", "42"])
            .output()
    };
    match (run(), run()) {
        (Ok(a), Ok(b)) => {
            let same = a.stdout == b.stdout;
            let ok = same && a.status.success() && b.status.success();
            outcome(
                ok,
                format!(
                    "{} bytes, identical: {same}, exit {:?}/{:?}",
                    a.stdout.len(),
                    a.status.code(),
                    b.status.code()
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => outcome(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let cfg = VerifyConfig::new(42);
    let mut results: Vec<(&str, Outcome)> = Vec::new();

    let (ident, ident_time) = timed(|| verify::run(Suite::Identities, &cfg));
    let mut c1 = checks_pass(
        &ident,
        Suite::Identities,
        &[
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
        ],
        cfg.trees as u64,
    );
    c1.ok &= ident_time < Duration::from_secs(10);
    c1.detail = format!("{:.2}s; {}", ident_time.as_secs_f64(), c1.detail);
    results.push(("1 duality suite", c1));

    results.push((
        "2 encoding suite",
        checks_pass(
            &ident,
            Suite::Identities,
            &[
                "bp_eq_mirror_of_dual_dfuds",
                "bp_of_reverse_eq_mirror",
                "dfuds_eq_bp_of_hat",
                "encoders_match_reference",
                "bp_round_trip",
                "dfuds_round_trip",
                "tree_text_round_trip",
                "sibling_excess_step",
                "rightmost_child_excess_equal",
            ],
            cfg.trees as u64,
        ),
    ));

    let mut c3 = criterion_3();
    let worked = checks_pass(&ident, Suite::Identities, &["worked_example"], 1);
    c3.ok &= worked.ok;
    c3.detail = format!("{}; {}", c3.detail, worked.detail);
    results.push(("3 fixture", c3));

    results.push((
        "4 min-heap reversal",
        checks_pass(
            &ident,
            Suite::Identities,
            &["heap_reversal_duality"],
            cfg.heap_arrays as u64,
        ),
    ));

    let (rmq, rmq_time) = timed(|| verify::run(Suite::Rmq, &cfg));
    let mut c5 = checks_pass(
        &rmq,
        Suite::Rmq,
        &["fh_eq_scan", "fn_eq_scan", "pda_eq_scan"],
        (cfg.rmq_arrays * cfg.rmq_queries) as u64,
    );
    // The condition pair is only defined for i < j.
    let cond = checks_pass(&rmq, Suite::Rmq, &["fh_condition_equivalence"], 1);
    c5.ok &= cond.ok;
    c5.detail = format!("{}, {}", c5.detail, cond.detail);
    c5.ok &= rmq_time < Duration::from_secs(30);
    c5.detail = format!("{:.2}s; {}", rmq_time.as_secs_f64(), c5.detail);
    results.push(("5 rmq agreement", c5));

    let pda = verify::run(Suite::Pda, &cfg);
    results.push((
        "6 pda",
        checks_pass(
            &pda,
            Suite::Pda,
            &[
                "pda_fast_eq_definitional",
                "definitional_eq_rightmost_min_depth",
            ],
            (cfg.pda_trees * cfg.pda_pairs) as u64,
        ),
    ));

    let mliq = verify::run(Suite::Mliq, &cfg);
    let mut c7 = checks_pass(
        &mliq,
        Suite::Mliq,
        &[
            "naive_eq_brute_closed",
            "weighted_eq_brute_closed",
            "naive_eq_brute_strict",
            "weighted_eq_brute_strict",
        ],
        (cfg.interval_families * cfg.mliq_queries) as u64,
    );
    // Counted over the queries whose answer is None.
    let none = checks_pass(&mliq, Suite::Mliq, &["none_answers_agree"], 1);
    c7.ok &= none.ok;
    c7.detail = format!("{}, {}", c7.detail, none.detail);
    results.push(("7 mliq", c7));

    let mut c8 = checks_pass(&rmq, Suite::Rmq, &["fn_budget_exact"], 1000);
    for part in [
        checks_pass(
            &mliq,
            Suite::Mliq,
            &["naive_budget_exact", "weighted_budget_exact"],
            1000,
        ),
        checks_pass(&pda, Suite::Pda, &["pda_budget_exact"], 1000),
    ] {
        c8.ok &= part.ok;
        c8.detail = format!("{}, {}", c8.detail, part.detail);
    }
    results.push(("8 query budgets", c8));

    let join = verify::run(Suite::Join, &cfg);
    results.push((
        "9 join algebra",
        checks_pass(
            &join,
            Suite::Join,
            &["root_decomposition", "quasi_subtree_dual_edges_kept"],
            cfg.join_cases as u64,
        ),
    ));

    results.push(("10 determinism", criterion_10()));

    let mut failures = 0;
    for (name, o) in &results {
        let verdict = if o.ok { "PASS" } else { "FAIL" };
        failures += usize::from(!o.ok);
        println!("{verdict} criterion {name}: {}", o.detail);
    }
    println!(
        "{} of {} criteria pass",
        results.len() - failures,
        results.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
