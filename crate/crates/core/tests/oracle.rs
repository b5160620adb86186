//! The SMT check of a fragment agrees with simulating it, on random
//! shortest-path and valley-free fragments of at most 8 nodes.

mod common;

use common::random::PolicyKind;
use common::suites::{oracle_round, Tally};
use common::z3_available;
use srpcut::checker::CheckOptions;

#[test]
fn smt_verdicts_match_simulation() {
    if !z3_available() {
        eprintln!("z3 not found; skipping");
        return;
    }
    let opts = CheckOptions::default();
    let mut tally = Tally::default();
    for seed in 0..40u64 {
        oracle_round(&mut tally, seed, PolicyKind::Sp, &opts);
        oracle_round(&mut tally, seed, PolicyKind::Fat, &opts);
    }
    assert!(tally.fragments >= 50, "{tally:?}");
    assert!(tally.verified > 0 && tally.violations > 0, "{tally:?}");
    assert!(tally.mismatches.is_empty(), "{:#?}", tally.mismatches);
}
