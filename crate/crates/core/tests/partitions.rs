//! Every cut the library produces is a partition of its parent, and
//! malformed partitions are rejected with the clause they break.

mod common;

use common::suites::{hand_violations, side_a, side_b, two_nodes};
use common::{assignment, complete, fat20_sp};
use srpcut::cutting::{cut_n_traced, validate_partition};
use srpcut::netgen::CutKind;
use srpcut::policy::builtin::sp_route;

#[test]
fn fattree_cuts_are_partitions_at_every_step() {
    let (srp, meta) = fat20_sp(&[]);
    for kind in CutKind::ALL {
        let a = assignment(&srp, &meta, kind);
        let iface = complete(&srp, &a);
        let (fragments, steps) = cut_n_traced(&srp, &a, &iface).unwrap();
        assert_eq!(fragments.len(), a.classes().len(), "{kind}");
        for step in &steps {
            let report = validate_partition(&step.parent, &step.first, &step.rest);
            assert!(report.valid(), "{kind}: {:?}", report.violations);
        }
    }
}

#[test]
fn correct_hand_cut_is_valid() {
    let report = validate_partition(&two_nodes(), &side_a(sp_route(1)), &side_b());
    assert!(report.valid(), "{:?}", report.violations);
}

#[test]
fn malformed_splits_are_detected_by_name() {
    for (clause, report) in hand_violations() {
        assert!(report.has(clause), "{clause}: {:?}", report.violations);
    }
}

#[test]
fn a_wrong_assumption_breaks_only_the_interface_clauses() {
    let report = validate_partition(&two_nodes(), &side_a(sp_route(5)), &side_b());
    assert!(!report.has("E coverage") && !report.has("shared input"), "{:?}", report.violations);
}
