mod common;

use std::time::Duration;

use common::*;
use srpcut::checker::{
    check, check_with_refinement, decompose_property, refine_interface, solve_fragment, CheckError, CheckOptions,
    CheckResult, Violation, ViolationKind,
};
use srpcut::cutting::{cut_n, FragmentAssignment, Interface};
use srpcut::netgen::CutKind;
use srpcut::policy::builtin::{max_hops_property, shortest_path, sp_route};
use srpcut::policy::{parse_expr, Assignment, Policy, PropertySpec};
use srpcut::smt::{encode_fragment, run_solver, SolverVerdict};
use srpcut::srp::{Labeling, OpenSrp};
use srpcut::topology::{Edge, NodeId, Topology};

fn n(s: &str) -> NodeId {
    NodeId::new(s)
}

fn e(u: &str, v: &str) -> Edge {
    Edge::new(u, v)
}

/// Complete interface of the network with `a6` dropping routes, except that
/// core-to-aggregation annotations keep their healthy value.
fn black_hole_interface(srp: &OpenSrp, a: &FragmentAssignment) -> Interface {
    let mut iface = complete(srp, a);
    let core_edges: Vec<Edge> = iface.edges().filter(|e| e.src.as_str().starts_with('c')).cloned().collect();
    for e in core_edges {
        iface.insert(e, sp_route(2));
    }
    iface
}

#[test]
fn pods_cut_with_complete_interface_verifies() {
    if !z3_available() {
        eprintln!("z3 not found; skipping");
        return;
    }
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let iface = complete(&srp, &a);
    let p = max_hops_property(srp.route_type(), 4);
    let report = check(&srp, &p, &a, &iface, &CheckOptions::default()).unwrap();
    assert_eq!(report.result, CheckResult::Verified);
    assert_eq!(report.fragment_count, 5);
}

#[test]
fn tighter_bound_fails_monolithically() {
    if !z3_available() {
        return;
    }
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Monolithic);
    let iface = complete(&srp, &a);
    let p = max_hops_property(srp.route_type(), 3);
    let report = check(&srp, &p, &a, &iface, &CheckOptions::default()).unwrap();
    let CheckResult::Violation(v) = report.result else { panic!("expected a violation, got {}", report.result) };
    let ViolationKind::Property(n) = &v.kind else { panic!("expected a property violation") };
    assert_eq!(v.counterexample.get(n), Some(&sp_route(4)));
    assert_eq!(v.counterexample.get(&NodeId::new("a0")), Some(&sp_route(3)));
}


#[test]
fn black_hole_is_caught_in_the_spines() {
    if !z3_available() {
        return;
    }
    let (srp, meta) = fat20_sp(&["a6"]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let iface = black_hole_interface(&srp, &a);
    let p = max_hops_property(srp.route_type(), 4);
    let report = check(&srp, &p, &a, &iface, &CheckOptions::default()).unwrap();
    let CheckResult::Violation(v) = &report.result else { panic!("expected a violation, got {}", report.result) };
    assert_eq!(v.fragment, 0);
    assert_eq!(v.kind, ViolationKind::Guarantee(n("c0")));
    assert_eq!(v.counterexample.get(&n("c0")), Some(&sp_route(6)));
}

#[test]
fn black_hole_script_for_spines_is_sat() {
    if !z3_available() {
        return;
    }
    let (srp, meta) = fat20_sp(&["a6"]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let frags = cut_n(&srp, &a, &black_hole_interface(&srp, &a)).unwrap();
    let script = encode_fragment(&frags[0], &max_hops_property(srp.route_type(), 4)).unwrap();
    let SolverVerdict::Sat(model) = run_solver(&script.text, &solver()).unwrap() else { panic!("expected sat") };
    let lab = srpcut::smt::parse_model(&model, &script.schema).unwrap();
    assert_eq!(lab.get(&n("c0")), Some(&sp_route(6)));
}

#[test]
fn wrong_annotation_is_refined_in_one_round() {
    if !z3_available() {
        return;
    }
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let mut iface = complete(&srp, &a);
    iface.insert(e("a0", "c0"), sp_route(1));
    iface.insert(e("a0", "c1"), sp_route(1));
    let p = max_hops_property(srp.route_type(), 4);
    let opts = CheckOptions::default();
    let first = check(&srp, &p, &a, &iface, &opts).unwrap();
    let CheckResult::Violation(v) = &first.result else { panic!("expected a violation") };
    assert_eq!(v.kind, ViolationKind::Guarantee(n("a0")));
    assert_eq!(v.counterexample.get(&n("a0")), Some(&sp_route(3)));
    let out = check_with_refinement(&srp, &p, &a, &iface, 3, &opts).unwrap();
    assert_eq!(out.report.result, CheckResult::Verified);
    assert_eq!(out.rounds, 2);
    assert_eq!(out.interface.get(&e("a0", "c0")), Some(&sp_route(3)));
    assert_eq!(out.steps[0].to_string(), "refined I(a0c0): 1 → 3");
}

#[test]
fn correct_interface_verifies_in_one_round() {
    if !z3_available() {
        return;
    }
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let iface = complete(&srp, &a);
    let p = max_hops_property(srp.route_type(), 4);
    let out = check_with_refinement(&srp, &p, &a, &iface, 3, &CheckOptions::default()).unwrap();
    assert_eq!(out.rounds, 1);
    assert!(out.steps.is_empty());
    assert_eq!(out.interface, iface);
}

#[test]
fn zeroed_interface_converges_within_budget() {
    if !z3_available() {
        return;
    }
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let iface: Interface = complete(&srp, &a).edges().map(|e| (e.clone(), sp_route(0))).collect();
    let p = max_hops_property(srp.route_type(), 4);
    let out = check_with_refinement(&srp, &p, &a, &iface, iface.len() + 1, &CheckOptions::default()).unwrap();
    assert_eq!(out.report.result, CheckResult::Verified, "stopped: {:?}", out.stopped);
    assert_eq!(out.interface, complete(&srp, &a));
}

#[test]
fn property_violations_are_not_refinable() {
    let v = Violation {
        fragment: 0,
        kind: ViolationKind::Property(n("a0")),
        counterexample: Labeling::new(),
        assignment: Assignment::empty(),
    };
    assert!(matches!(refine_interface(&Interface::new(), &v), Err(CheckError::NotRefinable(_))));
    let v = Violation { kind: ViolationKind::Guarantee(n("a0")), counterexample: [(n("a0"), sp_route(3))].into_iter().collect(), ..v };
    assert!(matches!(refine_interface(&Interface::new(), &v), Err(CheckError::NotRefinable(_))));
}

#[test]
fn identity_assignment_matches_monolithic_check() {
    if !z3_available() {
        return;
    }
    for (drop, bound) in [(&[][..], 4), (&["a6"][..], 4), (&[][..], 3)] {
        let (srp, _) = fat20_sp(drop);
        let p = max_hops_property(srp.route_type(), bound);
        let opts = CheckOptions::default();
        let whole = solve_fragment(0, &srp, &p, &opts).unwrap();
        let cut = check(&srp, &p, &FragmentAssignment::identity(&srp), &Interface::new(), &opts).unwrap();
        assert_eq!(whole.result.is_verified(), cut.result.is_verified());
        assert_eq!(cut.fragment_count, 1);
    }
}

#[test]
fn single_node_guarantee_contradicting_init_is_sat() {
    if !z3_available() {
        return;
    }
    let topo = Topology::from_names(&["d"], &[]).unwrap();
    let policy = Policy::closed(shortest_path(&n("d"), 15, &[])).unwrap();
    let t = OpenSrp::open(topo, policy, Default::default(), [(n("d"), sp_route(1))].into_iter().collect()).unwrap();
    let report = solve_fragment(0, &t, &PropertySpec::new(parse_expr("true").unwrap()), &CheckOptions::default()).unwrap();
    let CheckResult::Violation(v) = report.result else { panic!("expected a violation") };
    assert_eq!(v.kind, ViolationKind::Guarantee(n("d")));
    assert_eq!(v.counterexample.get(&n("d")), Some(&sp_route(0)));
}

#[test]
fn zero_timeout_is_inconclusive() {
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let iface = complete(&srp, &a);
    let mut opts = CheckOptions::default();
    opts.solver.timeout = Duration::ZERO;
    let report = check(&srp, &max_hops_property(srp.route_type(), 4), &a, &iface, &opts).unwrap();
    assert!(matches!(report.result, CheckResult::Inconclusive { fragment: 0, .. }));
    assert_eq!(report.result.exit_code(), 2);
    assert_eq!(report.fragments.len(), 1, "stops at the first inconclusive fragment");
}

#[test]
fn missing_solver_is_inconclusive() {
    let (srp, _) = fat20_sp(&[]);
    let mut opts = CheckOptions::default();
    opts.solver = opts.solver.with_command("/nonexistent/solver -in");
    let report = solve_fragment(0, &srp, &max_hops_property(srp.route_type(), 4), &opts).unwrap();
    assert!(matches!(report.result, CheckResult::Inconclusive { .. }));
}

#[test]
fn parallel_and_exhaustive_checks_agree() {
    if !z3_available() {
        return;
    }
    let (srp, meta) = fat20_sp(&["a6"]);
    let a = assignment(&srp, &meta, CutKind::Full);
    let iface = black_hole_interface(&srp, &a);
    let p = max_hops_property(srp.route_type(), 4);
    let seq = check(&srp, &p, &a, &iface, &CheckOptions::default()).unwrap();
    let par = check(&srp, &p, &a, &iface, &CheckOptions { jobs: 4, all: true, ..CheckOptions::default() }).unwrap();
    assert!(!seq.result.is_verified());
    assert_eq!(seq.result.is_verified(), par.result.is_verified());
    assert_eq!(par.fragments.len(), 20);
    assert_eq!(seq.result, par.result, "lowest failing index is reported");
}

#[test]
fn decomposition_covers_every_fragment_node() {
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let frags = cut_n(&srp, &a, &complete(&srp, &a)).unwrap();
    let p = max_hops_property(srp.route_type(), 4);
    let specs = decompose_property(&p, &frags);
    assert_eq!(specs.len(), 5);
    let mut covered = std::collections::BTreeMap::<NodeId, usize>::new();
    for (t, q) in frags.iter().zip(&specs) {
        let nodes = q.nodes.as_ref().unwrap();
        assert_eq!(nodes.as_slice(), t.nodes());
        for v in nodes {
            *covered.entry(v.clone()).or_default() += 1;
        }
    }
    let total: usize = frags.iter().map(|t| t.nodes().len()).sum();
    assert_eq!(covered.values().sum::<usize>(), total);
    assert_eq!(covered.len(), 20);
    // Each core appears in the spines and in all four pods as an input.
    assert_eq!(covered[&n("c0")], 5);
    assert_eq!(covered[&n("a0")], 2);
    assert_eq!(covered[&n("e0")], 1);
    assert_eq!(decompose_property(&p, &frags[..1]), vec![p.clone()]);
}

#[test]
fn vacuous_property_verifies_everywhere() {
    if !z3_available() {
        return;
    }
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Full);
    let iface = complete(&srp, &a);
    let p = PropertySpec::new(parse_expr("true").unwrap());
    let report = check(&srp, &p, &a, &iface, &CheckOptions { all: true, ..CheckOptions::default() }).unwrap();
    assert!(report.fragments.iter().all(|f| f.result.is_verified()));
}

#[test]
fn dumps_one_script_per_fragment() {
    let dir = tempfile::tempdir().unwrap();
    let (srp, meta) = fat20_sp(&[]);
    let a = assignment(&srp, &meta, CutKind::Pods);
    let mut opts = CheckOptions { dump_dir: Some(dir.path().to_path_buf()), net_name: "fat20".into(), ..Default::default() };
    opts.solver.timeout = Duration::ZERO;
    check(&srp, &max_hops_property(srp.route_type(), 4), &a, &complete(&srp, &a), &opts).unwrap();
    for i in 0..5 {
        let text = std::fs::read_to_string(dir.path().join(format!("fat20.{i}.smt2"))).unwrap();
        assert!(text.starts_with("(set-logic QF_LIA)"));
    }
}
