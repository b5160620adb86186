//! Checks shared by the focused suites and the acceptance run.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::random::{perturbed_interface, random_open_srp, random_side, PolicyKind};
use srpcut::checker::{solve_fragment, CheckOptions, CheckResult, ViolationKind};
use srpcut::cutting::{
    cut_set_between, cut_with_sides, is_input_output_node, shared_inputs_inherited, shared_nodes_are_boundary,
    validate_partition, PartitionReport,
};
use srpcut::interface_gen::complete_interface;
use srpcut::policy::builtin::{max_hops_property, reachable_property, shortest_path, sp_route};
use srpcut::policy::{Policy, PropertySpec};
use srpcut::route::RouteValue;
use srpcut::solver::{solve, SolveConfig, SolveOutcome};
use srpcut::srp::{is_solution, restrict_labeling, Labeling, OpenSrp};
use srpcut::topology::{Edge, NodeId, Topology};

/// A random network cut in two with a complete interface, and its solution.
pub struct Instance {
    pub s: OpenSrp,
    pub t1: OpenSrp,
    pub t2: OpenSrp,
    pub lambda: Labeling,
}

pub fn instance_of(seed: u64, kind: PolicyKind) -> Option<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_open_srp(&mut rng, 12, kind);
    let w1 = random_side(&mut rng, &s)?;
    let cutset = cut_set_between(&s, &w1);
    let iface = complete_interface(&s, &cutset).expect("random instances are solvable");
    let (t1, t2) = cut_with_sides(&s, &w1, &iface).expect("complete interfaces agree per node");
    let lambda = solve(&s, &SolveConfig::default()).into_labeling().unwrap();
    Some(Instance { s, t1, t2, lambda })
}

pub fn node_set(t: &OpenSrp) -> BTreeSet<NodeId> {
    t.nodes().iter().cloned().collect()
}

/// Fragment solutions glued together: inherited inputs keep their
/// assumptions, every other node takes the label from the fragment where
/// it is not an input.
pub fn glue(s: &OpenSrp, t1: &OpenSrp, l1: &Labeling, t2: &OpenSrp, l2: &Labeling) -> Labeling {
    let mut out = Labeling::new();
    for v in s.nodes() {
        let r = if let Some(a) = s.inh().get(v) {
            a.clone()
        } else if t1.nodes().contains(v) && !t1.is_input(v) {
            l1.get(v).unwrap().clone()
        } else if t2.nodes().contains(v) && !t2.is_input(v) {
            l2.get(v).unwrap().clone()
        } else {
            panic!("{v} is an input of both fragments but not of the network");
        };
        out.insert(v.clone(), r);
    }
    out
}

/// Every soundness, completeness, lemma and partition assertion on one
/// instance; returns the ones that fail.
pub fn theorem_failures(inst: &Instance) -> Vec<String> {
    let Instance { s, t1, t2, lambda } = inst;
    let mut out = Vec::new();
    let l1 = solve(t1, &SolveConfig::default()).into_labeling();
    let l2 = solve(t2, &SolveConfig::default()).into_labeling();
    let (Some(l1), Some(l2)) = (l1, l2) else {
        out.push("a fragment has no simulated solution".into());
        return out;
    };
    let glued = is_solution(s, &glue(s, t1, &l1, t2, &l2));
    if !glued.is_solution() {
        out.push(format!("soundness: {:?}", glued.violations));
    }
    for (name, t) in [("T1", t1), ("T2", t2)] {
        let r = is_solution(t, &restrict_labeling(lambda, t.nodes()).unwrap());
        if !r.is_solution() {
            out.push(format!("completeness on {name}: {:?}", r.violations));
        }
    }
    if !shared_nodes_are_boundary(t1, t2) {
        out.push("shared nodes are not all inputs or outputs".into());
    }
    if !shared_inputs_inherited(s, t1, t2) {
        out.push("a shared input is not inherited".into());
    }
    for u in node_set(t1).intersection(&node_set(t2)) {
        if l1.get(u) != l2.get(u) {
            out.push(format!("shared node {u} has different solutions"));
        }
        if !s.is_input(u) && !is_input_output_node(u, t1, t2) {
            out.push(format!("{u} is not an input-output node"));
        }
    }
    let report = validate_partition(s, t1, t2);
    if !report.valid() {
        out.push(format!("partition: {:?}", report.violations));
    }
    out
}

fn oracle_labeling(t: &OpenSrp) -> Labeling {
    match solve(t, &SolveConfig::default()) {
        SolveOutcome::Solved { labeling, .. } | SolveOutcome::NoSolution { labeling, .. } => labeling,
        SolveOutcome::Diverged { .. } => panic!("strictly increasing policies converge"),
    }
}

/// Obligations that fail under `lab`, in canonical order.
pub fn failed_obligations(t: &OpenSrp, p: &PropertySpec, lab: &Labeling) -> Vec<ViolationKind> {
    let compiled = p.compile(t.policy().spec()).unwrap();
    let mut out = Vec::new();
    for v in t.nodes() {
        let r = lab.get(v).unwrap();
        if t.outh().get(v).is_some_and(|g| g != r) {
            out.push(ViolationKind::Guarantee(v.clone()));
        }
        if p.applies_to(v) && !PropertySpec::holds(&compiled, t.policy(), v, r) {
            out.push(ViolationKind::Property(v.clone()));
        }
    }
    out
}

#[derive(Default, Debug)]
pub struct Tally {
    pub fragments: usize,
    pub verified: usize,
    pub violations: usize,
    pub mismatches: Vec<String>,
}

/// Cuts a random network of at most 8 nodes with a partly wrong interface
/// and compares the solver's verdict on both fragments with simulation.
///
/// Hop counts strictly increase under both policies, so each fragment has
/// exactly one solution: a violation must be reported exactly when the
/// simulated fixed point breaks an obligation, and any model must equal it.
pub fn oracle_round(tally: &mut Tally, seed: u64, kind: PolicyKind, opts: &CheckOptions) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_open_srp(&mut rng, 8, kind);
    let Some(w1) = random_side(&mut rng, &s) else { return };
    let cutset = cut_set_between(&s, &w1);
    let complete = complete_interface(&s, &cutset).unwrap();
    let iface = perturbed_interface(&mut rng, &s, &complete, 0.4);
    let (t1, t2) = cut_with_sides(&s, &w1, &iface).unwrap();
    let p = if rng.gen_bool(0.3) { reachable_property() } else { max_hops_property(s.route_type(), rng.gen_range(1..=6)) };
    for (i, t) in [t1, t2].iter().enumerate() {
        assert!(t.nodes().len() <= 8);
        let lab = oracle_labeling(t);
        let expected = failed_obligations(t, &p, &lab);
        let report = solve_fragment(i, t, &p, opts).unwrap();
        tally.fragments += 1;
        let tag = format!("seed {seed} {kind:?} fragment {i}");
        match &report.result {
            CheckResult::Verified => {
                tally.verified += 1;
                if !expected.is_empty() {
                    tally.mismatches.push(format!("{tag}: verified but simulation breaks {expected:?}"));
                }
            }
            CheckResult::Violation(v) => {
                tally.violations += 1;
                if expected.is_empty() {
                    tally.mismatches.push(format!("{tag}: violation but simulation satisfies everything"));
                }
                if !failed_obligations(t, &p, &v.counterexample).contains(&v.kind) {
                    tally.mismatches.push(format!("{tag}: model does not violate {:?}", v.kind));
                }
                if v.counterexample != lab {
                    tally.mismatches.push(format!("{tag}: model differs from the unique solution"));
                }
            }
            CheckResult::Inconclusive { reason, .. } => tally.mismatches.push(format!("{tag}: inconclusive ({reason})")),
        }
    }
}

fn n(s: &str) -> NodeId {
    NodeId::new(s)
}

fn topo(edges: &[(&str, &str)]) -> Topology {
    Topology::new(vec![n("a"), n("b")], edges.iter().map(|(u, v)| Edge::new(*u, *v))).unwrap()
}

fn sp() -> Policy {
    Policy::closed(shortest_path(&n("a"), 15, &[])).unwrap()
}

fn routes(items: &[(&str, RouteValue)]) -> BTreeMap<NodeId, RouteValue> {
    items.iter().map(|(v, r)| (n(v), r.clone())).collect()
}

/// `a <-> b` with `a` originating.
pub fn two_nodes() -> OpenSrp {
    OpenSrp::closed(topo(&[("a", "b"), ("b", "a")]), sp())
}

/// The fragment holding `a`, assuming `b` announces `inh_b`.
pub fn side_a(inh_b: RouteValue) -> OpenSrp {
    OpenSrp::open(topo(&[("b", "a")]), sp(), routes(&[("b", inh_b)]), routes(&[("a", sp_route(0))])).unwrap()
}

pub fn side_b() -> OpenSrp {
    OpenSrp::open(topo(&[("a", "b")]), sp(), routes(&[("a", sp_route(0))]), routes(&[("b", sp_route(1))])).unwrap()
}

/// Three malformed splits of [`two_nodes`], each with the clause it breaks.
pub fn hand_violations() -> Vec<(&'static str, PartitionReport)> {
    let s = two_nodes();
    let lost = OpenSrp::open(topo(&[]), sp(), routes(&[("b", sp_route(1))]), routes(&[("a", sp_route(0))])).unwrap();
    let whole = OpenSrp::open(topo(&[("a", "b"), ("b", "a")]), sp(), BTreeMap::new(), BTreeMap::new()).unwrap();
    vec![
        ("E coverage", validate_partition(&s, &lost, &side_b())),
        ("input-output equality", validate_partition(&s, &side_a(sp_route(5)), &side_b())),
        ("shared input", validate_partition(&s, &side_a(sp_route(1)), &whole)),
    ]
}
