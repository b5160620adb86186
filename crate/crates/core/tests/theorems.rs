//! Soundness and completeness of cutting, and the lemmas they rest on,
//! checked on randomized networks of up to 12 nodes.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random::{random_open_srp, random_side, PolicyKind};
use common::suites::{glue, instance_of, node_set, theorem_failures, Instance};
use srpcut::cutting::{cut, cut_set_between, shared_inputs_inherited, shared_nodes_are_boundary, validate_partition};
use srpcut::interface_gen::complete_interface;
use srpcut::solver::{solve, SolveConfig};
use srpcut::srp::{is_solution, restrict_labeling};

fn instance(seed: u64) -> Option<Instance> {
    instance_of(seed, PolicyKind::Sp)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 160, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn glued_fragment_solutions_solve_the_network(seed in any::<u64>()) {
        let Some(Instance { s, t1, t2, .. }) = instance(seed) else { return Ok(()) };
        let l1 = solve(&t1, &SolveConfig::default()).into_labeling().expect("T1 solvable");
        let l2 = solve(&t2, &SolveConfig::default()).into_labeling().expect("T2 solvable");
        let report = is_solution(&s, &glue(&s, &t1, &l1, &t2, &l2));
        prop_assert!(report.is_solution(), "{:?}", report.violations);
    }

    #[test]
    fn restricted_solutions_solve_each_fragment(seed in any::<u64>()) {
        let Some(Instance { t1, t2, lambda, .. }) = instance(seed) else { return Ok(()) };
        for t in [&t1, &t2] {
            let report = is_solution(t, &restrict_labeling(&lambda, t.nodes()).unwrap());
            prop_assert!(report.is_solution(), "{:?}", report.violations);
        }
    }

    #[test]
    fn shared_nodes_are_inputs_or_outputs(seed in any::<u64>()) {
        let Some(Instance { t1, t2, .. }) = instance(seed) else { return Ok(()) };
        prop_assert!(shared_nodes_are_boundary(&t1, &t2));
    }

    #[test]
    fn shared_inputs_are_inherited(seed in any::<u64>()) {
        let Some(Instance { s, t1, t2, .. }) = instance(seed) else { return Ok(()) };
        prop_assert!(shared_inputs_inherited(&s, &t1, &t2));
    }

    #[test]
    fn shared_nodes_have_the_same_solutions(seed in any::<u64>()) {
        let Some(Instance { t1, t2, .. }) = instance(seed) else { return Ok(()) };
        let l1 = solve(&t1, &SolveConfig::default()).into_labeling().unwrap();
        let l2 = solve(&t2, &SolveConfig::default()).into_labeling().unwrap();
        for u in node_set(&t1).intersection(&node_set(&t2)) {
            prop_assert_eq!(l1.get(u), l2.get(u), "shared node {}", u);
        }
    }

    #[test]
    fn cuts_create_partitions(seed in any::<u64>()) {
        let Some(inst) = instance(seed) else { return Ok(()) };
        let report = validate_partition(&inst.s, &inst.t1, &inst.t2);
        prop_assert!(report.valid(), "{:?}", report.violations);
    }

    #[test]
    fn valley_free_networks_satisfy_every_theorem(seed in any::<u64>()) {
        let Some(inst) = instance_of(seed, PolicyKind::Fat) else { return Ok(()) };
        let failures = theorem_failures(&inst);
        prop_assert!(failures.is_empty(), "{:?}", failures);
    }

    #[test]
    fn cut_recovers_the_sides_from_the_interface(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_open_srp(&mut rng, 12, PolicyKind::Sp);
        let Some(w1) = random_side(&mut rng, &s) else { return Ok(()) };
        let cutset = cut_set_between(&s, &w1);
        let iface = complete_interface(&s, &cutset).unwrap();
        // Without crossing edges the interface cannot describe a bisection.
        if cutset.is_empty() {
            prop_assert!(cut(&s, &iface).is_err());
            return Ok(());
        }
        if let Ok((t1, t2)) = cut(&s, &iface) {
            prop_assert!(validate_partition(&s, &t1, &t2).valid());
        }
    }
}

#[test]
fn enough_random_instances_are_generated() {
    let usable = (0..200u64).filter(|&seed| instance(seed).is_some()).count();
    assert!(usable >= 100, "only {usable} usable instances");
}
