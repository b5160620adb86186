//! Shared fixtures for the integration tests.
#![allow(dead_code)]

pub mod random;
pub mod suites;

use std::collections::BTreeSet;

use srpcut::cutting::{FragmentAssignment, Interface};
use srpcut::interface_gen::complete_interface;
use srpcut::netgen::{fattree, fattree_assignment, CutKind, FattreeMeta};
use srpcut::policy::builtin::shortest_path;
use srpcut::policy::Policy;
use srpcut::smt::SolverConfig;
use srpcut::srp::OpenSrp;
use srpcut::topology::{Edge, NodeId};

pub const MAX_HOPS: i64 = 15;

pub fn z3_available() -> bool {
    std::process::Command::new("z3").arg("-version").output().map(|o| o.status.success()).unwrap_or(false)
}

pub fn solver() -> SolverConfig {
    SolverConfig::default()
}

/// The 20-node fattree (k = 4) with shortest-path routing to `e7`,
/// optionally with some nodes dropping every route they receive.
pub fn fat20_sp(drop: &[&str]) -> (OpenSrp, FattreeMeta) {
    let (topo, meta) = fattree(4, None).unwrap();
    let drop: Vec<NodeId> = drop.iter().map(|d| NodeId::new(d)).collect();
    let policy = Policy::closed(shortest_path(&meta.dest, MAX_HOPS, &drop)).unwrap();
    (OpenSrp::closed(topo, policy), meta)
}

pub fn assignment(srp: &OpenSrp, meta: &FattreeMeta, kind: CutKind) -> FragmentAssignment {
    fattree_assignment(srp.topology(), meta, kind)
}

pub fn complete(srp: &OpenSrp, a: &FragmentAssignment) -> Interface {
    let cut: Vec<Edge> = a.cut_set(srp).unwrap();
    complete_interface(srp, &cut).unwrap()
}

pub fn node_set(names: &[&str]) -> BTreeSet<NodeId> {
    names.iter().map(|n| NodeId::new(n)).collect()
}

/// The maintenance scenario on the 20-node fattree: the template over all
/// 19 choices of `down`, the pods assignment and the two-shortest-paths
/// interface family.
pub fn fat20_maint() -> (srpcut::srp::SrpTemplate, FragmentAssignment, std::collections::BTreeMap<srpcut::policy::Assignment, Interface>) {
    use srpcut::interface_gen::maint_family;
    use srpcut::policy::builtin::maintenance;
    let (topo, meta) = fattree(4, None).unwrap();
    let spec = maintenance(&meta.dest, MAX_HOPS, &[], topo.nodes());
    let template = srpcut::srp::SrpTemplate {
        topology: topo.clone(),
        policy: std::sync::Arc::new(spec.compile().unwrap()),
        inh: Default::default(),
        outh: Default::default(),
    };
    let probe = template.instantiate(&template.policy.first_assignment()).unwrap();
    let pods = fattree_assignment(&topo, &meta, CutKind::Pods);
    let cutset = pods.cut_set(&probe).unwrap();
    let downs: Vec<NodeId> = topo.nodes().iter().filter(|n| **n != meta.dest).cloned().collect();
    let family = maint_family(&topo, &meta.dest, &cutset, &downs, MAX_HOPS);
    (template, pods, family)
}

/// Path of a file under the workspace `data/` directory.
pub fn data(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}
