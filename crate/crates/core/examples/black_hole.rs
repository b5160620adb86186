//! Aggregation router `a6` drops every route. The spine fragment still
//! assumes the pods announce short routes, so its guarantee to the pods
//! fails and the counterexample shows `c0` six hops away.

use srpcut::checker::{check, CheckOptions, CheckResult};
use srpcut::interface_gen::complete_interface;
use srpcut::netgen::{fattree, fattree_assignment, CutKind};
use srpcut::policy::builtin::{max_hops_property, shortest_path, sp_route};
use srpcut::policy::Policy;
use srpcut::srp::OpenSrp;
use srpcut::topology::{Edge, NodeId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (topo, meta) = fattree(4, None)?;
    let policy = Policy::closed(shortest_path(&meta.dest, 15, &[NodeId::new("a6")]))?;
    let srp = OpenSrp::closed(topo, policy);
    let pods = fattree_assignment(srp.topology(), &meta, CutKind::Pods);

    // What the operator expects from the spine: every core two hops out.
    let mut iface = complete_interface(&srp, &pods.cut_set(&srp)?)?;
    let from_cores: Vec<Edge> = iface.edges().filter(|e| e.src.as_str().starts_with('c')).cloned().collect();
    for e in from_cores {
        iface.insert(e, sp_route(2));
    }

    let report = check(&srp, &max_hops_property(srp.route_type(), 4), &pods, &iface, &CheckOptions::default())?;
    println!("{}", report.result);
    if let CheckResult::Violation(v) = &report.result {
        println!("λ(c0) = {}", v.counterexample.get(&NodeId::new("c0")).ok_or("c0 missing")?);
    }
    std::process::exit(report.result.exit_code());
}
