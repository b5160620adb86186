//! Checks "every route is at most 4 hops" on the pods cut of the fattree,
//! one SMT query per fragment, and compares with a monolithic check.

use srpcut::checker::{check, CheckOptions};
use srpcut::cutting::FragmentAssignment;
use srpcut::interface_gen::complete_interface;
use srpcut::netgen::{fattree, fattree_assignment, CutKind};
use srpcut::policy::builtin::{max_hops_property, shortest_path};
use srpcut::policy::Policy;
use srpcut::srp::OpenSrp;
use srpcut::cutting::Interface;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (topo, meta) = fattree(4, None)?;
    let srp = OpenSrp::closed(topo, Policy::closed(shortest_path(&meta.dest, 15, &[]))?);
    let p = max_hops_property(srp.route_type(), 4);
    let opts = CheckOptions::default();

    let pods = fattree_assignment(srp.topology(), &meta, CutKind::Pods);
    let iface = complete_interface(&srp, &pods.cut_set(&srp)?)?;
    let report = check(&srp, &p, &pods, &iface, &opts)?;
    for f in &report.fragments {
        println!("fragment {}: {} in {:.3}s", f.index, f.result.verdict_name(), f.smt_time.as_secs_f64());
    }
    println!("pods: {}", report.result);

    let mono = check(&srp, &p, &FragmentAssignment::identity(&srp), &Interface::new(), &opts)?;
    println!("monolithic: {} in {:.3}s", mono.result, mono.max_smt_time().as_secs_f64());
    Ok(())
}
