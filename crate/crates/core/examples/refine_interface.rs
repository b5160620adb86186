//! Starts from an interface claiming `a0` is one hop from the destination,
//! and lets counterexamples repair it.

use srpcut::checker::{check_with_refinement, CheckOptions};
use srpcut::interface_gen::complete_interface;
use srpcut::netgen::{fattree, fattree_assignment, CutKind};
use srpcut::policy::builtin::{max_hops_property, shortest_path, sp_route};
use srpcut::policy::Policy;
use srpcut::srp::OpenSrp;
use srpcut::topology::Edge;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (topo, meta) = fattree(4, None)?;
    let srp = OpenSrp::closed(topo, Policy::closed(shortest_path(&meta.dest, 15, &[]))?);
    let pods = fattree_assignment(srp.topology(), &meta, CutKind::Pods);
    let mut iface = complete_interface(&srp, &pods.cut_set(&srp)?)?;
    iface.insert(Edge::new("a0", "c0"), sp_route(1));
    iface.insert(Edge::new("a0", "c1"), sp_route(1));

    let p = max_hops_property(srp.route_type(), 4);
    let outcome = check_with_refinement(&srp, &p, &pods, &iface, 3, &CheckOptions::default())?;
    for step in &outcome.steps {
        println!("{step}");
    }
    println!("rounds: {}; {}", outcome.rounds, outcome.report.result);
    Ok(())
}
