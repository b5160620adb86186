//! Any single non-destination node may be down for maintenance. One
//! interface per choice of `down`, derived from two shortest paths, lets the
//! pods cut prove reachability within 6 hops for every choice.

use std::collections::BTreeMap;
use std::sync::Arc;

use srpcut::checker::{check_universal, CheckOptions};
use srpcut::interface_gen::maint_family;
use srpcut::netgen::{fattree, fattree_assignment, CutKind};
use srpcut::policy::builtin::{maintenance, max_hops_except_property};
use srpcut::srp::SrpTemplate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (topo, meta) = fattree(4, None)?;
    let spec = maintenance(&meta.dest, 15, &[], topo.nodes());
    let downs = spec.symbolics[0].domain.iter().filter_map(|v| v.as_node().cloned()).collect::<Vec<_>>();
    let template = SrpTemplate {
        topology: topo.clone(),
        policy: Arc::new(spec.compile()?),
        inh: BTreeMap::new(),
        outh: BTreeMap::new(),
    };
    let probe = template.instantiate(&template.policy.first_assignment())?;
    let pods = fattree_assignment(&topo, &meta, CutKind::Pods);
    let cutset = pods.cut_set(&probe)?;
    let family = maint_family(&topo, &meta.dest, &cutset, &downs, 15);

    let p = max_hops_except_property(probe.route_type(), 6, "down");
    let report = check_universal(&template, &p, &pods, &family, &CheckOptions::default())?;
    for (a, r) in &report.per_assignment {
        println!("{a}: {}", r.result);
    }
    println!("aggregate: {}", report.aggregate);
    Ok(())
}
