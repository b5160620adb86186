//! Seeded random SRPs, cuts and interfaces.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use srpcut::cutting::{input_free_graph, Interface};
use srpcut::policy::builtin::{shortest_path, valley_free};
use srpcut::policy::{Policy, Tier};
use srpcut::route::{RouteType, RouteValue};
use srpcut::solver::{solve, SolveConfig};
use srpcut::srp::OpenSrp;
use srpcut::topology::{Edge, NodeId, Topology};

pub const H: i64 = 15;

pub fn names(n: usize) -> Vec<NodeId> {
    (0..n).map(|i| NodeId::from(format!("n{i}"))).collect()
}

/// A random directed graph on `n` nodes; every ordered pair is an edge
/// with probability `p`.
pub fn random_topology(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Topology {
    let nodes = names(n);
    let mut edges = Vec::new();
    for u in &nodes {
        for v in &nodes {
            if u != v && rng.gen_bool(p) {
                edges.push(Edge::new(u.clone(), v.clone()));
            }
        }
    }
    Topology::new(nodes, edges).unwrap()
}

/// A uniformly drawn value of `ty`.
pub fn random_value(rng: &mut ChaCha8Rng, ty: &RouteType) -> RouteValue {
    match ty {
        RouteType::BoundedInt { lo, hi } => RouteValue::Int(rng.gen_range(*lo..=*hi)),
        RouteType::Bool => RouteValue::Bool(rng.gen()),
        RouteType::Option(inner) => {
            if rng.gen_bool(0.25) {
                RouteValue::none()
            } else {
                RouteValue::some(random_value(rng, inner))
            }
        }
        RouteType::Tuple(ts) => RouteValue::Tuple(ts.iter().map(|t| random_value(rng, t)).collect()),
        RouteType::Enum(vs) => RouteValue::Enum(vs.choose(rng).unwrap().clone()),
    }
}

/// A small route value: options of hop counts below 6, mostly.
pub fn small_route(rng: &mut ChaCha8Rng, ty: &RouteType) -> RouteValue {
    match ty {
        RouteType::BoundedInt { lo, hi } => RouteValue::Int(rng.gen_range(*lo..=(*hi).min(lo + 5))),
        RouteType::Option(inner) if rng.gen_bool(0.85) => RouteValue::some(small_route(rng, inner)),
        RouteType::Tuple(ts) => RouteValue::Tuple(ts.iter().map(|t| small_route(rng, t)).collect()),
        _ => random_value(rng, ty),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Sp,
    Fat,
}

/// A random open SRP with routing towards `n0`: some nodes become inputs
/// (losing their in-edges) with random assumptions, and some non-inputs
/// become outputs guaranteeing their simulated routes.
pub fn random_open_srp(rng: &mut ChaCha8Rng, max_nodes: usize, kind: PolicyKind) -> OpenSrp {
    let n = rng.gen_range(3..=max_nodes);
    let p = rng.gen_range(0.2..0.6);
    let base = random_topology(rng, n, p);
    let nodes = base.nodes().to_vec();
    let dest = nodes[0].clone();
    let policy = match kind {
        PolicyKind::Sp => Policy::closed(shortest_path(&dest, H, &[])).unwrap(),
        PolicyKind::Fat => {
            let tiers: BTreeMap<NodeId, Tier> = nodes
                .iter()
                .map(|v| (v.clone(), *[Tier::Edge, Tier::Aggregation, Tier::Core].choose(rng).unwrap()))
                .collect();
            Policy::closed(valley_free(&dest, H, &[], &tiers)).unwrap()
        }
    };
    let inputs: BTreeSet<NodeId> = nodes[1..].iter().filter(|_| rng.gen_bool(0.2)).cloned().collect();
    let topo = base.filtered(|_| true, |e| !inputs.contains(&e.dst));
    let rt = policy.route_type().clone();
    let inh: BTreeMap<NodeId, RouteValue> = inputs.iter().map(|u| (u.clone(), small_route(rng, &rt))).collect();
    let unguarded = OpenSrp::open(topo.clone(), policy.clone(), inh.clone(), BTreeMap::new()).unwrap();
    let lab = solve(&unguarded, &SolveConfig::default()).into_labeling().expect("strictly increasing policies converge");
    let outh: BTreeMap<NodeId, RouteValue> = nodes
        .iter()
        .filter(|v| !inputs.contains(*v) && rng.gen_bool(0.2))
        .map(|v| (v.clone(), lab.get(v).unwrap().clone()))
        .collect();
    OpenSrp::open(topo, policy, inh, outh).unwrap()
}

/// A random non-empty proper subset of the input-free nodes, or `None` when
/// there are fewer than two of them.
pub fn random_side(rng: &mut ChaCha8Rng, srp: &OpenSrp) -> Option<BTreeSet<NodeId>> {
    let free: Vec<NodeId> = input_free_graph(srp).nodes().to_vec();
    if free.len() < 2 {
        return None;
    }
    loop {
        let w1: BTreeSet<NodeId> = free.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if !w1.is_empty() && w1.len() < free.len() {
            return Some(w1);
        }
    }
}

/// An interface over `cut` that agrees per source node; with probability
/// `wrong` a source's annotation is replaced by a random small route.
/// Sources that already guarantee a route in `srp` keep it.
pub fn perturbed_interface(
    rng: &mut ChaCha8Rng,
    srp: &OpenSrp,
    complete: &Interface,
    wrong: f64,
) -> Interface {
    let mut by_source: BTreeMap<NodeId, RouteValue> = BTreeMap::new();
    let mut out = Interface::new();
    for (e, r) in complete.iter() {
        let r = by_source
            .entry(e.src.clone())
            .or_insert_with(|| if !srp.is_output(&e.src) && rng.gen_bool(wrong) { small_route(rng, srp.route_type()) } else { r.clone() })
            .clone();
        out.insert(e.clone(), r);
    }
    out
}
