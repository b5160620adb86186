//! Interface generators.
//!
//! [`complete_interface`] annotates every cut edge `uv` with the monolithic
//! solution at `u`, which always yields fragments whose solutions agree with
//! the whole network. [`yen_two_shortest`] and [`maint_interface`] build
//! annotations for the maintenance policy without solving each instance.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::cutting::Interface;
use crate::policy::builtin::sp_route;
use crate::policy::{Assignment, Value};
use crate::route::RouteValue;
use crate::solver::{solve, SolveConfig, SolveOutcome};
use crate::srp::OpenSrp;
use crate::topology::{Edge, NodeId, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterfaceGenError {
    #[error("the network has no solution to derive an interface from ({0})")]
    Unsolvable(String),
    #[error("cut edge {0} is not an edge of the network")]
    NotAnEdge(Edge),
}

/// `I(uv) = λ(u)` for every `uv` in `cutset`, where `λ` solves `srp`.
pub fn complete_interface<'a>(
    srp: &OpenSrp,
    cutset: impl IntoIterator<Item = &'a Edge>,
) -> Result<Interface, InterfaceGenError> {
    let lab = match solve(srp, &SolveConfig::default()) {
        SolveOutcome::Solved { labeling, .. } => labeling,
        SolveOutcome::Diverged { rounds, .. } => {
            return Err(InterfaceGenError::Unsolvable(format!("no fixed point after {rounds} rounds")))
        }
        SolveOutcome::NoSolution { failures, .. } => {
            return Err(InterfaceGenError::Unsolvable(format!("{} guarantee(s) fail", failures.len())))
        }
    };
    cutset
        .into_iter()
        .map(|e| {
            if !srp.topology().has_edge(e) {
                return Err(InterfaceGenError::NotAnEdge(e.clone()));
            }
            Ok((e.clone(), lab.get(&e.src).expect("solution is total").clone()))
        })
        .collect()
}

/// A loopless path from a node to the destination, with its hop count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopPath {
    pub hops: usize,
    /// Nodes from the source to the destination, inclusive.
    pub path: Vec<NodeId>,
}

/// Shortest and second-shortest loopless paths from one node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TwoPaths {
    pub best: Option<HopPath>,
    pub second: Option<HopPath>,
}

/// Breadth-first search towards `dest` along the traffic direction, i.e.
/// against route propagation: `x` reaches `y` when edge `y -> x` exists.
/// Returns hop distances to `dest`, skipping banned nodes and steps.
fn distances_to(
    topo: &Topology,
    dest: usize,
    banned_node: &dyn Fn(usize) -> bool,
    banned_step: &dyn Fn(usize, usize) -> bool,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; topo.len()];
    if banned_node(dest) {
        return dist;
    }
    dist[dest] = Some(0);
    let mut queue = VecDeque::from([dest]);
    while let Some(y) = queue.pop_front() {
        let d = dist[y].expect("queued nodes have distances");
        // Route propagation y -> x means traffic steps x -> y.
        for &x in topo.succ_indices(y) {
            if dist[x].is_none() && !banned_node(x) && !banned_step(x, y) {
                dist[x] = Some(d + 1);
                queue.push_back(x);
            }
        }
    }
    dist
}

/// Among shortest paths from `src`, the one whose sequence of canonical node
/// positions is lexicographically smallest.
fn lex_shortest(
    topo: &Topology,
    src: usize,
    dest: usize,
    banned_node: &dyn Fn(usize) -> bool,
    banned_step: &dyn Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    let dist = distances_to(topo, dest, banned_node, banned_step);
    let mut d = dist[src]?;
    let mut path = vec![src];
    let mut here = src;
    while d > 0 {
        let next = topo
            .pred_indices(here)
            .iter()
            .copied()
            .find(|&y| dist[y] == Some(d - 1) && !banned_step(here, y))
            .expect("a distance decrease exists on a shortest path");
        path.push(next);
        here = next;
        d -= 1;
    }
    Some(path)
}

fn to_hop_path(topo: &Topology, p: &[usize]) -> HopPath {
    HopPath { hops: p.len() - 1, path: p.iter().map(|&i| topo.node(i).clone()).collect() }
}

/// Yen's algorithm with `k = 2` and unit weights. Ties between equally long
/// paths go to the lexicographically smallest sequence of canonical node
/// positions.
pub fn yen_two_shortest(topo: &Topology, dest: &NodeId) -> BTreeMap<NodeId, TwoPaths> {
    let Some(d) = topo.position(dest) else {
        return topo.nodes().iter().map(|n| (n.clone(), TwoPaths::default())).collect();
    };
    let no_node = |_: usize| false;
    let no_step = |_: usize, _: usize| false;
    let mut out = BTreeMap::new();
    for s in 0..topo.len() {
        let Some(best) = lex_shortest(topo, s, d, &no_node, &no_step) else {
            out.insert(topo.node(s).clone(), TwoPaths::default());
            continue;
        };
        let mut candidate: Option<Vec<usize>> = None;
        for i in 0..best.len() - 1 {
            let spur = best[i];
            let root = &best[..=i];
            let root_set: BTreeSet<usize> = root[..i].iter().copied().collect();
            let removed = (best[i], best[i + 1]);
            let banned_node = |x: usize| root_set.contains(&x);
            let banned_step = |x: usize, y: usize| (x, y) == removed;
            if let Some(tail) = lex_shortest(topo, spur, d, &banned_node, &banned_step) {
                let mut full = root[..i].to_vec();
                full.extend(tail);
                let better = match &candidate {
                    None => true,
                    Some(c) => (full.len(), &full) < (c.len(), c),
                };
                if better {
                    candidate = Some(full);
                }
            }
        }
        out.insert(
            topo.node(s).clone(),
            TwoPaths {
                best: Some(to_hop_path(topo, &best)),
                second: candidate.map(|c| to_hop_path(topo, &c)),
            },
        );
    }
    out
}

/// Annotation for `u` when `down` drops everything it advertises: the hop
/// count of the best or second-best path whose nodes after `u` avoid
/// `down`; failing both, the shortest path in the network without `down`'s
/// advertisements. `None` when `dest` is unreachable or too far.
fn maint_route(
    topo: &Topology,
    paths: &BTreeMap<NodeId, TwoPaths>,
    dest: usize,
    u: &NodeId,
    down: &NodeId,
    max_hops: i64,
) -> RouteValue {
    let avoids = |p: &HopPath| !p.path[1..].contains(down);
    let two = &paths[u];
    let hops = match [&two.best, &two.second].into_iter().flatten().find(|p| avoids(p)) {
        Some(p) => Some(p.hops),
        None => {
            let down_i = topo.position(down);
            let dist = distances_to(topo, dest, &|_| false, &|_, y| Some(y) == down_i);
            dist[topo.position(u).expect("u is a node")]
        }
    };
    match hops {
        Some(h) if (h as i64) <= max_hops => sp_route(h as i64),
        _ => RouteValue::none(),
    }
}

/// [`maint_interface`] keyed by assignments of the symbolic `down`, ready
/// for a universal check.
pub fn maint_family<'a>(
    topo: &Topology,
    dest: &NodeId,
    cutset: impl IntoIterator<Item = &'a Edge> + Clone,
    downs: &[NodeId],
    max_hops: i64,
) -> BTreeMap<Assignment, Interface> {
    maint_interface(topo, dest, cutset, downs, max_hops)
        .into_iter()
        .map(|(d, i)| (Assignment(vec![("down".into(), Value::Node(d))]), i))
        .collect()
}

/// One interface per value of `down` for the maintenance policy, annotating
/// every edge of `cutset` from the two precomputed shortest paths of its
/// source.
pub fn maint_interface<'a>(
    topo: &Topology,
    dest: &NodeId,
    cutset: impl IntoIterator<Item = &'a Edge> + Clone,
    downs: &[NodeId],
    max_hops: i64,
) -> BTreeMap<NodeId, Interface> {
    let paths = yen_two_shortest(topo, dest);
    let d = topo.position(dest).expect("dest is a node");
    downs
        .iter()
        .map(|down| {
            let iface = cutset
                .clone()
                .into_iter()
                .map(|e| (e.clone(), maint_route(topo, &paths, d, &e.src, down, max_hops)))
                .collect();
            (down.clone(), iface)
        })
        .collect()
}
