//! Benchmark topologies: fattrees, seeded Erdős–Rényi graphs, edge-list
//! files, and fragment assignments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cutting::FragmentAssignment;
use crate::policy::Tier;
use crate::topology::{Edge, NodeId, Topology};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetgenError {
    #[error("fattree arity must be even and at least 2, got {0}")]
    OddK(usize),
    #[error("`{0}` is not an edge-tier node of this fattree")]
    BadDestination(String),
    #[error("edge probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("line {line}: cannot parse `{text}`")]
    Parse { line: usize, text: String },
    #[error("edge {0} listed twice")]
    DuplicateEdge(Edge),
    #[error("self-loop {0}")]
    SelfLoop(Edge),
    #[error("node {0} listed twice")]
    DuplicateNode(NodeId),
}

/// Structure of a generated fattree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FattreeMeta {
    pub k: usize,
    pub tiers: BTreeMap<NodeId, Tier>,
    /// Pod index of every aggregation and edge node.
    pub pod: BTreeMap<NodeId, usize>,
    pub dest: NodeId,
}

impl FattreeMeta {
    pub fn cores(&self) -> impl Iterator<Item = &NodeId> {
        self.tiers.iter().filter(|(_, t)| **t == Tier::Core).map(|(n, _)| n)
    }

    pub fn dest_pod(&self) -> usize {
        self.pod[&self.dest]
    }
}

fn both_ways(out: &mut Vec<Edge>, u: &NodeId, v: &NodeId) {
    out.push(Edge { src: u.clone(), dst: v.clone() });
    out.push(Edge { src: v.clone(), dst: u.clone() });
}

/// Builds a `k`-pod fattree with `5k²/4` nodes, named `c0..` (cores),
/// `a0..` (aggregation) and `e0..` (edge) in that canonical order.
///
/// Pod `p` holds aggregation and edge nodes `p·k/2 .. p·k/2 + k/2`. The
/// `j`-th aggregation node of every pod links to cores `j·k/2 .. j·k/2 + k/2`
/// and to every edge node of its pod. `dest` defaults to the last edge node.
pub fn fattree(k: usize, dest: Option<&str>) -> Result<(Topology, FattreeMeta), NetgenError> {
    if k < 2 || k % 2 != 0 {
        return Err(NetgenError::OddK(k));
    }
    let half = k / 2;
    let cores: Vec<NodeId> = (0..k * k / 4).map(|i| NodeId::from(format!("c{i}"))).collect();
    let aggs: Vec<NodeId> = (0..k * half).map(|i| NodeId::from(format!("a{i}"))).collect();
    let edges_t: Vec<NodeId> = (0..k * half).map(|i| NodeId::from(format!("e{i}"))).collect();
    let mut links = Vec::new();
    let mut tiers = BTreeMap::new();
    let mut pod = BTreeMap::new();
    for c in &cores {
        tiers.insert(c.clone(), Tier::Core);
    }
    for p in 0..k {
        for j in 0..half {
            let a = &aggs[p * half + j];
            tiers.insert(a.clone(), Tier::Aggregation);
            pod.insert(a.clone(), p);
            for m in 0..half {
                both_ways(&mut links, a, &cores[j * half + m]);
            }
            for jj in 0..half {
                both_ways(&mut links, a, &edges_t[p * half + jj]);
            }
        }
        for j in 0..half {
            let e = &edges_t[p * half + j];
            tiers.insert(e.clone(), Tier::Edge);
            pod.insert(e.clone(), p);
        }
    }
    let dest = match dest {
        None => edges_t.last().expect("k >= 2").clone(),
        Some(d) => {
            let d = NodeId::new(d);
            if tiers.get(&d) != Some(&Tier::Edge) {
                return Err(NetgenError::BadDestination(d.to_string()));
            }
            d
        }
    };
    let nodes: Vec<NodeId> = cores.into_iter().chain(aggs).chain(edges_t).collect();
    let topo = Topology::new(nodes, links).expect("fattree wiring is well formed");
    Ok((topo, FattreeMeta { k, tiers, pod, dest }))
}

/// The seeded generator used for random topologies.
///
/// A 64-bit linear congruential generator:
/// `state ← state · 6364136223846793005 + 1442695040888963407 (mod 2⁶⁴)`.
/// Each draw advances the state once and returns its top 53 bits scaled to
/// `[0, 1)`.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        self.state
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random undirected graph on nodes `n0..n{n-1}`: each unordered pair
/// `i < j`, visited in lexicographic order, is linked when the next draw is
/// below `p`. Links become two directed edges.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Topology, NetgenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(NetgenError::BadProbability(p));
    }
    let nodes: Vec<NodeId> = (0..n).map(|i| NodeId::from(format!("n{i}"))).collect();
    let mut rng = Lcg::new(seed);
    let mut links = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_f64() < p {
                both_ways(&mut links, &nodes[i], &nodes[j]);
            }
        }
    }
    Ok(Topology::new(nodes, links).expect("random wiring is well formed"))
}

/// Size and edge probability of the random suite at scale `x`:
/// `n = 2^x`, `p = 2^(2-x)`.
pub fn random_scale(x: u32) -> (usize, f64) {
    (1usize << x, 2f64.powi(2 - x as i32))
}

/// Parses an edge list: `u v` is an undirected link, `u -> v` a directed
/// edge, `#` starts a comment. Nodes are ordered by first appearance.
pub fn parse_edge_list(text: &str) -> Result<Topology, NetgenError> {
    let mut nodes = Vec::new();
    let mut seen_nodes = BTreeSet::new();
    let mut edges = Vec::new();
    let mut seen_edges = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let (u, v, directed) = match toks.as_slice() {
            [u, v] => (*u, *v, false),
            [u, "->", v] => (*u, *v, true),
            _ => return Err(NetgenError::Parse { line: idx + 1, text: raw.to_string() }),
        };
        let (u, v) = (NodeId::new(u), NodeId::new(v));
        let e = Edge { src: u.clone(), dst: v.clone() };
        if u == v {
            return Err(NetgenError::SelfLoop(e));
        }
        for n in [&u, &v] {
            if seen_nodes.insert(n.clone()) {
                nodes.push(n.clone());
            }
        }
        let new_edges = if directed { vec![e] } else { vec![e.clone(), e.reversed()] };
        for e in new_edges {
            if !seen_edges.insert(e.clone()) {
                return Err(NetgenError::DuplicateEdge(e));
            }
            edges.push(e);
        }
    }
    Ok(Topology::new(nodes, edges).expect("parsed edges are well formed"))
}

/// Parses `node index` lines into an assignment.
pub fn load_assignment(text: &str) -> Result<FragmentAssignment, NetgenError> {
    let mut out = FragmentAssignment::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parsed = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            [n, i] => i.parse::<usize>().ok().map(|i| (NodeId::new(n), i)),
            _ => None,
        };
        let (n, i) = parsed.ok_or_else(|| NetgenError::Parse { line: idx + 1, text: raw.to_string() })?;
        if out.insert(n.clone(), i).is_some() {
            return Err(NetgenError::DuplicateNode(n));
        }
    }
    Ok(out)
}

/// Ways of splitting a fattree into fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CutKind {
    /// A single fragment.
    Monolithic,
    /// Two halves, each with half the cores and half the pods.
    Vertical,
    /// The destination's pod, the cores, and all other pods.
    Horizontal,
    /// The cores, and each pod on its own.
    Pods,
    /// Every node on its own.
    Full,
}

impl CutKind {
    pub const ALL: [CutKind; 5] = [CutKind::Monolithic, CutKind::Vertical, CutKind::Horizontal, CutKind::Pods, CutKind::Full];

    pub fn name(self) -> &'static str {
        match self {
            CutKind::Monolithic => "mono",
            CutKind::Vertical => "vertical",
            CutKind::Horizontal => "horizontal",
            CutKind::Pods => "pods",
            CutKind::Full => "full",
        }
    }
}

impl fmt::Display for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CutKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown cut kind `{s}`"))
    }
}

/// Fragment assignment of a fattree for the given cut kind.
pub fn fattree_assignment(topo: &Topology, meta: &FattreeMeta, kind: CutKind) -> FragmentAssignment {
    let half = meta.k / 2;
    topo.nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let class = match (kind, meta.tiers[n]) {
                (CutKind::Monolithic, _) => 0,
                (CutKind::Full, _) => i,
                (CutKind::Pods, Tier::Core) => 0,
                (CutKind::Pods, _) => meta.pod[n] + 1,
                (CutKind::Horizontal, Tier::Core) => 1,
                (CutKind::Horizontal, _) => {
                    if meta.pod[n] == meta.dest_pod() {
                        0
                    } else {
                        2
                    }
                }
                (CutKind::Vertical, Tier::Core) => {
                    // Core index below k²/8, written without the division.
                    usize::from(8 * i >= meta.k * meta.k)
                }
                (CutKind::Vertical, _) => usize::from(meta.pod[n] >= half),
            };
            (n.clone(), class)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fattree_counts() {
        for (k, nodes) in [(2, 5), (4, 20), (6, 45)] {
            let (t, meta) = fattree(k, None).unwrap();
            assert_eq!(t.len(), nodes);
            assert_eq!(t.edge_count(), k * k * k);
            assert_eq!(meta.cores().count(), k * k / 4);
        }
        assert_eq!(fattree(3, None).unwrap_err(), NetgenError::OddK(3));
        assert_eq!(fattree(4, None).unwrap().1.dest, NodeId::new("e7"));
        assert!(fattree(4, Some("c0")).is_err());
    }

    #[test]
    fn fattree_wiring() {
        let (t, _) = fattree(4, None).unwrap();
        let nbrs = |n: &str| t.out_neighbors(&NodeId::new(n)).into_iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(nbrs("a0"), ["c0", "c1", "e0", "e1"]);
        assert_eq!(nbrs("a6"), ["c0", "c1", "e6", "e7"]);
        assert_eq!(nbrs("c0"), ["a0", "a2", "a4", "a6"]);
    }

    #[test]
    fn assignments() {
        let (t, meta) = fattree(4, None).unwrap();
        let count = |k| fattree_assignment(&t, &meta, k).classes().len();
        assert_eq!(count(CutKind::Pods), 5);
        assert_eq!(count(CutKind::Full), 20);
        assert_eq!(count(CutKind::Horizontal), 3);
        assert_eq!(count(CutKind::Vertical), 2);
        assert_eq!(count(CutKind::Monolithic), 1);
        let h = fattree_assignment(&t, &meta, CutKind::Horizontal);
        assert_eq!(h.get(&NodeId::new("e7")), Some(0));
        assert_eq!(h.get(&NodeId::new("a6")), Some(0));
        assert_eq!(h.get(&NodeId::new("a5")), Some(2));
    }

    #[test]
    fn random_graphs() {
        assert_eq!(erdos_renyi(6, 1.0, 7).unwrap().edge_count(), 30);
        assert_eq!(erdos_renyi(6, 0.0, 7).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi(20, 0.3, 42).unwrap(), erdos_renyi(20, 0.3, 42).unwrap());
        assert_eq!(erdos_renyi(3, 1.5, 0).unwrap_err(), NetgenError::BadProbability(1.5));
        assert_eq!(random_scale(4), (16, 0.25));
    }

    #[test]
    fn edge_lists() {
        let t = parse_edge_list("# backbone\na b\nb c # trailing\n").unwrap();
        assert_eq!((t.len(), t.edge_count()), (3, 4));
        let d = parse_edge_list("a -> b").unwrap();
        assert_eq!(d.edge_count(), 1);
        assert!(matches!(parse_edge_list("a a"), Err(NetgenError::SelfLoop(_))));
        assert!(matches!(parse_edge_list("a b\nb a"), Err(NetgenError::DuplicateEdge(_))));
        assert!(matches!(parse_edge_list("a b c"), Err(NetgenError::Parse { line: 1, .. })));
    }

    #[test]
    fn assignment_files() {
        let a = load_assignment("x 0\ny 1\n").unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(load_assignment("x 0\nx 1").unwrap_err(), NetgenError::DuplicateNode(NodeId::new("x")));
    }
}
