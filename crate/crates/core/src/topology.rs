//! Directed network topologies with a canonical node order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A node identifier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(Arc<str>);

impl NodeId {
    pub fn new(name: &str) -> Self {
        NodeId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(Arc::from(s))
    }
}

/// A directed edge `src -> dst`; routes travel along it from `src` to `dst`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
}

impl Edge {
    pub fn new(src: impl Into<NodeId>, dst: impl Into<NodeId>) -> Self {
        Edge { src: src.into(), dst: dst.into() }
    }

    pub fn reversed(&self) -> Edge {
        Edge { src: self.dst.clone(), dst: self.src.clone() }
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.src, self.dst)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.src, self.dst)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("self-loop {0}")]
    SelfLoop(Edge),
    #[error("edge {0} refers to an undeclared node")]
    DanglingEdge(Edge),
    #[error("node {0} declared twice")]
    DuplicateNode(NodeId),
    #[error("edge {0} declared twice")]
    DuplicateEdge(Edge),
}

/// Nodes in a canonical (declaration) order plus a set of directed edges.
///
/// The canonical order drives every deterministic traversal in the crate:
/// merge folds, fragment construction and SMT variable naming.
#[derive(Debug, Clone)]
pub struct Topology {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    edges: BTreeSet<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Topology {}

impl Topology {
    /// Builds a topology; duplicate edges are merged.
    pub fn new(nodes: Vec<NodeId>, edges: impl IntoIterator<Item = Edge>) -> Result<Self, TopologyError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(TopologyError::DuplicateNode(n.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for e in edges {
            if e.src == e.dst {
                return Err(TopologyError::SelfLoop(e));
            }
            match (index.get(&e.src), index.get(&e.dst)) {
                (Some(&u), Some(&v)) => {
                    set.insert((u, v));
                }
                _ => return Err(TopologyError::DanglingEdge(e)),
            }
        }
        let mut preds = vec![Vec::new(); nodes.len()];
        let mut succs = vec![Vec::new(); nodes.len()];
        // BTreeSet iteration keeps both adjacency lists in canonical order.
        for &(u, v) in &set {
            succs[u].push(v);
            preds[v].push(u);
        }
        for p in &mut preds {
            p.sort_unstable();
        }
        Ok(Topology { nodes, index, edges: set, preds, succs })
    }

    pub fn from_names(nodes: &[&str], edges: &[(&str, &str)]) -> Result<Self, TopologyError> {
        Topology::new(nodes.iter().map(|n| NodeId::new(n)).collect(), edges.iter().map(|(u, v)| Edge::new(*u, *v)))
    }

    pub fn empty() -> Self {
        Topology::new(Vec::new(), std::iter::empty()).expect("empty topology is valid")
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn position(&self, n: &NodeId) -> Option<usize> {
        self.index.get(n).copied()
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.index.contains_key(n)
    }

    pub fn node(&self, i: usize) -> &NodeId {
        &self.nodes[i]
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        match (self.position(&e.src), self.position(&e.dst)) {
            (Some(u), Some(v)) => self.edges.contains(&(u, v)),
            _ => false,
        }
    }

    /// Edges in canonical order (by source position, then target position).
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|&(u, v)| Edge { src: self.nodes[u].clone(), dst: self.nodes[v].clone() })
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// In-neighbours of the node at position `v`, ascending canonical order.
    pub fn pred_indices(&self, v: usize) -> &[usize] {
        &self.preds[v]
    }

    pub fn succ_indices(&self, u: usize) -> &[usize] {
        &self.succs[u]
    }

    pub fn in_neighbors(&self, v: &NodeId) -> Vec<NodeId> {
        self.position(v).map(|i| self.preds[i].iter().map(|&u| self.nodes[u].clone()).collect()).unwrap_or_default()
    }

    pub fn out_neighbors(&self, u: &NodeId) -> Vec<NodeId> {
        self.position(u).map(|i| self.succs[i].iter().map(|&v| self.nodes[v].clone()).collect()).unwrap_or_default()
    }

    pub fn in_degree(&self, v: &NodeId) -> usize {
        self.position(v).map(|i| self.preds[i].len()).unwrap_or(0)
    }

    /// The subgraph induced on `keep`, preserving canonical order.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> Topology {
        self.filtered(|n| keep.contains(n), |_| true)
    }

    /// Keeps nodes satisfying `keep_node` and, among edges between kept nodes,
    /// those satisfying `keep_edge`.
    pub fn filtered(&self, keep_node: impl Fn(&NodeId) -> bool, keep_edge: impl Fn(&Edge) -> bool) -> Topology {
        let nodes: Vec<NodeId> = self.nodes.iter().filter(|n| keep_node(n)).cloned().collect();
        let edges: Vec<Edge> = self
            .edges()
            .filter(|e| keep_node(&e.src) && keep_node(&e.dst) && keep_edge(e))
            .collect();
        Topology::new(nodes, edges).expect("subgraph of a valid topology is valid")
    }

    /// Maximal weakly connected components, each listed in canonical order;
    /// components are ordered by their first node.
    pub fn weak_components(&self) -> Vec<Vec<NodeId>> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            comp[start] = id;
            let mut members = Vec::new();
            while let Some(u) = stack.pop() {
                members.push(u);
                for &w in self.preds[u].iter().chain(&self.succs[u]) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members.into_iter().map(|i| self.nodes[i].clone()).collect());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_dangling_edges() {
        assert_eq!(
            Topology::from_names(&["v"], &[("v", "v")]),
            Err(TopologyError::SelfLoop(Edge::new("v", "v")))
        );
        assert_eq!(
            Topology::from_names(&["a"], &[("a", "b")]),
            Err(TopologyError::DanglingEdge(Edge::new("a", "b")))
        );
        assert!(matches!(Topology::from_names(&["a", "a"], &[]), Err(TopologyError::DuplicateNode(_))));
    }

    #[test]
    fn neighbours_follow_declaration_order() {
        let t = Topology::from_names(&["z", "a", "m"], &[("m", "a"), ("z", "a"), ("a", "m")]).unwrap();
        assert_eq!(t.in_neighbors(&"a".into()), vec![NodeId::new("z"), NodeId::new("m")]);
        assert_eq!(t.in_degree(&"z".into()), 0);
        assert_eq!(t.edge_count(), 3);
    }

    #[test]
    fn components() {
        let t = Topology::from_names(&["a", "b", "c", "d"], &[("b", "a"), ("c", "d")]).unwrap();
        let comps = t.weak_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], vec![NodeId::new("a"), NodeId::new("b")]);
    }
}
