//! Stable routing problems, open SRPs with assumptions and guarantees, and
//! the executable solution predicate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::policy::{Assignment, CompiledPolicy, Policy, PolicyError};
use crate::route::{RouteType, RouteValue};
use crate::topology::{Edge, NodeId, Topology, TopologyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SrpError {
    #[error("self-loop {0}")]
    SelfLoop(Edge),
    #[error("edge {0} refers to an undeclared node")]
    DanglingEdge(Edge),
    #[error("node {0} declared twice")]
    DuplicateNode(NodeId),
    #[error("edge {0} declared twice")]
    DuplicateEdge(Edge),
    #[error("input node {node} has incoming edge {edge}")]
    InputHasInEdge { node: NodeId, edge: Edge },
    #[error("node {0} is both an input and an output")]
    InOutOverlap(NodeId),
    #[error("init value of {0} does not conform to the route type")]
    NonConformingInit(NodeId),
    #[error("no init value for {0}")]
    MissingInit(NodeId),
    #[error("assumption or guarantee at {0} does not conform to the route type")]
    NonConformingAnnotation(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

impl From<TopologyError> for SrpError {
    fn from(e: TopologyError) -> Self {
        match e {
            TopologyError::SelfLoop(e) => SrpError::SelfLoop(e),
            TopologyError::DanglingEdge(e) => SrpError::DanglingEdge(e),
            TopologyError::DuplicateNode(n) => SrpError::DuplicateNode(n),
            TopologyError::DuplicateEdge(e) => SrpError::DuplicateEdge(e),
        }
    }
}

/// Unvalidated open-SRP data, as read from a file or assembled by hand.
#[derive(Debug, Clone)]
pub struct OpenSrpData {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<Edge>,
    pub policy: Policy,
    /// Explicit init values; when absent they are computed from the policy.
    pub init: Option<BTreeMap<NodeId, RouteValue>>,
    pub inh: BTreeMap<NodeId, RouteValue>,
    pub outh: BTreeMap<NodeId, RouteValue>,
}

/// A validated open SRP. A closed SRP has no inputs and no outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenSrp {
    topology: Topology,
    policy: Policy,
    init: Vec<RouteValue>,
    inh: BTreeMap<NodeId, RouteValue>,
    outh: BTreeMap<NodeId, RouteValue>,
}

/// Validates raw open-SRP data.
pub fn validate_open_srp(data: OpenSrpData) -> Result<OpenSrp, SrpError> {
    let mut seen = BTreeSet::new();
    for e in &data.edges {
        if e.src == e.dst {
            return Err(SrpError::SelfLoop(e.clone()));
        }
        if !seen.insert(e.clone()) {
            return Err(SrpError::DuplicateEdge(e.clone()));
        }
    }
    let topology = Topology::new(data.nodes, data.edges)?;
    let init = match &data.init {
        Some(map) => topology
            .nodes()
            .iter()
            .map(|n| map.get(n).cloned().ok_or_else(|| SrpError::MissingInit(n.clone())))
            .collect::<Result<Vec<_>, _>>()?,
        None => topology.nodes().iter().map(|n| data.policy.init(n)).collect(),
    };
    if let Some(map) = &data.init {
        if let Some(extra) = map.keys().find(|n| !topology.contains(n)) {
            return Err(SrpError::UnknownNode(extra.clone()));
        }
    }
    OpenSrp::from_parts(topology, data.policy, init, data.inh, data.outh)
}

impl OpenSrp {
    /// Validates the open-SRP invariants over already-built parts.
    pub fn from_parts(
        topology: Topology,
        policy: Policy,
        init: Vec<RouteValue>,
        inh: BTreeMap<NodeId, RouteValue>,
        outh: BTreeMap<NodeId, RouteValue>,
    ) -> Result<Self, SrpError> {
        let rt = policy.route_type();
        assert_eq!(init.len(), topology.len(), "init must be aligned with the topology");
        for (n, v) in topology.nodes().iter().zip(&init) {
            if !rt.conforms(v) {
                return Err(SrpError::NonConformingInit(n.clone()));
            }
        }
        for (n, v) in inh.iter().chain(&outh) {
            let Some(i) = topology.position(n) else {
                return Err(SrpError::UnknownNode(n.clone()));
            };
            if !rt.conforms(v) {
                return Err(SrpError::NonConformingAnnotation(n.clone()));
            }
            if inh.contains_key(n) {
                if outh.contains_key(n) {
                    return Err(SrpError::InOutOverlap(n.clone()));
                }
                if let Some(&u) = topology.pred_indices(i).first() {
                    return Err(SrpError::InputHasInEdge { node: n.clone(), edge: Edge::new(topology.node(u).clone(), n.clone()) });
                }
            }
        }
        Ok(OpenSrp { topology, policy, init, inh, outh })
    }

    /// A closed SRP whose init values come from the policy.
    pub fn closed(topology: Topology, policy: Policy) -> Self {
        let init = topology.nodes().iter().map(|n| policy.init(n)).collect();
        OpenSrp::from_parts(topology, policy, init, BTreeMap::new(), BTreeMap::new())
            .expect("closed SRP with policy-derived init is valid")
    }

    pub fn open(
        topology: Topology,
        policy: Policy,
        inh: BTreeMap<NodeId, RouteValue>,
        outh: BTreeMap<NodeId, RouteValue>,
    ) -> Result<Self, SrpError> {
        let init = topology.nodes().iter().map(|n| policy.init(n)).collect();
        OpenSrp::from_parts(topology, policy, init, inh, outh)
    }

    /// The raw data this instance was validated from.
    pub fn to_data(&self) -> OpenSrpData {
        OpenSrpData {
            nodes: self.topology.nodes().to_vec(),
            edges: self.topology.edges().collect(),
            policy: self.policy.clone(),
            init: Some(self.topology.nodes().iter().cloned().zip(self.init.iter().cloned()).collect()),
            inh: self.inh.clone(),
            outh: self.outh.clone(),
        }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn route_type(&self) -> &RouteType {
        self.policy.route_type()
    }

    pub fn nodes(&self) -> &[NodeId] {
        self.topology.nodes()
    }

    pub fn init(&self, v: &NodeId) -> Option<&RouteValue> {
        self.topology.position(v).map(|i| &self.init[i])
    }

    pub fn init_at(&self, i: usize) -> &RouteValue {
        &self.init[i]
    }

    pub fn inh(&self) -> &BTreeMap<NodeId, RouteValue> {
        &self.inh
    }

    pub fn outh(&self) -> &BTreeMap<NodeId, RouteValue> {
        &self.outh
    }

    pub fn inputs(&self) -> BTreeSet<NodeId> {
        self.inh.keys().cloned().collect()
    }

    pub fn outputs(&self) -> BTreeSet<NodeId> {
        self.outh.keys().cloned().collect()
    }

    pub fn is_input(&self, v: &NodeId) -> bool {
        self.inh.contains_key(v)
    }

    pub fn is_output(&self, v: &NodeId) -> bool {
        self.outh.contains_key(v)
    }

    pub fn is_closed(&self) -> bool {
        self.inh.is_empty() && self.outh.is_empty()
    }

    /// Right-hand side of the stability equation at position `v`:
    /// `init(v)` merged with the transfer of every in-neighbour's label, in
    /// canonical neighbour order.
    pub fn local_rhs(&self, v: usize, label: impl Fn(usize) -> RouteValue) -> RouteValue {
        let dst = self.topology.node(v);
        let mut acc = self.init[v].clone();
        for &u in self.topology.pred_indices(v) {
            let e = Edge { src: self.topology.node(u).clone(), dst: dst.clone() };
            let t = self.policy.trans(&e, &label(u));
            acc = self.policy.merge(&acc, &t);
        }
        acc
    }

    /// The same instance with different assumptions and guarantees.
    pub fn with_annotations(
        &self,
        inh: BTreeMap<NodeId, RouteValue>,
        outh: BTreeMap<NodeId, RouteValue>,
    ) -> Result<Self, SrpError> {
        OpenSrp::from_parts(self.topology.clone(), self.policy.clone(), self.init.clone(), inh, outh)
    }
}

/// A total assignment of routes to nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labeling(BTreeMap<NodeId, RouteValue>);

impl Labeling {
    pub fn new() -> Self {
        Labeling(BTreeMap::new())
    }

    pub fn get(&self, v: &NodeId) -> Option<&RouteValue> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: NodeId, r: RouteValue) -> Option<RouteValue> {
        self.0.insert(v, r)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, &RouteValue)> {
        self.0.iter()
    }

    pub fn contains(&self, v: &NodeId) -> bool {
        self.0.contains_key(v)
    }

    /// Values in the order of `nodes`; `None` for unlabeled nodes.
    pub fn ordered<'a>(&'a self, nodes: &'a [NodeId]) -> impl Iterator<Item = (&'a NodeId, Option<&'a RouteValue>)> + 'a {
        nodes.iter().map(|n| (n, self.0.get(n)))
    }

    /// A two-column text table in the given node order.
    pub fn table(&self, nodes: &[NodeId]) -> String {
        let width = nodes.iter().map(|n| n.as_str().len()).max().unwrap_or(4).max(4);
        let mut out = format!("{:width$}  route\n", "node");
        for (n, r) in self.ordered(nodes) {
            let shown = r.map_or_else(|| "-".to_string(), |r| r.to_string());
            out.push_str(&format!("{:width$}  {shown}\n", n.as_str()));
        }
        out
    }
}

impl FromIterator<(NodeId, RouteValue)> for Labeling {
    fn from_iter<T: IntoIterator<Item = (NodeId, RouteValue)>>(iter: T) -> Self {
        Labeling(iter.into_iter().collect())
    }
}

/// Restriction of `lab` to `nodes`.
pub fn restrict_labeling<'a>(lab: &Labeling, nodes: impl IntoIterator<Item = &'a NodeId>) -> Result<Labeling, SrpError> {
    nodes
        .into_iter()
        .map(|n| lab.get(n).map(|r| (n.clone(), r.clone())).ok_or_else(|| SrpError::UnknownNode(n.clone())))
        .collect()
}

/// Which solution equation a node violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Equation {
    /// `λ(v) = init(v) ⊕ trans(uv, λ(u)) ⊕ ...` for non-input nodes.
    Network,
    /// `λ(v) = inh(v)` for inputs.
    Assumption,
    /// `λ(v) = outh(v)` for outputs.
    Guarantee,
    /// The labeling has no value for the node.
    Unlabeled,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equation::Network => "network",
            Equation::Assumption => "assumption",
            Equation::Guarantee => "guarantee",
            Equation::Unlabeled => "unlabeled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeViolation {
    pub node: NodeId,
    pub equation: Equation,
    pub expected: Option<RouteValue>,
    pub actual: Option<RouteValue>,
}

impl fmt::Display for NodeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &Option<RouteValue>| r.as_ref().map_or_else(|| "-".to_string(), |r| r.to_string());
        write!(f, "{}: {} equation fails (expected {}, found {})", self.node, self.equation, show(&self.expected), show(&self.actual))
    }
}

/// Outcome of [`is_solution`]: empty when the labeling is a solution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolutionReport {
    pub violations: Vec<NodeViolation>,
}

impl SolutionReport {
    pub fn is_solution(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_at(&self, v: &NodeId) -> Vec<Equation> {
        self.violations.iter().filter(|x| &x.node == v).map(|x| x.equation).collect()
    }
}

/// Checks every solution equation of `srp` against `lab`, in canonical node
/// order. Output nodes must satisfy both the network and guarantee
/// equations.
pub fn is_solution(srp: &OpenSrp, lab: &Labeling) -> SolutionReport {
    let topo = srp.topology();
    let mut violations = Vec::new();
    let values: Vec<Option<&RouteValue>> = topo.nodes().iter().map(|n| lab.get(n)).collect();
    for (i, v) in topo.nodes().iter().enumerate() {
        let Some(actual) = values[i] else {
            violations.push(NodeViolation { node: v.clone(), equation: Equation::Unlabeled, expected: None, actual: None });
            continue;
        };
        let mut fail = |equation, expected: &RouteValue| {
            if expected != actual {
                violations.push(NodeViolation {
                    node: v.clone(),
                    equation,
                    expected: Some(expected.clone()),
                    actual: Some(actual.clone()),
                });
            }
        };
        if let Some(assumed) = srp.inh().get(v) {
            fail(Equation::Assumption, assumed);
        } else {
            // Unlabeled neighbours make the equation undecidable; they are
            // reported on their own, so evaluate with a placeholder.
            if topo.pred_indices(i).iter().all(|&u| values[u].is_some()) {
                let rhs = srp.local_rhs(i, |u| values[u].cloned().expect("checked"));
                fail(Equation::Network, &rhs);
            }
        }
        if let Some(guaranteed) = srp.outh().get(v) {
            fail(Equation::Guarantee, guaranteed);
        }
    }
    SolutionReport { violations }
}

/// An open SRP whose policy may still contain symbolic parameters.
#[derive(Debug, Clone)]
pub struct SrpTemplate {
    pub topology: Topology,
    pub policy: Arc<CompiledPolicy>,
    pub inh: BTreeMap<NodeId, RouteValue>,
    pub outh: BTreeMap<NodeId, RouteValue>,
}

impl SrpTemplate {
    pub fn assignments(&self) -> Result<Vec<Assignment>, PolicyError> {
        crate::policy::enumerate_assignments(&self.policy.spec.symbolics)
    }

    pub fn instantiate(&self, assignment: &Assignment) -> Result<OpenSrp, SrpError> {
        let policy = self.policy.bind(assignment)?;
        OpenSrp::open(self.topology.clone(), policy, self.inh.clone(), self.outh.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::builtin::{shortest_path, sp_route};

    fn sp(dest: &str) -> Policy {
        Policy::closed(shortest_path(&NodeId::new(dest), 15, &[])).unwrap()
    }

    fn data(nodes: &[&str], edges: &[(&str, &str)]) -> OpenSrpData {
        OpenSrpData {
            nodes: nodes.iter().map(|n| NodeId::new(n)).collect(),
            edges: edges.iter().map(|(u, v)| Edge::new(*u, *v)).collect(),
            policy: sp("d"),
            init: None,
            inh: BTreeMap::new(),
            outh: BTreeMap::new(),
        }
    }

    #[test]
    fn validation_errors() {
        assert!(validate_open_srp(data(&["d", "a"], &[("d", "a")])).unwrap().is_closed());
        assert_eq!(validate_open_srp(data(&["v"], &[("v", "v")])).unwrap_err(), SrpError::SelfLoop(Edge::new("v", "v")));
        let mut d = data(&["u", "v"], &[("u", "v")]);
        d.inh.insert(NodeId::new("v"), sp_route(1));
        assert_eq!(
            validate_open_srp(d).unwrap_err(),
            SrpError::InputHasInEdge { node: NodeId::new("v"), edge: Edge::new("u", "v") }
        );
        let mut d = data(&["u", "v"], &[("u", "v")]);
        d.inh.insert(NodeId::new("u"), sp_route(1));
        d.outh.insert(NodeId::new("u"), sp_route(1));
        assert_eq!(validate_open_srp(d).unwrap_err(), SrpError::InOutOverlap(NodeId::new("u")));
        assert!(matches!(validate_open_srp(data(&["a"], &[("a", "b")])), Err(SrpError::DanglingEdge(_))));
        let mut d = data(&["d"], &[]);
        d.init = Some([(NodeId::new("d"), RouteValue::Int(3))].into_iter().collect());
        assert_eq!(validate_open_srp(d).unwrap_err(), SrpError::NonConformingInit(NodeId::new("d")));
    }

    #[test]
    fn validation_is_idempotent() {
        let mut d = data(&["u", "v", "d"], &[("u", "v"), ("d", "v")]);
        d.inh.insert(NodeId::new("u"), sp_route(4));
        d.outh.insert(NodeId::new("v"), sp_route(1));
        let once = validate_open_srp(d).unwrap();
        let twice = validate_open_srp(once.to_data()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn solution_equations() {
        let srp = validate_open_srp(data(&["d", "a"], &[("d", "a"), ("a", "d")])).unwrap();
        let good: Labeling = [(NodeId::new("d"), sp_route(0)), (NodeId::new("a"), sp_route(1))].into_iter().collect();
        assert!(is_solution(&srp, &good).is_solution());
        let bad: Labeling = [(NodeId::new("d"), sp_route(1)), (NodeId::new("a"), sp_route(1))].into_iter().collect();
        let report = is_solution(&srp, &bad);
        assert_eq!(report.violations_at(&NodeId::new("d")), vec![Equation::Network]);
    }

    #[test]
    fn guarantee_equation_on_outputs() {
        let mut d = data(&["d", "a"], &[("d", "a")]);
        d.outh.insert(NodeId::new("a"), sp_route(2));
        let srp = validate_open_srp(d).unwrap();
        let lab: Labeling = [(NodeId::new("d"), sp_route(0)), (NodeId::new("a"), sp_route(1))].into_iter().collect();
        assert_eq!(is_solution(&srp, &lab).violations_at(&NodeId::new("a")), vec![Equation::Guarantee]);
    }

    #[test]
    fn restriction() {
        let lab: Labeling = [(NodeId::new("a"), RouteValue::Int(1)), (NodeId::new("b"), RouteValue::Int(2))].into_iter().collect();
        let a = NodeId::new("a");
        assert_eq!(restrict_labeling(&lab, [&a]).unwrap(), [(a.clone(), RouteValue::Int(1))].into_iter().collect());
        let all: Vec<NodeId> = lab.iter().map(|(n, _)| n.clone()).collect();
        assert_eq!(restrict_labeling(&lab, &all).unwrap(), lab);
        assert_eq!(restrict_labeling(&lab, [&NodeId::new("z")]), Err(SrpError::UnknownNode(NodeId::new("z"))));
    }
}
